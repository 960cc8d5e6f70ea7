#include "spatial/io.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "spatial/deduction.hpp"
#include "spatial/geometry.hpp"

namespace spatial {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

SourceLocation location_of(std::string_view text, std::size_t byte) {
  SourceLocation at;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++at.line;
      at.column = 1;
    } else {
      ++at.column;
    }
  }
  return at;
}

class RecordReader {
 public:
  RecordReader(const json& record, std::size_t index) : record_(record), index_(index) {}

  [[noreturn]] void fail(const std::string& message) const {
    std::string where = "object #" + std::to_string(index_);
    if (!id_.empty()) where += " ('" + id_ + "')";
    throw InvalidArgument(where + ": " + message);
  }

  void set_id(std::string id) { id_ = std::move(id); }

  const json* field(const char* name) const {
    auto it = record_.find(name);
    return it == record_.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const char* name, std::optional<double> fallback = std::nullopt) const {
    const json* v = field(name);
    if (v == nullptr) {
      if (fallback) return *fallback;
      fail(std::string("missing required field '") + name + "'");
    }
    if (!v->is_number()) fail(std::string("field '") + name + "' must be a number");
    return v->get<double>();
  }

  std::string text(const char* name) const {
    const json* v = field(name);
    if (v == nullptr) return {};
    if (!v->is_string()) fail(std::string("field '") + name + "' must be a string");
    return v->get<std::string>();
  }

  bool flag(const char* name) const {
    const json* v = field(name);
    if (v == nullptr) return false;
    if (!v->is_boolean()) fail(std::string("field '") + name + "' must be true or false");
    return v->get<bool>();
  }

 private:
  const json& record_;
  std::size_t index_;
  std::string id_;
};

SpatialObject read_object(const json& record, std::size_t index) {
  RecordReader r(record, index);
  if (!record.is_object()) r.fail("must be a JSON object");
  const json* id = r.field("id");
  if (id == nullptr) r.fail("missing required field 'id'");
  if (!id->is_string() || id->get<std::string>().empty()) r.fail("'id' must be a non-empty string");

  SpatialObject obj;
  obj.id = id->get<std::string>();
  r.set_id(obj.id);
  obj.x = r.number("x");
  obj.y = r.number("y");
  obj.z = r.number("z");
  obj.w = r.number("w");
  obj.h = r.number("h");
  obj.d = r.number("d");
  obj.angle = r.number("angle", 0.0);
  obj.velocity = r.number("velocity", 0.0);
  obj.label = r.text("label");
  obj.type = r.text("type");
  obj.is_virtual = r.flag("virtual");
  obj.moving = r.flag("moving");
  obj.observer = r.flag("observer");
  if (const json* conf = r.field("confidence")) {
    if (conf->is_number()) {
      obj.confidence["overall"] = conf->get<double>();
    } else if (conf->is_object()) {
      for (const auto& [aspect, value] : conf->items()) {
        if (!value.is_number()) r.fail("confidence." + aspect + " must be a number");
        obj.confidence[aspect] = value.get<double>();
      }
    } else {
      r.fail("'confidence' must be a number or an object");
    }
  }
  if (const json* attrs = r.field("attributes")) {
    if (!attrs->is_object()) r.fail("'attributes' must be an object");
    for (const auto& [name, value] : attrs->items()) {
      if (value.is_boolean()) obj.attributes[name] = value.get<bool>();
      else if (value.is_number()) obj.attributes[name] = value.get<double>();
      else if (value.is_string()) obj.attributes[name] = value.get<std::string>();
      else r.fail("attribute '" + name + "' must be a string, number or boolean");
    }
  }
  try {
    validate(obj);
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
  return obj;
}

AdjustmentSettings read_settings(const json& block) {
  if (!block.is_object()) throw InvalidArgument("'settings' must be an object");
  AdjustmentSettings s;
  auto number = [&](const char* key, double& target) {
    auto it = block.find(key);
    if (it == block.end()) return;
    if (!it->is_number()) throw InvalidArgument(std::string("settings.") + key + " must be a number");
    target = it->get<double>();
  };
  number("max_gap", s.max_gap);
  number("max_angle", s.max_angle);
  number("sector_factor", s.sector_factor);
  number("nearby_factor", s.nearby_factor);
  number("nearby_limit", s.nearby_limit);
  number("long_ratio", s.long_ratio);
  number("thin_ratio", s.thin_ratio);
  if (auto it = block.find("sector_schema"); it != block.end()) {
    auto schema = it->is_string() ? parse_sector_schema(it->get<std::string>()) : std::nullopt;
    if (!schema) throw InvalidArgument("settings.sector_schema must be fixed, dimension or nearby");
    s.sector_schema = *schema;
  }
  if (auto it = block.find("nearby_schema"); it != block.end()) {
    auto schema = it->is_string() ? parse_nearby_schema(it->get<std::string>()) : std::nullopt;
    if (!schema) throw InvalidArgument("settings.nearby_schema must be fixed, dimension or limit");
    s.nearby_schema = *schema;
  }
  if (auto it = block.find("north"); it != block.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      throw InvalidArgument("settings.north must be [x, z]");
    }
    s.north_x = (*it)[0].get<double>();
    s.north_z = (*it)[1].get<double>();
  }
  s.validate();
  return s;
}

ordered_json write_object(const SpatialObject& obj) {
  ordered_json j;
  j["id"] = obj.id;
  j["x"] = obj.x;
  j["y"] = obj.y;
  j["z"] = obj.z;
  j["w"] = obj.w;
  j["h"] = obj.h;
  j["d"] = obj.d;
  j["angle"] = obj.angle;
  j["label"] = obj.label;
  j["type"] = obj.type;
  ordered_json conf = ordered_json::object();
  for (const auto& [aspect, value] : obj.confidence) conf[aspect] = value;
  j["confidence"] = conf;
  j["velocity"] = obj.velocity;
  j["virtual"] = obj.is_virtual;
  j["moving"] = obj.moving;
  j["observer"] = obj.observer;
  ordered_json attrs = ordered_json::object();
  for (const auto& [name, value] : obj.attributes) {
    std::visit([&](const auto& v) { attrs[name] = v; }, value);
  }
  j["attributes"] = attrs;
  return j;
}

ordered_json write_settings(const AdjustmentSettings& s) {
  ordered_json j;
  j["max_gap"] = s.max_gap;
  j["max_angle"] = s.max_angle;
  j["sector_schema"] = std::string(to_string(s.sector_schema));
  j["sector_factor"] = s.sector_factor;
  j["nearby_schema"] = std::string(to_string(s.nearby_schema));
  j["nearby_factor"] = s.nearby_factor;
  j["nearby_limit"] = s.nearby_limit;
  j["long_ratio"] = s.long_ratio;
  j["thin_ratio"] = s.thin_ratio;
  j["north"] = {s.north_x, s.north_z};
  return j;
}

// Keeps letters, digits and a few punctuation marks that are inert inside a
// quoted Mermaid node label; everything else becomes '_'.
std::string mermaid_text(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == ' ' || c == '-' || c == '_' || c == '.' || c == ',' || c == ':' || c == '/' ||
        c == '\'' || c == '(' || c == ')') {
      out += static_cast<char>(c);
    } else {
      out += '_';
    }
  }
  return out;
}

std::string scene_name(std::string_view s) {
  std::string out;
  for (unsigned char c : s) out += std::isgraph(c) ? static_cast<char>(c) : '_';
  return out;
}

}  // namespace

FactDocument load_facts(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::string what = e.what();
    const auto cut = what.find("parse error");
    throw ParseError(location_of(text, e.byte > 0 ? e.byte - 1 : 0),
                     "malformed fact document: " + (cut == std::string::npos ? what : what.substr(cut)));
  }
  json objects;
  if (doc.is_array()) {
    objects = doc;
  } else if (doc.is_object()) {
    if (auto v = doc.find("version"); v != doc.end() && !(v->is_string() && v->get<std::string>() == "1")) {
      throw InvalidArgument("unsupported fact document version " + v->dump());
    }
    auto it = doc.find("objects");
    if (it == doc.end() || !it->is_array()) throw InvalidArgument("fact document needs an 'objects' array");
    objects = *it;
  } else {
    throw InvalidArgument("fact document must be a JSON object");
  }

  FactDocument out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    SpatialObject obj = read_object(objects[i], i);
    if (!seen.insert(obj.id).second) {
      throw InvalidArgument("object #" + std::to_string(i) + ": duplicate id '" + obj.id + "'");
    }
    out.facts.upsert(std::move(obj));
  }
  if (doc.is_object()) {
    if (auto it = doc.find("settings"); it != doc.end() && !it->is_null()) out.settings = read_settings(*it);
  }
  return out;
}

std::string dump_facts(const FactBase& fb, const std::optional<AdjustmentSettings>& settings, bool with_relations) {
  ordered_json doc;
  doc["version"] = "1";
  ordered_json objects = ordered_json::array();
  for (const auto& obj : fb.objects()) objects.push_back(write_object(obj));
  doc["objects"] = objects;
  if (settings) doc["settings"] = write_settings(*settings);
  if (with_relations) {
    ordered_json rels = ordered_json::array();
    for (const auto& r : fb.relations()) {
      ordered_json j;
      j["subject"] = r.subject;
      j["predicate"] = r.predicate;
      j["object"] = r.object;
      j["delta"] = r.delta;
      j["angle"] = r.angle;
      j["category"] = std::string(to_string(r.category));
      rels.push_back(j);
    }
    doc["relations"] = rels;
    if (!fb.variables().empty()) {
      ordered_json vars = ordered_json::object();
      for (const auto& [name, value] : fb.variables()) vars[name] = value;
      doc["variables"] = vars;
    }
  }
  return doc.dump(2) + "\n";
}

std::string export_mermaid(const FactBase& fb, const std::set<std::string>& predicates) {
  std::vector<const SpatialRelation*> edges;
  std::vector<bool> used(fb.size(), false);
  for (const auto& r : fb.relations()) {
    if (!predicates.empty() && !predicates.count(r.predicate)) continue;
    edges.push_back(&r);
    used[*fb.index_of(r.subject)] = true;
    used[*fb.index_of(r.object)] = true;
  }
  std::string out = "```mermaid\ngraph LR\n";
  for (std::size_t i = 0; i < fb.size(); ++i) {
    if (!used[i]) continue;
    const auto& obj = fb.objects()[i];
    const std::string text = obj.label.empty() ? obj.id : obj.label + " (" + obj.id + ")";
    out += "  n" + std::to_string(i) + "[\"" + mermaid_text(text) + "\"]\n";
  }
  for (const auto* r : edges) {
    out += "  n" + std::to_string(*fb.index_of(r->subject)) + " -->|" + mermaid_text(r->predicate) + "| n" +
           std::to_string(*fb.index_of(r->object)) + "\n";
  }
  out += "```\n";
  return out;
}

std::string export_scene(const FactBase& fb) {
  static constexpr int kFaces[6][4] = {{1, 2, 3, 4}, {5, 8, 7, 6}, {1, 5, 6, 2},
                                       {2, 6, 7, 3}, {3, 7, 8, 4}, {4, 8, 5, 1}};
  std::string out = "# spatial-reasoner scene\n";
  std::size_t base = 0;
  for (const auto& obj : fb.objects()) {
    out += "o " + scene_name(obj.id);
    if (!obj.label.empty()) out += ":" + scene_name(obj.label);
    out += "\n";
    for (const Vec3& c : corners(obj)) {
      out += "v " + format_number(c.x) + " " + format_number(c.y) + " " + format_number(c.z) + "\n";
    }
    for (const auto& face : kFaces) {
      out += "f";
      for (int k : face) out += " " + std::to_string(base + static_cast<std::size_t>(k));
      out += "\n";
    }
    base += 8;
  }
  return out;
}

std::string export_summary(const FactBase& fb, std::span<const std::string> ids) {
  std::string out = std::to_string(ids.size()) + " object(s)\n";
  for (const auto& id : ids) {
    const SpatialObject* obj = fb.find(id);
    if (obj == nullptr) continue;
    out += "  " + obj->id;
    if (!obj->label.empty()) out += " label='" + obj->label + "'";
    if (!obj->type.empty()) out += " type='" + obj->type + "'";
    out += " pos=(" + format_number(obj->x) + ", " + format_number(obj->y) + ", " + format_number(obj->z) + ")";
    out += " size=" + format_number(obj->w) + "x" + format_number(obj->h) + "x" + format_number(obj->d);
    out += " yaw=" + format_number(obj->yaw_degrees()) + "deg\n";
  }
  if (!fb.variables().empty()) {
    out += "variables\n";
    for (const auto& [name, value] : fb.variables()) out += "  " + name + " = " + format_number(value) + "\n";
  }
  return out;
}

}  // namespace spatial
