#include "attributes.hpp"

#include <set>

#include "spatial/io.hpp"

namespace spatial::detail {

namespace {

const std::set<std::string, std::less<>> kReadOnly = {
    "footprint", "volume",  "perimeter", "length", "radius", "frontarea", "sidearea",
    "surface",   "equilateral", "thin",  "long",   "cx",     "cy",        "cz",
    "yaw",
};

const std::set<std::string, std::less<>> kWritable = {
    "id",    "label",    "type",  "x",     "y",       "z",       "w",        "width", "h",
    "height", "d",       "depth", "angle", "velocity", "speed",  "virtual", "moving", "observer",
    "confidence",
};

std::optional<double> as_number(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::optional<bool> as_bool(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  return std::nullopt;
}

}  // namespace

bool is_builtin_attribute(std::string_view name) { return kReadOnly.count(name) || kWritable.count(name); }

bool is_read_only_attribute(std::string_view name) { return kReadOnly.count(name) > 0; }

Value attribute_value(const SpatialObject& obj, const DerivedAttributes& derived, const std::vector<RefSegment>& path,
                      std::size_t start) {
  if (start >= path.size()) return std::monostate{};
  const std::string& name = path[start].name;
  const bool last = start + 1 == path.size();
  if (path[start].index) return std::monostate{};

  if (name == "confidence") {
    const std::string aspect = last ? "overall" : path[start + 1].name;
    if (start + 2 < path.size()) return std::monostate{};
    auto it = obj.confidence.find(aspect);
    if (it == obj.confidence.end()) return std::monostate{};
    return it->second;
  }
  if (!last) return std::monostate{};

  if (name == "id") return obj.id;
  if (name == "label") return obj.label;
  if (name == "type") return obj.type;
  if (name == "x") return obj.x;
  if (name == "y") return obj.y;
  if (name == "z") return obj.z;
  if (name == "w" || name == "width") return obj.w;
  if (name == "h" || name == "height") return obj.h;
  if (name == "d" || name == "depth") return obj.d;
  if (name == "angle") return obj.angle;
  if (name == "yaw") return obj.yaw_degrees();
  if (name == "velocity" || name == "speed") return obj.velocity;
  if (name == "virtual") return obj.is_virtual;
  if (name == "moving") return obj.is_moving();
  if (name == "observer") return obj.observer;
  if (name == "footprint") return derived.footprint;
  if (name == "volume") return derived.volume;
  if (name == "perimeter") return derived.perimeter;
  if (name == "length") return derived.length;
  if (name == "radius") return derived.radius;
  if (name == "frontarea") return derived.front_area;
  if (name == "sidearea") return derived.side_area;
  if (name == "surface") return derived.surface;
  if (name == "equilateral") return derived.equilateral;
  if (name == "thin") return derived.thin;
  if (name == "long") return derived.is_long;
  if (name == "cx") return derived.center.x;
  if (name == "cy") return derived.center.y;
  if (name == "cz") return derived.center.z;

  auto it = obj.attributes.find(name);
  if (it == obj.attributes.end()) return std::monostate{};
  return std::visit([](const auto& v) -> Value { return v; }, it->second);
}

void assign_attribute(SpatialObject& obj, const std::vector<std::string>& target, const Value& value) {
  const std::string& name = target.front();
  auto fail = [&](const std::string& why) {
    throw InvalidArgument("cannot assign " + describe(value) + " to '" + name + "': " + why);
  };
  if (std::holds_alternative<std::monostate>(value)) fail("value is undefined");
  if (std::holds_alternative<std::vector<double>>(value)) fail("value is a list");
  if (name == "id") fail("object ids are immutable");
  if (is_read_only_attribute(name)) fail("derived attributes are read-only");

  if (name == "confidence") {
    if (target.size() > 2) fail("nested confidence aspects are not supported");
    const auto v = as_number(value);
    if (!v) fail("confidence must be numeric");
    obj.confidence[target.size() == 2 ? target[1] : "overall"] = *v;
    return;
  }
  if (target.size() != 1) fail("only confidence supports dotted targets");

  auto number = [&]() {
    const auto v = as_number(value);
    if (!v) fail("a number is required");
    return *v;
  };
  auto flag = [&]() {
    const auto v = as_bool(value);
    if (!v) fail("a boolean is required");
    return *v;
  };
  auto text = [&]() {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    fail("a string is required");
    return std::string();
  };

  if (name == "label") obj.label = text();
  else if (name == "type") obj.type = text();
  else if (name == "x") obj.x = number();
  else if (name == "y") obj.y = number();
  else if (name == "z") obj.z = number();
  else if (name == "w" || name == "width") obj.w = number();
  else if (name == "h" || name == "height") obj.h = number();
  else if (name == "d" || name == "depth") obj.d = number();
  else if (name == "angle") obj.angle = number();
  else if (name == "velocity" || name == "speed") obj.velocity = number();
  else if (name == "virtual") obj.is_virtual = flag();
  else if (name == "moving") obj.moving = flag();
  else if (name == "observer") obj.observer = flag();
  else {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double> || std::is_same_v<T, std::string> || std::is_same_v<T, bool>) {
            obj.attributes[name] = v;
          }
        },
        value);
  }
}

std::string describe(const Value& value) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "<absent>"; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return "'" + s + "'"; }
    std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
    std::string operator()(const std::vector<double>& v) const { return "list of " + std::to_string(v.size()); }
  };
  return std::visit(Visitor{}, value);
}

}  // namespace spatial::detail
