#include "spatial/deduction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>

namespace spatial {

namespace {

std::vector<std::string> sector_codes() {
  std::vector<SectorLabel> labels;
  for (int ahead : {0, 1, -1}) {
    for (int right : {0, -1, 1}) {
      for (int over : {0, 1, -1}) {
        labels.push_back({static_cast<std::int8_t>(ahead), static_cast<std::int8_t>(right),
                          static_cast<std::int8_t>(over)});
      }
    }
  }
  std::stable_sort(labels.begin(), labels.end(),
                   [](const SectorLabel& a, const SectorLabel& b) { return a.divergency() < b.divergency(); });
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(l.code());
  return out;
}

const std::array<std::vector<std::string>, kCategoryCount>& registry() {
  static const std::array<std::vector<std::string>, kCategoryCount> table = {
      std::vector<std::string>{"near", "far"},
      {"left", "right", "ahead", "behind", "above", "below"},
      {"leftside", "rightside", "frontside", "backside", "beside", "upperside", "lowerside", "ontop", "beneath"},
      {"aligned", "orthogonal", "opposite"},
      {"on", "at", "by", "in"},
      sector_codes(),
      {"disjoint", "inside", "containing", "overlapping", "crossing", "touching", "meeting"},
      {"infront", "atrear", "seenleft", "seenright"},
      {"shorter", "longer", "taller", "thinner", "wider", "smaller", "bigger", "fitting", "exceeding"},
      {"sameheight", "samewidth", "samedepth", "samelength", "sameperimeter", "samefront", "sameside",
       "samefootprint", "samesurface", "samevolume", "samecuboid", "congruent", "sameposition", "samecenter",
       "sameshape"},
      {"north", "south", "east", "west", "northeast", "northwest", "southeast", "southwest"},
  };
  return table;
}

const std::map<std::string, Category, std::less<>>& predicate_index() {
  static const auto index = [] {
    std::map<std::string, Category, std::less<>> out;
    const auto& table = registry();
    for (std::size_t c = 0; c < table.size(); ++c) {
      for (const auto& name : table[c]) out.emplace(name, static_cast<Category>(c));
    }
    out.emplace("over", Category::directionality);
    out.emplace("under", Category::directionality);
    return out;
  }();
  return index;
}

// Smallest angle between the two yaws once quarter turns are folded away.
double folded_quarter(double delta) {
  const double m = std::fmod(std::abs(wrap_angle(delta)), kPi / 2.0);
  return std::min(m, kPi / 2.0 - m);
}

std::string shape_of(const SpatialObject& obj) {
  auto it = obj.attributes.find("shape");
  if (it == obj.attributes.end()) return {};
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return {};
}

// Lazily computes the pairwise quantities shared across categories so that a
// full deduction evaluates each expensive test at most once per ordered pair.
class PairEvaluator {
 public:
  PairEvaluator(const SpatialObject& s, const SpatialObject& o, const DerivedAttributes& ds,
                const DerivedAttributes& dd, const AdjustmentSettings& settings, const SpatialObject* observer)
      : s_(s), o_(o), ds_(ds), do_(dd), settings_(settings), observer_(observer) {}

  void emit(Category category, std::vector<SpatialRelation>& out) {
    switch (category) {
      case Category::proximity: proximity(out); break;
      case Category::directionality: directionality(out); break;
      case Category::adjacency: adjacency(out); break;
      case Category::orientation: orientation(out); break;
      case Category::connectivity: connectivity(out); break;
      case Category::sectoriality: sectoriality(out); break;
      case Category::assembly: assembly(out); break;
      case Category::visibility: visibility(out); break;
      case Category::comparability: comparability(out); break;
      case Category::similarity: similarity(out); break;
      case Category::geography: geography(out); break;
    }
  }

 private:
  void add(std::vector<SpatialRelation>& out, Category category, std::string_view predicate, double delta) const {
    out.push_back({s_.id, std::string(predicate), o_.id, delta, yaw_delta(), category});
  }

  double yaw_delta() const { return wrap_angle(s_.angle - o_.angle); }

  double cd() {
    if (!cd_) cd_ = norm(ds_.center - do_.center);
    return *cd_;
  }
  double md() {
    if (!md_) md_ = min_distance(s_, o_);
    return *md_;
  }
  bool inter() {
    if (!inter_) inter_ = intersects(s_, o_);
    return *inter_;
  }
  bool inside() {
    if (!inside_) inside_ = contains(o_, s_);
    return *inside_;
  }
  bool containing() {
    if (!containing_) containing_ = contains(s_, o_);
    return *containing_;
  }
  double radius() {
    if (!radius_) {
      const double radii = ds_.radius + do_.radius;
      switch (settings_.nearby_schema) {
        case NearbySchema::fixed: radius_ = settings_.nearby_factor; break;
        case NearbySchema::dimension: radius_ = settings_.nearby_factor * radii; break;
        case NearbySchema::limit: radius_ = std::min(settings_.nearby_factor * radii, settings_.nearby_limit); break;
      }
    }
    return *radius_;
  }
  const std::string& sector_s_in_o() {
    if (!sec_so_) sec_so_ = code_of(classify_sector(o_, ds_.center, settings_, radius()));
    return *sec_so_;
  }
  const std::string& sector_o_in_s() {
    if (!sec_os_) sec_os_ = code_of(classify_sector(s_, do_.center, settings_, radius()));
    return *sec_os_;
  }
  static std::string code_of(const std::optional<SectorLabel>& label) { return label ? label->code() : std::string(); }

  bool near_distance() { return cd() < radius() + kEpsilon; }
  bool near() {
    if (!near_distance()) return false;
    return !contains_point(o_, ds_.center) && !contains_point(s_, do_.center);
  }
  bool separate() { return !inter() && !inside() && !containing(); }
  bool touching() { return separate() && md() < settings_.max_gap + kEpsilon; }
  bool vertical_overlap() {
    return std::min(s_.y + s_.h, o_.y + o_.h) - std::max(s_.y, o_.y) > kEpsilon;
  }
  bool face_contact() {
    auto count = [&](const std::array<double, 3>& ov) {
      return std::count_if(ov.begin(), ov.end(), [&](double v) { return v > settings_.max_gap; });
    };
    return count(axis_overlaps(s_, o_)) >= 2 || count(axis_overlaps(o_, s_)) >= 2;
  }
  bool meeting() {
    return touching() && folded_quarter(s_.angle - o_.angle) <= settings_.max_angle + kEpsilon && face_contact();
  }
  bool adjacent_base() { return near() && separate(); }
  bool ontop() {
    return adjacent_base() && md() < settings_.max_gap + kEpsilon &&
           (sector_s_in_o() == "o" || sector_o_in_s() == "u");
  }
  bool beneath() {
    return adjacent_base() && md() < settings_.max_gap + kEpsilon &&
           (sector_s_in_o() == "u" || sector_o_in_s() == "o");
  }
  bool beside() { return adjacent_base() && vertical_overlap(); }

  void proximity(std::vector<SpatialRelation>& out) {
    if (!near_distance()) {
      add(out, Category::proximity, "far", cd());
    } else if (near()) {
      add(out, Category::proximity, "near", cd());
    }
  }

  void directionality(std::vector<SpatialRelation>& out) {
    const SpatialObject& frame = frame_reference(s_, o_);
    const LocalPoint v = rotate_to_local(frame.angle, ds_.center - do_.center);
    const double delta = cd();
    if (v.lx < -kEpsilon) add(out, Category::directionality, "left", delta);
    if (v.lx > kEpsilon) add(out, Category::directionality, "right", delta);
    if (v.lz > kEpsilon) add(out, Category::directionality, "ahead", delta);
    if (v.lz < -kEpsilon) add(out, Category::directionality, "behind", delta);
    if (v.ly > kEpsilon) add(out, Category::directionality, "above", delta);
    if (v.ly < -kEpsilon) add(out, Category::directionality, "below", delta);
  }

  void adjacency(std::vector<SpatialRelation>& out) {
    if (!adjacent_base()) return;
    const double delta = md();
    static const std::map<std::string, std::string, std::less<>> kSides = {
        {"l", "leftside"}, {"r", "rightside"}, {"a", "frontside"},
        {"b", "backside"}, {"o", "upperside"}, {"u", "lowerside"},
    };
    if (auto it = kSides.find(sector_s_in_o()); it != kSides.end()) add(out, Category::adjacency, it->second, delta);
    if (beside()) add(out, Category::adjacency, "beside", delta);
    if (ontop()) add(out, Category::adjacency, "ontop", delta);
    if (beneath()) add(out, Category::adjacency, "beneath", delta);
  }

  void orientation(std::vector<SpatialRelation>& out) {
    const double d = yaw_delta();
    const double tol = settings_.max_angle + kEpsilon;
    if (std::abs(d) < tol) add(out, Category::orientation, "aligned", cd());
    if (std::abs(wrap_angle(d - kPi)) < tol) add(out, Category::orientation, "opposite", cd());
    if (std::min(std::abs(wrap_angle(d - kPi / 2.0)), std::abs(wrap_angle(d + kPi / 2.0))) < tol) {
      add(out, Category::orientation, "orthogonal", cd());
    }
  }

  void connectivity(std::vector<SpatialRelation>& out) {
    if (ontop()) add(out, Category::connectivity, "on", md());
    if (beside() && meeting()) add(out, Category::connectivity, "at", md());
    if (touching()) add(out, Category::connectivity, "by", md());
    if (inside()) add(out, Category::connectivity, "in", cd());
  }

  void sectoriality(std::vector<SpatialRelation>& out) {
    const std::string& code = sector_s_in_o();
    if (!code.empty()) add(out, Category::sectoriality, code, cd());
  }

  void assembly(std::vector<SpatialRelation>& out) {
    const bool in = inside();
    const bool holds = containing();
    if (separate()) add(out, Category::assembly, "disjoint", cd());
    if (in) add(out, Category::assembly, "inside", cd());
    if (holds) add(out, Category::assembly, "containing", cd());
    if (inter() && !in && !holds) {
      if (crosses(s_, o_) || crosses(o_, s_)) {
        add(out, Category::assembly, "crossing", cd());
      } else {
        add(out, Category::assembly, "overlapping", cd());
      }
    }
    if (touching()) add(out, Category::assembly, "touching", md());
    if (meeting()) add(out, Category::assembly, "meeting", md());
  }

  void visibility(std::vector<SpatialRelation>& out) {
    if (observer_ == nullptr) throw InvalidArgument("visibility requires an observer");
    if (s_.id == observer_->id || o_.id == observer_->id) return;
    const Vec3 eye = object_center(*observer_);
    const LocalPoint ls = rotate_to_local(observer_->angle, ds_.center - eye);
    const LocalPoint lo = rotate_to_local(observer_->angle, do_.center - eye);
    if (ls.lz <= kEpsilon || lo.lz <= kEpsilon) return;
    const double bs = std::atan2(ls.lx, ls.lz);
    const double bo = std::atan2(lo.lx, lo.lz);
    const double rs = std::hypot(ls.lx, ls.lz);
    const double ro = std::hypot(lo.lx, lo.lz);
    const double delta = bo - bs;
    if (bs < bo - kEpsilon) add(out, Category::visibility, "seenleft", std::abs(delta));
    if (bs > bo + kEpsilon) add(out, Category::visibility, "seenright", std::abs(delta));
    if (std::abs(delta) < settings_.max_angle + kEpsilon) {
      if (rs < ro - kEpsilon) add(out, Category::visibility, "infront", ro - rs);
      if (rs > ro + kEpsilon) add(out, Category::visibility, "atrear", rs - ro);
    }
  }

  void comparability(std::vector<SpatialRelation>& out) {
    const double g = settings_.max_gap;
    const double dl = ds_.length - do_.length;
    const double dh = s_.h - o_.h;
    const double df = ds_.footprint - do_.footprint;
    const double dv = ds_.volume - do_.volume;
    if (-dl > g) add(out, Category::comparability, "shorter", -dl);
    if (dl > g) add(out, Category::comparability, "longer", dl);
    if (dh > g) add(out, Category::comparability, "taller", dh);
    if (-df > g * g) add(out, Category::comparability, "thinner", -df);
    if (df > g * g) add(out, Category::comparability, "wider", df);
    if (-dv > g * g * g) add(out, Category::comparability, "smaller", -dv);
    if (dv > g * g * g) add(out, Category::comparability, "bigger", dv);
    const double s_min = std::min(s_.w, s_.d);
    const double s_max = std::max(s_.w, s_.d);
    const double o_min = std::min(o_.w, o_.d);
    const double o_max = std::max(o_.w, o_.d);
    const bool fits = s_.h <= o_.h + kEpsilon && s_min <= o_min + kEpsilon && s_max <= o_max + kEpsilon;
    if (fits) {
      add(out, Category::comparability, "fitting", -dv);
    } else {
      add(out, Category::comparability, "exceeding", dv);
    }
  }

  void similarity(std::vector<SpatialRelation>& out) {
    const double g = settings_.max_gap;
    auto check = [&](std::string_view name, double diff, double tol) {
      if (std::abs(diff) < tol) add(out, Category::similarity, name, std::abs(diff));
    };
    const double dh = s_.h - o_.h;
    const double dw = s_.w - o_.w;
    const double dd = s_.d - o_.d;
    check("sameheight", dh, g);
    check("samewidth", dw, g);
    check("samedepth", dd, g);
    check("samelength", ds_.length - do_.length, g);
    check("sameperimeter", ds_.perimeter - do_.perimeter, 4.0 * g);
    check("samefront", ds_.front_area - do_.front_area, g * g);
    check("sameside", ds_.side_area - do_.side_area, g * g);
    check("samefootprint", ds_.footprint - do_.footprint, g * g);
    check("samesurface", ds_.surface - do_.surface, 3.0 * g * g);
    check("samevolume", ds_.volume - do_.volume, g * g * g);
    const double cuboid = std::max({std::abs(dh), std::abs(dw), std::abs(dd)});
    if (cuboid < g) {
      add(out, Category::similarity, "samecuboid", cuboid);
      if (std::abs(yaw_delta()) < settings_.max_angle) add(out, Category::similarity, "congruent", cuboid);
    }
    check("sameposition", norm(s_.position() - o_.position()), g);
    check("samecenter", cd(), g);
    const std::string shape = shape_of(s_);
    if (!shape.empty() && shape == shape_of(o_)) add(out, Category::similarity, "sameshape", 0.0);
  }

  void geography(std::vector<SpatialRelation>& out) {
    const double g = settings_.max_gap;
    const double vx = ds_.center.x - do_.center.x;
    const double vz = ds_.center.z - do_.center.z;
    const double n = vx * settings_.north_x + vz * settings_.north_z;
    const double e = vx * -settings_.north_z + vz * settings_.north_x;
    const double delta = std::hypot(vx, vz);
    const bool north = n > g;
    const bool south = n < -g;
    const bool east = e > g;
    const bool west = e < -g;
    if (north) add(out, Category::geography, "north", delta);
    if (south) add(out, Category::geography, "south", delta);
    if (east) add(out, Category::geography, "east", delta);
    if (west) add(out, Category::geography, "west", delta);
    if (north && east) add(out, Category::geography, "northeast", delta);
    if (north && west) add(out, Category::geography, "northwest", delta);
    if (south && east) add(out, Category::geography, "southeast", delta);
    if (south && west) add(out, Category::geography, "southwest", delta);
  }

  const SpatialObject& s_;
  const SpatialObject& o_;
  const DerivedAttributes& ds_;
  const DerivedAttributes& do_;
  const AdjustmentSettings& settings_;
  const SpatialObject* observer_;

  std::optional<double> cd_;
  std::optional<double> md_;
  std::optional<bool> inter_;
  std::optional<bool> inside_;
  std::optional<bool> containing_;
  std::optional<double> radius_;
  std::optional<std::string> sec_so_;
  std::optional<std::string> sec_os_;
};

struct Prepared {
  std::vector<DerivedAttributes> derived;
  const SpatialObject* observer = nullptr;
};

Prepared prepare(const FactBase& fb, const std::set<Category>& categories, const AdjustmentSettings& settings,
                 std::optional<std::string_view> observer) {
  settings.validate();
  Prepared out;
  out.derived.reserve(fb.size());
  for (const auto& obj : fb.objects()) out.derived.push_back(derive_attributes(obj, settings));
  if (categories.count(Category::visibility) > 0) {
    auto id = resolve_observer(fb, observer);
    if (!id) throw InvalidArgument("visibility requires an observer (none flagged or given)");
    out.observer = fb.find(*id);
  }
  return out;
}

void evaluate_pair(const FactBase& fb, const Prepared& prep, std::size_t i, std::size_t j,
                   const std::set<Category>& categories, const AdjustmentSettings& settings,
                   std::vector<SpatialRelation>& out) {
  const auto& objs = fb.objects();
  PairEvaluator pair(objs[i], objs[j], prep.derived[i], prep.derived[j], settings, prep.observer);
  for (Category c : categories) pair.emit(c, out);
}

}  // namespace

const std::vector<std::string>& predicates_of(Category category) {
  return registry()[static_cast<std::size_t>(category)];
}

std::optional<Category> category_of_predicate(std::string_view predicate) {
  const auto& index = predicate_index();
  auto it = index.find(predicate);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::string_view canonical_predicate(std::string_view predicate) {
  if (predicate == "over") return "above";
  if (predicate == "under") return "below";
  return predicate;
}

bool is_predicate(std::string_view name) { return category_of_predicate(name).has_value(); }

std::set<Category> expand_categories(std::span<const std::string> tokens) {
  std::set<Category> out;
  for (const auto& token : tokens) {
    if (token == "topology") {
      out.insert({Category::proximity, Category::directionality, Category::adjacency, Category::sectoriality,
                  Category::assembly, Category::orientation});
    } else if (auto c = parse_category(token)) {
      out.insert(*c);
    } else {
      throw InvalidArgument("unknown relation category '" + token + "'");
    }
  }
  return out;
}

const SpatialObject& frame_reference(const SpatialObject& s, const SpatialObject& o) {
  if (s.observer != o.observer) return s.observer ? s : o;
  const double vs = s.w * s.h * s.d;
  const double vo = o.w * o.h * o.d;
  if (vs != vo) return vs > vo ? s : o;
  return s.id < o.id ? s : o;
}

std::vector<SpatialRelation> relations_between(const SpatialObject& s, const SpatialObject& o, Category category,
                                               const AdjustmentSettings& settings, const SpatialObject* observer) {
  if (category == Category::visibility && observer == nullptr) {
    throw InvalidArgument("visibility requires an observer");
  }
  const DerivedAttributes ds = derive_attributes(s, settings);
  const DerivedAttributes dd = derive_attributes(o, settings);
  std::vector<SpatialRelation> out;
  PairEvaluator(s, o, ds, dd, settings, observer).emit(category, out);
  return out;
}

std::optional<std::string> resolve_observer(const FactBase& fb, std::optional<std::string_view> explicit_id) {
  if (explicit_id) {
    if (!fb.contains(*explicit_id)) {
      throw InvalidArgument("observer '" + std::string(*explicit_id) + "' is not in the fact base");
    }
    return std::string(*explicit_id);
  }
  std::optional<std::string> found;
  for (const auto& obj : fb.objects()) {
    if (!obj.observer) continue;
    if (found) return std::nullopt;
    found = obj.id;
  }
  return found;
}

void deduce(FactBase& fb, const std::set<Category>& categories, const AdjustmentSettings& settings,
            std::optional<std::string_view> observer) {
  if (categories.empty()) return;
  const Prepared prep = prepare(fb, categories, settings, observer);
  const auto n = static_cast<std::ptrdiff_t>(fb.size());
  std::vector<std::vector<SpatialRelation>> rows(fb.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (i == j) continue;
      evaluate_pair(fb, prep, static_cast<std::size_t>(i), static_cast<std::size_t>(j), categories, settings, row);
    }
  }

  std::size_t total = 0;
  for (const auto& row : rows) total += row.size();
  std::vector<SpatialRelation> merged;
  merged.reserve(total);
  for (auto& row : rows) std::move(row.begin(), row.end(), std::back_inserter(merged));
  fb.replace_categories(categories, std::move(merged));
}

void deduce_serial(FactBase& fb, const std::set<Category>& categories, const AdjustmentSettings& settings,
                   std::optional<std::string_view> observer) {
  if (categories.empty()) return;
  const Prepared prep = prepare(fb, categories, settings, observer);
  std::vector<SpatialRelation> fresh;
  for (std::size_t i = 0; i < fb.size(); ++i) {
    for (std::size_t j = 0; j < fb.size(); ++j) {
      if (i != j) evaluate_pair(fb, prep, i, j, categories, settings, fresh);
    }
  }
  fb.replace_categories(categories, std::move(fresh));
}

}  // namespace spatial
