#include "spatial/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace spatial {

double wrap_angle(double radians) {
  double a = std::fmod(radians + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

void validate(const SpatialObject& obj) {
  if (obj.id.empty()) throw InvalidArgument("object id must not be empty");
  for (double v : {obj.x, obj.y, obj.z, obj.w, obj.h, obj.d, obj.angle, obj.velocity}) {
    if (!std::isfinite(v)) throw InvalidArgument("object '" + obj.id + "' has a non-finite value");
  }
  if (obj.w < 0.0 || obj.h < 0.0 || obj.d < 0.0) {
    throw InvalidArgument("object '" + obj.id + "' has a negative extent");
  }
  if (obj.velocity < 0.0) throw InvalidArgument("object '" + obj.id + "' has a negative speed");
  for (const auto& [aspect, value] : obj.confidence) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw InvalidArgument("object '" + obj.id + "' confidence." + aspect + " outside [0,1]");
    }
  }
}

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "proximity",    "directionality", "adjacency",  "orientation",
    "connectivity", "sectoriality",   "assembly",   "visibility",
    "comparability", "similarity",    "geography",
};

}  // namespace

std::string_view to_string(Category category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<Category> parse_category(std::string_view text) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == text) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::string_view to_string(SectorSchema schema) {
  switch (schema) {
    case SectorSchema::fixed: return "fixed";
    case SectorSchema::dimension: return "dimension";
    case SectorSchema::nearby: return "nearby";
  }
  return "?";
}

std::string_view to_string(NearbySchema schema) {
  switch (schema) {
    case NearbySchema::fixed: return "fixed";
    case NearbySchema::dimension: return "dimension";
    case NearbySchema::limit: return "limit";
  }
  return "?";
}

std::optional<SectorSchema> parse_sector_schema(std::string_view text) {
  if (text == "fixed") return SectorSchema::fixed;
  if (text == "dimension") return SectorSchema::dimension;
  if (text == "nearby") return SectorSchema::nearby;
  return std::nullopt;
}

std::optional<NearbySchema> parse_nearby_schema(std::string_view text) {
  if (text == "fixed") return NearbySchema::fixed;
  if (text == "dimension") return NearbySchema::dimension;
  if (text == "limit") return NearbySchema::limit;
  return std::nullopt;
}

void AdjustmentSettings::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw InvalidArgument(std::string(name) + " must be positive");
    }
  };
  positive(max_gap, "max gap");
  if (!(max_angle > 0.0 && max_angle < kPi / 2)) {
    throw InvalidArgument("max angle must lie in (0, pi/2)");
  }
  positive(sector_factor, "sector factor");
  positive(nearby_factor, "nearby factor");
  positive(nearby_limit, "nearby limit");
  positive(long_ratio, "long ratio");
  positive(thin_ratio, "thin ratio");
  const double n = std::hypot(north_x, north_z);
  if (!(std::abs(n - 1.0) < 1e-6)) throw InvalidArgument("north direction must be a unit vector");
}

Vec3 object_center(const SpatialObject& obj) { return {obj.x, obj.y + obj.h / 2.0, obj.z}; }

DerivedAttributes derive_attributes(const SpatialObject& obj, const AdjustmentSettings& settings) {
  DerivedAttributes out;
  const double w = obj.w;
  const double h = obj.h;
  const double d = obj.d;
  out.footprint = w * d;
  out.volume = w * h * d;
  out.perimeter = 2.0 * (w + d);
  out.length = std::max(w, d);
  out.radius = std::sqrt(w * w + h * h + d * d) / 2.0;
  out.front_area = w * h;
  out.side_area = d * h;
  out.surface = 2.0 * (w * h + w * d + h * d);
  out.center = object_center(obj);
  out.equilateral = std::abs(w - d) <= settings.max_gap && std::abs(w - h) <= settings.max_gap;
  const double smallest = std::min({w, h, d});
  const double largest = std::max({w, h, d});
  out.thin = smallest <= largest / settings.thin_ratio;
  out.is_long = out.length >= settings.long_ratio * std::min(w, d);
  return out;
}

void FactBase::upsert(SpatialObject obj) {
  validate(obj);
  const std::string id = obj.id;
  if (auto it = index_.find(id); it != index_.end()) {
    objects_[it->second] = std::move(obj);
  } else {
    index_.emplace(id, objects_.size());
    objects_.push_back(std::move(obj));
  }
  std::erase_if(relations_, [&](const SpatialRelation& r) { return r.subject == id || r.object == id; });
  deduced_.clear();
}

const SpatialObject* FactBase::find(std::string_view id) const {
  auto idx = index_of(id);
  return idx ? &objects_[*idx] : nullptr;
}

std::optional<std::size_t> FactBase::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::pair<std::size_t, std::size_t> FactBase::pair_range(std::string_view subject, std::string_view object) const {
  const auto si = index_of(subject);
  const auto oi = index_of(object);
  if (!si || !oi) return {0, 0};
  // Relations stay sorted by (subject index, object index), so the pair's
  // relations form one contiguous run.
  const auto key = std::make_pair(*si, *oi);
  auto less = [&](const SpatialRelation& r, const std::pair<std::size_t, std::size_t>& k) {
    return std::make_pair(index_.at(r.subject), index_.at(r.object)) < k;
  };
  auto first = std::lower_bound(relations_.begin(), relations_.end(), key, less);
  auto last = first;
  while (last != relations_.end() && last->subject == subject && last->object == object) ++last;
  return {static_cast<std::size_t>(first - relations_.begin()), static_cast<std::size_t>(last - relations_.begin())};
}

std::vector<const SpatialRelation*> FactBase::relations_between(std::string_view subject,
                                                                std::string_view object) const {
  std::vector<const SpatialRelation*> out;
  const auto [first, last] = pair_range(subject, object);
  for (std::size_t i = first; i < last; ++i) out.push_back(&relations_[i]);
  return out;
}

const SpatialRelation* FactBase::find_relation(std::string_view subject, std::string_view predicate,
                                               std::string_view object) const {
  const auto [first, last] = pair_range(subject, object);
  for (std::size_t i = first; i < last; ++i) {
    if (relations_[i].predicate == predicate) return &relations_[i];
  }
  return nullptr;
}

bool FactBase::has_relation(std::string_view subject, std::string_view predicate,
                            std::string_view object) const {
  return find_relation(subject, predicate, object) != nullptr;
}

void FactBase::replace_category(Category category, std::vector<SpatialRelation> fresh) {
  for (auto& r : fresh) r.category = category;
  replace_categories({category}, std::move(fresh));
}

void FactBase::replace_categories(const std::set<Category>& categories, std::vector<SpatialRelation> fresh) {
  for (const auto& r : fresh) {
    if (!contains(r.subject) || !contains(r.object)) {
      throw InvalidArgument("relation references unknown object '" + r.subject + "'/'" + r.object + "'");
    }
    if (categories.count(r.category) == 0) {
      throw InvalidArgument("relation '" + r.predicate + "' tagged with a category not being replaced");
    }
  }
  std::erase_if(relations_, [&](const SpatialRelation& r) { return categories.count(r.category) > 0; });
  relations_.reserve(relations_.size() + fresh.size());
  for (auto& r : fresh) relations_.push_back(std::move(r));
  deduced_.insert(categories.begin(), categories.end());
  sort_relations();
}

void FactBase::invalidate_relations() {
  relations_.clear();
  deduced_.clear();
}

void FactBase::sort_relations() {
  struct Keyed {
    std::size_t subject;
    std::size_t object;
    int category;
    std::size_t position;
  };
  std::vector<Keyed> keys;
  keys.reserve(relations_.size());
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& r = relations_[i];
    keys.push_back({index_.at(r.subject), index_.at(r.object), static_cast<int>(r.category), i});
  }
  std::sort(keys.begin(), keys.end(), [&](const Keyed& a, const Keyed& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    if (a.object != b.object) return a.object < b.object;
    if (a.category != b.category) return a.category < b.category;
    const auto& pa = relations_[a.position].predicate;
    const auto& pb = relations_[b.position].predicate;
    if (pa != pb) return pa < pb;
    return a.position < b.position;
  });
  std::vector<SpatialRelation> sorted;
  sorted.reserve(relations_.size());
  for (const auto& k : keys) sorted.push_back(std::move(relations_[k.position]));
  relations_ = std::move(sorted);
}

FactBase upsert_object(FactBase fb, SpatialObject obj) {
  fb.upsert(std::move(obj));
  return fb;
}

}  // namespace spatial
