#pragma once

// Object model, settings and the fact base.
//
// Coordinate convention: right-handed, Y up. An object's local frame has +X
// pointing to its right, +Z pointing ahead (its front) and yaw rotating
// counter-clockwise about +Y when viewed from above. Positions are the center
// of the box's base footprint.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "spatial/errors.hpp"

namespace spatial {

inline constexpr double kPi = 3.14159265358979323846;

// Absolute slack for boundary comparisons. Marginal cases resolve toward the
// related outcome.
inline constexpr double kEpsilon = 1e-9;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Normalizes an angle to (-pi, pi].
double wrap_angle(double radians);

using AttributeValue = std::variant<double, std::string, bool>;

struct SpatialObject {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 0.0;
  double h = 0.0;
  double d = 0.0;
  double angle = 0.0;  // yaw in radians
  std::string label;
  std::string type;
  std::map<std::string, double> confidence;  // aspect -> [0,1]; "overall" is the default aspect
  double velocity = 0.0;                     // scalar speed, m/s
  bool is_virtual = false;
  bool moving = false;
  bool observer = false;
  std::map<std::string, AttributeValue> attributes;  // custom, written by map()/produce()

  Vec3 position() const { return {x, y, z}; }
  double yaw_degrees() const { return angle * 180.0 / kPi; }
  bool is_moving() const { return moving || velocity > 0.0; }

  friend bool operator==(const SpatialObject&, const SpatialObject&) = default;
};

/// Throws InvalidArgument when the object breaks an invariant
/// (empty id, negative extent, confidence outside [0,1], non-finite numbers).
void validate(const SpatialObject& obj);

enum class SectorSchema { fixed, dimension, nearby };
enum class NearbySchema { fixed, dimension, limit };

std::string_view to_string(SectorSchema schema);
std::string_view to_string(NearbySchema schema);
std::optional<SectorSchema> parse_sector_schema(std::string_view text);
std::optional<NearbySchema> parse_nearby_schema(std::string_view text);

struct AdjustmentSettings {
  double max_gap = 0.02;               // m
  double max_angle = 5.0 * kPi / 180;  // rad
  SectorSchema sector_schema = SectorSchema::nearby;
  double sector_factor = 1.0;
  NearbySchema nearby_schema = NearbySchema::dimension;
  double nearby_factor = 2.0;
  double nearby_limit = 4.0;  // cap in meters for NearbySchema::limit
  double long_ratio = 4.0;
  double thin_ratio = 10.0;
  double north_x = 0.0;  // unit vector in the horizontal (x, z) plane
  double north_z = 1.0;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;

  friend bool operator==(const AdjustmentSettings&, const AdjustmentSettings&) = default;
};

struct DerivedAttributes {
  double footprint = 0.0;
  double volume = 0.0;
  double perimeter = 0.0;
  double length = 0.0;
  double radius = 0.0;
  double front_area = 0.0;
  double side_area = 0.0;
  double surface = 0.0;
  Vec3 center;
  bool equilateral = false;
  bool thin = false;
  bool is_long = false;

  friend bool operator==(const DerivedAttributes&, const DerivedAttributes&) = default;
};

DerivedAttributes derive_attributes(const SpatialObject& obj, const AdjustmentSettings& settings);

/// Volumetric center: base position raised by half the height.
Vec3 object_center(const SpatialObject& obj);

enum class Category {
  proximity,
  directionality,
  adjacency,
  orientation,
  connectivity,
  sectoriality,
  assembly,
  visibility,
  comparability,
  similarity,
  geography,
};

inline constexpr std::size_t kCategoryCount = 11;

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view text);

struct SpatialRelation {
  std::string subject;
  std::string predicate;
  std::string object;
  double delta = 0.0;  // predicate-specific metric
  double angle = 0.0;  // wrap(subject yaw - object yaw)
  Category category = Category::proximity;

  friend bool operator==(const SpatialRelation&, const SpatialRelation&) = default;
};

/// Objects in insertion order plus deduced relations and calc variables.
/// Single writer; copies are independent snapshots.
class FactBase {
 public:
  /// Inserts or replaces by id. Relations touching the id are dropped and all
  /// categories are marked stale. Throws InvalidArgument on invalid objects.
  void upsert(SpatialObject obj);

  const std::vector<SpatialObject>& objects() const { return objects_; }
  std::size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }

  const SpatialObject* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_of(id).has_value(); }

  const std::vector<SpatialRelation>& relations() const { return relations_; }
  /// Relations with the given subject/object, in stored order.
  std::vector<const SpatialRelation*> relations_between(std::string_view subject,
                                                        std::string_view object) const;
  bool has_relation(std::string_view subject, std::string_view predicate,
                    std::string_view object) const;
  const SpatialRelation* find_relation(std::string_view subject, std::string_view predicate,
                                       std::string_view object) const;

  /// Replaces every relation of `category` with `fresh` and marks it deduced.
  void replace_category(Category category, std::vector<SpatialRelation> fresh);
  /// Same for several categories at once; each fresh relation keeps its own
  /// category tag, which must be one of `categories`.
  void replace_categories(const std::set<Category>& categories, std::vector<SpatialRelation> fresh);
  bool is_deduced(Category category) const { return deduced_.count(category) > 0; }
  const std::set<Category>& deduced_categories() const { return deduced_; }
  /// Drops all relations and deduced marks (settings changed).
  void invalidate_relations();

  std::map<std::string, double>& variables() { return variables_; }
  const std::map<std::string, double>& variables() const { return variables_; }

  friend bool operator==(const FactBase& a, const FactBase& b) {
    return a.objects_ == b.objects_ && a.relations_ == b.relations_ &&
           a.variables_ == b.variables_ && a.deduced_ == b.deduced_;
  }

 private:
  void sort_relations();
  std::pair<std::size_t, std::size_t> pair_range(std::string_view subject, std::string_view object) const;

  std::vector<SpatialObject> objects_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<SpatialRelation> relations_;
  std::map<std::string, double> variables_;
  std::set<Category> deduced_;
};

/// Value-style wrapper around FactBase::upsert.
FactBase upsert_object(FactBase fb, SpatialObject obj);

}  // namespace spatial
