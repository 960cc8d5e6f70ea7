#pragma once

// Yaw-only oriented bounding box geometry. Every box is a footprint rectangle
// in the horizontal (x, z) plane extruded over a vertical interval
// [y, y + h], so 3D tests decompose exactly into a 2D footprint test and a 1D
// vertical test.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "spatial/core.hpp"

namespace spatial {

/// Point in a reference object's frame: yaw removed, origin at base center.
struct LocalPoint {
  double lx = 0.0;
  double ly = 0.0;
  double lz = 0.0;

  friend bool operator==(const LocalPoint&, const LocalPoint&) = default;
};

LocalPoint local_frame_transform(const SpatialObject& reference, Vec3 p);
Vec3 world_from_local(const SpatialObject& reference, LocalPoint p);

/// Rotates a world-space direction into the reference frame (no translation).
LocalPoint rotate_to_local(double yaw, Vec3 v);

/// Corners ordered bottom face then top face; each face runs
/// (-x,-z), (+x,-z), (+x,+z), (-x,+z) in local coordinates.
std::array<Vec3, 8> corners(const SpatialObject& obj);

bool intersects(const SpatialObject& a, const SpatialObject& b);
/// True when every corner of `inner` lies inside `outer` (inclusive).
bool contains(const SpatialObject& outer, const SpatialObject& inner);
/// True when `p` lies inside the closed box (inclusive within kEpsilon).
bool contains_point(const SpatialObject& box, Vec3 p);
double min_distance(const SpatialObject& a, const SpatialObject& b);
double center_distance(const SpatialObject& a, const SpatialObject& b);
/// Signed vertical gap between the two vertical intervals (negative = overlap).
double vertical_gap(const SpatialObject& a, const SpatialObject& b);
/// Distance between the two footprint rectangles (0 when they overlap).
double footprint_distance(const SpatialObject& a, const SpatialObject& b);
/// Area of the intersection of the two footprint rectangles.
double footprint_overlap_area(const SpatialObject& a, const SpatialObject& b);

/// `a` pokes out through two opposite faces of `b` along at least one of
/// b's axes (a column through a slab).
bool crosses(const SpatialObject& a, const SpatialObject& b);

/// Overlap lengths of a's projection with b's extent along b's local x, y, z
/// axes. Negative values are gaps.
std::array<double, 3> axis_overlaps(const SpatialObject& a, const SpatialObject& b);

/// One of the 27 sectors around a box. Each component is -1, 0 or +1:
/// `ahead` along local z (a/b), `right` along local x (r/l), `over` along
/// local y (o/u).
struct SectorLabel {
  std::int8_t ahead = 0;
  std::int8_t right = 0;
  std::int8_t over = 0;

  /// Canonical code: a/b, then l/r, then o/u; "i" for the inner sector.
  std::string code() const;
  int divergency() const { return (ahead != 0) + (right != 0) + (over != 0); }
  static std::optional<SectorLabel> parse(std::string_view code);

  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
};

/// Nearby radius for a pair per the settings' nearby schema.
double nearby_radius(const SpatialObject& a, const SpatialObject& b, const AdjustmentSettings& settings);

/// How far each sector reaches beyond the box face on local axis 0 (x),
/// 1 (y) or 2 (z). `pair_radius` feeds the nearby schema; when absent the
/// reference's own nearby radius is used.
double sector_reach(const SpatialObject& reference, int axis, const AdjustmentSettings& settings,
                    std::optional<double> pair_radius = std::nullopt);

/// Sector of `p` around `reference`, or nullopt when p lies beyond reach on
/// any axis.
std::optional<SectorLabel> classify_sector(const SpatialObject& reference, Vec3 p,
                                           const AdjustmentSettings& settings,
                                           std::optional<double> pair_radius = std::nullopt);

/// Box geometry (id and semantics left empty) of the given sector region.
SpatialObject sector_box(const SpatialObject& reference, SectorLabel sector,
                         const AdjustmentSettings& settings);

/// Minimal world-aligned (yaw 0) box covering every corner of every input.
/// Throws InvalidArgument on an empty list.
SpatialObject enclosing_box(std::span<const SpatialObject> objs);

struct Placement {
  Vec3 position;  // base center
  double w = 0.0;
  double h = 0.0;
  double d = 0.0;
  bool vertical_contact = false;  // stacked (top face) rather than side contact
};

/// Where two boxes within max gap of each other touch. Side contact yields a
/// small marker (2 x max gap cube) on the bottom of the shared vertical range;
/// stacked contact yields a thin box over the footprint intersection on the
/// contact plane. nullopt when the boxes are farther apart than max gap.
std::optional<Placement> contact_region(const SpatialObject& a, const SpatialObject& b,
                                        const AdjustmentSettings& settings);

}  // namespace spatial
