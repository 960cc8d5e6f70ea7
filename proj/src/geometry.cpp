#include "spatial/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace spatial {

namespace {

struct Vec2 {
  double x = 0.0;
  double z = 0.0;
};

Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
double dot2(Vec2 a, Vec2 b) { return a.x * b.x + a.z * b.z; }
double cross2(Vec2 a, Vec2 b) { return a.x * b.z - a.z * b.x; }

// Footprint rectangle of a yaw-rotated box, optionally grown on every side.
struct Rect {
  Vec2 center;
  Vec2 u;  // local +x in world
  Vec2 v;  // local +z in world
  double hu = 0.0;
  double hv = 0.0;

  std::array<Vec2, 4> vertices() const {
    auto at = [&](double su, double sv) {
      return Vec2{center.x + u.x * su * hu + v.x * sv * hv, center.z + u.z * su * hu + v.z * sv * hv};
    };
    return {at(-1, -1), at(1, -1), at(1, 1), at(-1, 1)};
  }

  // Projection interval onto a unit axis.
  std::pair<double, double> project(Vec2 axis) const {
    const double c = dot2(center, axis);
    const double r = hu * std::abs(dot2(u, axis)) + hv * std::abs(dot2(v, axis));
    return {c - r, c + r};
  }
};

Rect footprint(const SpatialObject& obj, double grow = 0.0) {
  const double c = std::cos(obj.angle);
  const double s = std::sin(obj.angle);
  return Rect{{obj.x, obj.z}, {c, -s}, {s, c}, obj.w / 2.0 + grow, obj.d / 2.0 + grow};
}

// Open-interval overlap with positive measure. A degenerate (point) interval
// counts when it sits strictly inside the other one.
bool intervals_overlap(double lo1, double hi1, double lo2, double hi2) {
  if (std::min(hi1, hi2) - std::max(lo1, lo2) > kEpsilon) return true;
  auto point_inside = [](double lo, double hi, double olo, double ohi) {
    return hi - lo <= kEpsilon && lo > olo + kEpsilon && hi < ohi - kEpsilon;
  };
  return point_inside(lo1, hi1, lo2, hi2) || point_inside(lo2, hi2, lo1, hi1);
}

bool footprints_overlap_open(const Rect& a, const Rect& b) {
  for (Vec2 axis : {a.u, a.v, b.u, b.v}) {
    auto [alo, ahi] = a.project(axis);
    auto [blo, bhi] = b.project(axis);
    if (!intervals_overlap(alo, ahi, blo, bhi)) return false;
  }
  return true;
}

bool footprints_overlap_closed(const Rect& a, const Rect& b) {
  for (Vec2 axis : {a.u, a.v, b.u, b.v}) {
    auto [alo, ahi] = a.project(axis);
    auto [blo, bhi] = b.project(axis);
    if (std::min(ahi, bhi) - std::max(alo, blo) < -kEpsilon) return false;
  }
  return true;
}

double point_segment_distance(Vec2 p, Vec2 q1, Vec2 q2) {
  const Vec2 e = q2 - q1;
  const double len2 = dot2(e, e);
  double t = len2 > 0.0 ? dot2(p - q1, e) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 closest{q1.x + e.x * t, q1.z + e.z * t};
  return std::hypot(p.x - closest.x, p.z - closest.z);
}

double polygon_distance(const std::array<Vec2, 4>& pa, const std::array<Vec2, 4>& pb) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(pa[i], pb[j], pb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(pb[i], pa[j], pa[(j + 1) % 4]));
    }
  }
  return best;
}

// Sutherland-Hodgman clip of a convex polygon against a rectangle.
std::vector<Vec2> clip(std::vector<Vec2> poly, const Rect& r) {
  const std::array<std::pair<Vec2, double>, 4> planes = {{
      {r.u, dot2(r.center, r.u) + r.hu},
      {Vec2{-r.u.x, -r.u.z}, -dot2(r.center, r.u) + r.hu},
      {r.v, dot2(r.center, r.v) + r.hv},
      {Vec2{-r.v.x, -r.v.z}, -dot2(r.center, r.v) + r.hv},
  }};
  for (const auto& [n, offset] : planes) {
    if (poly.empty()) break;
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 cur = poly[i];
      const Vec2 nxt = poly[(i + 1) % poly.size()];
      const double dc = dot2(cur, n) - offset;
      const double dn = dot2(nxt, n) - offset;
      if (dc <= 0.0) out.push_back(cur);
      if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
        const double t = dc / (dc - dn);
        out.push_back({cur.x + (nxt.x - cur.x) * t, cur.z + (nxt.z - cur.z) * t});
      }
    }
    poly = std::move(out);
  }
  return poly;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross2(poly[i], poly[(i + 1) % poly.size()]);
  }
  return std::abs(twice) / 2.0;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  double cx = 0.0;
  double cz = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % poly.size()];
    const double k = cross2(p, q);
    twice += k;
    cx += (p.x + q.x) * k;
    cz += (p.z + q.z) * k;
  }
  if (std::abs(twice) < 1e-15) {
    Vec2 mean;
    for (const auto& p : poly) {
      mean.x += p.x / static_cast<double>(poly.size());
      mean.z += p.z / static_cast<double>(poly.size());
    }
    return mean;
  }
  return {cx / (3.0 * twice), cz / (3.0 * twice)};
}

std::vector<Vec2> clip_footprints(const Rect& a, const Rect& b) {
  auto va = a.vertices();
  return clip(std::vector<Vec2>(va.begin(), va.end()), b);
}

// Local-frame bounds of a's corners as seen from b.
struct LocalBounds {
  double lo[3];
  double hi[3];
};

LocalBounds bounds_in_frame(const SpatialObject& a, const SpatialObject& b) {
  LocalBounds out{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()},
                  {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()}};
  for (const Vec3& c : corners(a)) {
    const LocalPoint p = local_frame_transform(b, c);
    const double v[3] = {p.lx, p.ly, p.lz};
    for (int k = 0; k < 3; ++k) {
      out.lo[k] = std::min(out.lo[k], v[k]);
      out.hi[k] = std::max(out.hi[k], v[k]);
    }
  }
  return out;
}

}  // namespace

LocalPoint rotate_to_local(double yaw, Vec3 v) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {v.x * c - v.z * s, v.y, v.x * s + v.z * c};
}

LocalPoint local_frame_transform(const SpatialObject& reference, Vec3 p) {
  return rotate_to_local(reference.angle, p - reference.position());
}

Vec3 world_from_local(const SpatialObject& reference, LocalPoint p) {
  const double c = std::cos(reference.angle);
  const double s = std::sin(reference.angle);
  return {reference.x + p.lx * c + p.lz * s, reference.y + p.ly, reference.z - p.lx * s + p.lz * c};
}

std::array<Vec3, 8> corners(const SpatialObject& obj) {
  std::array<Vec3, 8> out;
  const double hw = obj.w / 2.0;
  const double hd = obj.d / 2.0;
  const double xs[4] = {-hw, hw, hw, -hw};
  const double zs[4] = {-hd, -hd, hd, hd};
  for (int level = 0; level < 2; ++level) {
    for (int k = 0; k < 4; ++k) {
      out[level * 4 + k] = world_from_local(obj, {xs[k], level * obj.h, zs[k]});
    }
  }
  return out;
}

bool intersects(const SpatialObject& a, const SpatialObject& b) {
  if (!intervals_overlap(a.y, a.y + a.h, b.y, b.y + b.h)) return false;
  return footprints_overlap_open(footprint(a), footprint(b));
}

bool contains_point(const SpatialObject& box, Vec3 p) {
  const LocalPoint l = local_frame_transform(box, p);
  return std::abs(l.lx) <= box.w / 2.0 + kEpsilon && std::abs(l.lz) <= box.d / 2.0 + kEpsilon &&
         l.ly >= -kEpsilon && l.ly <= box.h + kEpsilon;
}

bool contains(const SpatialObject& outer, const SpatialObject& inner) {
  for (const Vec3& c : corners(inner)) {
    if (!contains_point(outer, c)) return false;
  }
  return true;
}

double vertical_gap(const SpatialObject& a, const SpatialObject& b) {
  return std::max(b.y - (a.y + a.h), a.y - (b.y + b.h));
}

double footprint_distance(const SpatialObject& a, const SpatialObject& b) {
  const Rect ra = footprint(a);
  const Rect rb = footprint(b);
  if (footprints_overlap_closed(ra, rb)) return 0.0;
  return polygon_distance(ra.vertices(), rb.vertices());
}

double footprint_overlap_area(const SpatialObject& a, const SpatialObject& b) {
  return polygon_area(clip_footprints(footprint(a), footprint(b)));
}

double min_distance(const SpatialObject& a, const SpatialObject& b) {
  if (intersects(a, b)) return 0.0;
  const double horizontal = footprint_distance(a, b);
  const double vertical = std::max(0.0, vertical_gap(a, b));
  return std::sqrt(horizontal * horizontal + vertical * vertical);
}

double center_distance(const SpatialObject& a, const SpatialObject& b) {
  return norm(object_center(a) - object_center(b));
}

bool crosses(const SpatialObject& a, const SpatialObject& b) {
  const LocalBounds lb = bounds_in_frame(a, b);
  const double blo[3] = {-b.w / 2.0, 0.0, -b.d / 2.0};
  const double bhi[3] = {b.w / 2.0, b.h, b.d / 2.0};
  for (int k = 0; k < 3; ++k) {
    if (lb.lo[k] < blo[k] - kEpsilon && lb.hi[k] > bhi[k] + kEpsilon) return true;
  }
  return false;
}

std::array<double, 3> axis_overlaps(const SpatialObject& a, const SpatialObject& b) {
  const LocalBounds lb = bounds_in_frame(a, b);
  const double blo[3] = {-b.w / 2.0, 0.0, -b.d / 2.0};
  const double bhi[3] = {b.w / 2.0, b.h, b.d / 2.0};
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) out[k] = std::min(lb.hi[k], bhi[k]) - std::max(lb.lo[k], blo[k]);
  return out;
}

std::string SectorLabel::code() const {
  std::string out;
  if (ahead > 0) out += 'a';
  if (ahead < 0) out += 'b';
  if (right < 0) out += 'l';
  if (right > 0) out += 'r';
  if (over > 0) out += 'o';
  if (over < 0) out += 'u';
  return out.empty() ? "i" : out;
}

std::optional<SectorLabel> SectorLabel::parse(std::string_view code) {
  if (code == "i") return SectorLabel{};
  if (code.empty() || code.size() > 3) return std::nullopt;
  SectorLabel label;
  std::size_t pos = 0;
  if (pos < code.size() && (code[pos] == 'a' || code[pos] == 'b')) label.ahead = code[pos++] == 'a' ? 1 : -1;
  if (pos < code.size() && (code[pos] == 'l' || code[pos] == 'r')) label.right = code[pos++] == 'r' ? 1 : -1;
  if (pos < code.size() && (code[pos] == 'o' || code[pos] == 'u')) label.over = code[pos++] == 'o' ? 1 : -1;
  if (pos != code.size()) return std::nullopt;
  return label;
}

double nearby_radius(const SpatialObject& a, const SpatialObject& b, const AdjustmentSettings& settings) {
  const double radii = derive_attributes(a, settings).radius + derive_attributes(b, settings).radius;
  switch (settings.nearby_schema) {
    case NearbySchema::fixed: return settings.nearby_factor;
    case NearbySchema::dimension: return settings.nearby_factor * radii;
    case NearbySchema::limit: return std::min(settings.nearby_factor * radii, settings.nearby_limit);
  }
  return settings.nearby_factor;
}

double sector_reach(const SpatialObject& reference, int axis, const AdjustmentSettings& settings,
                    std::optional<double> pair_radius) {
  switch (settings.sector_schema) {
    case SectorSchema::fixed: return settings.sector_factor;
    case SectorSchema::dimension: {
      const double extent = axis == 0 ? reference.w : axis == 1 ? reference.h : reference.d;
      return settings.sector_factor * extent;
    }
    case SectorSchema::nearby:
      return settings.sector_factor * pair_radius.value_or(nearby_radius(reference, reference, settings));
  }
  return settings.sector_factor;
}

std::optional<SectorLabel> classify_sector(const SpatialObject& reference, Vec3 p,
                                           const AdjustmentSettings& settings,
                                           std::optional<double> pair_radius) {
  const LocalPoint l = local_frame_transform(reference, p);
  // Returns -1/0/+1, or 2 when beyond reach.
  auto side = [](double coord, double lo, double hi, double reach) -> int {
    if (coord < lo - kEpsilon) return coord < lo - reach - kEpsilon ? 2 : -1;
    if (coord > hi + kEpsilon) return coord > hi + reach + kEpsilon ? 2 : 1;
    return 0;
  };
  const int sx = side(l.lx, -reference.w / 2.0, reference.w / 2.0, sector_reach(reference, 0, settings, pair_radius));
  const int sy = side(l.ly, 0.0, reference.h, sector_reach(reference, 1, settings, pair_radius));
  const int sz = side(l.lz, -reference.d / 2.0, reference.d / 2.0, sector_reach(reference, 2, settings, pair_radius));
  if (sx == 2 || sy == 2 || sz == 2) return std::nullopt;
  return SectorLabel{static_cast<std::int8_t>(sz), static_cast<std::int8_t>(sx), static_cast<std::int8_t>(sy)};
}

SpatialObject sector_box(const SpatialObject& reference, SectorLabel sector, const AdjustmentSettings& settings) {
  auto span = [](int sign, double lo, double hi, double reach) -> std::pair<double, double> {
    if (sign > 0) return {hi, hi + reach};
    if (sign < 0) return {lo - reach, lo};
    return {lo, hi};
  };
  const auto [x0, x1] = span(sector.right, -reference.w / 2.0, reference.w / 2.0, sector_reach(reference, 0, settings));
  const auto [y0, y1] = span(sector.over, 0.0, reference.h, sector_reach(reference, 1, settings));
  const auto [z0, z1] = span(sector.ahead, -reference.d / 2.0, reference.d / 2.0, sector_reach(reference, 2, settings));
  SpatialObject out;
  const Vec3 base = world_from_local(reference, {(x0 + x1) / 2.0, y0, (z0 + z1) / 2.0});
  out.x = base.x;
  out.y = base.y;
  out.z = base.z;
  out.w = x1 - x0;
  out.h = y1 - y0;
  out.d = z1 - z0;
  out.angle = reference.angle;
  return out;
}

SpatialObject enclosing_box(std::span<const SpatialObject> objs) {
  if (objs.empty()) throw InvalidArgument("enclosing_box needs at least one object");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Vec3 lo{inf, inf, inf};
  Vec3 hi{-inf, -inf, -inf};
  for (const auto& obj : objs) {
    for (const Vec3& c : corners(obj)) {
      lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), std::min(lo.z, c.z)};
      hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), std::max(hi.z, c.z)};
    }
  }
  SpatialObject out;
  out.x = (lo.x + hi.x) / 2.0;
  out.y = lo.y;
  out.z = (lo.z + hi.z) / 2.0;
  out.w = hi.x - lo.x;
  out.h = hi.y - lo.y;
  out.d = hi.z - lo.z;
  return out;
}

std::optional<Placement> contact_region(const SpatialObject& a, const SpatialObject& b,
                                        const AdjustmentSettings& settings) {
  const double gap = settings.max_gap;
  if (min_distance(a, b) > gap + kEpsilon) return std::nullopt;

  const double vgap = vertical_gap(a, b);
  const SpatialObject& lower = a.y + a.h <= b.y + b.h ? a : b;
  const double lower_top = lower.y + lower.h;

  auto region = clip_footprints(footprint(a), footprint(b));
  if (vgap >= -kEpsilon && polygon_area(region) > kEpsilon) {
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double z0 = x0;
    double z1 = -x0;
    for (const auto& p : region) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      z0 = std::min(z0, p.z);
      z1 = std::max(z1, p.z);
    }
    const Vec2 c = polygon_centroid(region);
    return Placement{{c.x, lower_top, c.z}, x1 - x0, 2.0 * gap, z1 - z0, true};
  }

  region = clip_footprints(footprint(a, gap / 2.0), footprint(b, gap / 2.0));
  Vec2 c;
  if (region.empty()) {
    // Only reachable through the epsilon slack; fall back to the midpoint.
    c = {(a.x + b.x) / 2.0, (a.z + b.z) / 2.0};
  } else {
    c = polygon_centroid(region);
  }
  const double y = vgap < 0.0 ? std::max(a.y, b.y) : lower_top;
  return Placement{{c.x, y, c.z}, 2.0 * gap, 2.0 * gap, 2.0 * gap, false};
}

}  // namespace spatial
