#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracle.hpp"
#include "spatial/deduction.hpp"

using namespace spatial;

namespace {

SpatialObject box(std::string id, double x, double y, double z, double w, double h, double d, double yaw = 0.0) {
  SpatialObject o;
  o.id = std::move(id);
  o.x = x, o.y = y, o.z = z, o.w = w, o.h = h, o.d = d, o.angle = yaw;
  return o;
}

const std::set<Category> kAllButVisibility = {
    Category::proximity,     Category::directionality, Category::adjacency,  Category::orientation,
    Category::connectivity,  Category::sectoriality,   Category::assembly,   Category::comparability,
    Category::similarity,    Category::geography,
};

std::set<std::string> predicates(const SpatialObject& s, const SpatialObject& o, const AdjustmentSettings& settings,
                                 const std::set<Category>& cats = kAllButVisibility) {
  std::set<std::string> out;
  for (Category c : cats) {
    for (const auto& r : relations_between(s, o, c, settings)) out.insert(r.predicate);
  }
  return out;
}

const SpatialRelation* find(const std::vector<SpatialRelation>& rels, std::string_view predicate) {
  for (const auto& r : rels) {
    if (r.predicate == predicate) return &r;
  }
  return nullptr;
}

std::vector<SpatialRelation> all_relations(const SpatialObject& s, const SpatialObject& o,
                                           const AdjustmentSettings& settings) {
  std::vector<SpatialRelation> out;
  for (Category c : kAllButVisibility) {
    auto part = relations_between(s, o, c, settings);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace

TEST(Registry, CategorySizes) {
  const std::map<Category, std::size_t> sizes = {
      {Category::proximity, 2},     {Category::directionality, 6}, {Category::adjacency, 9},
      {Category::orientation, 3},   {Category::connectivity, 4},   {Category::sectoriality, 27},
      {Category::assembly, 7},      {Category::visibility, 4},     {Category::comparability, 9},
      {Category::similarity, 15},   {Category::geography, 8},
  };
  for (auto [c, n] : sizes) EXPECT_EQ(predicates_of(c).size(), n) << to_string(c);
  EXPECT_EQ(category_of_predicate("over"), Category::directionality);
  EXPECT_EQ(canonical_predicate("under"), "below");
  EXPECT_EQ(category_of_predicate("blo"), Category::sectoriality);
  EXPECT_EQ(category_of_predicate("congruent"), Category::similarity);
  EXPECT_FALSE(is_predicate("volume"));
}

TEST(Registry, NamesUniqueAcrossCategories) {
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    for (const auto& p : predicates_of(static_cast<Category>(i))) ++seen[p];
  }
  for (const auto& [name, count] : seen) EXPECT_EQ(count, 1) << name;
}

TEST(ExpandCategories, TopologyBundleAndErrors) {
  const std::vector<std::string> topo = {"topology"};
  EXPECT_EQ(expand_categories(topo),
            (std::set<Category>{Category::proximity, Category::directionality, Category::adjacency,
                                Category::sectoriality, Category::assembly, Category::orientation}));
  const std::vector<std::string> two = {"visibility", "comparability"};
  EXPECT_EQ(expand_categories(two), (std::set<Category>{Category::visibility, Category::comparability}));
  const std::vector<std::string> bad = {"proximity", "nearness"};
  try {
    expand_categories(bad);
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("nearness"), std::string::npos);
  }
}

TEST(Connectivity, CubeResting1mmAboveTable) {
  AdjustmentSettings s;
  const auto table = box("table", 0, 0, 0, 1.2, 0.75, 0.8);
  const auto cube = box("cube", 0.1, 0.751, 0.0, 0.2, 0.2, 0.2);
  const auto p = predicates(cube, table, s);
  EXPECT_TRUE(p.count("on"));
  EXPECT_TRUE(p.count("ontop"));
  EXPECT_TRUE(p.count("upperside"));
  EXPECT_TRUE(p.count("touching"));
  EXPECT_TRUE(p.count("by"));
  EXPECT_FALSE(p.count("beside"));
  EXPECT_FALSE(p.count("at"));
  const auto q = predicates(table, cube, s);
  EXPECT_TRUE(q.count("beneath"));
  EXPECT_FALSE(q.count("on"));
}

TEST(Similarity, IdenticalCubes) {
  AdjustmentSettings s;
  const auto a = box("a", 1, 0, 1, 1, 1, 1), b = box("b", 1, 0, 1, 1, 1, 1);
  const auto p = predicates(a, b, s, {Category::similarity});
  for (auto name : {"samecuboid", "congruent", "samecenter", "sameposition", "samevolume", "sameheight",
                    "samefootprint", "samesurface"}) {
    EXPECT_TRUE(p.count(name)) << name;
  }
  EXPECT_FALSE(p.count("sameshape"));
  auto c = a, d = b;
  c.attributes["shape"] = std::string("cubical");
  d.attributes["shape"] = std::string("cubical");
  EXPECT_TRUE(predicates(c, d, s, {Category::similarity}).count("sameshape"));
}

TEST(Comparability, VolumeDeltas) {
  AdjustmentSettings s;
  const auto small = box("s", 0, 0, 0, 0.5, 1, 1), big = box("o", 3, 0, 0, 1, 1, 1);
  const auto rs = relations_between(small, big, Category::comparability, s);
  ASSERT_TRUE(find(rs, "smaller"));
  EXPECT_DOUBLE_EQ(find(rs, "smaller")->delta, 0.5);
  EXPECT_TRUE(find(rs, "fitting"));
  EXPECT_TRUE(find(rs, "thinner"));
  const auto ro = relations_between(big, small, Category::comparability, s);
  ASSERT_TRUE(find(ro, "bigger"));
  EXPECT_DOUBLE_EQ(find(ro, "bigger")->delta, 0.5);
  EXPECT_TRUE(find(ro, "exceeding"));
  // Fitting compares sorted footprints: a turned 0.4 x 0.9 slab fits 1 x 0.5.
  EXPECT_TRUE(find(relations_between(box("a", 0, 0, 0, 0.4, 1, 0.9), box("b", 0, 0, 0, 1, 1, 0.5),
                                     Category::comparability, s),
                   "fitting"));
}

TEST(Directionality, FrameOfLargerObject) {
  AdjustmentSettings s;
  // Large reference turned a quarter CCW: its right axis points to world -Z.
  const auto ref = box("ref", 0, 0, 0, 2, 2, 2, kPi / 2);
  const auto item = box("item", 0, 0.5, -3, 0.5, 0.5, 0.5);
  const auto p = predicates(item, ref, s, {Category::directionality});
  EXPECT_TRUE(p.count("right"));
  EXPECT_FALSE(p.count("left"));
  EXPECT_TRUE(p.count("below"));  // item center 0.75 < ref center 1.0
  EXPECT_EQ(&frame_reference(item, ref), &ref);
  auto user = item;
  user.observer = true;
  EXPECT_EQ(&frame_reference(user, ref), &user);
}

TEST(Orientation, Thresholds) {
  AdjustmentSettings s;
  auto rel = [&](double yaw) {
    return predicates(box("a", 0, 0, 0, 1, 1, 1, yaw), box("b", 3, 0, 0, 1, 1, 1), s, {Category::orientation});
  };
  EXPECT_TRUE(rel(0.01).count("aligned"));
  EXPECT_TRUE(rel(kPi - 0.01).count("opposite"));
  EXPECT_TRUE(rel(-kPi / 2 + 0.02).count("orthogonal"));
  EXPECT_TRUE(rel(0.5).empty());
}

TEST(Visibility, BearingAndDepth) {
  AdjustmentSettings s;
  auto user = box("user", 0, 0, 0, 0.4, 1.8, 0.3);
  user.observer = true;
  const auto left = box("left", -1, 0.5, 3, 0.3, 0.3, 0.3);
  const auto right = box("right", 1, 0.5, 3, 0.3, 0.3, 0.3);
  const auto far = box("far", -2, 0.5, 6, 0.3, 0.3, 0.3);
  const auto behind = box("behind", 0, 0.5, -2, 0.3, 0.3, 0.3);
  auto rel = [&](const SpatialObject& a, const SpatialObject& b) {
    std::set<std::string> out;
    for (const auto& r : relations_between(a, b, Category::visibility, s, &user)) out.insert(r.predicate);
    return out;
  };
  EXPECT_TRUE(rel(left, right).count("seenleft"));
  EXPECT_TRUE(rel(right, left).count("seenright"));
  EXPECT_TRUE(rel(left, far).count("infront"));
  EXPECT_TRUE(rel(far, left).count("atrear"));
  EXPECT_TRUE(rel(left, behind).empty());
  EXPECT_TRUE(rel(user, left).empty());
  EXPECT_THROW(relations_between(left, right, Category::visibility, s), InvalidArgument);
}

TEST(Geography, CompassFromNorthDirection) {
  AdjustmentSettings s;  // north = +Z
  const auto o = box("o", 0, 0, 0, 1, 1, 1);
  EXPECT_EQ(predicates(box("s", 0, 0, 5, 1, 1, 1), o, s, {Category::geography}), (std::set<std::string>{"north"}));
  // East is north turned clockwise seen from above: -X when north is +Z.
  const auto nw = predicates(box("s", 3, 0, 3, 1, 1, 1), o, s, {Category::geography});
  EXPECT_EQ(nw, (std::set<std::string>{"north", "west", "northwest"}));
  s.north_x = 0, s.north_z = -1;
  EXPECT_EQ(predicates(box("s", 4, 0, 0, 1, 1, 1), o, s, {Category::geography}), (std::set<std::string>{"east"}));
  s.north_x = 1, s.north_z = 0;
  EXPECT_EQ(predicates(box("s", 5, 0, 0, 1, 1, 1), o, s, {Category::geography}), (std::set<std::string>{"north"}));
}

TEST(Sectoriality, CodeOfSubjectCenter) {
  AdjustmentSettings s;
  const auto o = box("o", 0, 0, 0, 1, 1, 1);
  EXPECT_EQ(predicates(box("s", 0, 0, 1.5, 0.5, 1, 0.5), o, s, {Category::sectoriality}),
            (std::set<std::string>{"a"}));
  EXPECT_EQ(predicates(box("s", -1.5, 2, -1.5, 0.5, 0.5, 0.5), o, s, {Category::sectoriality}),
            (std::set<std::string>{"blo"}));
}

TEST(Proximity, NearAndFarExclusive) {
  AdjustmentSettings s;
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i) {
    auto [a, b] = oracle::random_pair(rng, i);
    const auto p = predicates(a, b, s, {Category::proximity});
    EXPECT_FALSE(p.count("near") && p.count("far"));
    // Outside the inner sector the two are exhaustive.
    if (!intersects(a, b)) {
      EXPECT_TRUE(p.count("near") || p.count("far"));
    }
  }
}

// Independent oracle decisions for every geometric predicate; marginal cases
// are skipped.
TEST(Oracle, GeometricPredicatesAgree) {
  AdjustmentSettings s;
  std::mt19937_64 rng(22);
  int checked = 0, skipped = 0;
  std::map<std::string, int> positives;
  for (int i = 0; i < 300; ++i) {
    auto [a, b] = oracle::random_pair(rng, i);
    const auto got = predicates(a, b, s);
    const auto truth = oracle::predicate_truth(a, b, s, rng, 20000);
    for (const auto& [name, value] : truth.values) {
      if (!value) {
        ++skipped;
        continue;
      }
      ++checked;
      positives[name] += *value;
      EXPECT_EQ(got.count(name) > 0, *value) << name << " on pair " << i;
    }
  }
  EXPECT_GT(checked, 10 * skipped);
  for (auto name : {"near", "far", "ontop", "beneath", "beside", "touching", "meeting", "at", "inside", "containing",
                    "crossing", "overlapping", "disjoint", "leftside", "upperside"}) {
    EXPECT_GT(positives[name], 0) << name << " never exercised";
  }
}

TEST(Laws, InversePairsAndSymmetry) {
  AdjustmentSettings s;
  std::mt19937_64 rng(23);
  const std::pair<const char*, const char*> inverse[] = {
      {"left", "right"},    {"ahead", "behind"},      {"above", "below"},   {"ontop", "beneath"},
      {"inside", "containing"}, {"smaller", "bigger"}, {"shorter", "longer"},
  };
  const char* symmetric[] = {"near", "far", "disjoint", "crossing", "overlapping", "touching", "meeting", "beside", "aligned", "opposite",
                             "orthogonal"};
  for (int i = 0; i < 400; ++i) {
    auto [a, b] = oracle::random_pair(rng, i);
    const auto ab = predicates(a, b, s), ba = predicates(b, a, s);
    for (auto [p, q] : inverse) {
      EXPECT_EQ(ab.count(p), ba.count(q)) << p << "/" << q << " pair " << i;
      EXPECT_EQ(ab.count(q), ba.count(p)) << q << "/" << p << " pair " << i;
    }
    for (auto p : symmetric) EXPECT_EQ(ab.count(p), ba.count(p)) << p << " pair " << i;
    for (const auto& p : predicates_of(Category::similarity)) EXPECT_EQ(ab.count(p), ba.count(p)) << p;
    EXPECT_FALSE(ab.count("inside") && ab.count("disjoint"));
  }
}

TEST(Relations, AngleIsWrappedYawDifference) {
  AdjustmentSettings s;
  const auto rels = all_relations(box("a", 0, 0, 0, 1, 1, 1, 3.0), box("b", 2, 0, 0, 1, 1, 1, -3.0), s);
  ASSERT_FALSE(rels.empty());
  for (const auto& r : rels) EXPECT_NEAR(r.angle, wrap_angle(6.0), 1e-12);
}

TEST(Deduce, ParallelMatchesSerialAndIsIdempotent) {
  AdjustmentSettings s;
  std::mt19937_64 rng(24);
  FactBase fb;
  for (auto& o : oracle::random_scene(rng, 64)) fb.upsert(o);
  auto user = box("user", 0, 0, -4, 0.5, 1.8, 0.3);
  user.observer = true;
  fb.upsert(user);
  std::set<Category> all = kAllButVisibility;
  all.insert(Category::visibility);
  FactBase serial = fb, parallel = fb;
  deduce_serial(serial, all, s);
  deduce(parallel, all, s);
  EXPECT_EQ(serial.relations(), parallel.relations());
  EXPECT_FALSE(serial.relations().empty());
  FactBase twice = parallel;
  deduce(twice, all, s);
  EXPECT_EQ(twice.relations(), parallel.relations());
  FactBase untouched = parallel;
  deduce(untouched, {}, s);
  EXPECT_EQ(untouched, parallel);
}

TEST(Deduce, ObserverResolution) {
  AdjustmentSettings s;
  FactBase fb;
  fb.upsert(box("a", 0, 0, 0, 1, 1, 1));
  fb.upsert(box("b", 2, 0, 3, 1, 1, 1));
  EXPECT_FALSE(resolve_observer(fb));
  EXPECT_THROW(deduce(fb, {Category::visibility}, s), InvalidArgument);
  EXPECT_EQ(resolve_observer(fb, "a"), "a");
  EXPECT_THROW(resolve_observer(fb, "ghost"), InvalidArgument);
  EXPECT_NO_THROW(deduce(fb, {Category::visibility}, s, "a"));
  EXPECT_TRUE(fb.is_deduced(Category::visibility));
}

TEST(Deduce, RecomputingOneCategoryKeepsOthers) {
  AdjustmentSettings s;
  FactBase fb;
  fb.upsert(box("a", 0, 0, 0, 1, 1, 1));
  fb.upsert(box("b", 1.01, 0, 0, 1, 1, 1));
  deduce(fb, {Category::assembly, Category::proximity}, s);
  const auto before = fb.relations();
  deduce(fb, {Category::proximity}, s);
  EXPECT_EQ(fb.relations(), before);
  EXPECT_TRUE(fb.has_relation("a", "touching", "b"));
}

TEST(Deduce, ScaleInvariance) {
  std::mt19937_64 rng(25);
  for (double k : {0.1, 10.0}) {
    for (int i = 0; i < 20; ++i) {
      auto scene = oracle::random_scene(rng, 6);
      AdjustmentSettings s;
      s.max_gap = 0.05;
      AdjustmentSettings sk = s;
      sk.max_gap *= k;
      sk.nearby_limit *= k;
      FactBase a, b;
      for (auto o : scene) {
        a.upsert(o);
        o.x *= k, o.y *= k, o.z *= k, o.w *= k, o.h *= k, o.d *= k;
        b.upsert(o);
      }
      deduce(a, kAllButVisibility, s);
      deduce(b, kAllButVisibility, sk);
      ASSERT_EQ(a.relations().size(), b.relations().size());
      for (std::size_t r = 0; r < a.relations().size(); ++r) {
        EXPECT_EQ(a.relations()[r].predicate, b.relations()[r].predicate);
        EXPECT_EQ(a.relations()[r].subject, b.relations()[r].subject);
      }
    }
  }
}
