#include <gtest/gtest.h>

#include <random>

#include "glpin/geometry.hpp"

using namespace glpin;

namespace {

Scene concentric(double b = 0.5) { return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0, 0, 0}, 0.5), b); }

ConvexBody unit_cube() {
  return ConvexBody::polytope({{{1, 0, 0}, 1}, {{-1, 0, 0}, 1}, {{0, 1, 0}, 1}, {{0, -1, 0}, 1}, {{0, 0, 1}, 1}, {{0, 0, -1}, 1}});
}

Vec3 rand_point(std::mt19937_64& g, double r) {
  std::uniform_real_distribution<double> U(-r, r);
  return {U(g), U(g), U(g)};
}

}  // namespace

TEST(Geometry, ConcentricSceneIsValid) {
  auto r = validate_scene(concentric());
  EXPECT_NEAR(r.clearance, 0.5, 1e-15);
  EXPECT_TRUE(r.inclusion_strictly_convex);
}

TEST(Geometry, RejectsInclusionNotContained) {
  EXPECT_THROW(make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0.8, 0, 0}, 0.5), 0.5), Error);
}

TEST(Geometry, RejectsContrastOutOfRange) {
  try {
    make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0, 0, 0}, 0.5), 1.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidScene);
  }
}

TEST(Geometry, PinningConvention) {
  Scene s = concentric();
  EXPECT_EQ(pinning(s, {0, 0, 0}), 0.5);
  EXPECT_EQ(pinning(s, {0.9, 0, 0}), 1.0);
  EXPECT_EQ(pinning(s, {0.5, 0, 0}), 1.0);
}

TEST(Geometry, DilateBall) {
  Scene s = concentric();
  auto d = dilate_inclusion(s, 0.1);
  EXPECT_TRUE(d.is_ball());
  EXPECT_NEAR(d.radius(), 0.6, 1e-15);
  EXPECT_EQ(dilate_inclusion(s, 0).radius(), 0.5);
  try {
    dilate_inclusion(s, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DeltaTooLarge);
  }
}

TEST(Geometry, ProjectBall) {
  auto b = ConvexBody::ball({0, 0, 0}, 0.5);
  Vec3 p = project_boundary(b, {1, 0, 0});
  EXPECT_NEAR(dist(p, {0.5, 0, 0}), 0, 1e-15);
  EXPECT_EQ(project_boundary(b, {0, 0, 0}), (Vec3{0, 0, 0}));
}

TEST(Geometry, ProjectCubeMatchesDenseBoundarySearch) {
  auto cube = unit_cube();
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 30; ++trial) {
    Vec3 x = rand_point(g, 3);
    if (cube.contains(x)) continue;
    Vec3 p = cube.project(x);
    // oracle: closest point of the clamped box
    Vec3 q{std::clamp(x.x, -1.0, 1.0), std::clamp(x.y, -1.0, 1.0), std::clamp(x.z, -1.0, 1.0)};
    EXPECT_NEAR(dist(p, q), 0, 1e-12);
  }
  Vec3 p = cube.project({2, 0.2, 0.2});
  EXPECT_NEAR(dist(p, {1, 0.2, 0.2}), 0, 1e-14);
}

TEST(Geometry, ProjectionIsIdempotent) {
  std::mt19937_64 g(11);
  auto cube = unit_cube();
  auto rounded = cube.dilated(0.2);
  auto ball = ConvexBody::ball({0.1, -0.2, 0.3}, 0.7);
  for (int i = 0; i < 200; ++i) {
    Vec3 x = rand_point(g, 3);
    for (const ConvexBody* b : {&cube, &rounded, &ball}) {
      for (bool bd : {false, true}) {
        Vec3 p = b->project(x, bd);
        EXPECT_NEAR(dist(b->project(p, bd), p), 0, 1e-12);
      }
    }
  }
}

TEST(Geometry, RoundedCubeDistance) {
  auto r = unit_cube().dilated(0.25);
  EXPECT_NEAR(r.signed_distance({2, 0, 0}), 0.75, 1e-14);
  EXPECT_NEAR(r.signed_distance({2, 2, 1}), std::sqrt(2.0) - 0.25, 1e-14);
  EXPECT_NEAR(r.signed_distance({0.5, 0, 0}), -0.75, 1e-14);
  EXPECT_NEAR(dist(r.project({3, 3, 0}, false), Vec3{1, 1, 0} + Vec3{1, 1, 0} * (0.25 / std::sqrt(2.0))), 0, 1e-12);
}

TEST(Geometry, PinningConstantOnSingleSidedSegments) {
  Scene s = concentric(0.4);
  std::mt19937_64 g(3);
  int checked = 0;
  for (int i = 0; i < 400 && checked < 60; ++i) {
    Vec3 a = rand_point(g, 1), b = rand_point(g, 1);
    auto c = s.inclusion.clip_segment(a, b);
    bool inside = c && c->first == 0 && c->second == 1;
    if (c && !inside) continue;
    ++checked;
    double a0 = pinning(s, a);
    for (int k = 1; k < 50; ++k) EXPECT_EQ(pinning(s, lerp(a, b, k / 50.0)), a0);
  }
  EXPECT_GT(checked, 20);
}

TEST(Geometry, DilationIsMonotone) {
  std::mt19937_64 g(5);
  auto cube = unit_cube();
  auto ball = ConvexBody::ball({0, 0, 0}, 0.5);
  for (int i = 0; i < 500; ++i) {
    Vec3 x = rand_point(g, 2);
    for (const ConvexBody* b : {&cube, &ball}) {
      if (b->dilated(0.1).contains(x)) {
        EXPECT_TRUE(b->dilated(0.2).contains(x));
      }
    }
  }
}

TEST(Geometry, PolytopeValidation) {
  EXPECT_THROW(ConvexBody::polytope({{{1, 0, 0}, 1}, {{-1, 0, 0}, 1}, {{0, 1, 0}, 1}, {{0, -1, 0}, 1}}), Error);
  // empty interior: x <= 0 and -x <= 0
  EXPECT_THROW(ConvexBody::polytope({{{1, 0, 0}, 0}, {{-1, 0, 0}, 0}, {{0, 1, 0}, 1}, {{0, -1, 0}, 1},
                                     {{0, 0, 1}, 1}, {{0, 0, -1}, 1}}),
               Error);
  auto c = ConvexBody::polytope({{{2, 0, 0}, 2}, {{-1, 0, 0}, 1}, {{0, 1, 0}, 1}, {{0, -1, 0}, 1}, {{0, 0, 1}, 1},
                                 {{0, 0, -1}, 1}});
  EXPECT_NEAR(norm(c.halfspaces()[0].normal), 1, 1e-12);
  EXPECT_EQ(c.vertices().size(), 8u);
}

TEST(Geometry, ClearanceClosedForms) {
  auto s = make_scene(unit_cube(), ConvexBody::ball({0.2, 0, 0}, 0.3), 0.5);
  EXPECT_NEAR(s.clearance, 0.5, 1e-14);
  auto t = make_scene(ConvexBody::ball({0, 0, 0}, 2), unit_cube(), 0.5);
  EXPECT_NEAR(t.clearance, 2 - std::sqrt(3.0), 1e-14);
}

TEST(Geometry, ClipSegmentRoundedAgreesWithSampling) {
  auto r = unit_cube().dilated(0.3);
  std::mt19937_64 g(9);
  for (int i = 0; i < 50; ++i) {
    Vec3 a = rand_point(g, 2.5), b = rand_point(g, 2.5);
    auto c = r.clip_segment(a, b);
    int n = 4000, in = 0;
    for (int k = 0; k < n; ++k)
      if (r.contains(lerp(a, b, (k + 0.5) / n), 0)) ++in;
    double frac = c ? c->second - c->first : 0;
    EXPECT_NEAR(frac, double(in) / n, 2.0 / n);
  }
}

TEST(Geometry, SingularitiesProjectedAndValidated) {
  Scene s = concentric();
  SingularityData d{{{1 + 1e-8, 0, 0}}, {{-1, 0, 0}}};
  auto v = validate_singularities(s, d);
  EXPECT_NEAR(norm(v.positives[0]), 1, 1e-15);
  EXPECT_THROW(validate_singularities(s, {{{0.5, 0, 0}}, {{-1, 0, 0}}}), Error);
  EXPECT_THROW(validate_singularities(s, {{{1, 0, 0}}, {{1, 0, 0}}}), Error);
  EXPECT_THROW(validate_singularities(s, {{{1, 0, 0}}, {}}), Error);
}
