#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "glpin/lattice.hpp"

using namespace glpin;

namespace {

Scene ball_scene(double r, double b, Vec3 c = {0, 0, 0}) {
  return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball(c, r), b);
}

Vec3 in_ball(std::mt19937_64& g, double r) {
  std::uniform_real_distribution<double> U(-1, 1);
  for (;;) {
    Vec3 v{U(g), U(g), U(g)};
    if (norm(v) <= 1) return v * r;
  }
}

}  // namespace

TEST(Lattice, StencilSizes) {
  EXPECT_EQ(stencil_offsets(Stencil::S6).size(), 6u);
  EXPECT_EQ(stencil_offsets(Stencil::S18).size(), 18u);
  EXPECT_EQ(stencil_offsets(Stencil::S26).size(), 26u);
  EXPECT_EQ(stencil_offsets(Stencil::Extended).size(), 578u);
}

TEST(Lattice, StraightOutsidePairIsEuclidean) {
  Scene s = ball_scene(0.3, 0.5);
  Vec3 x{0.9, 0, 0.1}, y{0.05, 0.85, -0.2};
  double l = lattice_oracle_distance(s, x, y);
  EXPECT_NEAR(l / dist(x, y), 1.0, 0.01);
  EXPECT_GE(l, dist(x, y) - 1e-12);
}

TEST(Lattice, BothInsidePair) {
  Scene s = ball_scene(0.6, 0.5);
  Vec3 x{-0.4, 0.1, 0.05}, y{0.35, -0.2, 0.1};
  double l = lattice_oracle_distance(s, x, y);
  EXPECT_NEAR(l / (0.25 * dist(x, y)), 1.0, 0.01);
}

TEST(Lattice, CoarseStencilsAreWorse) {
  Scene s = ball_scene(0.3, 0.5);
  Vec3 x{0.8, 0.1, 0.0}, y{-0.1, 0.75, 0.3};
  LatticeOptions o;
  o.heuristic_scale = 0;
  o.h = 1.0 / 32;
  o.stencil = Stencil::S6;
  double l6 = lattice_oracle_distance(s, x, y, o);
  o.stencil = Stencil::Extended;
  double lx = lattice_oracle_distance(s, x, y, o);
  EXPECT_GT(l6, lx);
  EXPECT_GE(lx, distance(s, x, y) - 1e-9);
}

TEST(Lattice, OutOfBox) {
  Scene s = ball_scene(0.3, 0.5);
  try {
    lattice_oracle_distance(s, {3, 0, 0}, {0, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfBox);
  }
}

TEST(Lattice, RefractionPairsAgreeWithGeodesic) {
  std::mt19937_64 g(21);
  double worst = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (double b : {0.3, 0.6, 0.9}) {
    Scene s = ball_scene(0.5, b, {0.05, 0.0, -0.05});
    for (int i = 0; i < 5; ++i) {
      Vec3 x = in_ball(g, 1), y = in_ball(g, 1);
      double d = distance(s, x, y), l = lattice_oracle_distance(s, x, y);
      worst = std::max(worst, std::abs(l - d) / d);
      EXPECT_LE(std::abs(l - d) / d, 0.02);
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("worst relative error %.4f, %.2f s for 15 pairs\n", worst, secs);
}
