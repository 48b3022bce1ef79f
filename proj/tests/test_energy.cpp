#include <gtest/gtest.h>

#include "glpin/energy.hpp"

using namespace glpin;

namespace {

Scene symmetric() { return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0, 0, 0}, 0.5), 0.5); }
SingularityData poles() { return {{{0, 0, 1}}, {{0, 0, -1}}}; }

Scene offset_scene() { return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0.05, 0, 0}, 0.5), 0.5); }
SingularityData two_pairs() {
  return {{normalized(Vec3{0.3, 0, 1}), normalized(Vec3{-1, 0.35, 0.3})},
          {normalized(Vec3{0.3, 0, -1}), normalized(Vec3{-1, -0.35, 0.3})}};
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::BadInput;
}

//! Radial core energy per unit length of the ramp v = (x, y) / eps, by 2D quadrature.
double core_energy_quadrature(double w) {
  const double eps = 1;
  const int n = 4000;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    double r = (i + 0.5) / n * eps;
    double grad2 = 2 / (eps * eps), mod = r / eps;
    double dens = 0.5 * w * grad2 + w * w / (4 * eps * eps) * (1 - mod * mod) * (1 - mod * mod);
    s += dens * 2 * kPi * r * (eps / n);
  }
  return s;
}

}  // namespace

TEST(Tube, CoreTermMatchesQuadrature) {
  for (double w : {0.25, 1.0}) EXPECT_NEAR(core_energy_quadrature(w), kPi * (w + w * w / 12), 1e-6);
}

TEST(Tube, SymmetricBreakdownAddsUp) {
  Scene s = symmetric();
  auto link = geodesic_link(s, poles());
  auto t = build_tube(s, link, 0.12, 1e-3);
  auto e = tube_energy(s, t);
  EXPECT_NEAR(e.total_upper, e.tube_log_term + e.core_term + e.cap_bound + e.strip_correction, 1e-12);
  // middle portion [eta, 2 - eta] of the diameter: 1 inside omega at weight 1/4, 0.76 outside
  EXPECT_NEAR(e.link_integral, 0.25 + 2 * (0.5 - 0.12), 1e-12);
  EXPECT_NEAR(e.full_integral, 1.25, 1e-12);
  EXPECT_NEAR(e.tube_log_term, kPi * std::log(0.12 / 1e-3) * e.link_integral, 1e-12);
  EXPECT_EQ(t.strips[0].crossings, 2);
  EXPECT_NEAR(t.strips[0].shell_length, 4 * std::sqrt(1e-3), 1e-12);
  EXPECT_NEAR(t.strips[0].inner_shell_length, 2 * std::sqrt(1e-3), 1e-12);
}

TEST(Tube, ExactProfileBelowPinnedWithStripBound) {
  Scene s = symmetric();
  auto link = geodesic_link(s, poles());
  for (double eps : {1e-3, 1e-4}) {
    auto p = solve_radial(0.5, 0.5, eps);
    auto a2 = tube_energy(s, build_tube(s, link, 0.12, eps));
    auto ex = tube_energy(s, build_tube(s, link, 0.12, eps, StripPolicy::ExactProfile), &p);
    EXPECT_LE(std::abs(ex.tube_log_term - a2.tube_log_term), a2.strip_correction);
    EXPECT_LE(ex.total_upper, a2.total_upper);
  }
}

TEST(Tube, ExactProfileNeedsConcentricProfile) {
  Scene s = offset_scene();
  auto sing = validate_singularities(s, two_pairs());
  auto link = geodesic_link(s, sing);
  auto t = build_tube(s, link, 0.12, 1e-3, StripPolicy::ExactProfile);
  auto p = solve_radial(0.5, 0.5, 1e-3);
  EXPECT_EQ(code_of([&] { tube_energy(s, t, &p); }), ErrorCode::ProfileUnavailable);
  Scene c = symmetric();
  auto ct = build_tube(c, geodesic_link(c, poles()), 0.12, 1e-3, StripPolicy::ExactProfile);
  EXPECT_EQ(code_of([&] { tube_energy(c, ct, nullptr); }), ErrorCode::ProfileUnavailable);
}

TEST(Tube, RejectsOverlapAndCoarseEpsilon) {
  Scene s = symmetric();
  GeodesicLink link;
  Geodesic a, b;
  a.vertices = {{0.1, 0, 0.99}, {0.1, 0, -0.99}};
  b.vertices = {{-0.1, 0, 0.99}, {-0.1, 0, -0.99}};
  link.curves = {a, b};
  EXPECT_EQ(code_of([&] { build_tube(s, link, 0.12, 1e-4); }), ErrorCode::TubesOverlap);
  EXPECT_NO_THROW(build_tube(s, link, 0.09, 1e-4));
  EXPECT_EQ(code_of([&] { build_tube(s, link, 0.09, 0.02); }), ErrorCode::BadInput);
}

TEST(Tube, StripConditionRejectsBoundaryHuggingCurve) {
  Scene s = symmetric();
  // polyline running just inside the inclusion boundary
  GeodesicLink link;
  Geodesic g;
  g.vertices.push_back({0, 0, 1});
  for (int i = 0; i <= 40; ++i) {
    double a = kPi / 2 * (1 - i / 40.0);
    g.vertices.push_back({0.499 * std::cos(a), 0, 0.499 * std::sin(a)});
  }
  g.vertices.push_back({1, 0, 0});
  link.curves.push_back(g);
  EXPECT_EQ(code_of([&] { build_tube(s, link, 0.12, 1e-3); }), ErrorCode::StripConditionFailed);
}

TEST(Slope, SymmetricSceneBothPolicies) {
  Scene s = symmetric();
  auto prof = [](double e) { return solve_radial(0.5, 0.5, e); };
  for (auto pol : {StripPolicy::ExactProfile, StripPolicy::PinningWithStripBound}) {
    auto r = asymptotic_slope(s, poles(), {1e-2, 1e-3, 1e-4}, 0.12, pol, prof);
    EXPECT_NEAR(r.target, kPi * 1.25, 1e-9);
    EXPECT_LT(r.rel_err, 0.05);
    EXPECT_TRUE(r.bounded_offset);
  }
}

TEST(Slope, PinnedPolicyWithoutStripIsExact) {
  // the log, cap and core terms alone have slope exactly pi L
  Scene s = symmetric();
  auto r = asymptotic_slope(s, poles(), {1e-2, 1e-3, 1e-4}, 0.12);
  double xs[3], ys[3];
  for (int i = 0; i < 3; ++i) {
    const auto& e = r.rows[i].energy;
    xs[i] = std::abs(std::log(r.rows[i].epsilon));
    ys[i] = e.total_upper - e.strip_correction;
  }
  EXPECT_NEAR((ys[2] - ys[0]) / (xs[2] - xs[0]), kPi * 1.25, 1e-9);
}

TEST(Slope, TwoPairCurvedLink) {
  Scene s = offset_scene();
  auto sing = validate_singularities(s, two_pairs());
  auto link = geodesic_link(s, sing);
  EXPECT_GT(link.curves[0].vertices.size(), 2u);
  auto r = asymptotic_slope(s, sing, {1e-2, 1e-3, 1e-4}, 0.12);
  EXPECT_LT(r.rel_err, 0.05);
}

TEST(Slope, RejectsShortLadder) {
  EXPECT_EQ(code_of([&] { asymptotic_slope(symmetric(), poles(), {1e-3, 5e-4, 2e-4}, 0.12); }), ErrorCode::BadInput);
}
