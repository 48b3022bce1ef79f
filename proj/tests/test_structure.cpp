#include <gtest/gtest.h>

#include <random>

#include "glpin/structure.hpp"

using namespace glpin;

namespace {

Scene symmetric() { return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0, 0, 0}, 0.5), 0.5); }
SingularityData poles() { return {{{0, 0, 1}}, {{0, 0, -1}}}; }

Scene offset_scene() { return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0.05, 0, 0}, 0.5), 0.5); }
SingularityData two_pairs() {
  return {{normalized(Vec3{0.3, 0, 1}), normalized(Vec3{-1, 0.35, 0.3})},
          {normalized(Vec3{0.3, 0, -1}), normalized(Vec3{-1, -0.35, 0.3})}};
}

Vec3 random_in_ball(std::mt19937_64& g, double r) {
  std::uniform_real_distribution<double> U(-r, r);
  for (;;) {
    Vec3 x{U(g), U(g), U(g)};
    if (norm(x) < r) return x;
  }
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

StructureOptions coarse() {
  StructureOptions o;
  o.h = 1.0 / 16;
  return o;
}

}  // namespace

TEST(ExtendPotential, MatchesPotentialOnSingularitiesAndIsLipschitz) {
  Scene s = offset_scene();
  auto sing = validate_singularities(s, two_pairs());
  const double dp = 0.02;
  ConvexBody body = s.inclusion.dilated(dp);
  Medium m = medium(s, body);
  auto conn = minimal_connection(distance_matrix(m, sing));
  auto xi0 = dual_potential(full_distance_matrix(m, sing), conn);
  auto ext = extend_potential(s, sing, xi0, dp);
  auto pts = sing.all();
  for (size_t a = 0; a < pts.size(); ++a) EXPECT_NEAR(ext(pts[a]), xi0.values[a], 1e-9);

  std::mt19937_64 g(3);
  for (int t = 0; t < 200; ++t) {
    Vec3 x = random_in_ball(g, 1), y = random_in_ball(g, 1);
    EXPECT_LE(std::abs(ext(x) - ext(y)), distance(m, x, y) + 1e-9);
  }
}

TEST(ExtendPotential, RejectsInfeasiblePotential) {
  Scene s = symmetric();
  DualPotential bad;
  bad.values = {10, 0};
  EXPECT_EQ(code_of([&] { extend_potential(s, poles(), bad, 0.01); }), ErrorCode::InfeasiblePotential);
}

TEST(Mollify, ConstantsLinearsAndIdentityBranch) {
  GridSpec g = grid_for(ConvexBody::ball({0, 0, 0}, 1), 0.1);
  std::vector<double> c(g.size(), 2.0), lin(g.size());
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) lin[g.index(i, j, k)] = g.node(i, j, k).x - 0.3 * g.node(i, j, k).z;
  auto mc = mollify(g, c, 0.25, 0.1, 0.3);
  auto ml = mollify(g, lin, 0.25, 0.1, 0.3);
  EXPECT_FALSE(mc.identity);
  for (size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(mc.values[i], 1.8, 1e-12);
    EXPECT_NEAR(ml.values[i], 0.9 * lin[i], 1e-12);
  }
  auto id = mollify(g, lin, 0.05, 0.1, 0.3);
  EXPECT_TRUE(id.identity);
  for (size_t i = 0; i < g.size(); ++i) EXPECT_EQ(id.values[i], 0.9 * lin[i]);
  EXPECT_EQ(code_of([&] { mollify(g, c, 0.3, 0.1, 0.3); }), ErrorCode::KernelWiderThanMargin);
}

TEST(Mollify, PointEvaluationMatchesGridConvolution) {
  GridSpec g = grid_for(ConvexBody::ball({0, 0, 0}, 1), 0.1);
  auto f = [](const Vec3& x) { return std::abs(x.x) + 0.5 * x.y * x.y; };
  std::vector<double> v(g.size());
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) v[g.index(i, j, k)] = f(g.node(i, j, k));
  auto m = mollify(g, v, 0.25, 0.05, 0.3);
  int i = 8, j = 10, k = 13;
  EXPECT_NEAR(mollified_at(g, v, f, g.node(i, j, k), 0.25, 0.05), m.values[g.index(i, j, k)], 1e-12);
  // a 1-Lipschitz function stays (1 - beta)-Lipschitz along edges
  double worst = 0;
  for (int k2 = 3; k2 + 4 < g.dims[2]; ++k2)
    for (int j2 = 3; j2 + 4 < g.dims[1]; ++j2)
      for (int i2 = 3; i2 + 4 < g.dims[0]; ++i2)
        worst = std::max(worst, std::abs(m.values[g.index(i2 + 1, j2, k2)] - m.values[g.index(i2, j2, k2)]) / g.h);
  EXPECT_LE(worst, 0.95 * (1 + 0.5 * 1.2) + 1e-12);
}

TEST(Structure, SymmetricSceneMeetsTarget) {
  auto f = structure_function(symmetric(), poles(), 0.05, coarse());
  const auto& c = f.certificate;
  EXPECT_TRUE(c.passed);
  EXPECT_NEAR(c.length, 1.25, 1e-9);
  EXPECT_GE(c.gap, c.length - 0.05);
  EXPECT_LE(c.lipschitz_metric_slack, 2 * f.grid.h);
  EXPECT_LE(c.edge_excess, 2 * f.grid.h);
  EXPECT_NEAR(c.delta_prime, 1.5 * c.delta, 1e-15);
}

TEST(Structure, TwoPairCurvedLink) {
  Scene s = offset_scene();
  auto sing = validate_singularities(s, two_pairs());
  auto f = structure_function(s, sing, 0.05, coarse());
  EXPECT_TRUE(f.certificate.passed);
  EXPECT_GE(f.certificate.gap, f.certificate.length - 0.05);
  EXPECT_EQ(f.singular_values.size(), 4u);
}

TEST(Structure, EtaBudgetInfeasible) {
  StructureOptions o = coarse();
  o.delta = 0.2;
  EXPECT_EQ(code_of([&] { structure_function(symmetric(), poles(), 0.01, o); }), ErrorCode::EtaBudgetInfeasible);
}

TEST(Structure, ConstantOnKForAllThreeCases) {
  Scene s = symmetric();
  const double r = 0.05, L = 1.25, b2 = 0.25;
  struct Case {
    Vec3 c;
    double expected;
  };
  for (const auto& cs : {Case{{0.6, 0.55, 0}, L}, Case{{0, 0, 0.1}, L - 2 * b2 * r}, Case{{0, 0, 0.5}, L - (1 + b2) * r}}) {
    auto f = structure_function_constant_on_K(s, poles(), cs.c, r, 0.05, coarse());
    const auto& c = f.certificate;
    EXPECT_NEAR(c.length, cs.expected, 1e-6);
    EXPECT_TRUE(c.constant_on_K);
    EXPECT_GT(c.K_nodes, 0);
    EXPECT_TRUE(c.passed);
    EXPECT_GE(c.gap, cs.expected - 0.05);
    // finite differences vanish inside K
    const GridSpec& g = f.grid;
    for (int k = 0; k + 1 < g.dims[2]; ++k)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i)
          if (dist(g.node(i, j, k), cs.c) <= r && dist(g.node(i, j, k + 1), cs.c) <= r)
            EXPECT_EQ(f.at(i, j, k + 1), f.at(i, j, k));
  }
}

TEST(Structure, KTouchingSingularityRejected) {
  EXPECT_EQ(code_of([&] { structure_function_constant_on_K(symmetric(), poles(), {0, 0, 0.97}, 0.05, 0.05, coarse()); }),
            ErrorCode::KTouchesSingularity);
}

TEST(Structure, ProfileWeightedGradientBound) {
  Scene s = symmetric();
  auto f = structure_function(s, poles(), 0.05, coarse());
  auto p = solve_radial(0.5, 0.5, 1e-4);
  EXPECT_LE(profile_bound_excess(s, f, p), 2 * f.grid.h);
}

TEST(Dumbbell, UnitProfileGivesDifferenceTwo) {
  Scene s = symmetric();
  auto d = dumbbell(s, nullptr, {0.2, 0.5, 0});
  EXPECT_NEAR(d(d.p()) - d(d.n()), 2.0, 1e-14);
  EXPECT_NEAR(d.x0(), 0.2, 1e-15);
}

TEST(Dumbbell, SolvedProfileMatchesAxisQuadrature) {
  Scene s = symmetric();
  auto p = solve_radial(0.5, 0.5, 1e-2);
  auto d = dumbbell(s, &p, {0.1, 0.4, 0.2});
  // composite 5-point Gauss-Legendre on a fine uniform partition
  const double gx[5] = {0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  const double gw[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                        0.2369268850561891};
  double q = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double a = -1 + 2.0 * i / n, b = a + 2.0 / n;
    for (int j = 0; j < 5; ++j) {
      double u = p.eval(std::abs(0.5 * (a + b) + 0.5 * (b - a) * gx[j]));
      q += 0.5 * (b - a) * gw[j] * u * u;
    }
  }
  EXPECT_NEAR(d(d.p()) - d(d.n()), q, 1e-6);
  EXPECT_LT(q, 2.0);
}

TEST(Dumbbell, VanishesNearMAndHasNestedLevelSpheres) {
  Scene s = symmetric();
  auto p = solve_radial(0.5, 0.5, 1e-2);
  const Vec3 M{0.1, 0.4, 0.2};
  auto d = dumbbell(s, &p, M);
  double rz = d.zero_radius();
  ASSERT_GT(rz, 0);
  std::mt19937_64 g(5);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(d(M + random_in_ball(g, 0.999 * rz)), 0.0);
  double prev = 0;
  for (double f : {0.1, 0.3, 0.5, 0.9}) {
    double r = d.level_radius(f * d.xi0(1));
    EXPECT_GE(r, 1.0);
    if (prev > 0) EXPECT_LT(r, prev);
    prev = r;
  }
  for (double f : {0.1, 0.5, 0.9}) EXPECT_GE(d.level_radius(f * d.xi0(-1)), 1.0);
}

TEST(Dumbbell, GradientBoundedByProfileSquared) {
  Scene s = symmetric();
  auto p = solve_radial(0.5, 0.5, 1e-2);
  auto d = dumbbell(s, &p, {0.1, 0.4, 0.2});
  std::mt19937_64 g(9);
  const double h = 1e-6;
  for (int t = 0; t < 300; ++t) {
    Vec3 x = random_in_ball(g, 0.98);
    double gx = (d(x + Vec3{h, 0, 0}) - d(x - Vec3{h, 0, 0})) / (2 * h);
    double gy = (d(x + Vec3{0, h, 0}) - d(x - Vec3{0, h, 0})) / (2 * h);
    double gz = (d(x + Vec3{0, 0, h}) - d(x - Vec3{0, 0, h})) / (2 * h);
    // the field depends on distances to 2p or 2n only; U^2 at the matching axis point bounds it
    double bound = std::max(d.U2(2 - dist(x, 2 * d.p())), d.U2(dist(x, 2 * d.n()) - 2));
    EXPECT_LE(std::sqrt(gx * gx + gy * gy + gz * gz), bound + 1e-5);
  }
}

TEST(Dumbbell, RejectsMOnAxis) {
  EXPECT_EQ(code_of([&] { dumbbell(symmetric(), nullptr, {0.3, 0, 0}); }), ErrorCode::MOnAxis);
}

TEST(Coarea, SinglePairExample) {
  auto r = coarea_degree_bound({1.0}, {0.0}, 0.1, 0.05, 1.0);
  EXPECT_NEAR(r.integral, 0.8, 1e-15);
  EXPECT_TRUE(r.holds);
}

TEST(Coarea, SmallRhoRecoversDifferences) {
  std::vector<double> xp{1.3, 0.2, 0.9}, xn{-0.1, -0.6, 0.4};
  double sum = 0;
  for (size_t i = 0; i < 3; ++i) sum += xp[i] - xn[i];
  double prev = -1;
  for (double rho : {1e-1, 1e-2, 1e-4, 1e-8}) {
    auto r = coarea_degree_bound(xp, xn, rho, 0.05, sum);
    EXPECT_TRUE(r.holds);
    EXPECT_GE(r.integral, prev);
    prev = r.integral;
  }
  EXPECT_NEAR(prev, sum, 1e-7);
}

TEST(Coarea, ChainOnStructureFunction) {
  auto f = structure_function(symmetric(), poles(), 0.05, coarse());
  auto r = coarea_degree_bound(f, 0.05, 0.05);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.chain_holds);
  EXPECT_NEAR(r.final_bound, 1.25 - 12 * 0.05, 1e-12);
  auto wide = coarea_degree_bound(f, 0.1, 0.05);
  EXPECT_TRUE(wide.holds);
  EXPECT_FALSE(wide.chain_holds);
}
