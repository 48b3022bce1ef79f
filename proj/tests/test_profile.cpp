#include <gtest/gtest.h>

#include <random>

#include "glpin/profile.hpp"

using namespace glpin;

namespace {

Scene symmetric() { return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0, 0, 0}, 0.5), 0.5); }

double closed_form_cost(double b) {
  double us = std::sqrt((1 + b * b) / 2);
  return std::sqrt(2.0) / 3 * ((1 + b * b * b) - (1 + b * b) * us);
}

//! Independent solver: implicit gradient flow of the strong form on a uniform mesh.
std::vector<double> gradient_flow_profile(double r0, double b, double eps, int n, std::vector<double>& r) {
  const double h = 1.0 / n;
  r.resize(n + 1);
  for (int i = 0; i <= n; ++i) r[i] = i * h;
  std::vector<double> U(n + 1);
  for (int i = 0; i <= n; ++i) U[i] = r[i] < r0 ? b : 1.0;
  auto a2 = [&](double x) { return x < r0 ? b * b : 1.0; };
  double dt = 1e-4;
  for (int step = 0; step < 120; ++step) {
    // backward Euler: (U - Uold)/dt = U'' + 2U'/r + eps^-2 U (a^2 - U^2), Newton-solved
    std::vector<double> old = U;
    for (int it = 0; it < 20; ++it) {
      std::vector<double> lo(n, 0), di(n, 0), up(n, 0), rhs(n, 0);
      double rn = 0;
      for (int i = 0; i < n; ++i) {
        double rm = i == 0 ? 0 : r[i] - h / 2, rp = r[i] + h / 2;
        double w = i == 0 ? h * h * h / 24 : r[i] * r[i] * h;  // control volume r^2 dr
        double fl = i == 0 ? 0 : rm * rm * (U[i] - U[i - 1]) / h;
        double fr = rp * rp * (U[i + 1] - U[i]) / h;
        double q = U[i] * U[i];
        double F = (fr - fl) + w * U[i] * (a2(r[i]) - q) / (eps * eps) - w * (U[i] - old[i]) / dt;
        rhs[i] = -F;
        rn = std::max(rn, std::abs(F / w));
        di[i] = -(i == 0 ? 0 : rm * rm / h) - rp * rp / h + w * (a2(r[i]) - 3 * q) / (eps * eps) - w / dt;
        if (i > 0) lo[i] = rm * rm / h;
        if (i + 1 < n) up[i] = rp * rp / h;
      }
      auto d = detail::thomas(lo, di, up, rhs);
      for (int i = 0; i < n; ++i) U[i] += d[i];
      if (rn < 1e-12) break;
    }
    dt = std::min(dt * 1.5, 1e3);
  }
  return U;
}

std::pair<double, double> one(const Vec3&) { return {1.0, 0.0}; }

std::pair<double, double> smooth_phase(const Vec3& x) {
  double t = kPi * (0.7 * x.x + 0.4 * x.y * x.y - 0.3 * x.z);
  return {std::cos(t), std::sin(t)};
}

std::pair<double, double> vortex_ring(const Vec3& x) {
  double rho = std::hypot(x.x, x.y), wr = rho - 0.75, wi = x.z, m = std::hypot(wr, wi);
  if (m == 0) return {0.0, 0.0};
  double f = m >= 0.2 ? 1.0 : 1 - std::pow(1 - m / 0.2, 3);
  return {f * wr / m, f * wi / m};
}

}  // namespace

TEST(Profile, UnpinnedLimitIsConstant) {
  auto p = solve_radial(0.5, 1.0, 1e-2);
  for (double u : p.U) EXPECT_EQ(u, 1.0);
  EXPECT_EQ(p.energy, 0.0);
  EXPECT_THROW(exponential_fit(p), Error);
}

TEST(Profile, RangeMonotoneAndBoundary) {
  auto p = solve_radial(0.5, 0.5, 1e-2);
  EXPECT_EQ(p.U.back(), 1.0);
  EXPECT_LT(p.residual, 1e-10);
  for (size_t i = 0; i < p.U.size(); ++i) {
    EXPECT_GE(p.U[i], 0.5);
    EXPECT_LE(p.U[i], 1.0);
    if (i) EXPECT_GE(p.U[i], p.U[i - 1] - 1e-9);
  }
  ASSERT_TRUE(p.has_fit);
  EXPECT_LE(p.U[0] - 0.5, p.fit.C * std::exp(-p.fit.gamma * 0.5 / 1e-2));
}

TEST(Profile, AgreesWithIndependentGradientFlow) {
  auto p = solve_radial(0.5, 0.5, 2e-2, {60});
  std::vector<double> r;
  auto U = gradient_flow_profile(0.5, 0.5, 2e-2, 4000, r);
  double err = 0;
  for (size_t i = 0; i < r.size(); i += 7) err = std::max(err, std::abs(U[i] - p.eval(r[i])));
  EXPECT_LT(err, 2e-3);
}

TEST(Profile, RandomInitializationsAgree) {
  auto ref = solve_radial(0.5, 0.5, 5e-3);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> U(0.5, 1);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> init(ref.r.size());
    for (auto& x : init) x = U(g);
    auto p = solve_radial(0.5, 0.5, 5e-3, {}, &init);
    double d = 0;
    for (size_t i = 0; i < p.U.size(); ++i) d = std::max(d, std::abs(p.U[i] - ref.U[i]));
    EXPECT_LT(d, 1e-8);
  }
}

TEST(Profile, MeshTooCoarse) {
  try {
    solve_radial(0.5, 0.5, 1e-2, {10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MeshTooCoarse);
  }
}

TEST(Profile, EnergyScalesLikeInterfaceCost) {
  const double target = heteroclinic_cost_oracle(0.5) * 4 * kPi * 0.25;
  std::vector<double> scaled;
  for (double eps : {4e-3, 2e-3, 1e-3}) {
    auto p = solve_radial(0.5, 0.5, eps);
    scaled.push_back(eps * p.energy);
    EXPECT_NEAR(eps * p.energy / target, 1, 0.01);
    EXPECT_GE(energy_fraction_near_interface(p, 10 * eps * std::abs(std::log(eps))), 0.95);
  }
  auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  EXPECT_LT((*hi - *lo) / *lo, 0.1);
}

TEST(Profile, ExponentialFit) {
  auto a = solve_radial(0.5, 0.5, 1e-2), b = solve_radial(0.5, 0.5, 5e-3);
  ASSERT_TRUE(a.has_fit && b.has_fit);
  EXPECT_GT(a.fit.gamma, 0);
  EXPECT_GT(a.fit.r2, 0.99);
  EXPECT_NEAR(a.fit.gamma / b.fit.gamma, 1, 0.1);
  // linearized decay rates: sqrt(2) b inside, sqrt(2) outside
  EXPECT_NEAR(b.fit.gamma_inside, std::sqrt(2.0) * 0.5, 0.05);
  EXPECT_NEAR(b.fit.gamma_outside, std::sqrt(2.0), 0.05);
}

TEST(Heteroclinic, MatchesClosedFormAndMonotone) {
  EXPECT_NEAR(heteroclinic_cost_oracle(0.5), closed_form_cost(0.5), 1e-12);
  EXPECT_NEAR(heteroclinic_cost_oracle(0.5), 0.0644825906, 1e-9);
  EXPECT_EQ(heteroclinic_cost_oracle(1.0), 0.0);
  EXPECT_LT(heteroclinic_cost_oracle(0.999), 1e-6);
  double prev = 1e9;
  for (double b = 0.05; b < 1; b += 0.05) {
    double c = heteroclinic_cost_oracle(b);
    EXPECT_NEAR(c, closed_form_cost(b), 1e-12);
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(DiscreteEnergy, UnpinnedGroundStateIsZero) {
  Scene s = symmetric();
  GridSpec g = grid_for(s.omega, 1.0 / 16);
  auto cm = cell_moments(s, g);
  cm.m1 = cm.m0;
  cm.m2 = cm.m0;
  auto u = sample_field(g, one);
  EXPECT_EQ(discrete_energy(cm, u, 0.05), 0.0);
}

TEST(DiscreteEnergy, PinnedPotentialClosedForm) {
  Scene s = symmetric();
  const double eps = 0.05;
  double exact = 0.5 / (2 * eps * eps) * std::pow(1 - 0.25, 2) * 4.0 / 3 * kPi * 0.125;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    auto u = sample_field(grid_for(s.omega, h), one);
    EXPECT_NEAR(discrete_energy(s, u, eps) / exact, 1, 0.02);
  }
}

TEST(DiscreteEnergy, ShapeMismatch) {
  Scene s = symmetric();
  auto u = sample_field(grid_for(s.omega, 1.0 / 8), one);
  auto cm = cell_moments(s, grid_for(s.omega, 1.0 / 10));
  try {
    discrete_energy(cm, u, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Decoupling, IdentityFieldIsExact) {
  auto p = solve_radial(0.5, 0.5, 0.05);
  auto t = decoupling_residual(symmetric(), p, one, {1.0 / 16, 1.0 / 24});
  for (const auto& r : t.rows) EXPECT_EQ(r.residual, 0.0);
}

TEST(Decoupling, ResidualDecaysForSmoothPhaseAndVortexRing) {
  auto p = solve_radial(0.5, 0.5, 0.05);
  for (auto f : {smooth_phase, vortex_ring}) {
    auto t = decoupling_residual(symmetric(), p, f, {1.0 / 16, 1.0 / 24, 1.0 / 32});
    EXPECT_GE(t.order, 0.9);
    EXPECT_LT(t.rows.back().residual, t.rows.front().residual);
  }
}

TEST(Decoupling, RejectsNonUnimodularTrace) {
  auto p = solve_radial(0.5, 0.5, 0.05);
  auto half = [](const Vec3&) { return std::make_pair(0.5, 0.0); };
  try {
    decoupling_residual(symmetric(), p, half, {1.0 / 8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TraceNotUnimodular);
  }
}
