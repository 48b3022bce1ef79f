#pragma once

#include <chrono>
#include <numeric>
#include <random>

#include <json.hpp>

#include "energy.hpp"
#include "lattice.hpp"
#include "structure.hpp"

namespace glpin::acceptance {

using json = nlohmann::json;

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0, limit = 0;
  json detail = json::object();
  std::string note;
  //! Set when the failure is a counterexample to the criterion itself, confirmed by an independent oracle.
  std::string disputed;
};

inline Scene concentric_scene(double b = 0.5) {
  return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0, 0, 0}, 0.5), b);
}
inline SingularityData poles() { return {{{0, 0, 1}}, {{0, 0, -1}}}; }

//! Two pairs: one link refracts through an off-center inclusion, the other stays outside.
inline Scene curved_scene() { return make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0.05, 0, 0}, 0.5), 0.5); }
inline SingularityData curved_pairs() {
  return {{normalized(Vec3{0.3, 0, 1}), normalized(Vec3{-1, 0.35, 0.3})},
          {normalized(Vec3{0.3, 0, -1}), normalized(Vec3{-1, -0.35, 0.3})}};
}

//! Test fields for the decoupling identity.
inline std::pair<double, double> smooth_phase(const Vec3& x) {
  double t = kPi * (0.7 * x.x + 0.4 * x.y * x.y - 0.3 * x.z);
  return {std::cos(t), std::sin(t)};
}
//! Degree-one vortex ring of radius 0.75 in z = 0 with a cubic core of width 0.2.
inline std::pair<double, double> vortex_ring(const Vec3& x) {
  double rho = std::hypot(x.x, x.y), wr = rho - 0.75, wi = x.z, m = std::hypot(wr, wi);
  if (m == 0) return {0.0, 0.0};
  double f = m >= 0.2 ? 1.0 : 1 - std::pow(1 - m / 0.2, 3);
  return {f * wr / m, f * wi / m};
}

namespace detail {

inline Vec3 in_ball(std::mt19937_64& g, const Vec3& c, double r) {
  std::uniform_real_distribution<double> U(-1, 1);
  for (;;) {
    Vec3 x{U(g), U(g), U(g)};
    if (norm2(x) <= 1) return c + r * x;
  }
}

//! Composite 5-point Gauss-Legendre rule on n equal panels.
template <class F>
double gauss_legendre(F&& f, double a, double b, int n) {
  static const double x[5] = {0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                              0.2369268850561891};
  double s = 0, h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    double lo = a + i * h;
    for (int j = 0; j < 5; ++j) s += 0.5 * h * w[j] * f(lo + 0.5 * h * (1 + x[j]));
  }
  return s;
}

template <class F>
Result timed(int id, std::string name, double limit, F&& body) {
  Result r;
  r.id = id;
  r.name = std::move(name);
  r.limit = limit;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.passed = body(r);
  } catch (const Error& e) {
    r.passed = false;
    r.note = std::string(to_string(e.code())) + ": " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > limit) {
    r.passed = false;
    r.note += (r.note.empty() ? "" : "; ") + std::string("over time limit");
  }
  return r;
}

inline bool is_concentric_unit(const Scene& s) {
  return s.omega.is_ball() && s.inclusion.is_ball() && norm(s.omega.center()) < 1e-12 &&
         std::abs(s.omega.radius() - 1) < 1e-12 && norm(s.inclusion.center()) < 1e-12;
}

}  // namespace detail

// ---------------------------------------------------------------- criteria

inline Result metric_exactness(const Scene& s, uint64_t seed) {
  std::pair<Vec3, Vec3> worst_pair;
  double worst_excess = 0;
  Result res = detail::timed(1, "metric exactness", 1.0, [&](Result& r) {
    if (!s.inclusion.is_ball()) fail(ErrorCode::InvalidScene, "needs a ball inclusion");
    std::mt19937_64 g(seed);
    const double w = s.b * s.b;
    double in_err = 0, out_err = 0;
    for (int i = 0; i < 20; ++i) {
      Vec3 x = detail::in_ball(g, s.inclusion.center(), s.inclusion.radius()),
           y = detail::in_ball(g, s.inclusion.center(), s.inclusion.radius());
      if (i % 5 == 0) y = s.inclusion.center() + s.inclusion.radius() * normalized(y - s.inclusion.center());
      in_err = std::max(in_err, std::abs(distance(s, x, y) - w * dist(x, y)));
    }
    const Box bb = s.omega.bounding_box();
    std::uniform_real_distribution<double> U(0, 1);
    int straight = 0;
    for (int i = 0; i < 20;) {
      Vec3 x{bb.lo.x + U(g) * (bb.hi.x - bb.lo.x), bb.lo.y + U(g) * (bb.hi.y - bb.lo.y), bb.lo.z + U(g) * (bb.hi.z - bb.lo.z)};
      Vec3 y{bb.lo.x + U(g) * (bb.hi.x - bb.lo.x), bb.lo.y + U(g) * (bb.hi.y - bb.lo.y), bb.lo.z + U(g) * (bb.hi.z - bb.lo.z)};
      if (!s.omega.contains(x) || !s.omega.contains(y) || s.inclusion.clip_segment(x, y)) continue;
      double e = std::abs(distance(s, x, y) - dist(x, y));
      if (e <= 1e-10) ++straight;
      if (e > worst_excess) {
        worst_excess = e;
        worst_pair = {x, y};
      }
      out_err = std::max(out_err, e);
      ++i;
    }
    r.detail = {{"inside_max_abs_err", in_err}, {"missing_max_abs_err", out_err}, {"missing_pairs_straight", straight},
                {"tol", 1e-10}};
    return in_err <= 1e-10 && out_err <= 1e-10;
  });
  // a missing segment can still lose to a detour through the cheaper inclusion; check the worst pair on the lattice
  if (!res.passed && worst_excess > 1e-10 && res.detail.value("inside_max_abs_err", 1.0) <= 1e-10) {
    auto [x, y] = worst_pair;
    double lat = lattice_oracle_distance(s, x, y);
    res.detail["worst_pair"] = {{"x", {x.x, x.y, x.z}}, {"y", {y.x, y.y, y.z}}, {"euclidean", dist(x, y)},
                                {"analytic", distance(s, x, y)}, {"lattice", lat}};
    if (lat < dist(x, y) - 1e-3)
      res.disputed = "a pair whose segment misses the inclusion has a shorter detour through it (lattice oracle agrees)";
  }
  return res;
}

inline Result oracle_equivalence(uint64_t seed) {
  return detail::timed(2, "lattice oracle equivalence", 120.0, [&](Result& r) {
    std::mt19937_64 g(seed);
    double worst = 0;
    int n = 0;
    json per = json::array();
    for (double b : {0.3, 0.6, 0.9}) {
      Scene s = make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0.05, 0.0, -0.05}, 0.5), b);
      int count = b == 0.9 ? 16 : 17;
      double w = 0;
      for (int i = 0; i < count; ++i, ++n) {
        Vec3 x = detail::in_ball(g, {0, 0, 0}, 1), y = detail::in_ball(g, {0, 0, 0}, 1);
        double d = distance(s, x, y), l = lattice_oracle_distance(s, x, y);
        w = std::max(w, std::abs(l - d) / d);
      }
      per.push_back({{"b", b}, {"worst_rel_err", w}});
      worst = std::max(worst, w);
    }
    r.detail = {{"pairs", n}, {"worst_rel_err", worst}, {"tol", 0.02}, {"per_scene", per}, {"h", 1.0 / 64}};
    return worst <= 0.02 && n == 50;
  });
}

inline Result pseudometric_identities(const Scene& s, const SingularityData& sing) {
  return detail::timed(3, "pseudometric identities", 10.0, [&](Result& r) {
    if (sing.k() < 1) fail(ErrorCode::InvalidSingularities, "needs at least one pair");
    Medium m = medium(s, s.inclusion);
    const Vec3 p = sing.positives[0], n = sing.negatives[0];
    Geodesic gd = geodesic(m, p, n);
    const double d = gd.weighted_length, b2 = s.b * s.b;
    // sample points on the geodesic: inside the inclusion, outside it, and at a crossing
    std::optional<Vec3> inside, outside, crossing;
    for (size_t i = 0; i + 1 < gd.vertices.size(); ++i) {
      Vec3 mid = lerp(gd.vertices[i], gd.vertices[i + 1], 0.5);
      if (gd.phases[i] == Phase::Inside && !inside) inside = mid;
      if (gd.phases[i] == Phase::Outside && !outside) outside = mid;
      if (i > 0 && std::abs(s.inclusion.signed_distance(gd.vertices[i])) < 1e-9 && !crossing) crossing = gd.vertices[i];
    }
    // off the link: shift the midpoint of the curve sideways
    Vec3 axis = normalized(n - p), side = any_orthogonal(axis);
    Vec3 off = lerp(p, n, 0.5) + 0.55 * side;
    json rows = json::array();
    bool ok = true;
    for (double rad : {1e-2, 5e-3}) {
      auto check = [&](const char* name, const std::optional<Vec3>& c, double expected) {
        if (!c) return;
        double v = pseudo_distance(m, *c, rad, p, n).value;
        double err = std::abs(v - expected);
        ok &= err <= 1e-6;
        rows.push_back({{"case", name}, {"r", rad}, {"value", v}, {"expected", expected}, {"abs_err", err}});
      };
      check("on_link_interior_inside", inside, d - 2 * b2 * rad);
      check("on_link_interior_outside", outside, d - 2 * rad);
      check("on_link_boundary", crossing, d - (1 + b2) * rad);
      check("off_link", off, d);
    }
    r.detail = {{"d", d}, {"rows", rows}, {"tol", 1e-6}};
    return ok && rows.size() >= 6;
  });
}

inline Result assignment_duality(uint64_t seed) {
  return detail::timed(4, "assignment and duality", 30.0, [&](Result& r) {
    std::mt19937_64 g(seed);
    double worst_cost = 0, worst_gap = 0, worst_lip = -1e300;
    for (int t = 0; t < 100; ++t) {
      const size_t k = 1 + t % 7;
      std::vector<Vec3> pts;
      for (size_t i = 0; i < 2 * k; ++i) pts.push_back(detail::in_ball(g, {0, 0, 0}, 1));
      Matrix full(2 * k, std::vector<double>(2 * k));
      for (size_t a = 0; a < 2 * k; ++a)
        for (size_t b = 0; b < 2 * k; ++b) full[a][b] = dist(pts[a], pts[b]);
      Matrix d(k, std::vector<double>(k));
      for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) d[i][j] = full[i][k + j];
      auto conn = minimal_connection(d);
      std::vector<int> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double c = 0;
        for (size_t i = 0; i < k; ++i) c += d[i][perm[i]];
        best = std::min(best, c);
      } while (std::next_permutation(perm.begin(), perm.end()));
      worst_cost = std::max(worst_cost, std::abs(conn.length - best));
      auto xi = dual_potential(full, conn);
      worst_gap = std::max(worst_gap, std::abs(xi.gap - conn.length));
      for (size_t a = 0; a < 2 * k; ++a)
        for (size_t b = 0; b < 2 * k; ++b) worst_lip = std::max(worst_lip, xi.values[a] - xi.values[b] - full[a][b]);
    }
    r.detail = {{"instances", 100}, {"max_cost_err", worst_cost}, {"max_gap", worst_gap}, {"max_lipschitz_excess", worst_lip}};
    return worst_cost <= 1e-9 && worst_gap <= 1e-9 && worst_lip <= 1e-9;
  });
}

inline json certificate_json(const FieldCertificate& c) {
  return {{"gap", c.gap},       {"length", c.length},         {"target", c.target},
          {"delta", c.delta},   {"delta_prime", c.delta_prime}, {"t", c.t},
          {"beta", c.beta},     {"lipschitz_slack", c.lipschitz_metric_slack},
          {"edge_excess", c.edge_excess}, {"constant_on_K", c.constant_on_K}, {"passed", c.passed}};
}

inline Result structure_certificates(double h, double eta, uint64_t seed, std::vector<ScalarFieldGrid>* fields = nullptr) {
  return detail::timed(5, "structure function certificates", 300.0, [&](Result& r) {
    StructureOptions o;
    o.h = h;
    o.certify.seed = seed;
    bool ok = true;
    json rows = json::array();
    auto judge = [&](const std::string& name, ScalarFieldGrid f, std::optional<double> expected_length) {
      const auto& c = f.certificate;
      bool good = c.lipschitz_metric_slack <= 2 * h && c.gap >= c.length - eta && c.passed;
      if (expected_length) good &= c.constant_on_K && std::abs(c.length - *expected_length) <= 1e-6;
      ok &= good;
      json j = certificate_json(c);
      j["case"] = name;
      rows.push_back(j);
      if (fields) fields->push_back(std::move(f));
    };
    Scene s = concentric_scene();
    judge("symmetric", structure_function(s, poles(), eta, o), std::nullopt);
    Scene c = curved_scene();
    judge("two_pairs", structure_function(c, validate_singularities(c, curved_pairs()), eta, o), std::nullopt);
    const double kr = 0.05, L = 1.25, b2 = 0.25;
    judge("K_off_link", structure_function_constant_on_K(s, poles(), {0.6, 0.55, 0}, kr, eta, o), L);
    judge("K_on_link_interior", structure_function_constant_on_K(s, poles(), {0, 0, 0.1}, kr, eta, o), L - 2 * b2 * kr);
    judge("K_on_link_boundary", structure_function_constant_on_K(s, poles(), {0, 0, 0.5}, kr, eta, o), L - (1 + b2) * kr);
    r.detail = {{"h", h}, {"eta", eta}, {"cases", rows}};
    return ok;
  });
}

inline Result coarea_bound(const std::vector<ScalarFieldGrid>& fields) {
  return detail::timed(6, "coarea inner bound", 5.0, [&](Result& r) {
    bool ok = !fields.empty();
    json rows = json::array();
    for (const auto& f : fields)
      for (double rho : {0.1, 0.01}) {
        auto c = coarea_degree_bound(f, rho, f.certificate.eta);
        ok &= c.holds;
        rows.push_back({{"rho", rho}, {"integral", c.integral}, {"rhs", c.rhs}, {"holds", c.holds}, {"chain_holds", c.chain_holds}});
      }
    r.detail = {{"fields", fields.size()}, {"rows", rows}};
    return ok;
  });
}

inline Result radial_profile(double r0, double b) {
  return detail::timed(7, "radial profile", 60.0, [&](Result& r) {
    const double target = heteroclinic_cost_oracle(b) * 4 * kPi * r0 * r0;
    bool ok = true;
    json rows = json::array();
    for (double eps : {4e-3, 2e-3, 1e-3}) {
      auto p = solve_radial(r0, b, eps);
      bool range = true, mono = true;
      for (size_t i = 0; i < p.U.size(); ++i) {
        range &= p.U[i] >= b && p.U[i] <= 1;
        if (i) mono &= p.U[i] >= p.U[i - 1] - 1e-12;
      }
      double rel = std::abs(eps * p.energy - target) / target;
      bool fit = p.has_fit && p.fit.gamma > 0 && p.fit.r2 > 0.99;
      ok &= range && mono && p.U.back() == 1.0 && rel <= 0.1 && fit;
      rows.push_back({{"eps", eps}, {"eps_energy", eps * p.energy}, {"rel_err", rel}, {"range", range},
                      {"monotone", mono}, {"gamma", p.fit.gamma}, {"r2", p.fit.r2}, {"C", p.fit.C}});
    }
    r.detail = {{"target", target}, {"rows", rows}};
    return ok;
  });
}

inline Result decoupling(double r0, double b) {
  return detail::timed(8, "decoupling identity", 180.0, [&](Result& r) {
    Scene s = make_scene(ConvexBody::ball({0, 0, 0}, 1), ConvexBody::ball({0, 0, 0}, r0), b);
    auto p = solve_radial(r0, b, 0.05);
    bool ok = true;
    json rows = json::array();
    const std::vector<double> hs{1.0 / 32, 1.0 / 48, 1.0 / 64};
    for (auto [name, f] : {std::pair{"smooth_phase", smooth_phase}, std::pair{"vortex_ring", vortex_ring}}) {
      auto t = decoupling_residual(s, p, f, hs);
      ok &= t.order >= 0.9;
      json res = json::array();
      for (const auto& row : t.rows) res.push_back(row.residual);
      rows.push_back({{"field", name}, {"order", t.order}, {"residuals", res}});
    }
    r.detail = {{"eps", 0.05}, {"h", hs}, {"fields", rows}};
    return ok;
  });
}

inline json slope_json(const SlopeResult& s) {
  json rows = json::array();
  for (const auto& w : s.rows)
    rows.push_back({{"eps", w.epsilon}, {"ln_term", w.energy.tube_log_term}, {"core", w.energy.core_term},
                    {"caps", w.energy.cap_bound}, {"strip", w.energy.strip_correction}, {"total", w.energy.total_upper},
                    {"best_eta", w.best_eta}});
  return {{"slope", s.slope}, {"target", s.target}, {"rel_err", s.rel_err}, {"bounded_offset", s.bounded_offset}, {"rows", rows}};
}

inline Result energy_symmetric(const Scene& s, const SingularityData& sing, double eta = 0.12) {
  return detail::timed(9, "energy law, symmetric", 10.0, [&](Result& r) {
    if (!detail::is_concentric_unit(s) || sing.k() != 1) fail(ErrorCode::InvalidScene, "needs a concentric unit scene with one pair");
    const double r0 = s.inclusion.radius();
    const double d = distance(s, sing.positives[0], sing.negatives[0]);
    const std::vector<double> ladder{1e-2, 1e-3, 1e-4}, etas{0.05, 0.08, 0.12, 0.2};
    auto prof = [&](double e) { return solve_radial(r0, s.b, e); };
    auto ex = asymptotic_slope(s, sing, ladder, eta, StripPolicy::ExactProfile, prof, etas);
    auto a2 = asymptotic_slope(s, sing, ladder, eta, StripPolicy::PinningWithStripBound, nullptr, etas);
    r.detail = {{"metric_distance", d}, {"eta", eta}, {"exact_profile", slope_json(ex)}, {"a2_strip_bound", slope_json(a2)}};
    return std::abs(ex.target - kPi * d) <= 1e-9 && ex.rel_err <= 0.05 && a2.rel_err <= 0.05 && ex.bounded_offset &&
           a2.bounded_offset;
  });
}

inline Result energy_curved(double eta = 0.12) {
  return detail::timed(10, "energy law, curved k=2 link", 60.0, [&](Result& r) {
    Scene s = curved_scene();
    auto sing = validate_singularities(s, curved_pairs());
    auto link = geodesic_link(s, sing);
    bool curved = false;
    for (const auto& c : link.curves) curved |= c.vertices.size() > 2;
    auto sl = asymptotic_slope(s, sing, {1e-2, 1e-3, 1e-4}, eta);
    json strips = json::array();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      auto t = build_tube(s, link, eta, eps);
      for (size_t i = 0; i < t.strips.size(); ++i)
        strips.push_back({{"eps", eps}, {"curve", i}, {"crossings", t.strips[i].crossings}, {"measured_C", t.strips[i].measured_C}});
    }
    r.detail = {{"L", link.connection.length}, {"curved", curved}, {"slope", slope_json(sl)}, {"strip", strips}};
    return curved && sl.rel_err <= 0.05;
  });
}

inline Result dumbbell_check(const Scene& s, uint64_t seed) {
  return detail::timed(11, "dumbbell", 5.0, [&](Result& r) {
    if (!detail::is_concentric_unit(s)) fail(ErrorCode::InvalidScene, "needs a concentric unit scene");
    auto p = solve_radial(s.inclusion.radius(), s.b, 1e-2);
    const Vec3 M{0.1, 0.4, 0.2};
    auto d = dumbbell(s, &p, M);
    double diff = d(d.p()) - d(d.n());
    double q = detail::gauss_legendre([&](double t) { double u = p.eval(std::abs(t)); return u * u; }, -1, 1, 20000);
    double rz = d.zero_radius();
    std::mt19937_64 g(seed);
    bool zero = rz > 0;
    for (int i = 0; i < 200 && zero; ++i) zero &= d(detail::in_ball(g, M, 0.999 * rz)) == 0.0;
    double min_radius = 1e300;
    for (int i = 1; i < 50; ++i) {
      min_radius = std::min(min_radius, d.level_radius(i / 50.0 * d.xi0(1)));
      min_radius = std::min(min_radius, d.level_radius(i / 50.0 * d.xi0(-1)));
    }
    r.detail = {{"difference", diff}, {"axis_quadrature", q}, {"abs_err", std::abs(diff - q)},
                {"zero_radius", rz}, {"min_level_radius", min_radius}};
    return std::abs(diff - q) <= 1e-6 && zero && min_radius >= 1.0;
  });
}

//! All eleven criteria on the built-in scenes.
inline std::vector<Result> run_all(uint64_t seed, double structure_h = 1.0 / 64) {
  std::vector<Result> out;
  Scene s = concentric_scene();
  out.push_back(metric_exactness(s, seed));
  out.push_back(oracle_equivalence(seed));
  out.push_back(pseudometric_identities(s, poles()));
  out.push_back(assignment_duality(seed));
  std::vector<ScalarFieldGrid> fields;
  out.push_back(structure_certificates(structure_h, 0.05, seed, &fields));
  out.push_back(coarea_bound(fields));
  out.push_back(radial_profile(0.5, 0.5));
  out.push_back(decoupling(0.5, 0.5));
  out.push_back(energy_symmetric(s, poles()));
  out.push_back(energy_curved());
  out.push_back(dumbbell_check(s, seed));
  return out;
}

//! Criteria that depend only on a concentric single-pair scene (the symmetric ladder).
inline std::vector<Result> run_symmetric(const Scene& s, const SingularityData& sing, uint64_t seed) {
  if (!detail::is_concentric_unit(s) || sing.k() != 1)
    fail(ErrorCode::InvalidScene, "the symmetric suite needs a concentric unit scene with one pair");
  std::vector<Result> out;
  out.push_back(metric_exactness(s, seed));
  out.push_back(pseudometric_identities(s, sing));
  out.push_back(radial_profile(s.inclusion.radius(), s.b));
  out.push_back(energy_symmetric(s, sing));
  out.push_back(dumbbell_check(s, seed));
  return out;
}

inline std::string line(const Result& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %2d %-34s %8.2f s (limit %g s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds, r.limit);
  std::string s = std::string(buf) + (r.note.empty() ? "" : "  [" + r.note + "]");
  if (!r.passed && !r.disputed.empty()) s += "  (disputed: " + r.disputed + ")";
  return s;
}

inline json to_json(const Result& r) {
  // wall time stays out of artifacts so they are reproducible
  return {{"id", r.id},         {"name", r.name},     {"passed", r.passed}, {"within_time_limit", r.seconds <= r.limit},
          {"limit_seconds", r.limit}, {"detail", r.detail}, {"note", r.note}, {"disputed", r.disputed}};
}

}  // namespace glpin::acceptance
