#pragma once

#include <functional>
#include <numeric>
#include <optional>

#include "connection.hpp"
#include "profile.hpp"

namespace glpin {

enum class StripPolicy { ExactProfile, PinningWithStripBound };

inline const char* to_string(StripPolicy p) {
  return p == StripPolicy::ExactProfile ? "exact-profile" : "a2-strip-bound";
}

struct StripReport {
  int crossings = 0;
  double shell_length = 0;         //!< H^1(Gamma and {dist(x, boundary of omega) < sqrt(eps)})
  double inner_shell_length = 0;   //!< part of it inside omega
  double measured_C = 0;           //!< shell_length / sqrt(eps)
};

struct TubeTestFunction {
  GeodesicLink link;
  double eta = 0, epsilon = 0;
  StripPolicy policy = StripPolicy::PinningWithStripBound;
  std::vector<StripReport> strips;  //!< one per curve
  double strip_limit = 8;           //!< allowed shell length per crossing, in units of sqrt(eps)
};

struct EnergyBreakdown {
  double tube_log_term = 0;
  double core_term = 0;
  double cap_bound = 0;
  double strip_correction = 0;
  double total_upper = 0;
  double link_integral = 0;    //!< int over the middle portions of w ds
  double full_integral = 0;    //!< int over the whole curves of w ds
};

namespace detail {

inline double polyline_length(const std::vector<Vec3>& v) {
  double s = 0;
  for (size_t i = 0; i + 1 < v.size(); ++i) s += dist(v[i], v[i + 1]);
  return s;
}

//! Sub-polyline between arclengths a <= b.
inline std::vector<Vec3> polyline_slice(const std::vector<Vec3>& v, double a, double b) {
  std::vector<Vec3> out;
  double s = 0;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    double L = dist(v[i], v[i + 1]);
    double lo = std::max(a, s), hi = std::min(b, s + L);
    if (hi > lo && L > 0) {
      Vec3 p = lerp(v[i], v[i + 1], (lo - s) / L), q = lerp(v[i], v[i + 1], (hi - s) / L);
      if (out.empty() || dist(out.back(), p) > 0) out.push_back(p);
      out.push_back(q);
    }
    s += L;
  }
  return out;
}

//! Length of the part of segment [a, b] inside the shell r1 < |x - c| < r2 (r1 may be <= 0).
inline double shell_length(const Vec3& a, const Vec3& b, const Vec3& c, double r1, double r2) {
  auto inside_len = [&](double r) {
    if (r <= 0) return 0.0;
    auto cl = ConvexBody::ball(c, r).clip_segment(a, b);
    return cl ? (cl->second - cl->first) * dist(a, b) : 0.0;
  };
  return inside_len(r2) - inside_len(r1);
}

//! Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 30) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fm, double fhi, double whole, int d) {
        double m = 0.5 * (lo + hi), l = 0.5 * (lo + m), r = 0.5 * (m + hi);
        double fl = f(l), fr = f(r);
        double left = (m - lo) / 6 * (flo + 4 * fl + fm), right = (hi - m) / 6 * (fm + 4 * fr + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
        return rec(lo, m, flo, fl, fm, left, d - 1) + rec(m, hi, fm, fr, fhi, right, d - 1);
      };
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), depth);
}

}  // namespace detail

//! Validates separation, eps < eta / 10 and the sqrt(eps)-strip condition, then freezes the parameters.
inline TubeTestFunction build_tube(const Scene& s, const GeodesicLink& link, double eta, double eps,
                                   StripPolicy policy = StripPolicy::PinningWithStripBound, double strip_limit = 8) {
  if (!(eps > 0 && eta > 0)) fail(ErrorCode::BadInput, "eta and eps must be positive");
  if (eps >= eta / 10) fail(ErrorCode::BadInput, "need eps < eta / 10");
  if (eta >= s.clearance / 2) fail(ErrorCode::BadInput, "need eta < clearance / 2");
  for (size_t i = 0; i < link.curves.size(); ++i) {
    if (detail::polyline_length(link.curves[i].vertices) <= 2 * eta)
      fail(ErrorCode::BadInput, "curve shorter than its two caps");
    for (size_t j = i + 1; j < link.curves.size(); ++j)
      if (polyline_distance(link.curves[i].vertices, link.curves[j].vertices) < 2 * eta)
        fail(ErrorCode::TubesOverlap, "curves closer than 2 eta");
  }
  TubeTestFunction t{link, eta, eps, policy, {}, strip_limit};
  const double se = std::sqrt(eps);
  for (const auto& g : link.curves) {
    StripReport r;
    const auto& v = g.vertices;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      if (s.inclusion.is_ball()) {
        Vec3 c = s.inclusion.center();
        double R = s.inclusion.radius();
        r.shell_length += detail::shell_length(v[i], v[i + 1], c, R - se, R + se);
        r.inner_shell_length += detail::shell_length(v[i], v[i + 1], c, R - se, R);
      } else {
        // sampled for polytopes
        const int n = 2000;
        double L = dist(v[i], v[i + 1]);
        for (int q = 0; q < n; ++q) {
          Vec3 x = lerp(v[i], v[i + 1], (q + 0.5) / n);
          double sd = s.inclusion.signed_distance(x);
          if (std::abs(sd) < se) {
            r.shell_length += L / n;
            if (sd < 0) r.inner_shell_length += L / n;
          }
        }
      }
    }
    // crossings of the inclusion boundary along the curve
    bool prev = s.inclusion.contains_open(v.front());
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      const int n = 64;
      for (int q = 1; q <= n; ++q) {
        bool cur = s.inclusion.signed_distance(lerp(v[i], v[i + 1], double(q) / n)) < 0;
        if (cur != prev) ++r.crossings;
        prev = cur;
      }
    }
    r.measured_C = r.shell_length / se;
    if (r.shell_length > strip_limit * se * std::max(1, r.crossings))
      fail(ErrorCode::StripConditionFailed, "curve runs along the inclusion boundary");
    t.strips.push_back(r);
  }
  return t;
}

//! Semi-analytic upper bound for F_eps of the tube test function.
inline EnergyBreakdown tube_energy(const Scene& s, const TubeTestFunction& t, const RadialProfile* profile = nullptr) {
  if (t.policy == StripPolicy::ExactProfile) {
    bool concentric = s.omega.is_ball() && s.inclusion.is_ball() &&
                      dist(s.omega.center(), s.inclusion.center()) < 1e-12 && profile &&
                      std::abs(profile->r0 * s.omega.radius() - s.inclusion.radius()) < 1e-12 &&
                      std::abs(profile->epsilon - t.epsilon) <= 1e-15 * t.epsilon && profile->b == s.b;
    if (!concentric) fail(ErrorCode::ProfileUnavailable, "exact-profile policy needs a matching radial profile on a concentric scene");
  }
  const double eps = t.epsilon, eta = t.eta, L = std::log(eta / eps), absl = std::abs(std::log(eps));
  const double b2 = s.b * s.b;
  ConvexBody incl = s.inclusion;
  Medium m = medium(s, incl);
  EnergyBreakdown e;
  double core_w = 0;
  for (size_t ci = 0; ci < t.link.curves.size(); ++ci) {
    const auto& v = t.link.curves[ci].vertices;
    double len = detail::polyline_length(v);
    auto mid = detail::polyline_slice(v, eta, len - eta);
    double w_int = 0, w2_int = 0;
    for (size_t i = 0; i + 1 < mid.size(); ++i) {
      Vec3 a = mid[i], b = mid[i + 1];
      double sl = dist(a, b);
      if (t.policy == StripPolicy::PinningWithStripBound) {
        double wl = segment_weighted_length(m, a, b);
        w_int += wl;
        // w in {b^2, 1}: w^2 integral from the inside length
        double in_len = (sl - wl) / (1 - b2);
        w2_int += in_len * b2 * b2 + (sl - in_len);
      } else {
        const Vec3 c = s.omega.center();
        const double R = s.omega.radius();
        auto U2 = [&](double u) {
          double x = profile->eval(dist(lerp(a, b, u), c) / R);
          return x * x;
        };
        // breakpoints where the segment meets the inclusion boundary
        std::vector<double> br{0, 1};
        if (auto cl = s.inclusion.clip_segment(a, b)) {
          br.push_back(cl->first);
          br.push_back(cl->second);
        }
        std::sort(br.begin(), br.end());
        for (size_t q = 0; q + 1 < br.size(); ++q) {
          if (br[q + 1] - br[q] <= 0) continue;
          w_int += sl * detail::adaptive_simpson(U2, br[q], br[q + 1], 1e-13);
          w2_int += sl * detail::adaptive_simpson([&](double u) { double x = U2(u); return x * x; }, br[q], br[q + 1], 1e-13);
        }
      }
    }
    e.link_integral += w_int;
    e.full_integral += w_int;
    // caps: weight 1 near the boundary of Omega (clearance > eta)
    e.full_integral += 2 * eta;
    core_w += w_int + w2_int / 12;
    e.cap_bound += 2 * kPi * eta * absl + (13 * kPi / 12) * 2 * eta;
    if (t.policy == StripPolicy::PinningWithStripBound)
      e.strip_correction += kPi * L * (1 - b2) * t.strips[ci].inner_shell_length;
  }
  e.tube_log_term = kPi * L * e.link_integral;
  e.core_term = kPi * core_w;
  e.total_upper = e.tube_log_term + e.core_term + e.cap_bound + e.strip_correction;
  return e;
}

struct SlopeRow {
  double epsilon = 0;
  EnergyBreakdown energy;
  double best_eta = 0;  //!< minimizer of total_upper over the reported eta table
};

struct SlopeResult {
  double slope = 0, intercept = 0;
  double target = 0;   //!< pi L(C, d_{a^2})
  double rel_err = 0;
  std::vector<SlopeRow> rows;
  std::vector<double> residuals;
  bool bounded_offset = false;  //!< range of total/|ln eps| - target over the ladder < 2x its first value
};

//! Least-squares slope of total_upper against |ln eps| over a ladder.
inline SlopeResult asymptotic_slope(const Scene& s, const SingularityData& sing, const std::vector<double>& eps_ladder,
                                    double eta, StripPolicy policy = StripPolicy::PinningWithStripBound,
                                    const std::function<RadialProfile(double)>& profile_for = nullptr,
                                    const std::vector<double>& eta_table = {}) {
  if (eps_ladder.size() < 3) fail(ErrorCode::BadInput, "need at least three epsilons");
  auto [lo, hi] = std::minmax_element(eps_ladder.begin(), eps_ladder.end());
  if (*hi / *lo < 100 * (1 - 1e-9)) fail(ErrorCode::BadInput, "ladder must span two decades");
  auto link = geodesic_link(s, sing);
  SlopeResult r;
  r.target = kPi * link.connection.length;
  std::vector<double> xs, ys;
  for (double eps : eps_ladder) {
    SlopeRow row;
    row.epsilon = eps;
    std::optional<RadialProfile> prof;
    if (policy == StripPolicy::ExactProfile) {
      if (!profile_for) fail(ErrorCode::ProfileUnavailable, "no radial profile supplied");
      prof = profile_for(eps);
    }
    auto tube = build_tube(s, link, eta, eps, policy);
    row.energy = tube_energy(s, tube, prof ? &*prof : nullptr);
    double best = row.energy.total_upper;
    row.best_eta = eta;
    for (double et : eta_table) {
      try {
        auto tt = build_tube(s, link, et, eps, policy);
        double v = tube_energy(s, tt, prof ? &*prof : nullptr).total_upper;
        if (v < best) {
          best = v;
          row.best_eta = et;
        }
      } catch (const Error&) {
      }
    }
    xs.push_back(std::abs(std::log(eps)));
    ys.push_back(row.energy.total_upper);
    r.rows.push_back(row);
  }
  const double n = double(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n, my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.rel_err = std::abs(r.slope - r.target) / r.target;
  std::vector<double> q;
  for (size_t i = 0; i < xs.size(); ++i) {
    r.residuals.push_back(ys[i] - (r.intercept + r.slope * xs[i]));
    q.push_back(ys[i] / xs[i] - r.target);
  }
  auto [qlo, qhi] = std::minmax_element(q.begin(), q.end());
  r.bounded_offset = (*qhi - *qlo) < 2 * std::abs(q.front());
  return r;
}

}  // namespace glpin
