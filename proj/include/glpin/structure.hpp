#pragma once

#include <map>
#include <optional>
#include <random>

#include "connection.hpp"
#include "grid.hpp"
#include "profile.hpp"

namespace glpin {

struct FieldCertificate {
  double lipschitz_metric_slack = 0;  //!< max |xi(x) - xi(y)| - d_{alpha_delta}(x, y) over sampled node pairs
  int lipschitz_pairs = 0;
  double edge_excess = 0;  //!< max over axis edges of |dxi| - (1 - beta) long_{alpha_delta}(edge)
  double gap = 0;
  double length = 0;       //!< L(C, d_{a^2}), or L(C, d^K_{a^2}) for the compact variant
  double target = 0;       //!< length - eta
  double eta = 0, delta = 0, delta_prime = 0, t = 0, beta = 0;
  bool constant_on_K = false;
  double K_value = 0;
  int K_nodes = 0;
  bool passed = false;
};

struct ScalarFieldGrid {
  GridSpec grid;
  std::vector<double> values;
  FieldCertificate certificate;
  std::vector<double> singular_values;  //!< xi at the positives then the negatives

  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
};

//! Evaluator xi_1(x) = max_i { xi_0(p_i) - d(x, p_i) }, optionally with the K-pseudometric.
class PotentialExtension {
 public:
  PotentialExtension(const Scene& s, const SingularityData& sing, std::vector<double> xi0_positive, double delta_prime,
                     std::optional<std::pair<Vec3, double>> K = std::nullopt)
      : body_(s.inclusion.dilated(delta_prime)), m_(medium(s, body_)), p_(sing.positives),
        xi0_(std::move(xi0_positive)), K_(K) {
    m_.body = &body_;
    if (K_)
      for (const auto& p : p_) pK_.push_back(distance_to_set(m_, p, K_->first, K_->second).value);
  }
  PotentialExtension(const PotentialExtension& o)
      : body_(o.body_), m_(o.m_), p_(o.p_), xi0_(o.xi0_), K_(o.K_), pK_(o.pK_) {
    m_.body = &body_;
  }

  double d(const Vec3& x, size_t i) const {
    double v = distance(m_, x, p_[i]);
    if (K_) v = std::min(v, xK(x) + pK_[i]);
    return v;
  }
  double xK(const Vec3& x) const { return distance_to_set(m_, x, K_->first, K_->second).value; }

  double operator()(const Vec3& x) const {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> v(p_.size());
    for (size_t i = 0; i < p_.size(); ++i) v[i] = distance(m_, x, p_[i]);
    if (K_) {
      // d(x, K) >= d(x, c) - r since weights are at most 1: skip the set distance when the K route cannot win
      auto route_can_win = [&](double lower) {
        bool any = false;
        for (size_t i = 0; i < p_.size(); ++i) any |= lower + pK_[i] < v[i];
        return any;
      };
      bool needed = route_can_win(m_.w * std::max(0.0, dist(x, K_->first) - K_->second)) &&
                    route_can_win(distance(m_, x, K_->first) - K_->second);
      if (needed) {
        double dk = xK(x);
        for (size_t i = 0; i < p_.size(); ++i) v[i] = std::min(v[i], dk + pK_[i]);
      }
    }
    for (size_t i = 0; i < p_.size(); ++i) best = std::max(best, xi0_[i] - v[i]);
    return best;
  }
  const Medium& medium_ref() const { return m_; }

 private:
  ConvexBody body_;
  Medium m_;
  std::vector<Vec3> p_;
  std::vector<double> xi0_;
  std::optional<std::pair<Vec3, double>> K_;
  std::vector<double> pK_;
};

//! xi_1 from a feasible potential on C; raises InfeasiblePotential when xi0 violates the Lipschitz bound for d_{alpha'}.
inline PotentialExtension extend_potential(const Scene& s, const SingularityData& sing, const DualPotential& xi0,
                                           double delta_prime,
                                           std::optional<std::pair<Vec3, double>> K = std::nullopt) {
  const size_t k = sing.k();
  if (xi0.values.size() != 2 * k) fail(ErrorCode::ShapeMismatch, "potential size does not match the singularities");
  PotentialExtension ext(s, sing, std::vector<double>(xi0.values.begin(), xi0.values.begin() + k), delta_prime, K);
  auto pts = sing.all();
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = 0; b < pts.size(); ++b) {
      if (a == b) continue;
      double dab = distance(ext.medium_ref(), pts[a], pts[b]);
      if (K) {
        double ka = distance_to_set(ext.medium_ref(), pts[a], K->first, K->second).value;
        double kb = distance_to_set(ext.medium_ref(), pts[b], K->first, K->second).value;
        dab = std::min(dab, ka + kb);
      }
      if (xi0.values[a] - xi0.values[b] > dab + 1e-9) fail(ErrorCode::InfeasiblePotential, "potential is not 1-Lipschitz on C");
    }
  return ext;
}

namespace detail {

//! Axis shared by all centers (within 1e-12), if any.
inline std::optional<std::pair<Vec3, Vec3>> common_axis(const std::vector<Vec3>& pts) {
  if (pts.size() < 2) return std::nullopt;
  Vec3 a = pts[0], e{};
  for (const auto& p : pts)
    if (dist(p, a) > 1e-9) {
      e = normalized(p - a);
      break;
    }
  if (norm(e) == 0) return std::nullopt;
  for (const auto& p : pts)
    if (norm(cross(p - a, e)) > 1e-12) return std::nullopt;
  return std::make_pair(a, e);
}

}  // namespace detail

//! Samples an evaluator on every node; axisymmetric configurations reuse values per (axial, radial^2) key.
inline std::vector<double> sample_scalar(const GridSpec& g, const std::function<double(const Vec3&)>& f,
                                         std::optional<std::pair<Vec3, Vec3>> axis = std::nullopt) {
  std::vector<double> v(g.size());
  parallel_for(size_t(g.dims[2]), [&](size_t k) {
    std::map<std::pair<int64_t, int64_t>, double> memo;
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        Vec3 x = g.node(i, j, int(k));
        size_t id = g.index(i, j, int(k));
        if (!axis) {
          v[id] = f(x);
          continue;
        }
        Vec3 r = x - axis->first;
        double s = dot(r, axis->second), rho2 = std::max(0.0, norm2(r) - s * s);
        std::pair<int64_t, int64_t> key{std::llround(s * 1e12), std::llround(rho2 * 1e12)};
        auto it = memo.find(key);
        if (it != memo.end()) {
          v[id] = it->second;
        } else {
          v[id] = memo[key] = f(x);
        }
      }
  });
  return v;
}

struct MollifyResult {
  std::vector<double> values;
  bool identity = false;
};

//! Discrete convolution with the normalized quartic bump of radius t, scaled by (1 - beta).
inline MollifyResult mollify(const GridSpec& g, const std::vector<double>& xi, double t, double beta, double margin) {
  if (t >= margin) fail(ErrorCode::KernelWiderThanMargin, "smoothing radius must stay below the dilation margin");
  if (beta < 0 || beta >= 1) fail(ErrorCode::BadInput, "shrink factor must lie in [0, 1)");
  MollifyResult r;
  r.values.resize(xi.size());
  if (t < g.h) {
    r.identity = true;
    for (size_t i = 0; i < xi.size(); ++i) r.values[i] = (1 - beta) * xi[i];
    return r;
  }
  const int R = static_cast<int>(std::floor(t / g.h));
  struct W {
    int di, dj, dk;
    double w;
  };
  std::vector<W> ker;
  double sum = 0;
  for (int c = -R; c <= R; ++c)
    for (int b = -R; b <= R; ++b)
      for (int a = -R; a <= R; ++a) {
        double q = (a * a + b * b + c * c) * g.h * g.h / (t * t);
        if (q >= 1) continue;
        double w = (1 - q) * (1 - q);
        ker.push_back({a, b, c, w});
        sum += w;
      }
  for (auto& w : ker) w.w /= sum;
  parallel_for(size_t(g.dims[2]), [&](size_t k) {
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        size_t id = g.index(i, j, int(k));
        bool inside = i >= R && j >= R && int(k) >= R && i + R < g.dims[0] && j + R < g.dims[1] && int(k) + R < g.dims[2];
        if (!inside) {
          r.values[id] = (1 - beta) * xi[id];
          continue;
        }
        double acc = 0;
        for (const auto& w : ker) acc += w.w * xi[g.index(i + w.di, j + w.dj, int(k) + w.dk)];
        r.values[id] = (1 - beta) * acc;
      }
  });
  return r;
}

//! Same convolution evaluated at an arbitrary point (identity branch calls xi1 directly).
inline double mollified_at(const GridSpec& g, const std::vector<double>& xi1, const std::function<double(const Vec3&)>& f,
                           const Vec3& x, double t, double beta) {
  if (t < g.h) return (1 - beta) * f(x);
  int lo[3], hi[3];
  for (int c = 0; c < 3; ++c) {
    lo[c] = std::max(0, static_cast<int>(std::ceil((x[c] - t - g.origin[c]) / g.h)));
    hi[c] = std::min(g.dims[c] - 1, static_cast<int>(std::floor((x[c] + t - g.origin[c]) / g.h)));
  }
  double acc = 0, sum = 0;
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        double q = norm2(g.node(i, j, k) - x) / (t * t);
        if (q >= 1) continue;
        double w = (1 - q) * (1 - q);
        acc += w * xi1[g.index(i, j, k)];
        sum += w;
      }
  return (1 - beta) * acc / sum;
}

struct CertifyOptions {
  int pairs = 500;
  uint64_t seed = 7;
};

//! Metric-Lipschitz check on random node pairs in Omega and the edge-wise gradient bound.
inline void certify_field(const Scene& s, ScalarFieldGrid& f, double delta, double beta, const CertifyOptions& o = {},
                          const std::optional<std::pair<Vec3, double>>& K = std::nullopt) {
  const GridSpec& g = f.grid;
  ConvexBody body = s.inclusion.dilated(delta);
  Medium m = medium(s, body);
  std::vector<std::array<int, 3>> inside;
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i)
        if (s.omega.contains(g.node(i, j, k), 0)) inside.push_back({i, j, k});
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<size_t> pick(0, inside.size() - 1);
  double slack = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < o.pairs; ++t) {
    auto a = inside[pick(rng)], b = inside[pick(rng)];
    Vec3 x = g.node(a[0], a[1], a[2]), y = g.node(b[0], b[1], b[2]);
    double dv = std::abs(f.at(a[0], a[1], a[2]) - f.at(b[0], b[1], b[2]));
    slack = std::max(slack, dv - distance(m, x, y));
  }
  f.certificate.lipschitz_metric_slack = slack;
  f.certificate.lipschitz_pairs = o.pairs;
  std::vector<double> slab(g.dims[2], -std::numeric_limits<double>::infinity());
  std::vector<int> kconst(g.dims[2], 1);
  parallel_for(size_t(g.dims[2]), [&](size_t kk) {
    int k = int(kk);
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        Vec3 x = g.node(i, j, k);
        if (!s.omega.contains(x, 0)) continue;
        const int nb[3][3] = {{i + 1, j, k}, {i, j + 1, k}, {i, j, k + 1}};
        for (const auto& n : nb) {
          if (n[0] >= g.dims[0] || n[1] >= g.dims[1] || n[2] >= g.dims[2]) continue;
          Vec3 y = g.node(n[0], n[1], n[2]);
          if (!s.omega.contains(y, 0)) continue;
          double dv = std::abs(f.at(n[0], n[1], n[2]) - f.at(i, j, k));
          worst = std::max(worst, dv - (1 - beta) * segment_weighted_length(m, x, y));
          if (K && dist(x, K->first) <= K->second && dist(y, K->first) <= K->second && dv != 0) kconst[k] = 0;
        }
      }
    slab[k] = worst;
  });
  f.certificate.edge_excess = *std::max_element(slab.begin(), slab.end());
  if (K) f.certificate.constant_on_K = std::all_of(kconst.begin(), kconst.end(), [](int v) { return v == 1; });
}

struct StructureOptions {
  double h = 1.0 / 64;
  double delta = -1;  //!< negative: auto-tune
  CertifyOptions certify;
  bool use_axis_memo = true;
};

namespace detail {

inline double connection_length(const Medium& m, const SingularityData& sing,
                                const std::optional<std::pair<Vec3, double>>& K = std::nullopt) {
  const size_t k = sing.k();
  Matrix d(k, std::vector<double>(k));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      d[i][j] = K ? pseudo_distance(m, K->first, K->second, sing.positives[i], sing.negatives[j]).value
                  : distance(m, sing.positives[i], sing.negatives[j]);
  return minimal_connection(d).length;
}

//! Largest delta in (0, hi] with pred(delta) true, by bisection.
inline double largest_admissible(const std::function<bool(double)>& pred, double hi, int iters = 40) {
  if (pred(hi)) return hi;
  double lo = 0;
  for (int i = 0; i < iters; ++i) {
    double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

struct PipelineParams {
  double delta, delta_prime, t, beta;
  std::optional<std::pair<Vec3, double>> K1;  //!< pseudometric ball for step 2
  std::optional<std::pair<Vec3, double>> K;   //!< constancy ball
  double K2_radius = 0;
};

inline ScalarFieldGrid run_pipeline(const Scene& s, const SingularityData& sing, const PipelineParams& P,
                                    const StructureOptions& o) {
  const size_t k = sing.k();
  ConvexBody bp = s.inclusion.dilated(P.delta_prime);
  Medium mp = medium(s, bp);
  // step 1: optimal potential on C for d_{alpha'} (or its K1-pseudometric)
  auto pts = sing.all();
  Matrix full(2 * k, std::vector<double>(2 * k, 0));
  std::vector<double> toK(2 * k, 0);
  if (P.K1)
    for (size_t a = 0; a < 2 * k; ++a) toK[a] = distance_to_set(mp, pts[a], P.K1->first, P.K1->second).value;
  for (size_t a = 0; a < 2 * k; ++a)
    for (size_t b = a + 1; b < 2 * k; ++b) {
      double v = distance(mp, pts[a], pts[b]);
      if (P.K1) v = std::min(v, toK[a] + toK[b]);
      full[a][b] = full[b][a] = v;
    }
  Matrix D(k, std::vector<double>(k));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) D[i][j] = full[i][k + j];
  auto conn = minimal_connection(D);
  auto xi0 = dual_potential(full, conn);
  // step 2: extension
  auto ext = extend_potential(s, sing, xi0, P.delta_prime, P.K1);
  ScalarFieldGrid f;
  f.grid = grid_for(s.omega, o.h, 2 * o.h + P.t);
  std::vector<Vec3> centers = pts;
  if (s.inclusion.is_ball()) centers.push_back(s.inclusion.center());
  if (P.K1) centers.push_back(P.K1->first);
  std::optional<std::pair<Vec3, Vec3>> axis;
  if (o.use_axis_memo && s.inclusion.is_ball()) axis = common_axis(centers);
  std::function<double(const Vec3&)> fx = [&](const Vec3& x) { return ext(x); };
  auto xi1 = sample_scalar(f.grid, fx, axis);
  // step 3: mollification
  auto mol = mollify(f.grid, xi1, P.t, P.beta, P.delta_prime - P.delta);
  f.values = std::move(mol.values);
  f.singular_values.resize(2 * k);
  for (size_t a = 0; a < 2 * k; ++a) f.singular_values[a] = mollified_at(f.grid, xi1, fx, pts[a], P.t, P.beta);
  if (P.K) {
    double acc = 0;
    int n = 0;
    const GridSpec& g = f.grid;
    for (int kk = 0; kk < g.dims[2]; ++kk)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i)
          if (dist(g.node(i, j, kk), P.K->first) <= P.K2_radius) {
            acc += f.at(i, j, kk);
            ++n;
          }
    double c = n ? acc / n : 0;
    int in_K = 0;
    for (int kk = 0; kk < g.dims[2]; ++kk)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i)
          if (dist(g.node(i, j, kk), P.K->first) <= P.K->second) {
            f.values[g.index(i, j, kk)] = c;
            ++in_K;
          }
    f.certificate.K_value = c;
    f.certificate.K_nodes = in_K;
  }
  auto& cert = f.certificate;
  cert.gap = 0;
  for (size_t i = 0; i < k; ++i) cert.gap += f.singular_values[i] - f.singular_values[k + i];
  cert.delta = P.delta;
  cert.delta_prime = P.delta_prime;
  cert.t = P.t;
  cert.beta = P.beta;
  return f;
}

inline void finish(const Scene& s, ScalarFieldGrid& f, const StructureOptions& o,
                   const std::optional<std::pair<Vec3, double>>& K) {
  certify_field(s, f, f.certificate.delta, f.certificate.beta, o.certify, K);
  auto& c = f.certificate;
  const double slack_tol = 2 * f.grid.h;
  c.passed = c.lipschitz_metric_slack <= slack_tol && c.edge_excess <= slack_tol && c.gap >= c.target &&
             (!K || c.constant_on_K);
}

}  // namespace detail

//! Steps 1-3 with auto-tuned delta' = 1.5 delta, t = delta/4, beta = delta/8.
inline ScalarFieldGrid structure_function(const Scene& s, const SingularityData& sing, double eta,
                                          const StructureOptions& o = {}) {
  if (!(eta > 0)) fail(ErrorCode::BadInput, "eta must be positive");
  const size_t k = sing.k();
  const double L0 = detail::connection_length(medium(s, s.inclusion), sing);
  auto L_at = [&](double d) {
    ConvexBody b = s.inclusion.dilated(d);
    return detail::connection_length(medium(s, b), sing);
  };
  double delta;
  if (o.delta > 0) {
    delta = o.delta;
    if (L_at(delta) + eta / 2 < L0) fail(ErrorCode::EtaBudgetInfeasible, "delta too large for the eta budget");
  } else {
    double cap = std::min(s.clearance / 2 / 1.5 * (1 - 1e-9), eta / (L0 / 4 + double(k)));
    delta = detail::largest_admissible([&](double d) { return L_at(1.5 * d) + eta / 2 >= L0; }, cap);
  }
  for (int attempt = 0; attempt < 6; ++attempt, delta *= 0.5) {
    detail::PipelineParams P{delta, 1.5 * delta, delta / 4, delta / 8, std::nullopt, std::nullopt, 0};
    if (P.delta_prime >= s.clearance / 2) continue;
    auto f = detail::run_pipeline(s, sing, P, o);
    f.certificate.eta = eta;
    f.certificate.length = L0;
    f.certificate.target = L0 - eta;
    if (f.certificate.gap < f.certificate.target) continue;
    detail::finish(s, f, o, std::nullopt);
    return f;
  }
  fail(ErrorCode::EtaBudgetInfeasible, "could not meet the eta budget by shrinking delta");
}

//! Compact variant: constant on K = ball(kc, kr); pseudometric ball K1 = ball(kc, kr + 2 delta), delta' = 2 delta.
inline ScalarFieldGrid structure_function_constant_on_K(const Scene& s, const SingularityData& sing, const Vec3& kc,
                                                        double kr, double eta, const StructureOptions& o = {}) {
  check_K(sing, kc, kr);
  GridSpec g = grid_for(s.omega, o.h);
  for (int c = 0; c < 3; ++c)
    if (kc[c] - 2 * kr < g.origin[c] || kc[c] + 2 * kr > g.origin[c] + (g.dims[c] - 1) * g.h)
      fail(ErrorCode::BadInput, "the doubled ball must lie inside the grid box");
  const double LK = detail::connection_length(medium(s, s.inclusion), sing, std::make_pair(kc, kr));
  auto L_at = [&](double d) {
    ConvexBody b = s.inclusion.dilated(2 * d);
    return detail::connection_length(medium(s, b), sing, std::make_pair(kc, kr + 2 * d));
  };
  double margin = kr;
  for (const auto& p : sing.all()) margin = std::min(margin, dist(p, kc) - kr);
  double cap = std::min({s.clearance / 4 * (1 - 1e-9), eta / (LK / 4 + double(sing.k())), margin / 3});
  double delta = o.delta > 0 ? o.delta : detail::largest_admissible([&](double d) { return L_at(d) + eta / 2 >= LK; }, cap);
  for (int attempt = 0; attempt < 6; ++attempt, delta *= 0.5) {
    detail::PipelineParams P{delta, 2 * delta, delta / 4, delta / 8, std::make_pair(kc, kr + 2 * delta),
                             std::make_pair(kc, kr), kr + delta};
    if (P.delta_prime >= s.clearance / 2) continue;
    auto f = detail::run_pipeline(s, sing, P, o);
    f.certificate.eta = eta;
    f.certificate.length = LK;
    f.certificate.target = LK - eta;
    if (f.certificate.gap < f.certificate.target) continue;
    detail::finish(s, f, o, P.K);
    return f;
  }
  fail(ErrorCode::EtaBudgetInfeasible, "could not meet the eta budget by shrinking delta");
}

//! Worst edge-wise excess of |dxi| over the integral of min(a^2, U^2 + eps^4), relative to h (concentric scenes).
inline double profile_bound_excess(const Scene& s, const ScalarFieldGrid& f, const RadialProfile& p) {
  const GridSpec& g = f.grid;
  const Vec3 c = s.omega.center();
  const double e4 = std::pow(p.epsilon, 4);
  auto w = [&](const Vec3& x) {
    double a2 = pinning(s, x);
    a2 *= a2;
    double U = p.eval(dist(x, c));
    return std::min(a2, U * U + e4);
  };
  std::vector<double> slab(g.dims[2], -std::numeric_limits<double>::infinity());
  parallel_for(size_t(g.dims[2]), [&](size_t kk) {
    int k = int(kk);
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        Vec3 x = g.node(i, j, k);
        if (!s.omega.contains(x, 0)) continue;
        const int nb[3][3] = {{i + 1, j, k}, {i, j + 1, k}, {i, j, k + 1}};
        for (const auto& n : nb) {
          if (n[0] >= g.dims[0] || n[1] >= g.dims[1] || n[2] >= g.dims[2]) continue;
          Vec3 y = g.node(n[0], n[1], n[2]);
          if (!s.omega.contains(y, 0)) continue;
          // 16-point midpoint rule along the edge
          double integral = 0;
          for (int q = 0; q < 16; ++q) integral += w(lerp(x, y, (q + 0.5) / 16));
          integral *= g.h / 16;
          double dv = std::abs(f.values[g.index(n[0], n[1], n[2])] - f.values[g.index(i, j, k)]);
          slab[k] = std::max(slab[k], (dv - integral) / g.h);
        }
      }
  });
  return *std::max_element(slab.begin(), slab.end());
}

// ---------------------------------------------------------------- dumbbell

class DumbbellFunction {
 public:
  //! profile == nullptr means U = 1.
  DumbbellFunction(const Scene& s, const RadialProfile* profile, const Vec3& M) : profile_(profile) {
    if (!s.omega.is_ball() || std::abs(s.omega.radius() - 1) > 1e-12 || norm(s.omega.center()) > 1e-12)
      fail(ErrorCode::InvalidScene, "the dumbbell construction needs Omega = unit ball at the origin");
    if (!s.inclusion.is_ball() || norm(s.inclusion.center()) > 1e-12)
      fail(ErrorCode::InvalidScene, "the dumbbell construction needs a concentric inclusion");
    p_ = {1, 0, 0};
    n_ = {-1, 0, 0};
    double rho = std::hypot(M.y, M.z);
    if (rho < 1e-12 && std::abs(M.x) <= 1) fail(ErrorCode::MOnAxis, "M lies on the segment [p, n]");
    M_ = M;
    x0_ = std::clamp(M.x, -1 + 1e-9, 1 - 1e-9);
    // cumulative integral of U^2(|t|) on breakpoints of the profile mesh (exact for piecewise linear U)
    std::vector<double> br{-1, 1, x0_};
    if (profile_)
      for (double r : profile_->r)
        if (r > 0 && r < 1) {
          br.push_back(r);
          br.push_back(-r);
        }
    br.push_back(0);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    s_ = br;
    F_.assign(s_.size(), 0);
    for (size_t i = 1; i < s_.size(); ++i) F_[i] = F_[i - 1] + segment_integral(s_[i - 1], s_[i]);
    double at_x0 = value_from_table(x0_);
    for (auto& v : F_) v -= at_x0;
  }

  double U2(double t) const {
    double u = profile_ ? profile_->eval(std::abs(t)) : 1.0;
    return u * u;
  }
  //! xi_0(s) = int_{x0}^{s} U^2(|t|) dt.
  double xi0(double s) const { return value_from_table(std::clamp(s, -1.0, 1.0)); }
  double x0() const { return x0_; }
  const Vec3& p() const { return p_; }
  const Vec3& n() const { return n_; }

  double operator()(const Vec3& x) const {
    double rp = dist(x, 2 * p_), rn = dist(x, 2 * n_);
    if (rp <= 1) return xi0(1);
    if (rp < 2 - x0_) return xi0(2 - rp);
    if (rn <= 1) return xi0(-1);
    if (rn < 2 + x0_) return xi0(rn - 2);
    return 0;
  }
  //! Radius of the ball around M where xi vanishes.
  double zero_radius() const { return std::min(dist(M_, 2 * p_) - (2 - x0_), dist(M_, 2 * n_) - (2 + x0_)); }
  //! Radius of the level sphere {xi = t} (about 2p for t > 0, about 2n for t < 0).
  double level_radius(double t) const {
    if (t == 0 || t >= xi0(1) || t <= xi0(-1)) fail(ErrorCode::BadInput, "not a regular value");
    double lo = t > 0 ? x0_ : -1, hi = t > 0 ? 1 : x0_;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      double m = 0.5 * (lo + hi);
      (xi0(m) < t ? lo : hi) = m;
    }
    double s = 0.5 * (lo + hi);
    return t > 0 ? 2 - s : s + 2;
  }

 private:
  double segment_integral(double a, double b) const {
    // Simpson is exact for the quadratic U^2 on each linear piece of U
    double m = 0.5 * (a + b);
    return (b - a) / 6 * (U2(a) + 4 * U2(m) + U2(b));
  }
  double value_from_table(double s) const {
    size_t i = std::upper_bound(s_.begin(), s_.end(), s) - s_.begin();
    if (i == 0) return F_.front();
    if (i >= s_.size()) return F_.back();
    return F_[i - 1] + segment_integral(s_[i - 1], s);
  }

  const RadialProfile* profile_;
  Vec3 p_, n_, M_;
  double x0_ = 0;
  std::vector<double> s_, F_;
};

inline DumbbellFunction dumbbell(const Scene& s, const RadialProfile* profile, const Vec3& M) {
  return DumbbellFunction(s, profile, M);
}

// ---------------------------------------------------------------- coarea

struct CoareaBound {
  double integral = 0;        //!< int_m^inf S(t) dt
  double sum_differences = 0; //!< sum xi(p_i) - xi(n_i)
  double rhs = 0;             //!< sum_differences - 2 k rho
  bool holds = false;
  double chain_lower = 0;     //!< integral - k (8k + 1) eta
  double final_bound = 0;     //!< L - (8k^2 + 3k + 1) eta
  bool chain_holds = false;
};

//! Exact integral of the piecewise-constant S(t) from the lowest breakpoint.
inline CoareaBound coarea_degree_bound(const std::vector<double>& xi_pos, const std::vector<double>& xi_neg, double rho,
                                       double eta, double L) {
  if (xi_pos.size() != xi_neg.size() || xi_pos.empty()) fail(ErrorCode::ShapeMismatch, "need k positive and k negative values");
  if (!(rho > 0)) fail(ErrorCode::BadInput, "rho must be positive");
  const size_t k = xi_pos.size();
  std::vector<std::pair<long double, int>> ev;  // breakpoint, jump of S when t crosses it from the left
  for (size_t i = 0; i < k; ++i) {
    ev.push_back({(long double)xi_pos[i] - rho, -1});
    ev.push_back({(long double)xi_neg[i] + rho, +1});
  }
  std::sort(ev.begin(), ev.end());
  // below the lowest breakpoint every indicator is 1, so S = 0
  long double integral = 0;
  int S = 0;
  for (size_t e = 0; e < ev.size(); ++e) {
    if (e > 0) integral += S * (ev[e].first - ev[e - 1].first);
    S += ev[e].second;
  }
  CoareaBound r;
  r.integral = double(integral);
  long double sd = 0;
  for (size_t i = 0; i < k; ++i) sd += (long double)xi_pos[i] - xi_neg[i];
  r.sum_differences = double(sd);
  r.rhs = double(sd - 2.0L * k * rho);
  r.holds = integral >= sd - 2.0L * k * rho - 1e-12L * (1 + std::abs(sd));
  r.chain_lower = r.integral - double(k) * (8 * k + 1) * eta;
  r.final_bound = L - (8.0 * k * k + 3.0 * k + 1) * eta;
  r.chain_holds = r.holds && rho <= eta && r.chain_lower >= r.final_bound - 1e-12;
  return r;
}

inline CoareaBound coarea_degree_bound(const ScalarFieldGrid& f, double rho, double eta) {
  const size_t k = f.singular_values.size() / 2;
  std::vector<double> p(f.singular_values.begin(), f.singular_values.begin() + k),
      n(f.singular_values.begin() + k, f.singular_values.end());
  return coarea_degree_bound(p, n, rho, eta, f.certificate.length);
}

}  // namespace glpin
