#pragma once

#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "metric.hpp"

namespace glpin {

using Matrix = std::vector<std::vector<double>>;

struct Connection {
  std::vector<int> sigma;  //!< positive i is paired with negative sigma[i] (0-based)
  double length = 0;
  std::vector<double> pair_distances;
  std::vector<double> row_duals, col_duals;  //!< u_i + v_j <= D_ij, equality on matched pairs
};

namespace detail {

struct Assignment {
  double cost = 0;
  std::vector<int> col_of_row;
  std::vector<double> u, v;
};

//! O(n^3) shortest augmenting path assignment with potentials.
inline Assignment hungarian(const Matrix& a) {
  const int n = static_cast<int>(a.size());
  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      double delta = INF;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
          if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
          if (minv[j] < delta) { delta = minv[j]; j1 = j; }
        }
      for (int j = 0; j <= n; ++j)
        if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
        else minv[j] -= delta;
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Assignment r;
  r.col_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) r.col_of_row[p[j] - 1] = j - 1;
  r.cost = 0;
  for (int i = 0; i < n; ++i) r.cost += a[i][r.col_of_row[i]];
  r.u.assign(u.begin() + 1, u.end());
  r.v.assign(v.begin() + 1, v.end());
  return r;
}

inline double sub_cost(const Matrix& a, const std::vector<char>& row_used, const std::vector<char>& col_used) {
  std::vector<int> rows, cols;
  for (size_t i = 0; i < a.size(); ++i)
    if (!row_used[i]) rows.push_back(int(i));
  for (size_t j = 0; j < a.size(); ++j)
    if (!col_used[j]) cols.push_back(int(j));
  if (rows.empty()) return 0;
  Matrix s(rows.size(), std::vector<double>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) s[i][j] = a[rows[i]][cols[j]];
  return hungarian(s).cost;
}

inline void check_matrix(const Matrix& d) {
  if (d.empty()) fail(ErrorCode::NonSquare, "empty distance matrix");
  for (const auto& r : d) {
    if (r.size() != d.size()) fail(ErrorCode::NonSquare, "distance matrix must be square");
    for (double x : r) {
      if (!std::isfinite(x)) fail(ErrorCode::BadInput, "distance matrix has non-finite entries");
      if (x < 0) fail(ErrorCode::NegativeEntry, "distance matrix has negative entries");
    }
  }
}

}  // namespace detail

//! Optimal pairing with the lexicographically smallest optimal permutation.
inline Connection minimal_connection(const Matrix& d) {
  detail::check_matrix(d);
  const size_t k = d.size();
  auto base = detail::hungarian(d);
  const double tol = 1e-12 * (1 + std::abs(base.cost));
  Connection c;
  c.sigma.assign(k, -1);
  std::vector<char> ru(k, 0), cu(k, 0);
  double fixed = 0;
  for (size_t i = 0; i < k; ++i) {
    ru[i] = 1;
    for (size_t j = 0; j < k; ++j) {
      if (cu[j]) continue;
      cu[j] = 1;
      double total = fixed + d[i][j] + detail::sub_cost(d, ru, cu);
      if (total <= base.cost + tol) {
        c.sigma[i] = int(j);
        fixed += d[i][j];
        break;
      }
      cu[j] = 0;
    }
    if (c.sigma[i] < 0) {  // rounding fallback
      c.sigma = base.col_of_row;
      break;
    }
  }
  c.pair_distances.resize(k);
  c.length = 0;
  for (size_t i = 0; i < k; ++i) {
    c.pair_distances[i] = d[i][c.sigma[i]];
    c.length += c.pair_distances[i];
  }
  c.row_duals = base.u;
  c.col_duals = base.v;
  return c;
}

//! Cost of the best permutation different from conn.sigma (infinity for k = 1).
inline double second_best_cost(const Matrix& d, const Connection& conn) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < d.size() && d.size() > 1; ++i) {
    Matrix m = d;
    m[i][conn.sigma[i]] = 1e300;
    auto a = detail::hungarian(m);
    if (a.cost < 1e299) best = std::min(best, a.cost);
  }
  return best;
}

struct DualPotential {
  std::vector<double> values;  //!< positives then negatives
  double gap = 0;
  double min_slack = 0;  //!< min over ordered pairs of d(a,b) - (xi(a) - xi(b))
};

//! Metric closure on the 2k points from a k x k positive-to-negative matrix.
inline Matrix bipartite_closure(const Matrix& d) {
  const size_t k = d.size(), n = 2 * k;
  const double INF = std::numeric_limits<double>::infinity();
  Matrix f(n, std::vector<double>(n, INF));
  for (size_t i = 0; i < n; ++i) f[i][i] = 0;
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) f[i][k + j] = f[k + j][i] = d[i][j];
  for (size_t m = 0; m < n; ++m)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) f[i][j] = std::min(f[i][j], f[i][m] + f[m][j]);
  return f;
}

//! Potential from the assignment duals, tightened by Bellman-Ford on all 2k x 2k constraints.
inline DualPotential dual_potential(const Matrix& full, const Connection& conn) {
  const size_t k = conn.sigma.size(), n = 2 * k;
  if (full.size() != n) fail(ErrorCode::ShapeMismatch, "potential needs the 2k x 2k distance matrix");
  std::vector<double> x(n);
  for (size_t i = 0; i < k; ++i) {
    x[i] = conn.row_duals.size() == k ? conn.row_duals[i] : 0;
    x[k + i] = conn.col_duals.size() == k ? -conn.col_duals[i] : 0;
  }
  // constraints x_a - x_b <= c(a,b): edge b -> a
  struct E {
    size_t from, to;
    double w;
  };
  std::vector<E> edges;
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      if (a != b) edges.push_back({b, a, full[a][b]});
  for (size_t i = 0; i < k; ++i) edges.push_back({i, k + size_t(conn.sigma[i]), -conn.pair_distances[i]});
  bool changed = true;
  for (size_t round = 0; round <= n + 1 && changed; ++round) {
    changed = false;
    for (const auto& e : edges) {
      double cand = x[e.from] + e.w;
      if (cand < x[e.to] - 1e-15 * (1 + std::abs(x[e.to]))) {
        x[e.to] = cand;
        changed = true;
      }
    }
    if (changed && round == n + 1) fail(ErrorCode::GapPositive, "connection is not optimal for these distances");
  }
  double shift = x[k];
  for (auto& v : x) v -= shift;
  DualPotential dp;
  dp.values = x;
  dp.gap = 0;
  for (size_t i = 0; i < k; ++i) dp.gap += x[i] - x[k + conn.sigma[i]];
  dp.min_slack = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      if (a != b) dp.min_slack = std::min(dp.min_slack, full[a][b] - (x[a] - x[b]));
  if (std::abs(dp.gap - conn.length) > 1e-9 * (1 + conn.length))
    fail(ErrorCode::GapPositive, "duality gap is not zero");
  return dp;
}

//! k x k matrix: uses the bipartite metric closure for the same-sign pairs.
inline DualPotential dual_potential_bipartite(const Matrix& d, const Connection& conn) {
  return dual_potential(bipartite_closure(d), conn);
}

enum class Uniqueness { Unique, NonUnique, Unknown };

inline const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::Unique: return "unique";
    case Uniqueness::NonUnique: return "non_unique";
    case Uniqueness::Unknown: return "unknown";
  }
  return "?";
}

struct GeodesicLink {
  Connection connection;
  std::vector<Geodesic> curves;
  Uniqueness unique_flag = Uniqueness::Unknown;
};

inline Matrix distance_matrix(const Medium& m, const SingularityData& sing) {
  const size_t k = sing.k();
  Matrix d(k, std::vector<double>(k));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) d[i][j] = distance(m, sing.positives[i], sing.negatives[j]);
  return d;
}

//! 2k x 2k distances over positives then negatives.
inline Matrix full_distance_matrix(const Medium& m, const SingularityData& sing) {
  auto pts = sing.all();
  Matrix d(pts.size(), std::vector<double>(pts.size(), 0));
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b) d[a][b] = d[b][a] = distance(m, pts[a], pts[b]);
  return d;
}

//! Minimum distance between two polylines.
inline double polyline_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto seg_seg = [](Vec3 p1, Vec3 q1, Vec3 p2, Vec3 q2) {
    Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    double A = dot(d1, d1), E = dot(d2, d2), F = dot(d2, r);
    double s = 0, t = 0;
    if (A <= 1e-300 && E <= 1e-300) return dist(p1, p2);
    if (A <= 1e-300) {
      t = std::clamp(F / E, 0.0, 1.0);
    } else {
      double C = dot(d1, r);
      if (E <= 1e-300) {
        s = std::clamp(-C / A, 0.0, 1.0);
      } else {
        double B = dot(d1, d2), den = A * E - B * B;
        s = den > 1e-300 ? std::clamp((B * F - C * E) / den, 0.0, 1.0) : 0.0;
        t = (B * s + F) / E;
        if (t < 0) { t = 0; s = std::clamp(-C / A, 0.0, 1.0); }
        else if (t > 1) { t = 1; s = std::clamp((B - C) / A, 0.0, 1.0); }
      }
    }
    return dist(p1 + d1 * s, p2 + d2 * t);
  };
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < a.size(); ++i)
    for (size_t j = 0; j + 1 < b.size(); ++j) m = std::min(m, seg_seg(a[i], a[i + 1], b[j], b[j + 1]));
  return m;
}

struct ProbeOptions {
  int trials = 8;
  double jitter = 1e-7;
  uint64_t seed = 12345;
};

//! Stability of the pairing and of the curves under jittered distances and reversed solves.
inline Uniqueness uniqueness_probe(const Medium& m, const SingularityData& sing, const ProbeOptions& o = {}) {
  Matrix d = distance_matrix(m, sing);
  Connection c = minimal_connection(d);
  if (second_best_cost(d, c) - c.length < 1e-10) return Uniqueness::NonUnique;
  std::vector<Geodesic> curves;
  for (size_t i = 0; i < sing.k(); ++i) {
    curves.push_back(geodesic(m, sing.positives[i], sing.negatives[c.sigma[i]]));
    if (curves.back().non_unique) return Uniqueness::NonUnique;
  }
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < o.trials; ++t) {
    Matrix dj = d;
    for (auto& r : dj)
      for (auto& x : r) x = std::max(0.0, x + o.jitter * U(rng));
    if (minimal_connection(dj).sigma != c.sigma) return Uniqueness::Unknown;
  }
  for (size_t i = 0; i < sing.k(); ++i) {
    // restart from the other endpoint
    Geodesic rev = geodesic(m, sing.negatives[c.sigma[i]], sing.positives[i]);
    std::vector<Vec3> rv(rev.vertices.rbegin(), rev.vertices.rend());
    if (rv.size() != curves[i].vertices.size()) return Uniqueness::Unknown;
    for (size_t q = 0; q < rv.size(); ++q)
      if (dist(rv[q], curves[i].vertices[q]) > 1e-8) return Uniqueness::Unknown;
  }
  return Uniqueness::Unique;
}

inline GeodesicLink geodesic_link(const Medium& m, const SingularityData& sing, const ProbeOptions& o = {}) {
  GeodesicLink link;
  Matrix d = distance_matrix(m, sing);
  link.connection = minimal_connection(d);
  for (size_t i = 0; i < sing.k(); ++i)
    link.curves.push_back(geodesic(m, sing.positives[i], sing.negatives[link.connection.sigma[i]]));
  link.unique_flag = uniqueness_probe(m, sing, o);
  return link;
}

inline GeodesicLink geodesic_link(const Scene& s, const SingularityData& sing, double delta = 0,
                                  const ProbeOptions& o = {}) {
  ConvexBody body = s.inclusion.dilated(delta);
  return geodesic_link(medium(s, body), sing, o);
}

struct AvoidingReport {
  std::string case_name;  //!< off_link, on_link_interior, on_link_boundary
  double base_length = 0;
  double expected = 0;
  double actual = 0;
  double abs_error = 0;
};

struct AvoidingResult {
  Connection connection;
  AvoidingReport report;
};

inline void check_K(const SingularityData& sing, const Vec3& kc, double kr) {
  for (const auto& p : sing.all())
    if (dist(p, kc) <= kr + kMembershipTol) fail(ErrorCode::KTouchesSingularity, "K meets a singularity");
}

//! L(C, d^K) with a comparison against the closed forms for balls on or off the link.
inline AvoidingResult connection_avoiding(const Scene& s, const SingularityData& sing, const Vec3& kc, double kr) {
  check_K(sing, kc, kr);
  Medium m = medium(s, s.inclusion);
  const size_t k = sing.k();
  Matrix d(k, std::vector<double>(k));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) d[i][j] = pseudo_distance(m, kc, kr, sing.positives[i], sing.negatives[j]).value;
  AvoidingResult r;
  r.connection = minimal_connection(d);
  auto link = geodesic_link(m, sing);
  double L = link.connection.length;
  double on = std::numeric_limits<double>::infinity();
  for (const auto& g : link.curves) on = std::min(on, polyline_distance(g.vertices, {kc, kc}));
  auto& rep = r.report;
  rep.base_length = L;
  rep.actual = r.connection.length;
  if (on > 1e-9) {
    rep.case_name = "off_link";
    rep.expected = L;
  } else if (std::abs(s.inclusion.signed_distance(kc)) <= kMembershipTol) {
    rep.case_name = "on_link_boundary";
    rep.expected = L - (1 + s.b * s.b) * kr;
  } else {
    rep.case_name = "on_link_interior";
    double a = pinning(s, kc);
    rep.expected = L - 2 * a * a * kr;
  }
  rep.abs_error = std::abs(rep.actual - rep.expected);
  return r;
}

//! Largest delta (by bisection) below which the optimal pairing for the dilated metric stays the base one.
inline double connection_stability_threshold(const Scene& s, const SingularityData& sing, int iters = 30) {
  Medium m0 = medium(s, s.inclusion);
  auto sigma0 = minimal_connection(distance_matrix(m0, sing)).sigma;
  double lo = 0, hi = s.clearance / 2 * (1 - 1e-9);
  auto stable = [&](double delta) {
    ConvexBody b = s.inclusion.dilated(delta);
    return minimal_connection(distance_matrix(medium(s, b), sing)).sigma == sigma0;
  };
  if (stable(hi)) return hi;
  for (int it = 0; it < iters; ++it) {
    double mid = 0.5 * (lo + hi);
    if (stable(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace glpin
