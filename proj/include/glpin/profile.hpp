#pragma once

#include <functional>
#include <random>
#include <vector>

#include "grid.hpp"

namespace glpin {

struct MeshSpec {
  int nodes_per_eps = 40;
  double ratio = 1.05;
  double max_spacing = 0.01;
};

struct ExponentialFit {
  double gamma = 0;
  double C = 0;
  double r2 = 0;
  double gamma_inside = 0, gamma_outside = 0;
  int points = 0;
};

struct RadialProfile {
  double r0 = 0, b = 0, epsilon = 0;
  std::vector<double> r, U;
  double energy = 0;
  double residual = 0;
  int iterations = 0;
  bool has_fit = false;
  ExponentialFit fit;

  double pinning_sq(double x) const { return x < r0 ? b * b : 1.0; }
  //! Piecewise linear in r; 1 beyond the mesh.
  double eval(double x) const {
    if (x >= r.back()) return 1.0;
    if (x <= 0) return U.front();
    size_t i = std::upper_bound(r.begin(), r.end(), x) - r.begin();
    double t = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return U[i - 1] + t * (U[i] - U[i - 1]);
  }
};

//! Nodes on [0,1], geometric grading away from r0.
inline std::vector<double> graded_mesh(double r0, double eps, const MeshSpec& m) {
  if (m.nodes_per_eps < 20) fail(ErrorCode::MeshTooCoarse, "need at least 20 nodes per epsilon at the layer");
  if (!(r0 > 0 && r0 < 1 && eps > 0)) fail(ErrorCode::BadInput, "radial problem needs 0 < r0 < 1 and eps > 0");
  const double h0 = eps / m.nodes_per_eps;
  auto side = [&](double len) {
    std::vector<double> s{0};
    double h = h0;
    while (s.back() < len) {
      s.push_back(s.back() + h);
      h = std::min(h * m.ratio, m.max_spacing);
    }
    s.back() = len;
    if (s.size() > 2 && s[s.size() - 1] - s[s.size() - 2] < 0.3 * (s[s.size() - 2] - s[s.size() - 3]))
      s.erase(s.end() - 2);
    return s;
  };
  auto left = side(r0), right = side(1 - r0);
  std::vector<double> r;
  for (size_t i = left.size(); i-- > 1;) r.push_back(r0 - left[i]);
  r.front() = 0;
  for (double d : right) r.push_back(r0 + d);
  r.back() = 1;
  return r;
}

namespace detail {

struct RadialSystem {
  std::vector<double> r, k, min, mout;
  double b2, eps2;

  RadialSystem(const std::vector<double>& nodes, double r0, double b, double eps)
      : r(nodes), b2(b * b), eps2(eps * eps) {
    const size_t N = r.size();
    auto cube = [](double x) { return x * x * x / 3; };
    k.resize(N - 1);
    for (size_t e = 0; e + 1 < N; ++e) {
      double h = r[e + 1] - r[e];
      k[e] = (cube(r[e + 1]) - cube(r[e])) / (h * h);
    }
    min.assign(N, 0);
    mout.assign(N, 0);
    for (size_t i = 0; i < N; ++i) {
      double lo = i == 0 ? 0 : 0.5 * (r[i - 1] + r[i]);
      double hi = i + 1 == N ? r[i] : 0.5 * (r[i] + r[i + 1]);
      double mid = std::clamp(r0, lo, hi);
      min[i] = cube(mid) - cube(lo);
      mout[i] = cube(hi) - cube(mid);
    }
  }

  double energy(const std::vector<double>& U) const {
    double g = 0, p = 0;
    for (size_t e = 0; e < k.size(); ++e) g += k[e] * (U[e + 1] - U[e]) * (U[e + 1] - U[e]);
    for (size_t i = 0; i < U.size(); ++i) {
      double q = U[i] * U[i];
      p += (min[i] * (b2 - q) * (b2 - q) + mout[i] * (1 - q) * (1 - q)) / (2 * eps2);
    }
    return 2 * kPi * (g + p);
  }

  //! Gradient over free nodes (all but the last).
  void gradient(const std::vector<double>& U, std::vector<double>& g) const {
    const size_t N = U.size();
    g.assign(N - 1, 0);
    for (size_t e = 0; e + 1 < N; ++e) {
      double f = 2 * k[e] * (U[e + 1] - U[e]);
      if (e < N - 1) g[e] -= f;
      if (e + 1 < N - 1) g[e + 1] += f;
    }
    for (size_t i = 0; i + 1 < N; ++i) {
      double q = U[i] * U[i];
      g[i] += (-4 * U[i] * (min[i] * (b2 - q) + mout[i] * (1 - q))) / (2 * eps2);
    }
    for (auto& x : g) x *= 2 * kPi;
  }

  //! Tridiagonal Hessian with the potential part clipped to be nonnegative.
  void hessian(const std::vector<double>& U, std::vector<double>& lo, std::vector<double>& di,
               std::vector<double>& up) const {
    const size_t n = U.size() - 1;
    di.assign(n, 0);
    lo.assign(n, 0);
    up.assign(n, 0);
    for (size_t e = 0; e + 1 < U.size(); ++e) {
      if (e < n) di[e] += 2 * k[e];
      if (e + 1 < n) {
        di[e + 1] += 2 * k[e];
        up[e] = -2 * k[e];
        lo[e + 1] = -2 * k[e];
      }
    }
    for (size_t i = 0; i < n; ++i) {
      double q = U[i] * U[i];
      double pot = (min[i] * (12 * q - 4 * b2) + mout[i] * (12 * q - 4)) / (2 * eps2);
      di[i] += std::max(pot, 0.0);
    }
    for (size_t i = 0; i < n; ++i) {
      di[i] *= 2 * kPi;
      lo[i] *= 2 * kPi;
      up[i] *= 2 * kPi;
    }
  }
};

inline std::vector<double> thomas(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                                  std::vector<double> rhs) {
  const size_t n = di.size();
  for (size_t i = 1; i < n; ++i) {
    double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / di[n - 1];
  for (size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
  return x;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

//! Log-linear regression of |U - a| against dist(r, r0)/eps on each side, outside a 2 eps band.
inline ExponentialFit exponential_fit(const RadialProfile& p, double floor = 1e-11) {
  struct Side {
    double gamma = 0, lnC = 0, r2 = 0;
    int n = 0;
  };
  auto fit_side = [&](bool inside) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < p.r.size(); ++i) {
      double d = std::abs(p.r[i] - p.r0);
      if ((p.r[i] < p.r0) != inside || d <= 2 * p.epsilon) continue;
      double dev = std::abs(p.U[i] - std::sqrt(p.pinning_sq(p.r[i])));
      if (dev <= floor) continue;
      xs.push_back(d / p.epsilon);
      ys.push_back(std::log(dev));
    }
    Side s;
    s.n = int(xs.size());
    if (s.n < 5) return s;
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / s.n, my = std::accumulate(ys.begin(), ys.end(), 0.0) / s.n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < s.n; ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    s.gamma = -slope;
    s.lnC = my - slope * mx;
    s.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0;
    return s;
  };
  Side in = fit_side(true), out = fit_side(false);
  if (in.n < 5 && out.n < 5) fail(ErrorCode::FitDegenerate, "|U - a| is below the noise floor everywhere");
  ExponentialFit f;
  f.gamma_inside = in.gamma;
  f.gamma_outside = out.gamma;
  std::vector<Side> used;
  for (const Side& s : {in, out})
    if (s.n >= 5) used.push_back(s);
  f.gamma = used[0].gamma;
  f.r2 = used[0].r2;
  for (const auto& s : used) {
    f.gamma = std::min(f.gamma, s.gamma);
    f.r2 = std::min(f.r2, s.r2);
    f.points += s.n;
  }
  // envelope constant for the common rate
  for (size_t i = 0; i < p.r.size(); ++i) {
    double d = std::abs(p.r[i] - p.r0);
    double dev = std::abs(p.U[i] - std::sqrt(p.pinning_sq(p.r[i])));
    f.C = std::max(f.C, dev * std::exp(f.gamma * d / p.epsilon));
  }
  return f;
}

//! Minimizes the radial energy by projected modified Newton on [b, 1] with U(1) = 1.
inline RadialProfile solve_radial(double r0, double b, double eps, const MeshSpec& mesh = {},
                                  const std::vector<double>* init = nullptr, int max_iter = 200) {
  if (!(b > 0 && b <= 1)) fail(ErrorCode::BadInput, "contrast must lie in (0, 1]");
  RadialProfile p;
  p.r0 = r0;
  p.b = b;
  p.epsilon = eps;
  p.r = graded_mesh(r0, eps, mesh);
  const size_t N = p.r.size();
  detail::RadialSystem sys(p.r, r0, b, eps);
  if (init && init->size() == N) {
    p.U = *init;
  } else {
    p.U.resize(N);
    for (size_t i = 0; i < N; ++i) p.U[i] = p.r[i] < r0 ? b : 1.0;
  }
  for (auto& u : p.U) u = std::clamp(u, b, 1.0);
  p.U.back() = 1;
  const double tol = 1e-10;
  std::vector<double> g, lo, di, up;
  double E = sys.energy(p.U);
  for (int it = 0; it < max_iter; ++it) {
    sys.gradient(p.U, g);
    // projected gradient: bound-active components drop out
    std::vector<double> pg = g;
    for (size_t i = 0; i + 1 < N; ++i)
      if ((p.U[i] <= b && g[i] > 0) || (p.U[i] >= 1 && g[i] < 0)) pg[i] = 0;
    const double raw = detail::max_abs(pg);
    // strong-form scaling: eps^2 times the Euler-Lagrange residual per unit mass
    for (size_t i = 0; i + 1 < N; ++i) pg[i] *= sys.eps2 / (4 * kPi * (sys.min[i] + sys.mout[i]));
    p.residual = detail::max_abs(pg);
    p.iterations = it;
    if (p.residual < tol) {
      p.energy = E;
      try {
        p.fit = exponential_fit(p);
        p.has_fit = true;
      } catch (const Error&) {
        p.has_fit = false;
      }
      return p;
    }
    sys.hessian(p.U, lo, di, up);
    std::vector<double> rhs(N - 1);
    for (size_t i = 0; i + 1 < N; ++i) rhs[i] = -g[i];
    auto d = detail::thomas(lo, di, up, rhs);
    double t = 1;
    std::vector<double> trial(N);
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      for (size_t i = 0; i + 1 < N; ++i) trial[i] = std::clamp(p.U[i] + t * d[i], b, 1.0);
      trial[N - 1] = 1;
      double Et = sys.energy(trial);
      if (Et < E || (Et <= E + 1e-12 * std::abs(E))) {
        std::vector<double> gt;
        sys.gradient(trial, gt);
        if (Et < E - 1e-14 * std::abs(E) || detail::max_abs(gt) < raw) {
          p.U = trial;
          E = Et;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", p.residual);
  fail(ErrorCode::NoConvergence, std::string("radial Newton stalled at residual ") + buf);
}

//! Fraction of the radial energy inside the shell |r - r0| < eta.
inline double energy_fraction_near_interface(const RadialProfile& p, double eta) {
  detail::RadialSystem sys(p.r, p.r0, p.b, p.epsilon);
  double near = 0, total = 0;
  for (size_t e = 0; e + 1 < p.r.size(); ++e) {
    double g = sys.k[e] * (p.U[e + 1] - p.U[e]) * (p.U[e + 1] - p.U[e]);
    total += g;
    if (std::abs(0.5 * (p.r[e] + p.r[e + 1]) - p.r0) < eta) near += g;
  }
  for (size_t i = 0; i < p.r.size(); ++i) {
    double q = p.U[i] * p.U[i];
    double v = (sys.min[i] * (sys.b2 - q) * (sys.b2 - q) + sys.mout[i] * (1 - q) * (1 - q)) / (2 * sys.eps2);
    total += v;
    if (std::abs(p.r[i] - p.r0) < eta) near += v;
  }
  return total > 0 ? near / total : 1.0;
}

//! Flat interface cost min 1/2 int (u'^2 + (a^2 - u^2)^2 / 2) for the step a = b -> 1.
//! Zero-energy phase-plane trajectories on each side are matched by bisection on the interface value.
inline double heteroclinic_cost_oracle(double b) {
  if (!(b > 0 && b <= 1)) fail(ErrorCode::BadInput, "contrast must lie in (0, 1]");
  if (b == 1) return 0;
  auto Win = [b](double u) { return 0.5 * (u * u - b * b) * (u * u - b * b); };
  auto Wout = [](double u) { return 0.5 * (1 - u * u) * (1 - u * u); };
  double lo = b, hi = 1;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    double m = 0.5 * (lo + hi);
    (Win(m) < Wout(m) ? lo : hi) = m;
  }
  const double us = 0.5 * (lo + hi);
  // cost = int sqrt(W) du along each branch (equipartition u'^2 = W)
  std::function<double(const std::function<double(double)>&, double, double, double, double, double, double, int)>
      simpson = [&](const auto& f, double a, double c, double fa, double fm, double fc, double whole, int depth) {
        double m = 0.5 * (a + c), l = 0.5 * (a + m), r = 0.5 * (m + c);
        double fl = f(l), fr = f(r);
        double left = (m - a) / 6 * (fa + 4 * fl + fm), right = (c - m) / 6 * (fm + 4 * fr + fc);
        if (depth <= 0 || std::abs(left + right - whole) < 1e-15) return left + right + (left + right - whole) / 15;
        return simpson(f, a, m, fa, fl, fm, left, depth - 1) + simpson(f, m, c, fm, fr, fc, right, depth - 1);
      };
  auto integrate = [&](const std::function<double(double)>& f, double a, double c) {
    double fa = f(a), fc = f(c), fm = f(0.5 * (a + c));
    return simpson(f, a, c, fa, fm, fc, (c - a) / 6 * (fa + 4 * fm + fc), 40);
  };
  return integrate([&](double u) { return std::sqrt(Win(u)); }, b, us) +
         integrate([&](double u) { return std::sqrt(Wout(u)); }, us, 1);
}

// ---------------------------------------------------------------- 3D discrete energies

struct GridField3D {
  GridSpec grid;
  std::vector<double> re, im;
};

//! Samples a complex function on the scene grid.
inline GridField3D sample_field(const GridSpec& g, const std::function<std::pair<double, double>(const Vec3&)>& f) {
  GridField3D u{g, std::vector<double>(g.size()), std::vector<double>(g.size())};
  parallel_for(size_t(g.dims[2]), [&](size_t k) {
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        auto [a, b] = f(g.node(i, j, int(k)));
        size_t id = g.index(i, j, int(k));
        u.re[id] = a;
        u.im[id] = b;
      }
  });
  return u;
}

//! Per-cell subsampled moments: mean of 1_Omega, 1_Omega a^2, 1_Omega a^4.
struct CellMoments {
  GridSpec grid;
  std::vector<float> m0, m1, m2;
};

inline CellMoments cell_moments(const Scene& s, const GridSpec& g) {
  CellMoments c{g, {}, {}, {}};
  const size_t nc = size_t(g.dims[0] - 1) * (g.dims[1] - 1) * (g.dims[2] - 1);
  c.m0.assign(nc, 0);
  c.m1.assign(nc, 0);
  c.m2.assign(nc, 0);
  const double b2 = s.b * s.b;
  parallel_for(size_t(g.dims[2] - 1), [&](size_t k) {
    for (int j = 0; j + 1 < g.dims[1]; ++j)
      for (int i = 0; i + 1 < g.dims[0]; ++i) {
        size_t id = (k * (g.dims[1] - 1) + j) * (g.dims[0] - 1) + i;
        Vec3 o = g.node(i, j, int(k));
        double s0 = 0, s1 = 0, s2 = 0;
        for (int c3 = 0; c3 < 27; ++c3) {
          Vec3 x = o + Vec3{(c3 % 3 + 0.5) / 3, ((c3 / 3) % 3 + 0.5) / 3, (c3 / 9 + 0.5) / 3} * g.h;
          if (!s.omega.contains(x, 0)) continue;
          double a2 = s.inclusion.contains_open(x) ? b2 : 1.0;
          s0 += 1;
          s1 += a2;
          s2 += a2 * a2;
        }
        c.m0[id] = float(s0 / 27);
        c.m1[id] = float(s1 / 27);
        c.m2[id] = float(s2 / 27);
      }
  });
  return c;
}

namespace detail {

struct CellValues {
  double re, im, gx_re, gy_re, gz_re, gx_im, gy_im, gz_im;
};

inline CellValues cell_values(const GridSpec& g, const std::vector<double>& re, const std::vector<double>& im, int i,
                              int j, int k) {
  CellValues c{};
  double v[2][8];
  for (int q = 0; q < 8; ++q) {
    size_t id = g.index(i + (q & 1), j + ((q >> 1) & 1), k + ((q >> 2) & 1));
    v[0][q] = re[id];
    v[1][q] = im.empty() ? 0.0 : im[id];
  }
  double* out[2][4] = {{&c.re, &c.gx_re, &c.gy_re, &c.gz_re}, {&c.im, &c.gx_im, &c.gy_im, &c.gz_im}};
  for (int part = 0; part < 2; ++part) {
    const double* w = v[part];
    *out[part][0] = (w[0] + w[1] + w[2] + w[3] + w[4] + w[5] + w[6] + w[7]) / 8;
    *out[part][1] = ((w[1] - w[0]) + (w[3] - w[2]) + (w[5] - w[4]) + (w[7] - w[6])) / (4 * g.h);
    *out[part][2] = ((w[2] - w[0]) + (w[3] - w[1]) + (w[6] - w[4]) + (w[7] - w[5])) / (4 * g.h);
    *out[part][3] = ((w[4] - w[0]) + (w[5] - w[1]) + (w[6] - w[2]) + (w[7] - w[3])) / (4 * g.h);
  }
  return c;
}

}  // namespace detail

//! Cell-midpoint quadrature of E_eps (weight == nullptr) or of F_eps with real weight U on the nodes.
inline double discrete_energy(const CellMoments& cm, const GridField3D& u, double eps,
                              const std::vector<double>* weight = nullptr) {
  const GridSpec& g = cm.grid;
  if (!(u.grid == g) || u.re.size() != g.size() || u.im.size() != g.size() || (weight && weight->size() != g.size()))
    fail(ErrorCode::ShapeMismatch, "field does not match the scene grid");
  std::vector<double> slab(g.dims[2] - 1, 0.0);
  const double vol = g.h * g.h * g.h, inv = 1 / (2 * eps * eps);
  parallel_for(slab.size(), [&](size_t k) {
    double acc = 0;
    for (int j = 0; j + 1 < g.dims[1]; ++j)
      for (int i = 0; i + 1 < g.dims[0]; ++i) {
        size_t id = (k * (g.dims[1] - 1) + j) * (g.dims[0] - 1) + i;
        double m0 = cm.m0[id];
        if (m0 == 0) continue;
        auto c = detail::cell_values(g, u.re, u.im, i, j, int(k));
        double grad = c.gx_re * c.gx_re + c.gy_re * c.gy_re + c.gz_re * c.gz_re + c.gx_im * c.gx_im +
                      c.gy_im * c.gy_im + c.gz_im * c.gz_im;
        double q = c.re * c.re + c.im * c.im;
        if (!weight) {
          double pot = cm.m2[id] - 2 * q * cm.m1[id] + q * q * m0;
          acc += 0.5 * (m0 * grad + inv * pot);
        } else {
          auto w = detail::cell_values(g, *weight, {}, i, j, int(k));
          double U2 = w.re * w.re;
          acc += 0.5 * m0 * (U2 * grad + U2 * U2 * inv * (1 - q) * (1 - q));
        }
      }
    slab[k] = acc * vol;
  });
  double total = 0;
  for (double x : slab) total += x;
  return total;
}

inline double discrete_energy(const Scene& s, const GridField3D& u, double eps, const std::vector<double>* weight = nullptr) {
  return discrete_energy(cell_moments(s, u.grid), u, eps, weight);
}

//! U from the radial profile on the nodes of g (concentric ball scenes).
inline std::vector<double> radial_weight(const GridSpec& g, const RadialProfile& p, const Vec3& center = {}) {
  std::vector<double> U(g.size());
  parallel_for(size_t(g.dims[2]), [&](size_t k) {
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) U[g.index(i, j, int(k))] = p.eval(dist(g.node(i, j, int(k)), center));
  });
  return U;
}

struct DecouplingRow {
  double h = 0;
  double E_Uv = 0, E_U = 0, F_v = 0;
  double residual = 0;
};

struct DecouplingTable {
  std::vector<DecouplingRow> rows;
  double order = 0;  //!< least-squares slope of log residual against log h
};

//! |E(U v) - E(U) - F(v)| over an h-ladder; v is a complex function with unimodular trace on the boundary of Omega.
inline DecouplingTable decoupling_residual(const Scene& s, const RadialProfile& p,
                                           const std::function<std::pair<double, double>(const Vec3&)>& v,
                                           const std::vector<double>& hs) {
  if (!s.omega.is_ball() || !s.inclusion.is_ball() || dist(s.omega.center(), s.inclusion.center()) > 1e-12)
    fail(ErrorCode::ProfileUnavailable, "the radial profile needs concentric ball scenes");
  // trace check on a fixed sphere sample
  for (int t = 0; t < 400; ++t) {
    double z = 2 * ((t + 0.5) / 400) - 1, ph = t * 2.399963229728653;
    double rr = std::sqrt(1 - z * z);
    Vec3 x = s.omega.center() + Vec3{rr * std::cos(ph), rr * std::sin(ph), z} * s.omega.radius();
    auto [a, b] = v(x);
    if (std::abs(a * a + b * b - 1) > 1e-9) fail(ErrorCode::TraceNotUnimodular, "test field is not unimodular on the boundary");
  }
  DecouplingTable tab;
  for (double h : hs) {
    GridSpec g = grid_for(s.omega, h);
    auto cm = cell_moments(s, g);
    auto U = radial_weight(g, p, s.omega.center());
    GridField3D vf = sample_field(g, v);
    GridField3D Uf{g, U, std::vector<double>(g.size(), 0.0)};
    GridField3D Uv{g, vf.re, vf.im};
    for (size_t i = 0; i < g.size(); ++i) {
      Uv.re[i] *= U[i];
      Uv.im[i] *= U[i];
    }
    DecouplingRow r;
    r.h = h;
    r.E_Uv = discrete_energy(cm, Uv, p.epsilon);
    r.E_U = discrete_energy(cm, Uf, p.epsilon);
    r.F_v = discrete_energy(cm, vf, p.epsilon, &U);
    r.residual = std::abs(r.E_Uv - r.E_U - r.F_v);
    tab.rows.push_back(r);
  }
  if (tab.rows.size() >= 2) {
    double mx = 0, my = 0;
    int n = 0;
    for (const auto& r : tab.rows)
      if (r.residual > 0) {
        mx += std::log(r.h);
        my += std::log(r.residual);
        ++n;
      }
    if (n >= 2) {
      mx /= n;
      my /= n;
      double sxx = 0, sxy = 0;
      for (const auto& r : tab.rows)
        if (r.residual > 0) {
          sxx += (std::log(r.h) - mx) * (std::log(r.h) - mx);
          sxy += (std::log(r.h) - mx) * (std::log(r.residual) - my);
        }
      tab.order = sxy / sxx;
    }
  }
  return tab;
}

}  // namespace glpin
