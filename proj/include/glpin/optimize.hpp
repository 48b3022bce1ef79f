#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace glpin::opt {

struct NMResult {
  std::vector<double> x;
  double f = 0;
  int evals = 0;
};

//! Nelder-Mead with restarts at the incumbent until no further improvement.
inline NMResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                            double step, double ftol = 1e-14, int max_evals = 20000) {
  const size_t n = x0.size();
  NMResult res;
  res.x = x0;
  res.f = f(x0);
  res.evals = 1;
  for (int restart = 0; restart < 6 && res.evals < max_evals; ++restart) {
    std::vector<std::vector<double>> s(n + 1, res.x);
    std::vector<double> fs(n + 1);
    fs[0] = res.f;
    for (size_t i = 0; i < n; ++i) {
      s[i + 1][i] += step;
      fs[i + 1] = f(s[i + 1]);
      ++res.evals;
    }
    double before = res.f;
    while (res.evals < max_evals) {
      std::vector<size_t> idx(n + 1);
      for (size_t i = 0; i <= n; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fs[a] < fs[b]; });
      size_t best = idx[0], worst = idx[n], second = idx[n - 1];
      double spread = fs[worst] - fs[best];
      double size = 0;
      for (size_t i = 0; i <= n; ++i)
        for (size_t k = 0; k < n; ++k) size = std::max(size, std::abs(s[i][k] - s[best][k]));
      if (spread <= ftol * (1 + std::abs(fs[best])) && size < 1e-9) break;
      if (size < 1e-14) break;
      std::vector<double> c(n, 0.0);
      for (size_t i = 0; i <= n; ++i)
        if (i != worst)
          for (size_t k = 0; k < n; ++k) c[k] += s[i][k] / n;
      auto along = [&](double t) {
        std::vector<double> p(n);
        for (size_t k = 0; k < n; ++k) p[k] = c[k] + t * (s[worst][k] - c[k]);
        return p;
      };
      auto xr = along(-1.0);
      double fr = f(xr);
      ++res.evals;
      if (fr < fs[best]) {
        auto xe = along(-2.0);
        double fe = f(xe);
        ++res.evals;
        if (fe < fr) { s[worst] = xe; fs[worst] = fe; }
        else { s[worst] = xr; fs[worst] = fr; }
      } else if (fr < fs[second]) {
        s[worst] = xr;
        fs[worst] = fr;
      } else {
        auto xc = fr < fs[worst] ? along(-0.5) : along(0.5);
        double fc = f(xc);
        ++res.evals;
        if (fc < std::min(fr, fs[worst])) {
          s[worst] = xc;
          fs[worst] = fc;
        } else {
          for (size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (size_t k = 0; k < n; ++k) s[i][k] = s[best][k] + 0.5 * (s[i][k] - s[best][k]);
            fs[i] = f(s[i]);
            ++res.evals;
          }
        }
      }
    }
    size_t bi = std::min_element(fs.begin(), fs.end()) - fs.begin();
    if (fs[bi] < res.f) {
      res.f = fs[bi];
      res.x = s[bi];
    }
    if (before - res.f <= ftol * (1 + std::abs(res.f))) break;
    step *= 0.25;
  }
  return res;
}

//! Brent's minimizer on [a,b].
inline std::pair<double, double> brent_min(const std::function<double(double)>& f, double a, double b,
                                           double tol = 1e-12, int max_iter = 200) {
  const double g = 0.3819660112501051;
  double x = a + g * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0, e = 0;
  for (int it = 0; it < max_iter; ++it) {
    double m = 0.5 * (a + b);
    double t1 = tol * std::abs(x) + 1e-15, t2 = 2 * t1;
    if (std::abs(x - m) <= t2 - 0.5 * (b - a)) break;
    bool golden = true;
    if (std::abs(e) > t1) {
      double r = (x - w) * (fx - fv), q = (x - v) * (fx - fw), p = (x - v) * q - (x - w) * r;
      q = 2 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      double etemp = e;
      e = d;
      if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
        d = p / q;
        double u = x + d;
        if (u - a < t2 || b - u < t2) d = (x < m) ? t1 : -t1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= m) ? a - x : b - x;
      d = g * e;
    }
    double u = std::abs(d) >= t1 ? x + d : x + (d > 0 ? t1 : -t1);
    double fu = f(u);
    if (fu <= fx) {
      if (u >= x) a = x;
      else b = x;
      v = w; fv = fw; w = x; fw = fx; x = u; fx = fu;
    } else {
      if (u < x) a = u;
      else b = u;
      if (fu <= fw || w == x) { v = w; fv = fw; w = u; fw = fu; }
      else if (fu <= fv || v == x || v == w) { v = u; fv = fu; }
    }
  }
  return {x, fx};
}

//! Scan n points on [a,b], then Brent around every discrete local minimum; returns the best.
inline std::pair<double, double> scan_min(const std::function<double(double)>& f, double a, double b, int n,
                                          double tol = 1e-12) {
  std::vector<double> xs(n), fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = a + (b - a) * i / (n - 1);
    fs[i] = f(xs[i]);
  }
  std::pair<double, double> best{xs[0], fs[0]};
  for (int i = 0; i < n; ++i)
    if (fs[i] < best.second) best = {xs[i], fs[i]};
  for (int i = 0; i < n; ++i) {
    bool lm = (i == 0 || fs[i] <= fs[i - 1]) && (i == n - 1 || fs[i] <= fs[i + 1]);
    if (!lm) continue;
    double lo = xs[std::max(0, i - 1)], hi = xs[std::min(n - 1, i + 1)];
    auto r = brent_min(f, lo, hi, tol);
    if (r.second < best.second) best = r;
  }
  return best;
}

}  // namespace glpin::opt
