#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "geometry.hpp"
#include "optimize.hpp"

namespace glpin {

enum class Phase { Outside, Inside };
enum class GeodesicKind { Straight, TwoSegment, ThreeSegment };

inline const char* to_string(Phase p) { return p == Phase::Inside ? "inside" : "outside"; }
inline const char* to_string(GeodesicKind k) {
  switch (k) {
    case GeodesicKind::Straight: return "straight";
    case GeodesicKind::TwoSegment: return "two_segment";
    case GeodesicKind::ThreeSegment: return "three_segment";
  }
  return "?";
}

//! Polyline with single-phase segments.
struct Geodesic {
  std::vector<Vec3> vertices;
  std::vector<Phase> phases;
  double weighted_length = 0;
  GeodesicKind kind = GeodesicKind::Straight;
  bool non_unique = false;
};

//! One geodesic, or two geodesics ending on the boundary of K.
struct KCurve {
  std::vector<Geodesic> components;
  bool through_K = false;
};

//! Metric weight b^2 on `body`, 1 elsewhere.
struct Medium {
  const ConvexBody* body;
  double w;
};

inline Medium medium(const Scene& s, const ConvexBody& body) { return {&body, s.b * s.b}; }

//! Exact weighted length of segment a->b.
inline double segment_weighted_length(const Medium& m, const Vec3& a, const Vec3& b) {
  double L = dist(a, b);
  if (L == 0) return 0;
  auto c = m.body->clip_segment(a, b);
  if (!c) return L;
  return L - (1 - m.w) * (c->second - c->first) * L;
}

inline double weighted_length(const Medium& m, const std::vector<Vec3>& poly) {
  if (poly.size() < 2) fail(ErrorCode::BadInput, "polyline needs at least two points");
  double s = 0;
  for (size_t i = 0; i + 1 < poly.size(); ++i) s += segment_weighted_length(m, poly[i], poly[i + 1]);
  return s;
}

inline double weighted_length(const Scene& s, const std::vector<Vec3>& poly, double delta = 0) {
  ConvexBody body = s.inclusion.dilated(delta);
  return weighted_length(medium(s, body), poly);
}

namespace detail {

struct V2 {
  double x, y;
};
inline V2 operator-(V2 a, V2 b) { return {a.x - b.x, a.y - b.y}; }
inline double dot2(V2 a, V2 b) { return a.x * b.x + a.y * b.y; }
inline double len2(V2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

//! Planar weighted path problem for a disk of radius R at the origin with interior weight w.
struct DiskPath {
  double value = 0;
  int breaks = 0;  //!< 0 straight; 1: P in disk, exit F; 2: entry E, exit F
  V2 e{0, 0}, f{0, 0};
  bool non_unique = false;
};

inline double disk_straight(V2 p, V2 q, double R, double w) {
  V2 d = q - p;
  double L = len2(d);
  if (L == 0) return 0;
  double A = dot2(d, d), B = dot2(p, d), C = dot2(p, p) - R * R;
  double disc = B * B - A * C;
  if (disc <= 0) return L;
  double s = std::sqrt(disc);
  double t0 = std::max(0.0, (-B - s) / A), t1 = std::min(1.0, (-B + s) / A);
  if (t1 <= t0) return L;
  return L - (1 - w) * (t1 - t0) * L;
}

//! Arc of the circle visible from an exterior point: theta = phi + alpha * s, s in [-1,1].
struct Arc {
  double phi, alpha;
};
inline Arc visible_arc(V2 p, double R) {
  double r = len2(p);
  return {std::atan2(p.y, p.x), std::acos(std::clamp(R / r, -1.0, 1.0))};
}

//! Value, gradient and Hessian (in theta) of |P - E(theta)|.
struct D1 {
  double v, g, h;
};
inline D1 point_circle(V2 P, double th, double R) {
  double c = std::cos(th), s = std::sin(th);
  V2 E{R * c, R * s}, Ed{-R * s, R * c};
  V2 u = E - P;
  double n = len2(u);
  if (n < 1e-300) return {0, 0, 0};
  double ue = dot2(u, Ed);
  return {n, ue / n, (R * R - dot2(u, E)) / n - ue * ue / (n * n * n)};
}

inline DiskPath solve_one_break(V2 P, V2 Q, double R, double w) {
  // P in the closed disk, Q outside; path P -> F -> Q with F on the arc seen from Q
  Arc a = visible_arc(Q, R);
  auto obj = [&](double s) {
    double th = a.phi + a.alpha * s;
    V2 F{R * std::cos(th), R * std::sin(th)};
    return w * len2(F - P) + len2(Q - F);
  };
  const int G = 24;
  std::array<double, G> fs;
  for (int i = 0; i < G; ++i) fs[i] = obj(-1 + (2.0 * i + 1) / G);
  std::vector<std::pair<double, double>> sols;
  for (int i = 0; i < G; ++i) {
    bool lm = (i == 0 || fs[i] <= fs[i - 1]) && (i == G - 1 || fs[i] <= fs[i + 1]);
    if (!lm) continue;
    double s = -1 + (2.0 * i + 1) / G;
    // Newton in s with bisection safeguard on [lo,hi]
    double lo = std::max(-1.0, s - 2.0 / G), hi = std::min(1.0, s + 2.0 / G);
    for (int it = 0; it < 60; ++it) {
      double th = a.phi + a.alpha * s;
      D1 d1 = point_circle(P, th, R), d2 = point_circle(Q, th, R);
      double g = (w * d1.g + d2.g) * a.alpha, h = (w * d1.h + d2.h) * a.alpha * a.alpha;
      if (g > 0) hi = s;
      else lo = s;
      double sn = (h > 0) ? s - g / h : 0.5 * (lo + hi);
      if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
      if (std::abs(sn - s) < 1e-15 || hi - lo < 1e-15) { s = sn; break; }
      s = sn;
    }
    sols.push_back({obj(s), s});
  }
  std::sort(sols.begin(), sols.end());
  DiskPath r;
  r.breaks = 1;
  r.value = sols[0].first;
  double th = a.phi + a.alpha * sols[0].second;
  r.f = {R * std::cos(th), R * std::sin(th)};
  for (size_t i = 1; i < sols.size(); ++i)
    if (sols[i].first - r.value < 1e-10 && std::abs(sols[i].second - sols[0].second) > 1e-6) r.non_unique = true;
  return r;
}

inline DiskPath solve_two_breaks(V2 P, V2 Q, double R, double w) {
  Arc ap = visible_arc(P, R), aq = visible_arc(Q, R);
  constexpr int G = 14;
  std::array<V2, G> Es, Fs;
  std::array<double, G> dp, dq;
  for (int i = 0; i < G; ++i) {
    double s = -1 + (2.0 * i + 1) / G;
    double te = ap.phi + ap.alpha * s, tf = aq.phi + aq.alpha * s;
    Es[i] = {R * std::cos(te), R * std::sin(te)};
    Fs[i] = {R * std::cos(tf), R * std::sin(tf)};
    dp[i] = len2(Es[i] - P);
    dq[i] = len2(Fs[i] - Q);
  }
  std::array<std::array<double, G>, G> J;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) J[i][j] = dp[i] + w * len2(Es[i] - Fs[j]) + dq[j];
  struct Cand {
    double v;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      bool lm = true;
      for (int di = -1; di <= 1 && lm; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          int a = i + di, b = j + dj;
          if ((di || dj) && a >= 0 && a < G && b >= 0 && b < G && J[a][b] < J[i][j]) { lm = false; break; }
        }
      if (lm) cands.push_back({J[i][j], i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
  if (cands.size() > 4) cands.resize(4);

  auto eval = [&](double se, double sf, double* g, double* H) {
    double te = ap.phi + ap.alpha * se, tf = aq.phi + aq.alpha * sf;
    double ce = std::cos(te), sne = std::sin(te), cf = std::cos(tf), snf = std::sin(tf);
    V2 E{R * ce, R * sne}, F{R * cf, R * snf}, Ed{-R * sne, R * ce}, Fd{-R * snf, R * cf};
    D1 a = point_circle(P, te, R), b = point_circle(Q, tf, R);
    V2 v = E - F;
    double m = len2(v);
    double val = a.v + w * m + b.v;
    if (g) {
      double ge = a.g, gf = b.g, hee = a.h, hff = b.h, hef = 0;
      if (m > 1e-13) {
        double ve = dot2(v, Ed), vf = dot2(v, Fd);
        ge += w * ve / m;
        gf += -w * vf / m;
        hee += w * ((R * R - dot2(v, E)) / m - ve * ve / (m * m * m));
        hff += w * ((R * R + dot2(v, F)) / m - vf * vf / (m * m * m));
        hef += w * (-dot2(Fd, Ed) / m + ve * vf / (m * m * m));
      }
      g[0] = ge * ap.alpha;
      g[1] = gf * aq.alpha;
      H[0] = hee * ap.alpha * ap.alpha;
      H[1] = hef * ap.alpha * aq.alpha;
      H[2] = hff * aq.alpha * aq.alpha;
    }
    return val;
  };

  struct Sol {
    double v, se, sf;
  };
  std::vector<Sol> sols;
  for (const auto& c : cands) {
    double se = -1 + (2.0 * c.i + 1) / G, sf = -1 + (2.0 * c.j + 1) / G;
    double g[2], H[3];
    double val = eval(se, sf, g, H);
    for (int it = 0; it < 80; ++it) {
      double a = H[0], b = H[1], cc = H[2];
      double lam = 0;
      double tr = a + cc, det = a * cc - b * b;
      double mineig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
      double scale = std::abs(a) + std::abs(cc) + 1e-12;
      if (mineig <= 1e-10 * scale) lam = -mineig + 1e-6 * scale;
      a += lam;
      cc += lam;
      det = a * cc - b * b;
      double d0 = -(cc * g[0] - b * g[1]) / det, d1 = -(a * g[1] - b * g[0]) / det;
      double t = 1;
      bool moved = false;
      for (int ls = 0; ls < 50; ++ls) {
        double ne = std::clamp(se + t * d0, -1.0, 1.0), nf = std::clamp(sf + t * d1, -1.0, 1.0);
        double nv = eval(ne, nf, nullptr, nullptr);
        if (nv < val) {
          double step = std::abs(ne - se) + std::abs(nf - sf);
          se = ne;
          sf = nf;
          val = eval(se, sf, g, H);
          moved = step > 1e-15;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    sols.push_back({val, se, sf});
  }
  std::sort(sols.begin(), sols.end(), [](const Sol& a, const Sol& b) { return a.v < b.v; });
  DiskPath r;
  r.breaks = 2;
  r.value = sols[0].v;
  double te = ap.phi + ap.alpha * sols[0].se, tf = aq.phi + aq.alpha * sols[0].sf;
  r.e = {R * std::cos(te), R * std::sin(te)};
  r.f = {R * std::cos(tf), R * std::sin(tf)};
  for (size_t i = 1; i < sols.size(); ++i)
    if (sols[i].v - r.value < 1e-10 &&
        std::abs(sols[i].se - sols[0].se) + std::abs(sols[i].sf - sols[0].sf) > 1e-6)
      r.non_unique = true;
  return r;
}

//! Planar solve: min over straight / one-break / two-break candidates.
inline DiskPath solve_disk(V2 P, V2 Q, double R, double w) {
  DiskPath straight;
  straight.value = disk_straight(P, Q, R, w);
  bool pin = len2(P) <= R, qin = len2(Q) <= R;
  if (pin && qin) return straight;
  DiskPath bent = (pin || qin) ? solve_one_break(qin ? Q : P, qin ? P : Q, R, w) : solve_two_breaks(P, Q, R, w);
  if (bent.value < straight.value - 1e-10) return bent;
  // straight wins; flag a tie with a geometrically different bent path
  V2 d = Q - P;
  double L = len2(d);
  auto off_line = [&](V2 z) { return std::abs(d.x * (z.y - P.y) - d.y * (z.x - P.x)) / L; };
  bool distinct = off_line(bent.f) > 1e-6 || (bent.breaks == 2 && off_line(bent.e) > 1e-6);
  straight.non_unique = distinct ? (bent.value - straight.value < 1e-10) : bent.non_unique;
  return straight;
}

struct PlaneFrame {
  Vec3 c, e1, e2;
  V2 to2(const Vec3& p) const {
    Vec3 d = p - c;
    return {dot(d, e1), dot(d, e2)};
  }
  Vec3 to3(V2 p) const { return c + e1 * p.x + e2 * p.y; }
};

inline PlaneFrame frame_for(const Vec3& c, const Vec3& x, const Vec3& y) {
  PlaneFrame fr;
  fr.c = c;
  Vec3 X = x - c, Y = y - c;
  double nx = norm(X);
  if (nx > 1e-300) {
    fr.e1 = X / nx;
    Vec3 yp = Y - fr.e1 * dot(Y, fr.e1);
    double ny = norm(yp);
    fr.e2 = ny > 1e-14 * (1 + norm(Y)) ? yp / ny : any_orthogonal(fr.e1);
  } else {
    fr.e1 = normalized(Y);
    fr.e2 = any_orthogonal(fr.e1);
  }
  return fr;
}

inline GeodesicKind classify(const std::vector<Vec3>& v) {
  int bends = 0;
  for (size_t i = 1; i + 1 < v.size(); ++i) {
    Vec3 a = v[i] - v[i - 1], b = v[i + 1] - v[i];
    double s = norm(cross(a, b)) / (norm(a) * norm(b));
    if (s > 1e-9) ++bends;
  }
  return bends == 0 ? GeodesicKind::Straight : (bends == 1 ? GeodesicKind::TwoSegment : GeodesicKind::ThreeSegment);
}

//! Splits a polyline into single-phase segments and fills lengths and kind.
inline Geodesic assemble(const Medium& m, const std::vector<Vec3>& pts, bool non_unique) {
  std::vector<Vec3> raw;
  for (const auto& p : pts)
    if (raw.empty() || dist(raw.back(), p) > 1e-14) raw.push_back(p);
  if (raw.size() == 1) raw.push_back(pts.back());
  Geodesic g;
  g.vertices.push_back(raw[0]);
  for (size_t i = 0; i + 1 < raw.size(); ++i) {
    const Vec3 &a = raw[i], &b = raw[i + 1];
    auto c = m.body->clip_segment(a, b);
    double L = dist(a, b);
    const double tiny = 1e-12 / std::max(L, 1e-300);
    if (!c || c->second - c->first <= tiny) {
      g.vertices.push_back(b);
      g.phases.push_back(Phase::Outside);
      continue;
    }
    double t0 = c->first <= tiny ? 0 : c->first, t1 = c->second >= 1 - tiny ? 1 : c->second;
    if (t0 > 0) {
      g.vertices.push_back(lerp(a, b, t0));
      g.phases.push_back(Phase::Outside);
    }
    g.vertices.push_back(t1 < 1 ? lerp(a, b, t1) : b);
    g.phases.push_back(Phase::Inside);
    if (t1 < 1) {
      g.vertices.push_back(b);
      g.phases.push_back(Phase::Outside);
    }
  }
  g.weighted_length = 0;
  for (size_t i = 0; i + 1 < g.vertices.size(); ++i)
    g.weighted_length += dist(g.vertices[i], g.vertices[i + 1]) * (g.phases[i] == Phase::Inside ? m.w : 1.0);
  g.kind = classify(g.vertices);
  g.non_unique = non_unique;
  return g;
}

inline std::vector<Vec3> disk_polyline(const PlaneFrame& fr, const DiskPath& r, const Vec3& x, const Vec3& y) {
  if (r.breaks == 0) return {x, y};
  if (r.breaks == 1) return {x, fr.to3(r.f), y};
  return {x, fr.to3(r.e), fr.to3(r.f), y};
}

//! Generic solver for non-ball inclusions: Nelder-Mead over boundary points parametrized by rays.
inline std::pair<std::vector<Vec3>, bool> generic_path(const Medium& m, const Vec3& x, const Vec3& y,
                                                       uint64_t seed = 0x5eed) {
  const ConvexBody& B = *m.body;
  Vec3 c = B.interior_point();
  auto bpoint = [&](double th, double ph) {
    Vec3 u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    return B.ray_boundary(c, u);
  };
  auto angles = [&](const Vec3& p) {
    Vec3 u = normalized(p - c);
    return std::array<double, 2>{std::acos(std::clamp(u.z, -1.0, 1.0)), std::atan2(u.y, u.x)};
  };
  std::vector<Vec3> best = {x, y};
  double bestv = weighted_length(m, best);
  std::vector<double> vals;
  bool xin = B.contains(x), yin = B.contains(y);
  if (xin && yin) return {best, false};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<std::vector<double>> starts;
  auto clip = B.clip_segment(x, y);
  if (xin || yin) {
    const Vec3& in = xin ? x : y;
    const Vec3& out = xin ? y : x;
    if (clip) {
      auto a = angles(lerp(x, y, xin ? clip->second : clip->first));
      starts.push_back({a[0], a[1]});
    }
    auto a = angles(B.project(out, true));
    starts.push_back({a[0], a[1]});
    for (int r = 0; r < 8; ++r) starts.push_back({std::acos(1 - 2 * U(rng)), 2 * kPi * U(rng)});
    for (const auto& s : starts) {
      auto f = [&](const std::vector<double>& v) { return weighted_length(m, {in, bpoint(v[0], v[1]), out}); };
      auto res = opt::nelder_mead(f, s, 0.2, 1e-15);
      vals.push_back(res.f);
      if (res.f < bestv) {
        bestv = res.f;
        Vec3 F = bpoint(res.x[0], res.x[1]);
        best = xin ? std::vector<Vec3>{x, F, y} : std::vector<Vec3>{x, F, y};
      }
    }
  } else {
    if (clip) {
      auto a = angles(lerp(x, y, clip->first)), b = angles(lerp(x, y, clip->second));
      starts.push_back({a[0], a[1], b[0], b[1]});
    }
    auto a = angles(B.project(x, true)), b = angles(B.project(y, true));
    starts.push_back({a[0], a[1], b[0], b[1]});
    for (int r = 0; r < 8; ++r)
      starts.push_back({std::acos(1 - 2 * U(rng)), 2 * kPi * U(rng), std::acos(1 - 2 * U(rng)), 2 * kPi * U(rng)});
    for (const auto& s : starts) {
      auto f = [&](const std::vector<double>& v) {
        return weighted_length(m, {x, bpoint(v[0], v[1]), bpoint(v[2], v[3]), y});
      };
      auto res = opt::nelder_mead(f, s, 0.2, 1e-15);
      vals.push_back(res.f);
      if (res.f < bestv) {
        bestv = res.f;
        best = {x, bpoint(res.x[0], res.x[1]), bpoint(res.x[2], res.x[3]), y};
      }
    }
  }
  return {best, false};
}

}  // namespace detail

//! Geodesic for the metric with weight b^2 on `body`.
inline Geodesic geodesic(const Medium& m, const Vec3& x, const Vec3& y) {
  if (dist(x, y) < 1e-12) fail(ErrorCode::DegenerateEndpoints, "geodesic endpoints coincide");
  const ConvexBody& B = *m.body;
  if (B.is_ball()) {
    auto fr = detail::frame_for(B.center(), x, y);
    auto r = detail::solve_disk(fr.to2(x), fr.to2(y), B.radius(), m.w);
    return detail::assemble(m, detail::disk_polyline(fr, r, x, y), r.non_unique);
  }
  auto [pts, nu] = detail::generic_path(m, x, y);
  return detail::assemble(m, pts, nu);
}

inline Geodesic geodesic(const Scene& s, const Vec3& x, const Vec3& y, double delta = 0) {
  ConvexBody body = s.inclusion.dilated(delta);
  return geodesic(medium(s, body), x, y);
}

inline double distance(const Medium& m, const Vec3& x, const Vec3& y) {
  if (dist(x, y) < 1e-12) return 0;
  const ConvexBody& B = *m.body;
  if (B.is_ball()) {
    auto fr = detail::frame_for(B.center(), x, y);
    return detail::solve_disk(fr.to2(x), fr.to2(y), B.radius(), m.w).value;
  }
  return geodesic(m, x, y).weighted_length;
}

inline double distance(const Scene& s, const Vec3& x, const Vec3& y, double delta = 0) {
  ConvexBody body = s.inclusion.dilated(delta);
  return distance(medium(s, body), x, y);
}

struct Bracket {
  double lower = 0, upper = 0;
  double value = 0;  //!< d_{alpha_delta}
  bool inside = true;
};

//! (d_{delta'}, d_{delta'} + 4|delta' - delta|) and whether d_delta lies inside.
inline Bracket dilated_distance_bracket(const Scene& s, const Vec3& x, const Vec3& y, double delta, double delta_prime) {
  if (delta < 0 || delta_prime < delta) fail(ErrorCode::BadInput, "need 0 <= delta <= delta_prime");
  if (delta_prime >= s.clearance / 2) fail(ErrorCode::DeltaTooLarge, "delta_prime must be below clearance/2");
  Bracket b;
  b.lower = distance(s, x, y, delta_prime);
  b.upper = b.lower + 4 * (delta_prime - delta);
  b.value = distance(s, x, y, delta);
  b.inside = b.value >= b.lower - 1e-12 && b.value <= b.upper + 1e-12;
  return b;
}

struct SetDistance {
  double value = 0;
  Vec3 foot;  //!< nearest point of K (x itself when inside)
};

//! d(x, K) for a ball K = ball(kc, kr).
inline SetDistance distance_to_set(const Medium& m, const Vec3& x, const Vec3& kc, double kr) {
  double rx = dist(x, kc);
  if (rx <= kr) return {0, x};
  const ConvexBody& B = *m.body;
  if (B.is_ball()) {
    double cd = dist(kc, B.center());
    double w = -1;
    if (cd + kr <= B.radius()) w = m.w;
    else if (cd >= kr + B.radius()) w = 1;
    if (w > 0) {
      // K lies in one phase: the path to the center ends with a radius of weight w
      Geodesic g = geodesic(m, x, kc);
      Vec3 foot = kc + (x - kc) * (kr / rx);
      for (size_t i = 0; i + 1 < g.vertices.size(); ++i) {
        auto c = ConvexBody::ball(kc, kr).clip_segment(g.vertices[i], g.vertices[i + 1]);
        if (c) {
          foot = lerp(g.vertices[i], g.vertices[i + 1], c->first);
          break;
        }
      }
      return {g.weighted_length - w * kr, foot};
    }
    // K straddles the interface: search the circle of K in the plane of x, the inclusion center and kc
    Vec3 a = x - kc, bb = B.center() - kc;
    Vec3 e1 = normalized(a);
    Vec3 e2 = bb - e1 * dot(bb, e1);
    e2 = norm(e2) > 1e-12 ? normalized(e2) : any_orthogonal(e1);
    auto pt = [&](double phi) { return kc + (e1 * std::cos(phi) + e2 * std::sin(phi)) * kr; };
    auto f = [&](double phi) { return distance(m, x, pt(phi)); };
    auto r = opt::scan_min(f, -kPi, kPi, 49, 1e-13);
    return {r.second, pt(r.first)};
  }
  // generic: search the whole sphere
  auto pt = [&](double th, double ph) {
    return kc + Vec3{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)} * kr;
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> bx;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j < 16; ++j) {
      double th = kPi * i / 8, ph = 2 * kPi * j / 16;
      double v = distance(m, x, pt(th, ph));
      if (v < best) { best = v; bx = {th, ph}; }
    }
  auto res = opt::nelder_mead([&](const std::vector<double>& v) { return distance(m, x, pt(v[0], v[1])); }, bx, 0.2,
                              1e-15);
  return {res.f, pt(res.x[0], res.x[1])};
}

inline SetDistance distance_to_set(const Scene& s, const Vec3& x, const Vec3& kc, double kr, double delta = 0) {
  ConvexBody body = s.inclusion.dilated(delta);
  return distance_to_set(medium(s, body), x, kc, kr);
}

struct PseudoDistance {
  double value = 0;
  KCurve curve;
};

inline PseudoDistance pseudo_distance(const Medium& m, const Vec3& kc, double kr, const Vec3& x, const Vec3& y) {
  PseudoDistance out;
  double d = distance(m, x, y);
  SetDistance dx = distance_to_set(m, x, kc, kr), dy = distance_to_set(m, y, kc, kr);
  if (dx.value + dy.value < d) {
    out.value = dx.value + dy.value;
    out.curve.through_K = true;
    if (dx.value > 0) out.curve.components.push_back(geodesic(m, x, dx.foot));
    if (dy.value > 0) out.curve.components.push_back(geodesic(m, y, dy.foot));
  } else {
    out.value = d;
    if (d > 0) out.curve.components.push_back(geodesic(m, x, y));
  }
  return out;
}

inline PseudoDistance pseudo_distance(const Scene& s, const Vec3& kc, double kr, const Vec3& x, const Vec3& y,
                                      double delta = 0) {
  ConvexBody body = s.inclusion.dilated(delta);
  return pseudo_distance(medium(s, body), kc, kr, x, y);
}

}  // namespace glpin
