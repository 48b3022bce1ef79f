#pragma once

#include <cstdint>
#include <numeric>
#include <queue>
#include <vector>

#include "metric.hpp"

namespace glpin {

enum class Stencil { S6, S18, S26, Extended };

struct Offset {
  int dx, dy, dz;
};

//! Neighbor offsets. Extended: every primitive offset with max-norm <= 4 (578 moves,
//! worst-direction metrication about 1.5%).
inline std::vector<Offset> stencil_offsets(Stencil s) {
  std::vector<Offset> out;
  const int R = s == Stencil::Extended ? 4 : 1;
  for (int i = -R; i <= R; ++i)
    for (int j = -R; j <= R; ++j)
      for (int k = -R; k <= R; ++k) {
        int a = std::abs(i), b = std::abs(j), c = std::abs(k);
        if (a + b + c == 0 || std::gcd(std::gcd(a, b), c) != 1) continue;
        int nz = (a != 0) + (b != 0) + (c != 0);
        bool take = true;
        if (s == Stencil::S6) take = nz == 1;
        if (s == Stencil::S18) take = nz <= 2;
        if (take) out.push_back({i, j, k});
      }
  return out;
}

struct LatticeOptions {
  double h = 1.0 / 64;
  Stencil stencil = Stencil::Extended;
  double delta = 0;
  //! A* guidance: scale times the analytic distance to the target; 0 uses b^2 times euclidean.
  double heuristic_scale = 0.98;
};

//! Shortest path on a regular lattice over Omega with exact segment weights (independent oracle).
inline double lattice_oracle_distance(const Scene& s, const Vec3& x, const Vec3& y, const LatticeOptions& opt = {}) {
  const double h = opt.h;
  ConvexBody body = s.inclusion.dilated(opt.delta);
  Medium m = medium(s, body);
  Box bb = s.omega.bounding_box();
  Vec3 org = bb.lo - Vec3{2 * h, 2 * h, 2 * h};
  int n[3];
  for (int k = 0; k < 3; ++k) n[k] = static_cast<int>(std::ceil((bb.hi[k] - bb.lo[k] + 4 * h) / h)) + 1;
  auto outside_box = [&](const Vec3& p) {
    for (int k = 0; k < 3; ++k)
      if (p[k] < org[k] || p[k] > org[k] + (n[k] - 1) * h) return true;
    return false;
  };
  if (outside_box(x) || outside_box(y)) fail(ErrorCode::OutOfBox, "endpoint outside the lattice box");
  if (dist(x, y) < 1e-12) return 0;

  const size_t N = size_t(n[0]) * n[1] * n[2];
  auto idx = [&](int i, int j, int k) { return (size_t(k) * n[1] + j) * n[0] + i; };
  auto node = [&](int i, int j, int k) { return org + Vec3{i * h, j * h, k * h}; };
  std::vector<float> sd(N);
  std::vector<uint8_t> active(N);
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        Vec3 p = node(i, j, k);
        size_t id = idx(i, j, k);
        active[id] = s.omega.signed_distance(p) <= 2 * h;
        sd[id] = active[id] ? static_cast<float>(body.signed_distance(p)) : 0.f;
      }

  auto offs = stencil_offsets(opt.stencil);
  std::vector<double> elen(offs.size());
  for (size_t e = 0; e < offs.size(); ++e)
    elen[e] = h * std::sqrt(double(offs[e].dx * offs[e].dx + offs[e].dy * offs[e].dy + offs[e].dz * offs[e].dz));

  // endpoint attachment: nodes of the 4x4x4 block around the point
  auto attach = [&](const Vec3& p) {
    std::vector<std::pair<size_t, double>> out;
    int base[3];
    for (int k = 0; k < 3; ++k) base[k] = static_cast<int>(std::floor((p[k] - org[k]) / h));
    for (int k = base[2] - 1; k <= base[2] + 2; ++k)
      for (int j = base[1] - 1; j <= base[1] + 2; ++j)
        for (int i = base[0] - 1; i <= base[0] + 2; ++i) {
          if (i < 0 || j < 0 || k < 0 || i >= n[0] || j >= n[1] || k >= n[2]) continue;
          size_t id = idx(i, j, k);
          if (!active[id]) continue;
          out.push_back({id, segment_weighted_length(m, p, node(i, j, k))});
        }
    return out;
  };
  auto src = attach(x), snk = attach(y);
  std::vector<double> to_sink(N, -1.0);
  for (auto& [id, w] : snk) to_sink[id] = w;

  const double wmin = m.w;
  std::vector<float> hcache(N, -1.f);
  auto heur = [&](size_t id) -> double {
    if (hcache[id] >= 0) return hcache[id];
    int i = int(id % n[0]), j = int((id / n[0]) % n[1]), k = int(id / (size_t(n[0]) * n[1]));
    Vec3 p = node(i, j, k);
    double v = opt.heuristic_scale > 0 ? opt.heuristic_scale * distance(m, p, y) : wmin * dist(p, y);
    hcache[id] = static_cast<float>(v * (1 - 1e-6));
    return hcache[id];
  };
  std::vector<double> g(N, std::numeric_limits<double>::infinity());
  std::vector<uint8_t> closed(N, 0);
  using QE = std::pair<double, size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  double best = segment_weighted_length(m, x, y) <= 4 * h ? segment_weighted_length(m, x, y)
                                                            : std::numeric_limits<double>::infinity();
  for (auto& [id, w] : src) {
    if (w < g[id]) {
      g[id] = w;
      pq.push({w + heur(id), id});
    }
  }
  while (!pq.empty()) {
    auto [f, id] = pq.top();
    pq.pop();
    if (closed[id]) continue;
    if (f >= best) break;
    closed[id] = 1;
    double gi = g[id];
    if (to_sink[id] >= 0) best = std::min(best, gi + to_sink[id]);
    int i = int(id % n[0]), j = int((id / n[0]) % n[1]), k = int(id / (size_t(n[0]) * n[1]));
    double sdi = sd[id];
    for (size_t e = 0; e < offs.size(); ++e) {
      int a = i + offs[e].dx, b = j + offs[e].dy, c = k + offs[e].dz;
      if (a < 0 || b < 0 || c < 0 || a >= n[0] || b >= n[1] || c >= n[2]) continue;
      size_t jd = idx(a, b, c);
      if (!active[jd] || closed[jd]) continue;
      double L = elen[e];
      double w;
      if (std::abs(sdi) > L + 1e-6) w = sdi < 0 ? wmin * L : L;
      else w = segment_weighted_length(m, node(i, j, k), node(a, b, c));
      double ng = gi + w;
      if (ng < g[jd]) {
        g[jd] = ng;
        pq.push({ng + heur(jd), jd});
      }
    }
  }
  if (!std::isfinite(best)) fail(ErrorCode::OutOfBox, "lattice endpoints are not connected");
  return best;
}

}  // namespace glpin
