#pragma once

#include <array>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "geometry.hpp"

namespace glpin {

//! Worker count from GLPIN_THREADS (default: hardware concurrency).
inline unsigned thread_count() {
  if (const char* e = std::getenv("GLPIN_THREADS")) {
    int n = std::atoi(e);
    if (n > 0) return static_cast<unsigned>(n);
  }
  unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

//! Runs fn(i) for i in [0, n) on a pool; results must be written per index.
template <class F>
void parallel_for(size_t n, F&& fn) {
  unsigned T = std::min<size_t>(thread_count(), n ? n : 1);
  if (T <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < T; ++t)
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct GridSpec {
  Vec3 origin;
  double h = 0;
  std::array<int, 3> dims{0, 0, 0};

  size_t size() const { return size_t(dims[0]) * dims[1] * dims[2]; }
  size_t index(int i, int j, int k) const { return (size_t(k) * dims[1] + j) * dims[0] + i; }
  Vec3 node(int i, int j, int k) const { return origin + Vec3{i * h, j * h, k * h}; }
  bool operator==(const GridSpec& o) const {
    return dims == o.dims && origin == o.origin && h == o.h;
  }
};

//! Regular lattice over the bounding box of a body expanded by pad (default 2h).
inline GridSpec grid_for(const ConvexBody& omega, double h, double pad = -1) {
  if (!(h > 0)) fail(ErrorCode::BadInput, "grid step must be positive");
  if (pad < 0) pad = 2 * h;
  pad = h * std::ceil(pad / h - 1e-9);
  Box bb = omega.bounding_box();
  GridSpec g;
  g.h = h;
  g.origin = bb.lo - Vec3{pad, pad, pad};
  for (int k = 0; k < 3; ++k) g.dims[k] = static_cast<int>(std::ceil((bb.hi[k] - bb.lo[k] + 2 * pad) / h - 1e-9)) + 1;
  return g;
}

//! Trilinear interpolation of node values; clamps to the grid.
inline double trilinear(const GridSpec& g, const std::vector<double>& v, const Vec3& x) {
  double f[3];
  int i0[3];
  for (int k = 0; k < 3; ++k) {
    double t = (x[k] - g.origin[k]) / g.h;
    t = std::clamp(t, 0.0, double(g.dims[k] - 1));
    i0[k] = std::min(static_cast<int>(std::floor(t)), g.dims[k] - 2);
    f[k] = t - i0[k];
  }
  double s = 0;
  for (int c = 0; c < 8; ++c) {
    int a = c & 1, b = (c >> 1) & 1, d = (c >> 2) & 1;
    double w = (a ? f[0] : 1 - f[0]) * (b ? f[1] : 1 - f[1]) * (d ? f[2] : 1 - f[2]);
    s += w * v[g.index(i0[0] + a, i0[1] + b, i0[2] + d)];
  }
  return s;
}

}  // namespace glpin
