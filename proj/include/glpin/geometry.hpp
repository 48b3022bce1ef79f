#pragma once

#include <array>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace glpin {

struct Halfspace {
  Vec3 normal;  //!< unit outward normal
  double offset = 0;  //!< body side: normal . x <= offset
};

struct Box {
  Vec3 lo, hi;
};

//! Ball or bounded polytope, optionally rounded (Minkowski sum with a ball).
class ConvexBody {
 public:
  enum class Kind { Ball, Polytope };

  static ConvexBody ball(const Vec3& center, double radius) {
    if (!(radius > 0) || !std::isfinite(radius)) fail(ErrorCode::InvalidScene, "ball radius must be positive");
    ConvexBody b;
    b.kind_ = Kind::Ball;
    b.center_ = center;
    b.radius_ = radius;
    return b;
  }

  //! Normals are renormalized; fails on unbounded or empty-interior input.
  static ConvexBody polytope(std::vector<Halfspace> hs, double rounding = 0) {
    if (hs.size() < 4) fail(ErrorCode::InvalidScene, "polytope needs at least 4 halfspaces");
    for (auto& h : hs) {
      double n = norm(h.normal);
      if (!(n > 0) || !std::isfinite(h.offset)) fail(ErrorCode::InvalidScene, "degenerate halfspace");
      h.normal = h.normal / n;
      h.offset /= n;
    }
    ConvexBody b;
    b.kind_ = Kind::Polytope;
    b.hs_ = std::move(hs);
    b.rounding_ = rounding;
    b.build_vertices();
    return b;
  }

  Kind kind() const { return kind_; }
  bool is_ball() const { return kind_ == Kind::Ball; }
  const Vec3& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Halfspace>& halfspaces() const { return hs_; }
  const std::vector<Vec3>& vertices() const { return verts_; }
  double rounding() const { return rounding_; }

  //! Minkowski sum with B(0, delta).
  ConvexBody dilated(double delta) const {
    if (delta == 0) return *this;
    ConvexBody b = *this;
    if (is_ball()) b.radius_ += delta;
    else b.rounding_ += delta;
    return b;
  }

  //! A point well inside the body.
  Vec3 interior_point() const { return is_ball() ? center_ : vcentroid_; }

  //! Exact euclidean signed distance (negative inside).
  double signed_distance(const Vec3& x) const {
    if (is_ball()) return dist(x, center_) - radius_;
    return polytope_signed_distance(x) - rounding_;
  }

  //! Closed membership with the global tolerance.
  bool contains(const Vec3& x, double tol = kMembershipTol) const { return signed_distance(x) <= tol; }

  //! Open membership: boundary (within tolerance) counts as outside.
  bool contains_open(const Vec3& x, double tol = kMembershipTol) const { return signed_distance(x) < -tol; }

  //! max over the body of u . x
  double support(const Vec3& u) const {
    if (is_ball()) return dot(u, center_) + radius_ * norm(u);
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : verts_) m = std::max(m, dot(u, v));
    return m + rounding_ * norm(u);
  }

  //! max over the body of |x - c|
  double max_distance_from(const Vec3& c) const {
    if (is_ball()) return dist(center_, c) + radius_;
    double m = 0;
    for (const auto& v : verts_) m = std::max(m, dist(v, c));
    return m + rounding_;
  }

  Box bounding_box() const {
    if (is_ball()) {
      Vec3 r{radius_, radius_, radius_};
      return {center_ - r, center_ + r};
    }
    Box bx{verts_[0], verts_[0]};
    for (const auto& v : verts_)
      for (int i = 0; i < 3; ++i) {
        bx.lo[i] = std::min(bx.lo[i], v[i]);
        bx.hi[i] = std::max(bx.hi[i], v[i]);
      }
    Vec3 r{rounding_, rounding_, rounding_};
    return {bx.lo - r, bx.hi + r};
  }

  //! Parameter interval [t0,t1] of segment a->b lying in the closed body, if any.
  std::optional<std::pair<double, double>> clip_segment(const Vec3& a, const Vec3& b) const {
    Vec3 d = b - a;
    if (is_ball()) {
      Vec3 f = a - center_;
      double A = dot(d, d), B = dot(f, d), C = dot(f, f) - radius_ * radius_;
      if (A == 0) {
        if (C <= 0) return std::make_pair(0.0, 1.0);
        return std::nullopt;
      }
      double disc = B * B - A * C;
      if (disc <= 0) return std::nullopt;
      double s = std::sqrt(disc);
      // numerically stable roots
      double q = -(B + std::copysign(s, B));
      double r1 = q / A, r2 = (q != 0) ? C / q : -B / A;
      double t0 = std::min(r1, r2), t1 = std::max(r1, r2);
      t0 = std::max(t0, 0.0);
      t1 = std::min(t1, 1.0);
      if (t0 >= t1) return std::nullopt;
      return std::make_pair(t0, t1);
    }
    if (rounding_ == 0) {
      double t0 = 0, t1 = 1;
      for (const auto& h : hs_) {
        double num = h.offset - dot(h.normal, a);
        double den = dot(h.normal, d);
        if (den == 0) {
          if (num < 0) return std::nullopt;
          continue;
        }
        double t = num / den;
        if (den > 0) t1 = std::min(t1, t);
        else t0 = std::max(t0, t);
        if (t0 >= t1) return std::nullopt;
      }
      return std::make_pair(t0, t1);
    }
    // rounded polytope: signed distance is convex along the segment
    auto f = [&](double t) { return signed_distance(a + d * t); };
    double lo = 0, hi = 1;
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    double f1 = f(m1), f2 = f(m2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) { hi = m2; m2 = m1; f2 = f1; m1 = hi - g * (hi - lo); f1 = f(m1); }
      else { lo = m1; m1 = m2; f1 = f2; m2 = lo + g * (hi - lo); f2 = f(m2); }
    }
    double tm = 0.5 * (lo + hi);
    if (f(0) < f(tm)) tm = 0;
    if (f(1) < f(tm)) tm = 1;
    if (f(tm) > 0) return std::nullopt;
    auto root = [&](double in, double out) {
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (in + out);
        if (f(mid) <= 0) in = mid;
        else out = mid;
      }
      return 0.5 * (in + out);
    };
    double t0 = f(0) <= 0 ? 0.0 : root(tm, 0.0);
    double t1 = f(1) <= 0 ? 1.0 : root(tm, 1.0);
    if (t0 >= t1) return std::nullopt;
    return std::make_pair(t0, t1);
  }

  //! Nearest point of the closure; with on_boundary, nearest boundary point.
  Vec3 project(const Vec3& x, bool on_boundary = false) const {
    if (is_ball()) {
      Vec3 d = x - center_;
      double n = norm(d);
      if (n <= radius_ && !on_boundary) return x;
      if (n == 0) return center_ + Vec3{radius_, 0, 0};
      return center_ + d * (radius_ / n);
    }
    Vec3 q = polytope_project(x);
    double dq = dist(x, q);
    bool inside_core = dq == 0;
    if (!inside_core) {
      if (dq <= rounding_) return on_boundary ? q + (x - q) * (rounding_ / dq) : x;
      return q + (x - q) * (rounding_ / dq);
    }
    if (!on_boundary) return x;
    // interior of the core polytope: push through the nearest facet
    size_t best = 0;
    double bm = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < hs_.size(); ++i) {
      double m = hs_[i].offset - dot(hs_[i].normal, x);
      if (m < bm) { bm = m; best = i; }
    }
    return x + hs_[best].normal * (bm + rounding_);
  }

  //! Boundary point hit by the ray from the interior point c along unit u.
  Vec3 ray_boundary(const Vec3& c, const Vec3& u) const {
    if (is_ball()) {
      Vec3 f = c - center_;
      double B = dot(f, u), C = dot(f, f) - radius_ * radius_;
      double t = -B + std::sqrt(std::max(0.0, B * B - C));
      return c + u * t;
    }
    double t = std::numeric_limits<double>::infinity();
    for (const auto& h : hs_) {
      double den = dot(h.normal, u);
      if (den > 0) t = std::min(t, (h.offset - dot(h.normal, c)) / den);
    }
    if (rounding_ == 0) return c + u * t;
    double lo = t, hi = t + rounding_ * 1.0000001 + 1e-12;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if (signed_distance(c + u * mid) <= 0) lo = mid;
      else hi = mid;
    }
    return c + u * (0.5 * (lo + hi));
  }

  std::string describe() const {
    std::ostringstream os;
    if (is_ball())
      os << "ball(center=(" << center_.x << "," << center_.y << "," << center_.z << "), r=" << radius_ << ")";
    else
      os << "polytope(" << hs_.size() << " halfspaces, " << verts_.size() << " vertices, rounding=" << rounding_ << ")";
    return os.str();
  }

 private:
  Kind kind_ = Kind::Ball;
  Vec3 center_;
  double radius_ = 0;
  std::vector<Halfspace> hs_;
  double rounding_ = 0;
  std::vector<Vec3> verts_;
  std::vector<std::vector<size_t>> vert_planes_;
  Vec3 vcentroid_;

  static std::optional<Vec3> solve3(const Halfspace& a, const Halfspace& b, const Halfspace& c) {
    const Vec3 &n1 = a.normal, &n2 = b.normal, &n3 = c.normal;
    double det = dot(n1, cross(n2, n3));
    if (std::abs(det) < 1e-12) return std::nullopt;
    Vec3 v = (cross(n2, n3) * a.offset + cross(n3, n1) * b.offset + cross(n1, n2) * c.offset) / det;
    return v;
  }

  void build_vertices() {
    const double big = 1e6;
    std::vector<Halfspace> all = hs_;
    for (int k = 0; k < 3; ++k) {
      Vec3 e;
      e[k] = 1;
      all.push_back({e, big});
      all.push_back({-e, big});
    }
    verts_.clear();
    vert_planes_.clear();
    const size_t n = all.size();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        for (size_t k = j + 1; k < n; ++k) {
          auto v = solve3(all[i], all[j], all[k]);
          if (!v) continue;
          bool ok = true;
          for (const auto& h : all)
            if (dot(h.normal, *v) > h.offset + 1e-9) { ok = false; break; }
          if (!ok) continue;
          if (i >= hs_.size() || j >= hs_.size() || k >= hs_.size())
            fail(ErrorCode::InvalidScene, "polytope is unbounded");
          bool dup = false;
          for (const auto& w : verts_)
            if (dist(w, *v) < 1e-9) { dup = true; break; }
          if (!dup) verts_.push_back(*v);
        }
    if (verts_.size() < 4) fail(ErrorCode::InvalidScene, "polytope is empty or degenerate");
    for (const auto& v : verts_) {
      std::vector<size_t> pl;
      for (size_t i = 0; i < hs_.size(); ++i)
        if (std::abs(dot(hs_[i].normal, v) - hs_[i].offset) < 1e-9) pl.push_back(i);
      vert_planes_.push_back(std::move(pl));
    }
    Vec3 c;
    for (const auto& v : verts_) c += v;
    vcentroid_ = c / static_cast<double>(verts_.size());
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& h : hs_) margin = std::min(margin, h.offset - dot(h.normal, vcentroid_));
    if (!(margin > 1e-9)) fail(ErrorCode::InvalidScene, "polytope has empty interior");
  }

  bool feasible(const Vec3& q, double tol = 1e-10) const {
    for (const auto& h : hs_)
      if (dot(h.normal, q) > h.offset + tol) return false;
    return true;
  }

  //! Euclidean projection onto the core polytope (no rounding).
  Vec3 polytope_project(const Vec3& x) const {
    if (feasible(x, 0)) return x;
    Vec3 best = verts_[0];
    double bd = dist(x, best);
    auto consider = [&](const Vec3& q) {
      double d = dist(x, q);
      if (d < bd) { bd = d; best = q; }
    };
    for (const auto& v : verts_) consider(v);
    for (const auto& h : hs_) {
      Vec3 q = x - h.normal * (dot(h.normal, x) - h.offset);
      if (feasible(q)) consider(q);
    }
    for (size_t a = 0; a < verts_.size(); ++a)
      for (size_t b = a + 1; b < verts_.size(); ++b) {
        int shared = 0;
        for (size_t p : vert_planes_[a])
          for (size_t q : vert_planes_[b])
            if (p == q) ++shared;
        if (shared < 2) continue;
        Vec3 d = verts_[b] - verts_[a];
        double t = std::clamp(dot(x - verts_[a], d) / dot(d, d), 0.0, 1.0);
        consider(verts_[a] + d * t);
      }
    return best;
  }

  double polytope_signed_distance(const Vec3& x) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& h : hs_) m = std::max(m, dot(h.normal, x) - h.offset);
    if (m <= 0) return m;
    return dist(x, polytope_project(x));
  }
};

//! Omega, the inclusion omega, and the contrast b.
struct Scene {
  ConvexBody omega;
  ConvexBody inclusion;
  double b = 0.5;
  double clearance = 0;  //!< dist(boundary of inclusion, boundary of omega); filled by make_scene
};

struct SingularityData {
  std::vector<Vec3> positives;
  std::vector<Vec3> negatives;

  size_t k() const { return positives.size(); }
  //! 2k points: positives then negatives.
  std::vector<Vec3> all() const {
    std::vector<Vec3> v = positives;
    v.insert(v.end(), negatives.begin(), negatives.end());
    return v;
  }
};

struct ValidationReport {
  bool valid = true;
  double clearance = 0;
  double b = 0;
  bool inclusion_strictly_convex = true;
  std::vector<std::string> warnings;
};

//! dist(boundary of inner, boundary of outer) assuming inner lies inside outer; negative otherwise.
inline double boundary_clearance(const ConvexBody& outer, const ConvexBody& inner) {
  if (outer.is_ball()) return outer.radius() - inner.max_distance_from(outer.center());
  double c = std::numeric_limits<double>::infinity();
  for (const auto& h : outer.halfspaces()) c = std::min(c, h.offset - inner.support(h.normal));
  return c;
}

inline ValidationReport validate_scene(const Scene& s) {
  ValidationReport r;
  r.b = s.b;
  if (!(s.b > 0 && s.b < 1)) fail(ErrorCode::InvalidScene, "b must lie strictly in (0,1)");
  if (s.omega.rounding() != 0) fail(ErrorCode::InvalidScene, "omega must not be a rounded body");
  r.clearance = boundary_clearance(s.omega, s.inclusion);
  if (!(r.clearance > kMembershipTol))
    fail(ErrorCode::InvalidScene, "inclusion closure is not contained in the interior of omega");
  if (!s.inclusion.is_ball()) {
    r.inclusion_strictly_convex = false;
    r.warnings.push_back("polytope inclusion is not strictly convex; geodesic uniqueness is not guaranteed");
  }
  return r;
}

inline Scene make_scene(ConvexBody omega, ConvexBody inclusion, double b) {
  Scene s{std::move(omega), std::move(inclusion), b, 0};
  s.clearance = validate_scene(s).clearance;
  return s;
}

//! a(x): b strictly inside the inclusion, 1 elsewhere (including its boundary).
inline double pinning(const Scene& s, const Vec3& x) { return s.inclusion.contains_open(x) ? s.b : 1.0; }

inline ConvexBody dilate_inclusion(const Scene& s, double delta) {
  if (delta < 0) fail(ErrorCode::BadInput, "delta must be nonnegative");
  if (delta >= s.clearance / 2) fail(ErrorCode::DeltaTooLarge, "delta must be below clearance/2");
  return s.inclusion.dilated(delta);
}

//! The scene with the inclusion replaced by its delta-dilation.
inline Scene dilated_scene(const Scene& s, double delta) {
  if (delta == 0) return s;
  Scene d = s;
  d.inclusion = dilate_inclusion(s, delta);
  d.clearance = boundary_clearance(d.omega, d.inclusion);
  return d;
}

inline Vec3 project_boundary(const ConvexBody& body, const Vec3& x, bool on_boundary = false) {
  return body.project(x, on_boundary);
}

//! Projects the points onto the boundary of omega and checks cardinality and distinctness.
inline SingularityData validate_singularities(const Scene& s, SingularityData d, double load_tol = 1e-6) {
  if (d.positives.empty() || d.positives.size() != d.negatives.size())
    fail(ErrorCode::InvalidSingularities, "need k >= 1 positive and k negative singularities");
  auto fix = [&](Vec3& p) {
    Vec3 q = s.omega.project(p, true);
    if (dist(p, q) > load_tol) fail(ErrorCode::InvalidSingularities, "singularity is not on the boundary of omega");
    p = q;
  };
  for (auto& p : d.positives) fix(p);
  for (auto& p : d.negatives) fix(p);
  auto all = d.all();
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j)
      if (dist(all[i], all[j]) < kMembershipTol) fail(ErrorCode::InvalidSingularities, "singularities must be distinct");
  return d;
}

}  // namespace glpin
