#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <algorithm>

namespace glpin {

inline constexpr const char* kVersion = "0.4.1";

//! Geometric membership tolerance.
inline constexpr double kMembershipTol = 1e-9;
//! Tolerance on unit normals.
inline constexpr double kNormalTol = 1e-12;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  bool operator==(const Vec3&) const = default;
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

//! Unit vector; returns zero for (near) zero input.
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return n > 0 ? a / n : Vec3{};
}

//! Some unit vector orthogonal to a (a nonzero).
inline Vec3 any_orthogonal(const Vec3& a) {
  Vec3 t = std::abs(a.x) < 0.9 * norm(a) ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return normalized(cross(a, t));
}

enum class ErrorCode {
  InvalidScene,
  InvalidSingularities,
  DeltaTooLarge,
  DegenerateEndpoints,
  OutOfBox,
  NonSquare,
  NegativeEntry,
  GapPositive,
  KTouchesSingularity,
  InfeasiblePotential,
  KernelWiderThanMargin,
  EtaBudgetInfeasible,
  MOnAxis,
  NoConvergence,
  MeshTooCoarse,
  FitDegenerate,
  ShapeMismatch,
  TraceNotUnimodular,
  TubesOverlap,
  StripConditionFailed,
  ProfileUnavailable,
  BadInput,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::InvalidSingularities: return "InvalidSingularities";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::DegenerateEndpoints: return "DegenerateEndpoints";
    case ErrorCode::OutOfBox: return "OutOfBox";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::GapPositive: return "GapPositive";
    case ErrorCode::KTouchesSingularity: return "KTouchesSingularity";
    case ErrorCode::InfeasiblePotential: return "InfeasiblePotential";
    case ErrorCode::KernelWiderThanMargin: return "KernelWiderThanMargin";
    case ErrorCode::EtaBudgetInfeasible: return "EtaBudgetInfeasible";
    case ErrorCode::MOnAxis: return "MOnAxis";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TraceNotUnimodular: return "TraceNotUnimodular";
    case ErrorCode::TubesOverlap: return "TubesOverlap";
    case ErrorCode::StripConditionFailed: return "StripConditionFailed";
    case ErrorCode::ProfileUnavailable: return "ProfileUnavailable";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

//! True for failures of numerical procedures (as opposed to bad input).
inline bool is_numerical(ErrorCode c) {
  return c == ErrorCode::NoConvergence || c == ErrorCode::EtaBudgetInfeasible ||
         c == ErrorCode::FitDegenerate || c == ErrorCode::GapPositive;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace glpin
