#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace exflow {

using Real = double;

using Vec2 = Eigen::Matrix<Real, 2, 1>;
using Mat2 = Eigen::Matrix<Real, 2, 2>;
using VecX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using ArrayXX = Eigen::Array<Real, Eigen::Dynamic, Eigen::Dynamic>;
using ArrayX = Eigen::Array<Real, Eigen::Dynamic, 1>;

inline constexpr Real pi = std::numbers::pi_v<Real>;
inline constexpr Real two_pi = 2.0 * std::numbers::pi_v<Real>;

/// Rotate a vector by +90 degrees: perp((a,b)) = (-b, a).
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// 2D scalar cross product a ∧ b = a_x b_y - a_y b_x.
inline Real cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Wrap an angle into [0, 2π).
inline Real wrap_angle(Real t) {
  t = std::fmod(t, two_pi);
  return t < 0 ? t + two_pi : t;
}

/// Wrap an integer index into [0, n).
inline int wrap_index(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BasisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace exflow
