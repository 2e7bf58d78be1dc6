#pragma once

#include <exflow/types.hpp>

#include <array>
#include <vector>

namespace exflow {

/// Values and derivatives of the four nonzero basis functions of a cubic
/// B-spline basis at one point. `index[j]` is the global function index of
/// column j; `d[m](j)` is the m-th derivative of that function.
struct BsplineLocal {
  std::array<int, 4> index{};
  int count = 0;
  std::array<Eigen::Matrix<Real, 4, 1>, 4> d{};  // d[m][j], m = 0..3
};

namespace detail {

/// Cardinal cubic B-spline on [0,4): value and derivatives w.r.t. u.
inline void cardinal_cubic(Real u, Real out[4]) {
  out[0] = out[1] = out[2] = out[3] = 0.0;
  if (u < 0 || u >= 4) return;
  if (u < 1) {
    out[0] = u * u * u / 6.0;
    out[1] = u * u / 2.0;
    out[2] = u;
    out[3] = 1.0;
  } else if (u < 2) {
    const Real t = u - 1;
    out[0] = (1 + 3 * t + 3 * t * t - 3 * t * t * t) / 6.0;
    out[1] = (3 + 6 * t - 9 * t * t) / 6.0;
    out[2] = 1 - 3 * t;
    out[3] = -3.0;
  } else if (u < 3) {
    const Real t = u - 2;
    out[0] = (4 - 6 * t * t + 3 * t * t * t) / 6.0;
    out[1] = (-12 * t + 9 * t * t) / 6.0;
    out[2] = -2 + 3 * t;
    out[3] = 3.0;
  } else {
    const Real t = u - 3;
    out[0] = (1 - t) * (1 - t) * (1 - t) / 6.0;
    out[1] = -(1 - t) * (1 - t) / 2.0;
    out[2] = 1 - t;
    out[3] = -1.0;
  }
}

}  // namespace detail

/// Periodic uniform cubic B-spline basis: n_funcs wrapped translates of the
/// cardinal spline over a period. Valid for any n_funcs >= 1 (for small
/// counts a translate wraps onto itself and the contributions accumulate).
class PeriodicCubicBasis {
 public:
  PeriodicCubicBasis(int n_funcs, Real period) : n_(n_funcs), period_(period), h_(period / n_funcs) {}

  int size() const { return n_; }
  Real span() const { return h_; }

  /// Value and derivatives (w.r.t. x) of function k at x.
  void eval_one(int k, Real x, Real out[4]) const { eval_scaled(k, x, out); }

  /// All functions with support containing x.
  BsplineLocal eval(Real x) const {
    BsplineLocal loc;
    if (n_ <= 4) {
      for (int k = 0; k < n_; ++k) {
        Real v[4];
        eval_scaled(k, x, v);
        loc.index[loc.count] = k;
        for (int m = 0; m < 4; ++m) loc.d[m](loc.count) = v[m];
        ++loc.count;
      }
      return loc;
    }
    const int base = static_cast<int>(std::floor(x / h_));
    for (int j = 0; j < 4; ++j) {
      const int k = wrap_index(base - j, n_);
      Real v[4];
      eval_scaled(k, x, v);
      loc.index[loc.count] = k;
      for (int m = 0; m < 4; ++m) loc.d[m](loc.count) = v[m];
      ++loc.count;
    }
    return loc;
  }

 private:
  void eval_scaled(int k, Real x, Real out[4]) const {
    out[0] = out[1] = out[2] = out[3] = 0.0;
    Real u = (x - k * h_) / h_;
    u -= std::floor(u / n_) * n_;
    Real piece[4];
    for (; u < 4.0; u += n_) {
      detail::cardinal_cubic(u, piece);
      Real s = 1.0;
      for (int m = 0; m < 4; ++m) {
        out[m] += piece[m] * s;
        s /= h_;
      }
    }
  }

  int n_;
  Real period_;
  Real h_;
};

/// Clamped cubic B-spline basis on [0,1] with n_seg uniform knot spans.
/// n_seg + 3 functions; only the first is nonzero at 0 and only the last at 1.
class ClampedCubicBasis {
 public:
  explicit ClampedCubicBasis(int n_seg) : n_seg_(n_seg) {
    if (n_seg < 1) throw BasisError("clamped B-spline basis needs at least one knot span");
    knots_.resize(n_seg + 7);
    for (int i = 0; i < 4; ++i) knots_[i] = 0.0;
    for (int i = 1; i < n_seg; ++i) knots_[3 + i] = static_cast<Real>(i) / n_seg;
    for (int i = 0; i < 4; ++i) knots_[n_seg + 3 + i] = 1.0;
  }

  int size() const { return n_seg_ + 3; }
  int segments() const { return n_seg_; }

  /// Nonzero functions and derivatives up to order 3 at x in [0,1]
  /// (The NURBS Book, algorithm A2.3, degree 3).
  BsplineLocal eval(Real x) const {
    constexpr int p = 3;
    x = std::min(std::max(x, 0.0), 1.0);
    int span = find_span(x);

    Real ndu[p + 1][p + 1], left[p + 1], right[p + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
      left[j] = x - knots_[span + 1 - j];
      right[j] = knots_[span + j] - x;
      Real saved = 0.0;
      for (int r = 0; r < j; ++r) {
        ndu[j][r] = right[r + 1] + left[j - r];
        const Real temp = ndu[r][j - 1] / ndu[j][r];
        ndu[r][j] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      ndu[j][j] = saved;
    }

    Real ders[p + 1][p + 1];
    for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
    for (int r = 0; r <= p; ++r) {
      Real a[2][p + 1];
      int s1 = 0, s2 = 1;
      a[0][0] = 1.0;
      for (int k = 1; k <= p; ++k) {
        Real d = 0.0;
        const int rk = r - k, pk = p - k;
        if (r >= k) {
          a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
          d = a[s2][0] * ndu[rk][pk];
        }
        const int j1 = (rk >= -1) ? 1 : -rk;
        const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
        for (int j = j1; j <= j2; ++j) {
          a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
          d += a[s2][j] * ndu[rk + j][pk];
        }
        if (r <= pk) {
          a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
          d += a[s2][k] * ndu[r][pk];
        }
        ders[k][r] = d;
        std::swap(s1, s2);
      }
    }
    Real f = p;
    for (int k = 1; k <= p; ++k) {
      for (int j = 0; j <= p; ++j) ders[k][j] *= f;
      f *= (p - k);
    }

    BsplineLocal loc;
    loc.count = 4;
    for (int j = 0; j <= p; ++j) {
      loc.index[j] = span - p + j;
      for (int m = 0; m < 4; ++m) loc.d[m](j) = ders[m][j];
    }
    return loc;
  }

  const std::vector<Real>& knots() const { return knots_; }

 private:
  int find_span(Real x) const {
    if (x >= 1.0) return n_seg_ + 2;
    const int i = static_cast<int>(std::floor(x * n_seg_));
    return std::min(i, n_seg_ - 1) + 3;
  }

  int n_seg_;
  std::vector<Real> knots_;
};

}  // namespace exflow
