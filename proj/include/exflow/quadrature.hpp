#pragma once

#include <exflow/types.hpp>

#include <functional>
#include <vector>

namespace exflow {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
/// Newton iteration on P_n with the Chebyshev initial guess.
struct GaussRule {
  VecX nodes;
  VecX weights;

  explicit GaussRule(int n) : nodes(n), weights(n) {
    for (int i = 0; i < n; ++i) {
      Real x = std::cos(pi * (i + 0.75) / (n + 0.5));
      Real dp = 0;
      for (int it = 0; it < 100; ++it) {
        Real p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        Real dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[n - 1 - i] = x;
      weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

/// Gauss-Legendre rule mapped to [a, b].
struct MappedRule {
  VecX nodes;
  VecX weights;
  MappedRule(const GaussRule& g, Real a, Real b) {
    const Real c = 0.5 * (a + b), h = 0.5 * (b - a);
    nodes = (c + h * g.nodes.array()).matrix();
    weights = (h * g.weights.array()).matrix();
  }
};

/// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
inline Real adaptive_simpson(const std::function<Real(Real)>& f, Real a, Real b, Real tol,
                             int max_depth = 50) {
  struct Impl {
    const std::function<Real(Real)>& f;
    int max_depth;
    Real run(Real a, Real b, Real fa, Real fm, Real fb, Real whole, Real tol, int depth) const {
      const Real m = 0.5 * (a + b);
      const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const Real flm = f(lm), frm = f(rm);
      const Real left = (m - a) / 6.0 * (fa + 4 * flm + fm);
      const Real right = (b - m) / 6.0 * (fm + 4 * frm + fb);
      if (depth >= max_depth || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return run(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             run(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  };
  const Real fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const Real whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return Impl{f, max_depth}.run(a, b, fa, fm, fb, whole, tol, 0);
}

/// Finite-difference / interpolation weights on arbitrary nodes (Fornberg's
/// algorithm). Returns weights so that sum_j w[j] f(x[j]) approximates the
/// m-th derivative of f at z; m = 0 gives Lagrange interpolation weights.
inline VecX fornberg_weights(Real z, const VecX& x, int m) {
  const int n = static_cast<int>(x.size());
  MatX c = MatX::Zero(n, m + 1);
  Real c1 = 1.0, c4 = x[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    Real c2 = 1.0;
    const Real c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const Real c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

/// Geometric subdivision of [lo, hi] into n panels (lo > 0).
inline std::vector<Real> geometric_panels(Real lo, Real hi, int n) {
  std::vector<Real> e(n + 1);
  const Real q = std::pow(hi / lo, 1.0 / n);
  e[0] = lo;
  for (int i = 1; i <= n; ++i) e[i] = e[i - 1] * q;
  e[n] = hi;
  return e;
}

}  // namespace exflow
