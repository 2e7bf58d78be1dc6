#pragma once

#include <exflow/quadrature.hpp>
#include <exflow/types.hpp>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace exflow {

/// Radius function rho(theta) of a star-shaped obstacle boundary, with
/// analytic derivatives up to order 3. eval(theta) = (rho, rho', rho'', rho''').
class RadiusFn {
 public:
  using Eval = std::function<Eigen::Matrix<Real, 4, 1>(Real)>;

  RadiusFn() = default;
  explicit RadiusFn(Eval e) : eval_(std::move(e)) {}

  Eigen::Matrix<Real, 4, 1> eval(Real theta) const { return eval_(theta); }
  Real operator()(Real theta) const { return eval_(theta)[0]; }

  static RadiusFn circle(Real r) {
    return RadiusFn([r](Real) { return Eigen::Matrix<Real, 4, 1>(r, 0, 0, 0); });
  }

  /// Ellipse with semi-axes a (x1) and b (x2) in polar form about the origin.
  static RadiusFn ellipse(Real a, Real b) {
    return RadiusFn([a, b](Real th) {
      const Real d = a * a - b * b;
      const Real s2 = std::sin(2 * th);
      const Real q = b * b + d * std::sin(th) * std::sin(th);
      const Real q1 = d * s2;
      const Real q2 = 2 * d * std::cos(2 * th);
      const Real q3 = -4 * d * s2;
      const Real ab = a * b;
      Eigen::Matrix<Real, 4, 1> out;
      out[0] = ab * std::pow(q, -0.5);
      out[1] = ab * (-0.5) * std::pow(q, -1.5) * q1;
      out[2] = ab * (0.75 * std::pow(q, -2.5) * q1 * q1 - 0.5 * std::pow(q, -1.5) * q2);
      out[3] = ab * (-1.875 * std::pow(q, -3.5) * q1 * q1 * q1 +
                     2.25 * std::pow(q, -2.5) * q1 * q2 - 0.5 * std::pow(q, -1.5) * q3);
      return out;
    });
  }

  /// Truncated Fourier series c0 + sum_k (a_k cos k th + b_k sin k th),
  /// coefficients ordered [c0, a1, b1, a2, b2, ...].
  static RadiusFn fourier(std::vector<Real> coeffs) {
    return RadiusFn([c = std::move(coeffs)](Real th) {
      Eigen::Matrix<Real, 4, 1> out = Eigen::Matrix<Real, 4, 1>::Zero();
      if (!c.empty()) out[0] = c[0];
      for (size_t i = 1; i < c.size(); i += 2) {
        const int k = static_cast<int>((i + 1) / 2);
        const Real a = c[i];
        const Real b = (i + 1 < c.size()) ? c[i + 1] : 0.0;
        const Real ck = std::cos(k * th), sk = std::sin(k * th);
        out[0] += a * ck + b * sk;
        out[1] += k * (-a * sk + b * ck);
        out[2] += k * k * (-a * ck - b * sk);
        out[3] += k * k * k * (a * sk - b * ck);
      }
      return out;
    });
  }

 private:
  Eval eval_;
};

/// Point, frame and curvature of the boundary at one arc-length parameter.
/// tau is the counterclockwise unit tangent, n the unit normal into the fluid
/// (away from the obstacle); (n, tau) is a right-handed pair and n' = chi tau.
struct BoundaryFrame {
  Vec2 x;
  Vec2 tau;
  Vec2 n;
  Real chi;
  Real theta;  // polar angle of the point
};

namespace detail {

/// Frame and curvature of the curve rho(theta) e_r(theta) at polar angle theta.
inline BoundaryFrame frame_at_theta(const RadiusFn& rho, Real theta) {
  const auto r = rho.eval(theta);
  const Vec2 er(std::cos(theta), std::sin(theta));
  const Vec2 et(-std::sin(theta), std::cos(theta));
  const Real speed = std::hypot(r[0], r[1]);
  BoundaryFrame f;
  f.theta = theta;
  f.x = r[0] * er;
  f.tau = (r[1] * er + r[0] * et) / speed;
  f.n = Vec2(f.tau.y(), -f.tau.x());
  f.chi = (r[0] * r[0] + 2 * r[1] * r[1] - r[0] * r[2]) / (speed * speed * speed);
  return f;
}

inline Real speed_at_theta(const RadiusFn& rho, Real theta) {
  const auto r = rho.eval(theta);
  return std::hypot(r[0], r[1]);
}

}  // namespace detail

/// Closed obstacle boundary with unit-speed (arc length) parameterization.
/// The curve is traversed counterclockwise; t1 in [0, L).
class BoundaryCurve {
 public:
  BoundaryCurve(RadiusFn rho, int n_samples, int table_size = 1024)
      : rho_(std::move(rho)), n_samples_(n_samples) {
    if (n_samples < 16) throw GeometryError("arc-length parameterization needs n_samples >= 16");
    const int m = std::max(table_size, 4 * n_samples);
    // positivity check
    for (int i = 0; i < 4 * m; ++i) {
      if (rho_(two_pi * i / (4 * m)) <= 0.0)
        throw GeometryError("invalid geometry: radius function must be strictly positive");
    }
    theta_table_.resize(m + 1);
    cumlen_.resize(m + 1);
    cumlen_[0] = 0.0;
    auto speed = [this](Real th) { return detail::speed_at_theta(rho_, th); };
    for (int i = 0; i < m; ++i) {
      theta_table_[i] = two_pi * i / m;
      const Real a = theta_table_[i], b = two_pi * (i + 1) / m;
      cumlen_[i + 1] = cumlen_[i] + adaptive_simpson(speed, a, b, 1e-14);
    }
    theta_table_[m] = two_pi;
    length_ = cumlen_[m];
    init_points_.reserve(256);
    for (int i = 0; i < 256; ++i)
      init_points_.push_back(detail::frame_at_theta(rho_, two_pi * i / 256).x);
  }

  Real length() const { return length_; }
  const RadiusFn& radius_fn() const { return rho_; }
  int n_samples() const { return n_samples_; }

  /// Uniform arc-length sample parameters t1_i = i L / n, i = 0..n-1.
  std::vector<Real> samples() const {
    std::vector<Real> s(n_samples_);
    for (int i = 0; i < n_samples_; ++i) s[i] = length_ * i / n_samples_;
    return s;
  }

  /// Polar angle theta(t1) of the arc-length parameterization.
  Real theta_of(Real t1) const {
    t1 -= std::floor(t1 / length_) * length_;
    // bracketing table interval
    int lo = 0, hi = static_cast<int>(cumlen_.size()) - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (cumlen_[mid] <= t1 ? lo : hi) = mid;
    }
    const GaussRule& g = gauss16();
    Real th = theta_table_[lo] +
              (t1 - cumlen_[lo]) / detail::speed_at_theta(rho_, theta_table_[lo]);
    for (int it = 0; it < 30; ++it) {
      const MappedRule q(g, theta_table_[lo], th);
      Real acc = cumlen_[lo];
      for (int k = 0; k < q.nodes.size(); ++k)
        acc += q.weights[k] * detail::speed_at_theta(rho_, q.nodes[k]);
      const Real err = acc - t1;
      const Real step = err / detail::speed_at_theta(rho_, th);
      th -= step;
      if (std::abs(step) < 1e-15 * two_pi) break;
    }
    return th;
  }

  BoundaryFrame frame(Real t1) const { return detail::frame_at_theta(rho_, theta_of(t1)); }
  Vec2 point(Real t1) const { return frame(t1).x; }
  Real curvature(Real t1) const { return frame(t1).chi; }

  Real max_abs_curvature(int scan = 1024) const {
    Real m = 0;
    for (int i = 0; i < scan; ++i)
      m = std::max(m, std::abs(detail::frame_at_theta(rho_, two_pi * i / scan).chi));
    return m;
  }

  /// Arc-length parameter of the point on the curve closest to x
  /// (dense scan plus Newton refinement of the normal-projection equation).
  Real project(const Vec2& x) const {
    int best = 0;
    Real bd = std::numeric_limits<Real>::max();
    const int n = static_cast<int>(init_points_.size());
    for (int i = 0; i < n; ++i) {
      const Real d = (x - init_points_[i]).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    Real th = two_pi * best / n;
    for (int it = 0; it < 40; ++it) {
      const BoundaryFrame f = detail::frame_at_theta(rho_, th);
      const Real sp = detail::speed_at_theta(rho_, th);
      const Vec2 d = x - f.x;
      const Real g = d.dot(f.tau);                 // d/dt1 of |x - s|^2 / (-2)
      const Real gp = -1.0 - f.chi * d.dot(f.n);   // dg/dt1
      const Real step = g / gp;
      th -= step / sp;                             // dt1 = sp * dtheta
      if (std::abs(step) < 1e-15) break;
    }
    // convert theta back to t1 by cumulative length
    return arclen_at_theta(th);
  }

  Real distance(const Vec2& x) const {
    const Real t1 = project(x);
    return (x - point(t1)).norm();
  }

  Real arclen_at_theta(Real th) const {
    th = wrap_angle(th);
    const int m = static_cast<int>(cumlen_.size()) - 1;
    int lo = std::min(static_cast<int>(th / two_pi * m), m - 1);
    while (lo > 0 && theta_table_[lo] > th) --lo;
    while (lo < m - 1 && theta_table_[lo + 1] <= th) ++lo;
    const MappedRule q(gauss16(), theta_table_[lo], th);
    Real acc = cumlen_[lo];
    for (int k = 0; k < q.nodes.size(); ++k)
      acc += q.weights[k] * detail::speed_at_theta(rho_, q.nodes[k]);
    return acc;
  }

 private:
  static const GaussRule& gauss16() {
    static const GaussRule g(16);
    return g;
  }

  RadiusFn rho_;
  int n_samples_;
  Real length_ = 0;
  std::vector<Real> theta_table_;
  std::vector<Real> cumlen_;
  std::vector<Vec2> init_points_;
};

inline BoundaryCurve arc_length_parameterize(const RadiusFn& rho, int n_samples) {
  return BoundaryCurve(rho, n_samples);
}

/// Tubular neighborhood coordinates p(t1, t2) = s(t1) + t2 n(t1), 0 <= t2 <= zeta.
class TubularMap {
 public:
  TubularMap(const BoundaryCurve& curve, Real zeta) : curve_(&curve), zeta_(zeta) {
    if (zeta <= 0) throw GeometryError("tubular strip width must be positive");
  }

  const BoundaryCurve& curve() const { return *curve_; }
  Real zeta() const { return zeta_; }

  Vec2 forward(Real t1, Real t2) const {
    const BoundaryFrame f = curve_->frame(t1);
    return f.x + t2 * f.n;
  }

  struct StripCoords {
    Real t1;
    Real t2;
  };

  /// Inverse of the tubular map. Returns nothing when x is outside the strip
  /// (the far field or the obstacle interior) -- an out-of-strip signal.
  std::optional<StripCoords> inverse(const Vec2& x, Real tol = 1e-12) const {
    const Real t1 = curve_->project(x);
    const BoundaryFrame f = curve_->frame(t1);
    const Real t2 = (x - f.x).dot(f.n);
    if (t2 < -tol || t2 > zeta_ + tol) return std::nullopt;
    return StripCoords{t1, std::clamp(t2, 0.0, zeta_)};
  }

  /// Columns are dp/dt1 = (1 + t2 chi) tau and dp/dt2 = n.
  Mat2 jacobian(Real t1, Real t2) const {
    const BoundaryFrame f = curve_->frame(t1);
    Mat2 J;
    J.col(0) = (1.0 + t2 * f.chi) * f.tau;
    J.col(1) = f.n;
    return J;
  }
};

/// Strip half-width: curvature cap 0.5 / max|chi|, reduced if the sampled
/// distance identity dist(p(t1,t2), boundary) = t2 fails (self-intersection).
inline Real choose_zeta(const BoundaryCurve& curve) {
  Real zeta = 0.5 / curve.max_abs_curvature();
  const Real tol = 1e-8 * curve.length();
  auto strip_ok = [&](Real z) {
    for (int i = 0; i < 96; ++i) {
      const Real t1 = curve.length() * i / 96;
      for (Real frac : {0.25, 0.5, 0.75, 1.0}) {
        const BoundaryFrame f = curve.frame(t1);
        const Vec2 p = f.x + z * frac * f.n;
        if (std::abs(curve.distance(p) - z * frac) > tol) return false;
      }
    }
    return true;
  };
  for (int halvings = 0; halvings < 30; ++halvings) {
    if (strip_ok(zeta)) return zeta;
    zeta *= 0.5;
  }
  throw GeometryError("degenerate curve: no injective tubular strip found");
}

}  // namespace exflow
