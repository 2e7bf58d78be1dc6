#pragma once

#include <exflow/geometry.hpp>
#include <exflow/quadrature.hpp>
#include <exflow/types.hpp>

#include <memory>
#include <vector>

namespace exflow {

enum class GridBlend { Algebraic, RadialLog };
enum class Ring { Obstacle, Outer };

/// Analytic derivatives of the grid mapping x(theta, sigma) at one point.
struct MapDerivs {
  Vec2 x, x_th, x_sg, x_thth, x_thsg, x_sgsg;
  Real det;  // signed x_th ∧ x_sg
};

/// One domain quadrature point: weight includes |det J|.
struct QPoint {
  Real th, sg;
  Vec2 x;
  Real w;
};

/// One boundary quadrature point: weight includes the arc-length element.
struct BQPoint {
  Real th;
  Vec2 x;
  Real w;
  Vec2 tau, n;  // ccw tangent, normal into the fluid annulus
  Real chi;     // convex-positive curvature of the ring
};

/// Boundary-fitted grid on the truncated domain: the obstacle boundary
/// rho(theta) is blended to the circle of radius R over sigma in [0,1].
class CurvilinearGrid {
 public:
  CurvilinearGrid(RadiusFn rho, Real R, int n_theta, int n_sigma, int quad_order = 4,
                  GridBlend blend = GridBlend::Algebraic)
      : rho_(std::move(rho)),
        R_(R),
        nt_(n_theta),
        ns_(n_sigma),
        q_(quad_order),
        blend_(blend) {
    if (nt_ < 8 || ns_ < 8) throw ParameterError("grid resolution too low (need >= 8 nodes per direction)");
    if (q_ < 2) throw ParameterError("quadrature order must be at least 2");
    Real rho_max = 0;
    for (int i = 0; i < 512; ++i) rho_max = std::max(rho_max, rho_(two_pi * i / 512));
    if (R_ <= rho_max) throw ParameterError("truncation radius R must exceed the obstacle radius");
    theta_.resize(nt_);
    for (int j = 0; j < nt_; ++j) theta_[j] = two_pi * j / nt_;
    sigma_.resize(ns_);
    for (int k = 0; k < ns_; ++k) sigma_[k] = static_cast<Real>(k) / (ns_ - 1);
    build_sigma_weights();
  }

  int n_theta() const { return nt_; }
  int n_sigma() const { return ns_; }
  Real truncation_radius() const { return R_; }
  int quad_order() const { return q_; }
  GridBlend blend() const { return blend_; }
  const RadiusFn& radius_fn() const { return rho_; }
  Real theta(int j) const { return theta_[j]; }
  Real sigma(int k) const { return sigma_[k]; }
  Real h_theta() const { return two_pi / nt_; }
  Real h_sigma() const { return 1.0 / (ns_ - 1); }

  MapDerivs map_derivs(Real th, Real sg) const {
    const auto rv = rho_.eval(th);
    const Real rho = rv[0], rho1 = rv[1], rho2 = rv[2];
    Real r, r_t, r_s, r_tt, r_ts, r_ss;
    if (blend_ == GridBlend::Algebraic) {
      r = (1 - sg) * rho + sg * R_;
      r_t = (1 - sg) * rho1;
      r_s = R_ - rho;
      r_tt = (1 - sg) * rho2;
      r_ts = -rho1;
      r_ss = 0.0;
    } else {
      const Real w = std::log(R_ / rho);
      const Real e = std::exp(sg * w);
      r = rho * e;
      r_t = e * rho1 * (1 - sg);
      r_s = r * w;
      r_tt = e * (1 - sg) * (rho2 - sg * rho1 * rho1 / rho);
      r_ts = e * rho1 * (w * (1 - sg) - 1.0);
      r_ss = r * w * w;
    }
    const Vec2 er(std::cos(th), std::sin(th));
    const Vec2 et(-std::sin(th), std::cos(th));
    MapDerivs d;
    d.x = r * er;
    d.x_th = r_t * er + r * et;
    d.x_sg = r_s * er;
    d.x_thth = (r_tt - r) * er + 2 * r_t * et;
    d.x_thsg = r_ts * er + r_s * et;
    d.x_sgsg = r_ss * er;
    d.det = cross2(d.x_th, d.x_sg);  // = -r * r_s
    return d;
  }

  Vec2 map(Real th, Real sg) const { return map_derivs(th, sg).x; }
  Vec2 node(int j, int k) const { return map(theta_[j], sigma_[k]); }

  /// r * dr/dsigma > 0 everywhere (mapping regularity).
  Real jacobian_det(Real th, Real sg) const { return -map_derivs(th, sg).det; }

  /// Rows of J^{-1}: grad theta and grad sigma as functions of position.
  void inverse_jacobian(const MapDerivs& d, Vec2& grad_th, Vec2& grad_sg) const {
    grad_th = Vec2(d.x_sg.y(), -d.x_sg.x()) / d.det;
    grad_sg = Vec2(-d.x_th.y(), d.x_th.x()) / d.det;
  }

  /// Reference coordinates of a physical point inside the annulus.
  std::pair<Real, Real> inverse(const Vec2& x) const {
    const Real th = wrap_angle(std::atan2(x.y(), x.x()));
    const Real r = x.norm();
    const Real rho = rho_(th);
    Real sg;
    if (blend_ == GridBlend::Algebraic)
      sg = (r - rho) / (R_ - rho);
    else
      sg = std::log(r / rho) / std::log(R_ / rho);
    return {th, sg};
  }

  BoundaryFrame ring_frame(Ring ring, Real th) const {
    if (ring == Ring::Obstacle) return detail::frame_at_theta(rho_, th);
    BoundaryFrame f;
    f.theta = th;
    f.x = R_ * Vec2(std::cos(th), std::sin(th));
    f.tau = Vec2(-std::sin(th), std::cos(th));
    f.n = Vec2(-std::cos(th), -std::sin(th));  // into the annulus
    f.chi = 1.0 / R_;
    return f;
  }

  const std::vector<QPoint>& domain_quadrature() const {
    if (qpts_.empty()) {
      const GaussRule g(q_);
      qpts_.reserve(static_cast<size_t>(nt_) * (ns_ - 1) * q_ * q_);
      for (int j = 0; j < nt_; ++j) {
        const Real ta = theta_[j], tb = ta + h_theta();
        const MappedRule qt(g, ta, tb);
        for (int k = 0; k + 1 < ns_; ++k) {
          const MappedRule qs(g, sigma_[k], sigma_[k + 1]);
          for (int a = 0; a < q_; ++a)
            for (int b = 0; b < q_; ++b) {
              const Real th = qt.nodes[a], sg = qs.nodes[b];
              const MapDerivs d = map_derivs(th, sg);
              qpts_.push_back({th, sg, d.x, qt.weights[a] * qs.weights[b] * std::abs(d.det)});
            }
        }
      }
    }
    return qpts_;
  }

  const std::vector<BQPoint>& boundary_quadrature(Ring ring) const {
    auto& pts = (ring == Ring::Obstacle) ? bq_obstacle_ : bq_outer_;
    if (pts.empty()) {
      const GaussRule g(std::max(q_, 4));
      const int nq = static_cast<int>(g.nodes.size());
      for (int j = 0; j < nt_; ++j) {
        const MappedRule qt(g, theta_[j], theta_[j] + h_theta());
        for (int a = 0; a < nq; ++a) {
          const Real th = qt.nodes[a];
          const BoundaryFrame f = ring_frame(ring, th);
          Real speed;
          if (ring == Ring::Obstacle) {
            const auto rv = rho_.eval(th);
            speed = std::hypot(rv[0], rv[1]);
          } else {
            speed = R_;
          }
          pts.push_back({th, f.x, qt.weights[a] * speed, f.tau, f.n, f.chi});
        }
      }
    }
    return pts;
  }

  // ---- node finite differences (4th order; one-sided sigma closures) ----

  /// d/dtheta of node values (periodic 5-point central stencil).
  ArrayXX dtheta(const ArrayXX& v, int order = 1) const {
    const Real h = h_theta();
    ArrayXX out(ns_, nt_);
    for (int j = 0; j < nt_; ++j) {
      const int jm2 = wrap_index(j - 2, nt_), jm1 = wrap_index(j - 1, nt_);
      const int jp1 = wrap_index(j + 1, nt_), jp2 = wrap_index(j + 2, nt_);
      if (order == 1)
        out.col(j) =
            (v.col(jm2) - 8 * v.col(jm1) + 8 * v.col(jp1) - v.col(jp2)) / (12 * h);
      else
        out.col(j) = (-v.col(jm2) + 16 * v.col(jm1) - 30 * v.col(j) + 16 * v.col(jp1) -
                      v.col(jp2)) /
                     (12 * h * h);
    }
    return out;
  }

  /// d/dsigma of node values (5/6-point stencils, one-sided at the edges).
  ArrayXX dsigma(const ArrayXX& v, int order = 1) const {
    const auto& W = (order == 1) ? w1_ : w2_;
    const auto& off = offsets_;
    ArrayXX out(ns_, nt_);
    const int sw = stencil_size_;
    for (int k = 0; k < ns_; ++k) {
      out.row(k).setZero();
      for (int m = 0; m < sw; ++m) out.row(k) += W(k, m) * v.row(off[k] + m);
    }
    return out;
  }

  /// Interpolate node values to an arbitrary reference point (degree-5 tensor
  /// Lagrange stencil; theta periodic).
  Real interpolate(const ArrayXX& v, Real th, Real sg) const {
    constexpr int m = 6;
    th = wrap_angle(th);
    const Real ht = h_theta(), hs = h_sigma();
    int j0 = static_cast<int>(std::floor(th / ht)) - (m / 2 - 1);
    int k0 = std::clamp(static_cast<int>(std::floor(sg / hs)) - (m / 2 - 1), 0, ns_ - m);
    VecX xt(m), xs(m);
    for (int i = 0; i < m; ++i) xt[i] = (j0 + i) * ht;
    for (int i = 0; i < m; ++i) xs[i] = (k0 + i) * hs;
    const VecX wt = fornberg_weights(th, xt, 0);
    const VecX ws = fornberg_weights(sg, xs, 0);
    Real acc = 0;
    for (int a = 0; a < m; ++a) {
      const int j = wrap_index(j0 + a, nt_);
      Real row = 0;
      for (int b = 0; b < m; ++b) row += ws[b] * v(k0 + b, j);
      acc += wt[a] * row;
    }
    return acc;
  }

  /// Integral of an analytic function over the annulus.
  template <class F>
  Real integrate(F&& f) const {
    Real acc = 0;
    for (const QPoint& p : domain_quadrature()) acc += p.w * f(p);
    return acc;
  }

 private:
  void build_sigma_weights() {
    stencil_size_ = 6;
    const int sw = stencil_size_;
    w1_.resize(ns_, sw);
    w2_.resize(ns_, sw);
    offsets_.resize(ns_);
    const Real hs = h_sigma();
    for (int k = 0; k < ns_; ++k) {
      const int o = std::clamp(k - sw / 2 + 1, 0, ns_ - sw);
      offsets_[k] = o;
      VecX xs(sw);
      for (int m = 0; m < sw; ++m) xs[m] = (o + m) * hs;
      w1_.row(k) = fornberg_weights(sigma_[k], xs, 1).transpose();
      w2_.row(k) = fornberg_weights(sigma_[k], xs, 2).transpose();
    }
  }

  RadiusFn rho_;
  Real R_;
  int nt_, ns_, q_;
  GridBlend blend_;
  ArrayX theta_, sigma_;
  MatX w1_, w2_;
  std::vector<int> offsets_;
  int stencil_size_ = 6;
  mutable std::vector<QPoint> qpts_;
  mutable std::vector<BQPoint> bq_obstacle_, bq_outer_;
};

}  // namespace exflow
