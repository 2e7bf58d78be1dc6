#pragma once

#include <exflow/grid.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <string>

namespace exflow {

/// Scalar samples at grid nodes, values(k, j) at (sigma_k, theta_j).
struct ScalarField {
  const CurvilinearGrid* grid = nullptr;
  ArrayXX v;

  ScalarField() = default;
  explicit ScalarField(const CurvilinearGrid& g) : grid(&g), v(ArrayXX::Zero(g.n_sigma(), g.n_theta())) {}
  ScalarField(const CurvilinearGrid& g, ArrayXX values) : grid(&g), v(std::move(values)) {}

  template <class F>
  static ScalarField sample(const CurvilinearGrid& g, F&& f) {
    ScalarField s(g);
    for (int j = 0; j < g.n_theta(); ++j)
      for (int k = 0; k < g.n_sigma(); ++k) s.v(k, j) = f(g.node(j, k));
    return s;
  }
};

/// Cartesian vector components at grid nodes.
struct VectorField {
  const CurvilinearGrid* grid = nullptr;
  ArrayXX x, y;
  std::optional<Real> div_free_tol;  // declared divergence-free bound, if any

  VectorField() = default;
  explicit VectorField(const CurvilinearGrid& g)
      : grid(&g), x(ArrayXX::Zero(g.n_sigma(), g.n_theta())), y(ArrayXX::Zero(g.n_sigma(), g.n_theta())) {}

  template <class F>
  static VectorField sample(const CurvilinearGrid& g, F&& f) {
    VectorField s(g);
    for (int j = 0; j < g.n_theta(); ++j)
      for (int k = 0; k < g.n_sigma(); ++k) {
        const Vec2 val = f(g.node(j, k));
        s.x(k, j) = val.x();
        s.y(k, j) = val.y();
      }
    return s;
  }
};

/// Symmetric tensor D(v) = {v_i,j + v_j,i} (no factor 1/2).
struct SymTensorField {
  const CurvilinearGrid* grid = nullptr;
  ArrayXX d11, d12, d22;
};

struct HessianField {
  const CurvilinearGrid* grid = nullptr;
  ArrayXX h11, h12, h22;
};

namespace detail {

struct NodeMetric {
  ArrayXX gth_x, gth_y, gsg_x, gsg_y;  // grad theta, grad sigma components
  ArrayXX det;                         // signed
  ArrayXX xth_x, xth_y, xsg_x, xsg_y;
  ArrayXX hx_tt, hx_ts, hx_ss, hy_tt, hy_ts, hy_ss;  // mapping second derivatives
};

inline NodeMetric node_metric(const CurvilinearGrid& g) {
  const int ns = g.n_sigma(), nt = g.n_theta();
  NodeMetric m;
  for (ArrayXX* a : {&m.gth_x, &m.gth_y, &m.gsg_x, &m.gsg_y, &m.det, &m.xth_x, &m.xth_y,
                     &m.xsg_x, &m.xsg_y, &m.hx_tt, &m.hx_ts, &m.hx_ss, &m.hy_tt, &m.hy_ts,
                     &m.hy_ss})
    a->resize(ns, nt);
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < ns; ++k) {
      const MapDerivs d = g.map_derivs(g.theta(j), g.sigma(k));
      Vec2 gth, gsg;
      g.inverse_jacobian(d, gth, gsg);
      m.gth_x(k, j) = gth.x();
      m.gth_y(k, j) = gth.y();
      m.gsg_x(k, j) = gsg.x();
      m.gsg_y(k, j) = gsg.y();
      m.det(k, j) = d.det;
      m.xth_x(k, j) = d.x_th.x();
      m.xth_y(k, j) = d.x_th.y();
      m.xsg_x(k, j) = d.x_sg.x();
      m.xsg_y(k, j) = d.x_sg.y();
      m.hx_tt(k, j) = d.x_thth.x();
      m.hx_ts(k, j) = d.x_thsg.x();
      m.hx_ss(k, j) = d.x_sgsg.x();
      m.hy_tt(k, j) = d.x_thth.y();
      m.hy_ts(k, j) = d.x_thsg.y();
      m.hy_ss(k, j) = d.x_sgsg.y();
    }
  return m;
}

inline const NodeMetric& metric_cache(const CurvilinearGrid& g) {
  // one cache entry per grid object (grids are immutable once built)
  static thread_local const CurvilinearGrid* key = nullptr;
  static thread_local NodeMetric cached;
  if (key != &g) {
    cached = node_metric(g);
    key = &g;
  }
  return cached;
}

}  // namespace detail

/// Cartesian gradient of a scalar field via the mapping chain rule.
inline VectorField gradient(const ScalarField& f) {
  const CurvilinearGrid& g = *f.grid;
  const auto& m = detail::metric_cache(g);
  const ArrayXX ft = g.dtheta(f.v), fs = g.dsigma(f.v);
  VectorField out(g);
  out.x = ft * m.gth_x + fs * m.gsg_x;
  out.y = ft * m.gth_y + fs * m.gsg_y;
  return out;
}

/// perp gradient: u = (-df/dx2, df/dx1); stream-function velocity.
inline VectorField perp_gradient(const ScalarField& f) {
  VectorField grad = gradient(f);
  VectorField out(*f.grid);
  out.x = -grad.y;
  out.y = grad.x;
  out.div_free_tol = 1e-10;
  return out;
}

/// Divergence in mimetic flux form: div v = (1/det)[Dth(v ∧ x_sg) + Dsg(x_th ∧ v)].
/// Composed with perp_gradient this vanishes to round-off by construction.
inline ScalarField divergence(const VectorField& v) {
  const CurvilinearGrid& g = *v.grid;
  const auto& m = detail::metric_cache(g);
  const ArrayXX Fth = v.x * m.xsg_y - v.y * m.xsg_x;
  const ArrayXX Fsg = m.xth_x * v.y - m.xth_y * v.x;
  ScalarField out(g);
  out.v = (g.dtheta(Fth) + g.dsigma(Fsg)) / m.det;
  return out;
}

/// Scalar curl rot v = v2,1 - v1,2, computed as div((v2, -v1)).
inline ScalarField rot(const VectorField& v) {
  VectorField w(*v.grid);
  w.x = v.y;
  w.y = -v.x;
  return divergence(w);
}

/// Full Cartesian Hessian of a scalar field (chain rule with the analytic
/// mapping second derivatives).
inline HessianField hessian(const ScalarField& f) {
  const CurvilinearGrid& g = *f.grid;
  const auto& m = detail::metric_cache(g);
  const ArrayXX ft = g.dtheta(f.v), fs = g.dsigma(f.v);
  const ArrayXX ftt = g.dtheta(f.v, 2), fss = g.dsigma(f.v, 2);
  const ArrayXX fts = g.dsigma(g.dtheta(f.v));
  const ArrayXX fx = ft * m.gth_x + fs * m.gsg_x;
  const ArrayXX fy = ft * m.gth_y + fs * m.gsg_y;
  // reference Hessian minus curvature of the mapping
  const ArrayXX att = ftt - fx * m.hx_tt - fy * m.hy_tt;
  const ArrayXX ats = fts - fx * m.hx_ts - fy * m.hy_ts;
  const ArrayXX ass = fss - fx * m.hx_ss - fy * m.hy_ss;
  HessianField out;
  out.grid = &g;
  // H_x = J^{-T} A J^{-1}, expanded with rows of J^{-1}
  out.h11 = att * m.gth_x * m.gth_x + 2 * ats * m.gth_x * m.gsg_x + ass * m.gsg_x * m.gsg_x;
  out.h12 = att * m.gth_x * m.gth_y + ats * (m.gth_x * m.gsg_y + m.gth_y * m.gsg_x) +
            ass * m.gsg_x * m.gsg_y;
  out.h22 = att * m.gth_y * m.gth_y + 2 * ats * m.gth_y * m.gsg_y + ass * m.gsg_y * m.gsg_y;
  return out;
}

inline ScalarField laplacian(const ScalarField& f) {
  const HessianField h = hessian(f);
  ScalarField out(*f.grid);
  out.v = h.h11 + h.h22;
  return out;
}

/// D(v) = {v_i,j + v_j,i} per entry (no 1/2).
inline SymTensorField sym_gradient(const VectorField& v) {
  const CurvilinearGrid& g = *v.grid;
  const VectorField gx = gradient(ScalarField(g, v.x));
  const VectorField gy = gradient(ScalarField(g, v.y));
  SymTensorField out;
  out.grid = &g;
  out.d11 = 2 * gx.x;
  out.d22 = 2 * gy.y;
  out.d12 = gx.y + gy.x;
  return out;
}

inline ScalarField sym_gradient_sq(const VectorField& v) {
  const SymTensorField d = sym_gradient(v);
  ScalarField out(*v.grid);
  out.v = d.d11 * d.d11 + 2 * d.d12 * d.d12 + d.d22 * d.d22;
  return out;
}

inline ScalarField grad_sq(const VectorField& v) {
  const CurvilinearGrid& g = *v.grid;
  const VectorField gx = gradient(ScalarField{&g, v.x});
  const VectorField gy = gradient(ScalarField{&g, v.y});
  ScalarField out(g);
  out.v = gx.x * gx.x + gx.y * gx.y + gy.x * gy.x + gy.y * gy.y;
  return out;
}

/// Quadrature of node values over the annulus (interpolating to Gauss points).
inline Real integrate_domain(const ScalarField& f) {
  const CurvilinearGrid& g = *f.grid;
  Real acc = 0;
  for (const QPoint& p : g.domain_quadrature()) acc += p.w * g.interpolate(f.v, p.th, p.sg);
  return acc;
}

/// Quadrature over the unit reference rectangle (no Jacobian); used to test
/// polynomial exactness of the rule itself.
inline Real integrate_reference(const CurvilinearGrid& g, const ArrayXX& values) {
  const GaussRule gr(g.quad_order());
  Real acc = 0;
  for (int j = 0; j < g.n_theta(); ++j) {
    const MappedRule qt(gr, g.theta(j), g.theta(j) + g.h_theta());
    for (int k = 0; k + 1 < g.n_sigma(); ++k) {
      const MappedRule qs(gr, g.sigma(k), g.sigma(k + 1));
      for (int a = 0; a < g.quad_order(); ++a)
        for (int b = 0; b < g.quad_order(); ++b)
          acc += qt.weights[a] * qs.weights[b] * g.interpolate(values, qt.nodes[a], qs.nodes[b]);
    }
  }
  return acc;
}

/// Values on a ring as a function of theta at the grid's theta nodes.
struct BoundaryScalar {
  const CurvilinearGrid* grid = nullptr;
  Ring ring = Ring::Obstacle;
  ArrayX v;  // size n_theta
};

inline Real integrate_boundary(const BoundaryScalar& f) {
  const CurvilinearGrid& g = *f.grid;
  // 1D periodic interpolation of node values to the boundary Gauss points
  Real acc = 0;
  const Real ht = g.h_theta();
  const int nt = g.n_theta();
  for (const BQPoint& p : g.boundary_quadrature(f.ring)) {
    constexpr int m = 6;
    const int j0 = static_cast<int>(std::floor(p.th / ht)) - (m / 2 - 1);
    VecX xt(m);
    for (int i = 0; i < m; ++i) xt[i] = (j0 + i) * ht;
    const VecX wt = fornberg_weights(p.th, xt, 0);
    Real val = 0;
    for (int a = 0; a < m; ++a) val += wt[a] * f.v[wrap_index(j0 + a, nt)];
    acc += p.w * val;
  }
  return acc;
}

/// Tangential and normal traces of a vector field on a ring, at theta nodes.
/// tau is the ccw tangent; n points into the fluid annulus.
struct BoundaryTrace {
  ArrayX v_tau;
  ArrayX v_n;
};

inline BoundaryTrace boundary_trace(const VectorField& v, Ring ring = Ring::Obstacle) {
  const CurvilinearGrid& g = *v.grid;
  const int nt = g.n_theta();
  const int k = (ring == Ring::Obstacle) ? 0 : g.n_sigma() - 1;
  BoundaryTrace out{ArrayX(nt), ArrayX(nt)};
  for (int j = 0; j < nt; ++j) {
    const BoundaryFrame f = g.ring_frame(ring, g.theta(j));
    const Vec2 val(v.x(k, j), v.y(k, j));
    out.v_tau[j] = val.dot(f.tau);
    out.v_n[j] = val.dot(f.n);
  }
  return out;
}

/// Normal derivative of a scalar field on a ring (n into the fluid annulus).
inline ArrayX normal_derivative(const ScalarField& f, Ring ring = Ring::Obstacle) {
  const CurvilinearGrid& g = *f.grid;
  const VectorField grad = gradient(f);
  const int nt = g.n_theta();
  const int k = (ring == Ring::Obstacle) ? 0 : g.n_sigma() - 1;
  ArrayX out(nt);
  for (int j = 0; j < nt; ++j) {
    const BoundaryFrame fr = g.ring_frame(ring, g.theta(j));
    out[j] = Vec2(grad.x(k, j), grad.y(k, j)).dot(fr.n);
  }
  return out;
}

/// Declare a field divergence-free after checking the discrete residual.
inline VectorField& flag_divergence_free(VectorField& v, Real tol) {
  const ScalarField d = divergence(v);
  const Real res = d.v.abs().maxCoeff();
  if (res > tol) throw ParameterError("divergence-free declaration violated: residual " +
                                      std::to_string(res) + " exceeds " + std::to_string(tol));
  v.div_free_tol = tol;
  return v;
}

/// CSV dump: header then one row per node.
inline void write_field_csv(const std::string& path, const CurvilinearGrid& g,
                            const std::vector<std::pair<std::string, const ArrayXX*>>& cols) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "theta_index,sigma_index,x1,x2";
  for (const auto& [name, ptr] : cols) os << "," << name;
  os << "\n";
  os << std::setprecision(17);
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_sigma(); ++k) {
      const Vec2 x = g.node(j, k);
      os << j << "," << k << "," << x.x() << "," << x.y();
      for (const auto& [name, ptr] : cols) os << "," << (*ptr)(k, j);
      os << "\n";
    }
}

}  // namespace exflow
