#pragma once

#include "spinconn/frames.hpp"
#include "spinconn/lorentz_cover.hpp"
#include "spinconn/report.hpp"
#include "spinconn/scenario.hpp"
#include "spinconn/tensor_core.hpp"

#include <array>
#include <functional>
#include <vector>

namespace spinconn {

inline TensorSignature sig_G_upper() { return {1, 0, 1, 0, 0, 1, 2}; }
inline TensorSignature sig_G_lower() { return {0, 1, 0, 1, 1, 0, 2}; }

inline SpinTensor matrix_to_tensor(const CMat& m, const TensorSignature& sig) {
  SpinTensor t(sig);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t.raw(i, j) = m(i, j);
  return t;
}

inline CMat tensor_to_matrix(const SpinTensor& t) {
  const auto& s = t.signature();
  if (s.rank() != 2) throw std::invalid_argument("rank-2 tensor expected");
  CMat m(s.extent(0), s.extent(1));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = t.raw(i, j);
  return m;
}

/// G^q_{i ibar} = sum G^{j jbar}_k g^{kq} d_{ji} dbar_{jbar ibar}.
inline SpinTensor lower_G(const SpinTensor& g_upper, const Mat4& g_inv, const CMat& d) {
  SpinTensor out(sig_G_lower());
  const CMat db = d.conjugate();
  for (int q = 0; q < 4; ++q)
    for (int i = 0; i < 2; ++i)
      for (int ib = 0; ib < 2; ++ib) {
        cplx acc{0.0, 0.0};
        for (int j = 0; j < 2; ++j)
          for (int jb = 0; jb < 2; ++jb)
            for (int k = 0; k < 4; ++k) acc += g_upper.raw(j, jb, k) * g_inv(k, q) * d(j, i) * db(jb, ib);
        out.raw(i, ib, q) = acc;
      }
  return out;
}

struct ChiralConstants {
  CMat d_lower, d_upper, dbar_lower, dbar_upper;
  SpinTensor G_upper{sig_G_upper()};  ///< G^{i ibar}_q, slots (i, ibar, q)
  SpinTensor G_lower{sig_G_lower()};  ///< G^q_{i ibar}, slots (i, ibar, q)
};

/// Canonical tables: d = [[0,1],[-1,0]], G^{i ibar}_q = (sigma_q)_{i ibar}, and the fixed lower-index table.
inline const ChiralConstants& canonical_chiral_constants() {
  static const ChiralConstants c = [] {
    ChiralConstants k;
    k.d_lower = CMat(2, 2);
    k.d_lower << 0, 1, -1, 0;
    k.d_upper = CMat(2, 2);
    k.d_upper << 0, -1, 1, 0;
    k.dbar_lower = k.d_lower.conjugate();
    k.dbar_upper = k.d_upper.conjugate();
    const auto& s = pauli();
    for (int q = 0; q < 4; ++q)
      for (int i = 0; i < 2; ++i)
        for (int ib = 0; ib < 2; ++ib) k.G_upper.raw(i, ib, q) = s[q](i, ib);
    const cplx I{0.0, 1.0};
    const std::array<std::array<cplx, 4>, 4> lower{{{1, 0, 0, 1}, {0, 1, 1, 0}, {0, I, -I, 0}, {1, 0, 0, -1}}};
    for (int q = 0; q < 4; ++q)
      for (int i = 0; i < 2; ++i)
        for (int ib = 0; ib < 2; ++ib) k.G_lower.raw(i, ib, q) = lower[q][2 * i + ib];
    return k;
  }();
  return c;
}

/// d, G components and the metric in one frame pair.
struct ChiralStructure {
  Mat4 g = minkowski(), g_inv = minkowski();
  CMat d, d_inv;
  SpinTensor G_upper{sig_G_upper()}, G_lower{sig_G_lower()};
};

inline ChiralStructure canonical_chiral_structure() {
  const auto& c = canonical_chiral_constants();
  ChiralStructure s;
  s.d = c.d_lower;
  s.d_inv = c.d_upper;
  s.G_upper = c.G_upper;
  s.G_lower = c.G_lower;
  return s;
}

/**
 * @brief Residuals of the G-symbol identities in the given frame pair.
 *
 * With `tol` = 0 on canonical constants every check must be exactly zero.
 */
inline ResidualReport verify_chiral_identities(const ChiralStructure& s, double tol = 0.0) {
  ResidualReport rep;
  const auto& Gu = s.G_upper;
  const SpinTensor Gl = lower_G(Gu, s.g_inv, s.d);
  const CMat db = s.d.conjugate();
  const CMat dbu = s.d_inv.conjugate();
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  rep.add("G_lower_matches_raised_table", max_abs_diff(Gl, s.G_lower), tol);

  double real_u = 0.0, real_l = 0.0;
  for (int q = 0; q < 4; ++q)
    for (int i = 0; i < 2; ++i)
      for (int ib = 0; ib < 2; ++ib) {
        real_u = std::max(real_u, std::abs(Gu.raw(i, ib, q) - std::conj(Gu.raw(ib, i, q))));
        real_l = std::max(real_l, std::abs(Gl.raw(i, ib, q) - std::conj(Gl.raw(ib, i, q))));
      }
  rep.add("G_upper_reality", real_u, tol);
  rep.add("G_lower_reality", real_l, tol);

  double r_low = 0.0, r_up = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int ib = 0; ib < 2; ++ib)
      for (int j = 0; j < 2; ++j)
        for (int jb = 0; jb < 2; ++jb) {
          cplx a{0.0, 0.0}, b{0.0, 0.0};
          for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) {
              a += s.g(p, q) * Gl.raw(i, ib, p) * Gl.raw(j, jb, q);
              b += s.g_inv(p, q) * Gu.raw(i, ib, p) * Gu.raw(j, jb, q);
            }
          r_low = std::max(r_low, std::abs(a - 2.0 * s.d(i, j) * db(ib, jb)));
          r_up = std::max(r_up, std::abs(b - 2.0 * s.d_inv(i, j) * dbu(ib, jb)));
        }
  rep.add("G_lower_metric_contraction", r_low, tol);
  rep.add("G_upper_inverse_metric_contraction", r_up, tol);

  double r_gu = 0.0, r_gl = 0.0, r_tan = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      cplx a{0.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0};
      for (int i = 0; i < 2; ++i)
        for (int ib = 0; ib < 2; ++ib) {
          c += Gu.raw(i, ib, p) * Gl.raw(i, ib, q);
          for (int j = 0; j < 2; ++j)
            for (int jb = 0; jb < 2; ++jb) {
              a += s.d(i, j) * db(ib, jb) * Gu.raw(i, ib, p) * Gu.raw(j, jb, q);
              b += s.d_inv(i, j) * dbu(ib, jb) * Gl.raw(i, ib, p) * Gl.raw(j, jb, q);
            }
        }
      r_gu = std::max(r_gu, std::abs(a - 2.0 * s.g(p, q)));
      r_gl = std::max(r_gl, std::abs(b - 2.0 * s.g_inv(p, q)));
      r_tan = std::max(r_tan, std::abs(c - 2.0 * delta(p, q)));
    }
  rep.add("spin_metric_G_upper_contraction", r_gu, tol);
  rep.add("spin_metric_G_lower_contraction", r_gl, tol);
  rep.add("G_completeness_tangent", r_tan, tol);

  double r_spin = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int ib = 0; ib < 2; ++ib)
      for (int j = 0; j < 2; ++j)
        for (int jb = 0; jb < 2; ++jb) {
          cplx a{0.0, 0.0};
          for (int q = 0; q < 4; ++q) a += Gu.raw(i, ib, q) * Gl.raw(j, jb, q);
          r_spin = std::max(r_spin, std::abs(a - 2.0 * delta(i, j) * delta(ib, jb)));
        }
  rep.add("G_completeness_spinor", r_spin, tol);
  return rep;
}

/**
 * @brief Connection coefficients (Gamma, A, Abar) at one point.
 *
 * gamma[i](k,j) = Gamma^k_ij and a[i](k,j) = A^k_ij, where i is the
 * differentiation direction. Matrix indices are 0-based.
 */
struct SpinorConnection {
  int spinor_dim = 2;
  std::array<CMat4, 4> gamma;
  std::array<CMat, 4> a, abar;

  static SpinorConnection zero(int dim) {
    SpinorConnection c;
    c.spinor_dim = dim;
    for (int i = 0; i < 4; ++i) {
      c.gamma[i].setZero();
      c.a[i] = CMat::Zero(dim, dim);
      c.abar[i] = CMat::Zero(dim, dim);
    }
    return c;
  }

  double max_abs() const {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
      r = std::max({r, gamma[i].cwiseAbs().maxCoeff(), a[i].cwiseAbs().maxCoeff(), abar[i].cwiseAbs().maxCoeff()});
    return r;
  }

  /// max of |Im Gamma| and |Abar - conj(A)|.
  double reality_residual() const {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
      r = std::max({r, gamma[i].imag().cwiseAbs().maxCoeff(), (abar[i] - a[i].conjugate()).cwiseAbs().maxCoeff()});
    return r;
  }
};

inline double max_abs_diff(const SpinorConnection& x, const SpinorConnection& y) {
  double r = 0.0;
  for (int i = 0; i < 4; ++i)
    r = std::max({r, (x.gamma[i] - y.gamma[i]).cwiseAbs().maxCoeff(), (x.a[i] - y.a[i]).cwiseAbs().maxCoeff(),
                  (x.abar[i] - y.abar[i]).cwiseAbs().maxCoeff()});
  return r;
}

using SpinTensorField = std::function<SpinTensor(const Point&)>;

/**
 * @brief Covariant derivative of a spin-tensor field; the new direction index is the last lower tangent slot.
 *
 * Upper spinor slots get +A, lower spinor slots -A, barred slots the same with Abar,
 * tangent slots the same with Gamma.
 */
inline SpinTensor covariant_derivative(const SpinTensorField& x, const SpinorConnection& conn, const FrameField& frame,
                                       const Point& p, const DerivativeOptions& opt) {
  const SpinTensor x0 = x(p);
  const auto& s = x0.signature();
  const bool has_spinor_slots = s.alpha + s.beta + s.nu + s.gamma > 0;
  if (has_spinor_slots && s.spinor_dim != conn.spinor_dim)
    throw std::invalid_argument("field and connection spinor_dim differ");
  const auto lx = lie_derivatives(x, frame, p, opt);
  TensorSignature out_sig = s;
  ++out_sig.n;
  SpinTensor y(out_sig);
  for (int k = 0; k < 4; ++k) {
    SpinTensor yk = lx[k];
    for (int slot = 0; slot < s.rank(); ++slot) {
      const bool up = s.variance(slot) == Variance::upper;
      switch (s.family(slot)) {
        case Family::spinor:
          yk += up ? apply_to_slot(x0, slot, conn.a[k]) : apply_to_slot(x0, slot, CMat(-conn.a[k].transpose()));
          break;
        case Family::barred:
          yk += up ? apply_to_slot(x0, slot, conn.abar[k]) : apply_to_slot(x0, slot, CMat(-conn.abar[k].transpose()));
          break;
        case Family::tangent:
          yk += up ? apply_to_slot(x0, slot, conn.gamma[k])
                   : apply_to_slot(x0, slot, CMat4(-conn.gamma[k].transpose()));
          break;
      }
    }
    for (std::size_t f = 0; f < yk.size(); ++f) y.data()[f * 4 + static_cast<std::size_t>(k)] = yk.data()[f];
  }
  return y;
}

inline SpinTensor covariant_derivative(const SpinTensorField& x, const SpinorConnection& conn, const Scenario& sc,
                                       const Point& p) {
  return covariant_derivative(x, conn, sc.frame_field(), p, sc.deriv);
}

/// Metric data the tangent part of a metric connection is built from.
struct MetricGeometry {
  Mat4 g, g_inv;
  std::array<Mat4, 4> lg;  ///< lg[r] = L_r(g)
  Tensor3 c;               ///< structural constants of the working frame
  Tensor3 torsion;
};

inline MetricGeometry metric_geometry(const Scenario& sc, const Point& p) {
  MetricGeometry m;
  m.g = sc.metric(p);
  require_invertible(m.g, "metric");
  m.g_inv = m.g.inverse();
  const FrameField frame = sc.frame_field();
  m.lg = lie_derivatives([&sc](const Point& q) { return sc.metric(q); }, frame, p, sc.deriv);
  m.c = structural_constants(frame, p, sc.deriv);
  m.torsion = sc.torsion_at(p);
  return m;
}

/**
 * @brief Gamma for a prescribed antisymmetric part K = (Gamma^k_ij - Gamma^k_ji)/2.
 *
 * Gamma^k_ij = g^{kr}(L_i g_jr + L_j g_ri - L_r g_ij)/2 + K^k_ij - g^{kr} K^s_ir g_sj - g^{kr} K^s_jr g_si.
 */
inline std::array<CMat4, 4> gamma_from_skew(const MetricGeometry& m, const Tensor3& skew) {
  std::array<CMat4, 4> out;
  for (int i = 0; i < 4; ++i) {
    Mat4 gi = Mat4::Zero();
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) {
        double v = skew(k, i, j);
        for (int r = 0; r < 4; ++r) {
          v += 0.5 * m.g_inv(k, r) * (m.lg[i](j, r) + m.lg[j](r, i) - m.lg[r](i, j));
          for (int s = 0; s < 4; ++s)
            v -= m.g_inv(k, r) * (skew(s, i, r) * m.g(s, j) + skew(s, j, r) * m.g(s, i));
        }
        gi(k, j) = v;
      }
    out[i] = gi.cast<cplx>();
  }
  return out;
}

/**
 * Gamma of the metric connection with the scenario's torsion. The skew part is
 * (T + c)/2, which makes T^k_ij = Gamma^k_ij - Gamma^k_ji - c^k_ij the torsion.
 */
inline std::array<CMat4, 4> metric_gamma(const MetricGeometry& m) {
  Tensor3 skew;
  for (int k = 0; k < 4; ++k) skew.slice[k] = 0.5 * (m.torsion.slice[k] + m.c.slice[k]);
  return gamma_from_skew(m, skew);
}

/// (Gamma^k_ij - Gamma^k_ji)/2 of a real Gamma.
inline Tensor3 skew_part(const std::array<CMat4, 4>& gamma) {
  Tensor3 t;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t(k, i, j) = 0.5 * (gamma[i](k, j).real() - gamma[j](k, i).real());
  return t;
}

inline ChiralStructure chiral_structure(const Scenario& sc, const Point& p) {
  if (sc.spinor_dim != 2) throw std::invalid_argument("chiral structure needs spinor_dim 2");
  const auto& c = canonical_chiral_constants();
  const TransitionValue tv = sc.transition().at(p);
  ChiralStructure s;
  s.g = sc.metric(p);
  s.g_inv = s.g.inverse();
  s.d = tensor_to_matrix(transform_components(matrix_to_tensor(c.d_lower, {0, 2, 0, 0, 0, 0, 2}), tv, Direction::forward));
  s.d_inv = s.d.inverse();
  s.G_upper = transform_components(c.G_upper, tv, Direction::forward);
  s.G_lower = lower_G(s.G_upper, s.g_inv, s.d);
  return s;
}

/**
 * @brief The metric connection of a chiral scenario at one point.
 *
 * Gamma from the metric, its Lie derivatives, the structural constants and the torsion.
 * A and Abar from contracting the G-compatibility condition with the lower G symbols;
 * the spin-metric terms fix their traces.
 */
inline SpinorConnection build_chiral_metric_connection(const Scenario& sc, const Point& p) {
  const MetricGeometry geo = metric_geometry(sc, p);
  SpinorConnection conn = SpinorConnection::zero(2);
  conn.gamma = metric_gamma(geo);

  const ChiralStructure cs = chiral_structure(sc, p);
  const FrameField frame = sc.frame_field();
  const auto lG = lie_derivatives([&sc](const Point& q) { return chiral_structure(sc, q).G_upper; }, frame, p, sc.deriv);
  const auto ld = lie_derivatives([&sc](const Point& q) { return chiral_structure(sc, q).d; }, frame, p, sc.deriv);
  const auto& Gu = cs.G_upper;
  const auto& Gl = cs.G_lower;

  for (int r = 0; r < 4; ++r) {
    const cplx tr_d = (ld[r] * cs.d_inv).trace();
    const cplx tr_dbar = std::conj(tr_d);
    // m(i, ib, j, jb) = sum G^{i ib}_p Gamma^p_rq G^q_{j jb} - sum L_r(G^{i ib}_q) G^q_{j jb}
    auto m = [&](int i, int ib, int j, int jb) {
      cplx acc{0.0, 0.0};
      for (int q = 0; q < 4; ++q) {
        cplx gq{0.0, 0.0};
        for (int pp = 0; pp < 4; ++pp) gq += Gu.raw(i, ib, pp) * conn.gamma[r](pp, q);
        acc += (gq - lG[r].raw(i, ib, q)) * Gl.raw(j, jb, q);
      }
      return acc;
    };
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        cplx a{0.0, 0.0}, ab{0.0, 0.0};
        for (int s = 0; s < 2; ++s) {
          a += m(i, s, j, s);
          ab += m(s, i, s, j);
        }
        conn.a[r](i, j) = 0.25 * a - (i == j ? 0.25 * tr_dbar : 0.0);
        conn.abar[r](i, j) = 0.25 * ab - (i == j ? 0.25 * tr_d : 0.0);
      }
  }
  return conn;
}

using ConnectionProvider = std::function<SpinorConnection(const Point&)>;

inline SpinTensor metric_tensor(const Mat4& g) {
  SpinTensor t({0, 0, 0, 0, 0, 2, 2});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t.raw(i, j) = g(i, j);
  return t;
}

/// Max residual of sum_{qp} g^{qp} nabla_r g_qp from a covariant derivative of g.
inline double metric_trace_residual(const SpinTensor& ng, const Mat4& g_inv) {
  double r = 0.0;
  for (int k = 0; k < 4; ++k) {
    cplx acc{0.0, 0.0};
    for (int q = 0; q < 4; ++q)
      for (int p = 0; p < 4; ++p) acc += g_inv(q, p) * ng.raw(q, p, k);
    r = std::max(r, std::abs(acc));
  }
  return r;
}

/// Residuals of the concordance conditions for g, d, dbar and G at each point.
inline ResidualReport verify_chiral_concordance(const ConnectionProvider& conn_at, const Scenario& sc,
                                                const std::vector<Point>& points, double tol) {
  ResidualReport rep;
  for (const char* n : {"nabla_g", "nabla_d", "nabla_dbar", "nabla_G", "metric_trace", "G_projected_metric"})
    rep.add(n, 0.0, tol, 0);
  for (const auto& p : points) {
    const SpinorConnection conn = conn_at(p);
    auto g_field = [&sc](const Point& q) { return metric_tensor(sc.metric(q)); };
    auto d_field = [&sc](const Point& q) {
      return matrix_to_tensor(chiral_structure(sc, q).d, {0, 2, 0, 0, 0, 0, 2});
    };
    auto db_field = [&sc](const Point& q) {
      return matrix_to_tensor(chiral_structure(sc, q).d.conjugate(), {0, 0, 0, 2, 0, 0, 2});
    };
    auto G_field = [&sc](const Point& q) { return chiral_structure(sc, q).G_upper; };
    const SpinTensor ng = covariant_derivative(g_field, conn, sc, p);
    rep.merge("nabla_g", ng.max_abs(), tol);
    rep.merge("nabla_d", covariant_derivative(d_field, conn, sc, p).max_abs(), tol);
    rep.merge("nabla_dbar", covariant_derivative(db_field, conn, sc, p).max_abs(), tol);
    rep.merge("nabla_G", covariant_derivative(G_field, conn, sc, p).max_abs(), tol);

    const ChiralStructure cs = chiral_structure(sc, p);
    rep.merge("metric_trace", metric_trace_residual(ng, cs.g_inv), tol);
    double proj = 0.0;
    for (int r = 0; r < 4; ++r)
      for (int i = 0; i < 2; ++i)
        for (int ib = 0; ib < 2; ++ib)
          for (int j = 0; j < 2; ++j)
            for (int jb = 0; jb < 2; ++jb) {
              cplx acc{0.0, 0.0};
              for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be)
                  acc += (cs.G_lower.raw(i, ib, al) * cs.G_lower.raw(j, jb, be) +
                          cs.G_lower.raw(j, ib, al) * cs.G_lower.raw(i, jb, be)) *
                         ng.raw(al, be, r);
              proj = std::max(proj, std::abs(acc));
            }
    rep.merge("G_projected_metric", proj, tol);
  }
  return rep;
}

/**
 * @brief Transformation law of connection coefficients under a frame change.
 *
 * backward gives the old-frame coefficients from new-frame ones:
 *   Gamma_i = sum_c T^c_i S Gamma~_c T + theta_i, A_i likewise with the spinor
 *   transition and vartheta, Abar with conjugates. forward is its inverse.
 * `theta` must be computed along the old frame.
 */
inline SpinorConnection transform_connection(const SpinorConnection& conn, const TransitionValue& v,
                                             const ThetaParameters& theta, Direction dir) {
  if (conn.spinor_dim != v.spinor_dim()) throw std::invalid_argument("connection and transition spinor_dim differ");
  SpinorConnection out = SpinorConnection::zero(conn.spinor_dim);
  const CMat4 S = v.S.cast<cplx>(), T = v.T.cast<cplx>();
  const CMat& sp = v.spin;
  const CMat& ti = v.spin_inv;
  for (int i = 0; i < 4; ++i) {
    if (dir == Direction::backward) {
      out.gamma[i] = theta.theta[i].cast<cplx>();
      out.a[i] = theta.vartheta[i];
      out.abar[i] = theta.vartheta[i].conjugate();
      for (int c = 0; c < 4; ++c) {
        const double w = v.T(c, i);
        out.gamma[i] += w * (S * conn.gamma[c] * T);
        out.a[i] += w * (sp * conn.a[c] * ti);
        out.abar[i] += w * (sp.conjugate() * conn.abar[c] * ti.conjugate());
      }
    } else {
      for (int c = 0; c < 4; ++c) {
        const double w = v.S(c, i);
        out.gamma[i] += w * (T * (conn.gamma[c] - theta.theta[c].cast<cplx>()) * S);
        out.a[i] += w * (ti * (conn.a[c] - theta.vartheta[c]) * sp);
        out.abar[i] += w * (ti.conjugate() * (conn.abar[c] - theta.vartheta[c].conjugate()) * sp.conjugate());
      }
    }
  }
  return out;
}

}  // namespace spinconn
