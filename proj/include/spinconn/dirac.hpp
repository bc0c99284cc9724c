#pragma once

#include "spinconn/chiral.hpp"
#include "spinconn/frames.hpp"
#include "spinconn/lorentz_cover.hpp"
#include "spinconn/report.hpp"

#include <array>
#include <optional>
#include <string>

namespace spinconn {

/**
 * @brief Dirac-bundle structure components in one frame pair.
 *
 * gamma[m](a,b) = gamma^a_{bm}. The derived companions are filled by complete().
 */
struct DiracConstants {
  Mat4 g = minkowski(), g_inv = minkowski();
  CMat4 d_lower, d_upper, H, D_lower, D_upper;
  std::array<CMat4, 4> gamma;
  std::array<CMat4, 4> gamma_inv;         ///< [m](a,b) = gamma^{am}_b
  std::array<CMat4, 4> gamma_herm_upper;  ///< [m](i,ib) = gamma^{i ib}_m
  std::array<CMat4, 4> gamma_herm_lower;  ///< [m](i,ib) = gamma^m_{i ib}

  CMat4 dbar_lower() const { return d_lower.conjugate(); }
  CMat4 dbar_upper() const { return d_upper.conjugate(); }

  void complete() {
    g_inv = g.inverse();
    d_upper = d_lower.inverse();
    D_upper = d_upper * D_lower * d_upper.conjugate();
    for (int m = 0; m < 4; ++m) {
      gamma_inv[m].setZero();
      for (int k = 0; k < 4; ++k) gamma_inv[m] += g_inv(k, m) * gamma[k];
    }
    for (int m = 0; m < 4; ++m) {
      gamma_herm_upper[m] = gamma[m] * D_upper;
      gamma_herm_lower[m] = gamma_inv[m].transpose() * D_lower;
    }
  }

  SpinTensor gamma_tensor() const {
    SpinTensor t({1, 1, 0, 0, 0, 1, 4});
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) t.raw(a, b, m) = gamma[m](a, b);
    return t;
  }
};

inline TensorSignature sig_dirac_d() { return {0, 2, 0, 0, 0, 0, 4}; }
inline TensorSignature sig_dirac_H() { return {1, 1, 0, 0, 0, 0, 4}; }
inline TensorSignature sig_dirac_D() { return {0, 1, 0, 1, 0, 0, 4}; }

inline const DiracConstants& canonical_dirac_constants() {
  static const DiracConstants c = [] {
    const cplx I{0.0, 1.0};
    DiracConstants k;
    k.d_lower << 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
    k.H = Eigen::Vector4cd(1, 1, -1, -1).asDiagonal();
    k.D_lower << 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0;
    k.gamma[0] << 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0;
    k.gamma[1] << 0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 0;
    k.gamma[2] << 0, 0, 0, -I, 0, 0, I, 0, 0, I, 0, 0, -I, 0, 0, 0;
    k.gamma[3] << 0, 0, 1, 0, 0, 0, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0;
    k.complete();
    return k;
  }();
  return c;
}

/// Components of the same structure in the frames reached by `v` (the metric is given separately).
inline DiracConstants transform_dirac(const DiracConstants& c, const TransitionValue& v, const Mat4& g_new) {
  auto tr = [&](const CMat4& m, const TensorSignature& sig) {
    return CMat4(tensor_to_matrix(transform_components(matrix_to_tensor(m, sig), v, Direction::forward)));
  };
  DiracConstants out;
  out.g = g_new;
  out.d_lower = tr(c.d_lower, sig_dirac_d());
  out.H = tr(c.H, sig_dirac_H());
  out.D_lower = tr(c.D_lower, sig_dirac_D());
  const SpinTensor gt = transform_components(c.gamma_tensor(), v, Direction::forward);
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out.gamma[m](a, b) = gt.raw(a, b, m);
  out.complete();
  return out;
}

/**
 * @brief Residuals of the gamma / H / D identity suite.
 *
 * Every check is exactly zero on the canonical constants.
 */
inline ResidualReport verify_dirac_identities(const DiracConstants& c, double tol = 0.0) {
  ResidualReport rep;
  const CMat4 id = CMat4::Identity();
  const auto& gm = c.gamma;
  const auto& gu = c.gamma_inv;
  const CMat4& d = c.d_lower;
  const CMat4& du = c.d_upper;
  const CMat4& H = c.H;
  const CMat4& D = c.D_lower;
  auto mx = [](const CMat4& m) { return m.cwiseAbs().maxCoeff(); };

  double clifford = 0.0, ddg = 0.0, ddgi = 0.0, gtr = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      clifford = std::max(clifford, mx(gm[i] * gm[j] + gm[j] * gm[i] - 2.0 * c.g(i, j) * id));
      // sum gamma^a_{bi} d_ae d^{bh} gamma^e_{hj} = tr(gamma_i^T d gamma_j du^T)
      ddg = std::max(ddg, std::abs((gm[i].transpose() * d * gm[j] * du.transpose()).trace() - 4.0 * c.g(i, j)));
      ddgi = std::max(ddgi, std::abs((gu[i].transpose() * d * gu[j] * du.transpose()).trace() - 4.0 * c.g_inv(i, j)));
      gtr = std::max(gtr, std::abs((gm[i] * gm[j]).trace() - 4.0 * c.g(i, j)));
    }
  rep.add("clifford_anticommutator", clifford, tol);
  rep.add("gamma_spin_metric_contraction", ddg, tol);

  // sum_ab gamma^a_{bi} d_ae d^{bh} = gamma^h_{ei}
  double low = 0.0, lowi = 0.0;
  for (int i = 0; i < 4; ++i) {
    low = std::max(low, mx(CMat4(du.transpose() * gm[i].transpose() * d) - gm[i]));
    lowi = std::max(lowi, mx(CMat4(du.transpose() * gu[i].transpose() * d) - gu[i]));
  }
  rep.add("gamma_conjugated_by_spin_metric", low, tol);

  double inv_tr = 0.0;
  {
    // sum_{h,e} gamma^h_{ej} gamma^{ei}_h
    CMat4 acc = CMat4::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        cplx s{0.0, 0.0};
        for (int h = 0; h < 4; ++h)
          for (int e = 0; e < 4; ++e) s += gm[j](h, e) * gu[i](e, h);
        acc(i, j) = s;
      }
    inv_tr = mx(acc - 4.0 * id);
  }
  rep.add("gamma_inverse_trace", inv_tr, tol);
  rep.add("gamma_inverse_conjugated_by_spin_metric", lowi, tol);
  rep.add("gamma_inverse_spin_metric_contraction", ddgi, tol);

  double anti_h = 0.0;
  for (int m = 0; m < 4; ++m) anti_h = std::max(anti_h, mx(gm[m] * H + H * gm[m]));
  rep.add("gamma_H_anticommute", anti_h, tol);
  rep.add("spin_metric_H_symmetric", mx(d * H - H.transpose() * d), tol);
  rep.add("D_H_antihermitian", mx(D * H.conjugate() + H.transpose() * D), tol);

  // Quadratic gamma expansions, all sharing one right-hand side.
  double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0;
  const CMat4 Hdu = H * du;
  const CMat4 dH = d * H;
  const CMat4 Du = c.D_upper;
  const CMat4 dbu = du.conjugate();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int e = 0; e < 4; ++e)
        for (int h = 0; h < 4; ++h) {
          const cplx rhs = id(a, h) * id(e, b) - H(a, h) * H(e, b) + du(a, e) * d(b, h) - Hdu(a, e) * dH(b, h);
          cplx l1{0.0, 0.0}, l2{0.0, 0.0}, l3{0.0, 0.0}, l4{0.0, 0.0};
          for (int m = 0; m < 4; ++m) {
            l3 += gu[m](a, b) * gm[m](e, h);
            for (int n = 0; n < 4; ++n) {
              l1 += gm[m](a, b) * gm[n](e, h) * c.g_inv(m, n);
              l2 += gu[m](a, b) * gu[n](e, h) * c.g(m, n);
              l4 += gm[m](a, b) * c.g_inv(m, n) * std::conj(gm[n](e, h));
            }
          }
          e1 = std::max(e1, std::abs(l1 - rhs));
          e2 = std::max(e2, std::abs(l2 - rhs));
          e3 = std::max(e3, std::abs(l3 - rhs));
          cplx r4{0.0, 0.0};
          for (int s = 0; s < 4; ++s)
            for (int r = 0; r < 4; ++r) {
              r4 += -D(s, h) * du(s, a) * D(b, r) * dbu(r, e);
              r4 += -du(s, a) * D(s, r) * dbu(r, e) * D(b, h);
              for (int q = 0; q < 4; ++q)
                for (int R = 0; R < 4; ++R) {
                  r4 += H(q, s) * D(q, h) * du(s, a) * H(r, b) * D(r, R) * dbu(R, e);
                  r4 += du(s, a) * H(r, s) * D(r, R) * dbu(R, e) * H(q, b) * D(q, h);
                }
            }
          e4 = std::max(e4, std::abs(l4 - r4));
        }
  rep.add("gamma_pair_expansion", e1, tol);
  rep.add("gamma_inverse_pair_expansion", e2, tol);
  rep.add("gamma_inverse_gamma_expansion", e3, tol);
  rep.add("gamma_conjugate_pair_expansion", e4, tol);

  // sum_ab D_{j ab} D^{i ab} = delta, sum_a D_{a jb} D^{a ib} = delta
  rep.add("D_inverse_right", mx(CMat4(D * Du.transpose()).transpose() - id), tol);
  rep.add("D_inverse_left", mx(CMat4(Du.transpose() * D).transpose() - id), tol);

  double herm_u = 0.0, herm_l = 0.0, intertwine = 0.0, skew = 0.0;
  for (int m = 0; m < 4; ++m) {
    herm_u = std::max(herm_u, mx(c.gamma_herm_upper[m] - c.gamma_herm_upper[m].adjoint()));
    herm_l = std::max(herm_l, mx(c.gamma_herm_lower[m] - c.gamma_herm_lower[m].adjoint()));
    intertwine = std::max(intertwine, mx(D * gm[m].conjugate() - gm[m].transpose() * D));
    skew = std::max(skew, mx(d * gm[m] + gm[m].transpose() * d));
  }
  rep.add("gamma_hermitian_upper_reality", herm_u, tol);
  rep.add("gamma_hermitian_lower_reality", herm_l, tol);
  rep.add("D_intertwines_conjugate_gamma", intertwine, tol);
  rep.add("spin_metric_gamma_skew", skew, tol);

  rep.add("gamma_trace_metric", gtr, tol);
  rep.add("H_involution", mx(H * H - id), tol);
  rep.add("H_square_trace", std::abs((H * H).trace() - 4.0), tol);
  rep.add("H_traceless", std::abs(H.trace()), tol);
  const SpinTensor Dt = matrix_to_tensor(D, sig_dirac_D());
  rep.add("D_reality", max_abs_diff(tau(Dt), Dt), tol);
  return rep;
}

enum class Orthonormality { ortho, anti_ortho };
enum class Chirality { chiral, anti_chiral };
enum class Adjointness { self_adjoint, anti_self_adjoint };

/// Each property is empty when the matrix matches neither reference form.
struct DiracFrameKind {
  std::optional<Orthonormality> orthonormality;
  std::optional<Chirality> chirality;
  std::optional<Adjointness> adjointness;

  bool operator==(const DiracFrameKind&) const = default;
};

/// Exact comparison against the canonical d, H, D and their negatives.
inline DiracFrameKind classify_dirac_frame(const CMat4& d, const CMat4& H, const CMat4& D) {
  const auto& c = canonical_dirac_constants();
  DiracFrameKind k;
  if (d == c.d_lower) k.orthonormality = Orthonormality::ortho;
  else if (d == CMat4(-c.d_lower)) k.orthonormality = Orthonormality::anti_ortho;
  if (H == c.H) k.chirality = Chirality::chiral;
  else if (H == CMat4(-c.H)) k.chirality = Chirality::anti_chiral;
  if (D == c.D_lower) k.adjointness = Adjointness::self_adjoint;
  else if (D == CMat4(-c.D_lower)) k.adjointness = Adjointness::anti_self_adjoint;
  return k;
}

inline std::string to_string(const DiracFrameKind& k) {
  auto o = k.orthonormality ? (*k.orthonormality == Orthonormality::ortho ? "orthonormal" : "anti-orthonormal") : "?";
  auto c = k.chirality ? (*k.chirality == Chirality::chiral ? "chiral" : "anti-chiral") : "?";
  auto a = k.adjointness ? (*k.adjointness == Adjointness::self_adjoint ? "self-adjoint" : "anti-self-adjoint") : "?";
  return std::string(o) + ", " + c + ", " + a;
}

enum class Inversion { P, T, PT };

/**
 * @brief Constant spinor frame swap; column i lists the old-frame coefficients of the new Psi_i.
 *
 * P: Psi~ = (Psi3, Psi4, Psi1, Psi2). T: (i Psi3, i Psi4, -i Psi1, -i Psi2).
 * PT: (i Psi1, i Psi2, -i Psi3, -i Psi4).
 */
inline TransitionValue frame_inversion(Inversion kind) {
  const cplx I{0.0, 1.0};
  CMat4 s = CMat4::Zero();
  switch (kind) {
    case Inversion::P: s(2, 0) = s(3, 1) = s(0, 2) = s(1, 3) = 1.0; break;
    case Inversion::T:
      s(2, 0) = s(3, 1) = I;
      s(0, 2) = s(1, 3) = -I;
      break;
    case Inversion::PT:
      s(0, 0) = s(1, 1) = I;
      s(2, 2) = s(3, 3) = -I;
      break;
  }
  TransitionValue v;
  v.spin = s;
  v.spin_inv = s.inverse();
  return v;
}

/// Dirac transition that acts as `s` on the chiral frame and dually on the barred co-frame.
inline CMat dirac_block_transition(const CMat& s) {
  CMat out = CMat::Zero(4, 4);
  out.topLeftCorner(2, 2) = s;
  out.bottomRightCorner(2, 2) = s.inverse().conjugate().transpose();
  return out;
}

/// Dirac constants assembled from the chiral constants, with checks against the canonical tables.
struct EmbeddedChiralFrame {
  DiracConstants constants;
  double d_residual = 0.0;      ///< against the canonical Dirac d
  double gamma_residual = 0.0;  ///< against the canonical gamma matrices
  double G_action_residual = 0.0;
  DiracFrameKind kind;
};

/**
 * Psi1, Psi2 are the chiral frame and Psi3, Psi4 the barred dual co-frame. The upper-right
 * gamma block is G^{i ib}_k and the lower-left block is sum_q G^q_{j ib} g_qk.
 */
inline EmbeddedChiralFrame embed_chiral_frame() {
  const auto& ch = canonical_chiral_constants();
  const Mat4 g = minkowski();
  EmbeddedChiralFrame e;
  DiracConstants& c = e.constants;
  c.d_lower = CMat4::Zero();
  c.d_lower.topLeftCorner(2, 2) = ch.d_lower;
  c.d_lower.bottomRightCorner(2, 2) = ch.dbar_upper;
  c.H = Eigen::Vector4cd(1, 1, -1, -1).asDiagonal();
  c.D_lower = CMat4::Zero();
  c.D_lower.topRightCorner(2, 2) = CMat::Identity(2, 2);
  c.D_lower.bottomLeftCorner(2, 2) = CMat::Identity(2, 2);
  for (int k = 0; k < 4; ++k) {
    c.gamma[k].setZero();
    for (int i = 0; i < 2; ++i)
      for (int ib = 0; ib < 2; ++ib) {
        c.gamma[k](i, 2 + ib) = ch.G_upper.raw(i, ib, k);
        cplx low{0.0, 0.0};
        for (int q = 0; q < 4; ++q) low += ch.G_lower.raw(i, ib, q) * g(q, k);
        c.gamma[k](2 + ib, i) = low;
      }
  }
  c.complete();
  const auto& can = canonical_dirac_constants();
  e.d_residual = (c.d_lower - can.d_lower).cwiseAbs().maxCoeff();
  for (int k = 0; k < 4; ++k) {
    e.gamma_residual = std::max(e.gamma_residual, (c.gamma[k] - can.gamma[k]).cwiseAbs().maxCoeff());
    // gamma_k acting on the barred block reproduces G_k acting on barred spinors.
    for (int i = 0; i < 2; ++i)
      for (int ib = 0; ib < 2; ++ib)
        e.G_action_residual =
            std::max(e.G_action_residual, std::abs(c.gamma[k](i, 2 + ib) - ch.G_upper.raw(i, ib, k)));
  }
  e.kind = classify_dirac_frame(c.d_lower, c.H, c.D_lower);
  return e;
}

}  // namespace spinconn
