#pragma once

#include "spinconn/chiral.hpp"
#include "spinconn/dirac.hpp"
#include "spinconn/scenario.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace spinconn {

/// Dirac constants of a scenario in its working frames.
inline DiracConstants dirac_structure(const Scenario& sc, const Point& p) {
  if (sc.spinor_dim != 4) throw std::invalid_argument("Dirac structure needs spinor_dim 4");
  return transform_dirac(canonical_dirac_constants(), sc.transition().at(p), sc.metric(p));
}

/**
 * @brief Chirality projectors and the pieces of gamma and d they cut out.
 *
 * bH = (1 + H)/2, cH = (1 - H)/2. bc[m] = bH gamma_m cH and cb[m] = cH gamma_m bH.
 * The split spin metrics are projections of d and of its inverse, not pseudo-inverses.
 */
struct ChiralitySplit {
  CMat4 bH, cH;
  std::array<CMat4, 4> bc, cb;
  CMat4 bd_lower, cd_lower, bd_upper, cd_upper;

  template <class F>
  void each(const ChiralitySplit& o, F f) {
    f(bH, o.bH);
    f(cH, o.cH);
    for (int m = 0; m < 4; ++m) {
      f(bc[m], o.bc[m]);
      f(cb[m], o.cb[m]);
    }
    f(bd_lower, o.bd_lower);
    f(cd_lower, o.cd_lower);
    f(bd_upper, o.bd_upper);
    f(cd_upper, o.cd_upper);
  }

  ChiralitySplit operator+(const ChiralitySplit& o) const {
    ChiralitySplit r = *this;
    r.each(o, [](CMat4& a, const CMat4& b) { a += b; });
    return r;
  }
  ChiralitySplit operator-(const ChiralitySplit& o) const {
    ChiralitySplit r = *this;
    r.each(o, [](CMat4& a, const CMat4& b) { a -= b; });
    return r;
  }
  ChiralitySplit operator*(double s) const {
    ChiralitySplit r = *this;
    r.each(*this, [s](CMat4& a, const CMat4&) { a *= s; });
    return r;
  }
};

inline ChiralitySplit chirality_split(const DiracConstants& c) {
  ChiralitySplit s;
  const CMat4 id = CMat4::Identity();
  s.bH = 0.5 * (id + c.H);
  s.cH = 0.5 * (id - c.H);
  for (int m = 0; m < 4; ++m) {
    s.bc[m] = s.bH * c.gamma[m] * s.cH;
    s.cb[m] = s.cH * c.gamma[m] * s.bH;
  }
  s.bd_lower = s.bH.transpose() * c.d_lower * s.bH;
  s.cd_lower = s.cH.transpose() * c.d_lower * s.cH;
  s.bd_upper = s.bH * c.d_upper * s.bH.transpose();
  s.cd_upper = s.cH * c.d_upper * s.cH.transpose();
  return s;
}

/// Projector algebra, the vanishing same-chirality gamma pieces, and the quadratic split identities.
inline ResidualReport verify_chirality_split(const DiracConstants& c, const ChiralitySplit& s, double tol = 0.0) {
  ResidualReport rep;
  const CMat4 id = CMat4::Identity();
  auto mx = [](const CMat4& m) { return m.cwiseAbs().maxCoeff(); };
  rep.add("projector_sum", mx(s.bH + s.cH - id), tol);
  rep.add("projector_orthogonal", std::max(mx(s.bH * s.cH), mx(s.cH * s.bH)), tol);
  rep.add("projector_idempotent", std::max(mx(s.bH * s.bH - s.bH), mx(s.cH * s.cH - s.cH)), tol);

  double same = 0.0, recon = 0.0;
  for (int m = 0; m < 4; ++m) {
    same = std::max({same, mx(s.bH * c.gamma[m] * s.bH), mx(s.cH * c.gamma[m] * s.cH)});
    recon = std::max(recon, mx(s.bc[m] + s.cb[m] - c.gamma[m]));
  }
  rep.add("same_chirality_gamma_vanishes", same, tol);
  rep.add("gamma_reconstruction", recon, tol);

  // sum_mn X^a_{bm} g^{mn} Y^e_{hn} against their closed-form right-hand sides.
  double r17 = 0.0, r18 = 0.0, r32 = 0.0, r33 = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int e = 0; e < 4; ++e)
        for (int h = 0; h < 4; ++h) {
          cplx bcbc{0.0, 0.0}, cbcb{0.0, 0.0}, bccb{0.0, 0.0}, cbbc{0.0, 0.0};
          for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n) {
              const double w = c.g_inv(m, n);
              if (w == 0.0) continue;
              bcbc += s.bc[m](a, b) * w * s.bc[n](e, h);
              cbcb += s.cb[m](a, b) * w * s.cb[n](e, h);
              bccb += s.bc[m](a, b) * w * s.cb[n](e, h);
              cbbc += s.cb[m](a, b) * w * s.bc[n](e, h);
            }
          r17 = std::max(r17, std::abs(bcbc - 2.0 * s.bd_upper(a, e) * s.cd_lower(b, h)));
          r18 = std::max(r18, std::abs(cbcb - 2.0 * s.cd_upper(a, e) * s.bd_lower(b, h)));
          r32 = std::max(r32, std::abs(bccb - 2.0 * s.bH(a, h) * s.cH(e, b)));
          r33 = std::max(r33, std::abs(cbbc - 2.0 * s.cH(a, h) * s.bH(e, b)));
        }
  rep.add("split_gamma_pair_bullet_circ", r17, tol);
  rep.add("split_gamma_pair_circ_bullet", r18, tol);
  rep.add("split_gamma_mixed_pair", r32, tol);
  rep.add("split_gamma_mixed_pair_swapped", r33, tol);

  // Contracted forms: sum_a sum_mn bc^a_{bm} g^{mn} cb^i_{an} = 4 cH^i_b and the mirror.
  CMat4 k1 = CMat4::Zero(), k2 = CMat4::Zero();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      k1 += c.g_inv(m, n) * (s.cb[n] * s.bc[m]);
      k2 += c.g_inv(m, n) * (s.bc[n] * s.cb[m]);
    }
  rep.add("split_gamma_contracted", mx(k1 - 4.0 * s.cH), tol);
  rep.add("split_gamma_contracted_swapped", mx(k2 - 4.0 * s.bH), tol);

  double skew = 0.0;
  for (const CMat4* m : {&s.bd_lower, &s.cd_lower, &s.bd_upper, &s.cd_upper})
    skew = std::max(skew, mx(*m + m->transpose()));
  rep.add("split_spin_metric_antisymmetric", skew, tol);
  int bad_rank = 0;
  for (const CMat4* m : {&s.bd_lower, &s.cd_lower, &s.bd_upper, &s.cd_upper}) {
    Eigen::FullPivLU<CMat4> lu(*m);
    lu.setThreshold(1e-9);
    if (lu.rank() != 2) ++bad_rank;
  }
  rep.add("split_spin_metric_rank_two", static_cast<double>(bad_rank), 0.0);
  return rep;
}

/// The four chirality blocks of the A coefficients for one direction.
struct DiracABlocks {
  CMat4 bullet_circ, circ_bullet, circ_circ, bullet_bullet;
  CMat4 sum() const { return bullet_circ + circ_bullet + circ_circ + bullet_bullet; }
};

/// Everything the A formulas need at one point.
struct DiracAInputs {
  Mat4 g_inv;
  std::array<CMat4, 4> gamma;  ///< tangent connection, gamma[k](r,m) = Gamma^r_km
  ChiralitySplit split;
  std::array<ChiralitySplit, 4> lie;  ///< lie[k] = L_k(split)
};

inline DiracAInputs dirac_a_inputs(const Scenario& sc, const Point& p) {
  DiracAInputs in;
  const MetricGeometry geo = metric_geometry(sc, p);
  in.g_inv = geo.g_inv;
  in.gamma = metric_gamma(geo);
  in.split = chirality_split(dirac_structure(sc, p));
  in.lie = lie_derivatives([&sc](const Point& q) { return chirality_split(dirac_structure(sc, q)); },
                           sc.frame_field(), p, sc.deriv);
  return in;
}

/**
 * @brief A_k assembled from the four chirality blocks, matrix (i,j) = A^i_kj.
 *
 * Off-chirality blocks come from the Lie derivatives of the projectors. The
 * same-chirality blocks come from the gamma-compatibility condition contracted with
 * the opposite split gamma, with the split spin metric fixing their traces.
 */
inline DiracABlocks dirac_a_blocks(const DiracAInputs& in, int k) {
  const auto& s = in.split;
  const auto& l = in.lie[static_cast<std::size_t>(k)];
  DiracABlocks b;
  b.bullet_circ = l.bH * s.cH;
  b.circ_bullet = l.cH * s.bH;
  const cplx tb = (l.bd_lower * s.bd_upper).trace();
  const cplx tc = (l.cd_lower * s.cd_upper).trace();
  CMat4 cc = 0.25 * tb * s.cH;
  CMat4 bb = 0.25 * tc * s.bH;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      const double w = in.g_inv(m, n);
      if (w == 0.0) continue;
      cc += 0.25 * w * (s.cb[n] * l.bc[m] * s.cH);
      bb += 0.25 * w * (s.bc[n] * l.cb[m] * s.bH);
      for (int r = 0; r < 4; ++r) {
        const cplx gw = in.gamma[static_cast<std::size_t>(k)](r, m) * w;
        if (gw == 0.0) continue;
        cc -= 0.25 * gw * (s.cb[n] * s.bc[r]);
        bb -= 0.25 * gw * (s.bc[n] * s.cb[r]);
      }
    }
  b.circ_circ = cc;
  b.bullet_bullet = bb;
  return b;
}

/// The same A_k from the collapsed single formula.
inline CMat4 dirac_a_simplified(const DiracAInputs& in, int k) {
  const auto& s = in.split;
  const auto& l = in.lie[static_cast<std::size_t>(k)];
  const cplx tb = (l.bd_lower * s.bd_upper).trace();
  const cplx tc = (l.cd_lower * s.cd_upper).trace();
  CMat4 a = 0.25 * (tb * s.cH + tc * s.bH);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      const double w = in.g_inv(m, n);
      if (w == 0.0) continue;
      a += 0.25 * w * (s.cb[n] * l.bc[m] + s.bc[n] * l.cb[m]);
      for (int r = 0; r < 4; ++r) {
        const cplx gw = in.gamma[static_cast<std::size_t>(k)](r, m) * w;
        if (gw == 0.0) continue;
        a -= 0.25 * gw * (s.cb[n] * s.bc[r] + s.bc[n] * s.cb[r]);
      }
    }
  return a;
}

/// Largest gap between the block sum and the simplified formula over the four directions.
inline double dirac_block_discrepancy(const Scenario& sc, const Point& p) {
  const DiracAInputs in = dirac_a_inputs(sc, p);
  double r = 0.0;
  for (int k = 0; k < 4; ++k)
    r = std::max(r, (dirac_a_blocks(in, k).sum() - dirac_a_simplified(in, k)).cwiseAbs().maxCoeff());
  return r;
}

/// The metric connection of a Dirac scenario at one point; Abar is the conjugate of A.
inline SpinorConnection build_dirac_metric_connection(const Scenario& sc, const Point& p) {
  const DiracAInputs in = dirac_a_inputs(sc, p);
  SpinorConnection conn = SpinorConnection::zero(4);
  conn.gamma = in.gamma;
  for (int k = 0; k < 4; ++k) {
    conn.a[k] = dirac_a_blocks(in, k).sum();
    conn.abar[k] = conn.a[k].conjugate();
  }
  return conn;
}

class BlockStructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChiralRestriction {
  SpinorConnection chiral;
  /// Largest gap between the barred co-frame block and -conj(A)^T of the chiral block.
  double conjugate_block_residual = 0.0;
  double off_block_max = 0.0;
};

/**
 * Restricts a Dirac connection given in a frame laid out like the embedded chiral frame
 * (Psi1, Psi2 chiral, Psi3, Psi4 the barred dual co-frame). Gamma passes through.
 */
inline ChiralRestriction restrict_to_chiral(const SpinorConnection& dirac, double off_block_tol = 1e-9) {
  if (dirac.spinor_dim != 4) throw std::invalid_argument("restriction needs a Dirac connection");
  ChiralRestriction out;
  out.chiral = SpinorConnection::zero(2);
  out.chiral.gamma = dirac.gamma;
  for (int k = 0; k < 4; ++k) {
    const CMat& a = dirac.a[k];
    out.off_block_max = std::max({out.off_block_max, a.topRightCorner(2, 2).cwiseAbs().maxCoeff(),
                                  a.bottomLeftCorner(2, 2).cwiseAbs().maxCoeff()});
    out.chiral.a[k] = a.topLeftCorner(2, 2);
    out.chiral.abar[k] = out.chiral.a[k].conjugate();
    out.conjugate_block_residual =
        std::max(out.conjugate_block_residual,
                 (a.bottomRightCorner(2, 2) + out.chiral.a[k].conjugate().transpose()).cwiseAbs().maxCoeff());
  }
  if (out.off_block_max > off_block_tol)
    throw BlockStructureError("connection not block-diagonal in chiral frame");
  return out;
}

/// Residuals of the concordance conditions for g, d, dbar, gamma, H and D, plus sum H nabla H.
inline ResidualReport verify_dirac_concordance(const ConnectionProvider& conn_at, const Scenario& sc,
                                               const std::vector<Point>& points, double tol) {
  ResidualReport rep;
  for (const char* n : {"nabla_g", "nabla_d", "nabla_dbar", "nabla_gamma", "nabla_H", "nabla_D", "H_trace"})
    rep.add(n, 0.0, tol, 0);
  auto field = [&sc](auto pick) {
    return [&sc, pick](const Point& q) { return pick(dirac_structure(sc, q)); };
  };
  const auto g_field = [&sc](const Point& q) { return metric_tensor(sc.metric(q)); };
  const auto d_field = field([](const DiracConstants& c) { return matrix_to_tensor(c.d_lower, sig_dirac_d()); });
  const auto db_field =
      field([](const DiracConstants& c) { return matrix_to_tensor(c.dbar_lower(), {0, 0, 0, 2, 0, 0, 4}); });
  const auto gamma_field = field([](const DiracConstants& c) { return c.gamma_tensor(); });
  const auto H_field = field([](const DiracConstants& c) { return matrix_to_tensor(c.H, sig_dirac_H()); });
  const auto D_field = field([](const DiracConstants& c) { return matrix_to_tensor(c.D_lower, sig_dirac_D()); });
  for (const auto& p : points) {
    const SpinorConnection conn = conn_at(p);
    rep.merge("nabla_g", covariant_derivative(g_field, conn, sc, p).max_abs(), tol);
    rep.merge("nabla_d", covariant_derivative(d_field, conn, sc, p).max_abs(), tol);
    rep.merge("nabla_dbar", covariant_derivative(db_field, conn, sc, p).max_abs(), tol);
    rep.merge("nabla_gamma", covariant_derivative(gamma_field, conn, sc, p).max_abs(), tol);
    const SpinTensor nH = covariant_derivative(H_field, conn, sc, p);
    rep.merge("nabla_H", nH.max_abs(), tol);
    rep.merge("nabla_D", covariant_derivative(D_field, conn, sc, p).max_abs(), tol);
    const DiracConstants c = dirac_structure(sc, p);
    double tr = 0.0;
    for (int k = 0; k < 4; ++k) {
      cplx acc{0.0, 0.0};
      for (int e = 0; e < 4; ++e)
        for (int b = 0; b < 4; ++b) acc += c.H(e, b) * nH.raw(b, e, k);
      tr = std::max(tr, std::abs(acc));
    }
    rep.merge("H_trace", tr, tol);
  }
  return rep;
}

}  // namespace spinconn
