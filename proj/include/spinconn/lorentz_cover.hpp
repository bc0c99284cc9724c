#pragma once

#include "spinconn/tensor_core.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace spinconn {

using CMat2 = Eigen::Matrix2cd;

/// sigma[0] = identity, sigma[1..3] = Pauli matrices.
inline const std::array<CMat2, 4>& pauli() {
  static const std::array<CMat2, 4> s = [] {
    const cplx i{0.0, 1.0};
    std::array<CMat2, 4> r;
    r[0] << 1, 0, 0, 1;
    r[1] << 0, 1, 1, 0;
    r[2] << 0, -i, i, 0;
    r[3] << 1, 0, 0, -1;
    return r;
  }();
  return s;
}

inline Mat4 minkowski() { return Eigen::Vector4d(1.0, -1.0, -1.0, -1.0).asDiagonal(); }

class LorentzError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The covering map SL(2,C) -> SO+(1,3): S^k_m = tr(sigma_k A sigma_m A^dagger) / 2.
inline Mat4 phi(const CMat2& a) {
  if (std::abs(a.determinant() - cplx{1.0, 0.0}) >= 1e-9) throw LorentzError("not in SL(2,C)");
  const auto& s = pauli();
  Mat4 r;
  double imag = 0.0;
  for (int m = 0; m < 4; ++m) {
    const CMat2 img = a * s[m] * a.adjoint();
    for (int k = 0; k < 4; ++k) {
      const cplx c = (s[k] * img).trace() * 0.5;
      r(k, m) = c.real();
      imag = std::max(imag, std::abs(c.imag()));
    }
  }
  if (imag >= 1e-10) throw LorentzError("imaginary residue in Pauli expansion");
  return r;
}

/// Residuals of the proper orthochronous Lorentz conditions.
struct LorentzCheck {
  double metric_residual = 0.0;       // |S^T eta S - eta|
  double dual_metric_residual = 0.0;  // |S eta S^T - eta|
  double det_residual = 0.0;          // |det S - 1|
  double s00 = 0.0;

  bool ok(double tol = 1e-9) const {
    return metric_residual < tol && dual_metric_residual < tol && det_residual < tol && s00 >= 1.0 - tol;
  }
};

inline LorentzCheck check_lorentz(const Mat4& s) {
  const Mat4 eta = minkowski();
  LorentzCheck c;
  c.metric_residual = (s.transpose() * eta * s - eta).cwiseAbs().maxCoeff();
  c.dual_metric_residual = (s * eta * s.transpose() - eta).cwiseAbs().maxCoeff();
  c.det_residual = std::abs(s.determinant() - 1.0);
  c.s00 = s(0, 0);
  return c;
}

/// Gaussian 2x2 complex matrix rescaled by the principal det^(-1/2).
inline CMat2 random_sl2c(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 16; ++attempt) {
    CMat2 a;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = cplx{normal(rng), normal(rng)};
    const cplx det = a.determinant();
    if (std::abs(det) < 1e-6) continue;
    return a / std::sqrt(det);
  }
  throw LorentzError("could not draw a non-singular matrix");
}

}  // namespace spinconn
