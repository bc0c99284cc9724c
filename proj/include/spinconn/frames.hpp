#pragma once

#include "spinconn/point.hpp"
#include "spinconn/tensor_core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace spinconn {

class SingularError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Determinants at or below this magnitude are treated as singular.
inline constexpr double kSingularDet = 1e-8;

enum class Stencil { central2, central4 };

/**
 * Central differences with an absolute step. `central4` reaches two steps out,
 * so sample points need a margin of 2*step inside the evaluator's domain.
 */
struct DerivativeOptions {
  double step = 1e-4;
  Stencil stencil = Stencil::central4;

  void validate() const {
    if (!(step > 0.0 && step <= 1e-1)) throw std::invalid_argument("fd_step must lie in (0, 0.1]");
  }
};

/// d f / d x^j at p for any field whose values support +, - and scaling by double.
template <class F>
auto partial(const F& f, const Point& p, int j, const DerivativeOptions& opt) {
  using R = std::decay_t<decltype(f(p))>;
  auto at = [&](double t) {
    Point q = p;
    q[j] += t;
    return R(f(q));
  };
  const double h = opt.step;
  if (opt.stencil == Stencil::central2) return R((at(h) - at(-h)) * (1.0 / (2.0 * h)));
  return R(((at(-2 * h) - at(2 * h)) + (at(h) - at(-h)) * 8.0) * (1.0 / (12.0 * h)));
}

/// Frame components: column i holds the coordinate expansion of the frame vector Upsilon_i.
using FrameField = std::function<Mat4(const Point&)>;

inline void require_invertible(const Mat4& m, const char* what) {
  if (!(std::abs(m.determinant()) > kSingularDet)) throw SingularError(std::string(what) + " is singular");
}
inline void require_invertible(const CMat& m, const char* what) {
  if (!(std::abs(m.determinant()) > kSingularDet)) throw SingularError(std::string(what) + " is singular");
}

/// L_{Upsilon_i} of a field for all four frame directions.
template <class F>
auto lie_derivatives(const F& f, const FrameField& frame, const Point& p, const DerivativeOptions& opt) {
  using R = std::decay_t<decltype(f(p))>;
  const Mat4 e = frame(p);
  std::array<R, 4> d{partial(f, p, 0, opt), partial(f, p, 1, opt), partial(f, p, 2, opt), partial(f, p, 3, opt)};
  std::array<R, 4> out;
  for (int i = 0; i < 4; ++i) {
    R acc = d[0] * e(0, i);
    for (int j = 1; j < 4; ++j) acc = R(acc + d[j] * e(j, i));
    out[i] = acc;
  }
  return out;
}

/// Complex scalar field with optional analytic partial derivatives.
struct ScalarField {
  std::function<cplx(const Point&)> value;
  std::optional<std::array<std::function<cplx(const Point&)>, 4>> partials;

  cplx operator()(const Point& p) const { return value(p); }
};

inline cplx lie_derivative(const ScalarField& f, const FrameField& frame, int i, const Point& p,
                           const DerivativeOptions& opt = {}) {
  if (i < 0 || i > 3) throw std::out_of_range("frame direction must be 0..3");
  const Mat4 e = frame(p);
  cplx acc{0.0, 0.0};
  for (int j = 0; j < 4; ++j) {
    const cplx dj = f.partials ? (*f.partials)[j](p) : partial(f.value, p, j, opt);
    acc += e(j, i) * dj;
  }
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag())) throw std::domain_error("non-finite Lie derivative");
  return acc;
}

/// Real rank-3 tangent array with the upper index first: t(k,i,j) = slice[k](i,j).
struct Tensor3 {
  std::array<Mat4, 4> slice;

  Tensor3() {
    for (auto& s : slice) s.setZero();
  }
  double& operator()(int k, int i, int j) { return slice[k](i, j); }
  double operator()(int k, int i, int j) const { return slice[k](i, j); }
  double max_abs() const {
    double r = 0.0;
    for (const auto& s : slice) r = std::max(r, s.cwiseAbs().maxCoeff());
    return r;
  }
};

/// c^k_ij with [Upsilon_i, Upsilon_j] = c^k_ij Upsilon_k; antisymmetric by construction.
inline Tensor3 structural_constants(const FrameField& frame, const Point& p, const DerivativeOptions& opt = {}) {
  const Mat4 e = frame(p);
  require_invertible(e, "frame");
  const Mat4 einv = e.inverse();
  std::array<Mat4, 4> de;
  for (int a = 0; a < 4; ++a) de[a] = partial(frame, p, a, opt);
  Tensor3 c;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      Eigen::Vector4d bracket = Eigen::Vector4d::Zero();
      for (int a = 0; a < 4; ++a) bracket += e(a, i) * de[a].col(j) - e(a, j) * de[a].col(i);
      const Eigen::Vector4d ck = einv * bracket;
      for (int k = 0; k < 4; ++k) {
        c(k, i, j) = ck(k);
        c(k, j, i) = -ck(k);
      }
    }
  return c;
}

/// Transition matrices at one point: new frame vectors are sum_j S^j_i old_j.
struct TransitionValue {
  Mat4 S = Mat4::Identity(), T = Mat4::Identity();
  CMat spin, spin_inv;

  int spinor_dim() const { return static_cast<int>(spin.rows()); }
};

/// Smooth tangent (S) and spinor transition fields over the chart.
struct FrameTransition {
  std::function<Mat4(const Point&)> tangent;
  std::function<CMat(const Point&)> spinor;
  int spinor_dim = 2;

  TransitionValue at(const Point& p) const {
    TransitionValue v;
    v.S = tangent(p);
    v.spin = spinor(p);
    require_invertible(v.S, "tangent transition");
    require_invertible(v.spin, "spinor transition");
    v.T = v.S.inverse();
    v.spin_inv = v.spin.inverse();
    if ((v.S * v.T - Mat4::Identity()).cwiseAbs().maxCoeff() >= 1e-10 ||
        (v.spin * v.spin_inv - CMat::Identity(v.spin.rows(), v.spin.cols())).cwiseAbs().maxCoeff() >= 1e-10)
      throw SingularError("transition matrix is too ill-conditioned to invert");
    return v;
  }

  static FrameTransition identity(int dim) {
    return constant(Mat4::Identity(), CMat::Identity(dim, dim));
  }
  static FrameTransition constant(const Mat4& s, const CMat& spin) {
    return {[s](const Point&) { return s; }, [spin](const Point&) { return spin; }, static_cast<int>(spin.rows())};
  }
};

/// theta[i](k,j) = theta^k_ij and vartheta[i](k,j) = vartheta^k_ij.
struct ThetaParameters {
  std::array<Mat4, 4> theta;
  std::array<CMat, 4> vartheta;
  /// Largest gap between the S L(T) and -L(S) T forms.
  double form_discrepancy = 0.0;
};

inline ThetaParameters theta_parameters(const FrameTransition& tr, const FrameField& frame, const Point& p,
                                        const DerivativeOptions& opt = {}) {
  const TransitionValue v = tr.at(p);
  auto t_field = [&](const Point& q) -> Mat4 { return tr.tangent(q).inverse(); };
  auto ti_field = [&](const Point& q) -> CMat { return tr.spinor(q).inverse(); };
  const auto lt = lie_derivatives(t_field, frame, p, opt);
  const auto ls = lie_derivatives(tr.tangent, frame, p, opt);
  const auto lti = lie_derivatives(ti_field, frame, p, opt);
  const auto lsi = lie_derivatives(tr.spinor, frame, p, opt);
  ThetaParameters th;
  for (int i = 0; i < 4; ++i) {
    th.theta[i] = v.S * lt[i];
    th.vartheta[i] = v.spin * lti[i];
    const Mat4 alt = -ls[i] * v.T;
    const CMat valt = -lsi[i] * v.spin_inv;
    th.form_discrepancy = std::max({th.form_discrepancy, (alt - th.theta[i]).cwiseAbs().maxCoeff(),
                                    (valt - th.vartheta[i]).cwiseAbs().maxCoeff()});
  }
  return th;
}

/// forward: components in the new frame from the old; backward: the inverse map.
enum class Direction { forward, backward };

inline SpinTensor transform_components(const SpinTensor& x, const TransitionValue& v, Direction dir) {
  const auto& s = x.signature();
  if (s.rank() > 0 && (s.alpha + s.beta + s.nu + s.gamma) > 0 && s.spinor_dim != v.spinor_dim())
    throw std::invalid_argument("spinor_dim of tensor and transition differ");
  const bool fwd = dir == Direction::forward;
  const CMat up_spin = fwd ? v.spin_inv : v.spin;
  const CMat down_spin = CMat((fwd ? v.spin : v.spin_inv).transpose());
  const Mat4 up_tan = fwd ? v.T : v.S;
  const Mat4 down_tan = (fwd ? v.S : v.T).transpose();
  SpinTensor y = x;
  for (int slot = 0; slot < s.rank(); ++slot) {
    const bool up = s.variance(slot) == Variance::upper;
    switch (s.family(slot)) {
      case Family::spinor: y = apply_to_slot(y, slot, up ? up_spin : down_spin); break;
      case Family::barred: y = apply_to_slot(y, slot, CMat((up ? up_spin : down_spin).conjugate())); break;
      case Family::tangent: y = apply_to_slot(y, slot, up ? up_tan : down_tan); break;
    }
  }
  return y;
}

/**
 * @brief Seeded smooth matrix field exp(M(x)) with M polynomial of degree 2 in x.
 *
 * Coefficients are Gaussian times `amplitude`. The exponential keeps the field invertible.
 */
class PolyExpField {
 public:
  PolyExpField(int dim, bool complex_valued, double amplitude, std::uint64_t seed) : dim_(dim) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& c : coeff_) {
      c = CMat(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          const double re = normal(rng) * amplitude;
          const double im = complex_valued ? normal(rng) * amplitude : 0.0;
          c(i, j) = cplx{re, im};
        }
    }
  }

  CMat generator(const Point& x) const {
    CMat m = coeff_[0];
    int t = 1;
    for (int j = 0; j < 4; ++j) m += coeff_[t++] * x[j];
    for (int j = 0; j < 4; ++j)
      for (int k = j; k < 4; ++k) m += coeff_[t++] * (x[j] * x[k]);
    return m;
  }

  CMat operator()(const Point& x) const { return generator(x).exp(); }

  /// Real-valued variant for tangent transitions (ignores imaginary coefficients).
  Mat4 real4(const Point& x) const {
    if (dim_ != 4) throw std::logic_error("real4 needs a 4x4 field");
    const Mat4 m = generator(x).real();
    return m.exp();
  }

 private:
  int dim_;
  std::array<CMat, 15> coeff_;
};

}  // namespace spinconn
