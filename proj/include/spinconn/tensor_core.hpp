#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <string>
#include <vector>

namespace spinconn {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix4d;
using CMat4 = Eigen::Matrix4cd;
using CMat = Eigen::MatrixXcd;

/// Which kind of index a slot carries.
enum class Family { spinor, barred, tangent };
enum class Variance { upper, lower };

/**
 * @brief Type (alpha,beta|nu,gamma|m,n) of a mixed spin-tensor.
 *
 * Slots are stored in the order: upper spinor, lower spinor, upper barred,
 * lower barred, upper tangent, lower tangent.
 */
struct TensorSignature {
  int alpha = 0, beta = 0, nu = 0, gamma = 0, m = 0, n = 0;
  int spinor_dim = 2;

  int rank() const { return alpha + beta + nu + gamma + m + n; }

  int count(Family f, Variance v) const {
    const bool up = v == Variance::upper;
    switch (f) {
      case Family::spinor: return up ? alpha : beta;
      case Family::barred: return up ? nu : gamma;
      case Family::tangent: return up ? m : n;
    }
    return 0;
  }

  int& count_ref(Family f, Variance v) {
    const bool up = v == Variance::upper;
    switch (f) {
      case Family::spinor: return up ? alpha : beta;
      case Family::barred: return up ? nu : gamma;
      case Family::tangent: break;
    }
    return up ? m : n;
  }

  /// Index of the first slot of the given block.
  int block_start(Family f, Variance v) const {
    const std::array<int, 6> counts{alpha, beta, nu, gamma, m, n};
    const int block = 2 * static_cast<int>(f) + (v == Variance::lower ? 1 : 0);
    int s = 0;
    for (int b = 0; b < block; ++b) s += counts[b];
    return s;
  }

  Family family(int slot) const {
    if (slot < alpha + beta) return Family::spinor;
    if (slot < alpha + beta + nu + gamma) return Family::barred;
    return Family::tangent;
  }

  Variance variance(int slot) const {
    const std::array<int, 6> counts{alpha, beta, nu, gamma, m, n};
    int s = 0;
    for (int b = 0; b < 6; ++b) {
      s += counts[b];
      if (slot < s) return b % 2 == 0 ? Variance::upper : Variance::lower;
    }
    throw std::out_of_range("slot out of range");
  }

  int extent(int slot) const { return family(slot) == Family::tangent ? 4 : spinor_dim; }

  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < rank(); ++i) s *= static_cast<std::size_t>(extent(i));
    return s;
  }

  void validate() const {
    if (alpha < 0 || beta < 0 || nu < 0 || gamma < 0 || m < 0 || n < 0)
      throw std::invalid_argument("tensor signature counts must be non-negative");
    if (spinor_dim != 2 && spinor_dim != 4)
      throw std::invalid_argument("spinor_dim must be 2 or 4");
  }

  bool operator==(const TensorSignature&) const = default;
};

inline std::string to_string(const TensorSignature& s) {
  return "(" + std::to_string(s.alpha) + "," + std::to_string(s.beta) + "|" + std::to_string(s.nu) +
         "," + std::to_string(s.gamma) + "|" + std::to_string(s.m) + "," + std::to_string(s.n) +
         ")/" + std::to_string(s.spinor_dim);
}

/// Dense component array of a spin-tensor at one point, row-major over the slot order.
class SpinTensor {
 public:
  SpinTensor() : SpinTensor(TensorSignature{}) {}

  explicit SpinTensor(const TensorSignature& sig) : sig_(sig) {
    sig_.validate();
    data_.assign(sig_.size(), cplx{0.0, 0.0});
    strides_.assign(static_cast<std::size_t>(sig_.rank()), 1);
    for (int s = sig_.rank() - 2; s >= 0; --s)
      strides_[s] = strides_[s + 1] * static_cast<std::size_t>(sig_.extent(s + 1));
  }

  SpinTensor(const TensorSignature& sig, std::vector<cplx> data) : SpinTensor(sig) {
    if (data.size() != data_.size()) throw std::invalid_argument("component count does not match signature");
    data_ = std::move(data);
  }

  const TensorSignature& signature() const { return sig_; }
  int rank() const { return sig_.rank(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }
  std::size_t stride(int slot) const { return strides_[slot]; }

  /// Flat offset of a 0-based multi-index.
  std::size_t offset(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw std::invalid_argument("index arity mismatch");
    std::size_t off = 0;
    for (int s = 0; s < rank(); ++s) {
      if (idx[s] < 0 || idx[s] >= sig_.extent(s)) throw std::out_of_range("index out of range");
      off += strides_[s] * static_cast<std::size_t>(idx[s]);
    }
    return off;
  }

  cplx& raw(std::span<const int> idx) { return data_[offset(idx)]; }
  const cplx& raw(std::span<const int> idx) const { return data_[offset(idx)]; }

  /// 0-based access for every slot, e.g. x.raw(i, j, k).
  template <class... I>
    requires(sizeof...(I) > 0 && (std::is_integral_v<I> && ...))
  cplx& raw(I... i) {
    const std::array<int, sizeof...(I)> a{static_cast<int>(i)...};
    return data_[offset(a)];
  }
  template <class... I>
    requires(sizeof...(I) > 0 && (std::is_integral_v<I> && ...))
  const cplx& raw(I... i) const {
    const std::array<int, sizeof...(I)> a{static_cast<int>(i)...};
    return data_[offset(a)];
  }

  /// Conventional access: spinor and barred indices from 1, tangent indices from 0.
  cplx& at(std::initializer_list<int> idx) { return data_[offset(to_raw(idx))]; }
  const cplx& at(std::initializer_list<int> idx) const { return data_[offset(to_raw(idx))]; }

  /// Visit every 0-based multi-index in storage order.
  template <class F>
  void for_each_index(F&& f) const {
    std::vector<int> idx(static_cast<std::size_t>(rank()), 0);
    for (std::size_t flat = 0; flat < data_.size(); ++flat) {
      f(std::as_const(idx), flat);
      for (int s = rank() - 1; s >= 0; --s) {
        if (++idx[s] < sig_.extent(s)) break;
        idx[s] = 0;
      }
    }
  }

  double max_abs() const {
    double r = 0.0;
    for (const auto& z : data_) r = std::max(r, std::abs(z));
    return r;
  }

  SpinTensor& operator+=(const SpinTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SpinTensor& operator-=(const SpinTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SpinTensor& operator*=(cplx c) {
    for (auto& z : data_) z *= c;
    return *this;
  }
  friend SpinTensor operator+(SpinTensor a, const SpinTensor& b) { return a += b; }
  friend SpinTensor operator-(SpinTensor a, const SpinTensor& b) { return a -= b; }
  friend SpinTensor operator*(SpinTensor a, cplx c) { return a *= c; }
  friend SpinTensor operator*(cplx c, SpinTensor a) { return a *= c; }
  friend SpinTensor operator*(SpinTensor a, double c) { return a *= cplx{c, 0.0}; }
  friend SpinTensor operator*(double c, SpinTensor a) { return a *= cplx{c, 0.0}; }

 private:
  std::vector<int> to_raw(std::initializer_list<int> idx) const {
    std::vector<int> r(idx);
    if (static_cast<int>(r.size()) != rank()) throw std::invalid_argument("index arity mismatch");
    for (int s = 0; s < rank(); ++s)
      if (sig_.family(s) != Family::tangent) --r[s];
    return r;
  }

  void check_same(const SpinTensor& o) const {
    if (!(sig_ == o.sig_)) throw std::invalid_argument("signature mismatch");
  }

  TensorSignature sig_;
  std::vector<cplx> data_;
  std::vector<std::size_t> strides_;
};

inline double max_abs_diff(const SpinTensor& a, const SpinTensor& b) { return (a - b).max_abs(); }

/// Inverse metric data used for raising and lowering.
struct MetricMatrices {
  Mat4 g_lower = Mat4::Identity();
  Mat4 g_upper = Mat4::Identity();
  CMat d_lower, d_upper, dbar_lower, dbar_upper;

  static MetricMatrices from_lower(const Mat4& g, const CMat& d) {
    MetricMatrices mm;
    mm.g_lower = g;
    mm.g_upper = g.inverse();
    mm.d_lower = d;
    mm.d_upper = d.inverse();
    mm.dbar_lower = d.conjugate();
    mm.dbar_upper = mm.d_upper.conjugate();
    return mm;
  }
};

/**
 * Rebuild X under a new signature; `source_slot[t]` names the old slot feeding new slot t.
 */
inline SpinTensor reindex(const SpinTensor& x, const TensorSignature& sig, const std::vector<int>& source_slot) {
  SpinTensor y(sig);
  std::vector<int> old(static_cast<std::size_t>(x.rank()));
  y.for_each_index([&](const std::vector<int>& idx, std::size_t flat) {
    for (int t = 0; t < sig.rank(); ++t) old[source_slot[t]] = idx[t];
    y.data()[flat] = x.raw(old);
  });
  return y;
}

/// Exchange barred and unbarred blocks and conjugate.
inline SpinTensor tau(const SpinTensor& x) {
  const auto& s = x.signature();
  TensorSignature t{s.nu, s.gamma, s.alpha, s.beta, s.m, s.n, s.spinor_dim};
  std::vector<int> src;
  const int a0 = s.block_start(Family::spinor, Variance::upper);
  const int b0 = s.block_start(Family::spinor, Variance::lower);
  const int nu0 = s.block_start(Family::barred, Variance::upper);
  const int g0 = s.block_start(Family::barred, Variance::lower);
  for (int i = 0; i < s.nu; ++i) src.push_back(nu0 + i);
  for (int i = 0; i < s.gamma; ++i) src.push_back(g0 + i);
  for (int i = 0; i < s.alpha; ++i) src.push_back(a0 + i);
  for (int i = 0; i < s.beta; ++i) src.push_back(b0 + i);
  for (int i = s.alpha + s.beta + s.nu + s.gamma; i < s.rank(); ++i) src.push_back(i);
  SpinTensor y = reindex(x, t, src);
  for (auto& z : y.data()) z = std::conj(z);
  return y;
}

/// Sum an upper slot against a lower slot of the same family.
inline SpinTensor contract(const SpinTensor& x, int slot_a, int slot_b) {
  const auto& s = x.signature();
  if (slot_a < 0 || slot_a >= s.rank() || slot_b < 0 || slot_b >= s.rank())
    throw std::out_of_range("contraction slot out of range");
  if (s.family(slot_a) != s.family(slot_b)) throw std::invalid_argument("contraction of mismatched index families");
  if (s.variance(slot_a) != Variance::upper || s.variance(slot_b) != Variance::lower)
    throw std::invalid_argument("contraction needs an upper and a lower slot");
  const Family f = s.family(slot_a);
  TensorSignature t = s;
  --t.count_ref(f, Variance::upper);
  --t.count_ref(f, Variance::lower);
  SpinTensor y(t);
  const int ext = s.extent(slot_a);
  std::vector<int> old(static_cast<std::size_t>(s.rank()));
  y.for_each_index([&](const std::vector<int>& idx, std::size_t flat) {
    int k = 0;
    for (int o = 0; o < s.rank(); ++o)
      if (o != slot_a && o != slot_b) old[o] = idx[k++];
    cplx acc{0.0, 0.0};
    for (int v = 0; v < ext; ++v) {
      old[slot_a] = v;
      old[slot_b] = v;
      acc += x.raw(old);
    }
    y.data()[flat] = acc;
  });
  return y;
}

/// Outer product with slots merged block by block (X's slots precede Y's in each block).
inline SpinTensor tensor_product(const SpinTensor& x, const SpinTensor& y) {
  const auto& a = x.signature();
  const auto& b = y.signature();
  if (a.spinor_dim != b.spinor_dim) throw std::invalid_argument("spinor_dim mismatch in tensor product");
  TensorSignature t{a.alpha + b.alpha, a.beta + b.beta, a.nu + b.nu, a.gamma + b.gamma, a.m + b.m, a.n + b.n,
                    a.spinor_dim};
  SpinTensor r(t);
  // new slot -> (operand, slot in operand)
  std::vector<std::pair<int, int>> origin;
  for (int blk = 0; blk < 6; ++blk) {
    const Family f = static_cast<Family>(blk / 2);
    const Variance v = blk % 2 == 0 ? Variance::upper : Variance::lower;
    for (int i = 0; i < a.count(f, v); ++i) origin.emplace_back(0, a.block_start(f, v) + i);
    for (int i = 0; i < b.count(f, v); ++i) origin.emplace_back(1, b.block_start(f, v) + i);
  }
  std::vector<int> ix(static_cast<std::size_t>(a.rank())), iy(static_cast<std::size_t>(b.rank()));
  r.for_each_index([&](const std::vector<int>& idx, std::size_t flat) {
    for (int t2 = 0; t2 < t.rank(); ++t2) (origin[t2].first == 0 ? ix : iy)[origin[t2].second] = idx[t2];
    r.data()[flat] = x.raw(ix) * y.raw(iy);
  });
  return r;
}

/// Y[..i..] = sum_a M(i,a) X[..a..] along one slot.
template <class Matrix>
SpinTensor apply_to_slot(const SpinTensor& x, int slot, const Matrix& mat) {
  const int ext = x.signature().extent(slot);
  if (mat.rows() != ext || mat.cols() != ext) throw std::invalid_argument("matrix size does not match slot extent");
  SpinTensor y(x.signature());
  const std::size_t st = x.stride(slot);
  const std::size_t block = st * static_cast<std::size_t>(ext);
  for (std::size_t base = 0; base < x.size(); base += block)
    for (std::size_t inner = 0; inner < st; ++inner)
      for (int i = 0; i < ext; ++i) {
        cplx acc{0.0, 0.0};
        for (int a = 0; a < ext; ++a) acc += cplx(mat(i, a)) * x.data()[base + inner + st * a];
        y.data()[base + inner + st * i] = acc;
      }
  return y;
}

enum class IndexMove { lower, raise };

/**
 * @brief Lower or raise one slot with g, d or dbar.
 *
 * Both directions contract the first index of the metric: X_i = sum_j X^j m_{ji} and
 * X^i = sum_j X_j m^{ji}. The moved slot is appended to the end of its target block.
 */
inline SpinTensor raise_lower(const SpinTensor& x, int slot, const MetricMatrices& mm, IndexMove dir) {
  const auto& s = x.signature();
  const Family f = s.family(slot);
  const Variance v = s.variance(slot);
  if ((dir == IndexMove::lower) != (v == Variance::upper))
    throw std::invalid_argument(dir == IndexMove::lower ? "slot is already lower" : "slot is already upper");
  CMat metric;
  const bool lowering = dir == IndexMove::lower;
  switch (f) {
    case Family::tangent: metric = (lowering ? mm.g_lower : mm.g_upper).cast<cplx>(); break;
    case Family::spinor: metric = lowering ? mm.d_lower : mm.d_upper; break;
    case Family::barred: metric = lowering ? mm.dbar_lower : mm.dbar_upper; break;
  }
  if (metric.rows() != s.extent(slot)) throw std::invalid_argument("metric size does not match slot");
  const SpinTensor contracted = apply_to_slot(x, slot, CMat(metric.transpose()));

  const Variance target = lowering ? Variance::lower : Variance::upper;
  TensorSignature t = s;
  --t.count_ref(f, v);
  ++t.count_ref(f, target);
  // Old slot order with `slot` removed, then reinserted at the end of the target block.
  std::vector<int> src;
  for (int o = 0; o < s.rank(); ++o)
    if (o != slot) src.push_back(o);
  const int insert_at = t.block_start(f, target) + t.count(f, target) - 1;
  src.insert(src.begin() + insert_at, slot);
  return reindex(contracted, t, src);
}

}  // namespace spinconn
