#pragma once

#include "spinconn/frames.hpp"
#include "spinconn/lorentz_cover.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace spinconn {

using MatrixField = std::function<Mat4(const Point&)>;
using SpinMatrixField = std::function<CMat(const Point&)>;
using TorsionField = std::function<Tensor3(const Point&)>;

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * @brief Geometry over one chart.
 *
 * The canonical spinor constants hold in the orthonormal `tetrad` frame. The working
 * frame is tetrad * frame_change, and the working spinor frame differs from the
 * canonical one by spin_change. Torsion is given in tetrad components.
 */
struct Scenario {
  std::string name = "unnamed";
  int spinor_dim = 2;
  MatrixField coord_metric = [](const Point&) { return minkowski(); };
  MatrixField tetrad = [](const Point&) { return Mat4::Identity(); };
  MatrixField frame_change = [](const Point&) { return Mat4::Identity(); };
  SpinMatrixField spin_change;
  TorsionField torsion;
  std::vector<Point> points;
  DerivativeOptions deriv;

  Mat4 frame(const Point& p) const { return tetrad(p) * frame_change(p); }

  FrameField frame_field() const {
    auto t = tetrad;
    auto s = frame_change;
    return [t, s](const Point& p) { return Mat4(t(p) * s(p)); };
  }

  /// Metric components g_ij in the working frame.
  Mat4 metric(const Point& p) const {
    const Mat4 e = frame(p);
    return e.transpose() * coord_metric(p) * e;
  }

  CMat spin(const Point& p) const {
    return spin_change ? spin_change(p) : CMat(CMat::Identity(spinor_dim, spinor_dim));
  }

  /// Transition from the canonical (tetrad) frames to the working frames.
  FrameTransition transition() const {
    auto s = frame_change;
    auto sp = spin_change;
    const int dim = spinor_dim;
    return {s, [sp, dim](const Point& p) { return sp ? sp(p) : CMat(CMat::Identity(dim, dim)); }, dim};
  }

  bool has_torsion() const { return static_cast<bool>(torsion); }

  /// Torsion in working-frame components.
  Tensor3 torsion_at(const Point& p) const {
    Tensor3 out;
    if (!torsion) return out;
    const Tensor3 t = torsion(p);
    const Mat4 s = frame_change(p);
    const Mat4 tinv = s.inverse();
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 4; ++a) {
        if (tinv(k, a) == 0.0) continue;
        out.slice[k] += tinv(k, a) * (s.transpose() * t.slice[a] * s);
      }
    return out;
  }

  /// The same geometry seen from frames changed once more by `extra`.
  Scenario deformed(const FrameTransition& extra) const {
    if (extra.spinor_dim != spinor_dim) throw ScenarioError("deformation spinor_dim mismatch");
    Scenario d = *this;
    auto s = frame_change;
    auto es = extra.tangent;
    d.frame_change = [s, es](const Point& p) { return Mat4(s(p) * es(p)); };
    auto sp = spin_change;
    auto esp = extra.spinor;
    const int dim = spinor_dim;
    d.spin_change = [sp, esp, dim](const Point& p) {
      return CMat((sp ? sp(p) : CMat(CMat::Identity(dim, dim))) * esp(p));
    };
    return d;
  }

  /// Checks the sample points against the invariants the builders rely on.
  void validate() const {
    deriv.validate();
    if (spinor_dim != 2 && spinor_dim != 4) throw ScenarioError("spinor_dim must be 2 or 4");
    if (points.empty()) throw ScenarioError("scenario has no sample points");
    const Mat4 eta = minkowski();
    for (const auto& p : points) {
      const Mat4 g = coord_metric(p);
      if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
        throw ScenarioError("metric is not symmetric at a sample point");
      Eigen::SelfAdjointEigenSolver<Mat4> es(g);
      const auto ev = es.eigenvalues();
      const int positive = static_cast<int>((ev.array() > 0.0).count());
      const int negative = static_cast<int>((ev.array() < 0.0).count());
      if (positive != 1 || negative != 3) throw ScenarioError("metric signature is not (+,-,-,-) at a sample point");
      const Mat4 tet = tetrad(p);
      if (!(std::abs(tet.determinant()) > kSingularDet)) throw ScenarioError("tetrad is singular at a sample point");
      const Mat4 gt = tet.transpose() * g * tet;
      if ((gt - eta).cwiseAbs().maxCoeff() > 1e-9)
        throw ScenarioError("tetrad is not orthonormal for the metric at a sample point");
      if (!(std::abs(frame(p).determinant()) > kSingularDet)) throw ScenarioError("frame is singular at a sample point");
      if (torsion) {
        const Tensor3 t = torsion(p);
        for (int k = 0; k < 4; ++k)
          if ((t.slice[k] + t.slice[k].transpose()).cwiseAbs().maxCoeff() != 0.0)
            throw ScenarioError("torsion is not antisymmetric in its lower indices");
      }
    }
  }
};

/// Five sample points spread around `center`, used by the bundled scenarios and tests.
inline std::vector<Point> default_points(const Point& center = {0.5, 0.1, -0.2, 0.3}) {
  std::vector<Point> pts;
  const std::array<Point, 5> offsets{{{0.0, 0.0, 0.0, 0.0},
                                      {0.1, -0.05, 0.02, 0.0},
                                      {-0.2, 0.1, 0.0, -0.1},
                                      {0.25, 0.0, -0.15, 0.05},
                                      {-0.1, 0.2, 0.1, 0.2}}};
  for (const auto& o : offsets) pts.push_back({center[0] + o[0], center[1] + o[1], center[2] + o[2], center[3] + o[3]});
  return pts;
}

/// Seeded polynomial-exponential deformation of the tangent and spinor frames.
inline FrameTransition random_deformation(int spinor_dim, std::uint64_t seed, double amplitude = 0.1) {
  auto tan = std::make_shared<PolyExpField>(4, false, amplitude, seed * 2654435761ULL + 1);
  auto spin = std::make_shared<PolyExpField>(spinor_dim, true, amplitude, seed * 2654435761ULL + 2);
  return {[tan](const Point& p) { return tan->real4(p); }, [spin](const Point& p) { return (*spin)(p); }, spinor_dim};
}

}  // namespace spinconn
