#pragma once

#include "spinconn/scenario.hpp"

#include <cmath>

namespace spinconn::testing {

inline Mat4 diag_scale_metric(const Point& p) {
  Mat4 g = minkowski();
  g(1, 1) = -(1.0 + p[0]) * (1.0 + p[0]);
  return g;
}

inline Mat4 diag_scale_tetrad(const Point& p) {
  Mat4 e = Mat4::Identity();
  e(1, 1) = 1.0 / (1.0 + p[0]);
  return e;
}

/// g = diag(1, -(1+x0)^2, -1, -1) worked in its orthonormal tetrad.
inline Scenario diag_scale_tetrad_scenario(int spinor_dim = 2) {
  Scenario sc;
  sc.name = "diag-scale-tetrad";
  sc.spinor_dim = spinor_dim;
  sc.coord_metric = diag_scale_metric;
  sc.tetrad = diag_scale_tetrad;
  sc.points = default_points();
  return sc;
}

/// The same geometry worked in the coordinate frame.
inline Scenario diag_scale_scenario(int spinor_dim = 2) {
  Scenario sc = diag_scale_tetrad_scenario(spinor_dim);
  sc.name = "diag-scale";
  sc.frame_change = [](const Point& p) { return Mat4(diag_scale_tetrad(p).inverse()); };
  return sc;
}

/// A non-diagonal metric with a lower-triangular tetrad and a small torsion field.
inline Scenario curved_scenario(int spinor_dim = 2, bool with_torsion = true) {
  Scenario sc;
  sc.name = "curved";
  sc.spinor_dim = spinor_dim;
  // tetrad columns e_i; the metric is defined from the tetrad so it is orthonormal by construction.
  sc.tetrad = [](const Point& p) {
    Mat4 e = Mat4::Identity();
    e(0, 0) = 1.0 / (1.0 + 0.2 * p[1] * p[1]);
    e(1, 0) = 0.1 * std::sin(p[2]);
    e(1, 1) = std::exp(-0.3 * p[0]);
    e(2, 1) = 0.2 * p[3];
    e(2, 2) = 1.0 / (1.0 + 0.1 * p[0]);
    e(3, 2) = 0.15 * std::cos(p[1]);
    e(3, 3) = 1.0 + 0.05 * p[2];
    return e;
  };
  auto tet = sc.tetrad;
  sc.coord_metric = [tet](const Point& p) {
    const Mat4 inv = tet(p).inverse();
    return Mat4(inv.transpose() * minkowski() * inv);
  };
  if (with_torsion)
    sc.torsion = [](const Point& p) {
      Tensor3 t;
      auto set = [&t](int k, int i, int j, double v) {
        t(k, i, j) = v;
        t(k, j, i) = -v;
      };
      set(0, 1, 2, 0.1 * std::sin(p[1]));
      set(3, 0, 1, 0.05 * p[0] * p[2]);
      set(2, 2, 3, 0.2);
      set(1, 0, 3, -0.07 * p[3]);
      return t;
    };
  sc.points = default_points();
  return sc;
}

}  // namespace spinconn::testing
