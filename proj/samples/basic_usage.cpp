// Builds the metric connection of g = diag(1, -(1+x0)^2, -1, -1) in its coordinate
// frame and checks that it annihilates the metric, the spin metric and G.
#include "spinconn/chiral.hpp"
#include "spinconn/scenario.hpp"

#include <cstdio>

int main() {
  using namespace spinconn;
  Scenario sc;
  sc.name = "diag-scale";
  sc.coord_metric = [](const Point& p) {
    Mat4 g = minkowski();
    g(1, 1) = -(1.0 + p[0]) * (1.0 + p[0]);
    return g;
  };
  // Orthonormal tetrad for the spinor constants; the working frame is the coordinate frame.
  sc.tetrad = [](const Point& p) {
    Mat4 e = Mat4::Identity();
    e(1, 1) = 1.0 / (1.0 + p[0]);
    return e;
  };
  sc.frame_change = [](const Point& p) {
    Mat4 s = Mat4::Identity();
    s(1, 1) = 1.0 + p[0];
    return s;
  };
  sc.points = default_points();
  sc.validate();

  const SpinorConnection conn = build_chiral_metric_connection(sc, sc.points[0]);
  std::printf("Gamma^1_01 = %.10f (expect 1/(1+x0) = %.10f)\n", conn.gamma[0](1, 1).real(), 1.0 / 1.5);
  std::printf("Gamma^0_11 = %.10f (expect 1+x0 = 1.5)\n", conn.gamma[1](0, 1).real());

  const ResidualReport rep = verify_chiral_concordance(
      [&sc](const Point& p) { return build_chiral_metric_connection(sc, p); }, sc, sc.points, 1e-6);
  for (const auto& c : rep.checks) std::printf("%-20s %.2e %s\n", c.name.c_str(), c.max_residual, c.pass ? "ok" : "FAIL");
  return rep.pass() ? 0 : 1;
}
