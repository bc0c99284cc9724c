#include "spinconn/dirac_connection.hpp"
#include "spinconn/scenario_spec.hpp"

#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace spinconn;
using namespace spinconn::testing;

namespace {

double mx(const CMat4& m) { return m.cwiseAbs().maxCoeff(); }

ConnectionProvider dirac_builder(const Scenario& sc) {
  return [sc](const Point& p) { return build_dirac_metric_connection(sc, p); };
}

/// Adds eps times a seeded random matrix to every A_k (Abar follows) and optionally to Gamma.
SpinorConnection perturbed(SpinorConnection c, double eps, std::uint64_t seed, bool tangent) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 4; ++k) {
    if (tangent)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) c.gamma[k](a, b) += eps * n(rng);
    for (int a = 0; a < c.spinor_dim; ++a)
      for (int b = 0; b < c.spinor_dim; ++b) c.a[k](a, b) += eps * cplx{n(rng), n(rng)};
    c.abar[k] = c.a[k].conjugate();
  }
  return c;
}

}  // namespace

TEST_CASE("chirality split of the canonical constants") {
  const auto& c = canonical_dirac_constants();
  const ChiralitySplit s = chirality_split(c);
  CHECK(s.bH == CMat4(Eigen::Vector4cd(1, 1, 0, 0).asDiagonal()));
  CHECK(s.cH == CMat4(Eigen::Vector4cd(0, 0, 1, 1).asDiagonal()));
  // bc keeps the upper-right block of gamma, cb the lower-left.
  for (int m = 0; m < 4; ++m) {
    CHECK(CMat(s.bc[m].topRightCorner(2, 2)) == CMat(c.gamma[m].topRightCorner(2, 2)));
    CHECK(s.bc[m].bottomLeftCorner(2, 2).isZero());
    CHECK(CMat(s.cb[m].bottomLeftCorner(2, 2)) == CMat(c.gamma[m].bottomLeftCorner(2, 2)));
  }
  CHECK(CMat(s.bd_lower.topLeftCorner(2, 2)) == canonical_chiral_constants().d_lower);
  const ResidualReport rep = verify_chirality_split(c, s, 0.0);
  CHECK(rep.checks.size() == 13);
  for (const auto& ch : rep.checks) {
    INFO(ch.name);
    CHECK(ch.max_residual == 0.0);
  }
}

TEST_CASE("chirality split identities hold in deformed frames") {
  const Scenario sc = curved_scenario(4).deformed(random_deformation(4, 5, 0.2));
  for (const auto& p : sc.points) {
    const DiracConstants c = dirac_structure(sc, p);
    const ResidualReport rep = verify_chirality_split(c, chirality_split(c), 1e-10);
    for (const auto& ch : rep.checks) {
      INFO(ch.name << " " << ch.max_residual);
      CHECK(ch.pass);
    }
  }
  CHECK_THROWS_AS(dirac_structure(curved_scenario(2), default_points()[0]), std::invalid_argument);
}

TEST_CASE("flat Dirac scenario gives the zero connection") {
  Scenario sc;
  sc.spinor_dim = 4;
  sc.points = default_points();
  for (const auto& p : sc.points) CHECK(build_dirac_metric_connection(sc, p).max_abs() < 1e-12);
}

TEST_CASE("Dirac and chiral builders agree on diag-scale") {
  const Scenario s2 = diag_scale_scenario(2), s4 = diag_scale_scenario(4);
  for (const auto& p : s2.points) {
    const SpinorConnection c2 = build_chiral_metric_connection(s2, p);
    const SpinorConnection c4 = build_dirac_metric_connection(s4, p);
    for (int k = 0; k < 4; ++k) CHECK(mx(c2.gamma[k] - c4.gamma[k]) == 0.0);
    CHECK(max_abs_diff(restrict_to_chiral(c4).chiral, c2) < 1e-6);
  }
}

TEST_CASE("block assembly equals the collapsed formula") {
  const std::vector<Scenario> cases{curved_scenario(4).deformed(random_deformation(4, 41)),
                                    diag_scale_scenario(4).deformed(random_deformation(4, 42, 0.2)),
                                    curved_scenario(4, false).deformed(chirality_preserving_deformation(43))};
  for (const auto& sc : cases)
    for (const auto& p : sc.points) {
      const DiracAInputs in = dirac_a_inputs(sc, p);
      for (int k = 0; k < 4; ++k) {
        const DiracABlocks b = dirac_a_blocks(in, k);
        // Each block lives where its name says.
        CHECK(mx(in.split.cH * b.bullet_circ) + mx(b.bullet_circ * in.split.bH) < 1e-10);
        CHECK(mx(b.circ_circ - in.split.cH * b.circ_circ * in.split.cH) < 1e-10);
        CHECK(mx(b.bullet_bullet - in.split.bH * b.bullet_bullet * in.split.bH) < 1e-10);
      }
      CHECK(dirac_block_discrepancy(sc, p) < 1e-10);
    }
}

TEST_CASE("restriction to the chiral block reproduces the two-spinor connection") {
  for (std::uint64_t seed : {51u, 52u, 53u}) {
    const Scenario s2 = curved_scenario(2).deformed(random_deformation(2, seed));
    const Scenario s4 = curved_scenario(4).deformed(chirality_preserving_deformation(seed));
    for (const auto& p : s4.points) {
      const ChiralRestriction r = restrict_to_chiral(build_dirac_metric_connection(s4, p));
      const SpinorConnection c2 = build_chiral_metric_connection(s2, p);
      CHECK(max_abs_diff(r.chiral, c2) < 1e-6);
      CHECK(r.conjugate_block_residual < 1e-10);
      CHECK(r.off_block_max < 1e-9);
    }
  }
}

TEST_CASE("restriction rejects connections that mix chiralities") {
  const Scenario sc = curved_scenario(4).deformed(random_deformation(4, 61, 0.2));
  const SpinorConnection c = build_dirac_metric_connection(sc, sc.points[0]);
  CHECK_THROWS_AS(restrict_to_chiral(c), BlockStructureError);
  CHECK_THROWS_WITH(restrict_to_chiral(c), "connection not block-diagonal in chiral frame");
  CHECK_THROWS_AS(restrict_to_chiral(SpinorConnection::zero(2)), std::invalid_argument);
}

TEST_CASE("Dirac metric connection is concordant") {
  const std::vector<Scenario> cases{diag_scale_scenario(4), diag_scale_tetrad_scenario(4), curved_scenario(4),
                                    curved_scenario(4).deformed(random_deformation(4, 71)),
                                    curved_scenario(4).deformed(chirality_preserving_deformation(72))};
  for (const auto& sc : cases) {
    INFO(sc.name);
    const ResidualReport rep = verify_dirac_concordance(dirac_builder(sc), sc, sc.points, 1e-6);
    for (const auto& ch : rep.checks) {
      INFO(ch.name << " " << ch.max_residual);
      CHECK(ch.pass);
    }
    CHECK(rep.residual("H_trace") < 1e-8);
    for (const auto& p : sc.points) CHECK(build_dirac_metric_connection(sc, p).reality_residual() == 0.0);
  }
}

TEST_CASE("concordance residuals grow linearly with a perturbation of A") {
  const Scenario sc = curved_scenario(4).deformed(random_deformation(4, 81));
  const Point p = sc.points[1];
  const SpinorConnection base = build_dirac_metric_connection(sc, p);
  std::vector<double> slopes;
  for (double eps : {1e-4, 1e-3, 1e-2}) {
    const SpinorConnection c = perturbed(base, eps, 5, false);
    const ResidualReport r = verify_dirac_concordance([&](const Point&) { return c; }, sc, {p}, 1.0);
    slopes.push_back(r.residual("nabla_gamma") / eps);
  }
  for (double s : slopes) {
    CHECK(s > 0.5);
    CHECK(s < 10.0 * slopes.front());
    CHECK(s > slopes.front() / 10.0);
  }
}

TEST_CASE("nabla H is controlled by nabla gamma and nabla d") {
  const Scenario sc = curved_scenario(4).deformed(random_deformation(4, 91));
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (const auto& p : sc.points) {
    const SpinorConnection base = build_dirac_metric_connection(sc, p);
    for (double eps : {1e-3, 1e-2, 1e-1}) {
      const SpinorConnection c = perturbed(base, eps, seed++, true);
      const ResidualReport r = verify_dirac_concordance([&](const Point&) { return c; }, sc, {p}, 1.0);
      const double bound = std::max(r.residual("nabla_gamma"), r.residual("nabla_d"));
      worst = std::max(worst, r.residual("nabla_H") / bound);
    }
  }
  INFO("worst ratio " << worst);
  CHECK(worst < 50.0);
}

TEST_CASE("Dirac builder is covariant under frame changes") {
  const Scenario sc = curved_scenario(4);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FrameTransition tr = random_deformation(4, seed);
    const Scenario moved = sc.deformed(tr);
    for (const auto& p : sc.points) {
      const ThetaParameters th = theta_parameters(tr, sc.frame_field(), p, sc.deriv);
      const SpinorConnection expect =
          transform_connection(build_dirac_metric_connection(sc, p), tr.at(p), th, Direction::forward);
      CHECK(max_abs_diff(expect, build_dirac_metric_connection(moved, p)) < 1e-5);
    }
  }
}
