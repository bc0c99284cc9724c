#include "spinconn/dirac.hpp"

#include <catch_amalgamated.hpp>

using namespace spinconn;

namespace {

const cplx I{0.0, 1.0};

double mx(const CMat4& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("canonical gamma matrices") {
  const auto& c = canonical_dirac_constants();
  // gamma_0 swaps the two chiral blocks.
  CHECK(c.gamma[0].topLeftCorner(2, 2).isZero());
  CHECK(c.gamma[0].bottomRightCorner(2, 2).isZero());
  CHECK(c.gamma[0].topRightCorner(2, 2) == CMat(CMat::Identity(2, 2)));
  CHECK(c.gamma[0].bottomLeftCorner(2, 2) == CMat(CMat::Identity(2, 2)));
  // gamma^3_{2,1} and gamma^2_{3,2}: spinor indices 1-based, tangent index 0-based.
  CHECK(c.gamma[1](2, 1) == cplx(-1.0));
  CHECK(c.gamma[2](1, 2) == I);
  // Clifford relation written out for a few pairs.
  const CMat4 id = CMat4::Identity();
  CHECK(c.gamma[1] * c.gamma[1] + c.gamma[1] * c.gamma[1] == CMat4(-2.0 * id));
  CHECK(c.gamma[0] * c.gamma[0] + c.gamma[0] * c.gamma[0] == CMat4(2.0 * id));
  CHECK((c.gamma[1] * c.gamma[2] + c.gamma[2] * c.gamma[1]).isZero());
  CHECK(c.H == CMat4(Eigen::Vector4cd(1, 1, -1, -1).asDiagonal()));
  CHECK((c.d_lower + c.d_lower.transpose()).isZero());
}

TEST_CASE("Dirac identity suite is exact") {
  const ResidualReport rep = verify_dirac_identities(canonical_dirac_constants(), 0.0);
  CHECK(rep.checks.size() >= 20);
  for (const auto& c : rep.checks) {
    INFO(c.name);
    CHECK(c.max_residual == 0.0);
  }
}

TEST_CASE("identity suite survives the inversions") {
  for (Inversion inv : {Inversion::P, Inversion::T, Inversion::PT}) {
    const DiracConstants c = transform_dirac(canonical_dirac_constants(), frame_inversion(inv), minkowski());
    const ResidualReport rep = verify_dirac_identities(c, 1e-12);
    for (const auto& ch : rep.checks) {
      INFO(ch.name);
      CHECK(ch.pass);
    }
  }
}

TEST_CASE("identity suite holds in a generic frame pair") {
  const FrameTransition tr = random_deformation(4, 9, 0.3);
  const TransitionValue v = tr.at({0.2, -0.1, 0.4, 0.0});
  const Mat4 g = v.S.transpose() * minkowski() * v.S;
  const DiracConstants c = transform_dirac(canonical_dirac_constants(), v, g);
  const ResidualReport rep = verify_dirac_identities(c, 1e-10);
  for (const auto& ch : rep.checks) {
    INFO(ch.name << " " << ch.max_residual);
    CHECK(ch.pass);
  }
}

TEST_CASE("identity suite detects a broken gamma matrix") {
  DiracConstants c = canonical_dirac_constants();
  c.gamma[2](0, 3) += 0.01;
  c.complete();
  const ResidualReport rep = verify_dirac_identities(c, 1e-12);
  CHECK_FALSE(rep.pass());
  CHECK(rep.residual("clifford_anticommutator") > 1e-3);
}

TEST_CASE("chiral constants embed into the Dirac tables") {
  const EmbeddedChiralFrame e = embed_chiral_frame();
  CHECK(e.d_residual == 0.0);
  CHECK(e.gamma_residual == 0.0);
  CHECK(e.G_action_residual == 0.0);
  CHECK(e.kind == DiracFrameKind{Orthonormality::ortho, Chirality::chiral, Adjointness::self_adjoint});
  // d splits as d on the chiral block and the dual barred d on the other.
  const auto& can = canonical_dirac_constants();
  CHECK(CMat(can.d_lower.topLeftCorner(2, 2)) == canonical_chiral_constants().d_lower);
  CHECK(CMat(can.d_lower.bottomRightCorner(2, 2)) == canonical_chiral_constants().dbar_upper);
}

TEST_CASE("classification of the inverted frames") {
  struct Row {
    Inversion inv;
    DiracFrameKind kind;
  };
  const Row rows[] = {
      {Inversion::P, {Orthonormality::anti_ortho, Chirality::anti_chiral, Adjointness::self_adjoint}},
      {Inversion::T, {Orthonormality::ortho, Chirality::anti_chiral, Adjointness::anti_self_adjoint}},
      {Inversion::PT, {Orthonormality::anti_ortho, Chirality::chiral, Adjointness::anti_self_adjoint}},
  };
  for (const auto& r : rows) {
    const DiracConstants c = transform_dirac(canonical_dirac_constants(), frame_inversion(r.inv), minkowski());
    INFO(to_string(classify_dirac_frame(c.d_lower, c.H, c.D_lower)));
    CHECK(classify_dirac_frame(c.d_lower, c.H, c.D_lower) == r.kind);
  }
  const auto& can = canonical_dirac_constants();
  CHECK(classify_dirac_frame(can.d_lower, can.H, can.D_lower) ==
        DiracFrameKind{Orthonormality::ortho, Chirality::chiral, Adjointness::self_adjoint});
  // A generic matrix matches neither form.
  const DiracFrameKind none = classify_dirac_frame(CMat4::Identity(), CMat4::Identity(), CMat4::Identity());
  CHECK(!none.orthonormality);
  CHECK(!none.chirality);
  CHECK(!none.adjointness);
}

TEST_CASE("a chiral spin change keeps H and the block form of d") {
  CMat s(2, 2);
  s << cplx(1.2, 0.3), cplx(0.1, -0.4), cplx(-0.2, 0.5), cplx(0.9, 0.0);
  TransitionValue v;
  v.spin = dirac_block_transition(s);
  v.spin_inv = v.spin.inverse();
  const DiracConstants c = transform_dirac(canonical_dirac_constants(), v, minkowski());
  CHECK(mx(c.H - canonical_dirac_constants().H) < 1e-14);
  CHECK(c.d_lower.topRightCorner(2, 2).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(c.d_lower.bottomLeftCorner(2, 2).cwiseAbs().maxCoeff() < 1e-14);
  // The chiral block transforms as the two-spinor metric, scaled by det s.
  const CMat expect = s.transpose() * canonical_chiral_constants().d_lower * s;
  CHECK((CMat(c.d_lower.topLeftCorner(2, 2)) - expect).cwiseAbs().maxCoeff() < 1e-14);
}
