// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
#include "spinconn/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>

using namespace spinconn;

namespace {

namespace fs = std::filesystem;

const fs::path kScenarios = fs::path(SPINCONN_SOURCE_DIR) / "scenarios";

std::vector<ScenarioSpec> bundled() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kScenarios))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<ScenarioSpec> out;
  for (const auto& f : files) out.push_back(load_scenario_spec(f.string()));
  return out;
}

ScenarioSpec with_mode(ScenarioSpec s, const std::string& mode) {
  s.mode = mode;
  return s;
}

ConnectionProvider builder(const Scenario& sc) { return metric_connection_provider(sc); }

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome identities() {
  const auto t0 = std::chrono::steady_clock::now();
  const ResidualReport rep = identity_suite(0.0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (const auto& c : rep.checks) worst = std::max(worst, c.max_residual);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu checks, max residual %.1e, %.3f s", rep.checks.size(), worst, secs);
  return {rep.pass() && worst == 0.0 && secs < 1.0, buf};
}

Outcome homomorphism() {
  double worst = 0.0;
  bool member = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const CMat2 a = random_sl2c(2 * s + 1), b = random_sl2c(2 * s + 2);
    const Mat4 pab = phi(a * b);
    worst = std::max(worst, (pab - phi(a) * phi(b)).cwiseAbs().maxCoeff());
    const LorentzCheck c = check_lorentz(pab);
    member = member && c.metric_residual < 1e-9 && c.dual_metric_residual < 1e-9 && c.det_residual < 1e-9 && c.s00 >= 1.0;
  }
  const bool kernel = phi(CMat2::Identity()) == Mat4::Identity() && phi(CMat2(-CMat2::Identity())) == Mat4::Identity();
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |phi(ab)-phi(a)phi(b)| %.1e", worst);
  return {worst < 1e-9 && member && kernel, buf};
}

Outcome flat() {
  double worst = 0.0;
  for (int dim : {2, 4}) {
    Scenario sc;
    sc.spinor_dim = dim;
    sc.points = default_points();
    for (const auto& p : sc.points) worst = std::max(worst, builder(sc)(p).max_abs());
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "max |coefficient| %.1e", worst);
  return {worst < 1e-12, buf};
}

Outcome christoffel() {
  const Scenario sc = realize(load_scenario_spec((kScenarios / "diag-scale.json").string()));
  double worst = 0.0;
  for (const auto& p : sc.points) {
    const SpinorConnection c = build_chiral_metric_connection(sc, p);
    const auto chr = christoffel_oracle(sc, p);
    for (int i = 0; i < 4; ++i) worst = std::max(worst, (c.gamma[i].real() - chr[i]).cwiseAbs().maxCoeff());
  }
  const SpinorConnection c0 = build_chiral_metric_connection(sc, {0.5, 0.1, -0.2, 0.3});
  const double g101 = c0.gamma[0](1, 1).real(), g011 = c0.gamma[1](0, 1).real();
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu points, oracle gap %.1e, Gamma^1_01 %.10f, Gamma^0_11 %.10f", sc.points.size(),
                worst, g101, g011);
  return {sc.points.size() == 5 && worst < 1e-5 && std::abs(g101 - 2.0 / 3.0) < 1e-5 && std::abs(g011 - 1.5) < 1e-5,
          buf};
}

Outcome concordance() {
  double worst = 0.0;
  int runs = 0;
  bool pass = true;
  for (const auto& spec : bundled())
    for (const char* mode : {"chiral", "dirac"}) {
      const Scenario sc = realize(with_mode(spec, mode));
      const ResidualReport rep = sc.spinor_dim == 4 ? verify_dirac_concordance(builder(sc), sc, sc.points, 1e-6)
                                                    : verify_chiral_concordance(builder(sc), sc, sc.points, 1e-6);
      pass = pass && rep.pass();
      for (const auto& c : rep.checks) worst = std::max(worst, c.max_residual);
      ++runs;
    }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d scenario/mode runs, max residual %.1e", runs, worst);
  return {pass, buf};
}

Outcome covariance() {
  double worst = 0.0;
  int samples = 0;
  for (const auto& spec : bundled())
    for (const char* mode : {"chiral", "dirac"}) {
      const Scenario sc = realize(with_mode(spec, mode));
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const FrameTransition tr = random_deformation(sc.spinor_dim, seed);
        const Scenario moved = sc.deformed(tr);
        for (const auto& p : sc.points) {
          const ThetaParameters th = theta_parameters(tr, sc.frame_field(), p, sc.deriv);
          const SpinorConnection expect = transform_connection(builder(sc)(p), tr.at(p), th, Direction::forward);
          worst = std::max(worst, max_abs_diff(expect, builder(moved)(p)));
          ++samples;
        }
      }
    }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d point/seed samples, max gap %.1e", samples, worst);
  return {worst < 1e-5, buf};
}

Outcome restriction() {
  const ScenarioSpec spec = load_scenario_spec((kScenarios / "diag-scale.json").string());
  double chiral_gap = 0.0, conj_gap = 0.0, off = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Scenario s2 = realize(with_mode(spec, "chiral")).deformed(random_deformation(2, seed));
    const Scenario s4 = realize(with_mode(spec, "dirac")).deformed(chirality_preserving_deformation(seed));
    for (const auto& p : s4.points) {
      const ChiralRestriction r = restrict_to_chiral(build_dirac_metric_connection(s4, p));
      chiral_gap = std::max(chiral_gap, max_abs_diff(r.chiral, build_chiral_metric_connection(s2, p)));
      conj_gap = std::max(conj_gap, r.conjugate_block_residual);
      off = std::max(off, r.off_block_max);
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "chiral block gap %.1e, conjugate block gap %.1e, off-block %.1e", chiral_gap, conj_gap,
                off);
  return {chiral_gap < 1e-6 && conj_gap < 1e-10, buf};
}

Outcome block_assembly() {
  std::vector<Scenario> cases;
  cases.push_back(realize(load_scenario_spec((kScenarios / "deformed.json").string())));
  const ScenarioSpec tet = with_mode(load_scenario_spec((kScenarios / "tetrad.json").string()), "dirac");
  cases.push_back(realize(tet).deformed(random_deformation(4, 7)));
  double worst = 0.0;
  for (const auto& sc : cases)
    for (const auto& p : sc.points) worst = std::max(worst, dirac_block_discrepancy(sc, p));
  char buf[64];
  std::snprintf(buf, sizeof buf, "max gap %.1e", worst);
  return {worst < 1e-10, buf};
}

Outcome classification() {
  const ResidualReport rep = identity_suite(0.0);
  int n = 0;
  bool pass = true;
  for (const auto& c : rep.checks)
    if (c.name.rfind("inversion.", 0) == 0) {
      ++n;
      pass = pass && c.max_residual == 0.0;
    }
  const auto& can = canonical_dirac_constants();
  pass = pass && classify_dirac_frame(can.d_lower, can.H, can.D_lower) ==
                     DiracFrameKind{Orthonormality::ortho, Chirality::chiral, Adjointness::self_adjoint};
  return {pass && n == 3, std::to_string(n) + " inversions matched"};
}

Outcome parser() {
  int round_trips = 0;
  bool ok = true;
  for (const auto& spec : bundled())
    for (const auto& [where, e] : spec.expressions()) {
      const Expression again = parse_expression(e->to_string());
      ok = ok && again.to_string() == e->to_string();
      for (const auto& p : spec.sample_points) ok = ok && again(p) == (*e)(p);
      ++round_trips;
    }
  const std::pair<const char*, std::size_t> bad[] = {{"", 0},      {"1+", 2},   {"(x0", 3},    {"x4", 0},
                                                     {"sin x0", 4}, {"2*/x0", 2}, {"1.2.3", 3}, {"x0 x1", 3},
                                                     {"foo(1)", 0}, {"x0)", 2}};
  int rejected = 0;
  for (const auto& [text, offset] : bad) {
    try {
      parse_expression(text);
    } catch (const ParseError& e) {
      if (e.offset() == offset) ++rejected;
    }
  }
  const Expression f = parse_expression("sqrt(1 + x0^2)/cosh(x3) - sinh(x2)*cos(x1)*exp(x0)");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Point p{u(rng), u(rng), u(rng), u(rng)};
    const double direct =
        std::sqrt(1 + std::pow(p[0], 2)) / std::cosh(p[3]) - std::sinh(p[2]) * std::cos(p[1]) * std::exp(p[0]);
    worst = std::max(worst, std::abs(f(p) - direct));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d expressions round-tripped, %d/10 rejected at the right byte, oracle gap %.1e",
                round_trips, rejected, worst);
  return {ok && round_trips > 0 && rejected == 10 && worst <= 1e-14, buf};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"exact identity suite", identities},
      {"SL(2,C) homomorphism", homomorphism},
      {"flat scenario connection vanishes", flat},
      {"diagonal metric Christoffel oracle", christoffel},
      {"concordance on bundled scenarios", concordance},
      {"covariance under frame changes", covariance},
      {"chiral restriction of the Dirac connection", restriction},
      {"block assembly equivalence", block_assembly},
      {"inversion frame classification", classification},
      {"expression parser", parser},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %2d %-44s %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
