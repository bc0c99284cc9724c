#pragma once

#include "spinconn/chiral.hpp"
#include "spinconn/dirac_connection.hpp"
#include "spinconn/lorentz_cover.hpp"
#include "spinconn/scenario_spec.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace spinconn {

inline constexpr const char* kReportSchema = "spinconn.report/1";

enum class ExitCode : int { pass = 0, numerical_failure = 1, bad_spec = 2 };

struct RunOptions {
  std::string subcommand;
  std::optional<std::string> spec_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> fd_step;
  double tol_scale = 1.0;
  std::string format = "text";
};

/**
 * Coordinate Christoffel symbols of the scenario metric, carried into the working frame.
 * Uses its own second-order differences so it shares no code path with the builders.
 */
inline std::array<Mat4, 4> christoffel_oracle(const Scenario& sc, const Point& p, double h = 1e-4) {
  auto d = [&](const auto& f, int a) {
    Point up = p, dn = p;
    up[a] += h;
    dn[a] -= h;
    return decltype(f(p))((f(up) - f(dn)) / (2.0 * h));
  };
  const Mat4 g = sc.coord_metric(p);
  const Mat4 gi = g.inverse();
  std::array<Mat4, 4> dg;
  std::array<Mat4, 4> de;
  const auto frame = sc.frame_field();
  for (int a = 0; a < 4; ++a) {
    dg[a] = d(sc.coord_metric, a);
    de[a] = d(frame, a);
  }
  // chr[a](b,c) = Chr^a_bc in coordinates
  std::array<Mat4, 4> chr;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double v = 0.0;
        for (int r = 0; r < 4; ++r) v += 0.5 * gi(a, r) * (dg[b](c, r) + dg[c](b, r) - dg[r](b, c));
        chr[a](b, c) = v;
      }
  const Mat4 e = frame(p);
  const Mat4 einv = e.inverse();
  std::array<Mat4, 4> out;  // out[i](k,j) = Gamma^k_ij
  for (int i = 0; i < 4; ++i) {
    Mat4 coord = Mat4::Zero();  // coord(a, j): coordinate components of nabla_{e_i} e_j
    for (int j = 0; j < 4; ++j)
      for (int a = 0; a < 4; ++a) {
        double v = 0.0;
        for (int b = 0; b < 4; ++b) {
          v += e(b, i) * de[b](a, j);
          for (int c = 0; c < 4; ++c) v += e(b, i) * e(c, j) * chr[a](b, c);
        }
        coord(a, j) = v;
      }
    out[i] = einv * coord;
  }
  return out;
}

namespace detail {

inline json complex_matrix_json(const CMat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return json{{"re", re}, {"im", im}};
}

inline json real_matrix_json(const Mat4& m) {
  json out = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

inline double scaled(double tol, double scale) { return tol * scale; }

}  // namespace detail

/// Everything one invocation produces besides the exit code.
struct RunResult {
  ExitCode code = ExitCode::pass;
  ResidualReport report;
  json connections = json::array();
  json notes = json::object();
  std::string scenario_name;
  std::string error;
};

/// Canonical constant identity suites; no scenario needed.
inline ResidualReport identity_suite(double tol) {
  ResidualReport rep;
  rep.append(verify_chiral_identities(canonical_chiral_structure(), tol), "chiral.");
  const auto& dc = canonical_dirac_constants();
  rep.append(verify_dirac_identities(dc, tol), "dirac.");
  rep.append(verify_chirality_split(dc, chirality_split(dc), tol), "split.");
  const EmbeddedChiralFrame e = embed_chiral_frame();
  rep.add("embedding.spin_metric", e.d_residual, tol);
  rep.add("embedding.gamma", e.gamma_residual, tol);
  struct Expect {
    Inversion inv;
    DiracFrameKind kind;
  };
  const Expect table[] = {
      {Inversion::P, {Orthonormality::anti_ortho, Chirality::anti_chiral, Adjointness::self_adjoint}},
      {Inversion::T, {Orthonormality::ortho, Chirality::anti_chiral, Adjointness::anti_self_adjoint}},
      {Inversion::PT, {Orthonormality::anti_ortho, Chirality::chiral, Adjointness::anti_self_adjoint}},
  };
  const char* names[] = {"P", "T", "PT"};
  for (int n = 0; n < 3; ++n) {
    const DiracConstants c = transform_dirac(dc, frame_inversion(table[n].inv), minkowski());
    const bool ok = classify_dirac_frame(c.d_lower, c.H, c.D_lower) == table[n].kind;
    rep.add(std::string("inversion.") + names[n] + "_frame_type", ok ? 0.0 : 1.0, 0.0);
  }
  return rep;
}

inline ConnectionProvider metric_connection_provider(const Scenario& sc) {
  if (sc.spinor_dim == 4) return [sc](const Point& p) { return build_dirac_metric_connection(sc, p); };
  return [sc](const Point& p) { return build_chiral_metric_connection(sc, p); };
}

inline ResidualReport concordance_suite(const Scenario& sc, const Tolerances& tol, double scale, json& notes) {
  const ConnectionProvider conn = metric_connection_provider(sc);
  const double ct = detail::scaled(tol.concordance, scale);
  ResidualReport rep;
  ResidualReport c = sc.spinor_dim == 4 ? verify_dirac_concordance(conn, sc, sc.points, ct)
                                        : verify_chiral_concordance(conn, sc, sc.points, ct);
  rep.append(c, "concordance.");
  double reality = 0.0;
  for (const auto& p : sc.points) reality = std::max(reality, conn(p).reality_residual());
  rep.add("reality", reality, 0.0, static_cast<int>(sc.points.size()));
  if (sc.spinor_dim == 4) {
    double block = 0.0;
    for (const auto& p : sc.points) block = std::max(block, dirac_block_discrepancy(sc, p));
    rep.add("block_assembly", block, detail::scaled(1e-10, scale), static_cast<int>(sc.points.size()));
    // How far nabla H sits above the residuals that imply it vanishes; calibrated, not derived.
    const double base = std::max({c.residual("nabla_gamma"), c.residual("nabla_d"), 1e-12});
    notes["H_implication_ratio"] = c.residual("nabla_H") / base;
  }
  return rep;
}

/// The frame-covariance check under a seeded deformation.
inline ResidualReport covariance_suite(const Scenario& sc, std::uint64_t seed, const Tolerances& tol, double scale) {
  const FrameTransition extra = random_deformation(sc.spinor_dim, seed);
  const Scenario moved = sc.deformed(extra);
  const ConnectionProvider a = metric_connection_provider(sc);
  const ConnectionProvider b = metric_connection_provider(moved);
  const FrameField old_frame = sc.frame_field();
  ResidualReport rep;
  rep.add("covariance.transform_connection", 0.0, detail::scaled(tol.covariance, scale), 0);
  for (const auto& p : sc.points) {
    const ThetaParameters th = theta_parameters(extra, old_frame, p, sc.deriv);
    const SpinorConnection expect = transform_connection(a(p), extra.at(p), th, Direction::forward);
    rep.merge("covariance.transform_connection", max_abs_diff(expect, b(p)), detail::scaled(tol.covariance, scale));
  }
  return rep;
}

inline json connection_tables(const Scenario& sc, const Tolerances& tol, double scale, ResidualReport& rep) {
  const ConnectionProvider conn = metric_connection_provider(sc);
  json out = json::array();
  const bool oracle = !sc.has_torsion();
  if (oracle) rep.add("christoffel_oracle", 0.0, detail::scaled(tol.covariance, scale), 0);
  for (const auto& p : sc.points) {
    const SpinorConnection c = conn(p);
    json entry;
    entry["point"] = json::array({p[0], p[1], p[2], p[3]});
    json gamma = json::array(), a = json::array(), abar = json::array();
    for (int i = 0; i < 4; ++i) {
      gamma.push_back(detail::real_matrix_json(c.gamma[i].real()));
      a.push_back(detail::complex_matrix_json(c.a[i]));
      abar.push_back(detail::complex_matrix_json(c.abar[i]));
    }
    entry["gamma"] = gamma;
    if (oracle) {
      const auto chr = christoffel_oracle(sc, p);
      json o = json::array();
      double diff = 0.0;
      for (int i = 0; i < 4; ++i) {
        o.push_back(detail::real_matrix_json(chr[i]));
        diff = std::max(diff, (c.gamma[i].real() - chr[i]).cwiseAbs().maxCoeff());
      }
      entry["gamma_christoffel_oracle"] = o;
      rep.merge("christoffel_oracle", diff, detail::scaled(tol.covariance, scale));
    }
    entry["a"] = a;
    entry["abar"] = abar;
    out.push_back(entry);
  }
  return out;
}

inline bool known_subcommand(const std::string& s) {
  return s == "verify-identities" || s == "build-connection" || s == "concordance" || s == "covariance" || s == "all";
}

/// Runs one subcommand; never throws for bad input, which is reported through `code`.
inline RunResult execute(const RunOptions& opt) {
  RunResult r;
  if (!known_subcommand(opt.subcommand)) {
    r.code = ExitCode::bad_spec;
    r.error = "unknown subcommand '" + opt.subcommand + "'";
    return r;
  }
  if (!(opt.tol_scale > 0.0)) {
    r.code = ExitCode::bad_spec;
    r.error = "tol-scale must be positive";
    return r;
  }
  const bool needs_spec = opt.subcommand != "verify-identities";
  std::optional<ScenarioSpec> spec;
  std::optional<Scenario> sc;
  try {
    if (opt.spec_path) {
      spec = load_scenario_spec(*opt.spec_path);
      if (opt.fd_step) spec->fd_step = *opt.fd_step;
      if (opt.seed) spec->seed = *opt.seed;
      sc = realize(*spec);
      r.scenario_name = spec->name;
    } else if (needs_spec) {
      throw SpecError("", "subcommand '" + opt.subcommand + "' needs --spec");
    }
  } catch (const std::exception& e) {
    r.code = ExitCode::bad_spec;
    r.error = e.what();
    return r;
  }
  const Tolerances tol = spec ? spec->tolerances : Tolerances{};
  const double scale = opt.tol_scale;
  const std::string& cmd = opt.subcommand;
  try {
    if (cmd == "verify-identities" || cmd == "all") r.report.append(identity_suite(detail::scaled(tol.identity, scale)));
    if (sc) {
      if (cmd == "build-connection" || cmd == "all") r.connections = connection_tables(*sc, tol, scale, r.report);
      if (cmd == "concordance" || cmd == "all") r.report.append(concordance_suite(*sc, tol, scale, r.notes));
      if (cmd == "covariance" || cmd == "all") r.report.append(covariance_suite(*sc, spec->seed, tol, scale));
    }
  } catch (const EvaluationError& e) {
    r.code = ExitCode::bad_spec;
    r.error = std::string("expression failed near a sample point: ") + e.what();
    return r;
  } catch (const SingularError& e) {
    r.code = ExitCode::numerical_failure;
    r.error = e.what();
    return r;
  }
  r.code = r.report.pass() ? ExitCode::pass : ExitCode::numerical_failure;
  return r;
}

inline json report_json(const RunOptions& opt, const RunResult& r, double runtime_seconds) {
  json j;
  j["schema"] = kReportSchema;
  j["subcommand"] = opt.subcommand;
  j["scenario"] = r.scenario_name.empty() ? json(nullptr) : json(r.scenario_name);
  j["exit_code"] = static_cast<int>(r.code);
  j["pass"] = r.code == ExitCode::pass;
  if (!r.error.empty()) j["error"] = r.error;
  j["tol_scale"] = opt.tol_scale;
  json checks = json::array();
  for (const auto& c : r.report.checks)
    checks.push_back({{"name", c.name},
                      {"max_residual", c.max_residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"points_evaluated", c.points_evaluated}});
  j["checks"] = checks;
  j["failures"] = r.report.failures();
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.connections.empty()) j["connections"] = r.connections;
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["generated_at"] = buf;
  j["runtime_seconds"] = runtime_seconds;
  return j;
}

inline std::string report_text(const RunOptions& opt, const RunResult& r) {
  std::ostringstream os;
  os << "spinconn " << opt.subcommand;
  if (!r.scenario_name.empty()) os << " [" << r.scenario_name << "]";
  os << "\n";
  if (!r.error.empty()) os << "error: " << r.error << "\n";
  char line[256];
  for (const auto& c : r.report.checks) {
    std::snprintf(line, sizeof line, "%-4s %-55s %.3e  (tol %.1e)\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                  c.max_residual, c.tolerance);
    os << line;
  }
  for (const auto& [k, v] : r.notes.items()) os << "note " << k << " = " << v.dump() << "\n";
  for (const auto& entry : r.connections) {
    os << "point " << entry["point"].dump() << "\n";
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) {
          const double g = entry["gamma"][i][k][j];
          if (g == 0.0 && !entry.contains("gamma_christoffel_oracle")) continue;
          const double o = entry.contains("gamma_christoffel_oracle") ? entry["gamma_christoffel_oracle"][i][k][j].get<double>() : 0.0;
          if (std::abs(g) < 1e-12 && std::abs(o) < 1e-12) continue;
          std::snprintf(line, sizeof line, "  Gamma^%d_%d%d = % .10f", k, i, j, g);
          os << line;
          if (entry.contains("gamma_christoffel_oracle")) {
            std::snprintf(line, sizeof line, "   oracle % .10f", o);
            os << line;
          }
          os << "\n";
        }
  }
  os << (r.code == ExitCode::pass ? "PASS" : "FAIL") << " (exit " << static_cast<int>(r.code) << ")\n";
  if (r.code == ExitCode::numerical_failure)
    for (const auto& f : r.report.failures()) os << "failed: " << f << "\n";
  return os.str();
}

/// Executes, writes the report, and returns the process exit code.
inline int run(const RunOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = execute(opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string body = opt.format == "json" ? report_json(opt, r, secs).dump(2) + "\n" : report_text(opt, r);
  if (opt.out_path) {
    std::ofstream f(*opt.out_path);
    if (!f) {
      err << "cannot write report to '" << *opt.out_path << "'\n";
      return static_cast<int>(ExitCode::bad_spec);
    }
    f << body;
  } else {
    out << body;
  }
  if (!r.error.empty()) err << "error: " << r.error << "\n";
  if (r.code == ExitCode::numerical_failure)
    for (const auto& f : r.report.failures()) err << "failed check: " << f << "\n";
  return static_cast<int>(r.code);
}

}  // namespace spinconn
