#include "spinconn/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Spinor connection builder and residual checker"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  spinconn::RunOptions opt;
  std::string spec, out;
  std::uint64_t seed = 0;
  double fd_step = 0.0;
  auto* o_spec = app.add_option("--spec", spec, "Scenario JSON file")->envname("SPINCONN_SPEC");
  auto* o_out = app.add_option("--out", out, "Write the report here instead of stdout")->envname("SPINCONN_OUT");
  auto* o_seed = app.add_option("--seed", seed, "Seed for the covariance deformation")->envname("SPINCONN_SEED");
  auto* o_fd = app.add_option("--fd-step", fd_step, "Finite-difference step")->envname("SPINCONN_FD_STEP");
  app.add_option("--tol-scale", opt.tol_scale, "Multiply every tolerance by this factor")
      ->envname("SPINCONN_TOL_SCALE")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", opt.format, "Report format")
      ->envname("SPINCONN_FORMAT")
      ->check(CLI::IsMember({"json", "text"}));

  for (const char* name : {"verify-identities", "build-connection", "concordance", "covariance", "all"}) {
    app.add_subcommand(name)->callback([&opt, name] { opt.subcommand = name; });
  }
  app.get_subcommand("verify-identities")->description("Check the canonical constant identities");
  app.get_subcommand("build-connection")->description("Tabulate Gamma, A, Abar at the sample points");
  app.get_subcommand("concordance")->description("Check that the metric connection annihilates the structure fields");
  app.get_subcommand("covariance")->description("Check the transformation law under a seeded frame deformation");
  app.get_subcommand("all")->description("Run every suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(spinconn::ExitCode::bad_spec);
  }
  if (*o_spec) opt.spec_path = spec;
  if (*o_out) opt.out_path = out;
  if (*o_seed) opt.seed = seed;
  if (*o_fd) opt.fd_step = fd_step;
  return spinconn::run(opt);
}
