#include <exception>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "commands.hpp"
#include "infdist/errors.hpp"
#include "infdist/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitContract = 3;

void add_common(CLI::App* sub, infdist::cli::RunConfig& cfg, bool with_polytope) {
  if (with_polytope) {
    sub->add_option("--polytope", cfg.polytope_path, "Polytope file")->required();
    sub->add_option("--density", cfg.density,
                    "uniform | linear c1,..,cd | norm1 w | erm c..;c..");
  }
  sub->add_option("--eps", cfg.epsilon, "Target infinity distance, 0 < eps <= 1");
  sub->add_option("--seed", cfg.seed, "RNG seed");
  sub->add_option("--n", cfg.n, "Number of independent samples");
  sub->add_option("--cmix", cfg.c_mix, "Constant in front of the mixing-time formula");
  sub->add_option("--eta", cfg.eta, "Dikin step scale (tuned when omitted)");
  sub->add_option("--steps", cfg.walk_steps, "Override the Dikin steps per draw");
  sub->add_option("--out", cfg.out, "Output CSV (stdout when omitted)");
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  sub->add_flag_callback("--paper-constants", [&cfg] { cfg.c_mix = 1.0; },
                         "Use the mixing-time formula with constant 1");
}

}  // namespace

int main(int argc, char** argv) {
  infdist::cli::RunConfig cfg;
  CLI::App app{"Infinity-distance sampling from log-concave densities on polytopes"};
  app.set_version_flag("--version", std::string("infdist ") + infdist::kVersion);
  app.require_subcommand(1);

  auto* params = app.add_subcommand("params", "Print the converter and walk schedule");
  add_common(params, cfg, true);
  auto* sample = app.add_subcommand("sample", "Draw samples; writes OUT and OUT.telemetry.csv");
  add_common(sample, cfg, true);
  auto* diagnose = app.add_subcommand("diagnose", "Compare samples with quadrature (d <= 3)");
  add_common(diagnose, cfg, true);
  diagnose->add_option("--bins", cfg.bins, "Cells per axis");
  diagnose->add_flag_callback("--exact-oracle",
                              [&cfg] { cfg.oracle = infdist::OracleKind::kExact; },
                              "Feed the converter exact rejection samples");
  auto* erm = app.add_subcommand("erm", "Differentially private ERM via the exponential mechanism");
  erm->add_option("--instance", cfg.instance_path, "ERM instance file")->required();
  add_common(erm, cfg, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (params->parsed()) cfg.command = infdist::cli::Command::kParams;
  if (sample->parsed()) cfg.command = infdist::cli::Command::kSample;
  if (diagnose->parsed()) cfg.command = infdist::cli::Command::kDiagnose;
  if (erm->parsed()) cfg.command = infdist::cli::Command::kErm;

  try {
    infdist::cli::run(cfg);
  } catch (const infdist::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const infdist::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
