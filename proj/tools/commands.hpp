#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "infdist/converter.hpp"
#include "infdist/sampler.hpp"

namespace infdist::cli {

enum class Command { kSample, kDiagnose, kErm, kParams };

struct RunConfig {
  Command command = Command::kSample;
  std::string polytope_path;
  std::string density = "uniform";
  std::string instance_path;  // erm
  double epsilon = 0.5;
  std::uint64_t seed = 1;
  std::size_t n = 1;
  double c_mix = 1e-4;
  std::optional<double> eta;
  std::optional<std::int64_t> walk_steps;
  std::string out;  // empty: stdout
  unsigned threads = 0;
  int bins = 0;  // diagnose; 0 picks a default per dimension
  OracleKind oracle = OracleKind::kDikin;

  // Throws ConfigError.
  void validate() const;
};

// FNV-1a over a canonical rendering of the configuration and the parsed
// inputs it points to.
std::uint64_t config_hash(const RunConfig& cfg);

// FNV-1a over tau_max, Delta, log delta and the walk length.
std::uint64_t params_hash(const ConverterParams& params, std::int64_t walk_steps);

std::string hex(std::uint64_t value);

// Header comment carried by every CSV this tool writes.
std::string provenance_line(const RunConfig& cfg);

void cmd_params(const RunConfig& cfg, std::ostream& out);
void cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& telemetry);
void cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream& grid_out);
void cmd_erm(const RunConfig& cfg, std::ostream& out);

// Opens the output files named by cfg.out (or uses stdout) and dispatches.
void run(const RunConfig& cfg);

}  // namespace infdist::cli
