#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "infdist/density.hpp"
#include "infdist/dp.hpp"
#include "infdist/errors.hpp"
#include "infdist/oracle.hpp"
#include "infdist/polytope_io.hpp"
#include "infdist/version.hpp"

namespace infdist::cli {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = kFnvOffset;
  for (const unsigned char c : text) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::kSample: return "sample";
    case Command::kDiagnose: return "diagnose";
    case Command::kErm: return "erm";
    case Command::kParams: return "params";
  }
  return "?";
}

std::string exact(double v) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

SamplerOptions sampler_options(const RunConfig& cfg) {
  SamplerOptions o;
  o.epsilon = cfg.epsilon;
  o.c_mix = cfg.c_mix;
  o.step_scale = cfg.eta;
  o.walk_steps = cfg.walk_steps;
  o.setup_seed = cfg.seed;
  o.oracle = cfg.oracle;
  return o;
}

struct Problem {
  Polytope polytope;
  LogDensity density;
};

Problem load_problem(const RunConfig& cfg) {
  Polytope polytope = load_polytope(cfg.polytope_path);
  LogDensity density = parse_density(cfg.density, polytope.dim());
  return {std::move(polytope), std::move(density)};
}

void write_point(std::ostream& out, const Vector& x) {
  for (Eigen::Index j = 0; j < x.size(); ++j) out << ',' << exact(x[j]);
}

}  // namespace

void RunConfig::validate() const {
  if (n < 1) throw ConfigError("--n must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("--eps must lie in (0, 1]");
  if (!(c_mix > 0.0)) throw ConfigError("--cmix must be positive");
  if (eta && !(*eta > 0.0)) throw ConfigError("--eta must be positive");
  if (walk_steps && *walk_steps < 0) throw ConfigError("--steps must be >= 0");
  if (command == Command::kErm) {
    if (instance_path.empty()) throw ConfigError("erm needs --instance FILE");
  } else if (polytope_path.empty()) {
    throw ConfigError(std::string(command_name(command)) + " needs --polytope FILE");
  }
  if (bins < 0) throw ConfigError("--bins must be >= 1");
}

std::string hex(std::uint64_t value) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << value;
  return s.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::ostringstream canon;
  canon << "command=" << command_name(cfg.command) << ';';
  if (!cfg.polytope_path.empty()) {
    canon << "polytope=";
    write_polytope(canon, load_polytope(cfg.polytope_path));
    canon << ";density=" << cfg.density << ';';
  }
  if (!cfg.instance_path.empty()) {
    std::ifstream in(cfg.instance_path);
    canon << "instance=" << in.rdbuf() << ';';
  }
  canon << "eps=" << exact(cfg.epsilon) << ";seed=" << cfg.seed << ";cmix=" << exact(cfg.c_mix)
        << ";eta=" << (cfg.eta ? exact(*cfg.eta) : "auto")
        << ";steps=" << (cfg.walk_steps ? std::to_string(*cfg.walk_steps) : "auto")
        << ";oracle=" << (cfg.oracle == OracleKind::kExact ? "exact" : "dikin");
  // n, threads and output paths do not change any individual sample.
  return fnv1a(canon.str());
}

std::uint64_t params_hash(const ConverterParams& params, std::int64_t walk_steps) {
  std::ostringstream canon;
  canon << params.tau_max << ';' << exact(params.delta) << ';' << exact(params.delta_log) << ';'
        << exact(params.epsilon) << ';' << walk_steps;
  return fnv1a(canon.str());
}

std::string provenance_line(const RunConfig& cfg) {
  return std::string("# infdist ") + kVersion + " command=" + command_name(cfg.command) +
         " config-hash=" + hex(config_hash(cfg)) + " rng=" + Philox4x32::kName;
}

void cmd_params(const RunConfig& cfg, std::ostream& out) {
  const Problem problem = load_problem(cfg);
  const Polytope& P = problem.polytope;
  const double L = problem.density.lipschitz();
  const ConverterParams params =
      compute_params(cfg.epsilon, L, P.inner_radius(), P.outer_radius(), P.dim());
  const Polytope normalized = normalize(P).polytope;
  const std::int64_t T =
      cfg.walk_steps ? *cfg.walk_steps : mixing_steps(normalized, L, params.delta_log, cfg.c_mix);

  out << provenance_line(cfg) << '\n';
  out << "name,value\n";
  out << "d," << P.dim() << '\n';
  out << "m," << P.num_constraints() << '\n';
  out << "L," << L << '\n';
  out << "LR," << L * P.outer_radius() << '\n';
  out << "r," << P.inner_radius() << '\n';
  out << "R," << P.outer_radius() << '\n';
  out << "eps," << params.epsilon << '\n';
  out << "tau_max," << params.tau_max << '\n';
  out << "Delta," << std::setprecision(8) << params.delta << '\n';
  out << "delta_log," << params.delta_log << '\n';
  out << "delta_log10," << params.delta_log / std::log(10.0) << '\n';
  out << "c_mix," << cfg.c_mix << '\n';
  out << "mixing_steps," << T << '\n';
  out << "expected_f_evals," << 3 * T << '\n';
  out << "params_hash," << hex(params_hash(params, T)) << '\n';
}

void cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& telemetry) {
  const Problem problem = load_problem(cfg);
  const InfinitySampler sampler(problem.polytope, problem.density, sampler_options(cfg));
  const auto records = sample_batch(sampler, cfg.n, cfg.seed, cfg.threads);
  const int d = problem.polytope.dim();
  const std::string hash = hex(params_hash(sampler.params(), sampler.walk_steps()));

  out << provenance_line(cfg) << " params-hash=" << hash << '\n';
  out << "run";
  for (int j = 0; j < d; ++j) out << ",x" << j;
  out << ",tau,fallback,oracle_calls,membership_calls,chain_steps,chain_accepts\n";
  std::uint64_t oracle_calls = 0, steps = 0, accepts = 0, fallbacks = 0;
  double tau_sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << i;
    write_point(out, r.output.point);
    out << ',' << r.output.iterations << ',' << (r.output.fallback ? 1 : 0) << ','
        << r.output.oracle_calls << ',' << r.output.membership_calls << ',' << r.chain_steps
        << ',' << r.chain_accepts << '\n';
    oracle_calls += r.output.oracle_calls;
    steps += r.chain_steps;
    accepts += r.chain_accepts;
    fallbacks += r.output.fallback ? 1 : 0;
    tau_sum += static_cast<double>(r.output.iterations);
  }

  telemetry << provenance_line(cfg) << " params-hash=" << hash << '\n';
  telemetry << "name,value\n";
  telemetry << "runs," << records.size() << '\n';
  telemetry << "tau_max," << sampler.params().tau_max << '\n';
  telemetry << "mean_tau," << tau_sum / static_cast<double>(records.size()) << '\n';
  telemetry << "fallbacks," << fallbacks << '\n';
  telemetry << "oracle_calls," << oracle_calls << '\n';
  telemetry << "walk_steps_per_draw," << sampler.walk_steps() << '\n';
  telemetry << "step_scale," << sampler.step_scale() << '\n';
  telemetry << "chain_steps," << steps << '\n';
  telemetry << "chain_acceptance," << (steps == 0 ? 0.0 : double(accepts) / double(steps)) << '\n';
  telemetry << "f_evals," << sampler.density().calls() << '\n';
}

void cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream& grid_out) {
  const Problem problem = load_problem(cfg);
  const Polytope& P = problem.polytope;
  const int d = P.dim();
  if (d > 3) throw ConfigError("diagnose supports d <= 3");

  const InfinitySampler sampler(P, problem.density, sampler_options(cfg));
  const auto records = sample_batch(sampler, cfg.n, cfg.seed, cfg.threads);

  const Box box = bounding_box(P);
  const int bins = cfg.bins > 0 ? cfg.bins : (d == 1 ? 50 : d == 2 ? 20 : 8);
  const CellGrid grid =
      cell_masses(P, problem.density, GridSpec{box.lo, box.hi, std::vector<int>(d, bins)});
  SampleBatch batch;
  std::vector<ConverterOutput> outputs;
  std::uint64_t steps = 0, accepts = 0;
  for (const auto& r : records) {
    batch.add(r.output.point, r.output.iterations, r.output.fallback);
    outputs.push_back(r.output);
    steps += r.chain_steps;
    accepts += r.chain_accepts;
  }
  const Histogram hist = histogram(batch, grid);
  const SupLogRatio slr = sup_log_ratio(hist, grid);
  const TauSummary tau = tau_statistics(outputs);
  const TauLawCheck law = check_tau_law(tau, cfg.epsilon, sampler.params().tau_max);

  out << provenance_line(cfg) << '\n';
  out << "metric,value\n";
  out << "samples," << batch.size() << '\n';
  out << "cells," << grid.size() << '\n';
  out << "cells_excluded," << slr.excluded.size() << '\n';
  out << "sup_log_ratio," << slr.value << '\n';
  out << "sup_log_ratio_excess_3sigma," << slr.excess(3.0) << '\n';
  out << "sup_log_ratio_within_eps," << (slr.within(cfg.epsilon) ? 1 : 0) << '\n';
  out << "tv_estimate," << tv_estimate(hist, grid) << '\n';
  out << "mean_tau," << tau.mean << '\n';
  for (int t = 1; t < static_cast<int>(tau.tail.size()); ++t) {
    out << "tail_ge_" << t << ',' << tau.tail[t] << '\n';
  }
  out << "halt_rate," << tau.halt_rate << '\n';
  out << "fallbacks," << tau.fallbacks << '\n';
  out << "tau_law_ok," << (law.passed() ? 1 : 0) << '\n';
  out << "step_scale," << sampler.step_scale() << '\n';
  out << "chain_acceptance," << (steps == 0 ? 0.0 : double(accepts) / double(steps)) << '\n';

  grid_out << provenance_line(cfg) << '\n';
  write_grid_csv(grid_out, grid, &hist);
}

void cmd_erm(const RunConfig& cfg, std::ostream& out) {
  const ErmInstance instance = load_erm_instance(cfg.instance_path);
  if (instance.epsilon > 1.0) {
    throw ConfigError("instance privacy budget eps > 1 is not supported; use eps <= 1");
  }
  ErmOptions options;
  options.c_mix = cfg.c_mix;
  options.step_scale = cfg.eta;
  options.walk_steps = cfg.walk_steps;
  options.setup_seed = cfg.seed;
  PrivateErm mechanism(instance, options);
  const auto records = sample_batch(mechanism.sampler(), cfg.n, cfg.seed, cfg.threads);
  const int d = instance.polytope.dim();

  out << provenance_line(cfg) << '\n';
  out << "run";
  for (int j = 0; j < d; ++j) out << ",theta" << j;
  out << ",utility_gap,tau,fallback,early_halt,oracle_calls\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i].output;
    out << i;
    write_point(out, r.point);
    out << ',' << exact(utility_gap(instance, r.point)) << ',' << r.iterations << ','
        << (r.fallback ? 1 : 0) << ',' << (r.abandoned ? 1 : 0) << ',' << r.oracle_calls << '\n';
  }
}

void run(const RunConfig& cfg) {
  cfg.validate();
  std::ofstream file;
  std::ofstream side;
  std::ostream* out = &std::cout;
  std::ostream* aux = &std::cerr;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) throw ConfigError("cannot write '" + cfg.out + "'");
    out = &file;
  }
  auto open_side = [&](const std::string& suffix) {
    if (cfg.out.empty()) return;
    side.open(cfg.out + suffix);
    if (!side) throw ConfigError("cannot write '" + cfg.out + suffix + "'");
    aux = &side;
  };
  switch (cfg.command) {
    case Command::kParams:
      cmd_params(cfg, *out);
      break;
    case Command::kSample:
      open_side(".telemetry.csv");
      cmd_sample(cfg, *out, *aux);
      break;
    case Command::kDiagnose:
      open_side(".grid.csv");
      cmd_diagnose(cfg, *out, *aux);
      break;
    case Command::kErm:
      cmd_erm(cfg, *out);
      break;
  }
}

}  // namespace infdist::cli
