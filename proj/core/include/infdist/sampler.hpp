#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "infdist/converter.hpp"
#include "infdist/density.hpp"
#include "infdist/dikin.hpp"
#include "infdist/geometry.hpp"
#include "infdist/oracle.hpp"

namespace infdist {

enum class OracleKind { kDikin, kExact };

struct SamplerOptions {
  double epsilon = 0.5;
  double c_mix = 1e-4;
  // Fixed eta; tuned on pilot runs when unset.
  std::optional<double> step_scale;
  // Overrides the mixing-time formula for T.
  std::optional<std::int64_t> walk_steps;
  int pilot_steps = 500;
  std::uint64_t setup_seed = 0;
  OracleKind oracle = OracleKind::kDikin;
  // Passed through to convert(); 0 disables.
  std::int64_t abandon_after = 0;
};

struct SampleRecord {
  ConverterOutput output;  // point in the caller's (un-normalized) coordinates
  std::uint64_t chain_steps = 0;
  std::uint64_t chain_accepts = 0;
};

// Infinity-distance sampler for pi ∝ exp(-f) on K: normalizes K, sets the
// converter schedule for the requested eps, and feeds the converter with
// independent Dikin-walk runs from warm starts (or exact draws, for testing).
//
// Copies are independent; give each worker thread its own copy.
class InfinitySampler {
 public:
  InfinitySampler(const Polytope& polytope, const LogDensity& f, const SamplerOptions& options);

  SampleRecord sample(Rng& rng);

  const ConverterParams& params() const { return params_; }
  const Polytope& normalized() const { return normalized_; }
  const Vector& translation() const { return translation_; }
  std::int64_t walk_steps() const { return walk_steps_; }
  double step_scale() const { return walk_.step_scale(); }
  const TuneResult& tuning() const { return tuning_; }
  const LogDensity& density() const { return density_; }
  const Polytope& original() const { return original_; }

 private:
  Polytope original_;
  Polytope normalized_;
  Vector translation_;
  LogDensity density_;  // in normalized coordinates
  ConverterParams params_;
  std::int64_t walk_steps_ = 0;
  SamplerOptions options_;
  DikinWalk walk_;
  TuneResult tuning_;
  std::optional<ExactSampler> exact_;
};

// N independent samples; run i draws from Rng(seed, i + 1). Results are in
// run order whatever the thread count (0 = hardware concurrency).
std::vector<SampleRecord> sample_batch(const InfinitySampler& sampler, std::size_t n,
                                       std::uint64_t seed, unsigned threads = 0);

}  // namespace infdist
