#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "infdist/geometry.hpp"
#include "infdist/random.hpp"

namespace infdist {

// Hyperparameters of the TV-to-infinity-distance converter.
//
// delta is carried only as its natural log: for moderate d it is far below
// the smallest positive double.
struct ConverterParams {
  double epsilon = 0.0;  // target infinity distance, nats
  double delta = 0.0;    // stretch parameter, in (0, 1/2]
  std::int64_t tau_max = 0;
  double delta_log = 0.0;  // log of the TV accuracy the sampling oracle must reach
};

// Smallest tau_max and largest delta, log-delta allowed by the schedule
//   tau_max >= 5 d log(R/r) + 5 L R + eps
//   delta   <= eps / (512 tau_max max(d, L R))
//   TV      <= (eps / 64) (R / (delta r))^{-d} exp(-L R)
// Requires 0 < eps <= 1, L >= 0, 0 < r <= R, d >= 1.
ConverterParams compute_params(double epsilon, double lipschitz, double inner_radius,
                               double outer_radius, int d);

struct ScheduleCheck {
  bool epsilon_ok = false;
  bool tau_ok = false;
  bool delta_ok = false;
  bool tv_ok = false;
  bool all() const { return epsilon_ok && tau_ok && delta_ok && tv_ok; }
};

ScheduleCheck check_schedule(const ConverterParams& params, double lipschitz, double inner_radius,
                             double outer_radius, int d);

struct ConverterOutput {
  Vector point;
  // Loop iteration that halted; tau_max + 1 when the fallback fired.
  std::int64_t iterations = 0;
  bool fallback = false;
  // Set when the caller's abandon_after budget ran out first (see convert()).
  bool abandoned = false;
  std::uint64_t oracle_calls = 0;
  std::uint64_t membership_calls = 0;
};

using SampleOracle = std::function<Vector()>;

// Converts draws from a TV-accurate oracle into one draw within infinity
// distance eps of pi. `polytope` must be normalized (inner ball at 0).
//
// Each iteration: theta <- oracle(); Z <- theta + delta r xi with xi uniform
// on the unit ball; candidate <- Z / (1 - delta); if the candidate is in K,
// output it with probability 1/2. After tau_max failures, output a uniform
// point of B(0, r).
//
// abandon_after > 0 stops after that many iterations and returns the origin
// with `abandoned` set (only when it is below tau_max).
//
// Throws ContractViolation if the oracle returns a point outside K.
ConverterOutput convert(const Polytope& polytope, const SampleOracle& oracle,
                        const ConverterParams& params, Rng& rng,
                        std::int64_t abandon_after = 0);

struct TauSummary {
  std::size_t runs = 0;
  double mean = 0.0;
  // Index t holds P(tau >= t) / P(tau = t), t = 0..max_t.
  std::vector<double> tail;
  std::vector<double> pmf;
  std::size_t fallbacks = 0;
  // Halts / iterations reached, over runs that did not fall back.
  double halt_rate = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t halts = 0;
};

TauSummary tau_statistics(std::span<const ConverterOutput> runs, int max_t = 10);

struct BandCheck {
  int t = 0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double sigma = 0.0;
  bool ok = false;
};

struct TauLawCheck {
  bool mean_ok = false;
  std::vector<BandCheck> survival;  // P(tau > t) in [(1/2)^t, base^t]
  std::vector<BandCheck> pmf;       // P(tau = t) in (1/2)^t e^{+-eps/2}
  bool passed() const;
};

// Checks the iteration-count law with k_sigma binomial slack for t = 1..max_t.
// The survival band bounds P(tau > t): t consecutive rejections.
// `survival_base` defaults to 1/2 + eps / (8 tau_max).
TauLawCheck check_tau_law(const TauSummary& summary, double epsilon, std::int64_t tau_max,
                          int max_t = 8, double k_sigma = 3.0, double survival_base = 0.0);

}  // namespace infdist
