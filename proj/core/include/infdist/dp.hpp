#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "infdist/density.hpp"
#include "infdist/geometry.hpp"
#include "infdist/random.hpp"
#include "infdist/sampler.hpp"

namespace infdist {

// Empirical risk minimization over K with linear losses l_i(theta) = c_i . theta.
struct ErmInstance {
  Polytope polytope;
  std::vector<Vector> losses;
  double lipschitz = 0.0;  // per-loss bound, |c_i|_2 <= L
  double epsilon = 0.0;    // privacy budget

  // Throws std::invalid_argument on n = 0, dimension mismatch, |c_i| > L,
  // or a nonpositive budget.
  void validate() const;

  // f(theta) = sum_i c_i . theta, declared (n L)-Lipschitz.
  LogDensity objective() const;
};

// Polytope block, then `n`, n loss lines, then `L eps`.
ErmInstance read_erm_instance(std::istream& in, const std::string& source = "<instance>");
ErmInstance load_erm_instance(const std::string& path);

// Iteration budget after which the mechanism gives up and outputs the
// inner-ball center: ceil(10 log(max(d / eps, n eps / d, 3))).
std::int64_t early_halt_threshold(int d, std::size_t n, double epsilon);

// min over K of the linear objective, by enumerating the vertices of K
// (intersections of d constraints). Throws std::invalid_argument for d > 3.
double erm_minimum(const ErmInstance& instance);

// f(theta) - min_K f. Requires theta in K.
double utility_gap(const ErmInstance& instance, const Vector& theta);

struct ErmOptions {
  double c_mix = 1e-4;
  std::optional<double> step_scale;
  std::optional<std::int64_t> walk_steps;
  std::uint64_t setup_seed = 0;
};

struct ErmResult {
  Vector theta;
  std::int64_t iterations = 0;
  bool fallback = false;
  bool early_halt = false;
  std::uint64_t oracle_calls = 0;
  std::uint64_t chain_steps = 0;
};

// Exponential mechanism exp(-(eps / (2 n L R)) f) on K, sampled with
// infinity-distance error eps, with the early-halt rule. Set up once,
// then draw repeatedly.
class PrivateErm {
 public:
  explicit PrivateErm(const ErmInstance& instance, const ErmOptions& options = {});

  ErmResult run(Rng& rng);

  const InfinitySampler& sampler() const { return sampler_; }
  const LogDensity& mechanism_density() const { return mechanism_; }
  std::int64_t halt_threshold() const { return halt_threshold_; }

 private:
  static InfinitySampler make_sampler(const ErmInstance& instance, const LogDensity& mechanism,
                                      std::int64_t halt_threshold, const ErmOptions& options);

  LogDensity mechanism_;
  std::int64_t halt_threshold_;
  InfinitySampler sampler_;
};

// One private release; prefer PrivateErm for repeated draws.
ErmResult private_erm(const ErmInstance& instance, Rng& rng, const ErmOptions& options = {});

}  // namespace infdist
