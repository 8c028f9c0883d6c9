#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Cholesky>

#include "infdist/density.hpp"
#include "infdist/geometry.hpp"
#include "infdist/random.hpp"

namespace infdist {

// Metropolized Dikin walk with the logarithmic barrier of K = {Ax <= b}.
//
// Proposal: y = x + (eta / sqrt(d)) H(x)^{-1/2} g, g ~ N(0, I), where
// H(x) = sum_i a_i a_i^T / (b_i - a_i.x)^2. The Metropolis-Hastings filter
// uses the full Gaussian kernel ratio (including log det H), so pi ∝ exp(-f)
// restricted to K is reversible for the chain.

struct WalkConfig {
  double step_scale = 0.1;  // eta
  std::int64_t steps = 1;   // T, Metropolis steps per independent draw
};

struct BarrierHessian {
  Matrix hessian;
  double logdet = 0.0;
};

// Throws std::domain_error if x is not strictly interior or H is not
// positive definite.
BarrierHessian barrier_hessian(const Polytope& polytope, const Vector& x);

// log q(x -> y) without the (2 pi)^{-d/2} (d / eta^2)^{d/2} factor, which is
// the same in both directions.
double log_proposal_density(const Polytope& polytope, const Vector& x, const Vector& y,
                            double step_scale);

// Metropolis-Hastings acceptance probability for a move x -> y.
// Zero when y is not strictly interior.
double accept_prob(const Polytope& polytope, const LogDensity& f, const Vector& x,
                   const Vector& y, double step_scale);

// log of accept_prob, -inf when y is not strictly interior. Stays accurate
// where the probability itself underflows.
double log_accept_prob(const Polytope& polytope, const LogDensity& f, const Vector& x,
                       const Vector& y, double step_scale);

struct ChainState {
  Vector x;
  Matrix hessian;
  Matrix factor;  // lower Cholesky factor, hessian = factor factor^T
  double logdet = 0.0;
  double potential = 0.0;  // f(x)
};

class DikinWalk {
 public:
  DikinWalk(Polytope polytope, LogDensity f, double step_scale);

  // Moves the chain to x0 (must be strictly interior).
  void reset(const Vector& x0);

  // One Metropolis step. Returns true when the proposal was accepted.
  bool step(Rng& rng);

  // reset(x0), then `steps` Metropolis steps. Returns the final point.
  Vector run(const Vector& x0, std::int64_t steps, Rng& rng);

  // A fresh proposal from the current state; does not move the chain.
  Vector propose(Rng& rng) const;

  const ChainState& state() const { return states_[current_]; }
  const Vector& position() const { return state().x; }

  double step_scale() const { return step_scale_; }
  void set_step_scale(double eta);

  const Polytope& polytope() const { return polytope_; }
  const LogDensity& density() const { return f_; }

  std::uint64_t steps() const { return steps_; }
  std::uint64_t accepts() const { return accepts_; }
  double acceptance_rate() const {
    return steps_ == 0 ? 0.0 : static_cast<double>(accepts_) / static_cast<double>(steps_);
  }
  void reset_counters() { steps_ = accepts_ = 0; }

 private:
  // Fills s.hessian / s.factor / s.logdet from slack_. False if not PD.
  bool factor(ChainState& s);
  void solve_upper(const ChainState& s, Vector& v) const;

  Polytope polytope_;
  LogDensity f_;
  double step_scale_;
  int dim_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows_;

  std::array<ChainState, 2> states_;
  int current_ = 0;

  Vector gauss_, direction_, slack_, diff_;
  std::uint64_t steps_ = 0;
  std::uint64_t accepts_ = 0;
};

// Uniform draw from the inner ball B(center, r); strictly interior.
Vector warm_start(const Polytope& polytope, Rng& rng);

// log of the warm-start warmness bound: d log(R/r) + R L.
double log_warmness(const Polytope& polytope, double lipschitz);

// ceil(c_mix (m^2 d^3 + m^2 d L^2 R^2) (log w - log delta)), at least 1.
std::int64_t mixing_steps(const Polytope& polytope, double lipschitz, double delta_log,
                          double c_mix);

struct TuneResult {
  double step_scale = 0.0;
  double acceptance = 0.0;
  int rounds = 0;
  bool converged = false;
};

// Doubles / halves eta on pilot runs from warm starts until the pilot
// acceptance rate falls in [low, high]. Leaves the walk at the tuned eta.
TuneResult tune_step_scale(DikinWalk& walk, Rng& rng, int pilot_steps = 500,
                           double low = 0.3, double high = 0.7, int max_rounds = 30);

}  // namespace infdist
