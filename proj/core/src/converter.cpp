#include "infdist/converter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "infdist/errors.hpp"

namespace infdist {

ConverterParams compute_params(double epsilon, double lipschitz, double inner_radius,
                               double outer_radius, int d) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("converter needs 0 < eps <= 1");
  }
  if (!(lipschitz >= 0.0) || !(inner_radius > 0.0) || !(outer_radius >= inner_radius) || d < 1) {
    throw std::invalid_argument("converter needs L >= 0, 0 < r <= R and d >= 1");
  }
  const double LR = lipschitz * outer_radius;
  const double log_ratio = std::log(outer_radius / inner_radius);

  ConverterParams p;
  p.epsilon = epsilon;
  p.tau_max = static_cast<std::int64_t>(std::ceil(5.0 * d * log_ratio + 5.0 * LR + epsilon));
  p.delta = epsilon / (512.0 * static_cast<double>(p.tau_max) * std::max<double>(d, LR));
  p.delta_log = std::log(epsilon / 64.0) - d * std::log(outer_radius / (p.delta * inner_radius)) - LR;
  return p;
}

ScheduleCheck check_schedule(const ConverterParams& p, double lipschitz, double inner_radius,
                             double outer_radius, int d) {
  const double LR = lipschitz * outer_radius;
  ScheduleCheck c;
  c.epsilon_ok = p.epsilon > 0.0 && p.epsilon <= 1.0;
  c.tau_ok = static_cast<double>(p.tau_max) >=
             5.0 * d * std::log(outer_radius / inner_radius) + 5.0 * LR + p.epsilon;
  // Relative 1e-12 slack: the bounds are met with equality by compute_params.
  const double delta_bound =
      p.epsilon / (512.0 * static_cast<double>(p.tau_max) * std::max<double>(d, LR));
  c.delta_ok = p.delta > 0.0 && p.delta <= 0.5 && p.delta <= delta_bound * (1.0 + 1e-12);
  const double tv_bound =
      std::log(p.epsilon / 64.0) - d * std::log(outer_radius / (p.delta * inner_radius)) - LR;
  c.tv_ok = p.delta_log <= tv_bound + 1e-12 * std::abs(tv_bound);
  return c;
}

ConverterOutput convert(const Polytope& polytope, const SampleOracle& oracle,
                        const ConverterParams& params, Rng& rng, std::int64_t abandon_after) {
  const int d = polytope.dim();
  const double r = polytope.inner_radius();
  const double smoothing = params.delta * r;

  ConverterOutput out;
  for (std::int64_t i = 1; i <= params.tau_max; ++i) {
    if (abandon_after > 0 && i > abandon_after) {
      out.point = Vector::Zero(d);
      out.iterations = abandon_after;
      out.abandoned = true;
      return out;
    }
    Vector theta = oracle();
    ++out.oracle_calls;
    if (theta.size() != d || !polytope.contains(theta)) {
      std::ostringstream msg;
      msg << "sampling oracle returned a point outside K (iteration " << i << ")";
      throw ContractViolation(msg.str());
    }
    Vector candidate = stretch(theta + smoothing * sample_unit_ball(rng, d), params.delta);
    ++out.membership_calls;
    if (polytope.contains(candidate) && rng.coin()) {
      out.point = std::move(candidate);
      out.iterations = i;
      return out;
    }
  }
  out.point = sample_ball(rng, polytope.inner_ball());
  out.iterations = params.tau_max + 1;
  out.fallback = true;
  return out;
}

TauSummary tau_statistics(std::span<const ConverterOutput> runs, int max_t) {
  if (runs.empty()) throw std::invalid_argument("tau_statistics needs at least one run");
  TauSummary s;
  s.runs = runs.size();
  s.tail.assign(static_cast<std::size_t>(max_t) + 1, 0.0);
  s.pmf.assign(static_cast<std::size_t>(max_t) + 1, 0.0);
  double total = 0.0;
  for (const auto& run : runs) {
    total += static_cast<double>(run.iterations);
    for (int t = 0; t <= max_t; ++t) {
      if (run.iterations >= t) s.tail[t] += 1.0;
      if (run.iterations == t) s.pmf[t] += 1.0;
    }
    if (run.fallback) {
      ++s.fallbacks;
    } else {
      s.iterations += static_cast<std::uint64_t>(run.iterations);
      if (!run.abandoned) ++s.halts;
    }
  }
  const double n = static_cast<double>(s.runs);
  s.mean = total / n;
  for (int t = 0; t <= max_t; ++t) {
    s.tail[t] /= n;
    s.pmf[t] /= n;
  }
  s.halt_rate = s.iterations == 0 ? 0.0
                                  : static_cast<double>(s.halts) / static_cast<double>(s.iterations);
  return s;
}

bool TauLawCheck::passed() const {
  if (!mean_ok) return false;
  for (const auto& c : survival) {
    if (!c.ok) return false;
  }
  for (const auto& c : pmf) {
    if (!c.ok) return false;
  }
  return true;
}

namespace {

BandCheck band(int t, double value, double lower, double upper, double n, double k_sigma) {
  BandCheck c{t, value, lower, upper, 0.0, false};
  // Binomial standard error at the band edge closest to the estimate.
  const double edge = std::clamp(value, lower, std::min(upper, 1.0));
  c.sigma = std::sqrt(edge * (1.0 - edge) / n);
  c.ok = value >= lower - k_sigma * c.sigma && value <= upper + k_sigma * c.sigma;
  return c;
}

}  // namespace

TauLawCheck check_tau_law(const TauSummary& s, double epsilon, std::int64_t tau_max, int max_t,
                          double k_sigma, double survival_base) {
  if (max_t + 1 >= static_cast<int>(s.tail.size())) {
    throw std::invalid_argument("tau summary does not cover the requested range");
  }
  if (survival_base <= 0.0) survival_base = 0.5 + epsilon / (8.0 * static_cast<double>(tau_max));
  const double n = static_cast<double>(s.runs);
  TauLawCheck check;
  check.mean_ok = s.mean <= 3.0;
  const int t_end = static_cast<int>(std::min<std::int64_t>(max_t, tau_max));
  for (int t = 1; t <= t_end; ++t) {
    const double half_t = std::pow(0.5, t);
    check.survival.push_back(band(t, s.tail[t + 1], half_t, std::pow(survival_base, t), n, k_sigma));
    check.pmf.push_back(band(t, s.pmf[t], half_t * std::exp(-epsilon / 2.0),
                             half_t * std::exp(epsilon / 2.0), n, k_sigma));
  }
  return check;
}

}  // namespace infdist
