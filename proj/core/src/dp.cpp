#include "infdist/dp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "infdist/errors.hpp"
#include "infdist/polytope_io.hpp"

namespace infdist {

void ErmInstance::validate() const {
  if (losses.empty()) throw std::invalid_argument("ERM instance needs n >= 1 losses");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("per-loss Lipschitz bound must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("privacy budget must be positive");
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (losses[i].size() != polytope.dim()) {
      throw std::invalid_argument("loss " + std::to_string(i) + " has the wrong dimension");
    }
    if (losses[i].norm() > lipschitz * (1.0 + 1e-12)) {
      throw std::invalid_argument("loss " + std::to_string(i) +
                                  " violates the per-loss Lipschitz bound");
    }
  }
}

LogDensity ErmInstance::objective() const { return erm_density(losses, lipschitz); }

ErmInstance read_erm_instance(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  Polytope polytope = read_polytope(reader);
  const auto count = reader.numbers("loss count 'n'", 1);
  if (count[0] < 1 || count[0] != std::floor(count[0]) || count[0] > 1e7) {
    throw ConfigError(source, reader.line(), "n must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(count[0]);
  std::vector<Vector> losses;
  losses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = reader.numbers("loss vector", static_cast<std::size_t>(polytope.dim()));
    losses.emplace_back(Eigen::Map<const Vector>(c.data(), polytope.dim()));
  }
  const auto tail = reader.numbers("'L eps'", 2);
  ErmInstance instance{std::move(polytope), std::move(losses), tail[0], tail[1]};
  try {
    instance.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, reader.line(), e.what());
  }
  return instance;
}

ErmInstance load_erm_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file '" + path + "'");
  return read_erm_instance(in, path);
}

std::int64_t early_halt_threshold(int d, std::size_t n, double epsilon) {
  const double dd = static_cast<double>(d);
  const double arg = std::max({dd / epsilon, static_cast<double>(n) * epsilon / dd, 3.0});
  return static_cast<std::int64_t>(std::ceil(10.0 * std::log(arg)));
}

double erm_minimum(const ErmInstance& instance) {
  const Polytope& P = instance.polytope;
  const int d = P.dim();
  const int m = P.num_constraints();
  if (d > 3) throw std::invalid_argument("vertex enumeration is limited to d <= 3");
  Vector c = Vector::Zero(d);
  for (const auto& loss : instance.losses) c += loss;

  const double scale = 1.0 + P.b().cwiseAbs().maxCoeff();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(d));
  // Walk all d-subsets of the m constraints in lexicographic order.
  for (int j = 0; j < d; ++j) pick[j] = j;
  while (true) {
    Matrix M(d, d);
    Vector rhs(d);
    for (int j = 0; j < d; ++j) {
      M.row(j) = P.A().row(pick[j]);
      rhs[j] = P.b()[pick[j]];
    }
    Eigen::FullPivLU<Matrix> lu(M);
    if (lu.isInvertible()) {
      const Vector v = lu.solve(rhs);
      const Vector slack = P.b() - P.A() * v;
      if (slack.minCoeff() >= -1e-9 * scale) best = std::min(best, c.dot(v));
    }
    int j = d - 1;
    while (j >= 0 && pick[j] == m - d + j) --j;
    if (j < 0) break;
    ++pick[j];
    for (int k = j + 1; k < d; ++k) pick[k] = pick[k - 1] + 1;
  }
  if (!std::isfinite(best)) throw std::runtime_error("polytope has no vertices");
  return best;
}

double utility_gap(const ErmInstance& instance, const Vector& theta) {
  if (!instance.polytope.contains(theta)) {
    throw std::invalid_argument("utility_gap needs a point of K");
  }
  Vector c = Vector::Zero(instance.polytope.dim());
  for (const auto& loss : instance.losses) c += loss;
  return std::max(0.0, c.dot(theta) - erm_minimum(instance));
}

namespace {

LogDensity mechanism_for(const ErmInstance& instance) {
  instance.validate();
  if (instance.epsilon > 1.0) {
    throw std::invalid_argument(
        "privacy budget eps > 1 is outside the converter's range; split the budget or use eps <= 1");
  }
  const double total = static_cast<double>(instance.losses.size()) * instance.lipschitz;
  return exp_mechanism_density(instance.objective(), instance.epsilon, total,
                               instance.polytope.outer_radius());
}

}  // namespace

InfinitySampler PrivateErm::make_sampler(const ErmInstance& instance,
                                         const LogDensity& mechanism,
                                         std::int64_t halt_threshold,
                                         const ErmOptions& options) {
  SamplerOptions so;
  so.epsilon = instance.epsilon;
  so.c_mix = options.c_mix;
  so.step_scale = options.step_scale;
  so.walk_steps = options.walk_steps;
  so.setup_seed = options.setup_seed;
  so.abandon_after = halt_threshold;
  return InfinitySampler(instance.polytope, mechanism, so);
}

PrivateErm::PrivateErm(const ErmInstance& instance, const ErmOptions& options)
    : mechanism_(mechanism_for(instance)),
      halt_threshold_(early_halt_threshold(instance.polytope.dim(), instance.losses.size(),
                                           instance.epsilon)),
      sampler_(make_sampler(instance, mechanism_, halt_threshold_, options)) {}

ErmResult PrivateErm::run(Rng& rng) {
  const SampleRecord record = sampler_.sample(rng);
  ErmResult out;
  out.theta = record.output.point;
  out.iterations = record.output.iterations;
  out.fallback = record.output.fallback;
  out.early_halt = record.output.abandoned;
  out.oracle_calls = record.output.oracle_calls;
  out.chain_steps = record.chain_steps;
  return out;
}

ErmResult private_erm(const ErmInstance& instance, Rng& rng, const ErmOptions& options) {
  PrivateErm mechanism(instance, options);
  return mechanism.run(rng);
}

}  // namespace infdist
