#include "infdist/density.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "infdist/errors.hpp"

namespace infdist {

LogDensity::LogDensity(Function f, double lipschitz, std::string description)
    : f_(std::move(f)),
      lipschitz_(lipschitz),
      description_(std::move(description)),
      calls_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (!f_) throw std::invalid_argument("log-density needs a function");
  if (!(lipschitz_ >= 0.0) || !std::isfinite(lipschitz_)) {
    throw std::invalid_argument("Lipschitz constant must be finite and nonnegative");
  }
}

double LogDensity::operator()(const Vector& x) const {
  calls_->fetch_add(1, std::memory_order_relaxed);
  const double v = f_(x);
  if (!std::isfinite(v)) {
    throw ContractViolation("log-density '" + description_ + "' returned a non-finite value");
  }
  return v;
}

LogDensity shifted(const LogDensity& g, const Vector& t) {
  auto inner = g.function();
  return LogDensity([inner, t](const Vector& x) { return inner(x + t); }, g.lipschitz(),
                    g.description());
}

double exp_mechanism_scale(double eps, double lipschitz_total, double radius) {
  if (!(eps > 0.0) || !(lipschitz_total > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("exponential mechanism needs eps, L and R > 0");
  }
  return eps / (2.0 * lipschitz_total * radius);
}

LogDensity exp_mechanism_density(const LogDensity& f, double eps, double lipschitz_total,
                                 double radius) {
  const double scale = exp_mechanism_scale(eps, lipschitz_total, radius);
  auto inner = f.function();
  return LogDensity([inner, scale](const Vector& x) { return scale * inner(x); },
                    scale * f.lipschitz(), "expmech(" + f.description() + ")");
}

LogDensity uniform_density() {
  return LogDensity([](const Vector&) { return 0.0; }, 0.0, "uniform");
}

LogDensity linear_density(const Vector& c) {
  return LogDensity([c](const Vector& x) { return c.dot(x); }, c.norm(), "linear");
}

LogDensity norm1_density(double weight, int d) {
  if (!(weight >= 0.0)) throw std::invalid_argument("norm1 weight must be nonnegative");
  return LogDensity([weight](const Vector& x) { return weight * x.lpNorm<1>(); },
                    weight * std::sqrt(static_cast<double>(d)), "norm1");
}

LogDensity erm_density(const std::vector<Vector>& losses, double per_loss_lipschitz) {
  if (losses.empty()) throw std::invalid_argument("ERM density needs at least one loss");
  Vector total = Vector::Zero(losses.front().size());
  for (const auto& c : losses) {
    if (c.size() != total.size()) throw std::invalid_argument("loss dimension mismatch");
    if (c.norm() > per_loss_lipschitz * (1.0 + 1e-12)) {
      throw std::invalid_argument("loss vector exceeds the per-loss Lipschitz bound");
    }
    total += c;
  }
  const double lipschitz = static_cast<double>(losses.size()) * per_loss_lipschitz;
  return LogDensity([total](const Vector& x) { return total.dot(x); }, lipschitz, "erm");
}

namespace {

Vector parse_vector(const std::string& text, int d, const std::string& spec) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in density spec '" + spec + "'");
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw ConfigError("bad number '" + item + "' in density spec '" + spec + "'");
    }
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != d) {
    throw ConfigError("density spec '" + spec + "' needs " + std::to_string(d) +
                      " coefficients, got " + std::to_string(values.size()));
  }
  return Eigen::Map<const Vector>(values.data(), d);
}

}  // namespace

LogDensity parse_density(const std::string& spec, int d) {
  std::string kind = spec;
  std::string arg;
  if (const auto sep = spec.find_first_of(" :"); sep != std::string::npos) {
    kind = spec.substr(0, sep);
    const auto start = spec.find_first_not_of(" :", sep);
    if (start != std::string::npos) arg = spec.substr(start);
  }
  if (kind == "uniform") {
    if (!arg.empty()) throw ConfigError("'uniform' takes no argument");
    return uniform_density();
  }
  if (kind == "linear") return linear_density(parse_vector(arg, d, spec));
  if (kind == "norm1") {
    const Vector w = parse_vector(arg, 1, spec);
    if (w[0] < 0.0) throw ConfigError("norm1 weight must be nonnegative");
    return norm1_density(w[0], d);
  }
  if (kind == "erm") {
    std::vector<Vector> losses;
    std::istringstream in(arg);
    std::string item;
    double bound = 0.0;
    while (std::getline(in, item, ';')) {
      losses.push_back(parse_vector(item, d, spec));
      bound = std::max(bound, losses.back().norm());
    }
    if (losses.empty()) throw ConfigError("'erm' needs at least one loss vector");
    return erm_density(losses, bound);
  }
  throw ConfigError("unknown density kind '" + kind + "' (expected uniform, linear, norm1, erm)");
}

double lipschitz_ratio(const LogDensity& f, const Polytope& polytope, Rng& rng, int pairs) {
  const auto& fn = f.function();
  double worst = 0.0;
  int kept = 0;
  for (int attempt = 0; kept < pairs && attempt < 1000 * pairs; ++attempt) {
    const Vector x = sample_ball(rng, polytope.outer_ball());
    const Vector y = sample_ball(rng, polytope.outer_ball());
    if (!polytope.contains(x) || !polytope.contains(y)) continue;
    ++kept;
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double diff = std::abs(fn(x) - fn(y));
    if (f.lipschitz() == 0.0) {
      if (diff > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, diff / (f.lipschitz() * dist));
  }
  return worst;
}

}  // namespace infdist
