#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "infdist/geometry.hpp"
#include "infdist/random.hpp"

namespace infdist {

// Zeroth-order oracle for a convex potential f, target pi ∝ exp(-f).
//
// `lipschitz()` is the caller's declared bound |f(x) - f(y)| <= L |x - y|_2
// on K. Copies share one call counter, so a copy handed to a chain still
// counts against the original's budget.
class LogDensity {
 public:
  using Function = std::function<double(const Vector&)>;

  LogDensity(Function f, double lipschitz, std::string description = "custom");

  // Evaluates f; throws ContractViolation on a non-finite value.
  double operator()(const Vector& x) const;

  double lipschitz() const { return lipschitz_; }
  const std::string& description() const { return description_; }

  std::uint64_t calls() const { return calls_->load(std::memory_order_relaxed); }
  void reset_calls() const { calls_->store(0, std::memory_order_relaxed); }

  // The underlying function, bypassing the counter. For composing densities.
  const Function& function() const { return f_; }

 private:
  Function f_;
  double lipschitz_;
  std::string description_;
  std::shared_ptr<std::atomic<std::uint64_t>> calls_;
};

// theta -> g(theta + t), same Lipschitz constant. Pairs with normalize().
LogDensity shifted(const LogDensity& g, const Vector& t);

// Exponential-mechanism potential (eps / (2 L_total R)) f, declared
// (eps / (2 L_total R)) L_f-Lipschitz; that is eps/(2R) when L_f = L_total.
LogDensity exp_mechanism_density(const LogDensity& f, double eps, double lipschitz_total,
                                 double radius);

double exp_mechanism_scale(double eps, double lipschitz_total, double radius);

LogDensity uniform_density();

// f(theta) = c . theta, Lipschitz |c|_2.
LogDensity linear_density(const Vector& c);

// f(theta) = weight * |theta|_1, Lipschitz weight * sqrt(d) in l2.
LogDensity norm1_density(double weight, int d);

// f(theta) = sum_i c_i . theta with declared per-loss bound; Lipschitz n * L.
LogDensity erm_density(const std::vector<Vector>& losses, double per_loss_lipschitz);

// Parses a built-in density spec for dimension d:
//   "uniform" | "linear c1,...,cd" | "norm1 w" | "erm c11,...,c1d;c21,...;..."
// Tokens may be separated by a space or a colon. Throws ConfigError.
LogDensity parse_density(const std::string& spec, int d);

// Largest observed |f(x) - f(y)| / (L |x - y|) over `pairs` random pairs
// drawn uniformly from the outer ball and kept when both land in K.
// A declared constant is consistent when this stays <= 1 + 1e-9.
double lipschitz_ratio(const LogDensity& f, const Polytope& polytope, Rng& rng, int pairs);

}  // namespace infdist
