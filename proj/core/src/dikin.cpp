#include "infdist/dikin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace infdist {
namespace {

void accumulate_hessian(const Matrix& A, const Vector& slack, Matrix& H) {
  const Eigen::Index d = A.cols();
  H.setZero(d, d);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double w = 1.0 / (slack[i] * slack[i]);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double wa = w * A(i, k);
      for (Eigen::Index j = k; j < d; ++j) H(j, k) += wa * A(i, j);
    }
  }
  H.triangularView<Eigen::StrictlyUpper>() = H.transpose();
}

double logdet_from(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

BarrierHessian barrier_hessian(const Polytope& polytope, const Vector& x) {
  Vector slack;
  polytope.slacks(x, slack);
  if (!(slack.array() > 0.0).all()) {
    throw std::domain_error("barrier Hessian requested at a point that is not strictly interior");
  }
  BarrierHessian out;
  accumulate_hessian(polytope.A(), slack, out.hessian);
  Eigen::LLT<Matrix> llt(out.hessian);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("barrier Hessian is not positive definite");
  }
  out.logdet = logdet_from(llt);
  return out;
}

double log_proposal_density(const Polytope& polytope, const Vector& x, const Vector& y,
                            double step_scale) {
  const BarrierHessian bh = barrier_hessian(polytope, x);
  const Vector diff = y - x;
  const double d = static_cast<double>(polytope.dim());
  return 0.5 * bh.logdet -
         d / (2.0 * step_scale * step_scale) * diff.dot(bh.hessian * diff);
}

double log_accept_prob(const Polytope& polytope, const LogDensity& f, const Vector& x,
                       const Vector& y, double step_scale) {
  if (!(polytope.margin(y) > 0.0)) return -std::numeric_limits<double>::infinity();
  const double log_ratio = -f(y) + f(x) + log_proposal_density(polytope, y, x, step_scale) -
                           log_proposal_density(polytope, x, y, step_scale);
  return std::min(0.0, log_ratio);
}

double accept_prob(const Polytope& polytope, const LogDensity& f, const Vector& x,
                   const Vector& y, double step_scale) {
  return std::exp(log_accept_prob(polytope, f, x, y, step_scale));
}

DikinWalk::DikinWalk(Polytope polytope, LogDensity f, double step_scale)
    : polytope_(std::move(polytope)),
      f_(std::move(f)),
      step_scale_(step_scale),
      dim_(polytope_.dim()),
      rows_(polytope_.A()) {
  set_step_scale(step_scale);
  for (auto& s : states_) {
    s.x.resize(dim_);
    s.hessian.resize(dim_, dim_);
    s.factor.setZero(dim_, dim_);
  }
  gauss_.resize(dim_);
  direction_.resize(dim_);
  diff_.resize(dim_);
  slack_.resize(polytope_.num_constraints());
  reset(polytope_.center());
}

void DikinWalk::set_step_scale(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("Dikin step scale must be positive");
  }
  step_scale_ = eta;
}

// Hessian, lower Cholesky factor and log det from slack_, with plain loops:
// at desk-scale d the blocked Eigen kernels cost more than they save.
bool DikinWalk::factor(ChainState& s) {
  const int d = dim_;
  const int m = static_cast<int>(rows_.rows());
  double* H = s.hessian.data();
  std::fill(H, H + d * d, 0.0);
  for (int i = 0; i < m; ++i) {
    const double* a = rows_.data() + static_cast<std::ptrdiff_t>(i) * d;
    const double w = 1.0 / (slack_[i] * slack_[i]);
    for (int k = 0; k < d; ++k) {
      const double wa = w * a[k];
      for (int j = k; j < d; ++j) H[j + k * d] += wa * a[j];
    }
  }
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < k; ++j) H[j + k * d] = H[k + j * d];
  }

  double* L = s.factor.data();
  double diag_product = 1.0;
  for (int j = 0; j < d; ++j) {
    double sum = H[j + j * d];
    for (int k = 0; k < j; ++k) sum -= L[j + k * d] * L[j + k * d];
    if (!(sum > 0.0)) return false;
    const double ljj = std::sqrt(sum);
    L[j + j * d] = ljj;
    diag_product *= ljj;
    for (int i = j + 1; i < d; ++i) {
      double t = H[i + j * d];
      for (int k = 0; k < j; ++k) t -= L[i + k * d] * L[j + k * d];
      L[i + j * d] = t / ljj;
    }
  }
  if (diag_product > 1e-300 && diag_product < 1e300) {
    s.logdet = 2.0 * std::log(diag_product);
  } else {
    s.logdet = 2.0 * s.factor.diagonal().array().log().sum();
  }
  return std::isfinite(s.logdet);
}

void DikinWalk::solve_upper(const ChainState& s, Vector& v) const {
  // L^T v = g by back substitution; cov(v) = H^{-1} for g ~ N(0, I).
  const int d = dim_;
  const double* L = s.factor.data();
  for (int j = d - 1; j >= 0; --j) {
    double t = v[j];
    for (int i = j + 1; i < d; ++i) t -= L[i + j * d] * v[i];
    v[j] = t / L[j + j * d];
  }
}

void DikinWalk::reset(const Vector& x0) {
  ChainState& s = states_[current_];
  polytope_.slacks(x0, slack_);
  if (!(slack_.array() > 0.0).all()) {
    throw std::domain_error("Dikin walk started at a point that is not strictly interior");
  }
  s.x = x0;
  if (!factor(s)) throw std::domain_error("barrier Hessian is not positive definite at start");
  s.potential = f_(s.x);
}

Vector DikinWalk::propose(Rng& rng) const {
  const ChainState& s = state();
  Vector g(dim_);
  for (int j = 0; j < dim_; ++j) g[j] = rng.normal();
  solve_upper(s, g);
  return s.x + (step_scale_ / std::sqrt(static_cast<double>(dim_))) * g;
}

bool DikinWalk::step(Rng& rng) {
  ++steps_;
  const ChainState& cur = states_[current_];
  ChainState& cand = states_[1 - current_];
  const int d = dim_;
  const int m = static_cast<int>(rows_.rows());

  double g2 = 0.0;
  for (int j = 0; j < d; ++j) {
    const double g = rng.normal();
    direction_[j] = g;
    g2 += g * g;
  }
  solve_upper(cur, direction_);
  const double scale = step_scale_ / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) cand.x[j] = cur.x[j] + scale * direction_[j];
  const double u = rng.uniform();

  const double* b = polytope_.b().data();
  for (int i = 0; i < m; ++i) {
    const double* a = rows_.data() + static_cast<std::ptrdiff_t>(i) * d;
    double ax = 0.0;
    for (int j = 0; j < d; ++j) ax += a[j] * cand.x[j];
    const double s = b[i] - ax;
    if (!(s > 0.0)) return false;
    slack_[i] = s;
  }
  if (!factor(cand)) return false;

  // (y - x)^T H(x) (y - x) = (eta^2 / d) |g|^2, so the forward exponent is -|g|^2 / 2.
  const double log_forward = 0.5 * cur.logdet - 0.5 * g2;
  double quad = 0.0;
  const double* H = cand.hessian.data();
  for (int j = 0; j < d; ++j) diff_[j] = cur.x[j] - cand.x[j];
  for (int k = 0; k < d; ++k) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) row += H[j + k * d] * diff_[j];
    quad += diff_[k] * row;
  }
  const double log_backward =
      0.5 * cand.logdet - static_cast<double>(d) / (2.0 * step_scale_ * step_scale_) * quad;

  cand.potential = f_(cand.x);
  const double log_alpha = cur.potential - cand.potential + log_backward - log_forward;
  if (log_alpha >= 0.0 || u < std::exp(log_alpha)) {
    current_ = 1 - current_;
    ++accepts_;
    return true;
  }
  return false;
}

Vector DikinWalk::run(const Vector& x0, std::int64_t steps, Rng& rng) {
  reset(x0);
  for (std::int64_t t = 0; t < steps; ++t) step(rng);
  return position();
}

Vector warm_start(const Polytope& polytope, Rng& rng) {
  for (;;) {
    Vector x = sample_ball(rng, polytope.inner_ball());
    if (polytope.margin(x) > 0.0) return x;
  }
}

double log_warmness(const Polytope& polytope, double lipschitz) {
  return polytope.dim() * std::log(polytope.outer_radius() / polytope.inner_radius()) +
         polytope.outer_radius() * lipschitz;
}

std::int64_t mixing_steps(const Polytope& polytope, double lipschitz, double delta_log,
                          double c_mix) {
  if (!(c_mix > 0.0) || !(lipschitz >= 0.0) || !(delta_log < 0.0)) {
    throw std::invalid_argument("mixing_steps needs c_mix > 0, L >= 0 and log delta < 0");
  }
  const double m = polytope.num_constraints();
  const double d = polytope.dim();
  const double LR = lipschitz * polytope.outer_radius();
  const double work = m * m * d * d * d + m * m * d * LR * LR;
  const double raw = c_mix * work * (log_warmness(polytope, lipschitz) - delta_log);
  if (!std::isfinite(raw)) throw std::overflow_error("mixing step count is not finite");
  constexpr double kCap = 9.0e15;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::min(raw, kCap))));
}

TuneResult tune_step_scale(DikinWalk& walk, Rng& rng, int pilot_steps, double low, double high,
                           int max_rounds) {
  TuneResult result;
  // Once the band is bracketed, bisect geometrically instead of overshooting.
  double too_small = 0.0;
  double too_large = std::numeric_limits<double>::infinity();
  for (int round = 1; round <= max_rounds; ++round) {
    walk.reset_counters();
    walk.run(warm_start(walk.polytope(), rng), pilot_steps, rng);
    result.rounds = round;
    result.step_scale = walk.step_scale();
    result.acceptance = walk.acceptance_rate();
    if (result.acceptance >= low && result.acceptance <= high) {
      result.converged = true;
      break;
    }
    if (result.acceptance > high) {
      too_small = walk.step_scale();
    } else {
      too_large = walk.step_scale();
    }
    double next = 0.0;
    if (too_small > 0.0 && std::isfinite(too_large)) {
      next = std::sqrt(too_small * too_large);
    } else {
      next = result.acceptance > high ? 2.0 * walk.step_scale() : 0.5 * walk.step_scale();
    }
    walk.set_step_scale(next);
  }
  if (!result.converged) walk.set_step_scale(result.step_scale);
  walk.reset_counters();
  return result;
}

}  // namespace infdist
