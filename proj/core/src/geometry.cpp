#include "infdist/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "infdist/errors.hpp"

namespace infdist {
namespace {

constexpr double kMinRowNorm = 1e-12;

bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

}  // namespace

Polytope::Polytope(Matrix A, Vector b, Vector center, double inner_radius,
                   double outer_radius)
    : A_(std::move(A)),
      b_(std::move(b)),
      center_(std::move(center)),
      inner_radius_(inner_radius),
      outer_radius_(outer_radius) {
  if (A_.cols() < 1 || A_.rows() < 1) {
    throw std::invalid_argument("polytope needs d >= 1 and m >= 1");
  }
  if (b_.size() != A_.rows() || center_.size() != A_.cols()) {
    throw std::invalid_argument("polytope dimension mismatch between A, b and center");
  }
  if (!all_finite(A_) || !b_.allFinite() || !center_.allFinite() ||
      !std::isfinite(inner_radius_) || !std::isfinite(outer_radius_)) {
    throw std::invalid_argument("polytope data must be finite");
  }
  if (!(inner_radius_ > 0.0)) {
    throw std::invalid_argument("inner radius must be positive");
  }
  if (inner_radius_ > outer_radius_) {
    throw std::invalid_argument("inner radius exceeds outer radius");
  }
  row_norms_ = A_.rowwise().norm();
  for (Eigen::Index i = 0; i < A_.rows(); ++i) {
    if (row_norms_[i] < kMinRowNorm) {
      throw std::invalid_argument("constraint row " + std::to_string(i) +
                                  " is (numerically) zero");
    }
  }
  const double m = margin(center_);
  if (m < inner_radius_) {
    std::ostringstream msg;
    msg << "inner ball B(center, " << inner_radius_
        << ") is not contained in the polytope (center margin " << m << ")";
    throw std::invalid_argument(msg.str());
  }
}

Polytope Polytope::box(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size() || lo.size() < 1) {
    throw std::invalid_argument("box bounds dimension mismatch");
  }
  const Eigen::Index d = lo.size();
  if (!((hi - lo).array() > 0.0).all()) {
    throw std::invalid_argument("box needs lo < hi on every axis");
  }
  Matrix A = Matrix::Zero(2 * d, d);
  Vector b(2 * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    A(2 * j, j) = 1.0;
    b[2 * j] = hi[j];
    A(2 * j + 1, j) = -1.0;
    b[2 * j + 1] = -lo[j];
  }
  const Vector half = 0.5 * (hi - lo);
  return Polytope(std::move(A), std::move(b), 0.5 * (lo + hi), half.minCoeff(),
                  half.norm());
}

void Polytope::check_dim(const Vector& x) const {
  if (x.size() != A_.cols()) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", polytope has " + std::to_string(A_.cols()));
  }
}

bool Polytope::contains(const Vector& x) const {
  check_dim(x);
  for (Eigen::Index i = 0; i < A_.rows(); ++i) {
    if (A_.row(i).dot(x) > b_[i]) return false;
  }
  return true;
}

double Polytope::margin(const Vector& x) const {
  check_dim(x);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < A_.rows(); ++i) {
    const double s = b_[i] - A_.row(i).dot(x);
    double q = s / row_norms_[i];
    // Keep the sign of the slack so margin >= 0 agrees with contains().
    if (s < 0.0 && q == 0.0) q = -std::numeric_limits<double>::denorm_min();
    best = std::min(best, q);
  }
  return best;
}

void Polytope::slacks(const Vector& x, Vector& out) const {
  check_dim(x);
  out.noalias() = b_ - A_ * x;
}

void Polytope::check_outer_radius(const Vector& x) const {
  const double dist = (x - center_).norm();
  if (dist > outer_radius_) {
    std::ostringstream msg;
    msg << "sampled point at distance " << dist << " from the center exceeds the declared outer radius "
        << outer_radius_;
    throw ContractViolation(msg.str());
  }
}

Box bounding_box(const Polytope& polytope) {
  const int d = polytope.dim();
  const double R = polytope.outer_radius();
  Box box{polytope.center().array() - R, polytope.center().array() + R};
  for (int i = 0; i < polytope.num_constraints(); ++i) {
    const auto row = polytope.A().row(i);
    int axis = -1;
    int nonzero = 0;
    for (int j = 0; j < d; ++j) {
      if (row[j] != 0.0) {
        axis = j;
        ++nonzero;
      }
    }
    if (nonzero != 1) continue;
    const double bound = polytope.b()[i] / row[axis];
    if (row[axis] > 0.0) {
      box.hi[axis] = std::min(box.hi[axis], bound);
    } else {
      box.lo[axis] = std::max(box.lo[axis], bound);
    }
  }
  return box;
}

NormalizedPolytope normalize(const Polytope& polytope) {
  const Vector& a = polytope.center();
  Vector b = polytope.b() - polytope.A() * a;
  // The declared outer ball is centered at a, so K - a lies in B(0, R).
  Polytope shifted(polytope.A(), std::move(b), Vector::Zero(polytope.dim()),
                   polytope.inner_radius(), polytope.outer_radius());
  return {std::move(shifted), a};
}

Vector stretch(const Vector& z, double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw std::invalid_argument("stretch parameter must lie in (0, 1/2]");
  }
  return z / (1.0 - delta);
}

Vector sample_unit_ball(Rng& rng, int d) {
  if (d < 1) throw std::invalid_argument("ball dimension must be >= 1");
  Vector g(d);
  double norm2 = 0.0;
  do {
    for (int j = 0; j < d; ++j) g[j] = rng.normal();
    norm2 = g.squaredNorm();
  } while (norm2 == 0.0);
  const double radius = std::pow(rng.uniform(), 1.0 / d);
  return g * (radius / std::sqrt(norm2));
}

Vector sample_ball(Rng& rng, const Ball& ball) {
  return ball.center + ball.radius * sample_unit_ball(rng, static_cast<int>(ball.center.size()));
}

}  // namespace infdist
