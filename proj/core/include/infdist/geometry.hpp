#pragma once

#include <Eigen/Dense>

#include "infdist/random.hpp"

namespace infdist {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Ball {
  Vector center;
  double radius = 0.0;
};

// Closed polytope K = {x : A x <= b} together with a certified inner ball
// B(center, inner_radius) and a declared outer ball B(center, outer_radius).
//
// The inner ball is checked at construction. The outer ball cannot be checked
// cheaply and is taken on trust; check_outer_radius() catches violations on
// the points that actually get sampled.
class Polytope {
 public:
  Polytope(Matrix A, Vector b, Vector center, double inner_radius,
           double outer_radius);

  // Axis-aligned box [lo, hi] with the largest inscribed ball and the
  // circumscribed ball, both centered at the box midpoint.
  static Polytope box(const Vector& lo, const Vector& hi);

  int dim() const { return static_cast<int>(A_.cols()); }
  int num_constraints() const { return static_cast<int>(A_.rows()); }

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& center() const { return center_; }
  double inner_radius() const { return inner_radius_; }
  double outer_radius() const { return outer_radius_; }
  const Vector& row_norms() const { return row_norms_; }

  Ball inner_ball() const { return {center_, inner_radius_}; }
  Ball outer_ball() const { return {center_, outer_radius_}; }

  bool contains(const Vector& x) const;

  // Signed distance from x to the nearest facet hyperplane:
  // min_i (b_i - a_i.x) / |a_i|. x lies in the s-interior of K iff
  // margin(x) >= s; negative outside K.
  double margin(const Vector& x) const;

  // b - A x, written into `out` (resized as needed).
  void slacks(const Vector& x, Vector& out) const;

  // Throws ContractViolation if |x - center| > outer_radius.
  void check_outer_radius(const Vector& x) const;

 private:
  void check_dim(const Vector& x) const;

  Matrix A_;
  Vector b_;
  Vector center_;
  double inner_radius_;
  double outer_radius_;
  Vector row_norms_;
};

// Axis-aligned box containing K: the outer ball's bounding box, tightened
// by constraints whose normals are coordinate axes.
struct Box {
  Vector lo;
  Vector hi;
};
Box bounding_box(const Polytope& polytope);

struct NormalizedPolytope {
  Polytope polytope;
  Vector translation;
};

// Translates K so the inner ball is centered at the origin: K' = K - a.
// Returns K' and the translation a (original = normalized + a).
NormalizedPolytope normalize(const Polytope& polytope);

// Z / (1 - delta), the map taking (1 - delta) K back onto K.
Vector stretch(const Vector& z, double delta);

// Uniform on the closed unit d-ball: Gaussian direction, radius U^{1/d}.
Vector sample_unit_ball(Rng& rng, int d);

Vector sample_ball(Rng& rng, const Ball& ball);

}  // namespace infdist
