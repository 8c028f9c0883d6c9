#include <gtest/gtest.h>

#include <cmath>
#include <Eigen/Eigenvalues>

#include "infdist/dikin.hpp"
#include "infdist/polytope_io.hpp"
#include "test_support.hpp"

namespace infdist {
namespace {

using testing::exp_interval_mean;
using testing::random_member;
using testing::random_polytope;

Polytope unit_square() { return Polytope::box(Vector::Constant(2, -1), Vector::Constant(2, 1)); }

Polytope square_file() { return load_polytope(INFDIST_DATA_DIR "/square.poly"); }

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(BarrierHessian, UnitBoxAtOrigin) {
  const BarrierHessian bh = barrier_hessian(unit_square(), Vector::Zero(2));
  EXPECT_TRUE(bh.hessian.isApprox(2.0 * Matrix::Identity(2, 2), 1e-15));
  EXPECT_NEAR(bh.logdet, 2.0 * std::log(2.0), 1e-15);
}

TEST(BarrierHessian, UnitBoxOffCenter) {
  const BarrierHessian bh = barrier_hessian(unit_square(), vec2(0.5, 0.0));
  EXPECT_NEAR(bh.hessian(0, 0), 1.0 / 0.25 + 1.0 / 2.25, 1e-14);
  EXPECT_NEAR(bh.hessian(1, 1), 2.0, 1e-14);
  EXPECT_EQ(bh.hessian(0, 1), 0.0);
  EXPECT_EQ(bh.hessian(1, 0), 0.0);
}

TEST(BarrierHessian, LogDetMatchesEigenvalues) {
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const int d = 1 + k % 3;
    const Polytope p = random_polytope(rng, d, 3);
    const Vector x = random_member(rng, p);
    if (!(p.margin(x) > 0.0)) continue;
    const BarrierHessian bh = barrier_hessian(p, x);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(bh.hessian);
    ASSERT_EQ(eig.info(), Eigen::Success);
    EXPECT_NEAR(bh.logdet, eig.eigenvalues().array().log().sum(), 1e-8);
  }
}

TEST(BarrierHessian, RejectsBoundaryPoints) {
  EXPECT_THROW(barrier_hessian(unit_square(), vec2(1.0, 0.0)), std::domain_error);
  EXPECT_THROW(barrier_hessian(unit_square(), vec2(3.0, 0.0)), std::domain_error);
}

TEST(Propose, ZeroScaleLimitStaysPut) {
  DikinWalk walk(unit_square(), uniform_density(), 1e-300);
  Rng rng(1);
  const Vector y = walk.propose(rng);
  EXPECT_LT(y.norm(), 1e-290);
}

TEST(Propose, CovarianceAtBoxCenter) {
  const double eta = 0.4;
  DikinWalk walk(unit_square(), uniform_density(), eta);
  Rng rng(2);
  const int n = 100000;
  Vector mean = Vector::Zero(2);
  Matrix cov = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vector y = walk.propose(rng);
    mean += y;
    cov += y * y.transpose();
  }
  mean /= n;
  cov /= n;
  const double var = eta * eta / 4.0;
  EXPECT_NEAR(cov(0, 0), var, 0.05 * var);
  EXPECT_NEAR(cov(1, 1), var, 0.05 * var);
  EXPECT_NEAR(cov(0, 1), 0.0, 0.05 * var);
  const double se = std::sqrt(var / n);
  EXPECT_LT(std::abs(mean[0]), 3.0 * se);
  EXPECT_LT(std::abs(mean[1]), 3.0 * se);
}

TEST(Propose, CovarianceFollowsHessianOffCenter) {
  const Polytope p = unit_square();
  const Vector x = vec2(0.5, -0.3);
  const double eta = 0.3;
  DikinWalk walk(p, uniform_density(), eta);
  walk.reset(x);
  Rng rng(3);
  const int n = 100000;
  Matrix cov = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vector dy = walk.propose(rng) - x;
    cov += dy * dy.transpose();
  }
  cov /= n;
  const Matrix expected = (eta * eta / 2.0) * barrier_hessian(p, x).hessian.inverse();
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(cov(i, i), expected(i, i), 0.05 * expected(i, i));
}

TEST(AcceptProb, ZeroDisplacementAlwaysAccepts) {
  const Polytope p = unit_square();
  const LogDensity f = linear_density(vec2(1.0, 2.0));
  EXPECT_DOUBLE_EQ(accept_prob(p, f, vec2(0.2, 0.1), vec2(0.2, 0.1), 0.5), 1.0);
}

TEST(AcceptProb, OutsideOrBoundaryIsRejected) {
  const Polytope p = unit_square();
  const LogDensity f = uniform_density();
  EXPECT_EQ(accept_prob(p, f, vec2(0.0, 0.0), vec2(1.5, 0.0), 0.5), 0.0);
  EXPECT_EQ(accept_prob(p, f, vec2(0.0, 0.0), vec2(1.0, 0.0), 0.5), 0.0);
}

TEST(AcceptProb, DetailedBalance) {
  Rng rng(4);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const int d = 1 + k % 3;
    const Polytope p = random_polytope(rng, d, 2);
    Vector c(d);
    for (int j = 0; j < d; ++j) c[j] = rng.normal();
    const LogDensity f = linear_density(c);
    const Vector x = random_member(rng, p);
    const Vector y = random_member(rng, p);
    if (!(p.margin(x) > 0.0) || !(p.margin(y) > 0.0)) continue;
    const double eta = 0.5 + rng.uniform();
    const double axy = log_accept_prob(p, f, x, y, eta);
    const double ayx = log_accept_prob(p, f, y, x, eta);
    ASSERT_NEAR(std::exp(axy), accept_prob(p, f, x, y, eta), 1e-15);
    const double lhs = log_proposal_density(p, x, y, eta) + axy - f(x);
    const double rhs = log_proposal_density(p, y, x, eta) + ayx - f(y);
    EXPECT_NEAR(lhs, rhs, 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 900);
}

TEST(AcceptProb, SwappingArgumentsHasNoHiddenState) {
  const Polytope p = unit_square();
  const LogDensity f = linear_density(vec2(0.3, -1.0));
  const Vector x = vec2(0.1, 0.2), y = vec2(-0.4, 0.5);
  const double first = accept_prob(p, f, x, y, 0.7);
  accept_prob(p, f, y, x, 0.7);
  EXPECT_EQ(accept_prob(p, f, x, y, 0.7), first);
}

TEST(DikinWalk, StepMatchesReferenceKernel) {
  Rng setup(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 3;
    const Polytope p = random_polytope(setup, d, 4);
    Vector c(d);
    for (int j = 0; j < d; ++j) c[j] = setup.normal();
    const LogDensity f = linear_density(c);
    DikinWalk walk(p, f, 0.9);
    walk.reset(testing::random_member(setup, p));
    Rng rng(6, static_cast<std::uint64_t>(trial));
    for (int s = 0; s < 200; ++s) {
      const Vector x = walk.position();
      const BarrierHessian bh = barrier_hessian(p, x);
      ASSERT_TRUE(walk.state().hessian.isApprox(bh.hessian, 1e-12));
      ASSERT_NEAR(walk.state().logdet, bh.logdet, 1e-10);
      ASSERT_TRUE((walk.state().factor * walk.state().factor.transpose())
                      .isApprox(bh.hessian, 1e-12));
      Rng shadow = rng;
      const Vector y = walk.propose(shadow);
      const double u = shadow.uniform();
      const double alpha = accept_prob(p, f, x, y, walk.step_scale());
      const bool accepted = walk.step(rng);
      if (std::abs(u - alpha) < 1e-9) continue;
      ASSERT_EQ(accepted, u < alpha);
      ASSERT_TRUE(walk.position().isApprox(accepted ? y : x, 1e-14));
    }
  }
}

TEST(DikinWalk, ZeroStepsReturnsStart) {
  DikinWalk walk(unit_square(), uniform_density(), 0.5);
  Rng rng(7);
  const Vector x0 = vec2(0.25, -0.75);
  EXPECT_EQ(walk.run(x0, 0, rng), x0);
  EXPECT_EQ(walk.steps(), 0u);
}

TEST(DikinWalk, NeverLeavesThePolytope) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Polytope p = random_polytope(rng, 2 + trial % 2, 5);
    DikinWalk walk(p, uniform_density(), 2.0);
    walk.reset(p.center());
    for (int s = 0; s < 5000; ++s) {
      walk.step(rng);
      ASSERT_GT(p.margin(walk.position()), 0.0);
    }
  }
}

TEST(DikinWalk, StartOutsideIsRejected) {
  DikinWalk walk(unit_square(), uniform_density(), 0.5);
  EXPECT_THROW(walk.reset(vec2(2.0, 0.0)), std::domain_error);
  EXPECT_THROW(walk.set_step_scale(0.0), std::invalid_argument);
}

TEST(DikinWalk, CountersTrackSteps) {
  DikinWalk walk(unit_square(), uniform_density(), 0.8);
  Rng rng(9);
  walk.run(Vector::Zero(2), 1000, rng);
  EXPECT_EQ(walk.steps(), 1000u);
  EXPECT_GT(walk.accepts(), 0u);
  EXPECT_LE(walk.accepts(), 1000u);
  walk.reset_counters();
  EXPECT_EQ(walk.steps(), 0u);
}

TEST(DikinWalk, OneDimensionalMeanMatchesClosedForm) {
  const Polytope p = Polytope::box(Vector::Constant(1, -1), Vector::Constant(1, 1));
  const LogDensity f = linear_density(Vector::Constant(1, 1.0));
  DikinWalk walk(p, f, 0.8);
  Rng rng(10);
  const int n = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = walk.run(warm_start(p, rng), 300, rng)[0];
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  EXPECT_LT(std::abs(mean - exp_interval_mean(1.0)), 3.0 * std::sqrt(var / n));
}

TEST(WarmStart, StaysInInnerBall) {
  const Polytope p = square_file();
  Rng rng(12);
  const int n = 20000;
  int inside_half = 0;
  for (int i = 0; i < n; ++i) {
    const Vector x = warm_start(p, rng);
    ASSERT_GE(p.margin(x), 0.0);
    ASSERT_LE(x.norm(), p.inner_radius());
    if (x.norm() <= 0.5 * p.inner_radius()) ++inside_half;
  }
  const double freq = static_cast<double>(inside_half) / n;
  EXPECT_LT(std::abs(freq - 0.25), 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST(MixingSteps, WorkedExample) {
  const Polytope p = square_file();
  EXPECT_NEAR(log_warmness(p, 1.0), 2.0 * std::log(2.0) + 2.0, 1e-12);
  EXPECT_EQ(mixing_steps(p, 1.0, -29.20, 1.0), 8343);
  // With log delta at full precision from the converter schedule.
  EXPECT_EQ(mixing_steps(p, 1.0, -29.268306113, 1.0), 8360);
}

TEST(MixingSteps, ClampsAtOneAndScalesLinearly) {
  const Polytope p = square_file();
  EXPECT_EQ(mixing_steps(p, 1.0, -29.2, 1e-300), 1);
  const std::int64_t a = mixing_steps(p, 1.0, -29.2, 1.0);
  const std::int64_t b = mixing_steps(p, 1.0, -29.2, 10.0);
  EXPECT_NEAR(static_cast<double>(b), 10.0 * 256.0 * (log_warmness(p, 1.0) + 29.2), 1.0);
  EXPECT_NEAR(static_cast<double>(a), 256.0 * (log_warmness(p, 1.0) + 29.2), 1.0);
  EXPECT_THROW(mixing_steps(p, 1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(mixing_steps(p, 1.0, -1.0, 0.0), std::invalid_argument);
}

TEST(Tuning, LandsInAcceptanceBand) {
  DikinWalk walk(unit_square(), uniform_density(), 0.1);
  Rng rng(13);
  const TuneResult t = tune_step_scale(walk, rng);
  EXPECT_TRUE(t.converged);
  EXPECT_GE(t.acceptance, 0.3);
  EXPECT_LE(t.acceptance, 0.7);
  EXPECT_EQ(walk.step_scale(), t.step_scale);
  walk.reset_counters();
  walk.run(Vector::Zero(2), 20000, rng);
  EXPECT_GE(walk.acceptance_rate(), 0.3);
  EXPECT_LE(walk.acceptance_rate(), 0.7);
}

}  // namespace
}  // namespace infdist
