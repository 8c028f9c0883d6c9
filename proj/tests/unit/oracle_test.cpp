#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infdist/oracle.hpp"
#include "infdist/polytope_io.hpp"
#include "test_support.hpp"

namespace infdist {
namespace {

using testing::exp_interval_mass;

Polytope interval() { return Polytope::box(Vector::Constant(1, -1), Vector::Constant(1, 1)); }
Polytope unit_square() { return Polytope::box(Vector::Constant(2, -1), Vector::Constant(2, 1)); }

GridSpec grid_1d(int bins) { return {Vector::Constant(1, -1), Vector::Constant(1, 1), {bins}}; }
GridSpec grid_2d(int bins) {
  return {Vector::Constant(2, -1), Vector::Constant(2, 1), {bins, bins}};
}

// Multinomial draw from the grid's masses, one point per sample at the cell midpoint.
SampleBatch draw_from_masses(const CellGrid& grid, std::size_t n, Rng& rng) {
  std::vector<double> cdf(grid.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) cdf[i] = (acc += grid.mass()[i]);
  SampleBatch batch;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform() * acc;
    const auto cell = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                               cdf.begin());
    const std::size_t c = std::min(cell, grid.size() - 1);
    batch.add(0.5 * (grid.cell_lo(c) + grid.cell_hi(c)));
  }
  return batch;
}

TEST(ExactSampler, UniformOnBoxAlwaysAccepts) {
  Rng rng(41);
  const ExactSampler sampler(unit_square(), uniform_density(), rng);
  EXPECT_EQ(sampler.pilot_acceptance(), 1.0);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(unit_square().contains(sampler(rng)));
}

TEST(ExactSampler, OneDimensionalCdfAtZero) {
  Rng rng(42);
  const ExactSampler sampler(interval(), linear_density(Vector::Constant(1, 1.0)), rng);
  const int n = 100000;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    if (sampler(rng)[0] <= 0.0) ++below;
  }
  const double p = (std::exp(1.0) - 1.0) / (std::exp(1.0) - std::exp(-1.0));
  EXPECT_NEAR(p, 0.7310585786300049, 1e-12);
  EXPECT_LT(std::abs(static_cast<double>(below) / n - p), 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(ExactSampler, OutputsStayInK) {
  Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const Polytope p = testing::random_polytope(rng, 2, 4);
    const ExactSampler sampler(p, norm1_density(0.5, 2), rng);
    for (int i = 0; i < 2000; ++i) ASSERT_TRUE(p.contains(sampler(rng)));
  }
}

TEST(ExactSampler, GuardTripsOnSteepDensity) {
  Rng rng(44);
  EXPECT_THROW(ExactSampler(interval(), linear_density(Vector::Constant(1, 1e6)), rng),
               std::runtime_error);
}

TEST(ExactSampler, PotentialFloorIsALowerBound) {
  Rng rng(45);
  const Polytope p = load_polytope(INFDIST_DATA_DIR "/triangle.poly");
  Vector c(2);
  c << 0.7, -1.1;
  const LogDensity f = linear_density(c);
  const ExactSampler sampler(p, f, rng);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = testing::random_member(rng, p);
    ASSERT_GE(f(x), sampler.potential_floor());
  }
}

TEST(CellMasses, UniformBoxCellsAreEqual) {
  const CellGrid grid = cell_masses(unit_square(), uniform_density(), grid_2d(10));
  double total = 0.0;
  for (double m : grid.mass()) {
    EXPECT_NEAR(m, 0.01, 1e-12);
    total += m;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(CellMasses, OneDimensionalClosedForm) {
  const CellGrid grid = cell_masses(interval(), linear_density(Vector::Constant(1, 1.0)),
                                    grid_1d(50));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = exp_interval_mass(1.0, grid.cell_lo(i)[0], grid.cell_hi(i)[0]);
    EXPECT_NEAR(grid.mass()[i], exact, 1e-6 * exact) << "cell " << i;
  }
}

TEST(CellMasses, RefinementConverges) {
  const LogDensity f = linear_density(Vector::Constant(1, 1.0));
  const CellGrid coarse = cell_masses(interval(), f, grid_1d(50), 32);
  const CellGrid fine = cell_masses(interval(), f, grid_1d(50), 64);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    EXPECT_NEAR(coarse.mass()[i], fine.mass()[i], 1e-7 * fine.mass()[i]);
  }
}

TEST(CellMasses, SignFlipSymmetry) {
  const CellGrid grid = cell_masses(unit_square(), norm1_density(1.3, 2), grid_2d(8));
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const double m = grid.mass()[i + 8 * j];
      EXPECT_NEAR(m, grid.mass()[(7 - i) + 8 * j], 1e-9);
      EXPECT_NEAR(m, grid.mass()[i + 8 * (7 - j)], 1e-9);
      EXPECT_NEAR(m, grid.mass()[j + 8 * i], 1e-9);
    }
  }
}

TEST(CellMasses, ClipsToThePolytope) {
  const Polytope tri = load_polytope(INFDIST_DATA_DIR "/triangle.poly");
  const GridSpec spec{Vector::Constant(2, -1), Vector::Constant(2, 4), {5, 5}};
  const CellGrid grid = cell_masses(tri, uniform_density(), spec);
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    total += grid.mass()[i];
    if (grid.cell_hi(i)[0] <= 0.0 || grid.cell_hi(i)[1] <= 0.0) EXPECT_EQ(grid.mass()[i], 0.0);
    if (grid.cell_lo(i)[0] + grid.cell_lo(i)[1] >= 3.0) EXPECT_EQ(grid.mass()[i], 0.0);
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  // Cell [0,1]^2 is fully inside; the triangle has area 4.5.
  EXPECT_NEAR(grid.mass()[1 + 5 * 1], 1.0 / 4.5, 5e-3);
}

TEST(CellMasses, RejectsBadInputs) {
  const GridSpec far{Vector::Constant(1, 5), Vector::Constant(1, 6), {4}};
  EXPECT_THROW(cell_masses(interval(), uniform_density(), far), std::runtime_error);
  const Polytope cube = Polytope::box(Vector::Constant(4, -1), Vector::Constant(4, 1));
  const GridSpec g4{Vector::Constant(4, -1), Vector::Constant(4, 1), {2, 2, 2, 2}};
  EXPECT_THROW(cell_masses(cube, uniform_density(), g4), std::invalid_argument);
}

TEST(CellGrid, CellLookup) {
  const CellGrid grid(grid_2d(4));
  Vector x(2);
  x << -1.0, -1.0;
  EXPECT_EQ(grid.cell_of(x), 0);
  x << 1.0, 1.0;
  EXPECT_EQ(grid.cell_of(x), 15);
  x << 0.1, -0.9;
  EXPECT_EQ(grid.cell_of(x), 2);
  x << 1.5, 0.0;
  EXPECT_EQ(grid.cell_of(x), -1);
}

TEST(SupLogRatio, SelfConsistentSamplesStayInBand) {
  Rng rng(46);
  const CellGrid grid = cell_masses(interval(), linear_density(Vector::Constant(1, 1.0)),
                                    grid_1d(50));
  const SupLogRatio s = sup_log_ratio(draw_from_masses(grid, 1000000, rng), grid);
  EXPECT_TRUE(s.excluded.empty());
  int outside = 0;
  for (const auto& c : s.cells) {
    if (std::abs(c.log_ratio) > 3.0 * c.sigma) ++outside;
  }
  EXPECT_LE(outside, 2);
  EXPECT_TRUE(s.within(0.0, 4.5));
  EXPECT_LT(s.value, 0.05);
}

TEST(SupLogRatio, EmptyCellIsInfinite) {
  const CellGrid grid = cell_masses(interval(), uniform_density(), grid_1d(4));
  SampleBatch batch;
  for (int i = 0; i < 1000; ++i) batch.add(Vector::Constant(1, 0.1 + 0.8 * (i % 3) / 3.0 - 0.9));
  const SupLogRatio s = sup_log_ratio(batch, grid);
  EXPECT_TRUE(std::isinf(s.value));
  EXPECT_FALSE(s.within(100.0));
}

TEST(SupLogRatio, ExcludesSparseCells) {
  const CellGrid grid = cell_masses(interval(), linear_density(Vector::Constant(1, 1.0)),
                                    grid_1d(10));
  Rng rng(47);
  const SupLogRatio s = sup_log_ratio(draw_from_masses(grid, 500, rng), grid);
  EXPECT_FALSE(s.excluded.empty());
  EXPECT_EQ(s.excluded.size() + s.cells.size(), grid.size());
}

TEST(SupLogRatio, BandShrinksWithSampleSize) {
  const CellGrid grid = cell_masses(interval(), uniform_density(), grid_1d(10));
  Histogram h1{std::vector<std::uint64_t>(10, 1000), 0, 10000};
  Histogram h2{std::vector<std::uint64_t>(10, 2000), 0, 20000};
  const SupLogRatio a = sup_log_ratio(h1, grid), b = sup_log_ratio(h2, grid);
  ASSERT_EQ(a.cells.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(a.cells[i].sigma / b.cells[i].sigma, std::sqrt(2.0), 1e-12);
  }
  EXPECT_NEAR(a.value, 0.0, 1e-12);
}

TEST(TvEstimate, SelfConsistentSamplesShrink) {
  Rng rng(48);
  const CellGrid grid = cell_masses(unit_square(), norm1_density(1.0, 2), grid_2d(10));
  const double small = tv_estimate(draw_from_masses(grid, 10000, rng), grid);
  const double large = tv_estimate(draw_from_masses(grid, 1000000, rng), grid);
  EXPECT_LT(small, std::sqrt(100.0 / 10000));
  EXPECT_LT(large, std::sqrt(100.0 / 1000000));
  EXPECT_LT(large, small);
}

TEST(TvEstimate, DisjointSupportGivesOne) {
  const CellGrid grid = cell_masses(interval(), uniform_density(), grid_1d(4));
  SampleBatch outside;
  for (int i = 0; i < 100; ++i) outside.add(Vector::Constant(1, 3.0));
  EXPECT_DOUBLE_EQ(tv_estimate(outside, grid), 1.0);

  const GridSpec wide{Vector::Constant(1, -2), Vector::Constant(1, 2), {4}};
  const CellGrid wgrid = cell_masses(interval(), uniform_density(), wide);
  SampleBatch off;
  for (int i = 0; i < 100; ++i) off.add(Vector::Constant(1, 1.5));
  EXPECT_DOUBLE_EQ(tv_estimate(off, wgrid), 1.0);
}

TEST(TvEstimate, AlwaysInUnitInterval) {
  Rng rng(49);
  const CellGrid grid = cell_masses(interval(), uniform_density(), grid_1d(7));
  for (int k = 0; k < 100; ++k) {
    SampleBatch batch;
    const int n = 1 + static_cast<int>(rng.uniform() * 50);
    for (int i = 0; i < n; ++i) batch.add(Vector::Constant(1, 4.0 * rng.uniform() - 2.0));
    const double tv = tv_estimate(batch, grid);
    ASSERT_GE(tv, 0.0);
    ASSERT_LE(tv, 1.0);
  }
}

TEST(Oracles, ExactSamplerAgreesWithCellMasses) {
  Rng rng(50);
  const LogDensity f = norm1_density(1.0, 2);
  const ExactSampler sampler(unit_square(), f, rng);
  const CellGrid grid = cell_masses(unit_square(), f, grid_2d(4));
  SampleBatch batch;
  for (int i = 0; i < 200000; ++i) batch.add(sampler(rng));
  const SupLogRatio s = sup_log_ratio(batch, grid);
  EXPECT_TRUE(s.within(0.0, 3.5)) << "excess " << s.excess(3.0);
}

TEST(GridCsv, WritesOneRowPerCell) {
  const CellGrid grid = cell_masses(interval(), uniform_density(), grid_1d(3));
  std::ostringstream out;
  write_grid_csv(out, grid);
  std::string line;
  std::istringstream in(out.str());
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(out.str().substr(0, 17), "cell,lo0,hi0,mass");
}

}  // namespace
}  // namespace infdist
