#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "infdist/density.hpp"
#include "infdist/geometry.hpp"
#include "infdist/random.hpp"

namespace infdist {

// Exact sampler for pi ∝ exp(-f) on K by rejection from a bounding box.
//
// The box is the outer ball's bounding box, tightened by any axis-aligned
// constraints. A proposal x is kept with probability
// 1{x in K} exp(-(f(x) - f_lo)), where f_lo = f(center) - L * (largest
// distance from the center to the box) lower-bounds f on K.
class ExactSampler {
 public:
  // Estimates the acceptance rate from `pilot` proposals and throws
  // std::runtime_error when it is below `min_acceptance`.
  ExactSampler(Polytope polytope, LogDensity f, Rng& pilot_rng,
               double min_acceptance = 1e-4, int pilot = 4000);

  Vector operator()(Rng& rng) const;

  double pilot_acceptance() const { return pilot_acceptance_; }
  const Vector& box_lo() const { return lo_; }
  const Vector& box_hi() const { return hi_; }
  double potential_floor() const { return f_floor_; }

 private:
  double accept_weight(const Vector& x) const;
  Vector draw_box(Rng& rng) const;

  Polytope polytope_;
  LogDensity f_;
  Vector lo_, hi_;
  double f_floor_ = 0.0;
  double pilot_acceptance_ = 0.0;
};

// One exact draw; builds a sampler (including its pilot) each call.
Vector exact_sample(const Polytope& polytope, const LogDensity& f, Rng& rng);

struct GridSpec {
  Vector lo;
  Vector hi;
  std::vector<int> bins;
};

// Tensor-product grid over a box (d <= 3) with the pi-mass of every cell.
// Cells are indexed with the first axis varying fastest.
class CellGrid {
 public:
  explicit CellGrid(GridSpec spec);

  int dim() const { return static_cast<int>(spec_.bins.size()); }
  std::size_t size() const { return mass_.size(); }
  const GridSpec& spec() const { return spec_; }

  // Cell containing x (half-open cells, last cell closed), or -1 outside.
  long cell_of(const Vector& x) const;
  Vector cell_lo(std::size_t cell) const;
  Vector cell_hi(std::size_t cell) const;

  const std::vector<double>& mass() const { return mass_; }
  std::vector<double>& mass() { return mass_; }

 private:
  GridSpec spec_;
  std::vector<double> mass_;
};

// Midpoint rule with `subnodes` points per axis per cell, integrand
// 1{x in K} exp(-f(x)), normalized to total mass 1. Throws
// std::invalid_argument for d > 3 and std::runtime_error when K misses the
// grid.
CellGrid cell_masses(const Polytope& polytope, const LogDensity& f, const GridSpec& spec,
                     int subnodes = 32);

// Output points with per-sample provenance.
struct SampleBatch {
  std::vector<Vector> points;
  std::vector<std::int64_t> iterations;
  std::vector<bool> fallback;

  void add(Vector point, std::int64_t iters = 0, bool fell_back = false) {
    points.push_back(std::move(point));
    iterations.push_back(iters);
    fallback.push_back(fell_back);
  }
  std::size_t size() const { return points.size(); }
};

struct Histogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t outside = 0;
  std::uint64_t total = 0;
};

Histogram histogram(const SampleBatch& samples, const CellGrid& grid);

struct CellComparison {
  std::size_t cell = 0;
  double mass = 0.0;
  std::uint64_t count = 0;
  double frequency = 0.0;
  double log_ratio = 0.0;  // log(frequency / mass); +-inf for an empty cell
  double sigma = 0.0;      // standard error of log(frequency) under the masses
};

struct SupLogRatio {
  double value = 0.0;  // max |log_ratio| over included cells
  std::size_t worst_cell = 0;
  std::vector<CellComparison> cells;
  std::vector<std::size_t> excluded;

  // Every included cell satisfies |log_ratio| <= bound + k_sigma * sigma.
  bool within(double bound, double k_sigma = 3.0) const;
  // max over included cells of |log_ratio| - k_sigma * sigma.
  double excess(double k_sigma = 3.0) const;
};

// Binned estimate of sup |log(nu / pi)|. Cells whose expected count under
// the masses is below `min_expected` are excluded and listed. This is a
// lower estimate of the true infinity distance.
SupLogRatio sup_log_ratio(const SampleBatch& samples, const CellGrid& grid,
                          double min_expected = 100.0);
SupLogRatio sup_log_ratio(const Histogram& hist, const CellGrid& grid,
                          double min_expected = 100.0);

// 1/2 sum |frequency - mass|, with points outside the grid counted as
// unmatched mass. A lower estimate of the true TV distance; always in [0, 1].
double tv_estimate(const SampleBatch& samples, const CellGrid& grid);
double tv_estimate(const Histogram& hist, const CellGrid& grid);

// CSV: cell index, per-axis bounds, mass[, count, frequency].
void write_grid_csv(std::ostream& out, const CellGrid& grid, const Histogram* hist = nullptr);

}  // namespace infdist
