#include "infdist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace infdist {

ExactSampler::ExactSampler(Polytope polytope, LogDensity f, Rng& pilot_rng,
                           double min_acceptance, int pilot)
    : polytope_(std::move(polytope)), f_(std::move(f)) {
  const Vector& c = polytope_.center();
  Box box = bounding_box(polytope_);
  lo_ = std::move(box.lo);
  hi_ = std::move(box.hi);

  const Vector reach = (lo_ - c).cwiseAbs().cwiseMax((hi_ - c).cwiseAbs());
  f_floor_ = f_.function()(c) - f_.lipschitz() * reach.norm();

  double total = 0.0;
  for (int k = 0; k < pilot; ++k) total += accept_weight(draw_box(pilot_rng));
  pilot_acceptance_ = pilot > 0 ? total / pilot : 1.0;
  if (pilot_acceptance_ < min_acceptance) {
    throw std::runtime_error(
        "exact sampler acceptance rate is too low (" + std::to_string(pilot_acceptance_) +
        "); use a smaller dimension, a tighter outer radius or a flatter density");
  }
}

Vector ExactSampler::draw_box(Rng& rng) const {
  Vector x(lo_.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = lo_[j] + (hi_[j] - lo_[j]) * rng.uniform();
  return x;
}

double ExactSampler::accept_weight(const Vector& x) const {
  if (!polytope_.contains(x)) return 0.0;
  return std::exp(-(f_(x) - f_floor_));
}

Vector ExactSampler::operator()(Rng& rng) const {
  for (;;) {
    Vector x = draw_box(rng);
    if (!polytope_.contains(x)) continue;
    if (rng.uniform() < std::exp(-(f_(x) - f_floor_))) return x;
  }
}

Vector exact_sample(const Polytope& polytope, const LogDensity& f, Rng& rng) {
  ExactSampler sampler(polytope, f, rng);
  return sampler(rng);
}

CellGrid::CellGrid(GridSpec spec) : spec_(std::move(spec)) {
  const auto d = spec_.bins.size();
  if (d < 1 || spec_.lo.size() != static_cast<Eigen::Index>(d) ||
      spec_.hi.size() != static_cast<Eigen::Index>(d)) {
    throw std::invalid_argument("grid spec dimension mismatch");
  }
  std::size_t cells = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (spec_.bins[j] < 1 || !(spec_.hi[j] > spec_.lo[j])) {
      throw std::invalid_argument("grid needs bins >= 1 and lo < hi on every axis");
    }
    cells *= static_cast<std::size_t>(spec_.bins[j]);
  }
  mass_.assign(cells, 0.0);
}

long CellGrid::cell_of(const Vector& x) const {
  long index = 0;
  long stride = 1;
  for (int j = 0; j < dim(); ++j) {
    const double lo = spec_.lo[j];
    const double hi = spec_.hi[j];
    if (!(x[j] >= lo && x[j] <= hi)) return -1;
    const int n = spec_.bins[j];
    int k = static_cast<int>(std::floor((x[j] - lo) / (hi - lo) * n));
    k = std::clamp(k, 0, n - 1);
    index += k * stride;
    stride *= n;
  }
  return index;
}

Vector CellGrid::cell_lo(std::size_t cell) const {
  Vector out(dim());
  for (int j = 0; j < dim(); ++j) {
    const int n = spec_.bins[j];
    const auto k = static_cast<int>(cell % static_cast<std::size_t>(n));
    cell /= static_cast<std::size_t>(n);
    out[j] = spec_.lo[j] + (spec_.hi[j] - spec_.lo[j]) * k / n;
  }
  return out;
}

Vector CellGrid::cell_hi(std::size_t cell) const {
  Vector out(dim());
  for (int j = 0; j < dim(); ++j) {
    const int n = spec_.bins[j];
    const auto k = static_cast<int>(cell % static_cast<std::size_t>(n));
    cell /= static_cast<std::size_t>(n);
    out[j] = spec_.lo[j] + (spec_.hi[j] - spec_.lo[j]) * (k + 1) / n;
  }
  return out;
}

CellGrid cell_masses(const Polytope& polytope, const LogDensity& f, const GridSpec& spec,
                     int subnodes) {
  CellGrid grid(spec);
  const int d = grid.dim();
  if (d > 3) throw std::invalid_argument("cell_masses supports d <= 3");
  if (d != polytope.dim()) throw std::invalid_argument("grid and polytope dimensions differ");
  if (subnodes < 1) throw std::invalid_argument("subnodes must be >= 1");

  const auto& fn = f.function();
  // Shift the exponent so the largest weights stay near 1.
  const double ref = fn(polytope.center());
  std::size_t nodes_per_cell = 1;
  for (int j = 0; j < d; ++j) nodes_per_cell *= static_cast<std::size_t>(subnodes);

  Vector x(d);
  double total = 0.0;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const Vector lo = grid.cell_lo(cell);
    const Vector h = (grid.cell_hi(cell) - lo) / subnodes;
    double sum = 0.0;
    for (std::size_t node = 0; node < nodes_per_cell; ++node) {
      std::size_t rest = node;
      for (int j = 0; j < d; ++j) {
        const auto k = rest % static_cast<std::size_t>(subnodes);
        rest /= static_cast<std::size_t>(subnodes);
        x[j] = lo[j] + (static_cast<double>(k) + 0.5) * h[j];
      }
      if (polytope.contains(x)) sum += std::exp(-(fn(x) - ref));
    }
    grid.mass()[cell] = sum * h.prod();
    total += grid.mass()[cell];
  }
  if (!(total > 0.0)) throw std::runtime_error("the polytope does not meet the grid");
  for (auto& m : grid.mass()) m /= total;
  return grid;
}

Histogram histogram(const SampleBatch& samples, const CellGrid& grid) {
  Histogram h;
  h.counts.assign(grid.size(), 0);
  for (const auto& p : samples.points) {
    const long cell = grid.cell_of(p);
    if (cell < 0) {
      ++h.outside;
    } else {
      ++h.counts[static_cast<std::size_t>(cell)];
    }
  }
  h.total = samples.size();
  return h;
}

bool SupLogRatio::within(double bound, double k_sigma) const {
  for (const auto& c : cells) {
    if (!(std::abs(c.log_ratio) <= bound + k_sigma * c.sigma)) return false;
  }
  return true;
}

double SupLogRatio::excess(double k_sigma) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : cells) worst = std::max(worst, std::abs(c.log_ratio) - k_sigma * c.sigma);
  return worst;
}

SupLogRatio sup_log_ratio(const Histogram& hist, const CellGrid& grid, double min_expected) {
  if (hist.counts.size() != grid.size()) {
    throw std::invalid_argument("histogram does not match the grid");
  }
  SupLogRatio out;
  const double n = static_cast<double>(hist.total);
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const double mass = grid.mass()[cell];
    if (n * mass < min_expected) {
      out.excluded.push_back(cell);
      continue;
    }
    CellComparison c;
    c.cell = cell;
    c.mass = mass;
    c.count = hist.counts[cell];
    c.frequency = static_cast<double>(c.count) / n;
    c.log_ratio = c.count == 0 ? -std::numeric_limits<double>::infinity()
                               : std::log(c.frequency / mass);
    c.sigma = std::sqrt((1.0 - mass) / (n * mass));
    if (out.cells.empty() || std::abs(c.log_ratio) > out.value) {
      out.value = std::abs(c.log_ratio);
      out.worst_cell = cell;
    }
    out.cells.push_back(c);
  }
  return out;
}

SupLogRatio sup_log_ratio(const SampleBatch& samples, const CellGrid& grid,
                          double min_expected) {
  return sup_log_ratio(histogram(samples, grid), grid, min_expected);
}

double tv_estimate(const Histogram& hist, const CellGrid& grid) {
  if (hist.total == 0) return 0.0;
  const double n = static_cast<double>(hist.total);
  double sum = static_cast<double>(hist.outside) / n;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    sum += std::abs(static_cast<double>(hist.counts[cell]) / n - grid.mass()[cell]);
  }
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

double tv_estimate(const SampleBatch& samples, const CellGrid& grid) {
  return tv_estimate(histogram(samples, grid), grid);
}

void write_grid_csv(std::ostream& out, const CellGrid& grid, const Histogram* hist) {
  out << "cell";
  for (int j = 0; j < grid.dim(); ++j) out << ",lo" << j << ",hi" << j;
  out << ",mass";
  if (hist != nullptr) out << ",count,frequency";
  out << '\n';
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const Vector lo = grid.cell_lo(cell);
    const Vector hi = grid.cell_hi(cell);
    out << cell;
    for (int j = 0; j < grid.dim(); ++j) out << ',' << lo[j] << ',' << hi[j];
    out << ',' << grid.mass()[cell];
    if (hist != nullptr) {
      const double freq = hist->total == 0 ? 0.0
                                           : static_cast<double>(hist->counts[cell]) /
                                                 static_cast<double>(hist->total);
      out << ',' << hist->counts[cell] << ',' << freq;
    }
    out << '\n';
  }
}

}  // namespace infdist
