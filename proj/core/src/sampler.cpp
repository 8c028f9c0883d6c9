#include "infdist/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace infdist {
InfinitySampler::InfinitySampler(const Polytope& polytope, const LogDensity& f,
                                 const SamplerOptions& options)
    : original_(polytope),
      normalized_(normalize(polytope).polytope),
      translation_(polytope.center()),
      density_(shifted(f, polytope.center())),
      params_(compute_params(options.epsilon, f.lipschitz(), polytope.inner_radius(),
                             polytope.outer_radius(), polytope.dim())),
      options_(options),
      walk_(normalized_, density_, options.step_scale.value_or(0.1)) {
  walk_steps_ = options.walk_steps ? *options.walk_steps
                                   : mixing_steps(normalized_, density_.lipschitz(),
                                                  params_.delta_log, options.c_mix);
  if (walk_steps_ < 0) throw std::invalid_argument("walk steps must be nonnegative");

  Rng setup(options.setup_seed, 0);
  if (options.oracle == OracleKind::kExact) {
    exact_.emplace(normalized_, density_, setup);
  } else if (!options.step_scale) {
    tuning_ = tune_step_scale(walk_, setup, options.pilot_steps);
  } else {
    tuning_.step_scale = *options.step_scale;
  }
}

SampleRecord InfinitySampler::sample(Rng& rng) {
  const auto steps_before = walk_.steps();
  const auto accepts_before = walk_.accepts();
  SampleOracle oracle;
  if (exact_) {
    oracle = [this, &rng] { return (*exact_)(rng); };
  } else {
    oracle = [this, &rng] { return walk_.run(warm_start(normalized_, rng), walk_steps_, rng); };
  }
  SampleRecord record;
  record.output = convert(normalized_, oracle, params_, rng, options_.abandon_after);
  record.output.point += translation_;
  original_.check_outer_radius(record.output.point);
  record.chain_steps = walk_.steps() - steps_before;
  record.chain_accepts = walk_.accepts() - accepts_before;
  return record;
}

std::vector<SampleRecord> sample_batch(const InfinitySampler& sampler, std::size_t n,
                                       std::uint64_t seed, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<SampleRecord> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    InfinitySampler local = sampler;
    try {
      for (std::size_t i = next++; i < n; i = next++) {
        Rng rng(seed, i + 1);
        out[i] = local.sample(rng);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace infdist
