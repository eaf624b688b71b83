#include "wavecoh/significance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "wavecoh/error.hpp"

namespace wavecoh {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void simulate_into(const Ar1Params& p, std::uint64_t seed, std::span<double> out) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (out.empty()) return;
  out[0] = normal(engine) * p.sigma / std::sqrt(1.0 - p.phi * p.phi);
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = p.phi * out[i - 1] + p.sigma * normal(engine);
  }
}

unsigned resolve_threads(unsigned requested, std::size_t tasks) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Ar1Params fit_ar1(const TimeSeries& x) {
  const std::size_t n = x.size();
  if (n < kMinSeriesLength) {
    throw InputError("AR(1) fit needs at least " + std::to_string(kMinSeriesLength) + " values");
  }
  const double mean = std::accumulate(x.values.begin(), x.values.end(), 0.0) / n;
  double c0 = 0.0;
  double c1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x.values[i] - mean;
    c0 += d * d;
    if (i + 1 < n) c1 += d * (x.values[i + 1] - mean);
  }
  if (!(c0 > 1e-300) || c0 < 1e-28 * mean * mean * n) {
    throw InputError("zero variance: cannot fit AR(1) to series '" + x.name + "'");
  }
  Ar1Params p;
  p.phi = std::clamp(c1 / c0, -0.99, 0.99);
  const double variance = c0 / static_cast<double>(n - 1);
  p.sigma = std::sqrt(std::max(variance * (1.0 - p.phi * p.phi), 1e-12));
  return p;
}

TimeSeries simulate_ar1(const Ar1Params& params, std::size_t n, std::uint64_t seed) {
  if (!(std::abs(params.phi) < 1.0) || !(params.sigma > 0.0)) {
    throw std::invalid_argument("AR(1) parameters require |phi| < 1 and sigma > 0");
  }
  TimeSeries out;
  out.name = "ar1";
  out.values.resize(n);
  simulate_into(params, seed, out.values);
  return out;
}

SignificanceField mc_significance(const TimeSeries& x, const TimeSeries& y,
                                  const CoherenceField& observed, std::size_t n_surrogates,
                                  double alpha, std::uint64_t seed,
                                  const MonteCarloOptions& options) {
  if (n_surrogates < kMinSurrogates) {
    throw std::invalid_argument("n_surrogates too small: need at least " +
                                std::to_string(kMinSurrogates));
  }
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must be in (0, 0.5)");
  const std::size_t n = x.size();
  if (y.size() != n || observed.r2.cols() != n || observed.r2.rows() != observed.grid.size()) {
    throw std::invalid_argument("mc_significance: series and coherence field do not match");
  }

  const Ar1Params px = fit_ar1(x);
  const Ar1Params py = fit_ar1(y);
  const std::size_t rows = observed.r2.rows();

  // Pooled mode ranks against all reliable cells of a row; precompute each row's
  // reliable time range and the observed values sorted per row.
  std::vector<std::pair<std::size_t, std::size_t>> reliable(rows, {0, n});
  std::vector<std::vector<double>> sorted_obs;
  if (options.pool_time) {
    sorted_obs.resize(rows);
    for (std::size_t j = 0; j < rows; ++j) {
      std::size_t lo = n;
      std::size_t hi = 0;
      for (std::size_t u = 0; u < n; ++u) {
        if (observed.reliable(j, u)) {
          lo = std::min(lo, u);
          hi = u + 1;
        }
      }
      if (lo < hi) reliable[j] = {lo, hi};
      auto r = observed.r2.row(j);
      sorted_obs[j].assign(r.begin(), r.end());
      std::sort(sorted_obs[j].begin(), sorted_obs[j].end());
    }
  }

  // Per-cell counts, or per (row, sorted observed index) difference counts when pooled.
  using Counts = Matrix<std::uint32_t>;
  const unsigned workers = resolve_threads(options.threads, n_surrogates);
  std::vector<Counts> partial(workers, Counts(rows, options.pool_time ? n + 1 : n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const CoherenceEngine prototype(n, observed.dt, observed.grid, observed.morlet,
                                  observed.smoothing);
  auto work = [&](unsigned worker) {
    try {
      CoherenceEngine engine = prototype;
      Counts& counts = partial[worker];
      std::vector<double> sx(n);
      std::vector<double> sy(n);
      Matrix<double> r2;
      for (std::size_t k = next++; k < n_surrogates; k = next++) {
        simulate_into(px, stream_seed(seed, 2 * k), sx);
        simulate_into(py, stream_seed(seed, 2 * k + 1), sy);
        engine.coherence_into(sx, sy, r2);
        for (std::size_t j = 0; j < rows; ++j) {
          auto obs = observed.r2.row(j);
          auto sur = r2.row(j);
          auto cnt = counts.row(j);
          if (options.pool_time) {
            const auto& sorted = sorted_obs[j];
            for (std::size_t u = reliable[j].first; u < reliable[j].second; ++u) {
              // Observed cells ranked at or above this index exceed the surrogate value.
              const auto idx = std::upper_bound(sorted.begin(), sorted.end(), sur[u]) - sorted.begin();
              ++cnt[static_cast<std::size_t>(idx)];
            }
          } else {
            for (std::size_t u = 0; u < n; ++u) cnt[u] += sur[u] < obs[u] ? 1u : 0u;
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (failure) std::rethrow_exception(failure);

  Counts total = partial[0];
  for (unsigned w = 1; w < workers; ++w) {
    for (std::size_t i = 0; i < total.size(); ++i) total.values()[i] += partial[w].values()[i];
  }

  SignificanceField sig;
  sig.alpha = alpha;
  sig.n_surrogates = n_surrogates;
  sig.seed = seed;
  sig.pooled = options.pool_time;
  sig.percentile = Matrix<double>(rows, n);
  sig.significant = Matrix<std::uint8_t>(rows, n);
  for (std::size_t j = 0; j < rows; ++j) {
    if (options.pool_time) {
      const auto& sorted = sorted_obs[j];
      const double denom = static_cast<double>(n_surrogates) *
                           static_cast<double>(reliable[j].second - reliable[j].first);
      // Prefix sums turn difference counts into "surrogates below sorted[i]".
      std::vector<double> below(n);
      std::uint64_t running = 0;
      for (std::size_t i = 0; i < n; ++i) {
        running += total(j, i);
        below[i] = static_cast<double>(running) / denom;
      }
      auto obs = observed.r2.row(j);
      for (std::size_t u = 0; u < n; ++u) {
        // The first sorted slot holding this value gives the strict count.
        const auto idx = std::lower_bound(sorted.begin(), sorted.end(), obs[u]) - sorted.begin();
        sig.percentile(j, u) = below[static_cast<std::size_t>(idx)];
      }
    } else {
      for (std::size_t u = 0; u < n; ++u) {
        sig.percentile(j, u) = static_cast<double>(total(j, u)) / static_cast<double>(n_surrogates);
      }
    }
    for (std::size_t u = 0; u < n; ++u) {
      sig.significant(j, u) = sig.percentile(j, u) >= 1.0 - alpha ? 1 : 0;
    }
  }
  return sig;
}

double significant_fraction(const SignificanceField& sig, const CoherenceField& field) {
  std::size_t cells = 0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < sig.significant.rows(); ++j) {
    for (std::size_t u = 0; u < sig.significant.cols(); ++u) {
      if (!field.reliable(j, u)) continue;
      ++cells;
      hits += sig.significant(j, u);
    }
  }
  return cells == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(cells);
}

}  // namespace wavecoh
