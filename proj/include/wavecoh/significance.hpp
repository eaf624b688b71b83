#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wavecoh/coherence.hpp"
#include "wavecoh/matrix.hpp"
#include "wavecoh/series.hpp"

namespace wavecoh {

/// First-order autoregressive red noise x[i] = phi x[i-1] + e[i], e ~ N(0, sigma^2).
struct Ar1Params {
  double phi = 0.0;
  double sigma = 1.0;
};

/// Yule-Walker order-1 fit. phi is clamped to [-0.99, 0.99].
Ar1Params fit_ar1(const TimeSeries& x);

/// Stationary AR(1) path of length n, fully determined by `seed`.
TimeSeries simulate_ar1(const Ar1Params& params, std::size_t n, std::uint64_t seed);

/// Seed of independent stream `index` derived from `master` (splitmix64).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

struct MonteCarloOptions {
  /// Worker threads; 0 means hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
  /// Rank each cell against every reliable (outside-COI) surrogate cell at the
  /// same scale instead of the same cell only.
  bool pool_time = false;
};

/// Per-cell surrogate ranks and the one-sided significance mask.
struct SignificanceField {
  /// Fraction of surrogate r2 values strictly below the observed r2.
  Matrix<double> percentile;
  /// significant(j, u) == (percentile(j, u) >= 1 - alpha)
  Matrix<std::uint8_t> significant;
  double alpha = 0.05;
  std::size_t n_surrogates = 0;
  std::uint64_t seed = 0;
  bool pooled = false;
};

inline constexpr std::size_t kMinSurrogates = 100;

/// Red-noise Monte Carlo test of `observed`. Surrogate k uses streams
/// (seed, 2k) and (seed, 2k+1) for x and y.
SignificanceField mc_significance(const TimeSeries& x, const TimeSeries& y,
                                  const CoherenceField& observed, std::size_t n_surrogates,
                                  double alpha, std::uint64_t seed,
                                  const MonteCarloOptions& options = {});

/// Fraction of reliable (outside-COI) cells marked significant.
double significant_fraction(const SignificanceField& sig, const CoherenceField& field);

}  // namespace wavecoh
