#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "wavecoh/cwt.hpp"
#include "wavecoh/fft.hpp"
#include "wavecoh/matrix.hpp"

namespace wavecoh {

/// Time smoothing is a Gaussian with standard deviation time_sigma * s,
/// truncated at +/- time_truncation standard deviations. Scale smoothing is a
/// boxcar spanning scale_window octaves. Both kernels have unit sum.
struct SmoothingParams {
  double time_sigma = 1.0;
  double time_truncation = 4.0;
  double scale_window = 0.6;
};

/// Discrete taps of the time kernel at scale s: index m is offset m - half.
std::vector<double> time_kernel(double scale, double dt, const SmoothingParams& params);
/// Boxcar taps over scale rows; index m is offset m - half.
std::vector<double> scale_kernel(double dj, const SmoothingParams& params);

/// Linear smoothing operator for one grid and series length. Rows are
/// convolved in time with reflection at the edges, then columns are convolved
/// across scales with the boxcar renormalized at the ends of the grid.
/// Throws std::invalid_argument if the parameters reduce to the identity.
/// Copies share kernels and own their workspace.
class Smoother {
public:
  Smoother(const ScaleGrid& grid, std::size_t n, double dt, SmoothingParams params = {});

  void apply(Matrix<double>& field);
  Matrix<std::complex<double>> apply(const Matrix<std::complex<double>>& field);

  const SmoothingParams& params() const noexcept { return params_; }

private:
  struct Kernels;
  void smooth_time(Matrix<double>& field);
  void smooth_scale(Matrix<double>& field);

  SmoothingParams params_;
  std::size_t rows_;
  std::size_t cols_;
  std::shared_ptr<const Kernels> kernels_;
  CosineTransform dct_;
  std::vector<double> column_;
};

Matrix<std::complex<double>> smooth(const Matrix<std::complex<double>>& field,
                                    const ScaleGrid& grid, double dt,
                                    const SmoothingParams& params = {});

/// Cross-wavelet transform W_x conj(W_y).
struct CrossMatrix {
  Matrix<std::complex<double>> coefficients;
  ScaleGrid grid;
  double dt = 1.0;
  std::vector<double> coi;

  /// Cross-wavelet power |W_xy|.
  Matrix<double> power() const;
};

CrossMatrix xwt(const CwtMatrix& wx, const CwtMatrix& wy);

/// Squared coherence and phase on the grid. Positive phase means x leads y.
struct CoherenceField {
  Matrix<double> r2;
  Matrix<double> phase;           // radians in (-pi, pi]
  Matrix<double> sxx;             // S(|W_x|^2 / s)
  Matrix<double> syy;             // S(|W_y|^2 / s)
  Matrix<std::uint8_t> degenerate;  // 1 where a smoothed auto-spectrum fell below the floor
  ScaleGrid grid;
  double dt = 1.0;
  std::vector<double> coi;
  MorletParams morlet;
  SmoothingParams smoothing;

  bool reliable(std::size_t j, std::size_t u) const { return grid.scales[j] <= coi[u]; }
};

/// Relative floor on the smoothed auto-spectra below which a cell is degenerate.
inline constexpr double kDegenerateFloor = 1e-12;

/// Computes coherence for many pairs of the same length and grid.
/// Copies share precomputed kernels; use one copy per thread.
class CoherenceEngine {
public:
  CoherenceEngine(std::size_t n, double dt, const ScaleGrid& grid, const MorletParams& morlet,
                  const SmoothingParams& smoothing = {});

  CoherenceField operator()(std::span<const double> x, std::span<const double> y);
  /// Only r2, written into `r2`; avoids the bookkeeping of a full field.
  void coherence_into(std::span<const double> x, std::span<const double> y, Matrix<double>& r2);

  std::size_t length() const noexcept { return transform_.length(); }

private:
  void compute(std::span<const double> x, std::span<const double> y);

  WaveletTransform transform_;
  Smoother smoother_;
  SmoothingParams smoothing_;
  Matrix<std::complex<double>> wx_;
  Matrix<std::complex<double>> wy_;
  Matrix<double> cross_re_;
  Matrix<double> cross_im_;
  Matrix<double> sxx_;
  Matrix<double> syy_;
};

CoherenceField wct(const TimeSeries& x, const TimeSeries& y, const ScaleGrid& grid,
                   const MorletParams& morlet, const SmoothingParams& smoothing = {});

/// Four-quadrant phase of the smoothed cross-spectrum.
Matrix<double> phase_difference(const CoherenceField& field);

/// Lead in weeks implied by `phase` at `scale`: phase / (2 pi) * Fourier period.
double lead_time(double phase, double scale, const MorletParams& params);

}  // namespace wavecoh
