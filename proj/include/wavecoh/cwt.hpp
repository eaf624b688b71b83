#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "wavecoh/fft.hpp"
#include "wavecoh/matrix.hpp"
#include "wavecoh/series.hpp"

namespace wavecoh {

/// Morlet wavelet constants. Build with morlet_params(), which validates omega0
/// and fills the calibrated constants.
struct MorletParams {
  double omega0 = 6.0;
  /// C_psi in ||x||^2 = (1/C_psi) * integral |W|^2 du ds / s^2.
  double admissibility_constant = 0.0;
  /// C_delta in x(u) = (dj / C_delta) * sum_j Re W(u, s_j) / sqrt(s_j).
  double reconstruction_constant = 0.0;
  double efolding_factor = std::numbers::sqrt2;
  /// Fourier period = period_factor * scale.
  double period_factor = 0.0;
};

/// Validated parameters with constants calibrated by reconstructing a unit
/// impulse. Results are cached per omega0. Requires omega0 >= 5.
MorletParams morlet_params(double omega0 = 6.0);

/// pi^{-1/4} e^{i omega0 t} e^{-t^2/2}
std::complex<double> morlet_time(double t, double omega0 = 6.0);

/// Frequency-domain image of the Morlet wavelet, analytic (zero for sw <= 0):
/// pi^{-1/4} sqrt(2) e^{-(sw - omega0)^2 / 2}. With this normalization
/// psi(t) = 1/(2 sqrt(pi)) * integral morlet_freq(w) e^{i w t} dw.
double morlet_freq(double sw, double omega0 = 6.0);

/// Dyadic scale ladder s_j = s0 * 2^{j dj}, j = 0..J. Scales are in weeks.
struct ScaleGrid {
  double s0 = 0.0;
  double dj = 0.0;
  int J = 0;
  std::vector<double> scales;

  static ScaleGrid make(double s0, double dj, int J);
  std::size_t size() const noexcept { return scales.size(); }
  std::vector<double> periods(const MorletParams& params) const;
  /// Fractional grid index of scale s (may lie outside [0, J]).
  double index_of(double s) const;
};

/// s0 = 2 dt, dj = 1/12, J = floor(log2(N dt / s0) / dj).
ScaleGrid default_grid(std::size_t n, double dt);

/// Throws std::invalid_argument unless the grid is usable for a series of n samples.
void check_grid(const ScaleGrid& grid, std::size_t n, double dt);

/// Cone of influence in scale units: dt * min(u + 1/2, N - 1 - u + 1/2) / efolding_factor.
std::vector<double> coi(std::size_t n, double dt, const MorletParams& params);

/// Complex coefficients, scales x time.
struct CwtMatrix {
  Matrix<std::complex<double>> coefficients;
  ScaleGrid grid;
  double dt = 1.0;
  std::vector<double> coi;
  MorletParams morlet;

  std::size_t scales() const noexcept { return coefficients.rows(); }
  std::size_t length() const noexcept { return coefficients.cols(); }
  /// True when scale row j at time u lies outside the cone of influence.
  bool reliable(std::size_t j, std::size_t u) const { return grid.scales[j] <= coi[u]; }
};

/// Reusable transform for a fixed (N, dt, grid, wavelet). The wavelet
/// responses are shared between copies; each copy owns its FFT workspace, so
/// give every thread its own copy.
class WaveletTransform {
public:
  WaveletTransform(std::size_t n, double dt, ScaleGrid grid, MorletParams params);

  std::size_t length() const noexcept { return n_; }
  std::size_t padded_length() const noexcept { return fft_.size(); }
  const ScaleGrid& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }
  const MorletParams& morlet() const noexcept { return params_; }

  CwtMatrix operator()(std::span<const double> x);
  /// Writes coefficients into `out`, resized to (J+1) x N if needed.
  void transform_into(std::span<const double> x, Matrix<std::complex<double>>& out);

private:
  std::size_t n_;
  double dt_;
  ScaleGrid grid_;
  MorletParams params_;
  std::vector<double> coi_;
  // Row j holds sqrt(pi s_j) * sum_m morlet_freq(s_j (w_k + 2 pi m / dt)), the
  // discrete-time response of the sampled wavelet, for each FFT bin k.
  std::shared_ptr<const Matrix<double>> response_;
  ComplexFft fft_;
};

/// Coefficients by frequency-domain multiplication on the series zero-padded
/// to the next power of two >= 2N.
CwtMatrix cwt(const TimeSeries& x, const ScaleGrid& grid, const MorletParams& params);
CwtMatrix cwt(std::span<const double> x, double dt, const ScaleGrid& grid,
              const MorletParams& params);

/// (1/C_psi) sum_j sum_u |W|^2 dt (dj ln 2) / s_j over all time points.
double energy(const CwtMatrix& w);
/// Same sum restricted to time indices [begin, end).
double energy(const CwtMatrix& w, std::size_t begin, std::size_t end);

/// Inverse transform from the real part of the scale sum.
TimeSeries reconstruct(const CwtMatrix& w, const MorletParams& params);

}  // namespace wavecoh
