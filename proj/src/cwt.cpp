#include "wavecoh/cwt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace wavecoh {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(pi) * morlet_freq: the transform under F(w) = integral f(t) e^{-i w t} dt.
double morlet_spectrum(double a, double omega0) {
  return std::sqrt(kPi) * morlet_freq(a, omega0);
}

// Unit impulse on a long dt = 1 record, reconstructed over a scale range wide
// enough to cover every frequency up to Nyquist. Both constants reduce to double
// sums over (scale, frequency) by Parseval, so no transform is needed.
MorletParams calibrate(double omega0) {
  MorletParams p;
  p.omega0 = omega0;
  p.period_factor = 4.0 * kPi / (omega0 + std::sqrt(2.0 + omega0 * omega0));

  constexpr std::size_t m = std::size_t{1} << 14;
  constexpr double dj = 1.0 / 32.0;
  const double s_min = 0.25;
  const double s_max = 65536.0;
  const int steps = static_cast<int>(std::ceil(std::log2(s_max / s_min) / dj));

  double energy_sum = 0.0;
  double recon_sum = 0.0;
  for (std::size_t k = 1; k <= m / 2; ++k) {
    const double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
    // Only scales with |s w - omega0| < 12 contribute.
    const double lo = std::max(s_min, (omega0 - 12.0) / w);
    const double hi = std::min(s_max, (omega0 + 12.0) / w);
    if (lo > hi) continue;
    const int j_lo = std::max(0, static_cast<int>(std::floor(std::log2(lo / s_min) / dj)));
    const int j_hi = std::min(steps, static_cast<int>(std::ceil(std::log2(hi / s_min) / dj)));
    for (int j = j_lo; j <= j_hi; ++j) {
      const double s = s_min * std::exp2(j * dj);
      const double psi = morlet_spectrum(s * w, omega0);
      energy_sum += psi * psi;
      recon_sum += psi;
    }
  }
  p.admissibility_constant = dj * std::numbers::ln2 * energy_sum / static_cast<double>(m);
  p.reconstruction_constant = dj * recon_sum / static_cast<double>(m);
  return p;
}

std::size_t padded_size(std::size_t n) { return std::bit_ceil(2 * n); }

}  // namespace

MorletParams morlet_params(double omega0) {
  if (!(omega0 >= 5.0) || !std::isfinite(omega0)) {
    throw std::invalid_argument("omega0 must be >= 5 (got " + std::to_string(omega0) + ")");
  }
  static std::mutex mutex;
  static std::map<double, MorletParams> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(omega0);
  if (it == cache.end()) it = cache.emplace(omega0, calibrate(omega0)).first;
  return it->second;
}

std::complex<double> morlet_time(double t, double omega0) {
  const double envelope = std::pow(kPi, -0.25) * std::exp(-0.5 * t * t);
  return std::polar(envelope, omega0 * t);
}

double morlet_freq(double sw, double omega0) {
  if (sw <= 0.0) return 0.0;
  const double d = sw - omega0;
  return std::pow(kPi, -0.25) * std::numbers::sqrt2 * std::exp(-0.5 * d * d);
}

ScaleGrid ScaleGrid::make(double s0, double dj, int J) {
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw std::invalid_argument("s0 must be positive");
  if (!(dj > 0.0 && dj <= 0.5)) throw std::invalid_argument("dj must be in (0, 0.5]");
  if (J < 0) throw std::invalid_argument("J must be non-negative");
  ScaleGrid g;
  g.s0 = s0;
  g.dj = dj;
  g.J = J;
  g.scales.resize(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) g.scales[j] = s0 * std::exp2(j * dj);
  return g;
}

std::vector<double> ScaleGrid::periods(const MorletParams& params) const {
  std::vector<double> out(scales.size());
  std::transform(scales.begin(), scales.end(), out.begin(),
                 [&](double s) { return s * params.period_factor; });
  return out;
}

double ScaleGrid::index_of(double s) const { return std::log2(s / s0) / dj; }

ScaleGrid default_grid(std::size_t n, double dt) {
  const double s0 = 2.0 * dt;
  const double dj = 1.0 / 12.0;
  const int J = static_cast<int>(std::floor(std::log2(static_cast<double>(n) * dt / s0) / dj));
  return ScaleGrid::make(s0, dj, std::max(J, 0));
}

void check_grid(const ScaleGrid& grid, std::size_t n, double dt) {
  if (grid.scales.empty()) throw std::invalid_argument("empty scale grid");
  if (grid.scales.size() != static_cast<std::size_t>(grid.J) + 1) {
    throw std::invalid_argument("scale grid size does not match J");
  }
  for (std::size_t j = 1; j < grid.scales.size(); ++j) {
    if (!(grid.scales[j] > grid.scales[j - 1])) {
      throw std::invalid_argument("scales must be strictly increasing");
    }
  }
  if (n < kMinSeriesLength) {
    throw std::invalid_argument("series shorter than " + std::to_string(kMinSeriesLength));
  }
  // The default ladder reaches N dt; allow rounding at the top.
  if (grid.scales.back() > static_cast<double>(n) * dt * (1.0 + 1e-9)) {
    throw std::invalid_argument("largest scale exceeds the series duration");
  }
}

std::vector<double> coi(std::size_t n, double dt, const MorletParams& params) {
  std::vector<double> out(n);
  for (std::size_t u = 0; u < n; ++u) {
    const double left = static_cast<double>(u) + 0.5;
    const double right = static_cast<double>(n - 1 - u) + 0.5;
    out[u] = dt * std::min(left, right) / params.efolding_factor;
  }
  return out;
}

WaveletTransform::WaveletTransform(std::size_t n, double dt, ScaleGrid grid, MorletParams params)
    : n_(n),
      dt_(dt),
      grid_(std::move(grid)),
      params_(params),
      coi_(coi(n, dt, params)),
      fft_(padded_size(n)) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  check_grid(grid_, n, dt);

  const std::size_t m = fft_.size();
  auto response = std::make_shared<Matrix<double>>(grid_.size(), m);
  const double w_step = 2.0 * kPi / (static_cast<double>(m) * dt);
  const double w_alias = 2.0 * kPi / dt;
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    const double s = grid_.scales[j];
    const double norm = std::sqrt(kPi * s);
    // Aliases beyond |s w - omega0| > 40 vanish in double precision.
    const int images = static_cast<int>(std::ceil((params.omega0 + 40.0) / (s * w_alias))) + 1;
    auto row = response->row(j);
    for (std::size_t k = 0; k < m; ++k) {
      const double w = w_step * static_cast<double>(k <= m / 2 ? static_cast<long>(k)
                                                               : static_cast<long>(k) -
                                                                     static_cast<long>(m));
      double sum = 0.0;
      for (int img = -images; img <= images; ++img) {
        sum += morlet_freq(s * (w + img * w_alias), params.omega0);
      }
      row[k] = norm * sum;
    }
  }
  response_ = std::move(response);
}

void WaveletTransform::transform_into(std::span<const double> x,
                                      Matrix<std::complex<double>>& out) {
  if (x.size() != n_) {
    throw std::invalid_argument("series length " + std::to_string(x.size()) +
                                " does not match transform length " + std::to_string(n_));
  }
  if (out.rows() != grid_.size() || out.cols() != n_) {
    out = Matrix<std::complex<double>>(grid_.size(), n_);
  }
  const std::size_t m = fft_.size();
  auto buf = fft_.data();
  std::fill(buf.begin(), buf.end(), std::complex<double>{});
  std::copy(x.begin(), x.end(), buf.begin());
  fft_.forward();
  const std::vector<std::complex<double>> spectrum(buf.begin(), buf.end());

  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    auto resp = response_->row(j);
    for (std::size_t k = 0; k < m; ++k) buf[k] = spectrum[k] * (resp[k] * inv_m);
    fft_.backward();
    auto dst = out.row(j);
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n_), dst.begin());
  }
}

CwtMatrix WaveletTransform::operator()(std::span<const double> x) {
  CwtMatrix w;
  transform_into(x, w.coefficients);
  w.grid = grid_;
  w.dt = dt_;
  w.coi = coi_;
  w.morlet = params_;
  return w;
}

CwtMatrix cwt(std::span<const double> x, double dt, const ScaleGrid& grid,
              const MorletParams& params) {
  WaveletTransform transform(x.size(), dt, grid, params);
  return transform(x);
}

CwtMatrix cwt(const TimeSeries& x, const ScaleGrid& grid, const MorletParams& params) {
  return cwt(x.values, x.dt, grid, params);
}

double energy(const CwtMatrix& w) { return energy(w, 0, w.length()); }

double energy(const CwtMatrix& w, std::size_t begin, std::size_t end) {
  end = std::min(end, w.length());
  double total = 0.0;
  for (std::size_t j = 0; j < w.scales(); ++j) {
    auto row = w.coefficients.row(j);
    double row_sum = 0.0;
    for (std::size_t u = begin; u < end; ++u) row_sum += std::norm(row[u]);
    total += row_sum / w.grid.scales[j];
  }
  return total * w.dt * w.grid.dj * std::numbers::ln2 / w.morlet.admissibility_constant;
}

TimeSeries reconstruct(const CwtMatrix& w, const MorletParams& params) {
  std::vector<double> values(w.length(), 0.0);
  for (std::size_t j = 0; j < w.scales(); ++j) {
    const double weight = 1.0 / std::sqrt(w.grid.scales[j]);
    auto row = w.coefficients.row(j);
    for (std::size_t u = 0; u < values.size(); ++u) values[u] += row[u].real() * weight;
  }
  const double factor = w.grid.dj / params.reconstruction_constant;
  for (double& v : values) v *= factor;
  TimeSeries out;
  out.name = "reconstruction";
  out.values = std::move(values);
  out.dt = w.dt;
  return out;
}

}  // namespace wavecoh
