#include "wavecoh/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavecoh {

namespace {

constexpr double kPi = std::numbers::pi;

void normalize(std::vector<double>& taps) {
  double sum = 0.0;
  for (double t : taps) sum += t;
  for (double& t : taps) t /= sum;
}

void check_params(const SmoothingParams& p) {
  if (!(p.time_sigma >= 0.0) || !(p.time_truncation > 0.0) || !(p.scale_window >= 0.0) ||
      !std::isfinite(p.time_sigma) || !std::isfinite(p.time_truncation) ||
      !std::isfinite(p.scale_window)) {
    throw std::invalid_argument("smoothing parameters must be finite and non-negative");
  }
}

}  // namespace

std::vector<double> time_kernel(double scale, double dt, const SmoothingParams& params) {
  check_params(params);
  const double sigma = params.time_sigma * scale;
  const auto half = static_cast<long>(std::floor(params.time_truncation * sigma / dt));
  if (half <= 0) return {1.0};
  std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
  for (long m = -half; m <= half; ++m) {
    const double t = static_cast<double>(m) * dt / sigma;
    taps[static_cast<std::size_t>(m + half)] = std::exp(-0.5 * t * t);
  }
  normalize(taps);
  return taps;
}

std::vector<double> scale_kernel(double dj, const SmoothingParams& params) {
  check_params(params);
  // Exact overlap of a boxcar of width scale_window/dj rows with unit row cells.
  const double half = 0.5 * params.scale_window / dj;
  if (half <= 0.5) return {1.0};
  const auto reach = static_cast<long>(std::ceil(half - 0.5));
  std::vector<double> taps;
  for (long k = -reach; k <= reach; ++k) {
    const double lo = std::max(static_cast<double>(k) - 0.5, -half);
    const double hi = std::min(static_cast<double>(k) + 0.5, half);
    taps.push_back(std::max(0.0, hi - lo));
  }
  normalize(taps);
  return taps;
}

struct Smoother::Kernels {
  // Row j: DCT-domain multiplier of the time kernel at scale j, with the 1/(2N)
  // inverse-transform normalization folded in.
  Matrix<double> time_response;
  std::vector<double> scale_taps;
  bool time_identity = true;
};

Smoother::Smoother(const ScaleGrid& grid, std::size_t n, double dt, SmoothingParams params)
    : params_(params), rows_(grid.size()), cols_(n), dct_(n), column_(grid.size()) {
  check_params(params);
  if (n == 0 || grid.size() == 0) throw std::invalid_argument("empty smoothing domain");

  auto kernels = std::make_shared<Kernels>();
  kernels->scale_taps = scale_kernel(grid.dj, params);
  kernels->time_response = Matrix<double>(rows_, n);

  // cos(pi q / n) for q in [0, 2n), indexed by (k m) mod 2n.
  const std::size_t period = 2 * n;
  std::vector<double> cosines(period);
  for (std::size_t q = 0; q < period; ++q) {
    cosines[q] = std::cos(kPi * static_cast<double>(q) / static_cast<double>(n));
  }
  const double inv = 1.0 / static_cast<double>(period);
  for (std::size_t j = 0; j < rows_; ++j) {
    const auto taps = time_kernel(grid.scales[j], dt, params);
    if (taps.size() > 1) kernels->time_identity = false;
    const std::size_t half = taps.size() / 2;
    auto row = kernels->time_response.row(j);
    for (std::size_t k = 0; k < n; ++k) {
      double sum = taps[half];
      std::size_t phase = 0;
      for (std::size_t m = 1; m <= half; ++m) {
        phase += k;
        if (phase >= period) phase %= period;
        sum += 2.0 * taps[half + m] * cosines[phase];
      }
      row[k] = sum * inv;
    }
  }
  if (kernels->time_identity && kernels->scale_taps.size() == 1) {
    throw std::invalid_argument("smoothing reduces to the identity; coherence would be 1 everywhere");
  }
  kernels_ = std::move(kernels);
}

void Smoother::smooth_time(Matrix<double>& field) {
  if (kernels_->time_identity) return;
  auto buf = dct_.data();
  for (std::size_t j = 0; j < rows_; ++j) {
    auto row = field.row(j);
    std::copy(row.begin(), row.end(), buf.begin());
    dct_.forward();
    auto response = kernels_->time_response.row(j);
    for (std::size_t k = 0; k < cols_; ++k) buf[k] *= response[k];
    dct_.backward();
    std::copy(buf.begin(), buf.end(), row.begin());
  }
}

void Smoother::smooth_scale(Matrix<double>& field) {
  const auto& taps = kernels_->scale_taps;
  if (taps.size() == 1) return;
  const long reach = static_cast<long>(taps.size() / 2);
  const long rows = static_cast<long>(rows_);
  for (std::size_t u = 0; u < cols_; ++u) {
    for (std::size_t j = 0; j < rows_; ++j) column_[j] = field(j, u);
    for (long j = 0; j < rows; ++j) {
      double sum = 0.0;
      double weight = 0.0;
      for (long k = -reach; k <= reach; ++k) {
        const long r = j + k;
        if (r < 0 || r >= rows) continue;
        const double w = taps[static_cast<std::size_t>(k + reach)];
        sum += w * column_[static_cast<std::size_t>(r)];
        weight += w;
      }
      field(static_cast<std::size_t>(j), u) = sum / weight;
    }
  }
}

void Smoother::apply(Matrix<double>& field) {
  if (field.rows() != rows_ || field.cols() != cols_) {
    throw std::invalid_argument("field dimensions do not match the smoothing grid");
  }
  smooth_time(field);
  smooth_scale(field);
}

Matrix<std::complex<double>> Smoother::apply(const Matrix<std::complex<double>>& field) {
  Matrix<double> re(field.rows(), field.cols());
  Matrix<double> im(field.rows(), field.cols());
  for (std::size_t i = 0; i < field.size(); ++i) {
    re.values()[i] = field.values()[i].real();
    im.values()[i] = field.values()[i].imag();
  }
  apply(re);
  apply(im);
  Matrix<std::complex<double>> out(field.rows(), field.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = {re.values()[i], im.values()[i]};
  return out;
}

Matrix<std::complex<double>> smooth(const Matrix<std::complex<double>>& field,
                                    const ScaleGrid& grid, double dt,
                                    const SmoothingParams& params) {
  Smoother smoother(grid, field.cols(), dt, params);
  return smoother.apply(field);
}

Matrix<double> CrossMatrix::power() const {
  Matrix<double> out(coefficients.rows(), coefficients.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = std::abs(coefficients.values()[i]);
  return out;
}

CrossMatrix xwt(const CwtMatrix& wx, const CwtMatrix& wy) {
  if (!wx.coefficients.same_shape(wy.coefficients) || wx.dt != wy.dt ||
      wx.grid.scales != wy.grid.scales) {
    throw std::invalid_argument("xwt: transforms are on different grids");
  }
  CrossMatrix out;
  out.coefficients = Matrix<std::complex<double>>(wx.scales(), wx.length());
  for (std::size_t i = 0; i < out.coefficients.size(); ++i) {
    out.coefficients.values()[i] = wx.coefficients.values()[i] * std::conj(wy.coefficients.values()[i]);
  }
  out.grid = wx.grid;
  out.dt = wx.dt;
  out.coi = wx.coi;
  return out;
}

CoherenceEngine::CoherenceEngine(std::size_t n, double dt, const ScaleGrid& grid,
                                 const MorletParams& morlet, const SmoothingParams& smoothing)
    : transform_(n, dt, grid, morlet), smoother_(grid, n, dt, smoothing), smoothing_(smoothing) {}

void CoherenceEngine::compute(std::span<const double> x, std::span<const double> y) {
  transform_.transform_into(x, wx_);
  transform_.transform_into(y, wy_);
  const std::size_t rows = wx_.rows();
  const std::size_t cols = wx_.cols();
  if (sxx_.rows() != rows || sxx_.cols() != cols) {
    cross_re_ = cross_im_ = sxx_ = syy_ = Matrix<double>(rows, cols);
  }
  const auto& scales = transform_.grid().scales;
  for (std::size_t j = 0; j < rows; ++j) {
    const double inv_s = 1.0 / scales[j];
    auto a = wx_.row(j);
    auto b = wy_.row(j);
    auto cre = cross_re_.row(j);
    auto cim = cross_im_.row(j);
    auto pxx = sxx_.row(j);
    auto pyy = syy_.row(j);
    for (std::size_t u = 0; u < cols; ++u) {
      const double xr = a[u].real();
      const double xi = a[u].imag();
      const double yr = b[u].real();
      const double yi = b[u].imag();
      // Same expressions as the auto-spectra so that x == y gives bit-identical fields.
      cre[u] = (xr * yr + xi * yi) * inv_s;
      cim[u] = (xi * yr - xr * yi) * inv_s;
      pxx[u] = (xr * xr + xi * xi) * inv_s;
      pyy[u] = (yr * yr + yi * yi) * inv_s;
    }
  }
  smoother_.apply(cross_re_);
  smoother_.apply(cross_im_);
  smoother_.apply(sxx_);
  smoother_.apply(syy_);
}

namespace {

struct Floors {
  double x;
  double y;
};

Floors floors(const Matrix<double>& sxx, const Matrix<double>& syy) {
  const auto mx = std::max_element(sxx.values().begin(), sxx.values().end());
  const auto my = std::max_element(syy.values().begin(), syy.values().end());
  return {kDegenerateFloor * std::max(0.0, *mx), kDegenerateFloor * std::max(0.0, *my)};
}

}  // namespace

void CoherenceEngine::coherence_into(std::span<const double> x, std::span<const double> y,
                                     Matrix<double>& r2) {
  compute(x, y);
  if (!r2.same_shape(sxx_)) r2 = Matrix<double>(sxx_.rows(), sxx_.cols());
  const auto floor = floors(sxx_, syy_);
  for (std::size_t i = 0; i < r2.size(); ++i) {
    const double a = sxx_.values()[i];
    const double b = syy_.values()[i];
    if (!(a > floor.x) || !(b > floor.y)) {
      r2.values()[i] = 0.0;
      continue;
    }
    const double re = cross_re_.values()[i];
    const double im = cross_im_.values()[i];
    r2.values()[i] = (re * re + im * im) / (a * b);
  }
}

CoherenceField CoherenceEngine::operator()(std::span<const double> x, std::span<const double> y) {
  CoherenceField field;
  coherence_into(x, y, field.r2);
  const std::size_t rows = sxx_.rows();
  const std::size_t cols = sxx_.cols();
  field.phase = Matrix<double>(rows, cols);
  field.degenerate = Matrix<std::uint8_t>(rows, cols);
  const auto floor = floors(sxx_, syy_);
  for (std::size_t i = 0; i < field.r2.size(); ++i) {
    if (!(sxx_.values()[i] > floor.x) || !(syy_.values()[i] > floor.y)) {
      field.degenerate.values()[i] = 1;
      continue;
    }
    double ph = std::atan2(cross_im_.values()[i], cross_re_.values()[i]);
    if (ph <= -kPi) ph = kPi;
    field.phase.values()[i] = ph;
  }
  field.sxx = sxx_;
  field.syy = syy_;
  field.grid = transform_.grid();
  field.dt = transform_.dt();
  field.coi = coi(cols, field.dt, transform_.morlet());
  field.morlet = transform_.morlet();
  field.smoothing = smoothing_;
  return field;
}

CoherenceField wct(const TimeSeries& x, const TimeSeries& y, const ScaleGrid& grid,
                   const MorletParams& morlet, const SmoothingParams& smoothing) {
  if (x.size() != y.size() || x.dt != y.dt) {
    throw std::invalid_argument("wct: series are not aligned (length or dt differ)");
  }
  CoherenceEngine engine(x.size(), x.dt, grid, morlet, smoothing);
  return engine(x.values, y.values);
}

Matrix<double> phase_difference(const CoherenceField& field) { return field.phase; }

double lead_time(double phase, double scale, const MorletParams& params) {
  return phase / (2.0 * kPi) * params.period_factor * scale;
}

}  // namespace wavecoh
