#include "wavecoh/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace wavecoh {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct ComplexFft::Impl {
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t n) {
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_complex(n);
    if (buffer == nullptr) throw std::bad_alloc();
    const int len = static_cast<int>(n);
    forward = fftw_plan_dft_1d(len, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(len, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buffer);
  }
};

ComplexFft::ComplexFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>(n)) {}
ComplexFft::ComplexFft(const ComplexFft& other) : ComplexFft(other.n_) {}
ComplexFft& ComplexFft::operator=(const ComplexFft& other) {
  if (this != &other) *this = ComplexFft(other.n_);
  return *this;
}
ComplexFft::ComplexFft(ComplexFft&&) noexcept = default;
ComplexFft& ComplexFft::operator=(ComplexFft&&) noexcept = default;
ComplexFft::~ComplexFft() = default;

std::span<std::complex<double>> ComplexFft::data() noexcept {
  return {reinterpret_cast<std::complex<double>*>(impl_->buffer), n_};
}
void ComplexFft::forward() { fftw_execute(impl_->forward); }
void ComplexFft::backward() { fftw_execute(impl_->backward); }

struct CosineTransform::Impl {
  double* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t n) {
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_real(n);
    if (buffer == nullptr) throw std::bad_alloc();
    const int len = static_cast<int>(n);
    forward = fftw_plan_r2r_1d(len, buffer, buffer, FFTW_REDFT10, FFTW_ESTIMATE);
    backward = fftw_plan_r2r_1d(len, buffer, buffer, FFTW_REDFT01, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buffer);
  }
};

CosineTransform::CosineTransform(std::size_t n) : n_(n), impl_(std::make_unique<Impl>(n)) {}
CosineTransform::CosineTransform(const CosineTransform& other) : CosineTransform(other.n_) {}
CosineTransform& CosineTransform::operator=(const CosineTransform& other) {
  if (this != &other) *this = CosineTransform(other.n_);
  return *this;
}
CosineTransform::CosineTransform(CosineTransform&&) noexcept = default;
CosineTransform& CosineTransform::operator=(CosineTransform&&) noexcept = default;
CosineTransform::~CosineTransform() = default;

std::span<double> CosineTransform::data() noexcept { return {impl_->buffer, n_}; }
void CosineTransform::forward() { fftw_execute(impl_->forward); }
void CosineTransform::backward() { fftw_execute(impl_->backward); }

}  // namespace wavecoh
