#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace wavecoh {

/// In-place complex FFT of fixed length with its own aligned buffer.
/// Instances are not shareable between threads; copying plans a fresh instance.
class ComplexFft {
public:
  explicit ComplexFft(std::size_t n);
  ComplexFft(const ComplexFft& other);
  ComplexFft& operator=(const ComplexFft& other);
  ComplexFft(ComplexFft&&) noexcept;
  ComplexFft& operator=(ComplexFft&&) noexcept;
  ~ComplexFft();

  std::size_t size() const noexcept { return n_; }
  std::span<std::complex<double>> data() noexcept;

  void forward();   // sum x_n e^{-2 pi i k n / N}
  void backward();  // unnormalized inverse

private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

/// DCT-II / DCT-III pair on a length-n real buffer. Diagonalizes convolution of a
/// half-sample symmetric extension with an even kernel. backward(forward(x)) == 2n * x.
class CosineTransform {
public:
  explicit CosineTransform(std::size_t n);
  CosineTransform(const CosineTransform& other);
  CosineTransform& operator=(const CosineTransform& other);
  CosineTransform(CosineTransform&&) noexcept;
  CosineTransform& operator=(CosineTransform&&) noexcept;
  ~CosineTransform();

  std::size_t size() const noexcept { return n_; }
  std::span<double> data() noexcept;

  void forward();
  void backward();

private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wavecoh
