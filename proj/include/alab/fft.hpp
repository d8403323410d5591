#pragma once

#include <complex>
#include <span>
#include <vector>

namespace alab {

// In-place multidimensional complex FFT (row-major, last index fastest).
//   forward:  X_k = sum_n x_n exp(-2 pi i k.n / N)
//   backward: x_n = sum_k X_k exp(+2 pi i k.n / N)   (unnormalized)
class Fft {
 public:
  explicit Fft(std::vector<int> dims);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

  std::size_t size() const noexcept { return size_; }
  const std::vector<int>& dims() const noexcept { return dims_; }

 private:
  std::vector<int> dims_;
  std::size_t size_ = 0;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace alab
