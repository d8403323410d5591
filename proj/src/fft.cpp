#include "alab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numeric>
#include <utility>

#include "alab/error.hpp"

namespace alab {
namespace {
// FFTW planning is not thread safe; execution of an existing plan is.
std::mutex g_plan_mutex;

void execute(void* plan, std::span<std::complex<double>> data, std::size_t expected) {
  if (data.size() != expected) throw Error("dimension mismatch", "fft buffer size");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan), p, p);
}
}  // namespace

Fft::Fft(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error("dimension mismatch", "fft needs at least one axis");
  size_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                          [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
  std::vector<std::complex<double>> scratch(size_);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(g_plan_mutex);
  forward_plan_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p, FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p, FFTW_BACKWARD, flags);
}

Fft::~Fft() {
  std::lock_guard lock(g_plan_mutex);
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

Fft::Fft(Fft&& other) noexcept
    : dims_(std::move(other.dims_)),
      size_(other.size_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    std::swap(dims_, other.dims_);
    std::swap(size_, other.size_);
    std::swap(forward_plan_, other.forward_plan_);
    std::swap(backward_plan_, other.backward_plan_);
  }
  return *this;
}

void Fft::forward(std::span<std::complex<double>> data) const { execute(forward_plan_, data, size_); }
void Fft::backward(std::span<std::complex<double>> data) const { execute(backward_plan_, data, size_); }

}  // namespace alab
