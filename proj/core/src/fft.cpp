#include "phaseprior/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace phaseprior {

struct Fft2d::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  double scale = 1.0;

  Plans() = default;
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

// The FFTW planner is not thread-safe; only fftw_execute* is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const Fft2d::Plans> cached_plans(std::size_t h, std::size_t w) {
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Fft2d::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({h, w});
  if (it != cache.end()) return it->second;

  auto plans = std::make_shared<Fft2d::Plans>();
  const int rows = static_cast<int>(h);
  const int cols = static_cast<int>(w);
  auto* buf = fftw_alloc_complex(h * w);
  // FFTW_ESTIMATE gives the same plan on every run; FFTW_UNALIGNED lets the
  // plan execute on std::vector storage.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans->forward = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD, flags);
  plans->backward = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  plans->scale = 1.0 / std::sqrt(static_cast<double>(h * w));
  cache.emplace(std::make_pair(h, w), plans);
  return plans;
}

void run(fftw_plan plan, double scale, const ComplexImage& in, ComplexImage& out) {
  if (&in != &out) out = in;
  auto* data = reinterpret_cast<fftw_complex*>(out.storage().data());
  fftw_execute_dft(plan, data, data);
  for (auto& v : out) v *= scale;
}

}  // namespace

Fft2d::Fft2d(std::size_t height, std::size_t width) : height_(height), width_(width) {
  if (height == 0 || width == 0) throw InvalidDimension("FFT grid must be non-empty");
  plans_ = cached_plans(height, width);
}

void Fft2d::forward(const ComplexImage& in, ComplexImage& out) const {
  if (in.height() != height_ || in.width() != width_) {
    throw InvalidDimension("FFT input shape does not match the plan");
  }
  run(plans_->forward, plans_->scale, in, out);
}

void Fft2d::inverse(const ComplexImage& in, ComplexImage& out) const {
  if (in.height() != height_ || in.width() != width_) {
    throw InvalidDimension("FFT input shape does not match the plan");
  }
  run(plans_->backward, plans_->scale, in, out);
}

}  // namespace phaseprior
