#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "phaseprior/error.hpp"

namespace phaseprior {

using Complex = std::complex<double>;

/// Row-major 2-D grid of values. Index (row, col) maps to row * width + col.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(std::size_t height, std::size_t width, T fill = T{})
      : height_(height), width_(width), data_(height * width, fill) {}
  Grid(std::size_t height, std::size_t width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != height_ * width_) {
      throw InvalidDimension("grid data length does not match height*width");
    }
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * width_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * width_ + c]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  template <class U>
  bool same_shape(const Grid<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

/// Real-valued image plane (magnitude, normalized phase, grayscale pixels).
using RealPlane = Grid<double>;
/// Complex image, the reconstruction variable. Stored interleaved (re, im).
using ComplexImage = Grid<Complex>;

template <class A, class B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) throw InvalidDimension(what);
}

// Small vector-space helpers used throughout the solvers.

double norm(const ComplexImage& x);
double squared_norm(const ComplexImage& x);
/// <a, b> = sum conj(a_i) b_i
Complex inner(const ComplexImage& a, const ComplexImage& b);
bool all_finite(const ComplexImage& x);

RealPlane magnitude_plane(const ComplexImage& x);
/// arg(x) / 2pi with arg taken in (-pi, pi].
RealPlane normalized_phase_plane(const ComplexImage& x);
/// arg in (-pi, pi]; arg(0) = 0.
double principal_arg(Complex z);

}  // namespace phaseprior
