#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "phaseprior/grid.hpp"

namespace phaseprior::detail {

/// ||next - prev|| / ||next||; 0 when both vanish.
inline double relative_change(const ComplexImage& next, const ComplexImage& prev) {
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    diff += std::norm(next[i] - prev[i]);
    ref += std::norm(next[i]);
  }
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff / ref);
}

inline double effective_sigma_n(std::optional<double> override_value, double measured,
                                double floor) {
  return std::max(override_value.value_or(measured), floor);
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace phaseprior::detail
