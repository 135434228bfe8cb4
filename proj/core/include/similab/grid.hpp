#pragma once

#include <cstddef>
#include <stdexcept>

namespace similab {

/// Uniform 1-D grid: origin, origin + spacing, ..., origin + (count-1)*spacing.
struct UniformGrid {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 0;

  double at(std::size_t i) const { return origin + spacing * static_cast<double>(i); }
  double back() const { return at(count - 1); }

  static UniformGrid symmetric(double half_width, std::size_t n) {
    if (n < 2 || !(half_width > 0.0)) throw std::invalid_argument("symmetric grid needs n >= 2 and half_width > 0");
    return {-half_width, 2.0 * half_width / static_cast<double>(n - 1), n};
  }
};

}  // namespace similab
