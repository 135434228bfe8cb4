#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

// Closed-form monomial coefficients of the K_max = 2 cubic projection,
// d_k = (1/sqrt(3 pi)) * sum coeff * u_l u_m u_n over l <= m <= n.
// Derived symbolically from Hermite triple integrals. Note the u_2^3 entry of
// d_0 is -sqrt2/18.
namespace golden {

struct Monomial {
  int k, l, m, n;
  double coeff;
};

inline std::vector<Monomial> three_mode_cubic() {
  const double r2 = std::numbers::sqrt2;
  return {
      {0, 0, 0, 0, 0.5},        {0, 0, 0, 2, -r2 / 2.0}, {0, 0, 1, 1, 0.5},       {0, 0, 2, 2, 0.5},
      {0, 2, 2, 2, -r2 / 18.0}, {1, 0, 0, 1, 0.5},       {1, 1, 1, 1, 1.0 / 6.0}, {1, 1, 2, 2, 1.0 / 6.0},
      {2, 0, 0, 0, -r2 / 6.0},  {2, 0, 0, 2, 0.5},       {2, 0, 2, 2, -r2 / 6.0}, {2, 1, 1, 2, 1.0 / 6.0},
      {2, 2, 2, 2, 5.0 / 54.0},
  };
}

inline double cubic_scale() { return 1.0 / std::sqrt(3.0 * std::numbers::pi); }

}  // namespace golden
