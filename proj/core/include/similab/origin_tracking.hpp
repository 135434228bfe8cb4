#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "similab/errors.hpp"
#include "similab/noise.hpp"

namespace similab {

/// Thrown when a compensation would divide by a vanishing slow amplitude.
class DegenerateAmplitude : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Moving space origin X(T) = X(0) + (sqrt2 b_1 / a) W_1(T).
struct OriginPath {
  std::vector<double> T;
  std::vector<double> X;
  std::vector<double> dW;  ///< dW[n] drives T[n] -> T[n+1]
  double a = 0.0;
  double b1 = 0.0;
};

/// Real time against pseudo-time, t(T) = t0 + T + (2 b_2 / a) sum sqrt(T_mid) dW_2.
struct PseudoTimePath {
  std::vector<double> T;
  std::vector<double> t;
  std::vector<double> dW;
  double t0 = 0.0;
  double a = 0.0;
  double b2 = 0.0;
  std::size_t reversals = 0;  ///< intervals with t decreasing
};

/// Increments come from NoiseStream(seed, path) channel kOriginW1.
OriginPath build_origin_path(double a, double b1, std::span<const double> T_grid, std::uint64_t seed,
                             std::uint64_t path = 0, double X0 = 0.0);

/// Increments come from channel kPseudoW2.  T_grid must start at 0.
PseudoTimePath build_pseudotime_path(double t0, double a, double b2, std::span<const double> T_grid,
                                     std::uint64_t seed, std::uint64_t path = 0);

struct CompensationOptions {
  double a = 1.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double horizon = 5.0;  ///< in tau
  double dtau = 1e-2;
  double u1_0 = 0.0;
  double u2_0 = 0.0;
  double t0 = 1.0;  ///< real time at tau = 0, where T = 1
  bool compensation = true;
  std::size_t record_every = 1;
};

struct CompensatedPath {
  std::vector<double> tau, T, X, t, u0, u1, u2;
};

/// Integrates the first three modal equations in Hermite-function amplitudes
/// with u_0 = a held fixed and pseudo-time T = e^tau.  With compensation on,
/// X(T) and t(T) are built from the very increments that force u_1 and u_2,
/// so the forcing cancels step by step.  Mode 2 is driven by the reflection
/// of the t(T) driver, which keeps the + sign in t(T).
CompensatedPath simulate_compensated_modes(const CompensationOptions& opts, std::uint64_t seed, std::uint64_t path = 0);

}  // namespace similab
