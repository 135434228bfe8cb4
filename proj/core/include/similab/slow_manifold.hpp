#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "similab/noise.hpp"

namespace similab {

/// Three-mode normal-form coordinates U_0..U_2 and the OU memories
/// z_1 = Z^{-tau/2} w_1', z_2 = Z^{-tau} w_2'.
struct NormalFormState {
  std::array<double, 3> U{};
  std::array<double, 2> z{};
};

/// Weight tables of the nine-mode slow model.  Drift weights multiply b_k^2
/// for k = 1..8; volatility weights multiply a^2 b_k dw_k for k = 2, 4, 6, 8.
struct SlowModel {
  static constexpr std::array<std::array<int, 2>, 8> kDriftFractions{
      {{1, 2}, {1, 4}, {7, 54}, {19, 216}, {17, 270}, {47, 972}, {131, 3402}, {41, 1296}}};
  static constexpr std::array<double, 8> kDriftWeights{1.0 / 2,    1.0 / 4,    7.0 / 54,     19.0 / 216,
                                                       17.0 / 270, 47.0 / 972, 131.0 / 3402, 41.0 / 1296};
  // 1/sqrt2, -1/(2 sqrt6), sqrt5/27, -sqrt70/216
  static constexpr std::array<double, 4> kVolWeights{0.70710678118654752440, -0.20412414523193150818,
                                                     0.082817332499992210978, -0.038734260487688682777};
  static constexpr std::array<int, 4> kVolModes{2, 4, 6, 8};

  double a = 0.0;
  NoiseSpectrum spectrum;
};

class AmplitudeTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// u(U, z): the near-identity stochastic coordinate transform.  With
/// cubic_corrections = false only the linear memory terms b_k z_k remain.
std::array<double, 3> transform_U_to_u(const NormalFormState& s, const NoiseSpectrum& spectrum,
                                       bool cubic_corrections = true);

/// Inverse of transform_U_to_u by fixed-point iteration from U = u.
NormalFormState transform_u_to_U(const std::array<double, 3>& u, const std::array<double, 2>& z,
                                 const NoiseSpectrum& spectrum);

/// dU_i = drift_i dtau + sum_j noise[i][j] dw_j, with the memory values in
/// the noise-memory products taken from the state.
struct TransformedRhs {
  std::array<double, 3> drift{};
  std::array<std::array<double, 3>, 3> noise{};
};

TransformedRhs transformed_rhs(const NormalFormState& s, const NoiseSpectrum& spectrum);

enum class MemorySampling { StepStart, Midpoint };

struct NormalFormPath {
  std::vector<double> tau;
  std::vector<NormalFormState> states;
};

/// Heun (Stratonovich) integration of the transformed system; memories move
/// by the exact OU update from the same increments.
NormalFormPath simulate_normal_form(const NormalFormState& s0, const NoiseSpectrum& spectrum, std::size_t n_steps,
                                    double dtau, const NoiseStream& noise, std::size_t record_every = 1,
                                    MemorySampling sampling = MemorySampling::StepStart);

/// alpha = sum_k w_k b_k^2 / sqrt(3 pi), k = 1..8.
double slow_drift_exponent(const NoiseSpectrum& spectrum);

/// Heun path of the nine-mode slow model amplitude; entry i is a(i * record_every * dtau).
std::vector<double> simulate_slow(double a0, const NoiseSpectrum& spectrum, double horizon, double dtau,
                                  std::uint64_t seed, std::uint64_t path = 0, std::size_t record_every = 1);

/// Closed-form zero-noise slow decay a0 / sqrt(1 + a0^2 tau / sqrt(3 pi)).
double cubic_decay(double a0, double tau);

/// Slow-manifold shape u_0..u_8 in terms of a and memories z_k (index k, z[0] unused).
std::array<double, 9> slow_manifold_shape(double a, std::span<const double> z, const NoiseSpectrum& spectrum);

struct ResidualOptions {
  double noise_exponent = 2.0;    ///< b scales as eps^noise_exponent, U as eps
  bool cubic_corrections = true;  ///< false: control run with the cubic part of the transform removed
  std::size_t samples = 16;
  std::uint64_t seed = 0xc0ffee;
};

/// Largest mismatch between d/dtau of u(U, z) along the transformed dynamics
/// (memories and noise rates frozen at sample values) and the projected
/// three-mode system evaluated at u.
double residual_order_check(double eps, const ResidualOptions& opts = {});

}  // namespace similab
