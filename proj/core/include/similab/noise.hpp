#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "similab/grid.hpp"
#include "similab/rng.hpp"

namespace similab {

/// Mode amplitudes b_0..b_K of the Q-Wiener noise sum_k b_k w_k(tau) e_k(xi).
struct NoiseSpectrum {
  std::vector<double> b;
  bool conservative = false;

  NoiseSpectrum() = default;
  NoiseSpectrum(std::vector<double> amplitudes, bool conservative_flag = false);

  std::size_t modes() const { return b.size(); }
  double at(std::size_t k) const { return k < b.size() ? b[k] : 0.0; }
  /// Throws std::invalid_argument on non-finite entries or b_0 != 0 when conservative.
  void validate() const;
};

struct WienerSpec {
  std::size_t n_paths = 1;
  std::size_t n_steps = 1;
  std::size_t n_modes = 1;
  double dt = 1e-2;
  std::uint64_t seed = 0;
};

/// Materialized increments, laid out [path][mode][step].
class WienerEnsemble {
 public:
  explicit WienerEnsemble(const WienerSpec& spec);

  const WienerSpec& spec() const { return spec_; }
  double increment(std::size_t path, std::size_t mode, std::size_t step) const {
    return inc_[(path * spec_.n_modes + mode) * spec_.n_steps + step];
  }
  std::span<const double> increments(std::size_t path, std::size_t mode) const {
    return {inc_.data() + (path * spec_.n_modes + mode) * spec_.n_steps, spec_.n_steps};
  }
  /// w(t_0..t_n) with w(t_0) = 0; length n_steps + 1.
  std::vector<double> path(std::size_t path, std::size_t mode) const;

 private:
  WienerSpec spec_;
  std::vector<double> inc_;
};

WienerEnsemble sample_wiener(const WienerSpec& spec);

struct OuPath {
  double beta = 0.0;
  double dt = 0.0;
  std::vector<double> values;
};

/// Exact transition of dz = -beta z dt + dw driven by the increment dw of
/// variance dt: returns e^{-beta dt} z + sqrt(v/dt) dw with v the exact
/// transition variance.
double ou_step(double z, double beta, double dt, double dw);

/// z_0 = 0, then ou_step along the supplied increments.
OuPath ou_convolve(std::span<const double> dw, double beta, double dt);

/// e_k(xi_i) for k = 0..k_max tabulated on a grid, laid out [k][i].
struct ModeTable {
  int k_max = 0;
  UniformGrid grid;
  std::vector<double> values;

  ModeTable() = default;
  ModeTable(int k_max, const UniformGrid& grid);
  const double* mode(int k) const { return values.data() + static_cast<std::size_t>(k) * grid.count; }
};

/// Delta W(xi_i) = sum_k b_k dw_k e_k(xi_i) on the table's grid.
void qwiener_increment(const NoiseSpectrum& spectrum, std::span<const double> dw, const ModeTable& table,
                       std::span<double> out);
std::vector<double> qwiener_increment(const NoiseSpectrum& spectrum, std::span<const double> dw,
                                      const ModeTable& table);

}  // namespace similab
