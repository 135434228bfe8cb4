#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "similab/errors.hpp"
#include "similab/grid.hpp"

namespace similab {

/// Concentrations in the two pipes on a periodic grid [-L/2, L/2).
struct PipePair {
  double t = 0.0;
  UniformGrid x;
  std::vector<double> u1;
  std::vector<double> u2;
};

UniformGrid periodic_grid(double length, std::size_t n);
double pipe_mass(const PipePair& p);

/// Pipe state held as Fourier coefficients.  Both the shift and the exchange
/// are diagonal there, so a step costs one pass over the spectrum.
class PipeSpectrum {
 public:
  explicit PipeSpectrum(const PipePair& p);

  /// u1(x) <- u1(x - dw), u2(x) <- u2(x + dw), then (m, d) <- (m, d e^{-dt}).
  /// Throws IntegrationAbort when |dw| exceeds half the domain.
  void step(double dt, double dw);

  PipePair physical() const;
  double t() const { return t_; }
  double mass() const;
  /// Spatial variance of the mean field m = (u1 + u2)/2 per unit mass.
  double mean_variance() const;
  /// ||d / eta + dm/dx|| / ||dm/dx|| with d = (u1 - u2)/2, by Parseval.
  double slaving_deviation(double eta) const;

 private:
  UniformGrid x_;
  double t_ = 0.0;
  std::vector<std::complex<double>> m_, d_;  // mean and half-difference spectra
  double length() const { return x_.spacing * static_cast<double>(x_.count); }
};

/// Split step on physical fields; PipeSpectrum is the fast path for long runs.
PipePair step_pipes(const PipePair& state, double dt, double dw);

/// dT = eta o dw, d eta = -eta dt + dw, Heun in the Stratonovich sense.
struct PseudoFrame {
  std::vector<double> t;
  std::vector<double> T;
  std::vector<double> eta;
  std::vector<double> dw;
  bool flagged = false;          ///< T <= 0 was reached
  std::size_t flagged_at = 0;    ///< first such step
  std::size_t reversals = 0;     ///< steps with T decreasing
};

/// Uses NoiseStream(seed, path) channel kAdvection, the same driver as the pipes.
PseudoFrame evolve_pseudo_frame(double dt, std::size_t n_steps, std::uint64_t seed, std::uint64_t path = 0,
                                double T0 = 1.0, double eta0 = 0.0);

struct MeanDiff {
  UniformGrid xi;
  std::vector<double> u;     ///< sqrt(T) * (u1 + u2)/2 at x = sqrt(T) xi
  std::vector<double> diff;  ///< (u1 - u2)/2 on the x grid, unscaled
};

MeanDiff mean_diff_transform(const PipePair& pair, double T, const UniformGrid& xi);

struct SlavingSample {
  double tau = 0.0;
  double eta = 0.0;
  PipePair pair;
};

struct SlavingReport {
  std::vector<double> tau;
  std::vector<double> deviation;
  std::size_t skipped = 0;
  double rate = 0.0;  ///< fitted log-slope of the deviation; 0 with fewer than 3 samples
};

/// Deviation of the scaled difference from -du/dxi at each sample with |eta| > eta_min.
SlavingReport check_slaving(const std::vector<SlavingSample>& trajectory, double eta_min = 0.1);

struct MixingOptions {
  double length = 160.0;
  std::size_t n_points = 1024;
  double dt = 1e-2;
  double horizon = 50.0;
  double T0 = 1.0;
  double eta0 = 0.0;
  double release_width = 1.0;  ///< std of the initial Gaussian in pipe 1
  std::size_t sample_every = 10;
  double eta_min = 0.1;
};

/// Per-path diagnostics at the sampled times.
struct MixingPath {
  std::vector<double> t, T, eta, variance, mass, deviation;
  std::vector<char> record;  ///< T at a new running maximum
  bool flagged = false;
  std::size_t reversals = 0;  ///< over all steps
  std::size_t steps = 0;
  PipePair final_state;
};

MixingPath simulate_mixing(const MixingOptions& opts, std::uint64_t seed, std::uint64_t path);

}  // namespace similab
