#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "similab/errors.hpp"
#include "similab/grid.hpp"
#include "similab/noise.hpp"

namespace similab {

enum class Scheme { Similarity, Physical };

struct GridConfig {
  double half_width = 12.0;
  std::size_t n_points = 241;
  double dt = 1e-3;
  Scheme scheme = Scheme::Similarity;

  UniformGrid grid() const { return UniformGrid::symmetric(half_width, n_points); }
  double spacing() const { return 2.0 * half_width / static_cast<double>(n_points - 1); }
  /// Throws std::invalid_argument unless n_points >= 64, dt > 0 and dt <= 0.4 h^2.
  void validate() const;
};

struct BurgersState {
  double time = 0.0;           ///< tau for similarity grids, t for physical grids
  std::vector<double> values;  ///< Dirichlet: first and last entries stay 0
  double mass = 0.0;           ///< integral of the field, refreshed every step
  double forced_mass = 0.0;    ///< accumulated integral of the noise increments
};

double grid_mass(std::span<const double> values, double h);

/// Explicit Heun stepper on a uniform grid with homogeneous Dirichlet ends.
/// One instance per trajectory; the scratch buffers make it non-reentrant.
class GridSolver {
 public:
  explicit GridSolver(const GridConfig& cfg, int noise_modes = 9);

  const GridConfig& config() const { return cfg_; }
  const UniformGrid& grid() const { return grid_; }
  const ModeTable& modes() const { return table_; }

  /// Changes the step size, e.g. for a shortened final step; same bound as GridConfig.
  void set_step(double dt);

  BurgersState make_state(std::vector<double> values, double time) const;

  /// du = [u'' + xi u'/2 + u/2 - (u^2/2)'] dtau + dW, dW synthesized from dw.
  void step_burgers_similarity(BurgersState& s, const NoiseSpectrum& spectrum, std::span<const double> dw);
  /// du = [u'' + xi u'/2 + u/2 - u^3] dtau + dW.
  void step_rd_similarity(BurgersState& s, const NoiseSpectrum& spectrum, std::span<const double> dw);
  /// du = [u'' - (u^2/2)'] dt + noise_field (empty span: no forcing).
  void step_burgers_physical(BurgersState& s, std::span<const double> noise_field);

  /// Forcing increment on the physical grid at time t: the similarity-frame
  /// increment pulled back, t^{-1/2} sum_k b_k dw_k e_k(x / sqrt t).
  std::vector<double> physical_noise(const NoiseSpectrum& spectrum, std::span<const double> dw_tau, double t) const;

  /// Relative magnitude of the field next to the Dirichlet ends.
  double boundary_ratio(const BurgersState& s) const;

 private:
  enum class Kind { SimBurgers, SimCubic, PhysBurgers };
  void rhs(Kind kind, const std::vector<double>& u, std::vector<double>& f) const;
  void heun(Kind kind, BurgersState& s, std::span<const double> kick);

  GridConfig cfg_;
  UniformGrid grid_;
  ModeTable table_;
  std::vector<double> f0_, f1_, pred_, kick_;
  std::size_t steps_ = 0;
};

enum class NormKind { L2K, H1K, Linf };

/// Norms weighted by K = exp(xi^2/4); the weight is clipped beyond the
/// outermost node where |field| >= clip_rel * max|field|.
double weighted_norm(std::span<const double> field, const UniformGrid& grid, NormKind which, double clip_rel = 1e-6);

/// V = U exp(-1/2 cumulative integral of U), trapezoid rule from the left end.
std::vector<double> cole_hopf(std::span<const double> U, const UniformGrid& grid);

/// phi = integral |u1 - u2| for each paired sample.  Throws ContractViolation
/// if the first pair differs in mass by more than 1e-8.
std::vector<double> contraction_diagnostic(const std::vector<std::vector<double>>& path1,
                                           const std::vector<std::vector<double>>& path2, const UniformGrid& grid);

/// Stationary similarity-frame Burgers profile of mass M > 0:
/// exp(-xi^2/4) / (A - (sqrt(pi)/2)(1 + erf(xi/2))), A = sqrt(pi) / (1 - exp(-M/2)).
std::vector<double> stationary_burgers(double mass, const UniformGrid& grid);

}  // namespace similab
