#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "similab/errors.hpp"
#include "similab/hermite.hpp"
#include "similab/noise.hpp"

namespace similab {

struct ModalState {
  double tau = 0.0;
  std::vector<double> u;
};

/// C[k][l][m][n] = integral e_k e_l e_m e_n K dxi, stored densely.  A compact
/// list of the nonzero entries with l <= m <= n drives contraction.
class CubicTensor {
 public:
  CubicTensor() = default;
  explicit CubicTensor(const BasisSpec& basis);

  int max_mode() const { return k_max_; }
  int modes() const { return k_max_ + 1; }
  double operator()(int k, int l, int m, int n) const {
    const std::size_t d = static_cast<std::size_t>(modes());
    return c_[((k * d + l) * d + m) * d + n];
  }

  /// d_k = sum_{l,m,n} C[k][l][m][n] u_l u_m u_n for k = 0..K_max.
  void contract(const double* u, double* d) const;

  /// Coefficient of the monomial u_l u_m u_n (l <= m <= n) in d_k.
  double monomial(int k, int l, int m, int n) const;

 private:
  struct Entry {
    int k, l, m, n;
    double coeff;  // tensor value times the number of distinct (l,m,n) orderings
  };
  int k_max_ = 0;
  std::vector<double> c_;
  std::vector<Entry> entries_;
};

CubicTensor cubic_projection_tensor(const BasisSpec& basis);

struct ModalRhs {
  std::vector<double> drift;
  std::vector<double> diffusion;  ///< additive: mode k is driven by diffusion[k] dw_k
};

/// drift_k = -(k/2) u_k - [reaction_on] d_k(u); diffusion_k = b_k.
ModalRhs modal_rhs(const ModalState& state, const NoiseSpectrum& spectrum, const CubicTensor* tensor,
                   bool reaction_on);

struct ModalIntegration {
  std::size_t n_steps = 1000;
  double dtau = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  bool reaction_on = true;
  std::size_t record_every = 1;  ///< trajectory keeps every n-th state plus the initial one
};

/// Heun predictor-corrector for du_k = drift_k dtau + b_k dw_k, noise drawn
/// from NoiseStream(seed, path) channel k.  Throws IntegrationAbort on a
/// non-finite state.
std::vector<ModalState> integrate_modal(const ModalState& state0, const NoiseSpectrum& spectrum,
                                        const CubicTensor* tensor, const ModalIntegration& opts);

/// In-place variant used by ensemble drivers: advances u from step index
/// `first_step` by `steps` steps without storing a trajectory.
void advance_modal(std::vector<double>& u, const NoiseSpectrum& spectrum, const CubicTensor* tensor,
                   bool reaction_on, double dtau, const NoiseStream& noise, std::size_t first_step,
                   std::size_t steps);

}  // namespace similab
