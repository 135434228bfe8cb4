#include "similab/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace similab {

CubicTensor::CubicTensor(const BasisSpec& basis) : k_max_(basis.max_mode) {
  const int d = modes();
  if (basis.quad_order * 2 - 1 < 4 * basis.max_mode)
    throw std::invalid_argument("CubicTensor: quadrature order too low for quadruple products");
  // e_k e_l e_m e_n K = (scaled e)^4 exp(-3 xi^2 / 4): a polynomial of degree
  // 4 K_max under the beta = 3/4 Gauss weight, integrated exactly.
  const QuadratureRule rule = QuadratureRule::gauss_hermite(basis.quad_order, 0.75);
  const std::size_t q = rule.nodes.size();
  std::vector<double> e(static_cast<std::size_t>(d) * q);
  std::vector<double> tmp(d);
  for (std::size_t i = 0; i < q; ++i) {
    eval_scaled_eigenfunctions(k_max_, rule.nodes[i], tmp.data());
    for (int k = 0; k < d; ++k) e[k * q + i] = tmp[k];
  }
  const std::size_t du = static_cast<std::size_t>(d);
  c_.assign(du * du * du * du, 0.0);
  for (int k = 0; k < d; ++k)
    for (int l = k; l < d; ++l)
      for (int m = l; m < d; ++m)
        for (int n = m; n < d; ++n) {
          double v = 0.0;
          if ((k + l + m + n) % 2 == 0)
            for (std::size_t i = 0; i < q; ++i) v += rule.weights[i] * e[k * q + i] * e[l * q + i] * e[m * q + i] * e[n * q + i];
          int idx[4] = {k, l, m, n};
          std::sort(idx, idx + 4);
          do {
            c_[((idx[0] * du + idx[1]) * du + idx[2]) * du + idx[3]] = v;
          } while (std::next_permutation(idx, idx + 4));
        }
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      for (int m = l; m < d; ++m)
        for (int n = m; n < d; ++n) {
          const double v = (*this)(k, l, m, n);
          if (v == 0.0 || (k + l + m + n) % 2 != 0) continue;
          const int mult = (l == m && m == n) ? 1 : (l == m || m == n) ? 3 : 6;
          entries_.push_back({k, l, m, n, v * mult});
        }
}

void CubicTensor::contract(const double* u, double* d) const {
  std::fill(d, d + modes(), 0.0);
  for (const Entry& t : entries_) d[t.k] += t.coeff * u[t.l] * u[t.m] * u[t.n];
}

double CubicTensor::monomial(int k, int l, int m, int n) const {
  int idx[3] = {l, m, n};
  std::sort(idx, idx + 3);
  const int mult = (idx[0] == idx[1] && idx[1] == idx[2]) ? 1 : (idx[0] == idx[1] || idx[1] == idx[2]) ? 3 : 6;
  return mult * (*this)(k, idx[0], idx[1], idx[2]);
}

CubicTensor cubic_projection_tensor(const BasisSpec& basis) { return CubicTensor(basis); }

ModalRhs modal_rhs(const ModalState& state, const NoiseSpectrum& spectrum, const CubicTensor* tensor,
                   bool reaction_on) {
  const std::size_t n = state.u.size();
  if (reaction_on && (!tensor || static_cast<std::size_t>(tensor->modes()) != n))
    throw std::invalid_argument("modal_rhs: tensor dimension does not match the state");
  if (spectrum.modes() > n) throw std::invalid_argument("modal_rhs: spectrum has more modes than the state");
  ModalRhs r{std::vector<double>(n), std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) r.drift[k] = -0.5 * static_cast<double>(k) * state.u[k];
  if (reaction_on) {
    std::vector<double> d(n);
    tensor->contract(state.u.data(), d.data());
    for (std::size_t k = 0; k < n; ++k) r.drift[k] -= d[k];
  }
  for (std::size_t k = 0; k < spectrum.modes(); ++k) r.diffusion[k] = spectrum.b[k];
  return r;
}

namespace {
inline void modal_drift(const std::vector<double>& u, const CubicTensor* tensor, bool reaction_on,
                        std::vector<double>& d, std::vector<double>& f) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) f[k] = -0.5 * static_cast<double>(k) * u[k];
  if (reaction_on) {
    tensor->contract(u.data(), d.data());
    for (std::size_t k = 0; k < n; ++k) f[k] -= d[k];
  }
}
}  // namespace

void advance_modal(std::vector<double>& u, const NoiseSpectrum& spectrum, const CubicTensor* tensor,
                   bool reaction_on, double dtau, const NoiseStream& noise, std::size_t first_step,
                   std::size_t steps) {
  const std::size_t n = u.size();
  if (reaction_on && (!tensor || static_cast<std::size_t>(tensor->modes()) != n))
    throw std::invalid_argument("advance_modal: tensor dimension does not match the state");
  if (spectrum.modes() > n) throw std::invalid_argument("advance_modal: spectrum has more modes than the state");
  std::vector<double> f0(n), f1(n), d(n), pred(n), kick(n, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t step = first_step + s;
    for (std::size_t k = 0; k < spectrum.modes(); ++k)
      kick[k] = spectrum.b[k] == 0.0 ? 0.0
                                     : spectrum.b[k] * noise.increment(static_cast<std::uint32_t>(k), step, dtau);
    modal_drift(u, tensor, reaction_on, d, f0);
    for (std::size_t k = 0; k < n; ++k) pred[k] = u[k] + f0[k] * dtau + kick[k];
    modal_drift(pred, tensor, reaction_on, d, f1);
    bool finite = true;
    for (std::size_t k = 0; k < n; ++k) {
      u[k] += 0.5 * (f0[k] + f1[k]) * dtau + kick[k];
      finite = finite && std::isfinite(u[k]);
    }
    if (!finite) throw IntegrationAbort("modal integration produced a non-finite state at step " + std::to_string(step), step);
  }
}

std::vector<ModalState> integrate_modal(const ModalState& state0, const NoiseSpectrum& spectrum,
                                        const CubicTensor* tensor, const ModalIntegration& opts) {
  if (!(opts.dtau > 0.0)) throw std::invalid_argument("integrate_modal: dtau must be positive");
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);
  const NoiseStream noise(opts.seed, opts.path);
  std::vector<ModalState> traj;
  traj.reserve(opts.n_steps / every + 2);
  traj.push_back(state0);
  std::vector<double> u = state0.u;
  std::size_t done = 0;
  while (done < opts.n_steps) {
    const std::size_t chunk = std::min(every, opts.n_steps - done);
    advance_modal(u, spectrum, tensor, opts.reaction_on, opts.dtau, noise, done, chunk);
    done += chunk;
    if (chunk == every || done == opts.n_steps)
      traj.push_back({state0.tau + static_cast<double>(done) * opts.dtau, u});
  }
  return traj;
}

}  // namespace similab
