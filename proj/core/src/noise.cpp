#include "similab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "similab/errors.hpp"
#include "similab/hermite.hpp"

namespace similab {

NoiseSpectrum::NoiseSpectrum(std::vector<double> amplitudes, bool conservative_flag)
    : b(std::move(amplitudes)), conservative(conservative_flag) {
  validate();
}

void NoiseSpectrum::validate() const {
  for (double v : b)
    if (!std::isfinite(v)) throw std::invalid_argument("NoiseSpectrum: non-finite amplitude");
  if (conservative && !b.empty() && b[0] != 0.0)
    throw std::invalid_argument("NoiseSpectrum: conservative noise requires b_0 = 0");
}

WienerEnsemble::WienerEnsemble(const WienerSpec& spec) : spec_(spec) {
  if (!(spec.dt > 0.0)) throw std::invalid_argument("WienerSpec: dt must be positive");
  if (spec.n_paths < 1 || spec.n_steps < 1 || spec.n_modes < 1)
    throw std::invalid_argument("WienerSpec: counts must be at least 1");
  inc_.resize(spec.n_paths * spec.n_modes * spec.n_steps);
  for (std::size_t p = 0; p < spec.n_paths; ++p) {
    const NoiseStream ns(spec.seed, p);
    for (std::size_t k = 0; k < spec.n_modes; ++k) {
      double* row = inc_.data() + (p * spec.n_modes + k) * spec.n_steps;
      for (std::size_t n = 0; n < spec.n_steps; ++n)
        row[n] = ns.increment(static_cast<std::uint32_t>(k), n, spec.dt);
    }
  }
}

std::vector<double> WienerEnsemble::path(std::size_t p, std::size_t k) const {
  std::vector<double> w(spec_.n_steps + 1, 0.0);
  const auto inc = increments(p, k);
  for (std::size_t n = 0; n < spec_.n_steps; ++n) w[n + 1] = w[n] + inc[n];
  return w;
}

WienerEnsemble sample_wiener(const WienerSpec& spec) { return WienerEnsemble(spec); }

double ou_step(double z, double beta, double dt, double dw) {
  if (beta == 0.0) return z + dw;
  const double decay = std::exp(-beta * dt);
  // (1 - e^{-2 beta dt}) / (2 beta dt), via expm1 for small beta dt
  const double ratio = -std::expm1(-2.0 * beta * dt) / (2.0 * beta * dt);
  return decay * z + std::sqrt(ratio) * dw;
}

OuPath ou_convolve(std::span<const double> dw, double beta, double dt) {
  if (beta < 0.0) throw std::invalid_argument("ou_convolve: beta must be non-negative");
  if (!(dt > 0.0)) throw std::invalid_argument("ou_convolve: dt must be positive");
  OuPath p{beta, dt, std::vector<double>(dw.size() + 1, 0.0)};
  for (std::size_t n = 0; n < dw.size(); ++n) p.values[n + 1] = ou_step(p.values[n], beta, dt, dw[n]);
  return p;
}

ModeTable::ModeTable(int km, const UniformGrid& g) : k_max(km), grid(g) {
  values.assign(static_cast<std::size_t>(km + 1) * g.count, 0.0);
  std::vector<double> e(km + 1);
  for (std::size_t i = 0; i < g.count; ++i) {
    eval_eigenfunctions(km, g.at(i), e.data());
    for (int k = 0; k <= km; ++k) values[static_cast<std::size_t>(k) * g.count + i] = e[k];
  }
}

void qwiener_increment(const NoiseSpectrum& spectrum, std::span<const double> dw, const ModeTable& table,
                       std::span<double> out) {
  if (dw.size() != spectrum.modes())
    throw ContractViolation("qwiener_increment: increment count does not match the spectrum");
  if (static_cast<int>(spectrum.modes()) > table.k_max + 1)
    throw ContractViolation("qwiener_increment: spectrum has more modes than the table");
  if (out.size() != table.grid.count) throw std::invalid_argument("qwiener_increment: output size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < spectrum.modes(); ++k) {
    const double a = spectrum.b[k] * dw[k];
    if (a == 0.0) continue;
    const double* e = table.mode(static_cast<int>(k));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * e[i];
  }
}

std::vector<double> qwiener_increment(const NoiseSpectrum& spectrum, std::span<const double> dw,
                                      const ModeTable& table) {
  std::vector<double> out(table.grid.count);
  qwiener_increment(spectrum, dw, table, out);
  return out;
}

}  // namespace similab
