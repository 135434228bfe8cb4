#include "similab/slow_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "similab/galerkin.hpp"

namespace similab {

namespace {
const double kSqrt3Pi = std::sqrt(3.0 * std::numbers::pi);
const double kS = 1.0 / kSqrt3Pi;
constexpr double kR2 = std::numbers::sqrt2;

// Value plus directional derivative, enough arithmetic for the polynomial transform.
struct Dual {
  double v = 0.0, d = 0.0;
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator*(double c, Dual a) { return {c * a.v, c * a.d}; }

template <class T>
std::array<T, 3> apply_transform(const std::array<T, 3>& U, const std::array<T, 2>& z, double b1, double b2,
                                 bool cubic) {
  const T& U0 = U[0];
  const T& U1 = U[1];
  const T& U2 = U[2];
  std::array<T, 3> u{U0, U1 + b1 * z[0], U2 + b2 * z[1]};
  if (!cubic) return u;
  u[0] = u[0] + kS * ((-1.0 / kR2) * (U0 * U0 * U2) + 0.25 * (U0 * U2 * U2) + 0.5 * (U0 * U1 * U1) -
                      (kR2 / 54.0) * (U2 * U2 * U2));
  u[1] = u[1] + kS * ((1.0 / 6.0) * (U1 * U1 * U1) + (1.0 / 12.0) * (U1 * U2 * U2));
  u[2] = u[2] + kS * ((kR2 / 6.0) * (U0 * U0 * U0) - (kR2 / 6.0) * (U0 * U2 * U2) + (5.0 / 108.0) * (U2 * U2 * U2) +
                      (1.0 / 6.0) * (U1 * U1 * U2));
  return u;
}

const CubicTensor& three_mode_tensor() {
  static const CubicTensor t(BasisSpec(2));
  return t;
}
}  // namespace

std::array<double, 3> transform_U_to_u(const NormalFormState& s, const NoiseSpectrum& spectrum,
                                       bool cubic_corrections) {
  return apply_transform<double>(s.U, s.z, spectrum.at(1), spectrum.at(2), cubic_corrections);
}

NormalFormState transform_u_to_U(const std::array<double, 3>& u, const std::array<double, 2>& z,
                                 const NoiseSpectrum& spectrum) {
  NormalFormState s;
  s.z = z;
  s.U = u;
  for (int it = 0; it < 50; ++it) {
    const auto img = transform_U_to_u(s, spectrum);
    double change = 0.0, size = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double next = s.U[k] + (u[k] - img[k]);
      if (!std::isfinite(next)) throw AmplitudeTooLarge("transform_u_to_U: fixed-point iteration diverged");
      change = std::max(change, std::abs(next - s.U[k]));
      size = std::max(size, std::abs(next));
      s.U[k] = next;
    }
    if (change <= 1e-16 * std::max(1.0, size)) return s;
  }
  throw AmplitudeTooLarge("transform_u_to_U: fixed-point iteration did not converge in 50 iterations");
}

TransformedRhs transformed_rhs(const NormalFormState& st, const NoiseSpectrum& spectrum) {
  const double b0 = spectrum.at(0), b1 = spectrum.at(1), b2 = spectrum.at(2);
  const double U0 = st.U[0], U1 = st.U[1], U2 = st.U[2];
  const double z1 = st.z[0], z2 = st.z[1];
  TransformedRhs r;
  r.drift = {-0.5 * kS * U0 * U0 * U0, -0.5 * U1 - 0.5 * kS * U0 * U0 * U1, -U2 - 0.5 * kS * U0 * U0 * U2};
  r.noise[0] = {b0 + kS * kR2 * b0 * b2 * U0 * z2, -kS * b1 * b1 * U0 * z1,
                kS * (U0 * U0 * b2 / kR2 - 0.5 * U0 * b2 * b2 * z2)};
  r.noise[1] = {0.0, -kS * b1 * b1 * U1 * z1, -kS * b2 * b2 * U1 * z2 / 6.0};
  r.noise[2] = {kS * b0 * b2 * U2 * z2 / 3.0, -kS * b1 * b1 * U2 * z1 / 3.0,
                kS * (-U1 * U1 * b2 / 6.0 + (kR2 / 3.0) * U0 * U1 * b2 - (5.0 / 18.0) * b2 * b2 * U2 * z2)};
  return r;
}

NormalFormPath simulate_normal_form(const NormalFormState& s0, const NoiseSpectrum& spectrum, std::size_t n_steps,
                                    double dtau, const NoiseStream& noise, std::size_t record_every,
                                    MemorySampling sampling) {
  if (!(dtau > 0.0)) throw std::invalid_argument("simulate_normal_form: dtau must be positive");
  const std::size_t every = std::max<std::size_t>(1, record_every);
  NormalFormPath path;
  path.tau.push_back(0.0);
  path.states.push_back(s0);
  NormalFormState s = s0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    std::array<double, 3> dw{};
    for (std::uint32_t k = 0; k < 3; ++k) dw[k] = spectrum.at(k) == 0.0 ? 0.0 : noise.increment(k, n, dtau);
    const std::array<double, 2> z_next{ou_step(s.z[0], 0.5, dtau, dw[1]), ou_step(s.z[1], 1.0, dtau, dw[2])};
    NormalFormState frozen = s;
    if (sampling == MemorySampling::Midpoint) frozen.z = {0.5 * (s.z[0] + z_next[0]), 0.5 * (s.z[1] + z_next[1])};

    const TransformedRhs r0 = transformed_rhs(frozen, spectrum);
    NormalFormState pred = frozen;
    for (int i = 0; i < 3; ++i) {
      double g = 0.0;
      for (int j = 0; j < 3; ++j) g += r0.noise[i][j] * dw[j];
      pred.U[i] = s.U[i] + r0.drift[i] * dtau + g;
    }
    const TransformedRhs r1 = transformed_rhs(pred, spectrum);
    for (int i = 0; i < 3; ++i) {
      double g = 0.0;
      for (int j = 0; j < 3; ++j) g += 0.5 * (r0.noise[i][j] + r1.noise[i][j]) * dw[j];
      s.U[i] += 0.5 * (r0.drift[i] + r1.drift[i]) * dtau + g;
      if (!std::isfinite(s.U[i]))
        throw IntegrationAbort("normal-form integration produced a non-finite state at step " + std::to_string(n), n);
    }
    s.z = z_next;
    if ((n + 1) % every == 0 || n + 1 == n_steps) {
      path.tau.push_back(static_cast<double>(n + 1) * dtau);
      path.states.push_back(s);
    }
  }
  return path;
}

double slow_drift_exponent(const NoiseSpectrum& spectrum) {
  if (spectrum.modes() > 9) throw std::invalid_argument("slow_drift_exponent: spectrum longer than nine modes");
  double s = 0.0;
  for (std::size_t k = 1; k < spectrum.modes(); ++k) s += SlowModel::kDriftWeights[k - 1] * spectrum.b[k] * spectrum.b[k];
  return s * kS;
}

std::vector<double> simulate_slow(double a0, const NoiseSpectrum& spectrum, double horizon, double dtau,
                                  std::uint64_t seed, std::uint64_t path, std::size_t record_every) {
  if (!(dtau > 0.0)) throw std::invalid_argument("simulate_slow: dtau must be positive");
  if (spectrum.modes() > 9) throw std::invalid_argument("simulate_slow: spectrum longer than nine modes");
  const std::size_t every = std::max<std::size_t>(1, record_every);
  const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dtau));
  const double alpha = slow_drift_exponent(spectrum);
  const double b0 = spectrum.at(0);
  const NoiseStream noise(seed, path);

  auto drift = [&](double a) { return -0.5 * kS * a * a * a - alpha * a; };
  std::vector<double> out{a0};
  double a = a0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double w0 = b0 == 0.0 ? 0.0 : b0 * noise.increment(0, n, dtau);
    double mult = 0.0;  // sum of vol weight * b_k dw_k
    for (std::size_t i = 0; i < SlowModel::kVolModes.size(); ++i) {
      const auto k = static_cast<std::uint32_t>(SlowModel::kVolModes[i]);
      const double bk = spectrum.at(k);
      if (bk != 0.0) mult += SlowModel::kVolWeights[i] * bk * noise.increment(k, n, dtau);
    }
    const double f0 = drift(a);
    const double pred = a + f0 * dtau + w0 + kS * a * a * mult;
    a += 0.5 * (f0 + drift(pred)) * dtau + w0 + 0.5 * kS * (a * a + pred * pred) * mult;
    if (!std::isfinite(a))
      throw IntegrationAbort("slow-model integration produced a non-finite amplitude at step " + std::to_string(n), n);
    if ((n + 1) % every == 0 || n + 1 == n_steps) out.push_back(a);
  }
  return out;
}

double cubic_decay(double a0, double tau) { return a0 / std::sqrt(1.0 + a0 * a0 * tau * kS); }

std::array<double, 9> slow_manifold_shape(double a, std::span<const double> z, const NoiseSpectrum& spectrum) {
  auto zk = [&](std::size_t k) { return k < z.size() ? z[k] : 0.0; };
  auto bz = [&](std::size_t k) { return spectrum.at(k) * zk(k); };
  const double pi = std::numbers::pi;
  const double a3 = a * a * a;
  std::array<double, 9> u{};
  u[0] = a + kS * a * a *
                 (-bz(2) / kR2 + bz(4) / (2.0 * std::sqrt(6.0)) - std::sqrt(5.0) / 27.0 * bz(6) +
                  std::sqrt(70.0) / 216.0 * bz(8));
  for (std::size_t k = 1; k < 9; k += 2) u[k] = bz(k);
  u[2] = a3 / (3.0 * std::sqrt(6.0 * pi)) + bz(2);
  u[4] = -a3 / (18.0 * std::sqrt(2.0 * pi)) + bz(4);
  u[6] = std::sqrt(5.0) * a3 / (81.0 * kSqrt3Pi) + bz(6);
  u[8] = -std::sqrt(70.0) * a3 / (648.0 * kSqrt3Pi) + bz(8);
  return u;
}

double residual_order_check(double eps, const ResidualOptions& opts) {
  if (eps < 0.0 || eps > 0.3) throw std::invalid_argument("residual_order_check: eps must lie in [0, 0.3]");
  if (eps == 0.0) return 0.0;
  const CubicTensor& tensor = three_mode_tensor();
  const NoiseStream sample(opts.seed, 0);
  const double bscale = std::pow(eps, opts.noise_exponent);
  double worst = 0.0;
  std::uint64_t draw = 0;
  auto next = [&] { return sample.normal(channel::kScratch, draw++); };
  for (std::size_t n = 0; n < opts.samples; ++n) {
    NormalFormState st;
    for (auto& v : st.U) v = eps * next();
    std::vector<double> b(3);
    for (auto& v : b) v = bscale * next();
    for (auto& v : st.z) v = next();
    std::array<double, 3> wdot{};
    for (auto& v : wdot) v = next();
    const NoiseSpectrum spectrum(b);

    const TransformedRhs r = transformed_rhs(st, spectrum);
    std::array<Dual, 3> U;
    for (int i = 0; i < 3; ++i) {
      double rate = r.drift[i];
      for (int j = 0; j < 3; ++j) rate += r.noise[i][j] * wdot[j];
      U[i] = {st.U[i], rate};
    }
    const std::array<Dual, 2> z{Dual{st.z[0], -0.5 * st.z[0] + wdot[1]}, Dual{st.z[1], -st.z[1] + wdot[2]}};
    const auto u = apply_transform<Dual>(U, z, b[1], b[2], opts.cubic_corrections);

    const double uv[3] = {u[0].v, u[1].v, u[2].v};
    double d[3];
    tensor.contract(uv, d);
    for (int k = 0; k < 3; ++k) {
      const double f = -0.5 * k * uv[k] - d[k] + b[k] * wdot[k];
      worst = std::max(worst, std::abs(u[k].d - f));
    }
  }
  return worst;
}

}  // namespace similab
