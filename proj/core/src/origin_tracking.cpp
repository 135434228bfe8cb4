#include "similab/origin_tracking.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "similab/rng.hpp"

namespace similab {

namespace {

void check_grid(std::span<const double> T) {
  if (T.size() < 2) throw std::invalid_argument("T grid needs at least two points");
  for (std::size_t n = 1; n < T.size(); ++n)
    if (!(T[n] > T[n - 1])) throw std::invalid_argument("T grid must be strictly increasing");
}

void check_amplitude(double a) {
  if (a == 0.0 || !std::isfinite(a)) throw DegenerateAmplitude("compensation needs a nonzero slow amplitude");
}

}  // namespace

OriginPath build_origin_path(double a, double b1, std::span<const double> T_grid, std::uint64_t seed,
                             std::uint64_t path, double X0) {
  check_amplitude(a);
  check_grid(T_grid);
  const NoiseStream noise(seed, path);
  OriginPath out;
  out.a = a;
  out.b1 = b1;
  out.T.assign(T_grid.begin(), T_grid.end());
  out.X.resize(T_grid.size());
  out.dW.resize(T_grid.size() - 1);
  const double scale = std::numbers::sqrt2 * b1 / a;
  double W = 0.0;
  out.X[0] = X0;
  for (std::size_t n = 0; n + 1 < T_grid.size(); ++n) {
    out.dW[n] = noise.increment(channel::kOriginW1, n, T_grid[n + 1] - T_grid[n]);
    W += out.dW[n];
    out.X[n + 1] = X0 + scale * W;
  }
  return out;
}

PseudoTimePath build_pseudotime_path(double t0, double a, double b2, std::span<const double> T_grid,
                                     std::uint64_t seed, std::uint64_t path) {
  check_amplitude(a);
  check_grid(T_grid);
  if (T_grid[0] != 0.0) throw std::invalid_argument("pseudo-time grid must start at T = 0");
  const NoiseStream noise(seed, path);
  PseudoTimePath out;
  out.t0 = t0;
  out.a = a;
  out.b2 = b2;
  out.T.assign(T_grid.begin(), T_grid.end());
  out.t.resize(T_grid.size());
  out.dW.resize(T_grid.size() - 1);
  const double scale = 2.0 * b2 / a;
  double integral = 0.0;
  out.t[0] = t0;
  for (std::size_t n = 0; n + 1 < T_grid.size(); ++n) {
    out.dW[n] = noise.increment(channel::kPseudoW2, n, T_grid[n + 1] - T_grid[n]);
    integral += std::sqrt(0.5 * (T_grid[n] + T_grid[n + 1])) * out.dW[n];
    out.t[n + 1] = t0 + T_grid[n + 1] + scale * integral;
    if (out.t[n + 1] < out.t[n]) ++out.reversals;
  }
  return out;
}

CompensatedPath simulate_compensated_modes(const CompensationOptions& o, std::uint64_t seed, std::uint64_t path) {
  if (o.b0 != 0.0) throw ContractViolation("compensated modes need conservative noise (b_0 = 0)");
  if (!(o.dtau > 0.0) || !(o.horizon > 0.0)) throw std::invalid_argument("dtau and horizon must be positive");
  if (o.record_every == 0) throw std::invalid_argument("record_every must be positive");
  if (o.compensation) {
    check_amplitude(o.a);
    if (o.u1_0 != 0.0) throw ContractViolation("time compensation assumes u_1(0) = 0");
  }

  const auto steps = static_cast<std::size_t>(std::llround(o.horizon / o.dtau));
  std::vector<double> Tg(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) Tg[n] = std::exp(static_cast<double>(n) * o.dtau);

  // Drivers in T-time.  With compensation off they still supply the noise, so
  // both settings see the same realization.
  std::vector<double> dW1(steps), dW2(steps), X(steps + 1, 0.0), t(steps + 1);
  // The origin path comes from build_origin_path; t(T) is accumulated here
  // because this T grid starts at 1 rather than 0.
  const NoiseStream noise(seed, path);
  for (std::size_t n = 0; n < steps; ++n) dW2[n] = noise.increment(channel::kPseudoW2, n, Tg[n + 1] - Tg[n]);
  t[0] = o.t0;
  if (o.compensation) {
    const auto op = build_origin_path(o.a, o.b1, Tg, seed, path);
    dW1 = op.dW;
    X = op.X;
    const double scale = 2.0 * o.b2 / o.a;
    double integral = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
      integral += std::sqrt(0.5 * (Tg[n] + Tg[n + 1])) * dW2[n];
      t[n + 1] = o.t0 + (Tg[n + 1] - Tg[0]) + scale * integral;
    }
  } else {
    for (std::size_t n = 0; n < steps; ++n) {
      dW1[n] = noise.increment(channel::kOriginW1, n, Tg[n + 1] - Tg[n]);
      t[n + 1] = o.t0 + Tg[n + 1] - Tg[0];
    }
  }

  const double a = o.a, h = o.dtau;
  const double r2 = std::numbers::sqrt2 / 2.0;
  double u1 = o.u1_0, u2 = o.u2_0;
  CompensatedPath out;
  auto record = [&](std::size_t n) {
    out.tau.push_back(static_cast<double>(n) * h);
    out.T.push_back(Tg[n]);
    out.X.push_back(X[n]);
    out.t.push_back(t[n]);
    out.u0.push_back(a);
    out.u1.push_back(u1);
    out.u2.push_back(u2);
  };
  record(0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double dT = Tg[n + 1] - Tg[n];
    const double s = std::sqrt(dT / h);
    const double Tmid = 0.5 * (Tg[n] + Tg[n + 1]);
    const double dw1 = dW1[n] / s;
    const double dw2 = -dW2[n] / s;

    double k1 = o.b1 * dw1;
    double k2 = o.b2 * dw2;
    if (o.compensation) {
      const double dX = X[n + 1] - X[n];
      const double dt_excess = (t[n + 1] - t[n]) - dT;
      k1 += -r2 * a * dX / s;
      k2 += 0.5 * a * dt_excess / (std::sqrt(Tmid) * s) - r2 * u1 * dX / s;
    }
    // Heun on the linear decay with additive kicks
    const double p1 = u1 - 0.5 * h * u1 + k1;
    const double p2 = u2 - h * u2 + k2;
    u1 += 0.5 * h * (-0.5 * u1 - 0.5 * p1) + k1;
    u2 += 0.5 * h * (-u2 - p2) + k2;
    if (!std::isfinite(u1) || !std::isfinite(u2))
      throw IntegrationAbort("compensated modes diverged at step " + std::to_string(n), n);
    if ((n + 1) % o.record_every == 0 || n + 1 == steps) record(n + 1);
  }
  return out;
}

}  // namespace similab
