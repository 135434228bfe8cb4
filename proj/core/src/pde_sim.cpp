#include "similab/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "similab/hermite.hpp"

namespace similab {

void GridConfig::validate() const {
  if (n_points < 64) throw std::invalid_argument("GridConfig: n_points must be at least 64");
  if (!(half_width > 0.0)) throw std::invalid_argument("GridConfig: half_width must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("GridConfig: dt must be positive");
  const double h = spacing();
  if (dt > 0.4 * h * h * (1.0 + 1e-9))
    throw std::invalid_argument("GridConfig: dt exceeds the diffusive bound 0.4 h^2 = " + std::to_string(0.4 * h * h));
}

double grid_mass(std::span<const double> v, double h) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return h * (s - 0.5 * (v.front() + v.back()));
}

GridSolver::GridSolver(const GridConfig& cfg, int noise_modes) : cfg_(cfg) {
  cfg_.validate();
  grid_ = cfg_.grid();
  if (cfg_.scheme == Scheme::Similarity) table_ = ModeTable(std::max(0, noise_modes - 1), grid_);
  const std::size_t n = grid_.count;
  f0_.resize(n);
  f1_.resize(n);
  pred_.resize(n);
  kick_.resize(n);
}

void GridSolver::set_step(double dt) {
  GridConfig c = cfg_;
  c.dt = dt;
  c.validate();
  cfg_.dt = dt;
}

BurgersState GridSolver::make_state(std::vector<double> values, double time) const {
  if (values.size() != grid_.count) throw std::invalid_argument("make_state: value count does not match the grid");
  values.front() = 0.0;
  values.back() = 0.0;
  BurgersState s;
  s.time = time;
  s.mass = grid_mass(values, grid_.spacing);
  s.values = std::move(values);
  return s;
}

void GridSolver::rhs(Kind kind, const std::vector<double>& u, std::vector<double>& f) const {
  const std::size_t n = u.size();
  const double h = grid_.spacing;
  const double ih2 = 1.0 / (h * h), i4h = 1.0 / (4.0 * h);
  f[0] = f[n - 1] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double up = u[i + 1], um = u[i - 1];
    double v = (up - 2.0 * u[i] + um) * ih2;
    switch (kind) {
      case Kind::SimBurgers:
        v += (grid_.at(i + 1) * up - grid_.at(i - 1) * um) * i4h - (up * up - um * um) * i4h;
        break;
      case Kind::SimCubic:
        v += (grid_.at(i + 1) * up - grid_.at(i - 1) * um) * i4h - u[i] * u[i] * u[i];
        break;
      case Kind::PhysBurgers:
        v -= (up * up - um * um) * i4h;
        break;
    }
    f[i] = v;
  }
}

void GridSolver::heun(Kind kind, BurgersState& s, std::span<const double> kick) {
  const double dt = cfg_.dt, h = grid_.spacing;
  auto& u = s.values;
  const std::size_t n = u.size();
  if (n != grid_.count) throw std::invalid_argument("GridSolver: state does not match the grid");

  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  const double drift_speed = kind == Kind::PhysBurgers ? umax : umax + 0.5 * cfg_.half_width;
  if (!std::isfinite(umax) || drift_speed * dt / h > 1.0)
    throw IntegrationAbort("grid step " + std::to_string(steps_) + ": advective CFL violated (max|u| = " +
                               std::to_string(umax) + ")",
                           steps_);

  rhs(kind, u, f0_);
  for (std::size_t i = 0; i < n; ++i) pred_[i] = u[i] + dt * f0_[i] + (kick.empty() ? 0.0 : kick[i]);
  pred_.front() = pred_.back() = 0.0;
  rhs(kind, pred_, f1_);
  for (std::size_t i = 1; i + 1 < n; ++i) u[i] += 0.5 * dt * (f0_[i] + f1_[i]) + (kick.empty() ? 0.0 : kick[i]);
  if (!kick.empty()) s.forced_mass += grid_mass(kick, h);
  s.mass = grid_mass(u, h);
  s.time += dt;
  ++steps_;
}

void GridSolver::step_burgers_similarity(BurgersState& s, const NoiseSpectrum& spectrum, std::span<const double> dw) {
  if (cfg_.scheme != Scheme::Similarity) throw std::logic_error("step_burgers_similarity on a physical grid");
  if (spectrum.modes() == 0) {
    heun(Kind::SimBurgers, s, {});
    return;
  }
  qwiener_increment(spectrum, dw, table_, kick_);
  kick_.front() = kick_.back() = 0.0;
  heun(Kind::SimBurgers, s, kick_);
}

void GridSolver::step_rd_similarity(BurgersState& s, const NoiseSpectrum& spectrum, std::span<const double> dw) {
  if (cfg_.scheme != Scheme::Similarity) throw std::logic_error("step_rd_similarity on a physical grid");
  if (spectrum.modes() == 0) {
    heun(Kind::SimCubic, s, {});
    return;
  }
  qwiener_increment(spectrum, dw, table_, kick_);
  kick_.front() = kick_.back() = 0.0;
  heun(Kind::SimCubic, s, kick_);
}

void GridSolver::step_burgers_physical(BurgersState& s, std::span<const double> noise_field) {
  if (cfg_.scheme != Scheme::Physical) throw std::logic_error("step_burgers_physical on a similarity grid");
  if (!noise_field.empty() && noise_field.size() != grid_.count)
    throw std::invalid_argument("step_burgers_physical: noise field size mismatch");
  if (noise_field.empty()) {
    heun(Kind::PhysBurgers, s, {});
    return;
  }
  std::copy(noise_field.begin(), noise_field.end(), kick_.begin());
  kick_.front() = kick_.back() = 0.0;
  heun(Kind::PhysBurgers, s, kick_);
}

std::vector<double> GridSolver::physical_noise(const NoiseSpectrum& spectrum, std::span<const double> dw_tau,
                                               double t) const {
  if (!(t > 0.0)) throw std::domain_error("physical_noise: t must be positive");
  if (dw_tau.size() != spectrum.modes()) throw std::invalid_argument("physical_noise: increment count mismatch");
  const double st = std::sqrt(t);
  std::vector<double> out(grid_.count, 0.0);
  if (spectrum.modes() == 0) return out;
  const int km = static_cast<int>(spectrum.modes()) - 1;
  std::vector<double> e(km + 1);
  for (std::size_t i = 0; i < grid_.count; ++i) {
    eval_eigenfunctions(km, grid_.at(i) / st, e.data());
    double v = 0.0;
    for (int k = 0; k <= km; ++k) v += spectrum.b[k] * dw_tau[k] * e[k];
    out[i] = v / st;
  }
  return out;
}

double GridSolver::boundary_ratio(const BurgersState& s) const {
  double m = 0.0;
  for (double v : s.values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  const std::size_t n = s.values.size();
  return std::max(std::abs(s.values[1]), std::abs(s.values[n - 2])) / m;
}

double weighted_norm(std::span<const double> f, const UniformGrid& grid, NormKind which, double clip_rel) {
  if (f.size() != grid.count) throw std::invalid_argument("weighted_norm: grid/value size mismatch");
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  if (which == NormKind::Linf || fmax == 0.0) return fmax;

  std::size_t lo = 0, hi = f.size() - 1;
  while (lo < hi && std::abs(f[lo]) < clip_rel * fmax) ++lo;
  while (hi > lo && std::abs(f[hi]) < clip_rel * fmax) --hi;
  const double clip = std::max(std::abs(grid.at(lo)), std::abs(grid.at(hi)));
  const double h = grid.spacing;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = std::min(std::abs(grid.at(i)), clip);
    double v = f[i] * f[i];
    if (which == NormKind::H1K) {
      double d;
      if (i == 0) d = (f[1] - f[0]) / h;
      else if (i + 1 == f.size()) d = (f[i] - f[i - 1]) / h;
      else d = (f[i + 1] - f[i - 1]) / (2.0 * h);
      v += d * d;
    }
    const double w = (i == 0 || i + 1 == f.size()) ? 0.5 * h : h;
    s += w * v * std::exp(0.25 * x * x);
  }
  return std::sqrt(s);
}

std::vector<double> cole_hopf(std::span<const double> U, const UniformGrid& grid) {
  if (U.size() != grid.count) throw std::invalid_argument("cole_hopf: grid/value size mismatch");
  std::vector<double> V(U.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    if (i > 0) cum += 0.5 * grid.spacing * (U[i] + U[i - 1]);
    V[i] = U[i] * std::exp(-0.5 * cum);
  }
  return V;
}

std::vector<double> contraction_diagnostic(const std::vector<std::vector<double>>& p1,
                                           const std::vector<std::vector<double>>& p2, const UniformGrid& grid) {
  if (p1.size() != p2.size()) throw std::invalid_argument("contraction_diagnostic: paths differ in length");
  if (!p1.empty()) {
    const double m1 = grid_mass(p1[0], grid.spacing), m2 = grid_mass(p2[0], grid.spacing);
    if (std::abs(m1 - m2) > 1e-8)
      throw ContractViolation("contraction_diagnostic: initial masses differ by " + std::to_string(std::abs(m1 - m2)));
  }
  std::vector<double> phi(p1.size());
  std::vector<double> d(grid.count);
  for (std::size_t s = 0; s < p1.size(); ++s) {
    if (p1[s].size() != grid.count || p2[s].size() != grid.count)
      throw std::invalid_argument("contraction_diagnostic: snapshot size mismatch");
    for (std::size_t i = 0; i < grid.count; ++i) d[i] = std::abs(p1[s][i] - p2[s][i]);
    phi[s] = grid_mass(d, grid.spacing);
  }
  return phi;
}

std::vector<double> stationary_burgers(double mass, const UniformGrid& grid) {
  if (!(mass > 0.0)) throw std::invalid_argument("stationary_burgers: mass must be positive");
  const double sp = std::sqrt(std::numbers::pi);
  const double A = sp / -std::expm1(-0.5 * mass);
  std::vector<double> u(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double x = grid.at(i);
    u[i] = std::exp(-0.25 * x * x) / (A - 0.5 * sp * std::erfc(-0.5 * x));
  }
  return u;
}

}  // namespace similab
