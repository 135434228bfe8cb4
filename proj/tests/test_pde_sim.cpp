#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <similab/galerkin.hpp>
#include <similab/hermite.hpp>
#include <similab/noise.hpp>
#include <similab/pde_sim.hpp>
#include <similab/rng.hpp>
#include <similab/slow_manifold.hpp>
#include <similab/stats.hpp>

using namespace similab;
using doctest::Approx;

namespace {

std::vector<double> bump(const UniformGrid& g, double mass, double centre, double sd) {
  std::vector<double> v(g.count);
  for (std::size_t i = 0; i < g.count; ++i) {
    const double z = (g.at(i) - centre) / sd;
    v[i] = mass * std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  }
  return v;
}

std::vector<double> increments(const NoiseSpectrum& sp, const NoiseStream& ns, std::size_t step, double dt) {
  std::vector<double> dw(sp.modes(), 0.0);
  for (std::size_t k = 0; k < sp.modes(); ++k)
    if (sp.b[k] != 0.0) dw[k] = ns.increment(static_cast<std::uint32_t>(k), step, dt);
  return dw;
}

const NoiseSpectrum kNone;

}  // namespace

TEST_CASE("grid configuration contract") {
  CHECK_THROWS_AS((GridSolver(GridConfig{12.0, 32, 1e-4, Scheme::Similarity})), std::invalid_argument);
  CHECK_THROWS_AS((GridSolver(GridConfig{12.0, 241, 0.005, Scheme::Similarity})), std::invalid_argument);
  CHECK_NOTHROW(GridSolver(GridConfig{12.0, 241, 0.004, Scheme::Similarity}));
}

TEST_CASE("zero stays zero") {
  GridSolver s(GridConfig{12.0, 241, 0.004, Scheme::Similarity});
  auto st = s.make_state(std::vector<double>(241, 0.0), 0.0);
  for (int n = 0; n < 50; ++n) s.step_burgers_similarity(st, kNone, {});
  for (int n = 0; n < 50; ++n) s.step_rd_similarity(st, kNone, {});
  for (double v : st.values) CHECK(v == 0.0);
  GridSolver p(GridConfig{30.0, 301, 0.01, Scheme::Physical});
  auto ps = p.make_state(std::vector<double>(301, 0.0), 1.0);
  for (int n = 0; n < 50; ++n) p.step_burgers_physical(ps, {});
  for (double v : ps.values) CHECK(v == 0.0);
}

TEST_CASE("weighted norms") {
  const auto g = UniformGrid::symmetric(12.0, 481);
  std::vector<double> e0(g.count), G(g.count), zero(g.count, 0.0);
  for (std::size_t i = 0; i < g.count; ++i) {
    e0[i] = eval_eigenfunction(0, g.at(i));
    G[i] = 0.8 * std::exp(-g.at(i) * g.at(i) / 4.0) / (2.0 * std::sqrt(std::numbers::pi));
  }
  CHECK(weighted_norm(e0, g, NormKind::L2K) == Approx(1.0).epsilon(1e-6));
  CHECK(weighted_norm(zero, g, NormKind::L2K) == 0.0);
  CHECK(weighted_norm(G, g, NormKind::L2K) == Approx(0.8 / std::sqrt(2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-6));
  // ||e_0'||^2 = 1/2 since e_0' = -e_1/sqrt2
  CHECK(weighted_norm(e0, g, NormKind::H1K) == Approx(std::sqrt(1.5)).epsilon(1e-3));
  CHECK(weighted_norm(e0, g, NormKind::Linf) == Approx(eval_eigenfunction(0, 0.0)));
}

TEST_CASE("Cole-Hopf transform") {
  const auto g = UniformGrid::symmetric(12.0, 241);
  for (double v : cole_hopf(std::vector<double>(241, 0.0), g)) CHECK(v == 0.0);
  const auto U = bump(g, 0.05, 0.3, 1.0);
  const auto V = cole_hopf(U, g);
  const double umax = *std::max_element(U.begin(), U.end());
  double dmax = 0.0;
  for (std::size_t i = 0; i < g.count; ++i) dmax = std::max(dmax, std::abs(V[i] - U[i]));
  CHECK(dmax <= 0.25 * umax * 0.05 * 2.0);  // first-order bound with integral |U| = 0.05
}

TEST_CASE("stationary profile is a fixed point of the similarity solver") {
  GridSolver s(GridConfig{12.0, 481, 0.001, Scheme::Similarity});
  const auto u = stationary_burgers(1.5, s.grid());
  auto st = s.make_state(u, 0.0);
  CHECK(st.mass == Approx(1.5).epsilon(1e-8));
  for (int n = 0; n < 2000; ++n) s.step_burgers_similarity(st, kNone, {});
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(st.values[i] - u[i]));
  CHECK(d < 1e-4);
}

TEST_CASE("deterministic convergence toward the stationary profile") {
  GridSolver s(GridConfig{12.0, 241, 0.004, Scheme::Similarity});
  const auto g = s.grid();
  auto ref = s.make_state(bump(g, 0.1, 1.0, 1.0), 0.0);
  for (int n = 0; n < 10000; ++n) s.step_burgers_similarity(ref, kNone, {});
  auto st = s.make_state(bump(g, 0.1, 1.0, 1.0), 0.0);
  std::vector<double> tau, dist, d(g.count);
  for (int n = 0; n <= 3500; ++n) {
    if (n % 125 == 0) {
      for (std::size_t i = 0; i < g.count; ++i) d[i] = st.values[i] - ref.values[i];
      tau.push_back(st.time);
      dist.push_back(weighted_norm(d, g, NormKind::L2K));
    }
    s.step_burgers_similarity(st, kNone, {});
  }
  const auto fit = fit_rate(tau, dist, 4.0, 14.0);
  CHECK(-fit.rate >= 0.4);
  CHECK(-fit.rate <= 0.6);
}

TEST_CASE("second-order spatial convergence") {
  auto run = [](std::size_t n) {
    GridConfig c{10.0, n, 0.0, Scheme::Similarity};
    c.dt = 0.2 * c.spacing() * c.spacing();
    GridSolver s(c);
    auto st = s.make_state(bump(s.grid(), 1.0, 0.5, 1.0), 0.0);
    const auto steps = static_cast<std::size_t>(std::llround(1.0 / c.dt));
    s.set_step(1.0 / static_cast<double>(steps));
    for (std::size_t k = 0; k < steps; ++k) s.step_burgers_similarity(st, kNone, {});
    return st;
  };
  const auto fine = run(641), mid = run(161), coarse = run(81);
  auto err = [&](const BurgersState& a, std::size_t stride) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) e = std::max(e, std::abs(a.values[i] - fine.values[i * stride]));
    return e;
  };
  CHECK(err(coarse, 8) / err(mid, 4) >= 3.5);
}

TEST_CASE("mass under conservative noise and forced-mass bookkeeping") {
  GridSolver s(GridConfig{12.0, 241, 0.004, Scheme::Similarity}, 4);
  const NoiseSpectrum sp({0.0, 0.3, 0.3, 0.2}, true);
  const NoiseStream ns(8, 0);
  auto st = s.make_state(bump(s.grid(), 2.0, 0.0, 1.0), 0.0);
  const double m0 = st.mass;
  for (std::size_t n = 0; n < 500; ++n) s.step_burgers_similarity(st, sp, increments(sp, ns, n, 0.004));
  CHECK(std::abs(st.mass - m0) < 1e-6 * st.time);

  GridSolver p(GridConfig{40.0, 801, 0.004, Scheme::Physical});
  const NoiseSpectrum forced({0.2, 0.1});
  auto ps = p.make_state(bump(p.grid(), 1.0, 0.0, 1.0), 1.0);
  const double pm0 = ps.mass;
  for (std::size_t n = 0; n < 250; ++n)
    p.step_burgers_physical(ps, p.physical_noise(forced, increments(forced, ns, n, 0.004 / ps.time), ps.time));
  CHECK(std::abs(ps.mass - pm0 - ps.forced_mass) < 1e-6);
  CHECK(std::abs(ps.forced_mass) > 1e-4);
}

TEST_CASE("contraction of equal-mass solutions") {
  GridSolver s(GridConfig{12.0, 241, 0.004, Scheme::Similarity});
  const auto g = s.grid();
  auto a = s.make_state(bump(g, 1.0, 1.0, 1.0), 0.0);
  auto v = bump(g, 1.0, -1.0, 0.5);
  const double scale = a.mass / grid_mass(v, g.spacing);
  for (double& x : v) x *= scale;
  auto b = s.make_state(v, 0.0);
  std::vector<std::vector<double>> pa, pb;
  for (int n = 0; n <= 1250; ++n) {
    if (n % 125 == 0) {
      pa.push_back(a.values);
      pb.push_back(b.values);
    }
    s.step_burgers_similarity(a, kNone, {});
    s.step_burgers_similarity(b, kNone, {});
  }
  const auto phi = contraction_diagnostic(pa, pb, g);
  for (std::size_t k = 1; k < phi.size(); ++k) CHECK(phi[k] < phi[k - 1]);
  for (double x : contraction_diagnostic(pa, pa, g)) CHECK(x == 0.0);
  pb[0][120] += 0.01;
  CHECK_THROWS_AS(contraction_diagnostic(pa, pb, g), ContractViolation);
}

TEST_CASE("CFL abort") {
  GridSolver s(GridConfig{12.0, 241, 0.004, Scheme::Similarity});
  auto st = s.make_state(bump(s.grid(), 200.0, 0.0, 0.3), 0.0);
  CHECK_THROWS_AS(s.step_burgers_similarity(st, kNone, {}), IntegrationAbort);
}

TEST_CASE("L-infinity bound for Gaussian-like data under conservative noise") {
  // max|u(tau)| <= max|u0| + max over tau of |OU-filtered noise field|
  GridSolver s(GridConfig{12.0, 241, 0.004, Scheme::Similarity}, 3);
  const auto g = s.grid();
  const NoiseSpectrum sp({0.0, 0.2, 0.2}, true);
  const ModeTable table(2, g);
  for (std::uint64_t p = 0; p < 10; ++p) {
    const NoiseStream ns(31, p);
    auto st = s.make_state(bump(g, 1.0, 0.0, std::sqrt(2.0)), 0.0);
    const double m0 = *std::max_element(st.values.begin(), st.values.end());
    std::vector<double> eta(g.count, 0.0);
    double eta_max = 0.0, u_max = 0.0;
    for (std::size_t n = 0; n < 1000; ++n) {
      const auto dw = increments(sp, ns, n, 0.004);
      s.step_burgers_similarity(st, sp, dw);
      const auto kick = qwiener_increment(sp, dw, table);
      for (std::size_t i = 0; i < g.count; ++i) {
        eta[i] += kick[i];
        eta_max = std::max(eta_max, std::abs(eta[i]));
        u_max = std::max(u_max, std::abs(st.values[i]));
      }
    }
    CHECK(u_max <= m0 + eta_max);
  }
}

TEST_CASE("grid cubic reaction against the Galerkin system and the slow decay") {
  const GridConfig cfg{12.0, 241, 0.004, Scheme::Similarity};
  GridSolver s(cfg, 9);
  const auto g = s.grid();
  const BasisSpec basis(8);
  const CubicTensor t(basis);
  std::vector<double> u0(g.count);
  for (std::size_t i = 0; i < g.count; ++i) u0[i] = 0.2 * eval_eigenfunction(0, g.at(i));

  auto st = s.make_state(u0, 0.0);
  for (int n = 0; n < 2500; ++n) s.step_rd_similarity(st, kNone, {});
  CHECK(project_field(st.values, g, basis).coeffs[0] == Approx(cubic_decay(0.2, 10.0)).epsilon(2e-3));

  const NoiseSpectrum sp(std::vector<double>(9, 0.05));
  const NoiseStream ns(12, 0);
  auto gs = s.make_state(u0, 0.0);
  std::vector<double> um(9, 0.0);
  um[0] = 0.2;
  for (std::size_t n = 0; n < 1000; ++n) s.step_rd_similarity(gs, sp, increments(sp, ns, n, 0.004));
  advance_modal(um, sp, &t, true, 0.004, ns, 0, 1000);
  const auto pr = project_field(gs.values, g, basis);
  for (int k = 0; k <= 8; ++k) CHECK(std::abs(pr.coeffs[k] - um[k]) < 2e-3);
}
