#include <doctest.h>

#include <cmath>
#include <numbers>

#include <similab/galerkin.hpp>

#include "golden.hpp"

using namespace similab;
using doctest::Approx;

TEST_CASE("three-mode cubic coefficients match the closed forms") {
  const CubicTensor t(BasisSpec(2));
  const double s = golden::cubic_scale();
  const auto expected = golden::three_mode_cubic();
  for (int k = 0; k <= 2; ++k)
    for (int l = 0; l <= 2; ++l)
      for (int m = l; m <= 2; ++m)
        for (int n = m; n <= 2; ++n) {
          double want = 0.0;
          for (const auto& e : expected)
            if (e.k == k && e.l == l && e.m == m && e.n == n) want = e.coeff * s;
          CAPTURE(k);
          CAPTURE(l);
          CAPTURE(m);
          CAPTURE(n);
          CHECK(std::abs(t.monomial(k, l, m, n) - want) < 1e-12);
        }
  CHECK(t.monomial(0, 0, 0, 0) == Approx(0.162868).epsilon(1e-6));
  CHECK(t.monomial(2, 0, 0, 0) == Approx(-std::numbers::sqrt2 / (6.0 * std::sqrt(3.0 * std::numbers::pi))));
}

TEST_CASE("tensor symmetry and parity up to K_max = 8") {
  const CubicTensor t(BasisSpec(8));
  for (int k = 0; k <= 8; ++k)
    for (int l = 0; l <= 8; ++l)
      for (int m = 0; m <= 8; ++m)
        for (int n = 0; n <= 8; ++n) {
          const double v = t(k, l, m, n);
          if ((k + l + m + n) % 2) CHECK(v == 0.0);
          CHECK(v == t(l, k, m, n));
          CHECK(v == t(k, m, l, n));
          CHECK(v == t(k, l, n, m));
        }
}

TEST_CASE("modal right-hand side") {
  const CubicTensor t(BasisSpec(2));
  const NoiseSpectrum sp({0.1, 0.2, 0.3});
  const ModalState st{0.0, {0.3, -0.2, 0.15}};
  const auto off = modal_rhs(st, sp, &t, false);
  for (int k = 0; k <= 2; ++k) CHECK(off.drift[k] == Approx(-0.5 * k * st.u[k]));
  CHECK(off.diffusion[2] == 0.3);

  const auto on = modal_rhs(st, sp, &t, true);
  const double s = golden::cubic_scale();
  const double u0 = st.u[0], u1 = st.u[1], u2 = st.u[2];
  CHECK(on.drift[1] ==
        Approx(-0.5 * u1 + s * (-0.5 * u0 * u0 * u1 - u1 * u1 * u1 / 6.0 - u1 * u2 * u2 / 6.0)).epsilon(1e-13));

  const ModalState zero{0.0, {0.0, 0.0, 0.0}};
  for (double v : modal_rhs(zero, sp, &t, true).drift) CHECK(v == 0.0);
}

TEST_CASE("deterministic linear decay") {
  ModalIntegration o;
  o.n_steps = 2000;
  o.dtau = 1e-3;
  o.reaction_on = false;
  const auto traj = integrate_modal({0.0, {1.0, 1.0, 1.0, 1.0}}, NoiseSpectrum{}, nullptr, o);
  const double tau = traj.back().tau;
  CHECK(tau == Approx(2.0));
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(traj.back().u[k] - std::exp(-0.5 * k * tau)) < 1e-6);
}

TEST_CASE("mode 0 under its own noise is an exact random walk") {
  ModalIntegration o;
  o.n_steps = 500;
  o.dtau = 0.01;
  o.reaction_on = false;
  o.seed = 4;
  o.path = 2;
  const auto traj = integrate_modal({0.0, {0.7, 0.0}}, NoiseSpectrum({0.4}), nullptr, o);
  const NoiseStream ns(4, 2);
  double w = 0.0;
  for (std::size_t n = 0; n < 500; ++n) w += ns.increment(0, n, 0.01);
  CHECK(std::abs(traj.back().u[0] - (0.7 + 0.4 * w)) < 1e-13);
}

TEST_CASE("integration aborts on blow-up with the step index") {
  ModalIntegration o;
  o.n_steps = 100;
  o.dtau = 0.5;
  const CubicTensor t(BasisSpec(2));
  try {
    integrate_modal({0.0, {-1e60, 0.0, 0.0}}, NoiseSpectrum{}, &t, o);
    FAIL("expected an abort");
  } catch (const IntegrationAbort& e) {
    CHECK(e.step() < 100);
  }
}
