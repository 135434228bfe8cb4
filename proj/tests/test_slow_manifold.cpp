#include <doctest.h>

#include <cmath>
#include <numbers>

#include <similab/galerkin.hpp>
#include <similab/slow_manifold.hpp>
#include <similab/stats.hpp>

using namespace similab;
using doctest::Approx;

namespace {
const double kS = 1.0 / std::sqrt(3.0 * std::numbers::pi);
}

TEST_CASE("stored slow-model weights agree with their fractions and surds") {
  for (std::size_t i = 0; i < SlowModel::kDriftWeights.size(); ++i) {
    const auto [p, q] = SlowModel::kDriftFractions[i];
    CHECK(SlowModel::kDriftWeights[i] == static_cast<double>(p) / q);
  }
  CHECK(SlowModel::kVolWeights[0] == Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));
  CHECK(SlowModel::kVolWeights[1] == Approx(-1.0 / (2.0 * std::sqrt(6.0))).epsilon(1e-15));
  CHECK(SlowModel::kVolWeights[2] == Approx(std::sqrt(5.0) / 27.0).epsilon(1e-15));
  CHECK(SlowModel::kVolWeights[3] == Approx(-std::sqrt(70.0) / 216.0).epsilon(1e-15));
}

TEST_CASE("slow drift exponent") {
  CHECK(slow_drift_exponent(NoiseSpectrum({0.0, 0.0})) == 0.0);
  CHECK(slow_drift_exponent(NoiseSpectrum({0.0, 1.0})) == Approx(0.5 * kS));
  std::vector<double> b7(8, 0.0);
  b7[7] = 1.0;
  CHECK(slow_drift_exponent(NoiseSpectrum(b7)) == Approx(131.0 / 3402.0 * kS));
  // disjoint supports add
  const double a = slow_drift_exponent(NoiseSpectrum({0.0, 0.3, 0.0, 0.0}));
  const double b = slow_drift_exponent(NoiseSpectrum({0.0, 0.0, 0.0, 0.2}));
  CHECK(slow_drift_exponent(NoiseSpectrum({0.0, 0.3, 0.0, 0.2})) == Approx(a + b));
}

TEST_CASE("coordinate transform") {
  const NoiseSpectrum sp({0.0, 0.1, 0.1});
  NormalFormState zero;
  const auto u0 = transform_U_to_u(zero, sp);
  for (double v : u0) CHECK(v == 0.0);

  NormalFormState s;
  s.U = {0.1, 0.0, 0.0};
  const auto u = transform_U_to_u(s, NoiseSpectrum({0.0, 0.0, 0.0}));
  CHECK(u[0] == Approx(0.1));
  CHECK(u[1] == 0.0);
  CHECK(u[2] == Approx(std::numbers::sqrt2 * 1e-3 / 6.0 * kS));

  for (const auto& U : {std::array<double, 3>{0.2, -0.1, 0.05}, std::array<double, 3>{-0.15, 0.2, -0.2}}) {
    NormalFormState st;
    st.U = U;
    st.z = {0.3, -0.4};
    const auto uu = transform_U_to_u(st, sp);
    const auto back = transform_u_to_U(uu, st.z, sp);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(back.U[i] - U[i]) < 1e-10);
  }
  CHECK_THROWS_AS(transform_u_to_U({50.0, 50.0, 50.0}, {0.0, 0.0}, NoiseSpectrum({0.0, 1.0, 1.0})), AmplitudeTooLarge);
}

TEST_CASE("transformed dynamics") {
  NormalFormState s;
  s.U = {0.3, 0.2, 0.0};
  const auto r = transformed_rhs(s, NoiseSpectrum({0.0, 0.0, 0.0}));
  CHECK(r.drift[0] == Approx(-0.5 * 0.027 * kS));
  CHECK(r.drift[1] == Approx(-0.1 - 0.09 * 0.2 * kS / 2.0));

  NormalFormState slow;
  slow.U = {0.3, 0.0, 0.0};
  const auto path = simulate_normal_form(slow, NoiseSpectrum({0.2, 0.3, 0.3}), 400, 0.01, NoiseStream(5, 1));
  for (const auto& st : path.states) {
    CHECK(st.U[1] == 0.0);
    CHECK(st.U[2] == 0.0);
  }
}

TEST_CASE("slow model paths") {
  const auto a = simulate_slow(0.5, NoiseSpectrum({0.0}), 10.0, 0.01, 1, 0, 100);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - cubic_decay(0.5, i * 1.0)) < 1e-6);

  // b_0 only, small amplitude: a random walk up to the weak cubic drift
  const auto w = simulate_slow(0.01, NoiseSpectrum({0.01}), 1.0, 0.01, 3, 0, 100);
  const NoiseStream ns(3, 0);
  double sum = 0.0;
  for (std::size_t n = 0; n < 100; ++n) sum += ns.increment(0, n, 0.01);
  CHECK(std::abs(w.back() - (0.01 + 0.01 * sum)) < 1e-6);
}

TEST_CASE("residual order") {
  CHECK(residual_order_check(0.0) == 0.0);
  const std::vector<double> eps{0.05, 0.1, 0.2};
  std::vector<double> r, c;
  for (double e : eps) {
    r.push_back(residual_order_check(e));
    ResidualOptions o;
    o.cubic_corrections = false;
    c.push_back(residual_order_check(e, o));
  }
  CHECK(loglog_slope(eps, r) >= 3.7);
  CHECK(loglog_slope(eps, c) == Approx(3.0).epsilon(0.1));
  CHECK_THROWS_AS(residual_order_check(0.5), std::invalid_argument);
}

TEST_CASE("slow model tracks the nine-mode Galerkin system") {
  const std::vector<double> b(9, 0.05);
  const NoiseSpectrum sp(b);
  const CubicTensor t(BasisSpec(8));
  RunningStats dev;
  for (std::uint64_t p = 0; p < 1000; ++p) {
    std::vector<double> u(9, 0.0);
    u[0] = 0.1;
    advance_modal(u, sp, &t, true, 0.01, NoiseStream(21, p), 0, 500);
    const auto a = simulate_slow(0.1, sp, 5.0, 0.01, 21, p, 500);
    dev.add(std::abs(u[0] - a.back()));
  }
  CHECK(dev.mean() < 5e-3);
}
