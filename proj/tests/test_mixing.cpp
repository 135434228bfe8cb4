#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <similab/mixing.hpp>
#include <similab/stats.hpp>

using namespace similab;
using doctest::Approx;

namespace {

PipePair release(double length, std::size_t n, double sd, double offset = 0.0) {
  PipePair p;
  p.x = periodic_grid(length, n);
  p.u1.resize(n);
  p.u2.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (p.x.at(i) - offset) / sd;
    p.u1[i] = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  }
  return p;
}

}  // namespace

TEST_CASE("periodic grid contract") {
  CHECK_THROWS_AS(periodic_grid(10.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(periodic_grid(10.0, 6), std::invalid_argument);
  const auto g = periodic_grid(10.0, 8);
  CHECK(g.origin == -5.0);
  CHECK(g.spacing == 1.25);
}

TEST_CASE("no advection: the difference decays like e^{-t}") {
  const auto p0 = release(40.0, 256, 1.0);
  PipeSpectrum s(p0);
  for (int n = 0; n < 100; ++n) s.step(0.01, 0.0);
  const auto p = s.physical();
  for (std::size_t i = 0; i < p.u1.size(); ++i) {
    const double m0 = 0.5 * (p0.u1[i] + p0.u2[i]), d0 = 0.5 * (p0.u1[i] - p0.u2[i]);
    CHECK(0.5 * (p.u1[i] + p.u2[i]) == Approx(m0).epsilon(1e-12).scale(1.0));
    CHECK(0.5 * (p.u1[i] - p.u2[i]) == Approx(d0 * std::exp(-1.0)).epsilon(1e-12).scale(1.0));
  }
  CHECK(s.t() == Approx(1.0));
}

TEST_CASE("pipe shifts conserve mass") {
  auto p = release(40.0, 256, 1.0);
  const double m0 = pipe_mass(p);
  CHECK(m0 == Approx(1.0).epsilon(1e-10));
  PipeSpectrum s(p);
  for (std::size_t n = 0; n < 500; ++n) s.step(0.01, 0.1 * std::sin(0.3 * static_cast<double>(n)));
  CHECK(s.mass() == Approx(m0).epsilon(1e-13));
  CHECK(pipe_mass(s.physical()) == Approx(m0).epsilon(1e-12));
  CHECK_THROWS_AS(s.step(0.01, 25.0), IntegrationAbort);

  // a pure shift of pipe 1 by an integer number of cells
  PipeSpectrum shift(p);
  shift.step(0.0, 10 * p.x.spacing);
  const auto q = shift.physical();
  for (std::size_t i = 10; i < 256; ++i) CHECK(q.u1[i] == Approx(p.u1[i - 10]).scale(1.0).epsilon(1e-12));
  CHECK(step_pipes(p, 0.0, 0.0).u1[128] == Approx(p.u1[128]).epsilon(1e-12));
}

TEST_CASE("pseudo frame contract") {
  CHECK_THROWS_AS(evolve_pseudo_frame(0.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(evolve_pseudo_frame(0.01, 10, 1, 0, 0.0), std::invalid_argument);
}

TEST_CASE("pseudo frame statistics") {
  RunningStats eta, T;
  std::size_t flagged = 0;
  double min_T = 1.0;
  for (std::uint64_t p = 0; p < 10000; ++p) {
    const auto f = evolve_pseudo_frame(0.01, 1000, 17, p);
    eta.add(f.eta.back());
    T.add(f.T.back());
    flagged += f.flagged;
    // T never drops below its start when eta starts at 0
    for (double x : f.T) min_T = std::min(min_T, x);
  }
  CHECK(eta.variance() == Approx(0.5).epsilon(0.05));
  CHECK(T.mean() - 1.0 == Approx(0.5 * 10.0).epsilon(0.1));
  CHECK(flagged == 0);
  CHECK(min_T >= 1.0 - 1e-9);
}

TEST_CASE("mean-difference transform") {
  const auto p = release(80.0, 512, 2.0);
  const auto xi = UniformGrid::symmetric(3.0, 61);
  const auto md = mean_diff_transform(p, 4.0, xi);
  CHECK(md.u.size() == 61);
  CHECK(md.diff.size() == 512);
  // at xi = 0: 2 * u1(0)/2
  CHECK(md.u[30] == Approx(p.u1[256]).epsilon(1e-9));
  // at xi = 1: x = 2
  const double expect = std::exp(-0.5) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  CHECK(md.u[40] == Approx(expect).epsilon(1e-4));
  CHECK_THROWS_AS(mean_diff_transform(p, 0.0, xi), std::domain_error);
}

TEST_CASE("slaving check skips small eta") {
  const auto p = release(80.0, 512, 2.0);
  std::vector<SlavingSample> traj;
  traj.push_back({0.0, 0.01, p});
  traj.push_back({0.1, -0.05, p});
  traj.push_back({0.2, 0.5, p});
  const auto r = check_slaving(traj);
  CHECK(r.skipped == 2);
  REQUIRE(r.deviation.size() == 1);
  CHECK(r.rate == 0.0);

  // d = -eta * m' is exactly slaved
  PipePair s = p;
  const double eta = 0.4;
  for (std::size_t i = 0; i < s.u1.size(); ++i) {
    const double x = s.x.at(i);
    const double m = std::exp(-x * x / 8.0), dm = -x / 4.0 * m;
    s.u1[i] = m - eta * dm;
    s.u2[i] = m + eta * dm;
  }
  CHECK(PipeSpectrum(s).slaving_deviation(eta) < 1e-8);
}

TEST_CASE("mixing run") {
  MixingOptions o;
  o.length = 80.0;
  o.n_points = 256;
  o.horizon = 5.0;
  const auto a = simulate_mixing(o, 3, 0);
  const auto b = simulate_mixing(o, 3, 0);
  CHECK(a.steps == 500);
  CHECK(a.t.size() == 51);
  CHECK(a.variance == b.variance);
  for (double m : a.mass) CHECK(m == Approx(1.0).epsilon(1e-10));
  CHECK(a.record[0] == 1);
  for (std::size_t i = 0; i < a.t.size(); ++i)
    CHECK(std::isnan(a.deviation[i]) == (std::abs(a.eta[i]) <= o.eta_min));
}
