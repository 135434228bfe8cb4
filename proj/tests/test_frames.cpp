#include <doctest.h>

#include <cmath>
#include <numbers>

#include <similab/frames.hpp>

using namespace similab;
using doctest::Approx;

namespace {

PhysicalField gaussian_release(double a, double t, const UniformGrid& x) {
  PhysicalField f{t, x, std::vector<double>(x.count)};
  for (std::size_t i = 0; i < x.count; ++i)
    f.values[i] = a / (2.0 * std::sqrt(std::numbers::pi * t)) * std::exp(-x.at(i) * x.at(i) / (4.0 * t));
  return f;
}

double fixed_point(double a, double xi) { return a / (2.0 * std::sqrt(std::numbers::pi)) * std::exp(-xi * xi / 4.0); }

double trapezoid(const std::vector<double>& v, double h) {
  double s = 0.0;
  for (double x : v) s += x;
  return h * (s - 0.5 * (v.front() + v.back()));
}

}  // namespace

TEST_CASE("Gaussian release maps to the fixed point across a decade of t") {
  const auto x = UniformGrid::symmetric(40.0, 801);
  const auto xi = UniformGrid::symmetric(10.0, 201);
  for (double t : {1.0, 2.5, 10.0}) {
    const auto natural = to_similarity(gaussian_release(1.3, t, x));
    CHECK(natural.tau == Approx(std::log(t)));
    for (std::size_t i = 0; i < natural.xi.count; i += 37)
      CHECK(std::abs(natural.values[i] - fixed_point(1.3, natural.xi.at(i))) < 1e-8);
    const auto resampled = to_similarity(gaussian_release(1.3, t, x), xi);
    for (std::size_t i = 0; i < xi.count; ++i) CHECK(std::abs(resampled.values[i] - fixed_point(1.3, xi.at(i))) < 1e-4);
  }
}

TEST_CASE("t = 1 is the identity and t <= 0 is rejected") {
  const auto x = UniformGrid::symmetric(10.0, 101);
  const auto phys = gaussian_release(1.0, 1.0, x);
  const auto s = to_similarity(phys);
  CHECK(s.tau == 0.0);
  CHECK(s.xi.spacing == x.spacing);
  CHECK(s.values == phys.values);
  PhysicalField bad = phys;
  bad.t = 0.0;
  CHECK_THROWS_AS(to_similarity(bad), std::domain_error);
  CHECK_THROWS_AS(from_similarity(s, -1.0), std::domain_error);
}

TEST_CASE("round trip and mass covariance") {
  const auto x = UniformGrid::symmetric(30.0, 601);
  PhysicalField f{4.0, x, std::vector<double>(x.count)};
  for (std::size_t i = 0; i < x.count; ++i) {
    const double y = x.at(i);
    f.values[i] = std::exp(-(y - 1.0) * (y - 1.0) / 6.0) * (1.0 + 0.3 * std::sin(y));
  }
  const auto s = to_similarity(f);
  const auto back = from_similarity(s, 4.0);
  for (std::size_t i = 0; i < x.count; ++i) CHECK(back.values[i] == Approx(f.values[i]).scale(1.0).epsilon(1e-8));
  CHECK(trapezoid(s.values, s.xi.spacing) == Approx(trapezoid(f.values, x.spacing)).epsilon(1e-12));
}

TEST_CASE("last-passage lookup through a reversal") {
  MovingFrame fr{{0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 0.0}, {1.0, 2.0, 1.5, 3.0}};
  const auto l = locate_in_frame(fr, 1.75);
  CHECK(l.passages == 3);
  CHECK(l.reversals == 1);
  CHECK(l.non_monotone_at_lookup);
  CHECK(l.T == Approx(2.0 + 0.25 / 1.5));
  const auto m = locate_in_frame(fr, 2.0);
  CHECK(m.T == Approx(2.0 + 0.5 / 1.5));
  CHECK_THROWS_AS(locate_in_frame(fr, 3.5), std::out_of_range);
}

TEST_CASE("moving frame reductions") {
  const auto x = UniformGrid::symmetric(30.0, 601);
  const auto phys = gaussian_release(1.0, 2.0, x);
  MovingFrame identity{{1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}};
  const auto a = to_similarity(phys), b = to_similarity_moving(phys, identity).field;
  CHECK(a.values == b.values);
  CHECK(a.xi.origin == b.xi.origin);

  MovingFrame shifted{{1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}};
  const auto c = to_similarity_moving(phys, shifted).field;
  CHECK(c.xi.origin == Approx(a.xi.origin - 1.0 / std::sqrt(2.0)));

  PhysicalField off{2.0, x, {}};
  const auto moved = gaussian_release(1.0, 2.0, UniformGrid{x.origin - 1.0, x.spacing, x.count});
  off.values = moved.values;  // release centred at x = 1
  const auto d = to_similarity_moving(off, shifted).field;
  for (std::size_t i = 0; i < d.xi.count; i += 41) CHECK(std::abs(d.values[i] - fixed_point(1.0, d.xi.at(i))) < 1e-10);
}
