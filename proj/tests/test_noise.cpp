#include <doctest.h>

#include <cmath>

#include <similab/hermite.hpp>
#include <similab/noise.hpp>
#include <similab/rng.hpp>
#include <similab/stats.hpp>

using namespace similab;
using doctest::Approx;

TEST_CASE("Philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal quantile mapping against scipy") {
  CHECK(normal_from_bits(0) == Approx(-8.209536151601387).epsilon(1e-12));
  CHECK(normal_from_bits(~0ull) == Approx(8.209536151601387).epsilon(1e-12));
  CHECK(normal_from_bits(0xdeadbeefcafebabeull) == Approx(1.125628740696368).epsilon(1e-12));
  CHECK(std::abs(normal_from_bits(1ull << 63)) < 1e-15);
}

TEST_CASE("noise stream is keyed, not sequential") {
  const NoiseStream a(42, 3), b(42, 3), c(42, 4);
  CHECK(a.normal(5, 17) == b.normal(5, 17));
  CHECK(a.normal(5, 17) != c.normal(5, 17));
  CHECK(a.normal(5, 17) != a.normal(6, 17));
  CHECK(a.normal(5, 16) != a.normal(5, 17));
  CHECK(a.increment(1, 9, 0.25) == Approx(0.5 * a.normal(1, 9)));
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(NoiseSpectrum({0.1, 0.2}, true), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpectrum({0.0, NAN}), std::invalid_argument);
  CHECK_NOTHROW(NoiseSpectrum({0.0, 0.2}, true));
}

TEST_CASE("Wiener ensembles") {
  WienerSpec s{4, 50, 3, 0.02, 9};
  const auto e1 = sample_wiener(s), e2 = sample_wiener(s);
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t k = 0; k < 3; ++k) {
      const auto a = e1.increments(p, k), b = e2.increments(p, k);
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
      CHECK(e1.path(p, k)[0] == 0.0);
    }

  WienerSpec big{100000, 4, 1, 0.25, 1};
  const auto e = sample_wiener(big);
  RunningStats w1;
  for (std::size_t p = 0; p < big.n_paths; ++p) w1.add(e.path(p, 0).back());
  CHECK(w1.variance() == Approx(1.0).epsilon(0.03));
}

TEST_CASE("exact OU convolution") {
  std::vector<double> zero(100, 0.0);
  for (double v : ou_convolve(zero, 0.5, 0.1).values) CHECK(v == 0.0);
  CHECK(ou_step(0.3, 0.5, 0.01, 0.02) == Approx(0.3184538477683926).epsilon(1e-14));

  std::vector<double> dw{0.1, -0.2, 0.05};
  const auto w = ou_convolve(dw, 0.0, 0.01);
  CHECK(w.values.back() == Approx(-0.05));

  // stationary variance 1/(2 beta)
  RunningStats st;
  for (std::uint64_t p = 0; p < 10000; ++p) {
    const NoiseStream ns(77, p);
    double z = 0.0;
    for (std::uint64_t n = 0; n < 200; ++n) z = ou_step(z, 0.5, 0.05, ns.increment(channel::kScratch, n, 0.05));
    st.add(z);
  }
  CHECK(st.variance() == Approx(1.0).epsilon(0.05));
}

TEST_CASE("Q-Wiener field increments") {
  const auto grid = UniformGrid::symmetric(12.0, 241);
  const ModeTable table(3, grid);
  const NoiseSpectrum off({0.0, 0.0, 0.0, 0.0});
  std::vector<double> dw{0.1, 0.3, -0.2, 0.4};
  for (double v : qwiener_increment(off, dw, table)) CHECK(v == 0.0);

  const NoiseSpectrum one({0.0, 1.0});
  const auto f = qwiener_increment(one, std::vector<double>{0.0, 0.3}, table);
  for (std::size_t i = 0; i < grid.count; i += 20) CHECK(f[i] == Approx(0.3 * eval_eigenfunction(1, grid.at(i))));

  const NoiseSpectrum cons({0.0, 0.5, 0.5, 0.5}, true);
  const auto g = qwiener_increment(cons, dw, table);
  double mass = 0.0;
  for (double v : g) mass += v * grid.spacing;
  CHECK(std::abs(mass) < 1e-10);
  CHECK_THROWS(qwiener_increment(cons, std::vector<double>{0.1}, table));
}
