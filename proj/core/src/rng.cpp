#include "similab/rng.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace similab {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int r = 0; r < 10; ++r) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

double normal_from_bits(std::uint64_t bits) {
  static const boost::math::normal_distribution<double> unit;
  // 52 bits keep k + 1/2 exact, so u stays strictly inside (0, 1).
  const double u = (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
  return boost::math::quantile(unit, u);
}

double NoiseStream::normal(std::uint32_t channel, std::uint64_t step) const {
  const std::uint64_t block = step >> 1;
  const auto out = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), channel,
                               static_cast<std::uint32_t>(path_)},
                              {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  const std::uint64_t bits = (step & 1u) ? (static_cast<std::uint64_t>(out[3]) << 32 | out[2])
                                         : (static_cast<std::uint64_t>(out[1]) << 32 | out[0]);
  return normal_from_bits(bits);
}

double NoiseStream::increment(std::uint32_t channel, std::uint64_t step, double dt) const {
  return std::sqrt(dt) * normal(channel, step);
}

}  // namespace similab
