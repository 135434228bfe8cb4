#pragma once

#include <array>
#include <cstdint>

namespace similab {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Standard normal quantile of an open-interval uniform built from the top 52 bits.
double normal_from_bits(std::uint64_t bits);

/// Random-access Gaussian source keyed by (seed, path, channel, step).
///
/// Each value is a pure function of its key, so ensembles can be split across
/// threads in any order and still reproduce bit for bit.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t path) : seed_(seed), path_(path) {}

  double normal(std::uint32_t channel, std::uint64_t step) const;
  double increment(std::uint32_t channel, std::uint64_t step, double dt) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t path() const { return path_; }

 private:
  std::uint64_t seed_;
  std::uint64_t path_;
};

/// Channel layout shared by all consumers of NoiseStream.  Channels below
/// kModeChannels are the spectral modes w_k; the rest are auxiliary drivers.
namespace channel {
inline constexpr std::uint32_t kModeChannels = 64;
inline constexpr std::uint32_t kAdvection = 64;   // pipe velocity w(t)
inline constexpr std::uint32_t kOriginW1 = 65;    // X(T) driver
inline constexpr std::uint32_t kPseudoW2 = 66;    // t(T) driver
inline constexpr std::uint32_t kScratch = 100;    // tests and synthetic data
}  // namespace channel

}  // namespace similab
