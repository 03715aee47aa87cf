#ifndef UCBSTAB_RANDOM_HPP_
#define UCBSTAB_RANDOM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

namespace ucbstab {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives the seed of child stream `index` from `root`.
///
/// For a fixed root the map index -> seed is injective: root + index * gamma
/// is distinct modulo 2^64 for distinct indices (gamma is odd) and
/// splitmix64 is a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::uint64_t index) noexcept {
  constexpr std::uint64_t kGamma = 0xd1b54a32d192ed03ULL;
  return splitmix64(root + index * kGamma);
}

/// Deterministic random stream. Every draw consumes a fixed number of engine
/// outputs so that the position in the stream depends only on how many
/// variates were requested.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution. One engine output.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]. One engine output.
  double uniform_open_left() noexcept {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform index in [0, n). One engine output.
  std::size_t uniform_index(std::size_t n) noexcept {
    const auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return idx < n ? idx : n - 1;
  }

  /// Standard normal via Box-Muller, discarding the sine branch. Two engine
  /// outputs.
  double standard_normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_open_left()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ucbstab

#endif  // UCBSTAB_RANDOM_HPP_
