#pragma once

#include <cstdint>
#include <string_view>

namespace tadac {

__extension__ using uint128 = unsigned __int128;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for one (record, purpose) pair: independent of processing order.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view image_id,
                                    std::string_view tag) noexcept {
  return mix64(mix64(global_seed ^ fnv1a64(image_id)) ^ fnv1a64(tag));
}

/// Counter-based generator: draw i is a pure function of (key, i), so any
/// partition of the draws across threads produces the same values.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter + 0x632be59bd9b4e019ULL));
  }

  constexpr std::uint64_t next() noexcept { return at(counter_++); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  constexpr double uniform_at(std::uint64_t counter) const noexcept {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) by multiply-shift; n must be positive.
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<uint128>(next()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (consumes two draws).
  double normal() noexcept;

  constexpr std::uint64_t counter() const noexcept { return counter_; }
  constexpr void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tadac
