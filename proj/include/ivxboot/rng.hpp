#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace ivxboot::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
inline constexpr const char* kGeneratorName = "splitmix64";

// splitmix64 output function (Steele/Lea/Flood finalizer).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Folds (seed, replication, channel, ...) into one stream key. Each part is
// avalanched before the next is absorbed, so adjacent keys decorrelate.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t k = 0;
  for (std::uint64_t p : parts) k = mix64(k + kGolden + p);
  return k;
}

// Channel tags keep the consumers of randomness on disjoint substreams: a
// bootstrap never perturbs the data stream of the replication it belongs to.
enum class Channel : std::uint64_t {
  innovations = 1,
  bootstrap = 2,
  path = 3,
  shuffle = 4,
};

// Counter-based splittable stream: the i-th output is mix64(key + i*golden),
// identical to seeding the reference splitmix64 with `key`.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer on {0, ..., n-1} (Lemire multiply-shift).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; fixed consumption of two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Stream make_stream(std::uint64_t seed, std::uint64_t rep, Channel channel) {
  return Stream(derive_key({seed, rep, static_cast<std::uint64_t>(channel)}));
}

inline Stream make_stream(std::uint64_t seed, std::uint64_t rep, Channel channel,
                          std::uint64_t sub) {
  return Stream(derive_key({seed, rep, static_cast<std::uint64_t>(channel), sub}));
}

}  // namespace ivxboot::rng
