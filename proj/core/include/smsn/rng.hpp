#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace smsn {

/// Reproducible random stream keyed by (seed, stream id).
///
/// The engine is xoshiro256** with its state expanded from the key through
/// splitmix64, so distinct stream ids give statistically independent
/// sequences and a stream never depends on which thread consumes it.
/// Satisfies UniformRandomBitGenerator, so <random> distributions accept it.
/// Single owner: not safe to share between threads.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma with the given shape and scale (mean = shape * scale).
  double gamma(double shape, double scale);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
  std::normal_distribution<double> normal_;
};

/// Packs two 32-bit indices into one stream id (e.g. cell, replication).
constexpr std::uint64_t stream_key(std::uint32_t major, std::uint32_t minor) {
  return (static_cast<std::uint64_t>(major) << 32) | minor;
}

}  // namespace smsn
