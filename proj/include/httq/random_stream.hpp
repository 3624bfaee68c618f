#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace httq {

enum class Purpose : std::uint8_t { arrivals, services, patience, initial, gaussian };

std::string_view to_string(Purpose p);

/// Identifies one independent variate sequence under a master seed.
/// `substream` separates several sequences of the same purpose within a
/// replication (e.g. the arrival and service noises of a limit sample).
struct StreamId {
  std::uint64_t replication = 0;
  Purpose purpose = Purpose::arrivals;
  std::uint32_t substream = 0;
};

/// xoshiro256** keyed through splitmix64 by (seed, replication, purpose,
/// substream). Integer arithmetic only up to the uniform draw, so a given key
/// yields the same sequence on every platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamId id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double standard_normal();
  /// Exponential with rate 1.
  double exponential();

  std::uint64_t seed() const { return seed_; }
  const StreamId& id() const { return id_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
  StreamId id_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// The per-replication bundle of streams used by the simulator.
struct StreamSet {
  StreamSet(std::uint64_t seed, std::uint64_t replication);

  RandomStream arrivals;
  RandomStream services;
  RandomStream patience;
  RandomStream initial;
};

}  // namespace httq
