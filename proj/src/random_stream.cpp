#include "httq/random_stream.hpp"

#include <cmath>

namespace httq {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::string_view to_string(Purpose p) {
  switch (p) {
    case Purpose::arrivals: return "arrivals";
    case Purpose::services: return "services";
    case Purpose::patience: return "patience";
    case Purpose::initial: return "initial";
    case Purpose::gaussian: return "gaussian";
  }
  return "unknown";
}

RandomStream::RandomStream(std::uint64_t seed, StreamId id) : seed_(seed), id_(id) {
  std::uint64_t key = seed;
  std::uint64_t mix = splitmix64(key);
  mix ^= 0xd1342543de82ef95ULL * (id.replication + 1);
  mix = rotl(mix, 17) ^ (static_cast<std::uint64_t>(id.purpose) << 56) ^
        (static_cast<std::uint64_t>(id.substream) << 24);
  for (auto& word : state_) word = splitmix64(mix);
  // all-zero state is the one forbidden xoshiro state
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

StreamSet::StreamSet(std::uint64_t seed, std::uint64_t replication)
    : arrivals(seed, {replication, Purpose::arrivals, 0}),
      services(seed, {replication, Purpose::services, 0}),
      patience(seed, {replication, Purpose::patience, 0}),
      initial(seed, {replication, Purpose::initial, 0}) {}

}  // namespace httq
