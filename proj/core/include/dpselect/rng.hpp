#pragma once

#include <cstdint>

namespace dpselect {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes two ids into one, used to derive per-trial / per-cell stream ids
/// from a base id without collisions in practice.
inline std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

/// Deterministic random stream identified by (master_seed, stream_id).
///
/// The same pair always yields the same sample sequence, so trials can be
/// replayed exactly and run concurrently on disjoint streams. xoshiro256++
/// seeded through splitmix64.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {
    std::uint64_t sm = master_seed ^ 0x6a09e667f3bcc909ULL;
    sm = splitmix64(sm) ^ stream_id;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// A stream derived from this stream's identity; independent in practice.
  RngStream substream(std::uint64_t id) const {
    return RngStream(master_seed_, mix_ids(stream_id_, id));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in the open interval (0, 1); one u64 draw per sample.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform index in [0, n); one u64 draw. Requires n >= 1.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
};

}  // namespace dpselect
