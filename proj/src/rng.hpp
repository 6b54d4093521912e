#pragma once

#include <cstdint>

namespace mcb {

// Counter-based random stream. A draw is addressed by its index, so draws
// can be replayed in any order (backward composition needs draw t=n first)
// and replica simulations stay reproducible across thread counts.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {
    key_ = mix(mix(seed_ + 0x9e3779b97f4a7c15ull) ^
               (stream_ * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + counter * 0x9e3779b97f4a7c15ull);
  }

  // Uniform on the open interval (0,1); safe as input to inverse CDFs.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  RngStream substream(std::uint64_t offset) const {
    return RngStream(seed_, stream_ + offset);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
};

}  // namespace mcb
