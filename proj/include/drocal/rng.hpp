#pragma once

#include <cstdint>
#include <string_view>

namespace drocal {

// Counter-based seeding: every sampled point gets its own generator derived
// from (root seed, stream name, index). Draw j therefore never depends on
// draws 0..j-1, so parallel generation matches serial generation exactly.

// SplitMix64 finalizer; also used as the mixing function for key derivation.
std::uint64_t mix64(std::uint64_t x);

// A derived seed key. Children are derived by salting with integers or names.
struct SeedKey {
    std::uint64_t state = 0;

    SeedKey child(std::uint64_t salt) const;
    SeedKey child(std::string_view name) const;
};

SeedKey root_key(std::uint64_t seed);

// Small per-point generator (SplitMix64 sequence).
class Stream {
  public:
    explicit Stream(SeedKey key) : state_(key.state) {}

    std::uint64_t next_u64();
    // uniform on [0, 1)
    double next_double();
    // uniform on [lo, hi)
    double next_uniform(double lo, double hi);
    // standard normal (polar method)
    double next_normal();
    // Gamma(shape, 1), shape > 0 (Marsaglia-Tsang, with boost for shape < 1)
    double next_gamma(double shape);
    // Beta(alpha, beta), alpha, beta > 0
    double next_beta(double alpha, double beta);

  private:
    std::uint64_t state_;
};

// Generator for the j-th point of the stream rooted at `key`.
inline Stream stream_at(SeedKey key, std::uint64_t index) {
    return Stream(key.child(index));
}

} // namespace drocal
