#include "drocal/rng.hpp"

#include <cmath>

#include "drocal/errors.hpp"

namespace drocal {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SeedKey SeedKey::child(std::uint64_t salt) const {
    return SeedKey{mix64(state ^ mix64(salt + 0x2545f4914f6cdd1dULL))};
}

SeedKey SeedKey::child(std::string_view name) const {
    // FNV-1a over the name, then mixed with the parent state.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return SeedKey{mix64(state ^ mix64(h))};
}

SeedKey root_key(std::uint64_t seed) { return SeedKey{mix64(seed)}; }

std::uint64_t Stream::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Stream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double Stream::next_normal() {
    // Marsaglia polar method; consumes a variable number of uniforms.
    for (;;) {
        double u = 2.0 * next_double() - 1.0;
        double v = 2.0 * next_double() - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

double Stream::next_gamma(double shape) {
    if (!(shape > 0.0)) {
        throw DomainError("gamma shape must be positive");
    }
    if (shape < 1.0) {
        // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
        double g = next_gamma(shape + 1.0);
        double u = next_double();
        while (u <= 0.0) u = next_double();
        return g * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = next_normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = next_double();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Stream::next_beta(double alpha, double beta) {
    double x = next_gamma(alpha);
    double y = next_gamma(beta);
    return x / (x + y);
}

} // namespace drocal
