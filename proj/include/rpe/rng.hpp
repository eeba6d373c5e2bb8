#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rpe {

// Deterministic splitmix64 generator. Used everywhere instead of <random>
// distributions so that byte-identical output does not depend on the standard
// library implementation.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; draws two uniforms per call, returns the cosine branch.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) {
        // modulo bias is irrelevant at desk scale but avoid it anyway
        uint64_t threshold = (~n + 1) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    uint64_t state_;
};

// Counter-based stream derivation: mixes (seed, index) so per-trial streams
// are independent of evaluation order and of each other.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (index + 0x632be59bd9b4e019ULL));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng derive_stream(uint64_t seed, uint64_t index) { return Rng(derive_seed(seed, index)); }

} // namespace rpe
