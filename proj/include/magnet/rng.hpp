#pragma once

// Deterministic random number generation with named sub-streams.
//
// All randomness in the library flows through Rng (xoshiro256++ seeded via a
// splitmix64 finalizer). Sub-streams are derived from a master seed, a stream
// tag and an optional key, so independent consumers (edge sampling, feature
// noise, weight init, dropout, splits) never share state and results do not
// depend on iteration order. Only 64-bit integer arithmetic and IEEE doubles
// are involved in uniform draws, which keeps sampled graphs identical across
// platforms.

#include <array>
#include <cstdint>
#include <cmath>
#include <vector>

namespace magnet {

// splitmix64 finalizer: bijective avalanche mix on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream tags. Values are part of the reproducibility contract: changing them
// changes every derived seed.
enum class Stream : std::uint64_t {
    graph_edges = 1,  // DSBM pair sampling, keyed per unordered pair
    features = 2,     // synthetic node features
    init = 3,         // model parameter initialization
    dropout = 4,      // dropout masks, keyed per epoch
    split = 5,        // train/val/test selection
    negatives = 6,    // link negative sampling
    shuffle = 7,      // generic permutations
    graph_topology = 8 // random test graphs
};

// The master is mixed before the tag is folded in; xor-ing the raw tag into
// a raw master would let (master ^ tag) coincide across small seeds and hand
// two different (seed, stream) pairs the same derived state.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::uint64_t key = 0) {
    std::uint64_t h = mix64(mix64(master) ^
                            (0x8000000000000000ULL |
                             static_cast<std::uint64_t>(stream)));
    return mix64(h + 0xd1b54a32d192ed03ULL * (key + 1));
}

// xoshiro256++ (Blackman & Vigna). Small state, fast, well studied.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
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

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    // Standard normal via Box-Muller; second value cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline Rng stream_rng(std::uint64_t master, Stream stream,
                      std::uint64_t key = 0) {
    return Rng(derive_seed(master, stream, key));
}

}  // namespace magnet
