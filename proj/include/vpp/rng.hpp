#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vpp {

// Deterministic random stream with keyed derivation. A stream is identified
// by 64 bits of key material produced by chaining splitmix64 over the master
// seed and a list of key components, so any (seed, indices...) tuple maps to
// the same sample sequence no matter which thread consumes it or in what
// order streams are created.
class RngStream {
public:
    explicit RngStream(std::uint64_t key_material)
        : key_(key_material), gen_(key_material) {}

    static std::uint64_t mix(std::uint64_t state, std::uint64_t value) {
        std::uint64_t z = state ^ (value + 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static RngStream derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys) {
        std::uint64_t s = mix(0x6a09e667f3bcc908ULL, master_seed);
        for (auto k : keys) s = mix(s, k);
        return RngStream(s);
    }

    // Child stream for an independent purpose; does not advance this stream.
    RngStream fork(std::uint64_t tag) const { return RngStream(mix(key_, tag)); }

    double normal() { return normal_(gen_); }

    std::uint8_t bit() { return static_cast<std::uint8_t>(gen_() & 1u); }

    // Uniform over [0, n) by rejection, bias-free.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = gen_();
        } while (r >= limit);
        return r % n;
    }

    int int_in(int lo, int hi) {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t key_;
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace vpp
