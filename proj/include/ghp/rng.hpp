#pragma once

#include <cstdint>
#include <span>

namespace ghp {

// splitmix64, used to expand seeds into full generator states.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator. Hand-rolled so that simulation streams are
/// bit-identical across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    /// Independent substream: replication `stream` of master seed `master`.
    static Rng substream(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t sm = master;
        std::uint64_t a = splitmix64_next(sm);
        std::uint64_t b = stream + 0x9e3779b97f4a7c15ULL;
        return Rng(a ^ splitmix64_next(b));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Index drawn from a probability vector (clamps to the last entry,
    /// so slightly unnormalized rows never yield an out-of-range index).
    int categorical(std::span<const double> probs) {
        double u = next_unit();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace ghp
