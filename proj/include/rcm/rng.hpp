#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace rcm {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive hash of a key tuple; the basis of all counter-based streams.
inline std::uint64_t hash_keys(std::uint64_t seed, std::initializer_list<std::int64_t> keys) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
    for (std::int64_t k : keys) h = splitmix64(h ^ std::uint64_t(k));
    return h;
}

// uniform in the open interval (0,1)
inline double u01(std::uint64_t h) {
    return (double(h >> 11) + 0.5) * 0x1.0p-53;
}

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            w = splitmix64(z);
        }
        have_spare_ = false;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform() { return u01((*this)()); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    int below(int n) { return int(uniform() * n); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform()));
        double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Seed of the i-th member of a family derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::int64_t family, std::int64_t i) {
    return hash_keys(master, {family, i});
}

inline Xoshiro256 make_stream(std::uint64_t seed, std::initializer_list<std::int64_t> keys) {
    return Xoshiro256(hash_keys(seed, keys));
}

}  // namespace rcm
