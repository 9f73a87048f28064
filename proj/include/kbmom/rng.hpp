#pragma once

// Counter-based random streams.
//
// Every randomized task derives its own stream key from (master seed, phase tag,
// task indices) through a splitmix64-style avalanche. Parallel workers therefore
// produce the same numbers no matter how tasks are scheduled, which is what makes
// whole pipelines byte-identical across worker counts.

#include <cstdint>
#include <cmath>
#include <cstddef>
#include <vector>

namespace kbmom {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 output function (Steele et al. mixing constants).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Phase tags keep streams for different pipeline stages disjoint even when the
// numeric task indices coincide.
namespace tag {
inline constexpr std::uint64_t mixture     = 0x01;
inline constexpr std::uint64_t outliers    = 0x02;
inline constexpr std::uint64_t init_block  = 0x03;
inline constexpr std::uint64_t iter_block  = 0x04;
inline constexpr std::uint64_t mc_trial    = 0x05;
inline constexpr std::uint64_t repetition  = 0x06;
inline constexpr std::uint64_t restart     = 0x07;
inline constexpr std::uint64_t sweep       = 0x08;
inline constexpr std::uint64_t method      = 0x09;
inline constexpr std::uint64_t estimate    = 0x0a;
inline constexpr std::uint64_t block_kmom  = 0x0b;
inline constexpr std::uint64_t init_phase  = 0x0c;
}  // namespace tag

constexpr std::uint64_t derive_key(std::uint64_t master, std::uint64_t phase,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
    std::uint64_t h = mix64(master + kGamma);
    h = mix64(h ^ (phase * kGamma));
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

class RngStream {
public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix64(state_);
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Fixed-point multiply keeps the mapping exact and
    // platform-independent (bias < n / 2^64, irrelevant at these sample sizes).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller on the uniform stream; the second value of
    // each pair is cached so moments line up with the textbook transform.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_double();  // (0, 1]: keeps log() finite
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // First k entries of a Fisher-Yates pass over [0, n): a uniform draw without
    // replacement. k = n gives a full shuffle.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k < n ? k : n);
        return idx;
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kbmom
