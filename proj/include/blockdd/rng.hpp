#pragma once

#include <cstdint>
#include <vector>

namespace blockdd {

// SplitMix64: 64-bit splittable PRNG (Steele/Lea/Flood). Fixed algorithm so
// seeded goldens reproduce across platforms; split() derives independent
// streams.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // unbiased-enough for desk-scale n
    uint64_t below(uint64_t n) { return next() % n; }

    SplitMix64 split() { return SplitMix64(next() ^ 0x5851f42d4c957f2dULL); }

    // seeded Fisher-Yates permutation of 0..n-1
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) {
            int j = (int)below((uint64_t)i + 1);
            std::swap(p[i], p[j]);
        }
        return p;
    }
};

}  // namespace blockdd
