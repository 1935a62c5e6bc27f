#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "impartial/rational.hpp"

namespace impartial::detail {

// SplitMix64; the per-trial stream is seeded from (seed, trial index) only,
// so parallel and sequential runs draw identical realizations.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t trial) : state_(seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1))) {
        next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Unbiased draw from [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    std::vector<int> permutation(int n) {
        std::vector<int> p(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(p[static_cast<std::size_t>(i)],
                      p[static_cast<std::size_t>(below(static_cast<std::uint64_t>(i) + 1))]);
        return p;
    }

private:
    std::uint64_t state_;
};

// u64 draw against an exact cumulative probability: u/2^64 < num/den.
inline bool below_fraction(std::uint64_t u, const Rational& cum) {
    unsigned __int128 lhs = static_cast<unsigned __int128>(u) * static_cast<unsigned __int128>(cum.den());
    unsigned __int128 rhs = static_cast<unsigned __int128>(cum.num()) << 64;
    return lhs < rhs;
}

} // namespace impartial::detail
