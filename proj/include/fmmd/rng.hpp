#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace fmmd {

// SplitMix64 step, used for seed mixing and counter-based draws.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream seed derived from a master seed. Streams with distinct
// ids never share state, so trials/permutations can run in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master ^ 0x6a09e667f3bcc909ULL) + stream);
}

// mt19937_64 with explicit Box-Muller normals. The engine output is pinned by
// the standard, and we avoid std::normal_distribution whose algorithm is
// implementation-defined, so streams reproduce across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi_u2 = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(two_pi_u2);
        have_spare_ = true;
        return r * std::cos(two_pi_u2);
    }

    // Student-t with 5 degrees of freedom: normal over sqrt(chi^2_5 / 5).
    double student_t5() {
        const double z = normal();
        double v = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double g = normal();
            v += g * g;
        }
        return z / std::sqrt(v / 5.0);
    }

    // unbiased integer in [0, bound), bound > 0
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x = eng_();
        while (x >= limit) x = eng_();
        return x % bound;
    }

    template <typename RandomIt>
    void shuffle(RandomIt first, RandomIt last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            std::swap(first[i - 1], first[below(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Standard normal addressed by (seed, hi, lo) counters; evaluation order never
// changes the value, which keeps parallel random-feature Grams reproducible.
inline double counter_normal(std::uint64_t seed, std::uint64_t hi, std::uint64_t lo) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(hi + 0x9e3779b97f4a7c15ULL));
    h = splitmix64(h ^ splitmix64(lo + 0x3c6ef372fe94f82bULL));
    const std::uint64_t a = splitmix64(h);
    const std::uint64_t b = splitmix64(a);
    double u1 = static_cast<double>(a >> 11) * 0x1.0p-53;
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

}  // namespace fmmd
