#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace mribow {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// Derives an independent stream key from a root seed and a path of parts.
/// Each part is folded in with one SplitMix64 round, so streams for
/// different paths are decorrelated and the derivation is order sensitive.
constexpr std::uint64_t derive_stream(std::uint64_t seed,
                                      std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = seed;
    for (std::uint64_t p : parts) {
        s = mix64(s + kGolden);
        s ^= mix64(p + 0xd1b54a32d192ed03ull);
    }
    return s;
}

/// Deterministic sequential generator: the SplitMix64 sequence.
///
/// All randomness in this project flows through this class (or stateless
/// `derive_stream` keys feeding it), never through std:: distributions,
/// so results are reproducible across standard libraries. Floating-point
/// helpers use only +,-,*,/ and sqrt, which are exactly rounded by IEEE 754.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return mix64(state_ += kGolden); }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [-sqrt(3), sqrt(3)): zero mean, unit variance.
    double next_symmetric() {
        return (next_double() - 0.5) * kSqrt12;
    }

    /// Uniform integer in [0, n) via the multiply-shift reduction.
    std::uint64_t next_below(std::uint64_t n) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((u128(next_u64()) * u128(n)) >> 64);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    static constexpr double kSqrt12 = 3.4641016151377543863532082929962;  // sqrt(12)
    std::uint64_t state_;
};

}  // namespace mribow
