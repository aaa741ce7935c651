#ifndef AREALRISK_RNG_HPP
#define AREALRISK_RNG_HPP

#include <cstdint>

namespace arealrisk {

// Counter-based pseudorandom generator shared by every stochastic routine in
// the library. All randomness is a pure function of (seed, stream, counter),
// which is what makes parallel runs reproducible: each unit of parallel work
// (a permutation, a Gibbs chain, a replicated dataset) owns its own stream
// and consumes it sequentially, so results do not depend on thread count.
//
// The generator is fully specified here rather than delegated to a platform
// default:
//
//   output(i) = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
//   key       = mix64(seed ^ mix64(stream * 0xD1B54A32D192ED03 + 0x8CB92BA72F3D8DD7))
//
// where mix64 is the SplitMix64 finalizer (Steele, Lea & Flood 2014). This is
// SplitMix64 evaluated at an arbitrary index, i.e. a 64-bit counter-based
// generator with random access.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed ^ mix64(stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    // Uniform on [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; used where log() or pow() must not see zero.
    double uniform01_open0() { return 1.0 - uniform01(); }

    // Unbiased-to-2^-64 integer in [0, n) via multiply-shift.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal deviate by inverse-CDF: Acklam's rational approximation
    // refined with one Halley step, so the draw is a deterministic function of
    // a single uniform (one counter tick per deviate).
    double normal();

    // Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape < 1 handled by the
    // usual boost Gamma(shape+1) * U^(1/shape).
    double gamma(double shape);

    // chi^2_k = 2 * Gamma(k/2, 1)
    double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream-id bases, spaced so per-index substreams never collide across
// purposes. Every parallel work item i uses stream base + i.
namespace streams {
inline constexpr std::uint64_t kMoranPermutation = 0x4D50ULL << 32;
inline constexpr std::uint64_t kGibbsChain       = 0x4743ULL << 32;
inline constexpr std::uint64_t kPosteriorRep     = 0x5052ULL << 32;
inline constexpr std::uint64_t kSurvey           = 0x5356ULL << 32;
inline constexpr std::uint64_t kCarField         = 0x4346ULL << 32;
inline constexpr std::uint64_t kRegression       = 0x5247ULL << 32;
inline constexpr std::uint64_t kFixture          = 0x4658ULL << 32;
}  // namespace streams

}  // namespace arealrisk

#endif
