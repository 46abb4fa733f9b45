#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ceapsk {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Named substreams used by the simulators. Keeping them distinct means the
/// channel draw of a trial never depends on how many noise samples it used.
enum class Substream : std::uint64_t {
    Channel = 1,
    Symbol = 2,
    Noise = 3,
    Estimation = 4,
    General = 5,
};

/**
 * Counter-keyed random stream.
 *
 * A stream is addressed by (seed, index, substream); two streams with any
 * differing coordinate are statistically independent. Monte Carlo trials
 * use their trial index as the stream index so results do not depend on
 * how trials are distributed across workers.
 *
 * Satisfies std::uniform_random_bit_generator. Gaussian draws use
 * Box-Muller on the internal uniforms rather than std::normal_distribution
 * so the sequences are identical across standard library implementations.
 */
class StreamRng {
  public:
    using result_type = std::uint64_t;

    constexpr StreamRng(std::uint64_t seed, std::uint64_t index,
                        Substream sub = Substream::General) noexcept
        : state_(mix64(seed ^ mix64(index * 0x9e3779b97f4a7c15ULL +
                                    mix64(static_cast<std::uint64_t>(sub))))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's multiply-shift; the bias is < n / 2^64, negligible here.
        __extension__ using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * n) >> 64);
    }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Circularly-symmetric complex Gaussian CN(0, variance).
    std::complex<double> complex_normal(double variance) noexcept {
        const double scale = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {scale * re, scale * im};
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ceapsk
