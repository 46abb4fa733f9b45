#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ceapsk/rng.hpp"

namespace ceapsk {

using cdouble = std::complex<double>;

/// Per-antenna gains of a MISO flat-fading channel.
struct ChannelRealization {
    std::vector<cdouble> gains;

    std::size_t num_antennas() const noexcept { return gains.size(); }
    /// True when at least one gain is nonzero.
    bool usable() const noexcept;
};

/**
 * Ring of noise-free receive points reachable with per-antenna constant
 * envelope transmission: inner <= |d| <= outer.
 *
 * A zero channel yields outer == 0; such an annulus is degenerate and
 * carries ratio 0. Simulators count it as an outage.
 */
struct Annulus {
    double inner = 0.0;
    double outer = 0.0;
    double ratio = 0.0;

    bool degenerate() const noexcept { return !(outer > 0.0); }
    bool contains(double modulus, double slack = 0.0) const noexcept {
        return modulus >= inner - slack && modulus <= outer + slack;
    }
};

/// Linear-domain link budget. dB conversions only happen at I/O boundaries.
struct LinkBudget {
    double total_power = 1.0;
    double path_loss = 1.0;
    double noise_power = 1.0;

    double snr() const noexcept { return total_power * path_loss / noise_power; }

    /// Keeps path loss and noise, solves for the power giving `snr`.
    static LinkBudget for_snr(double snr, double path_loss, double noise_power);
    /// beta = -90 dB, sigma^2 = -94 dBm.
    static LinkBudget reference(double snr);
};

/// MMSE channel-estimation error model for reverse-link training.
struct CsitModel {
    double training_snr = 0.0;  // linear
    double path_loss = 1.0;

    /// Per-element variance of the estimation error.
    double error_variance() const noexcept { return path_loss / (1.0 + training_snr); }
};

inline constexpr double kReferencePathLoss = 1e-9;          // -90 dB
inline constexpr double kReferenceNoisePower = 3.981071705534973e-13;  // -94 dBm in W

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

Annulus compute_annulus(const ChannelRealization& h, double power);
/// Ratio inner/outer, independent of the transmit power. 0 for a zero channel.
double annulus_ratio(std::span<const cdouble> gains) noexcept;

ChannelRealization sample_rayleigh(std::size_t antennas, double path_loss, StreamRng& rng);
/// Deterministic in `seed`.
ChannelRealization sample_rayleigh(std::size_t antennas, double path_loss, std::uint64_t seed);

/// CDF of inner/outer for two i.i.d. Rayleigh gains: 2x / (1 + x^2).
double ratio_cdf_m2(double x);

/// Transmit-side estimate h - dh with dh ~ CN(0, csit.error_variance()).
ChannelRealization mmse_estimate(const ChannelRealization& h, const CsitModel& csit, StreamRng& rng);
ChannelRealization mmse_estimate(const ChannelRealization& h, const CsitModel& csit,
                                 std::uint64_t seed);

}  // namespace ceapsk
