#include "ceapsk/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ceapsk {

bool ChannelRealization::usable() const noexcept {
    return std::any_of(gains.begin(), gains.end(),
                       [](cdouble g) { return std::abs(g) > 0.0; });
}

LinkBudget LinkBudget::for_snr(double snr, double path_loss, double noise_power) {
    if (!(snr > 0.0) || !(path_loss > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("link budget quantities must be positive");
    return {snr * noise_power / path_loss, path_loss, noise_power};
}

LinkBudget LinkBudget::reference(double snr) {
    return for_snr(snr, kReferencePathLoss, kReferenceNoisePower);
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

namespace {

struct Norms {
    double l1 = 0.0;
    double linf = 0.0;
};

Norms norms(std::span<const cdouble> gains) noexcept {
    Norms n;
    for (const auto g : gains) {
        const double a = std::abs(g);
        n.l1 += a;
        n.linf = std::max(n.linf, a);
    }
    return n;
}

}  // namespace

double annulus_ratio(std::span<const cdouble> gains) noexcept {
    const Norms n = norms(gains);
    if (!(n.l1 > 0.0)) return 0.0;
    return std::max(2.0 * n.linf - n.l1, 0.0) / n.l1;
}

Annulus compute_annulus(const ChannelRealization& h, double power) {
    if (!(power > 0.0)) throw std::invalid_argument("transmit power must be positive");
    if (h.gains.empty()) throw std::invalid_argument("channel has no antennas");

    const Norms n = norms(h.gains);
    const double scale = std::sqrt(power / static_cast<double>(h.num_antennas()));
    Annulus a;
    a.outer = scale * n.l1;
    a.inner = scale * std::max(2.0 * n.linf - n.l1, 0.0);
    a.ratio = a.outer > 0.0 ? a.inner / a.outer : 0.0;
    return a;
}

ChannelRealization sample_rayleigh(std::size_t antennas, double path_loss, StreamRng& rng) {
    if (antennas == 0) throw std::invalid_argument("at least one antenna required");
    ChannelRealization h;
    h.gains.reserve(antennas);
    for (std::size_t i = 0; i < antennas; ++i) h.gains.push_back(rng.complex_normal(path_loss));
    return h;
}

ChannelRealization sample_rayleigh(std::size_t antennas, double path_loss, std::uint64_t seed) {
    StreamRng rng(seed, 0, Substream::Channel);
    return sample_rayleigh(antennas, path_loss, rng);
}

double ratio_cdf_m2(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("ratio_cdf_m2: x must lie in [0, 1], got " + std::to_string(x));
    return 2.0 * x / (1.0 + x * x);
}

ChannelRealization mmse_estimate(const ChannelRealization& h, const CsitModel& csit,
                                 StreamRng& rng) {
    if (!(csit.training_snr >= 0.0))
        throw std::invalid_argument("training SNR must be nonnegative");
    const double var = csit.error_variance();
    ChannelRealization est = h;
    for (auto& g : est.gains) g -= rng.complex_normal(var);
    return est;
}

ChannelRealization mmse_estimate(const ChannelRealization& h, const CsitModel& csit,
                                 std::uint64_t seed) {
    StreamRng rng(seed, 0, Substream::Estimation);
    return mmse_estimate(h, csit, rng);
}

}  // namespace ceapsk
