#include "ceapsk/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

namespace ceapsk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string infeasible_message(const Annulus& a, double modulus) {
    std::ostringstream os;
    os << "target modulus " << modulus << " outside reachable annulus [" << a.inner << ", "
       << a.outer << "]";
    return os.str();
}

double wrap_phase(double x) noexcept {
    double w = std::abs(x) < 4.0 * kTwoPi ? x : std::fmod(x, kTwoPi);
    while (w < 0.0) w += kTwoPi;
    while (w >= kTwoPi) w -= kTwoPi;
    return w;
}

}  // namespace

InfeasibleTarget::InfeasibleTarget(const Annulus& annulus, double modulus)
    : std::domain_error(infeasible_message(annulus, modulus)), annulus_(annulus),
      modulus_(modulus) {}

cdouble synthesize(const ChannelRealization& h, double power, const std::vector<double>& phases) {
    const double scale = std::sqrt(power / static_cast<double>(h.num_antennas()));
    cdouble sum{0.0, 0.0};
    for (std::size_t i = 0; i < h.gains.size(); ++i) sum += h.gains[i] * std::polar(1.0, phases[i]);
    return scale * sum;
}

PhaseSolution map_point_to_phases(const ChannelRealization& h, double power, cdouble target) {
    const Annulus annulus = compute_annulus(h, power);
    const double modulus = std::abs(target);
    if (annulus.degenerate() || !annulus.contains(modulus, kFeasibilitySlack * annulus.outer))
        throw InfeasibleTarget(annulus, modulus);

    const std::size_t m = h.num_antennas();
    const double scale = std::sqrt(power / static_cast<double>(m));
    // amp | tail (m + 1), in one buffer.
    std::vector<double> buf(2 * m + 1, 0.0);
    const std::span<double> amp(buf.data(), m);
    const std::span<double> tail(buf.data() + m, m + 1);
    for (std::size_t i = 0; i < m; ++i) amp[i] = scale * std::sqrt(std::norm(h.gains[i]));

    // Antennas by decreasing amplitude, ties in index order.
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i;
        for (; j > 0 && amp[order[j - 1]] < amp[i]; --j) order[j] = order[j - 1];
        order[j] = i;
    }

    // tail[k]: outer radius reachable by antennas order[k..].
    for (std::size_t k = m; k-- > 0;) tail[k] = tail[k + 1] + amp[order[k]];

    // Unit phasor of each antenna's received contribution.
    std::vector<cdouble> unit(m, cdouble{1.0, 0.0});
    cdouble rest = target;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double a = amp[order[k]];
        const double outer = tail[k + 1];
        const double inner = std::max(amp[order[k + 1]] - tail[k + 2], 0.0);
        const double mod = std::sqrt(std::norm(rest));

        double want;
        if (k + 2 == m) {
            want = outer;  // the final antenna reaches exactly its own amplitude
        } else {
            const double lo = std::max(std::abs(mod - a), inner);
            const double hi = std::min(mod + a, outer);
            want = lo <= hi ? 0.5 * (lo + hi) : (std::abs(mod - a) > outer ? outer : inner);
        }

        if (a > 0.0 && mod > 0.0) {
            const double c = std::clamp((mod * mod + a * a - want * want) / (2.0 * a * mod), -1.0, 1.0);
            unit[order[k]] = (rest / mod) * cdouble(c, std::sqrt(1.0 - c * c));
        }
        rest -= a * unit[order[k]];
    }
    const double last = std::sqrt(std::norm(rest));
    if (last > 0.0) unit[order[m - 1]] = rest / last;

    PhaseSolution sol;
    sol.target = target;
    sol.phases.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const cdouble g = h.gains[i];
        sol.phases[i] = wrap_phase(std::arg(g == cdouble{} ? unit[i] : unit[i] * std::conj(g)));
    }
    sol.residual_error = std::abs(synthesize(h, power, sol.phases) - target);
    return sol;
}

cdouble clip_to_annulus(cdouble target, const Annulus& annulus) noexcept {
    const double mod = std::abs(target);
    if (mod > annulus.outer) return target * (annulus.outer / mod);
    if (mod < annulus.inner) {
        if (mod > 0.0) return target * (annulus.inner / mod);
        return {annulus.inner, 0.0};
    }
    return target;
}

PhaseSolution realize_symbol(const ChannelRealization& h, double power, cdouble symbol,
                             double alpha, Clipping clipping) {
    cdouble target = alpha * symbol;
    if (clipping == Clipping::Radial) {
        const Annulus annulus = compute_annulus(h, power);
        if (!annulus.contains(std::abs(target), kFeasibilitySlack * annulus.outer))
            target = clip_to_annulus(target, annulus);
    }
    return map_point_to_phases(h, power, target);
}

cdouble egt_transmit(const ChannelRealization& h, double power, cdouble symbol) {
    const double scale = std::sqrt(power / static_cast<double>(h.num_antennas()));
    cdouble sum{0.0, 0.0};
    for (const auto g : h.gains) {
        const cdouble x = scale * std::polar(1.0, -std::arg(g)) * symbol;
        sum += g * x;
    }
    return sum;
}

}  // namespace ceapsk
