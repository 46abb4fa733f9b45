#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "ceapsk/channel.hpp"

namespace ceapsk {

/// Per-antenna transmit phases realizing a noise-free receive point.
struct PhaseSolution {
    std::vector<double> phases;  // in [0, 2 pi), one per antenna
    cdouble target;
    /// |h^T x - target|.
    double residual_error = 0.0;
};

/// Raised when a target lies outside the reachable annulus.
class InfeasibleTarget : public std::domain_error {
  public:
    InfeasibleTarget(const Annulus& annulus, double modulus);
    const Annulus& annulus() const noexcept { return annulus_; }
    double modulus() const noexcept { return modulus_; }

  private:
    Annulus annulus_;
    double modulus_;
};

/// Absolute slack on the annulus test, relative to the outer radius.
inline constexpr double kFeasibilitySlack = 1e-12;

/// sqrt(P / M) * sum_i h_i exp(j theta_i).
cdouble synthesize(const ChannelRealization& h, double power, const std::vector<double>& phases);

/**
 * Constant-envelope phases with h^T x = target.
 *
 * Antennas are visited in order of decreasing gain magnitude. Each one
 * places its phasor so the remaining target stays at the centre of the
 * modulus range the other antennas can still reach; the last pair closes
 * with an exact two-circle intersection, taking the branch where the first
 * phasor leads the remaining target by an angle in [0, pi].
 */
PhaseSolution map_point_to_phases(const ChannelRealization& h, double power, cdouble target);

/// Radial projection of `target` onto the annulus (angle 0 for the origin).
cdouble clip_to_annulus(cdouble target, const Annulus& annulus) noexcept;

enum class Clipping { Off, Radial };

/// Realizes alpha * s; infeasible targets are projected when clipping is on.
PhaseSolution realize_symbol(const ChannelRealization& h, double power, cdouble symbol,
                             double alpha, Clipping clipping = Clipping::Off);

/// Equal gain transmission x_i = sqrt(P / M) exp(-j arg h_i) s; returns h^T x.
cdouble egt_transmit(const ChannelRealization& h, double power, cdouble symbol);

}  // namespace ceapsk
