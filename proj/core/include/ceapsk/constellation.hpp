#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace ceapsk {

using cdouble = std::complex<double>;

/// Uniformly spaced points on one ring: radius * exp(j(2 pi k / count + offset)).
struct Ring {
    int count = 1;
    double radius = 1.0;
    double offset = 0.0;

    bool operator==(const Ring&) const = default;
};

/// A set of signal points normalized to unit peak modulus.
struct PointSet {
    std::vector<cdouble> points;

    std::size_t size() const noexcept { return points.size(); }
    double min_modulus() const noexcept;
    double max_modulus() const noexcept;
    /// min |s| / max |s|; the largest annulus ratio this set fits.
    double modulus_ratio() const noexcept;
};

/**
 * Multi-ring APSK constellation.
 *
 * Ring 0 is the outer ring with radius 1 and offset 0. Radii are
 * non-increasing with ring index; two rings may share radius 1 when the
 * optimum collapses onto a single circle (an interleaved PSK).
 */
class ApskConstellation {
  public:
    /// Throws std::invalid_argument on a malformed ring list.
    explicit ApskConstellation(std::vector<Ring> rings);

    static ApskConstellation psk(int size);

    const std::vector<Ring>& rings() const noexcept { return rings_; }
    int size() const noexcept;
    PointSet points() const;

  private:
    std::vector<Ring> rings_;
};

/// Intra-ring distance between neighbouring points; nullopt for a lone point.
std::optional<double> intra_ring_med(int count, double radius);

/// max over (m, n) of cos(2 pi n / count_l + offset_l - offset_h - 2 pi m / count_h).
double ring_pair_max_cosine(int count_l, int count_h, double offset_l, double offset_h);

double inter_ring_med(int count_l, int count_h, double offset_l, double offset_h,
                      double radius_l, double radius_h);

struct InterRingDistance {
    std::size_t outer = 0;
    std::size_t inner = 0;
    double distance = 0.0;
};

struct MedReport {
    double med = 0.0;
    /// Per ring; nullopt for single-point rings.
    std::vector<std::optional<double>> intra;
    std::vector<InterRingDistance> inter;
    /// Indices into the point list of the closest pair.
    std::pair<std::size_t, std::size_t> closest{0, 0};
};

/// Exhaustive pairwise minimum distance. Throws for fewer than two points.
MedReport med(const PointSet& points);
/// Closed-form ring distances plus the exhaustive closest pair.
MedReport med(const ApskConstellation& constellation);

/// True iff `ratio` <= min |s| / max |s|.
bool is_feasible(const PointSet& points, double ratio) noexcept;

/// BPSK, QPSK, rectangular 8-QAM, 16-QAM, cross 32-QAM, 64-QAM; unit peak.
PointSet qam_family(int size);
PointSet psk_points(int size);

/// Gaussian tail probability, via erfc.
double q_function(double x) noexcept;

/// (N - 1) Q(R d_min / (sigma sqrt 2)) without clamping.
double ser_union_bound_raw(int size, double d_min, double outer_radius, double noise_power);
/// Same, clamped to [0, 1].
double ser_union_bound(int size, double d_min, double outer_radius, double noise_power);

/// Index of the nearest point (maximum-likelihood detection under AWGN).
std::size_t nearest_point(const std::vector<cdouble>& points, cdouble y) noexcept;

}  // namespace ceapsk
