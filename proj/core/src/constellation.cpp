#include "ceapsk/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ceapsk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PointSet normalized(std::vector<cdouble> pts) {
    double peak = 0.0;
    for (const auto p : pts) peak = std::max(peak, std::abs(p));
    for (auto& p : pts) p /= peak;
    return PointSet{std::move(pts)};
}

/// Odd-integer grid {+-1, +-3, ...} of the given width and height.
std::vector<cdouble> odd_grid(int width, int height) {
    std::vector<cdouble> pts;
    pts.reserve(static_cast<std::size_t>(width * height));
    for (int iy = 0; iy < height; ++iy)
        for (int ix = 0; ix < width; ++ix)
            pts.emplace_back(2 * ix - (width - 1), 2 * iy - (height - 1));
    return pts;
}

}  // namespace

double PointSet::min_modulus() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (const auto p : points) m = std::min(m, std::abs(p));
    return m;
}

double PointSet::max_modulus() const noexcept {
    double m = 0.0;
    for (const auto p : points) m = std::max(m, std::abs(p));
    return m;
}

double PointSet::modulus_ratio() const noexcept {
    const double peak = max_modulus();
    return peak > 0.0 ? min_modulus() / peak : 0.0;
}

ApskConstellation::ApskConstellation(std::vector<Ring> rings) : rings_(std::move(rings)) {
    if (rings_.empty()) throw std::invalid_argument("constellation needs at least one ring");
    if (rings_.front().radius != 1.0 || rings_.front().offset != 0.0)
        throw std::invalid_argument("outer ring must have radius 1 and offset 0");
    for (std::size_t l = 0; l < rings_.size(); ++l) {
        const Ring& r = rings_[l];
        if (r.count < 1) throw std::invalid_argument("ring point count must be positive");
        // A lone point may sit at the origin.
        const bool radius_ok = r.count == 1 ? (r.radius >= 0.0 && r.radius <= 1.0)
                                            : (r.radius > 0.0 && r.radius <= 1.0);
        if (!radius_ok) throw std::invalid_argument("ring radius must lie in (0, 1]");
        if (!(r.offset >= 0.0 && r.offset < kTwoPi))
            throw std::invalid_argument("ring offset must lie in [0, 2pi)");
        if (l > 0 && r.radius > rings_[l - 1].radius)
            throw std::invalid_argument("ring radii must be non-increasing");
    }
}

ApskConstellation ApskConstellation::psk(int size) {
    return ApskConstellation({Ring{size, 1.0, 0.0}});
}

int ApskConstellation::size() const noexcept {
    int n = 0;
    for (const auto& r : rings_) n += r.count;
    return n;
}

PointSet ApskConstellation::points() const {
    PointSet s;
    s.points.reserve(static_cast<std::size_t>(size()));
    for (const auto& r : rings_)
        for (int k = 0; k < r.count; ++k)
            s.points.push_back(std::polar(r.radius, kTwoPi * k / r.count + r.offset));
    return s;
}

std::optional<double> intra_ring_med(int count, double radius) {
    if (count < 1) throw std::invalid_argument("intra_ring_med: count must be positive");
    if (count == 1) return std::nullopt;
    if (!(radius > 0.0)) throw std::invalid_argument("intra_ring_med: radius must be positive");
    return radius * std::sqrt(2.0 * (1.0 - std::cos(kTwoPi / count)));
}

double ring_pair_max_cosine(int count_l, int count_h, double offset_l, double offset_h) {
    // The angle differences 2 pi (n / N_l - m / N_h) form the lattice
    // 2 pi / lcm(N_l, N_h) Z, so only the nearest lattice point matters.
    const double step = kTwoPi / std::lcm(count_l, count_h);
    const double gap = std::abs(std::remainder(offset_l - offset_h, step));
    return std::cos(gap);
}

double inter_ring_med(int count_l, int count_h, double offset_l, double offset_h,
                      double radius_l, double radius_h) {
    if (!(radius_l >= 0.0) || !(radius_h >= 0.0))
        throw std::invalid_argument("inter_ring_med: radii must be nonnegative");
    const double c = ring_pair_max_cosine(count_l, count_h, offset_l, offset_h);
    const double sq = radius_l * radius_l + radius_h * radius_h - 2.0 * radius_l * radius_h * c;
    return std::sqrt(std::max(sq, 0.0));
}

MedReport med(const PointSet& s) {
    if (s.size() < 2) throw std::invalid_argument("MED needs at least two points");
    MedReport rep;
    rep.med = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const double d = std::abs(s.points[i] - s.points[j]);
            if (d < rep.med) {
                rep.med = d;
                rep.closest = {i, j};
            }
        }
    return rep;
}

MedReport med(const ApskConstellation& c) {
    MedReport rep = med(c.points());
    const auto& rings = c.rings();
    for (const auto& r : rings) rep.intra.push_back(intra_ring_med(r.count, r.radius));
    for (std::size_t l = 0; l < rings.size(); ++l)
        for (std::size_t h = l + 1; h < rings.size(); ++h)
            rep.inter.push_back({l, h,
                                 inter_ring_med(rings[l].count, rings[h].count, rings[l].offset,
                                                rings[h].offset, rings[l].radius,
                                                rings[h].radius)});
    return rep;
}

bool is_feasible(const PointSet& points, double ratio) noexcept {
    return points.modulus_ratio() >= ratio;
}

PointSet psk_points(int size) { return ApskConstellation::psk(size).points(); }

PointSet qam_family(int size) {
    switch (size) {
        case 2:
            return PointSet{{cdouble(1, 0), cdouble(-1, 0)}};
        case 4:
            return normalized(odd_grid(2, 2));
        case 8:
            // Rectangular 4 x 2 grid on {+-1, +-3} x {+-1}.
            return normalized(odd_grid(4, 2));
        case 16:
            return normalized(odd_grid(4, 4));
        case 32: {
            auto pts = odd_grid(6, 6);
            std::erase_if(pts, [](cdouble p) {
                return std::abs(p.real()) == 5.0 && std::abs(p.imag()) == 5.0;
            });
            return normalized(std::move(pts));
        }
        case 64:
            return normalized(odd_grid(8, 8));
        default:
            throw std::invalid_argument("qam_family: unsupported size " + std::to_string(size));
    }
}

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double ser_union_bound_raw(int size, double d_min, double outer_radius, double noise_power) {
    if (size < 2) throw std::invalid_argument("union bound needs at least two points");
    const double sigma = std::sqrt(noise_power);
    if (!(sigma > 0.0)) return d_min * outer_radius > 0.0 ? 0.0 : (size - 1) * 0.5;
    return (size - 1) * q_function(outer_radius * d_min / (sigma * std::numbers::sqrt2));
}

double ser_union_bound(int size, double d_min, double outer_radius, double noise_power) {
    return std::clamp(ser_union_bound_raw(size, d_min, outer_radius, noise_power), 0.0, 1.0);
}

std::size_t nearest_point(const std::vector<cdouble>& points, cdouble y) noexcept {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = std::norm(points[i] - y);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace ceapsk
