#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ceapsk/constellation.hpp"

namespace ceapsk {

/**
 * Optimal inner-ring phase offset for a two-ring constellation with
 * `outer_count` points on the unit ring and `inner_count` points inside.
 *
 * Candidate angles are kept as exact integers: breakpoint k is
 * 2 pi * breakpoints[k] / (outer_count * inner_count), sorted descending.
 * The offset is the midpoint of the widest gap between consecutive
 * breakpoints; among equally wide gaps the first (smallest offset) wins.
 */
struct PhaseOffsetSolution {
    int outer_count = 0;
    int inner_count = 0;
    std::vector<std::int64_t> breakpoints;
    std::size_t k_star = 0;
    /// omega2 / pi as an exact fraction.
    std::int64_t omega_num = 0;
    std::int64_t omega_den = 1;
    double omega2 = 0.0;
    /// Smallest achievable worst-case inter-ring cosine.
    double c12 = 1.0;

    double omega_over_pi() const noexcept {
        return static_cast<double>(omega_num) / static_cast<double>(omega_den);
    }
};

/// Throws std::invalid_argument unless 1 <= inner_count <= size - 1.
PhaseOffsetSolution solve_p21(int size, int inner_count);

/// 1 - cos(2 pi / count); nullopt for a single-point ring.
std::optional<double> ring_spacing_term(int count);

enum class RadiusCase { Case1, I_i, I_ii, I_iii, I_iv, II };
std::string_view to_string(RadiusCase c) noexcept;

struct RadiusSolution {
    double rho2 = 1.0;
    double d_min = 0.0;
    RadiusCase case_tag = RadiusCase::Case1;
    /// Crossing of the inner intra-ring and inter-ring distances, when defined.
    std::optional<double> rho_bar;
};

/**
 * Best inner radius on [ratio, c12] (region I).
 *
 * `b_outer` must be present and c12 > ratio; throws std::invalid_argument
 * otherwise (those inputs belong to the all-on-one-circle branch).
 * Where several radii share the optimum, the largest is returned.
 */
RadiusSolution find_rho2_region1(std::optional<double> b_outer, std::optional<double> b_inner,
                                 double c12, double ratio);

/// Best radius when the inner ring may sit on the unit circle: rho2 = 1.
RadiusSolution unit_radius_solution(std::optional<double> b_outer, std::optional<double> b_inner,
                                    double c12, RadiusCase tag);

/// Optimum for a fixed inner count.
struct InnerCountSolution {
    PhaseOffsetSolution phase;
    RadiusSolution radius;
};

InnerCountSolution solve_for_inner_count(const PhaseOffsetSolution& phase, double ratio);

struct P2Solution {
    ApskConstellation constellation;
    double d_min = 0.0;
    int inner_count = 0;
    PhaseOffsetSolution phase;
    RadiusSolution radius;

    double rho2() const noexcept { return radius.rho2; }
};

/**
 * Maximum-MED feasible two-ring constellation of a fixed size.
 *
 * Phase offsets depend only on the size, so they are computed once at
 * construction; each solve() is then O(size).
 */
class P2Solver {
  public:
    /// Throws std::invalid_argument for odd sizes or size < 2.
    explicit P2Solver(int size);

    int size() const noexcept { return size_; }
    /// ratio must lie in [0, 1].
    P2Solution solve(double ratio) const;
    /// Optimum restricted to one inner count (which may exceed size / 2).
    InnerCountSolution solve_restricted(int inner_count, double ratio) const;
    const std::vector<PhaseOffsetSolution>& phases() const noexcept { return phases_; }

  private:
    int size_;
    std::vector<PhaseOffsetSolution> phases_;  // inner counts 1 .. size - 1
};

P2Solution solve_p2(int size, double ratio);

bool is_power_of_two(int n) noexcept;

enum class RadiusRule { Constant, TracksRatio };
std::string_view to_string(RadiusRule r) noexcept;

/// One interval [ratio_lo, ratio_hi) of the ratio axis and its constellation.
struct Region {
    double ratio_lo = 0.0;
    double ratio_hi = 1.0;
    int inner_count = 0;
    int outer_count = 0;
    std::int64_t omega_num = 0;
    std::int64_t omega_den = 1;
    double omega2 = 0.0;
    double c12 = 1.0;
    RadiusRule rho_rule = RadiusRule::Constant;
    /// Inner radius for Constant regions; unused when tracking the ratio.
    double rho2 = 1.0;
    /// Constant MED for Constant regions.
    double d_min = 0.0;

    double omega_over_pi() const noexcept {
        return static_cast<double>(omega_num) / static_cast<double>(omega_den);
    }
    double rho2_at(double ratio) const noexcept;
    double d_min_at(double ratio) const noexcept;
    ApskConstellation constellation_at(double ratio) const;
};

struct RegionTable {
    int size = 0;
    double grid_step = 0.0;
    bool suboptimal = false;
    std::vector<Region> regions;

    /// Region containing `ratio` (the last region is closed at 1).
    const Region& lookup(double ratio) const;
    std::size_t region_index(double ratio) const;
    double d_min_at(double ratio) const { return lookup(ratio).d_min_at(ratio); }
};

inline constexpr int kTableAlgorithmVersion = 1;

/**
 * Partitions [0, 1] into intervals of identical optimal structure.
 *
 * The ratio axis is sampled every `grid_step`, adjacent samples sharing
 * (inner count, offset, radius rule) are merged, and each change point is
 * refined by bisection to `boundary_tol`.
 */
RegionTable build_region_table(int size, double grid_step, double boundary_tol = 1e-10);

/// First region of the optimal table, then the last region's constellation.
RegionTable build_suboptimal_table(const RegionTable& optimal);

/// Monte Carlo frequency of each region under i.i.d. Rayleigh fading.
std::vector<double> region_probabilities(const RegionTable& table, std::size_t antennas,
                                         std::uint64_t trials, std::uint64_t seed);

}  // namespace ceapsk
