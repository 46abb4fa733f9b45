#include "ceapsk/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ceapsk/channel.hpp"
#include "ceapsk/rng.hpp"

namespace ceapsk {

namespace {

constexpr double kPi = std::numbers::pi;

PhaseOffsetSolution widest_gap_offset(int outer, int inner) {
    // Breakpoint j stands for the angle 2 pi j / (outer * inner); the window
    // (-2 pi / outer, 0] becomes (-inner, 0].
    PhaseOffsetSolution sol;
    sol.outer_count = outer;
    sol.inner_count = inner;
    const std::int64_t den = static_cast<std::int64_t>(outer) * inner;

    std::vector<std::int64_t> xs{-static_cast<std::int64_t>(inner)};
    for (std::int64_t m = 0; m < outer; ++m)
        for (std::int64_t n = 0; n < inner; ++n) {
            const std::int64_t v = n * outer - m * inner;
            if (-inner < v && v <= 0) xs.push_back(v);
        }
    std::sort(xs.begin(), xs.end(), std::greater<>());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::size_t k_star = 0;
    std::int64_t widest = 0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        const std::int64_t gap = xs[k] - xs[k + 1];
        if (gap > widest) {
            widest = gap;
            k_star = k;
        }
    }

    // omega2 = -(X_k + X_{k+1}) / 2 = pi * (-(j_k + j_{k+1})) / den.
    std::int64_t num = -(xs[k_star] + xs[k_star + 1]);
    std::int64_t d = den;
    const std::int64_t g = std::gcd(num, d);
    if (g > 1) {
        num /= g;
        d /= g;
    }
    sol.breakpoints = std::move(xs);
    sol.k_star = k_star;
    sol.omega_num = num;
    sol.omega_den = d;
    sol.omega2 = kPi * static_cast<double>(num) / static_cast<double>(d);
    sol.c12 = std::cos(kPi * static_cast<double>(widest) / static_cast<double>(den));
    return sol;
}

double inter_distance(double rho, double c) {
    return std::sqrt(std::max(1.0 + rho * rho - 2.0 * rho * c, 0.0));
}

}  // namespace

PhaseOffsetSolution solve_p21(int size, int inner_count) {
    if (size < 2 || inner_count < 1 || inner_count > size - 1)
        throw std::invalid_argument("solve_p21: need 1 <= N2 <= N - 1, got N=" +
                                    std::to_string(size) + " N2=" + std::to_string(inner_count));
    const int outer = size - inner_count;
    if (inner_count <= outer) return widest_gap_offset(outer, inner_count);

    // More points inside than outside: the sweep only covers the window
    // when N2 <= N1, so solve the swapped pair and mirror the offset.
    PhaseOffsetSolution sol = widest_gap_offset(inner_count, outer);
    sol.outer_count = outer;
    sol.inner_count = inner_count;
    if (sol.omega_num != 0) sol.omega_num = 2 * sol.omega_den - sol.omega_num;
    sol.omega2 = kPi * static_cast<double>(sol.omega_num) / static_cast<double>(sol.omega_den);
    return sol;
}

std::optional<double> ring_spacing_term(int count) {
    if (count < 1) throw std::invalid_argument("ring point count must be positive");
    if (count == 1) return std::nullopt;
    return 1.0 - std::cos(2.0 * kPi / count);
}

std::string_view to_string(RadiusCase c) noexcept {
    switch (c) {
        case RadiusCase::Case1: return "Case1";
        case RadiusCase::I_i: return "I-i";
        case RadiusCase::I_ii: return "I-ii";
        case RadiusCase::I_iii: return "I-iii";
        case RadiusCase::I_iv: return "I-iv";
        case RadiusCase::II: return "II";
    }
    return "?";
}

std::string_view to_string(RadiusRule r) noexcept {
    return r == RadiusRule::Constant ? "constant" : "ratio";
}

RadiusSolution unit_radius_solution(std::optional<double> b_outer, std::optional<double> b_inner,
                                    double c12, RadiusCase tag) {
    double d = std::sqrt(std::max(2.0 - 2.0 * c12, 0.0));
    if (b_outer) d = std::min(d, std::sqrt(2.0 * *b_outer));
    if (b_inner) d = std::min(d, std::sqrt(2.0 * *b_inner));
    return {1.0, d, tag, std::nullopt};
}

RadiusSolution find_rho2_region1(std::optional<double> b_outer, std::optional<double> b_inner,
                                 double c12, double ratio) {
    if (!b_outer || !(c12 > ratio))
        throw std::invalid_argument(
            "find_rho2_region1: requires N1 >= 2 and C* > r/R; route to the unit-radius case");

    const double b1 = *b_outer;
    const double cap = std::sqrt(2.0 * b1);  // outer intra-ring distance
    // Where the inter-ring distance falls to `cap` on its decreasing branch.
    const double cap_crossing = c12 - std::sqrt(std::max(c12 * c12 - 1.0 + 2.0 * b1, 0.0));

    RadiusSolution sol;
    if (b_inner) {
        // Crossing of rho2 sqrt(2 B2) with the inter-ring distance. Written
        // as 1 / (C + s), which equals (C - s) / (1 - 2 B2) and covers the
        // B2 = 1/2 branch (1 / 2C) without a singular denominator.
        const double s = std::sqrt(std::max(c12 * c12 + 2.0 * *b_inner - 1.0, 0.0));
        sol.rho_bar = 1.0 / (c12 + s);
    }

    if (sol.rho_bar && *sol.rho_bar >= ratio && *sol.rho_bar <= c12) {
        const double rb = *sol.rho_bar;
        if (rb <= std::sqrt(b1 / *b_inner)) {
            sol.case_tag = RadiusCase::I_i;
            sol.rho2 = rb;
            sol.d_min = std::sqrt(2.0 * *b_inner) * rb;
        } else {
            sol.case_tag = RadiusCase::I_ii;
            sol.rho2 = std::max(cap_crossing, ratio);
            sol.d_min = cap;
        }
        return sol;
    }

    const double at_ratio = inter_distance(ratio, c12);
    if (cap >= at_ratio) {
        sol.case_tag = RadiusCase::I_iii;
        sol.rho2 = ratio;
        sol.d_min = at_ratio;
    } else {
        sol.case_tag = RadiusCase::I_iv;
        sol.rho2 = std::max(cap_crossing, ratio);
        sol.d_min = cap;
    }
    return sol;
}

InnerCountSolution solve_for_inner_count(const PhaseOffsetSolution& phase, double ratio) {
    const auto b1 = ring_spacing_term(phase.outer_count);
    const auto b2 = ring_spacing_term(phase.inner_count);
    InnerCountSolution out{phase, {}};
    if (phase.c12 <= ratio) {
        out.radius = unit_radius_solution(b1, b2, phase.c12, RadiusCase::Case1);
        return out;
    }
    const RadiusSolution region1 = find_rho2_region1(b1, b2, phase.c12, ratio);
    const RadiusSolution region2 = unit_radius_solution(b1, b2, phase.c12, RadiusCase::II);
    out.radius = region1.d_min >= region2.d_min ? region1 : region2;
    return out;
}

bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

P2Solver::P2Solver(int size) : size_(size) {
    if (size < 2 || size % 2 != 0)
        throw std::invalid_argument("constellation size must be even and >= 2, got " +
                                    std::to_string(size));
    phases_.reserve(static_cast<std::size_t>(size - 1));
    for (int n2 = 1; n2 <= size - 1; ++n2) phases_.push_back(solve_p21(size, n2));
}

InnerCountSolution P2Solver::solve_restricted(int inner_count, double ratio) const {
    if (inner_count < 1 || inner_count > size_ - 1)
        throw std::invalid_argument("inner count out of range");
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw std::invalid_argument("ratio must lie in [0, 1]");
    return solve_for_inner_count(phases_[static_cast<std::size_t>(inner_count - 1)], ratio);
}

P2Solution P2Solver::solve(double ratio) const {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw std::invalid_argument("ratio must lie in [0, 1], got " + std::to_string(ratio));

    std::optional<InnerCountSolution> best;
    for (int n2 = 1; n2 <= size_ / 2; ++n2) {
        InnerCountSolution cand =
            solve_for_inner_count(phases_[static_cast<std::size_t>(n2 - 1)], ratio);
        // Strict comparison keeps the smaller inner count on ties.
        if (!best || cand.radius.d_min > best->radius.d_min) best = std::move(cand);
    }

    const auto& ph = best->phase;
    ApskConstellation c({Ring{ph.outer_count, 1.0, 0.0},
                         Ring{ph.inner_count, best->radius.rho2, ph.omega2}});
    return P2Solution{std::move(c), best->radius.d_min, ph.inner_count, ph, best->radius};
}

P2Solution solve_p2(int size, double ratio) { return P2Solver(size).solve(ratio); }

// ---------------------------------------------------------------------------
// Region tables

double Region::rho2_at(double ratio) const noexcept {
    return rho_rule == RadiusRule::TracksRatio ? ratio : rho2;
}

double Region::d_min_at(double ratio) const noexcept {
    if (rho_rule == RadiusRule::Constant) return d_min;
    return std::sqrt(std::max(ratio * ratio - 2.0 * ratio * c12 + 1.0, 0.0));
}

ApskConstellation Region::constellation_at(double ratio) const {
    return ApskConstellation(
        {Ring{outer_count, 1.0, 0.0}, Ring{inner_count, rho2_at(ratio), omega2}});
}

std::size_t RegionTable::region_index(double ratio) const {
    if (regions.empty()) throw std::logic_error("empty region table");
    auto it = std::upper_bound(regions.begin(), regions.end(), ratio,
                               [](double x, const Region& r) { return x < r.ratio_lo; });
    if (it == regions.begin()) return 0;
    return static_cast<std::size_t>(std::distance(regions.begin(), it) - 1);
}

const Region& RegionTable::lookup(double ratio) const { return regions[region_index(ratio)]; }

namespace {

struct RegionKey {
    int inner_count = 0;
    std::int64_t omega_num = 0;
    std::int64_t omega_den = 1;
    RadiusRule rule = RadiusRule::Constant;
    double rho2 = 0.0;  // compared only for Constant regions

    bool operator==(const RegionKey& o) const noexcept {
        return inner_count == o.inner_count && omega_num == o.omega_num &&
               omega_den == o.omega_den && rule == o.rule &&
               (rule == RadiusRule::TracksRatio || rho2 == o.rho2);
    }
};

RegionKey key_of(const P2Solution& s) {
    const RadiusRule rule =
        s.radius.case_tag == RadiusCase::I_iii ? RadiusRule::TracksRatio : RadiusRule::Constant;
    return {s.inner_count, s.phase.omega_num, s.phase.omega_den, rule, s.radius.rho2};
}

struct Transition {
    double at;
    RegionKey key;
};

void refine(const P2Solver& solver, double lo, const RegionKey& klo, double hi,
            const RegionKey& khi, double tol, std::vector<Transition>& out) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const RegionKey kmid = key_of(solver.solve(mid));
        if (kmid == klo) {
            lo = mid;
        } else if (kmid == khi) {
            hi = mid;
        } else {
            refine(solver, lo, klo, mid, kmid, tol, out);
            refine(solver, mid, kmid, hi, khi, tol, out);
            return;
        }
    }
    out.push_back({0.5 * (lo + hi), khi});
}

Region region_from(const P2Solution& s, double lo, double hi) {
    Region r;
    r.ratio_lo = lo;
    r.ratio_hi = hi;
    r.inner_count = s.inner_count;
    r.outer_count = s.phase.outer_count;
    r.omega_num = s.phase.omega_num;
    r.omega_den = s.phase.omega_den;
    r.omega2 = s.phase.omega2;
    r.c12 = s.phase.c12;
    r.rho_rule =
        s.radius.case_tag == RadiusCase::I_iii ? RadiusRule::TracksRatio : RadiusRule::Constant;
    r.rho2 = r.rho_rule == RadiusRule::Constant ? s.radius.rho2 : lo;
    r.d_min = r.rho_rule == RadiusRule::Constant ? s.d_min : r.d_min_at(lo);
    return r;
}

}  // namespace

RegionTable build_region_table(int size, double grid_step, double boundary_tol) {
    if (!(grid_step > 0.0 && grid_step <= 1.0))
        throw std::invalid_argument("grid step must lie in (0, 1]");
    const P2Solver solver(size);
    const auto samples = static_cast<std::int64_t>(std::ceil(1.0 / grid_step - 1e-9));

    std::vector<Transition> transitions;
    double prev_x = 0.0;
    RegionKey prev_key = key_of(solver.solve(0.0));
    transitions.push_back({0.0, prev_key});
    for (std::int64_t i = 1; i <= samples; ++i) {
        const double x = i == samples ? 1.0 : static_cast<double>(i) / static_cast<double>(samples);
        const RegionKey k = key_of(solver.solve(x));
        if (!(k == prev_key)) refine(solver, prev_x, prev_key, x, k, boundary_tol, transitions);
        prev_x = x;
        prev_key = k;
    }

    // A region no wider than the bisection tolerance only marks an exact tie
    // between two structures (e.g. a centre point at ratio 0); its neighbour
    // is equally optimal there, so it absorbs it.
    for (std::size_t i = 0; i + 1 < transitions.size();) {
        if (transitions[i + 1].at - transitions[i].at <= 4.0 * boundary_tol) {
            transitions[i].key = transitions[i + 1].key;
            transitions.erase(transitions.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            if (i > 0 && transitions[i - 1].key == transitions[i].key) {
                transitions.erase(transitions.begin() + static_cast<std::ptrdiff_t>(i));
                --i;
            }
        } else {
            ++i;
        }
    }

    RegionTable table;
    table.size = size;
    table.grid_step = grid_step;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const double lo = transitions[i].at;
        const double hi = i + 1 < transitions.size() ? transitions[i + 1].at : 1.0;
        const double probe = i + 1 < transitions.size() ? 0.5 * (lo + hi) : (lo + 1.0) / 2.0;
        table.regions.push_back(region_from(solver.solve(probe), lo, hi));
    }
    return table;
}

RegionTable build_suboptimal_table(const RegionTable& optimal) {
    if (optimal.regions.empty()) throw std::invalid_argument("empty optimal table");
    RegionTable sub = optimal;
    sub.suboptimal = true;
    if (optimal.regions.size() <= 1) return sub;

    Region last = optimal.regions.back();
    if (last.rho_rule == RadiusRule::TracksRatio) {
        const double top = last.ratio_hi;
        last.rho2 = last.rho2_at(top);
        last.d_min = last.d_min_at(top);
        last.rho_rule = RadiusRule::Constant;
    }
    last.ratio_lo = optimal.regions.front().ratio_hi;
    last.ratio_hi = 1.0;
    sub.regions = {optimal.regions.front(), last};
    return sub;
}

std::vector<double> region_probabilities(const RegionTable& table, std::size_t antennas,
                                         std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    std::vector<std::uint64_t> counts(table.regions.size(), 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        StreamRng rng(seed, t, Substream::Channel);
        const ChannelRealization h = sample_rayleigh(antennas, 1.0, rng);
        ++counts[table.region_index(annulus_ratio(h.gains))];
    }
    std::vector<double> p;
    p.reserve(counts.size());
    for (const auto c : counts) p.push_back(static_cast<double>(c) / static_cast<double>(trials));
    return p;
}

}  // namespace ceapsk
