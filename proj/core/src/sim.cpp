#include "ceapsk/sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>

#include "ceapsk/precoder.hpp"
#include "ceapsk/rng.hpp"

namespace ceapsk {

namespace {

constexpr std::array kSchemes{Scheme::ProposedOptimal, Scheme::ProposedSuboptimal,
                              Scheme::FixedQam16,      Scheme::AdaptiveQamPsk,
                              Scheme::Egt16Qam,        Scheme::VariableRateApsk,
                              Scheme::VariableRateQam};

constexpr std::uint64_t kChunkTrials = 2048;

/// Splits [0, trials) into fixed chunks, runs `body(first, last, slot)` on a
/// worker pool, and leaves per-chunk results in `slots`. Chunk boundaries do
/// not depend on the worker count, so any ordered reduction is deterministic.
template <class Slot, class Body>
std::vector<Slot> run_chunks(std::uint64_t trials, std::size_t threads, const Slot& init,
                             Body&& body) {
    const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
    std::vector<Slot> slots(chunks, init);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            const std::uint64_t first = c * kChunkTrials;
            body(first, std::min(trials, first + kChunkTrials), slots[c]);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<std::size_t>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return slots;
}

/// Per-trial constellation choice for fixed-rate schemes.
class FixedRateSource {
  public:
    FixedRateSource(const SimConfig& cfg, const RegionTable* table)
        : scheme_(cfg.scheme), table_(table) {
        if (scheme_ == Scheme::ProposedOptimal || scheme_ == Scheme::ProposedSuboptimal) {
            if (table_ == nullptr)
                throw std::invalid_argument("proposed schemes require a region table");
            if (table_->size != cfg.size)
                throw std::invalid_argument("region table size does not match the configuration");
            for (const auto& r : table_->regions)
                region_points_.push_back(r.rho_rule == RadiusRule::Constant
                                             ? r.constellation_at(r.ratio_lo).points().points
                                             : std::vector<cdouble>{});
        } else if (cfg.size != 16) {
            throw std::invalid_argument("benchmark schemes are defined for 16-ary constellations");
        }
        qam_ = qam_family(16).points;
        psk_ = psk_points(16).points;
        qam_med_ = med(PointSet{qam_}).med;
        psk_med_ = med(PointSet{psk_}).med;
    }

    struct Pick {
        const std::vector<cdouble>* points;
        double d_min;
        bool clip;
    };

    Pick pick(double ratio, std::vector<cdouble>& scratch) const {
        switch (scheme_) {
            case Scheme::ProposedOptimal:
            case Scheme::ProposedSuboptimal: {
                const std::size_t i = table_->region_index(ratio);
                const Region& r = table_->regions[i];
                if (r.rho_rule == RadiusRule::Constant) return {&region_points_[i], r.d_min, false};
                scratch = r.constellation_at(ratio).points().points;
                return {&scratch, r.d_min_at(ratio), false};
            }
            case Scheme::FixedQam16:
                return {&qam_, qam_med_, true};
            case Scheme::AdaptiveQamPsk:
                return ratio <= 1.0 / 3.0 ? Pick{&qam_, qam_med_, false}
                                          : Pick{&psk_, psk_med_, false};
            case Scheme::Egt16Qam:
                return {&qam_, qam_med_, false};
            default:
                throw std::invalid_argument("not a fixed-rate scheme");
        }
    }

  private:
    Scheme scheme_;
    const RegionTable* table_;
    std::vector<std::vector<cdouble>> region_points_;
    std::vector<cdouble> qam_, psk_;
    double qam_med_ = 0.0, psk_med_ = 0.0;
};

struct SerSlot {
    std::vector<std::uint64_t> errors;
    std::vector<double> bound;
};

}  // namespace

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::ProposedOptimal: return "proposed-optimal";
        case Scheme::ProposedSuboptimal: return "proposed-suboptimal";
        case Scheme::FixedQam16: return "fixed-qam16";
        case Scheme::AdaptiveQamPsk: return "adaptive-qam-psk";
        case Scheme::Egt16Qam: return "egt-qam16";
        case Scheme::VariableRateApsk: return "variable-apsk";
        case Scheme::VariableRateQam: return "variable-qam";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
    for (const auto s : kSchemes)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

std::span<const Scheme> all_schemes() noexcept { return kSchemes; }

bool is_fixed_rate(Scheme s) noexcept {
    return s != Scheme::VariableRateApsk && s != Scheme::VariableRateQam;
}

void SimConfig::validate() const {
    if (antennas < 1) throw std::invalid_argument("at least one antenna required");
    if (trials < 1000) throw std::invalid_argument("trials must be at least 1000");
    if (snr_grid.empty()) throw std::invalid_argument("SNR grid is empty");
    for (std::size_t i = 0; i < snr_grid.size(); ++i) {
        if (!(snr_grid[i] > 0.0)) throw std::invalid_argument("SNR values must be positive");
        if (i > 0 && !(snr_grid[i] > snr_grid[i - 1]))
            throw std::invalid_argument("SNR grid must be strictly increasing");
    }
    if (!(target_ser > 0.0 && target_ser < 1.0))
        throw std::invalid_argument("target SER must lie in (0, 1)");
    if (!(path_loss > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("path loss and noise power must be positive");
    if (csit && !(csit->training_snr >= 0.0))
        throw std::invalid_argument("training SNR must be nonnegative");
    if (is_fixed_rate(scheme) && size < 2) throw std::invalid_argument("size must be >= 2");
    if (!is_fixed_rate(scheme) && sizes.empty())
        throw std::invalid_argument("variable-rate schemes need candidate sizes");
}

SerCurve run_fixed_rate_ser(const SimConfig& cfg, const RegionTable* table) {
    cfg.validate();
    if (!is_fixed_rate(cfg.scheme))
        throw std::invalid_argument("run_fixed_rate_ser needs a fixed-rate scheme");
    const FixedRateSource source(cfg, table);
    const std::size_t n_snr = cfg.snr_grid.size();
    const double sigma = std::sqrt(cfg.noise_power);

    // Power scale sqrt(P) per SNR point, with P = SNR sigma^2 / beta.
    std::vector<double> amplitude(n_snr);
    for (std::size_t j = 0; j < n_snr; ++j)
        amplitude[j] = std::sqrt(cfg.snr_grid[j] * cfg.noise_power / cfg.path_loss);

    const SerSlot init{std::vector<std::uint64_t>(n_snr, 0), std::vector<double>(n_snr, 0.0)};
    auto body = [&](std::uint64_t first, std::uint64_t last, SerSlot& slot) {
        std::vector<cdouble> scratch;
        for (std::uint64_t t = first; t < last; ++t) {
            StreamRng ch_rng(cfg.seed, t, Substream::Channel);
            const ChannelRealization h = sample_rayleigh(cfg.antennas, cfg.path_loss, ch_rng);
            ChannelRealization h_tx = h;
            if (cfg.csit) {
                StreamRng est_rng(cfg.seed, t, Substream::Estimation);
                h_tx = mmse_estimate(h, *cfg.csit, est_rng);
            }
            // Everything below is at unit power; sqrt(P) scales it.
            const Annulus annulus = compute_annulus(h_tx, 1.0);
            if (annulus.degenerate()) {
                for (std::size_t j = 0; j < n_snr; ++j) {
                    ++slot.errors[j];
                    slot.bound[j] += 1.0;
                }
                continue;
            }
            const auto pick = source.pick(annulus.ratio, scratch);
            const auto& pts = *pick.points;
            const int n_points = static_cast<int>(pts.size());

            StreamRng sym_rng(cfg.seed, t, Substream::Symbol);
            const auto k = static_cast<std::size_t>(sym_rng.below(pts.size()));
            const cdouble s = pts[k];

            cdouble received;  // noise-free, unit power
            if (cfg.scheme == Scheme::Egt16Qam) {
                const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.antennas));
                received = 0.0;
                for (std::size_t i = 0; i < h.gains.size(); ++i)
                    received += h.gains[i] * scale * std::polar(1.0, -std::arg(h_tx.gains[i])) * s;
            } else {
                const PhaseSolution sol = realize_symbol(
                    h_tx, 1.0, s, annulus.outer, pick.clip ? Clipping::Radial : Clipping::Off);
                received = synthesize(h, 1.0, sol.phases);
            }
            // Detect against the intended constellation scaled by the
            // transmitter's outer radius; normalize so the reference is S.
            const cdouble z = received / annulus.outer;
            StreamRng noise_rng(cfg.seed, t, Substream::Noise);
            const cdouble w = noise_rng.complex_normal(1.0);
            for (std::size_t j = 0; j < n_snr; ++j) {
                const double radius = amplitude[j] * annulus.outer;
                const cdouble y = z + (sigma / radius) * w;
                if (nearest_point(pts, y) != k) ++slot.errors[j];
                slot.bound[j] += ser_union_bound(n_points, pick.d_min, radius, cfg.noise_power);
            }
        }
    };
    const auto slots = run_chunks(cfg.trials, cfg.threads, init, body);

    SerCurve curve;
    curve.points.resize(n_snr);
    for (std::size_t j = 0; j < n_snr; ++j) {
        std::uint64_t errors = 0;
        double bound = 0.0;
        for (const auto& s : slots) {
            errors += s.errors[j];
            bound += s.bound[j];
        }
        const double n = static_cast<double>(cfg.trials);
        curve.points[j] = {linear_to_db(cfg.snr_grid[j]), static_cast<double>(errors) / n, errors,
                           cfg.trials, bound / n};
    }
    return curve;
}

SerCurve run_csit_sweep(const SimConfig& cfg, std::span<const double> training_snr,
                        const RegionTable* table) {
    if (cfg.snr_grid.size() != 1)
        throw std::invalid_argument("CSIT sweep runs at exactly one data SNR");
    SerCurve out;
    for (const double tr : training_snr) {
        SimConfig c = cfg;
        c.csit = CsitModel{tr, cfg.path_loss};
        SerPoint p = run_fixed_rate_ser(c, table).points.front();
        p.snr_db = linear_to_db(tr);
        out.points.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variable rate

ApskRateFamily::ApskRateFamily(std::map<int, RegionTable> tables) : tables_(std::move(tables)) {}

std::optional<double> ApskRateFamily::d_min(int size, double ratio) const {
    const auto it = tables_.find(size);
    if (it == tables_.end()) throw std::invalid_argument("no region table for size " + std::to_string(size));
    return it->second.d_min_at(ratio);
}

PointSet ApskRateFamily::constellation(int size, double ratio) const {
    const auto it = tables_.find(size);
    if (it == tables_.end()) throw std::invalid_argument("no region table for size " + std::to_string(size));
    return it->second.lookup(ratio).constellation_at(ratio).points();
}

QamRateFamily::QamRateFamily() {
    for (const int n : {2, 4, 8, 16, 32, 64}) {
        const PointSet s = qam_family(n);
        med_and_ratio_[n] = {med(s).med, s.modulus_ratio()};
    }
}

std::optional<double> QamRateFamily::d_min(int size, double ratio) const {
    const auto it = med_and_ratio_.find(size);
    if (it == med_and_ratio_.end()) throw std::invalid_argument("unsupported QAM size " + std::to_string(size));
    if (!(ratio <= it->second.second)) return std::nullopt;
    return it->second.first;
}

PointSet QamRateFamily::constellation(int size, double) const { return qam_family(size); }

bool meets_target(int size, double d_min, double outer_radius, double noise_power,
                  double target_ser) {
    return ser_union_bound_raw(size, d_min, outer_radius, noise_power) <= target_ser;
}

RateChoice select_rate(const Annulus& annulus, double noise_power, double target_ser,
                       std::span<const int> sizes, const RateFamily& family) {
    std::vector<int> order(sizes.begin(), sizes.end());
    std::sort(order.begin(), order.end(), std::greater<>());
    if (annulus.degenerate()) return {};
    for (const int n : order) {
        const auto d = family.d_min(n, annulus.ratio);
        if (d && meets_target(n, *d, annulus.outer, noise_power, target_ser))
            return {n, *d, family.constellation(n, annulus.ratio)};
    }
    return {};
}

RateCurve run_variable_rate(const SimConfig& cfg, const RateFamily& family) {
    cfg.validate();
    std::vector<int> order(cfg.sizes.begin(), cfg.sizes.end());
    std::sort(order.begin(), order.end(), std::greater<>());
    const std::size_t n_snr = cfg.snr_grid.size();
    std::vector<double> amplitude(n_snr);
    for (std::size_t j = 0; j < n_snr; ++j)
        amplitude[j] = std::sqrt(cfg.snr_grid[j] * cfg.noise_power / cfg.path_loss);

    struct Slot {
        std::vector<double> bits;
        std::vector<std::uint64_t> silent;
    };
    const Slot init{std::vector<double>(n_snr, 0.0), std::vector<std::uint64_t>(n_snr, 0)};
    auto body = [&](std::uint64_t first, std::uint64_t last, Slot& slot) {
        std::vector<std::optional<double>> dmins(order.size());
        for (std::uint64_t t = first; t < last; ++t) {
            StreamRng rng(cfg.seed, t, Substream::Channel);
            const ChannelRealization h = sample_rayleigh(cfg.antennas, cfg.path_loss, rng);
            const Annulus a = compute_annulus(h, 1.0);
            if (a.degenerate()) {
                for (auto& s : slot.silent) ++s;
                continue;
            }
            for (std::size_t i = 0; i < order.size(); ++i) dmins[i] = family.d_min(order[i], a.ratio);
            for (std::size_t j = 0; j < n_snr; ++j) {
                const double radius = amplitude[j] * a.outer;
                int chosen = 1;
                for (std::size_t i = 0; i < order.size(); ++i)
                    if (dmins[i] && meets_target(order[i], *dmins[i], radius, cfg.noise_power,
                                                 cfg.target_ser)) {
                        chosen = order[i];
                        break;
                    }
                if (chosen == 1)
                    ++slot.silent[j];
                else
                    slot.bits[j] += std::log2(static_cast<double>(chosen));
            }
        }
    };
    const auto slots = run_chunks(cfg.trials, cfg.threads, init, body);

    RateCurve curve;
    for (std::size_t j = 0; j < n_snr; ++j) {
        double bits = 0.0;
        std::uint64_t silent = 0;
        for (const auto& s : slots) {
            bits += s.bits[j];
            silent += s.silent[j];
        }
        const double n = static_cast<double>(cfg.trials);
        curve.points.push_back(
            {linear_to_db(cfg.snr_grid[j]), bits / n, static_cast<double>(silent) / n, cfg.trials});
    }
    return curve;
}

std::optional<double> snr_at_ser(const SerCurve& curve, double target) {
    const auto& p = curve.points;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        if (p[j].ser >= target && p[j + 1].ser < target) {
            if (p[j + 1].ser <= 0.0) return p[j + 1].snr_db;
            const double l0 = std::log10(p[j].ser), l1 = std::log10(p[j + 1].ser);
            const double lt = std::log10(target);
            return p[j].snr_db + (l0 - lt) / (l0 - l1) * (p[j + 1].snr_db - p[j].snr_db);
        }
    }
    return std::nullopt;
}

std::optional<double> snr_at_rate(const RateCurve& curve, double bits) {
    const auto& p = curve.points;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        if (p[j].avg_bits < bits && p[j + 1].avg_bits >= bits) {
            const double f = (bits - p[j].avg_bits) / (p[j + 1].avg_bits - p[j].avg_bits);
            return p[j].snr_db + f * (p[j + 1].snr_db - p[j].snr_db);
        }
    }
    return std::nullopt;
}

std::vector<double> parse_db_range(std::string_view spec) {
    auto parse = [&](std::string_view part) {
        double v = 0.0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc{} || res.ptr != part.data() + part.size())
            throw std::invalid_argument("bad number '" + std::string(part) + "' in range");
        return v;
    };
    const auto c1 = spec.find(':');
    if (c1 == std::string_view::npos) return {parse(spec)};
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw std::invalid_argument("range must be lo:hi:step");
    const double lo = parse(spec.substr(0, c1));
    const double hi = parse(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse(spec.substr(c2 + 1));
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("range needs lo <= hi and step > 0");
    std::vector<double> out;
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

}  // namespace ceapsk
