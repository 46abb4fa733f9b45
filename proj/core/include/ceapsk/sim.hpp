#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ceapsk/channel.hpp"
#include "ceapsk/constellation.hpp"
#include "ceapsk/optimizer.hpp"

namespace ceapsk {

enum class Scheme {
    ProposedOptimal,     // region-table APSK
    ProposedSuboptimal,  // two-region APSK
    FixedQam16,          // 16-QAM always, clipped onto the annulus when infeasible
    AdaptiveQamPsk,      // 16-QAM when r/R <= 1/3, else 16-PSK
    Egt16Qam,            // linear equal gain transmission, 16-QAM
    VariableRateApsk,
    VariableRateQam,
};

std::string_view to_string(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;
std::span<const Scheme> all_schemes() noexcept;
bool is_fixed_rate(Scheme s) noexcept;

struct SimConfig {
    Scheme scheme = Scheme::ProposedOptimal;
    std::size_t antennas = 2;
    /// Linear SNR values P beta / sigma^2, strictly increasing.
    std::vector<double> snr_grid;
    std::uint64_t trials = 1'000'000;
    /// Constellation size for fixed-rate schemes.
    int size = 16;
    /// Candidate sizes for variable-rate schemes.
    std::vector<int> sizes{2, 4, 8, 16, 32, 64};
    double target_ser = 1e-3;
    std::optional<CsitModel> csit;
    std::uint64_t seed = 1;
    /// Worker count; 0 picks the hardware concurrency. Never affects results.
    std::size_t threads = 1;
    double path_loss = kReferencePathLoss;
    double noise_power = kReferenceNoisePower;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

struct SerPoint {
    double snr_db = 0.0;
    double ser = 0.0;
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
    /// Average of the clamped union bound over the same trials.
    double union_bound = 0.0;
};

struct SerCurve {
    std::vector<SerPoint> points;
};

struct RatePoint {
    double snr_db = 0.0;
    double avg_bits = 0.0;
    double no_tx_fraction = 0.0;
    std::uint64_t trials = 0;
};

struct RateCurve {
    std::vector<RatePoint> points;
};

/**
 * Average SER of a fixed-rate scheme. One channel, one symbol and one unit
 * noise draw per trial, shared by every SNR point of the grid.
 * Proposed schemes need `table` (optimal or suboptimal as appropriate).
 */
SerCurve run_fixed_rate_ser(const SimConfig& cfg, const RegionTable* table = nullptr);

/// SER at the single SNR of cfg.snr_grid for each training SNR (linear).
/// The points' snr_db field holds the training SNR in dB.
SerCurve run_csit_sweep(const SimConfig& cfg, std::span<const double> training_snr,
                        const RegionTable* table = nullptr);

/// Maps (size, ratio) to the MED of the size's constellation, or nullopt if it
/// cannot be placed in the annulus.
class RateFamily {
  public:
    virtual ~RateFamily() = default;
    virtual std::optional<double> d_min(int size, double ratio) const = 0;
    virtual PointSet constellation(int size, double ratio) const = 0;
};

class ApskRateFamily final : public RateFamily {
  public:
    explicit ApskRateFamily(std::map<int, RegionTable> tables);
    std::optional<double> d_min(int size, double ratio) const override;
    PointSet constellation(int size, double ratio) const override;

  private:
    std::map<int, RegionTable> tables_;
};

class QamRateFamily final : public RateFamily {
  public:
    QamRateFamily();
    std::optional<double> d_min(int size, double ratio) const override;
    PointSet constellation(int size, double ratio) const override;

  private:
    std::map<int, std::pair<double, double>> med_and_ratio_;
};

struct RateChoice {
    /// 1 means no transmission.
    int size = 1;
    double d_min = 0.0;
    PointSet constellation;
};

/// (N - 1) Q(R d / (sigma sqrt 2)) <= target, on the unclamped bound.
bool meets_target(int size, double d_min, double outer_radius, double noise_power,
                  double target_ser);

/// Largest size meeting the SER target; sizes may be given in any order.
RateChoice select_rate(const Annulus& annulus, double noise_power, double target_ser,
                       std::span<const int> sizes, const RateFamily& family);

RateCurve run_variable_rate(const SimConfig& cfg, const RateFamily& family);

/// SNR (dB) where the curve first falls through `target`, interpolating
/// log10(SER) linearly in dB.
std::optional<double> snr_at_ser(const SerCurve& curve, double target);
/// SNR (dB) where the average rate first reaches `bits`.
std::optional<double> snr_at_rate(const RateCurve& curve, double bits);

/// Parses "lo:hi:step" in dB into an inclusive grid.
std::vector<double> parse_db_range(std::string_view spec);

}  // namespace ceapsk
