#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ceapsk/channel.hpp"
#include "ceapsk/constellation.hpp"
#include "ceapsk/optimizer.hpp"
#include "ceapsk/sim.hpp"

namespace ceapsk {

/// File or format problem, with the offending path in the message.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string_view library_version() noexcept;

/// Shortest round-trip decimal form; identical on every run.
std::string format_double(double v);

std::string constellation_to_json(const ApskConstellation& c, int indent = 2);
ApskConstellation constellation_from_json(std::string_view text);
/// "re,im" rows.
void write_points_csv(std::ostream& os, const PointSet& points);

std::string region_table_to_json(const RegionTable& table, int indent = 2);
RegionTable region_table_from_json(std::string_view text);
/// region,ratio_lo,ratio_hi,rho2,N2,omega2_over_pi,dmin_rule
void write_region_table_csv(std::ostream& os, const RegionTable& table);

/**
 * One realization per row, real and imaginary parts interleaved.
 * `.json` files hold an array of rows; anything else is read as CSV, where a
 * leading non-numeric line is a header.
 */
std::vector<ChannelRealization> read_channels(const std::filesystem::path& path);
/// ratio,r,R per realization.
void write_annulus_csv(std::ostream& os, std::span<const ChannelRealization> channels,
                       double power);

/// `axis` names the first column; CSIT sweeps label it with the training SNR.
void write_ser_csv(std::ostream& os, const SerCurve& curve, std::string_view axis = "snr_db");
void write_rate_csv(std::ostream& os, const RateCurve& curve);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ceapsk
