#include "ceapsk/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#ifndef CEAPSK_VERSION
#define CEAPSK_VERSION "0.0.0"
#endif

namespace ceapsk {

using nlohmann::json;

namespace {

json table_to_json(const RegionTable& t) {
    json regions = json::array();
    for (const auto& r : t.regions) {
        regions.push_back({{"ratio_lo", r.ratio_lo},
                           {"ratio_hi", r.ratio_hi},
                           {"inner_count", r.inner_count},
                           {"outer_count", r.outer_count},
                           {"omega_num", r.omega_num},
                           {"omega_den", r.omega_den},
                           {"omega2", r.omega2},
                           {"c12", r.c12},
                           {"rho_rule", std::string(to_string(r.rho_rule))},
                           {"rho2", r.rho2},
                           {"d_min", r.d_min}});
    }
    return {{"size", t.size},
            {"grid_step", t.grid_step},
            {"suboptimal", t.suboptimal},
            {"algorithm_version", kTableAlgorithmVersion},
            {"regions", std::move(regions)}};
}

RadiusRule parse_rule(const std::string& s) {
    if (s == to_string(RadiusRule::Constant)) return RadiusRule::Constant;
    if (s == to_string(RadiusRule::TracksRatio)) return RadiusRule::TracksRatio;
    throw IoError("unknown radius rule '" + s + "'");
}

bool parse_number(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty();
}

ChannelRealization from_interleaved(const std::vector<double>& v, const std::string& where) {
    if (v.empty() || v.size() % 2 != 0)
        throw IoError(where + ": expected an even, nonzero count of interleaved re/im values");
    ChannelRealization h;
    for (std::size_t i = 0; i < v.size(); i += 2) h.gains.emplace_back(v[i], v[i + 1]);
    return h;
}

}  // namespace

std::string_view library_version() noexcept { return CEAPSK_VERSION; }

std::string format_double(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string constellation_to_json(const ApskConstellation& c, int indent) {
    json rings = json::array();
    for (const auto& r : c.rings())
        rings.push_back({{"count", r.count}, {"radius", r.radius}, {"offset", r.offset}});
    return json{{"rings", std::move(rings)}}.dump(indent);
}

ApskConstellation constellation_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        std::vector<Ring> rings;
        for (const auto& r : j.at("rings"))
            rings.push_back({r.at("count").get<int>(), r.at("radius").get<double>(),
                             r.at("offset").get<double>()});
        return ApskConstellation(std::move(rings));
    } catch (const json::exception& e) {
        throw IoError(std::string("constellation JSON: ") + e.what());
    }
}

void write_points_csv(std::ostream& os, const PointSet& points) {
    os << "re,im\n";
    for (const auto p : points.points) os << format_double(p.real()) << ',' << format_double(p.imag()) << '\n';
}

std::string region_table_to_json(const RegionTable& table, int indent) {
    return table_to_json(table).dump(indent);
}

RegionTable region_table_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (j.at("algorithm_version").get<int>() != kTableAlgorithmVersion)
            throw IoError("region table was built by a different algorithm version");
        RegionTable t;
        t.size = j.at("size").get<int>();
        t.grid_step = j.at("grid_step").get<double>();
        t.suboptimal = j.at("suboptimal").get<bool>();
        for (const auto& r : j.at("regions")) {
            Region g;
            g.ratio_lo = r.at("ratio_lo").get<double>();
            g.ratio_hi = r.at("ratio_hi").get<double>();
            g.inner_count = r.at("inner_count").get<int>();
            g.outer_count = r.at("outer_count").get<int>();
            g.omega_num = r.at("omega_num").get<std::int64_t>();
            g.omega_den = r.at("omega_den").get<std::int64_t>();
            g.omega2 = r.at("omega2").get<double>();
            g.c12 = r.at("c12").get<double>();
            g.rho_rule = parse_rule(r.at("rho_rule").get<std::string>());
            g.rho2 = r.at("rho2").get<double>();
            g.d_min = r.at("d_min").get<double>();
            t.regions.push_back(g);
        }
        if (t.regions.empty()) throw IoError("region table has no regions");
        return t;
    } catch (const json::exception& e) {
        throw IoError(std::string("region table JSON: ") + e.what());
    }
}

void write_region_table_csv(std::ostream& os, const RegionTable& table) {
    os << "region,ratio_lo,ratio_hi,rho2,N2,omega2_over_pi,dmin_rule\n";
    for (std::size_t i = 0; i < table.regions.size(); ++i) {
        const Region& r = table.regions[i];
        const bool tracks = r.rho_rule == RadiusRule::TracksRatio;
        os << i + 1 << ',' << format_double(r.ratio_lo) << ',' << format_double(r.ratio_hi) << ','
           << (tracks ? std::string("ratio") : format_double(r.rho2)) << ',' << r.inner_count << ','
           << format_double(r.omega_over_pi()) << ','
           << (tracks ? std::string("sqrt(x^2-2xC+1)") : format_double(r.d_min)) << '\n';
    }
}

std::vector<ChannelRealization> read_channels(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const std::string where = path.string();
    std::vector<ChannelRealization> out;
    if (path.extension() == ".json") {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw IoError(where + ": " + e.what());
        }
        if (!j.is_array()) throw IoError(where + ": expected an array of rows");
        for (std::size_t i = 0; i < j.size(); ++i) {
            std::vector<double> row;
            try {
                row = j[i].get<std::vector<double>>();
            } catch (const json::exception&) {
                throw IoError(where + ": row " + std::to_string(i + 1) + " is not a list of numbers");
            }
            out.push_back(from_interleaved(row, where + ": row " + std::to_string(i + 1)));
        }
    } else {
        std::istringstream is(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::vector<double> row;
            bool numeric = true;
            std::string_view rest(line);
            while (true) {
                const auto comma = rest.find(',');
                double v = 0.0;
                if (!parse_number(rest.substr(0, comma), v)) {
                    numeric = false;
                    break;
                }
                row.push_back(v);
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
            if (!numeric) {
                if (out.empty() && lineno == 1) continue;
                throw IoError(where + ": line " + std::to_string(lineno) + " is not numeric");
            }
            out.push_back(from_interleaved(row, where + ": line " + std::to_string(lineno)));
        }
    }
    if (out.empty()) throw IoError(where + ": no channel realizations");
    return out;
}

void write_annulus_csv(std::ostream& os, std::span<const ChannelRealization> channels,
                       double power) {
    os << "ratio,r,R\n";
    for (const auto& h : channels) {
        const Annulus a = compute_annulus(h, power);
        os << format_double(a.ratio) << ',' << format_double(a.inner) << ','
           << format_double(a.outer) << '\n';
    }
}

void write_ser_csv(std::ostream& os, const SerCurve& curve, std::string_view axis) {
    os << axis << ",ser,errors,trials\n";
    for (const auto& p : curve.points)
        os << format_double(p.snr_db) << ',' << format_double(p.ser) << ',' << p.errors << ','
           << p.trials << '\n';
}

void write_rate_csv(std::ostream& os, const RateCurve& curve) {
    os << "snr_db,avg_bits,no_tx_fraction\n";
    for (const auto& p : curve.points)
        os << format_double(p.snr_db) << ',' << format_double(p.avg_bits) << ','
           << format_double(p.no_tx_fraction) << '\n';
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    return s;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for " + path.string() + ": " + ec.message());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace ceapsk
