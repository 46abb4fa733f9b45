#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "ceapsk/channel.hpp"
#include "ceapsk/constellation.hpp"
#include "ceapsk/io.hpp"
#include "ceapsk/optimizer.hpp"
#include "ceapsk/rng.hpp"
#include "ceapsk/sim.hpp"

#ifndef CEAPSK_GIT_DESCRIBE
#define CEAPSK_GIT_DESCRIBE "unknown"
#endif

namespace ceapsk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Argument problems detected after parsing; mapped to exit code 2.
struct BadArguments : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string tool_version() {
    return std::string(library_version()) + "+" + CEAPSK_GIT_DESCRIBE;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t parse_count(const std::string& text, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(v >= 1.0) ||
        v != std::floor(v) || v > 1e15)
        throw BadArguments(std::string(what) + " must be a positive integer, got '" + text + "'");
    return static_cast<std::uint64_t>(v);
}

std::vector<int> parse_sizes(const std::string& text) {
    std::vector<int> out;
    std::string_view rest(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view part = rest.substr(0, comma);
        int v = 0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || v < 2)
            throw BadArguments("bad constellation size '" + std::string(part) + "'");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (out.empty()) throw BadArguments("no constellation sizes given");
    return out;
}

std::vector<double> db_grid(const std::string& spec) {
    try {
        return parse_db_range(spec);
    } catch (const std::invalid_argument& e) {
        throw BadArguments(std::string("--snr: ") + e.what());
    }
}

std::string scheme_list(bool fixed) {
    std::string s;
    for (const auto sc : all_schemes()) {
        if (is_fixed_rate(sc) != fixed) continue;
        if (!s.empty()) s += ", ";
        s += to_string(sc);
    }
    return s;
}

Scheme resolve_scheme(const std::string& name, bool fixed) {
    const auto s = parse_scheme(name);
    if (!s || is_fixed_rate(*s) != fixed)
        throw BadArguments("unknown scheme '" + name + "'; valid schemes: " + scheme_list(fixed));
    return *s;
}

void warn_size(int n, std::ostream& err) {
    if (!is_power_of_two(n))
        err << "warning: N=" << n
            << " is not a power of two; results are best effort\n";
}

fs::path with_suffix(const fs::path& p, std::string_view suffix) {
    fs::path out = p;
    out.replace_extension();
    out += suffix;
    return out;
}

std::string table_csv(const RegionTable& t) {
    std::ostringstream os;
    write_region_table_csv(os, t);
    return os.str();
}

// ---------------------------------------------------------------------------
// Region table cache

struct TableSource {
    fs::path cache_dir = ".ceapsk-cache";
    bool use_cache = true;
    double grid_step = 1e-4;

    fs::path path_for(int n) const {
        const std::string key = "ceapsk-region-table;N=" + std::to_string(n) +
                                ";grid_step=" + format_double(grid_step) +
                                ";algorithm=" + std::to_string(kTableAlgorithmVersion);
        std::ostringstream hex;
        hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key);
        return cache_dir / hex.str() / "table.json";
    }

    RegionTable get(int n) const {
        if (use_cache) {
            const fs::path p = path_for(n);
            if (fs::exists(p)) {
                RegionTable t = region_table_from_json(read_text_file(p));
                if (t.size == n && t.grid_step == grid_step && !t.suboptimal) return t;
            }
            RegionTable t = build_region_table(n, grid_step);
            write_text_file(p, region_table_to_json(t));
            return t;
        }
        return build_region_table(n, grid_step);
    }
};

void add_table_options(CLI::App* sub, TableSource& src, std::string& cache_dir) {
    sub->add_option("--grid-step", src.grid_step, "Ratio grid step for region tables")
        ->capture_default_str();
    sub->add_option("--cache-dir", cache_dir, "Directory for cached region tables")
        ->capture_default_str();
    sub->add_flag("--no-cache", "Always rebuild region tables");
}

// ---------------------------------------------------------------------------
// Manifest

struct Manifest {
    std::string command;
    json parameters = json::object();
    std::uint64_t seed = 0;
    std::string started;
    std::vector<fs::path> outputs;

    void write(const fs::path& path) const {
        json outs = json::array();
        for (const auto& o : outputs) outs.push_back(o.generic_string());
        const json j{{"command", command},     {"parameters", parameters}, {"seed", seed},
                     {"tool", "ceapsk"},       {"version", tool_version()},
                     {"started", started},     {"finished", utc_now()},
                     {"outputs", std::move(outs)}};
        write_text_file(path, j.dump(2) + "\n");
    }
};

/// Every option of `sub` that carries a value, keyed by its long name.
json collect_parameters(const CLI::App* sub) {
    json p = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config") continue;
        if (opt->get_type_size() == 0) {
            if (opt->count() > 0) p[name] = true;
            continue;
        }
        std::string value;
        if (opt->count() > 0)
            value = opt->results().back();
        else
            value = opt->get_default_str();
        if (!value.empty()) p[name] = value;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Config files: a flat object of flags, or a run manifest.

std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::vector<std::string>& commands) {
    std::vector<std::string> rest;
    std::optional<std::string> config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size()) throw BadArguments("--config needs a file");
            config = args[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            config = a.substr(9);
        } else {
            rest.push_back(a);
        }
    }
    if (!config) return rest;

    json j;
    try {
        j = json::parse(read_text_file(*config));
    } catch (const json::exception& e) {
        throw BadArguments(*config + ": " + e.what());
    }
    if (!j.is_object()) throw BadArguments(*config + ": expected a JSON object");
    std::string command = j.value("command", std::string{});
    const json& flags = j.contains("parameters") ? j.at("parameters") : j;

    std::vector<std::string> from_file;
    for (const auto& [key, value] : flags.items()) {
        if (&flags == &j && key == "command") continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) from_file.push_back("--" + key);
        } else if (value.is_string()) {
            from_file.push_back("--" + key);
            from_file.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            from_file.push_back("--" + key);
            from_file.push_back(value.dump());
        } else {
            throw BadArguments(*config + ": unsupported value for '" + key + "'");
        }
    }

    std::vector<std::string> out;
    std::size_t start = 0;
    if (!rest.empty() && std::find(commands.begin(), commands.end(), rest.front()) != commands.end()) {
        if (!command.empty() && command != rest.front())
            throw BadArguments(*config + " is for '" + command + "', not '" + rest.front() + "'");
        command = rest.front();
        start = 1;
    }
    if (command.empty()) throw BadArguments(*config + ": no command given");
    out.push_back(command);
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(start), rest.end());
    return out;
}

// ---------------------------------------------------------------------------
// Commands

struct DesignArgs {
    int n = 16;
    double ratio = 0.0;
    std::string points_out;
};

std::string constellation_name(const P2Solution& s) {
    const int n = s.constellation.size();
    const auto pts = s.constellation.points();
    const bool on_circle = std::all_of(pts.points.begin(), pts.points.end(),
                                       [](cdouble p) { return std::abs(std::abs(p) - 1.0) < 1e-12; });
    if (on_circle && std::abs(s.d_min - 2.0 * std::sin(std::numbers::pi / n)) < 1e-9) {
        if (n == 2) return "BPSK";
        if (n == 4) return "QPSK";
        return std::to_string(n) + "-PSK";
    }
    return std::to_string(s.phase.outer_count) + "+" + std::to_string(s.inner_count) + " APSK";
}

int cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
    if (!(a.ratio >= 0.0 && a.ratio <= 1.0))
        throw BadArguments("--ratio must lie in [0, 1]");
    warn_size(a.n, err);
    const P2Solution s = solve_p2(a.n, a.ratio);
    const json j{{"size", a.n},
                 {"ratio", a.ratio},
                 {"name", constellation_name(s)},
                 {"outer_count", s.phase.outer_count},
                 {"inner_count", s.inner_count},
                 {"rho2", s.rho2()},
                 {"omega2", s.phase.omega2},
                 {"omega2_over_pi", s.phase.omega_over_pi()},
                 {"c12", s.phase.c12},
                 {"case", std::string(to_string(s.radius.case_tag))},
                 {"d_min", s.d_min},
                 {"constellation", json::parse(constellation_to_json(s.constellation))}};
    out << j.dump(2) << '\n';
    if (!a.points_out.empty()) {
        std::ostringstream os;
        write_points_csv(os, s.constellation.points());
        write_text_file(a.points_out, os.str());
    }
    return kExitOk;
}

struct TableArgs {
    int n = 16;
    bool suboptimal = false;
    std::string out_dir = ".";
};

int cmd_table(const TableArgs& a, const TableSource& src, Manifest& m, std::ostream& out,
              std::ostream& err) {
    warn_size(a.n, err);
    const RegionTable t = src.get(a.n);
    const fs::path dir(a.out_dir);
    const std::string stem = "table_N" + std::to_string(a.n);
    auto emit = [&](const RegionTable& table, const std::string& name) {
        const fs::path json_path = dir / (name + ".json");
        const fs::path csv_path = dir / (name + ".csv");
        write_text_file(json_path, region_table_to_json(table) + "\n");
        write_text_file(csv_path, table_csv(table));
        m.outputs.push_back(json_path);
        m.outputs.push_back(csv_path);
        out << name << ": " << table.regions.size() << " regions\n" << table_csv(table);
    };
    emit(t, stem);
    if (a.suboptimal) emit(build_suboptimal_table(t), stem + "_suboptimal");
    m.write(dir / (stem + ".manifest.json"));
    return kExitOk;
}

struct SimArgs {
    std::string scheme;
    std::size_t m = 2;
    int n = 16;
    std::string snr = "0:40:1";
    std::string trials = "1e6";
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::string csit_sweep;
    std::optional<double> csit_snr;
    double pe = 1e-3;
    std::string sizes = "2,4,8,16,32,64";
    std::string out;
};

SimConfig base_config(const SimArgs& a) {
    SimConfig cfg;
    cfg.antennas = a.m;
    cfg.trials = parse_count(a.trials, "--trials");
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    for (const double db : db_grid(a.snr)) cfg.snr_grid.push_back(db_to_linear(db));
    return cfg;
}

int cmd_ser(const SimArgs& a, const TableSource& src, Manifest& m, std::ostream& out) {
    SimConfig cfg = base_config(a);
    cfg.scheme = resolve_scheme(a.scheme, true);
    cfg.size = a.n;
    if (a.csit_snr) cfg.csit = CsitModel{db_to_linear(*a.csit_snr), cfg.path_loss};
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw BadArguments(e.what());
    }

    std::optional<RegionTable> table;
    if (cfg.scheme == Scheme::ProposedOptimal) table = src.get(a.n);
    if (cfg.scheme == Scheme::ProposedSuboptimal) table = build_suboptimal_table(src.get(a.n));
    const RegionTable* tp = table ? &*table : nullptr;

    std::ostringstream csv;
    if (!a.csit_sweep.empty()) {
        if (a.csit_snr) throw BadArguments("--csit-sweep and --csit-snr are exclusive");
        std::vector<double> tr;
        for (const double db : db_grid(a.csit_sweep)) tr.push_back(db_to_linear(db));
        write_ser_csv(csv, run_csit_sweep(cfg, tr, tp), "snr_tr_db");
    } else {
        write_ser_csv(csv, run_fixed_rate_ser(cfg, tp));
    }
    const fs::path path = a.out.empty() ? fs::path("ser.csv") : fs::path(a.out);
    write_text_file(path, csv.str());
    m.seed = cfg.seed;
    m.outputs.push_back(path);
    m.write(with_suffix(path, ".manifest.json"));
    out << "wrote " << path.generic_string() << '\n';
    return kExitOk;
}

int cmd_rate(const SimArgs& a, const TableSource& src, Manifest& m, std::ostream& out) {
    SimConfig cfg = base_config(a);
    cfg.scheme = resolve_scheme(a.scheme, false);
    cfg.target_ser = a.pe;
    cfg.sizes = parse_sizes(a.sizes);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw BadArguments(e.what());
    }

    RateCurve curve;
    if (cfg.scheme == Scheme::VariableRateApsk) {
        std::map<int, RegionTable> tables;
        for (const int n : cfg.sizes) tables.emplace(n, src.get(n));
        curve = run_variable_rate(cfg, ApskRateFamily(std::move(tables)));
    } else {
        curve = run_variable_rate(cfg, QamRateFamily());
    }
    std::ostringstream csv;
    write_rate_csv(csv, curve);
    const fs::path path = a.out.empty() ? fs::path("rate.csv") : fs::path(a.out);
    write_text_file(path, csv.str());
    m.seed = cfg.seed;
    m.outputs.push_back(path);
    m.write(with_suffix(path, ".manifest.json"));
    out << "wrote " << path.generic_string() << '\n';
    return kExitOk;
}

struct CdfArgs {
    std::size_t m = 2;
    std::string trials = "1e6";
    std::uint64_t seed = 1;
    int points = 101;
    std::string channels;
    double power = 1.0;
    std::string out = "cdf.csv";
};

int cmd_cdf(const CdfArgs& a, Manifest& m, std::ostream& out) {
    const fs::path path(a.out);
    std::ostringstream csv;
    if (!a.channels.empty()) {
        if (!(a.power > 0.0)) throw BadArguments("--power must be positive");
        const auto channels = read_channels(a.channels);
        write_annulus_csv(csv, channels, a.power);
    } else {
        if (a.m < 1) throw BadArguments("--m must be at least 1");
        if (a.points < 2) throw BadArguments("--points must be at least 2");
        const std::uint64_t trials = parse_count(a.trials, "--trials");
        std::vector<double> ratios(trials);
        for (std::uint64_t t = 0; t < trials; ++t) {
            StreamRng rng(a.seed, t, Substream::Channel);
            ratios[t] = annulus_ratio(sample_rayleigh(a.m, 1.0, rng).gains);
        }
        std::sort(ratios.begin(), ratios.end());
        const bool analytic = a.m == 2;
        csv << (analytic ? "ratio,empirical,analytic\n" : "ratio,empirical\n");
        for (int i = 0; i < a.points; ++i) {
            const double x = i + 1 == a.points ? 1.0 : static_cast<double>(i) / (a.points - 1);
            const auto below = std::upper_bound(ratios.begin(), ratios.end(), x) - ratios.begin();
            csv << format_double(x) << ','
                << format_double(static_cast<double>(below) / static_cast<double>(trials));
            if (analytic) csv << ',' << format_double(ratio_cdf_m2(x));
            csv << '\n';
        }
        m.seed = a.seed;
    }
    write_text_file(path, csv.str());
    m.outputs.push_back(path);
    m.write(with_suffix(path, ".manifest.json"));
    out << "wrote " << path.generic_string() << '\n';
    return kExitOk;
}

void add_sim_options(CLI::App* sub, SimArgs& a) {
    sub->add_option("--m", a.m, "Transmit antennas")->capture_default_str();
    sub->add_option("--snr", a.snr, "SNR grid lo:hi:step in dB (or one value)")->capture_default_str();
    sub->add_option("--trials", a.trials, "Channel realizations per SNR point")->capture_default_str();
    sub->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    sub->add_option("--threads", a.threads, "Worker cap (0 = all cores); never changes results")
        ->capture_default_str();
}

}  // namespace

std::uint64_t fnv1a(std::string_view data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> commands{"design", "table", "ser", "rate", "cdf"};

    CLI::App app{"Constant-envelope precoding with adaptive two-ring APSK constellations", "ceapsk"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());
    std::string config_help;
    app.add_option("--config", config_help, "JSON file supplying flags (or a run manifest to replay)");
    app.footer("Schemes: " + scheme_list(true) + ", " + scheme_list(false) +
               "\nAny flag can also come from --config FILE.json (a flat object of flags, or a "
               "run manifest); command-line flags win.\nExit codes: 0 success, 2 bad arguments, "
               "3 runtime failure.");

    TableSource tables;
    std::string cache_dir = tables.cache_dir.string();

    DesignArgs design;
    auto* design_cmd = app.add_subcommand("design", "Optimal two-ring APSK for one annulus ratio");
    design_cmd->add_option("--n", design.n, "Constellation size")->required();
    design_cmd->add_option("--ratio", design.ratio, "Annulus ratio r/R in [0, 1]")->required();
    design_cmd->add_option("--points-out", design.points_out, "Also write the points as CSV");

    TableArgs table;
    auto* table_cmd = app.add_subcommand("table", "Region table over r/R (JSON and CSV)");
    table_cmd->add_option("--n", table.n, "Constellation size")->required();
    table_cmd->add_flag("--suboptimal", table.suboptimal, "Also write the two-region table");
    table_cmd->add_option("--out", table.out_dir, "Output directory")->capture_default_str();
    add_table_options(table_cmd, tables, cache_dir);

    SimArgs ser;
    ser.scheme = "proposed-optimal";
    auto* ser_cmd = app.add_subcommand("ser", "Average SER of a fixed-rate scheme");
    ser_cmd->add_option("--scheme", ser.scheme, "One of: " + scheme_list(true))->capture_default_str();
    ser_cmd->add_option("--n", ser.n, "Constellation size")->capture_default_str();
    add_sim_options(ser_cmd, ser);
    ser_cmd->add_option("--csit-sweep", ser.csit_sweep,
                        "Training SNR grid lo:hi:step in dB; needs a single --snr");
    ser_cmd->add_option("--csit-snr", ser.csit_snr, "Fixed training SNR in dB (imperfect CSIT)");
    ser_cmd->add_option("--out", ser.out, "Curve CSV path")->default_str("ser.csv");
    add_table_options(ser_cmd, tables, cache_dir);

    SimArgs rate;
    rate.scheme = "variable-apsk";
    rate.snr = "0:40:1";
    auto* rate_cmd = app.add_subcommand("rate", "Average spectral efficiency of variable-rate transmission");
    rate_cmd->add_option("--scheme", rate.scheme, "One of: " + scheme_list(false))->capture_default_str();
    add_sim_options(rate_cmd, rate);
    rate_cmd->add_option("--pe", rate.pe, "Target SER in (0, 1)")->capture_default_str();
    rate_cmd->add_option("--sizes", rate.sizes, "Candidate sizes, comma separated")->capture_default_str();
    rate_cmd->add_option("--out", rate.out, "Curve CSV path")->default_str("rate.csv");
    add_table_options(rate_cmd, tables, cache_dir);

    CdfArgs cdf;
    auto* cdf_cmd = app.add_subcommand("cdf", "Empirical vs analytic CDF of r/R, or annulus stats of a channel file");
    cdf_cmd->add_option("--m", cdf.m, "Transmit antennas (analytic column for M=2)")->capture_default_str();
    cdf_cmd->add_option("--trials", cdf.trials, "Rayleigh samples")->capture_default_str();
    cdf_cmd->add_option("--seed", cdf.seed, "Random seed")->capture_default_str();
    cdf_cmd->add_option("--points", cdf.points, "Grid points on [0, 1]")->capture_default_str();
    cdf_cmd->add_option("--channels", cdf.channels, "Channel file (JSON or CSV, interleaved re/im)");
    cdf_cmd->add_option("--power", cdf.power, "Transmit power for annulus stats")->capture_default_str();
    cdf_cmd->add_option("--out", cdf.out, "Output CSV path")->capture_default_str();

    std::vector<std::string> args;
    try {
        args = expand_config(raw_args, commands);
    } catch (const BadArguments& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeFailure;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitBadArguments;
    }

    tables.cache_dir = cache_dir;
    CLI::App* chosen = app.get_subcommands().front();
    const CLI::Option* no_cache = chosen->get_option_no_throw("--no-cache");
    tables.use_cache = no_cache == nullptr || no_cache->count() == 0;
    Manifest manifest;
    manifest.command = chosen->get_name();
    manifest.parameters = collect_parameters(chosen);
    manifest.started = utc_now();

    try {
        if (chosen == design_cmd) return cmd_design(design, out, err);
        if (chosen == table_cmd) return cmd_table(table, tables, manifest, out, err);
        if (chosen == ser_cmd) return cmd_ser(ser, tables, manifest, out);
        if (chosen == rate_cmd) return cmd_rate(rate, tables, manifest, out);
        return cmd_cdf(cdf, manifest, out);
    } catch (const BadArguments& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeFailure;
    }
}

}  // namespace ceapsk::cli
