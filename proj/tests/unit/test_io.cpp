#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ceapsk/io.hpp"

using namespace ceapsk;
namespace fs = std::filesystem;

namespace {
fs::path scratch_dir() {
    const fs::path p = fs::temp_directory_path() / ("ceapsk_io_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}
}  // namespace

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.0), "0");
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1e-3), "0.001");
    const double v = 0.4602880504131317;
    EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(ConstellationJson, RoundTrip) {
    const ApskConstellation c({Ring{11, 1.0, 0.0}, Ring{5, 0.46, 0.0571}});
    const auto back = constellation_from_json(constellation_to_json(c));
    EXPECT_EQ(back.rings(), c.rings());
    EXPECT_THROW(constellation_from_json("{\"rings\": 3}"), IoError);
    EXPECT_THROW(constellation_from_json("{\"rings\":[{\"count\":4,\"radius\":0.5,\"offset\":0}]}"),
                 std::invalid_argument);
}

TEST(PointsCsv, Layout) {
    std::ostringstream os;
    write_points_csv(os, PointSet{{cdouble(1, 0), cdouble(0, -0.5)}});
    EXPECT_EQ(os.str(), "re,im\n1,0\n0,-0.5\n");
}

TEST(RegionTableIo, JsonRoundTripAndCsv) {
    const RegionTable t = build_region_table(16, 1e-3);
    const RegionTable back = region_table_from_json(region_table_to_json(t));
    ASSERT_EQ(back.regions.size(), t.regions.size());
    for (std::size_t i = 0; i < t.regions.size(); ++i) {
        EXPECT_EQ(back.regions[i].ratio_lo, t.regions[i].ratio_lo);
        EXPECT_EQ(back.regions[i].rho2, t.regions[i].rho2);
        EXPECT_EQ(back.regions[i].rho_rule, t.regions[i].rho_rule);
        EXPECT_EQ(back.regions[i].omega_num, t.regions[i].omega_num);
    }
    std::ostringstream os;
    write_region_table_csv(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "region,ratio_lo,ratio_hi,rho2,N2,omega2_over_pi,dmin_rule");
    std::getline(is, line);
    EXPECT_EQ(line.rfind("1,0,0.46028", 0), 0u);
    std::getline(is, line);
    EXPECT_NE(line.find(",ratio,5,"), std::string::npos);
}

TEST(RegionTableIo, RejectsOtherAlgorithmVersion) {
    std::string j = region_table_to_json(build_region_table(4, 1e-2));
    const auto pos = j.find("\"algorithm_version\": 1");
    ASSERT_NE(pos, std::string::npos);
    j.replace(pos, 22, "\"algorithm_version\": 99");
    EXPECT_THROW(region_table_from_json(j), IoError);
}

TEST(Channels, ReadJsonAndCsv) {
    const fs::path dir = scratch_dir();
    write_text_file(dir / "h.json", "[[1, 0, 0, 0.5], [0.3, 0.4, 0, 0]]");
    write_text_file(dir / "h.csv", "re0,im0,re1,im1\n1,0,0,0.5\n\n0.3,0.4,0,0\n");
    for (const char* name : {"h.json", "h.csv"}) {
        const auto hs = read_channels(dir / name);
        ASSERT_EQ(hs.size(), 2u) << name;
        EXPECT_EQ(hs[0].gains[1], cdouble(0.0, 0.5));
        EXPECT_EQ(hs[1].gains[0], cdouble(0.3, 0.4));
    }
    std::ostringstream os;
    const auto hs = read_channels(dir / "h.csv");
    write_annulus_csv(os, hs, 2.0);
    EXPECT_EQ(os.str(), "ratio,r,R\n0.3333333333333333,0.5,1.5\n1,0.5,0.5\n");

    write_text_file(dir / "odd.csv", "1,2,3\n");
    EXPECT_THROW(read_channels(dir / "odd.csv"), IoError);
    write_text_file(dir / "bad.csv", "1,2\nx,y\n");
    EXPECT_THROW(read_channels(dir / "bad.csv"), IoError);
    EXPECT_THROW(read_channels(dir / "missing.csv"), IoError);
    fs::remove_all(dir);
}

TEST(Curves, CsvHeaders) {
    SerCurve s;
    s.points = {{10.0, 0.25, 250, 1000, 0.5}};
    std::ostringstream a;
    write_ser_csv(a, s);
    EXPECT_EQ(a.str(), "snr_db,ser,errors,trials\n10,0.25,250,1000\n");
    RateCurve r;
    r.points = {{5.0, 1.5, 0.125, 1000}};
    std::ostringstream b;
    write_rate_csv(b, r);
    EXPECT_EQ(b.str(), "snr_db,avg_bits,no_tx_fraction\n5,1.5,0.125\n");
}
