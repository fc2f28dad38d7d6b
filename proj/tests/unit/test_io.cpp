#include "modscat/error.hpp"
#include "modscat/io.hpp"

#include "json.hpp"
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

using namespace modscat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "modscat-io-test";
    fs::create_directories(d);
    return d / name;
}

SnapshotRecord random_record(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    SnapshotRecord r;
    r.n = n;
    r.L = 37.5;
    r.t = 12.345678901234567;
    r.lambdas = {1.0, -0.5, 0.25};
    r.step_count = 123456789;
    r.u.resize(n);
    r.chi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.u[i] = {N(rng), N(rng)};
        r.chi[i] = N(rng);
    }
    r.u[0] = {-0.0, std::numeric_limits<double>::denorm_min()};
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << s;
}

Errc read_error(const fs::path& p) {
    try {
        read_snapshot(p);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::invalid_argument; // no error: reported as a mismatch below
}

} // namespace

TEST(Snapshot, BitExactRoundtrip) {
    SnapshotRecord r = random_record(256, 7);
    fs::path p = scratch("round.bin");
    write_snapshot(r, p);
    SnapshotRecord back = read_snapshot(p);
    EXPECT_TRUE(bit_equal(r, back));
    EXPECT_TRUE(std::signbit(back.u[0].real()));
}

TEST(Snapshot, CorruptedPayloadIsChecksumError) {
    fs::path p = scratch("corrupt.bin");
    write_snapshot(random_record(64, 8), p);
    std::string s = slurp(p);
    s[s.size() - 100] ^= 0x01;
    spit(p, s);
    EXPECT_EQ(read_error(p), Errc::checksum);
}

TEST(Snapshot, TruncatedFileIsDistinctError) {
    fs::path p = scratch("trunc.bin");
    write_snapshot(random_record(64, 9), p);
    std::string s = slurp(p);
    spit(p, s.substr(0, s.size() - 9));
    EXPECT_EQ(read_error(p), Errc::truncated);
    spit(p, s.substr(0, 10));
    EXPECT_EQ(read_error(p), Errc::truncated);
}

TEST(Snapshot, VersionMismatchIsDistinctError) {
    fs::path p = scratch("version.bin");
    SnapshotRecord r = random_record(32, 10);
    r.format_version = kSnapshotVersion + 1;
    write_snapshot(r, p);
    EXPECT_EQ(read_error(p), Errc::version_mismatch);
}

TEST(Snapshot, BadMagicIsIoError) {
    fs::path p = scratch("magic.bin");
    write_snapshot(random_record(32, 11), p);
    std::string s = slurp(p);
    s[0] = 'X';
    spit(p, s);
    EXPECT_EQ(read_error(p), Errc::io);
    EXPECT_THROW(read_snapshot(scratch("missing.bin")), Error);
}

TEST(Snapshot, StateConversionKeepsEverything) {
    GridSpec g(64, 10.0);
    SimulationState s = initial_data_gaussian(0.1, 3.0, g);
    s.t = 3.5;
    s.step_count = 42;
    s.chi[5] = 0.125;
    NonlinearitySpec nl({1.0, 0.5});
    SimulationState back = state_of(record_of(s, nl));
    EXPECT_EQ(back.t, s.t);
    EXPECT_EQ(back.step_count, 42);
    EXPECT_EQ(back.u.grid, g);
    EXPECT_EQ(back.u.values, s.u.values);
    EXPECT_EQ(back.chi, s.chi);
}

TEST(Csv, EmptyTableHasHeaderOnlyAndFieldRowsMatchGrid) {
    fs::path p = scratch("empty.csv");
    write_csv(p, {"t", "y"}, {});
    EXPECT_EQ(slurp(p), "t,y\n");
    GridSpec g(128, 5.0);
    fs::path q = scratch("field.csv");
    write_field_csv(q, SpectralField(g));
    std::string s = slurp(q);
    EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), g.n + 1);
}

TEST(Csv, SeventeenDigitsRoundtrip) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308}) EXPECT_EQ(std::stod(fmt17(v)), v);
}

TEST(Json, TextRoundtripsThroughParser) {
    nlohmann::ordered_json j;
    j["slope"] = -1.4921;
    j["window"] = {100.0, 1000.0};
    fs::path p = scratch("x.json");
    write_text(p, j.dump(2));
    auto back = nlohmann::json::parse(slurp(p));
    EXPECT_EQ(back["slope"].get<double>(), -1.4921);
    EXPECT_EQ(back["window"][1].get<double>(), 1000.0);
}
