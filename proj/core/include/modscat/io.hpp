#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "modscat/grid.hpp"
#include "modscat/solver.hpp"

namespace modscat {

inline constexpr std::uint32_t kSnapshotVersion = 1;

// On disk, little-endian:
//   "MSCATSNP" | u32 version | u64 n | f64 L | f64 t | u32 d | f64 lambdas[d] |
//   i64 step_count | u32 crc32(payload) | payload
// payload = f64 u[2n] (re, im interleaved) | f64 chi[n]
struct SnapshotRecord {
    std::uint32_t format_version = kSnapshotVersion;
    std::uint64_t n = 0;
    double L = 0.0;
    double t = 0.0;
    RVec lambdas;
    std::int64_t step_count = 0;
    CVec u;
    RVec chi;
};

bool bit_equal(const SnapshotRecord& a, const SnapshotRecord& b);

void write_snapshot(const SnapshotRecord& r, const std::filesystem::path& path);
SnapshotRecord read_snapshot(const std::filesystem::path& path);

SnapshotRecord record_of(const SimulationState& s, const NonlinearitySpec& nl);
SimulationState state_of(const SnapshotRecord& r);

std::string snapshot_filename(double t);

// 17 significant digits; round-trips every double.
std::string fmt17(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

// Rows are written in order; the header is always emitted.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<RVec>& rows);

// Columns xi, re, im; one row per grid node.
void write_field_csv(const std::filesystem::path& path, const SpectralField& f);

} // namespace modscat
