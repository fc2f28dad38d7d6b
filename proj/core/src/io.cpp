#include "modscat/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace modscat {

namespace {

constexpr char kMagic[8] = {'M', 'S', 'C', 'A', 'T', 'S', 'N', 'P'};

template <class U>
void put_le(std::string& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    Reader(const std::string& buf, const std::string& path) : b_(buf), path_(path) {}
    template <class U>
    U get() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            v |= static_cast<U>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
        pos_ += sizeof(U);
        return v;
    }
    double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    void need(std::size_t k) {
        if (pos_ + k > b_.size())
            throw Error(Errc::truncated, "snapshot " + path_ + ": file ends at byte " + std::to_string(b_.size()) +
                                             ", expected at least " + std::to_string(pos_ + k));
    }
    std::size_t pos() const { return pos_; }
    const std::string& buf() const { return b_; }

private:
    const std::string& b_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::string payload_of(const SnapshotRecord& r) {
    std::string p;
    p.reserve(r.u.size() * 16 + r.chi.size() * 8);
    for (const auto& z : r.u) {
        put_f64(p, z.real());
        put_f64(p, z.imag());
    }
    for (double c : r.chi) put_f64(p, c);
    return p;
}

std::uint32_t crc_of(const char* data, std::size_t len) {
    uLong c = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    while (len > 0) {
        uInt chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
        c = crc32(c, reinterpret_cast<const Bytef*>(data), chunk);
        data += chunk;
        len -= chunk;
    }
    return static_cast<std::uint32_t>(c);
}

} // namespace

bool bit_equal(const SnapshotRecord& a, const SnapshotRecord& b) {
    auto same = [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); };
    if (a.format_version != b.format_version || a.n != b.n || !same(a.L, b.L) || !same(a.t, b.t) ||
        a.step_count != b.step_count || a.lambdas.size() != b.lambdas.size() || a.u.size() != b.u.size() ||
        a.chi.size() != b.chi.size())
        return false;
    for (std::size_t i = 0; i < a.lambdas.size(); ++i)
        if (!same(a.lambdas[i], b.lambdas[i])) return false;
    for (std::size_t i = 0; i < a.u.size(); ++i)
        if (!same(a.u[i].real(), b.u[i].real()) || !same(a.u[i].imag(), b.u[i].imag())) return false;
    for (std::size_t i = 0; i < a.chi.size(); ++i)
        if (!same(a.chi[i], b.chi[i])) return false;
    return true;
}

void write_snapshot(const SnapshotRecord& r, const std::filesystem::path& path) {
    if (r.u.size() != r.n || r.chi.size() != r.n)
        throw Error(Errc::invalid_argument, "write_snapshot: payload length does not match n");
    std::string payload = payload_of(r);
    std::string out(kMagic, kMagic + 8);
    put_le<std::uint32_t>(out, r.format_version);
    put_le<std::uint64_t>(out, r.n);
    put_f64(out, r.L);
    put_f64(out, r.t);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.lambdas.size()));
    for (double l : r.lambdas) put_f64(out, l);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(r.step_count));
    put_le<std::uint32_t>(out, crc_of(payload.data(), payload.size()));
    out += payload;
    write_text(path, out);
}

SnapshotRecord read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "snapshot " + path.string() + ": cannot open");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader rd(buf, path.string());
    rd.need(8);
    if (std::memcmp(buf.data(), kMagic, 8) != 0)
        throw Error(Errc::io, "snapshot " + path.string() + ": not a snapshot file (bad magic)");
    for (int i = 0; i < 8; ++i) rd.get<std::uint8_t>();
    SnapshotRecord r;
    r.format_version = rd.get<std::uint32_t>();
    if (r.format_version != kSnapshotVersion)
        throw Error(Errc::version_mismatch, "snapshot " + path.string() + ": format version " +
                                                std::to_string(r.format_version) + ", expected " +
                                                std::to_string(kSnapshotVersion));
    r.n = rd.get<std::uint64_t>();
    r.L = rd.f64();
    r.t = rd.f64();
    auto d = rd.get<std::uint32_t>();
    if (d > 4) throw Error(Errc::io, "snapshot " + path.string() + ": invalid degree " + std::to_string(d));
    for (std::uint32_t i = 0; i < d; ++i) r.lambdas.push_back(rd.f64());
    r.step_count = static_cast<std::int64_t>(rd.get<std::uint64_t>());
    auto crc = rd.get<std::uint32_t>();
    if (r.n > (std::uint64_t(1) << 32)) throw Error(Errc::io, "snapshot " + path.string() + ": implausible n");
    const std::size_t plen = static_cast<std::size_t>(r.n) * 24;
    rd.need(plen);
    if (buf.size() != rd.pos() + plen)
        throw Error(Errc::io, "snapshot " + path.string() + ": trailing bytes after payload");
    if (crc_of(buf.data() + rd.pos(), plen) != crc)
        throw Error(Errc::checksum, "snapshot " + path.string() + ": payload checksum mismatch");
    r.u.resize(r.n);
    r.chi.resize(r.n);
    for (auto& z : r.u) {
        double re = rd.f64();
        double im = rd.f64();
        z = cplx(re, im);
    }
    for (auto& c : r.chi) c = rd.f64();
    return r;
}

SnapshotRecord record_of(const SimulationState& s, const NonlinearitySpec& nl) {
    SnapshotRecord r;
    r.n = s.u.grid.n;
    r.L = s.u.grid.L;
    r.t = s.t;
    r.lambdas = nl.lambdas;
    r.step_count = s.step_count;
    r.u = s.u.values;
    r.chi = s.chi.empty() ? RVec(r.n, 0.0) : s.chi;
    return r;
}

SimulationState state_of(const SnapshotRecord& r) {
    SimulationState s;
    GridSpec g(static_cast<std::size_t>(r.n), r.L);
    s.t = r.t;
    s.u = SpatialField(g, r.u);
    s.chi = r.chi;
    s.step_count = r.step_count;
    return s;
}

std::string snapshot_filename(double t) { return "t" + fmt17(t) + ".bin"; }

std::string fmt17(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw Error(Errc::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<RVec>& rows) {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + fmt17(row[i]);
        s += '\n';
    }
    write_text(path, s);
}

void write_field_csv(const std::filesystem::path& path, const SpectralField& f) {
    std::vector<RVec> rows;
    rows.reserve(f.grid.n);
    for (std::size_t k = 0; k < f.grid.n; ++k) rows.push_back({f.grid.xi(k), f.values[k].real(), f.values[k].imag()});
    write_csv(path, {"xi", "re", "im"}, rows);
}

} // namespace modscat
