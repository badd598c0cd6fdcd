#include "cflm/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cflm {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace {

constexpr char kMagic[5] = {'C', 'F', 'L', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& bytes, bool binary) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

double parse_p(const std::string& s, std::size_t row) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("norm csv row " + std::to_string(row) + ": bad p field '" + s +
                                 "'");
    return v;
}

}  // namespace

void write_norm_csv(const std::vector<NormRecord>& records, const std::string& path) {
    std::ostringstream out;
    out << "t,p,k1,k2,k3,value\n";
    for (const auto& r : records) {
        out << fmt17(r.t) << ',';
        if (std::isinf(r.p))
            out << "inf";
        else
            out << fmt17(r.p);
        out << ',' << r.k1 << ',' << r.k2 << ',' << r.k3 << ',' << fmt17(r.value) << '\n';
    }
    atomic_write(path, out.str(), false);
}

std::vector<NormRecord> read_norm_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open norm csv: " + path);
    std::string line;
    if (!std::getline(in, line)) return {};
    if (line == "") return {};
    if (line != "t,p,k1,k2,k3,value")
        throw std::runtime_error("norm csv header mismatch: got '" + line + "'");
    std::vector<NormRecord> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f[6];
        for (int i = 0; i < 6; ++i)
            if (!std::getline(ss, f[i], i < 5 ? ',' : '\n'))
                throw std::runtime_error("norm csv row " + std::to_string(row) +
                                         ": expected 6 fields");
        NormRecord r;
        char* end = nullptr;
        r.t = std::strtod(f[0].c_str(), &end);
        if (end == f[0].c_str()) throw std::runtime_error("norm csv row " + std::to_string(row) + ": bad t");
        r.p = parse_p(f[1], row);
        r.k1 = std::atoi(f[2].c_str());
        r.k2 = std::atoi(f[3].c_str());
        r.k3 = std::atoi(f[4].c_str());
        r.value = std::strtod(f[5].c_str(), &end);
        if (end == f[5].c_str())
            throw std::runtime_error("norm csv row " + std::to_string(row) + ": bad value");
        out.push_back(r);
    }
    return out;
}

void write_snapshot(const Field& field, const SnapshotMeta& meta, const std::string& path) {
    std::string bytes;
    bytes.reserve(5 + 4 + 3 * 4 + 3 * 8 + 4 * 8 + 8 * field.values.size());
    auto put = [&](const void* p, std::size_t n) {
        bytes.append(static_cast<const char*>(p), n);
    };
    put(kMagic, 5);
    put(&kVersion, 4);
    for (int a = 0; a < 3; ++a) {
        const std::uint32_t n = static_cast<std::uint32_t>(field.grid.n[a]);
        put(&n, 4);
    }
    for (int a = 0; a < 3; ++a) put(&field.grid.l[a], 8);
    put(&meta.a, 8);
    put(&meta.kappa, 8);
    put(&meta.t, 8);
    put(&field.frame_tilt, 8);
    put(field.values.data(), 8 * field.values.size());
    atomic_write(path, bytes, true);
}

std::pair<Field, SnapshotMeta> read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t off = 0;
    auto take = [&](void* p, std::size_t n) {
        if (off + n > bytes.size()) throw std::runtime_error("snapshot truncated: " + path);
        std::memcpy(p, bytes.data() + off, n);
        off += n;
    };
    char magic[5];
    take(magic, 5);
    if (std::memcmp(magic, kMagic, 5) != 0)
        throw std::runtime_error("snapshot has bad magic: " + path);
    std::uint32_t version = 0;
    take(&version, 4);
    if (version != kVersion)
        throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
    std::uint32_t n[3];
    for (auto& v : n) take(&v, 4);
    std::array<double, 3> l{};
    for (auto& v : l) take(&v, 8);
    SnapshotMeta meta;
    take(&meta.a, 8);
    take(&meta.kappa, 8);
    take(&meta.t, 8);
    double tilt = 0.0;
    take(&tilt, 8);
    Grid g = make_grid({static_cast<int>(n[0]), static_cast<int>(n[1]), static_cast<int>(n[2])}, l);
    Field f(g, tilt);
    const std::size_t payload = 8 * f.values.size();
    if (bytes.size() - off != payload)
        throw std::runtime_error("snapshot payload size mismatch: " + path);
    std::memcpy(f.values.data(), bytes.data() + off, payload);
    return {std::move(f), meta};
}

void write_rate_reports_csv(const std::vector<RateReport>& reports, const std::string& path) {
    std::ostringstream out;
    out << "name,predicted,fitted,stderr,ratio_min,ratio_max,tolerance,verdict\n";
    for (const auto& r : reports)
        out << r.name << ',' << fmt17(r.predicted_exponent) << ',' << fmt17(r.fitted_exponent)
            << ',' << fmt17(r.fit_stderr) << ',' << fmt17(r.ratio_min) << ','
            << fmt17(r.ratio_max) << ',' << fmt17(r.tolerance) << ',' << to_string(r.verdict)
            << '\n';
    atomic_write(path, out.str(), false);
}

std::string format_certificate(const InequalityCertificate& cert) {
    std::ostringstream out;
    out << (cert.verdict() == Verdict::pass ? "[PASS] " : "[FAIL] ") << cert.name << ": samples="
        << cert.sampled_points << " worst_margin=" << cert.worst_margin
        << " tol=" << cert.tolerance;
    for (const auto& [k, v] : cert.parameters) out << ' ' << k << '=' << v;
    return out.str();
}

std::string format_rate_report(const RateReport& rep) {
    std::ostringstream out;
    const char* tag = rep.verdict == Verdict::pass           ? "[PASS] "
                      : rep.verdict == Verdict::inconclusive ? "[????] "
                                                             : "[FAIL] ";
    out << tag << rep.name << ": fitted=" << rep.fitted_exponent
        << " predicted=" << rep.predicted_exponent << " +- " << rep.tolerance
        << " stderr=" << rep.fit_stderr << " ratio=[" << rep.ratio_min << ", " << rep.ratio_max
        << "]";
    return out.str();
}

void write_text_file(const std::string& text, const std::string& path) {
    atomic_write(path, text, false);
}

}  // namespace cflm
