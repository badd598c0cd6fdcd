#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cflm/config.hpp"
#include "cflm/io.hpp"
#include "cflm/rng.hpp"

using namespace cflm;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

const char* kMinimalConfig = R"(
# minimal run setup
[grid]
n_x = 32
n_y = 32
n_z = 32
l_x = 12.0
l_y = 12.0
l_z = 12.0
[params]
a = 2.0
kappa = 0.2
)";

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const Config cfg = parse_config(kMinimalConfig);
    CHECK(cfg.grid.n[0] == 32);
    CHECK(cfg.params.a == 2.0);
    CHECK(cfg.params.kappa == 0.2);
    CHECK(cfg.params.epsilon == doctest::Approx((0.2 - 1.0 / 16.0) / 2.0));
    CHECK(cfg.run.dealias_enabled);
    CHECK(cfg.run.nonlinear_enabled);
    CHECK(cfg.run.output_every == 10);
    CHECK(cfg.run.seed == 12345);
    CHECK(cfg.run.init.kind == InitKind::gaussian);
    CHECK(cfg.run.init.amplitude == -1.0);  // auto
}

TEST_CASE("config rejects kappa at or below 1/16 citing the hypothesis") {
    try {
        parse_config("params.kappa = 0.05\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("kappa") != std::string::npos);
        CHECK(msg.find("1/16") != std::string::npos);
        CHECK(msg.find("epsilon") != std::string::npos);
    }
    // kappa fine but epsilon too aggressive
    CHECK_THROWS(parse_config("params.kappa = 0.2\nparams.epsilon = 0.15\n"));
}

TEST_CASE("config errors name the key and line") {
    try {
        parse_config("grid.n_x = 7\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("grid.n_x") != std::string::npos);
        CHECK(msg.find("even") != std::string::npos);
        CHECK(msg.find("line 1") != std::string::npos);
    }
    try {
        parse_config("time.dt = 0.1\nbogus.key = 3\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bogus.key") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("unknown") != std::string::npos);
    }
    CHECK_THROWS(parse_config("time.dt = fast\n"));          // type mismatch
    CHECK_THROWS(parse_config("seed = 1\nseed = 2\n"));      // duplicate
    CHECK_THROWS(parse_config("init.kind = vortex\n"));      // bad enum
    CHECK_THROWS(parse_config("init.width = 0.1\n"));        // under-resolved
}

TEST_CASE("config round trip is the identity on the validated structure") {
    const Config a = parse_config(kMinimalConfig);
    const Config b = parse_config(serialize_config(a));
    CHECK(a == b);
    const Config c = parse_config(serialize_config(b));
    CHECK(b == c);
}

TEST_CASE("norm csv round trip is value-exact") {
    Rng rng(99);
    std::vector<NormRecord> recs;
    for (int i = 0; i < 1000; ++i) {
        NormRecord r;
        r.t = rng.uniform(0, 10);
        const int pp = static_cast<int>(rng.next_u64() % 3);
        r.p = pp == 0 ? 1.0 : pp == 1 ? 2.0 : kInf;
        r.k1 = static_cast<int>(rng.next_u64() % 3);
        r.k2 = static_cast<int>(rng.next_u64() % 3);
        r.k3 = static_cast<int>(rng.next_u64() % 3);
        r.value = std::exp(rng.uniform(-200, 10)) * (rng.uniform() < 0.5 ? 1.0 : -1.0);
        recs.push_back(r);
    }
    const std::string path = tmp_path("cflm_norms_test.csv");
    write_norm_csv(recs, path);
    const auto back = read_norm_csv(path);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].t == recs[i].t);
        CHECK(back[i].p == recs[i].p);
        CHECK(back[i].k1 == recs[i].k1);
        CHECK(back[i].value == recs[i].value);
    }
    std::filesystem::remove(path);
}

TEST_CASE("norm csv edge cases") {
    const std::string path = tmp_path("cflm_norms_edge.csv");
    {
        std::ofstream out(path);
    }
    CHECK(read_norm_csv(path).empty());  // empty file
    {
        std::ofstream out(path);
        out << "time,p,k1,k2,k3,value\n";
    }
    CHECK_THROWS(read_norm_csv(path));  // header mismatch
    {
        std::ofstream out(path);
        out << "t,p,k1,k2,k3,value\n1.0,2.0,0,0\n";
    }
    try {
        read_norm_csv(path);
        FAIL("expected row error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("snapshot round trip is bit-exact") {
    const Grid g = make_grid({16, 16, 16}, {7.5, 12.0, 9.0});
    Field f(g, 0.43);
    Rng rng(5);
    for (auto& v : f.values) v = rng.gaussian();
    const SnapshotMeta meta{3.0, 0.2, 1.75};
    const std::string path = tmp_path("cflm_snap_test.cflm");
    write_snapshot(f, meta, path);
    const auto [back, meta2] = read_snapshot(path);
    CHECK(back.grid == g);
    CHECK(back.frame_tilt == f.frame_tilt);
    CHECK(meta2.a == meta.a);
    CHECK(meta2.kappa == meta.kappa);
    CHECK(meta2.t == meta.t);
    REQUIRE(back.values.size() == f.values.size());
    CHECK(std::memcmp(back.values.data(), f.values.data(), 8 * f.values.size()) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("snapshot rejects bad magic, version and truncation") {
    const Grid g = make_grid({8, 8, 8}, {1.0, 1.0, 1.0});
    Field f(g);
    const std::string path = tmp_path("cflm_snap_bad.cflm");
    write_snapshot(f, {}, path);

    auto mutate = [&](std::size_t off, char c) {
        std::fstream s(path, std::ios::in | std::ios::out | std::ios::binary);
        s.seekp(static_cast<std::streamoff>(off));
        s.put(c);
    };
    mutate(0, 'X');
    try {
        read_snapshot(path);
        FAIL("expected magic error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("magic") != std::string::npos);
    }
    write_snapshot(f, {}, path);
    mutate(5, 2);  // version byte
    try {
        read_snapshot(path);
        FAIL("expected version error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
    write_snapshot(f, {}, path);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 17);
    CHECK_THROWS(read_snapshot(path));
    std::filesystem::remove(path);
}

TEST_CASE("rate report csv writes one line per report") {
    RateReport r;
    r.name = "time p=inf";
    r.predicted_exponent = -0.75;
    r.fitted_exponent = -0.74;
    r.fit_stderr = 0.01;
    r.ratio_min = 0.9;
    r.ratio_max = 1.2;
    r.verdict = Verdict::pass;
    const std::string path = tmp_path("cflm_rates.csv");
    write_rate_reports_csv({r, r}, path);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);  // header + 2 rows
    std::filesystem::remove(path);
}
