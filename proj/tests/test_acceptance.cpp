// Acceptance suite: one test case per criterion, each printing a single
// [PASS]/[FAIL] line with the measured quantities.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "cflm/config.hpp"
#include "cflm/estimates.hpp"
#include "cflm/fft.hpp"
#include "cflm/io.hpp"
#include "cflm/rng.hpp"
#include "cflm/solver.hpp"
#include "oracles.hpp"

using namespace cflm;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

void report(int n, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", n, name.c_str(),
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
}

// reference parameters for the whole suite
Params base_params() { return make_params(0.0, 0.2); }

SpectralField band_spectrum(const Grid& g, int band, std::uint64_t seed) {
    Rng rng(seed);
    SpectralField s(g);
    for (int mz = -band; mz <= band; ++mz)
        for (int my = -band; my <= band; ++my)
            for (int mx = -band; mx <= band; ++mx) {
                if (mx < 0 || (mx == 0 && my < 0) || (mx == 0 && my == 0 && mz < 0)) continue;
                if (mx == 0 && my == 0 && mz == 0) continue;
                const std::complex<double> c(rng.gaussian(), rng.gaussian());
                s.at(g.mode_index(0, mx), g.mode_index(1, my), g.mode_index(2, mz)) =
                    c * g.volume();
                s.at(g.mode_index(0, -mx), g.mode_index(1, -my), g.mode_index(2, -mz)) =
                    std::conj(c) * g.volume();
            }
    return s;
}

}  // namespace

TEST_CASE("criterion 1: symbol exactness") {
    Rng rng(101);
    const double amps[3] = {0.0, 1.0, 8.0};
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Params p = make_params(amps[rng.next_u64() % 3], 0.2);
        const SymbolPoint pt{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4),
                             rng.uniform(1e-4, 10.0)};
        const double closed = symbol_exponent(pt, p);
        const double scale = std::max(1.0, std::abs(closed));
        auto integrand = [&](double s) {
            const double w = pt.eta + p.a * pt.xi * s;
            const double v = pt.xi * pt.xi + w * w + pt.zeta * pt.zeta;
            return v - p.kappa - 4.0 * v * v;
        };
        const double quad = oracles::integrate(integrand, 0.0, pt.t, 1e-13 * scale, 48);
        worst = std::max(worst, std::abs(closed - quad) / scale);
    }
    const double e_worked = symbol_exponent({1.0, 1.0, 1.0, 0.5}, make_params(1.0, 0.2));
    const bool pass = worst < 1e-10 && e_worked == -24.25;
    std::ostringstream d;
    d << "max rel err vs quadrature " << worst << " over 1e4 samples; E(1,0.2,1,1,1,0.5) = "
      << e_worked;
    report(1, "symbol exactness", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 2: exponent monotonicity and cocycle") {
    Rng rng(202);
    const double amps[3] = {0.0, 1.0, 8.0};
    bool slope_ok = true;
    double cocycle_worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Params p = make_params(amps[rng.next_u64() % 3], 0.2);
        const double xi = rng.uniform(-4, 4), eta = rng.uniform(-4, 4), zeta = rng.uniform(-4, 4);
        double t1 = rng.uniform(0, 5), t2 = rng.uniform(0, 5);
        if (t1 > t2) std::swap(t1, t2);
        if (t2 - t1 > 1e-6) {
            const double e1 = symbol_exponent({xi, eta, zeta, t1}, p);
            const double e2 = symbol_exponent({xi, eta, zeta, t2}, p);
            const double slack = 1e-11 * (std::abs(e1) + std::abs(e2) + 1.0);
            if (e2 - e1 > -(p.kappa - 1.0 / 16.0) * (t2 - t1) + slack) slope_ok = false;
        }
        const double whole = symbol_exponent({xi, eta, zeta, t1 + t2}, p);
        const double split = symbol_exponent({xi, eta, zeta, t1}, p) +
                             symbol_exponent({xi, eta + p.a * xi * t1, zeta, t2}, p);
        cocycle_worst =
            std::max(cocycle_worst, std::abs(whole - split) / std::max(1.0, std::abs(whole)));
    }
    const bool pass = slope_ok && cocycle_worst < 1e-12;
    std::ostringstream d;
    d << "slope bound " << (slope_ok ? "holds" : "violated") << "; cocycle worst rel err "
      << cocycle_worst;
    report(2, "monotonicity and cocycle", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 3: C0 condition") {
    bool pass = true;
    std::ostringstream d;
    const double c0 = c0_max(0.25, 0.125);  // kappa - eps = 1/8
    pass = pass && std::abs(c0 - 2.0) < 1e-15;
    // brute-force maximum of the quadratic over a refined v-grid
    double best_q = -kInf, best_v = 0.0;
    for (int i = 0; i <= 4000000; ++i) {
        const double v = 10.0 * i / 4000000.0;
        const double q = (c0 - 4.0) * v * v + v - 0.125;
        if (q > best_q) best_q = q, best_v = v;
    }
    pass = pass && std::abs(best_q) <= 1e-12 && std::abs(best_v - 0.25) < 1e-4;
    bool threw = false;
    try {
        c0_max(0.2, 0.2 - 1.0 / 16.0);
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    pass = pass && threw;
    d << "c0_max(mu = 1/8) = " << c0 << "; grid max " << best_q << " at v = " << best_v
      << "; infeasible case " << (threw ? "rejected" : "NOT rejected");
    report(3, "C0 condition", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 4: coercivity constants") {
    const double c4 = lemma_coercivity_constant(4.0);
    const double c2 = lemma_coercivity_constant(2.0);
    const double c1 = lemma_coercivity_constant(1.0);
    const bool pass = c4 >= 0.010 && c4 <= 0.013 && c4 <= 0.2 && c1 > 0.0 && c2 > 0.0;
    std::ostringstream d;
    d << "C4 = " << c4 << " (1/85 = " << 1.0 / 85.0 << "), C2 = " << c2 << ", C1 = " << c1;
    report(4, "coercivity constants", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 5: symbol bound and non-vacuousness probe") {
    const Params p = base_params();
    const auto cert1 = check_symbol_bound(p, 100000, 505, 1.0);
    const bool hold_ok = cert1.parameters.at("violations") == 0.0 &&
                         cert1.verdict() == Verdict::pass;
    const auto cert2 = check_symbol_bound(p, 100000, 505, 2.0);
    const std::size_t viol2 = static_cast<std::size_t>(cert2.parameters.at("violations"));
    const bool probe_ok = viol2 >= 1;
    // diagnostic: smallest tightening factor that does produce violations
    double first_violating = 0.0;
    for (double f : {2.0, 2.5, 3.0, 4.0, 6.0, 8.0}) {
        const auto c = check_symbol_bound(p, 100000, 505, f);
        if (c.parameters.at("violations") > 0.0) {
            first_violating = f;
            break;
        }
    }
    const bool pass = hold_ok && probe_ok;
    std::ostringstream d;
    d << "violations at 1x: " << cert1.parameters.at("violations") << " (worst margin "
      << cert1.worst_margin << "); violations at 2x: " << viol2
      << "; first violating factor on the scan: "
      << (first_violating > 0 ? std::to_string(first_violating) : std::string("> 8"))
      << " (the exact 2x chain still bounds the symbol everywhere)";
    report(5, "symbol bound + 2x probe", pass, d.str());
    CHECK_MESSAGE(pass,
                  "the 2x-tightened chain constant does not produce violations on the sampled "
                  "domain; see the decisions ledger for the analysis");
}

TEST_CASE("criterion 6: kernel mass, symmetry, transfer residuals") {
    const Params p = base_params();
    bool pass = true;
    double worst_mass = 0.0, worst_even = 0.0;
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
        const Grid g = kernel_grid(t, p);
        const Field ker = g2_kernel(t, g, p, make_kernel_spec({0, 0, 0}));
        double sum = 0.0, peak = 0.0;
        for (double v : ker.values) sum += v;
        sum *= g.cell_volume();
        worst_mass = std::max(worst_mass, std::abs(sum - std::exp(-p.kappa * t)));
        double even = 0.0;
        for (int iz = 0; iz < g.n[2]; ++iz)
            for (int iy = 0; iy < g.n[1]; ++iy)
                for (int ix = 0; ix < g.n[0]; ++ix) {
                    peak = std::max(peak, std::abs(ker.at(ix, iy, iz)));
                    const int jx = ix == 0 ? 0 : g.n[0] - ix;
                    const int jy = iy == 0 ? 0 : g.n[1] - iy;
                    const int jz = iz == 0 ? 0 : g.n[2] - iz;
                    even = std::max(even, std::abs(ker.at(ix, iy, iz) - ker.at(jx, jy, jz)));
                }
        worst_even = std::max(worst_even, even / peak);
    }
    pass = pass && worst_mass < 1e-10 && worst_even < 1e-10;
    double worst_transfer = 0.0;
    for (double a : {0.0, 2.0})
        for (double t : {0.5, 1.0}) {
            Params pa = p;
            pa.a = a;
            const auto cert = transfer_identity_residual(t, kernel_grid(t, pa), pa);
            const double rel = std::max({cert.parameters.at("residual_x"),
                                         cert.parameters.at("residual_y"),
                                         cert.parameters.at("residual_z")}) /
                               cert.parameters.at("peak");
            worst_transfer = std::max(worst_transfer, rel);
            pass = pass && cert.verdict() == Verdict::pass;
        }
    std::ostringstream d;
    d << "mass |err| " << worst_mass << "; evenness " << worst_even << "; transfer residual/peak "
      << worst_transfer;
    report(6, "kernel mass and symmetry", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 7: kernel L^p rates and enhanced-dissipation ordering") {
    const Params p = base_params();
    std::vector<double> ts;
    for (int i = 0; i < 9; ++i) ts.push_back(0.5 * std::pow(16.0, i / 8.0));
    const auto time_rep = kernel_time_rate_report(kInf, {0, 0, 0}, Side::unprimed, ts, p);
    const bool time_ok = std::abs(time_rep.fitted_exponent + 0.75) <= 0.1 &&
                         time_rep.verdict == Verdict::pass;
    std::vector<double> as;
    for (int i = 0; i < 7; ++i) as.push_back(4.0 * std::pow(2.0, 3.0 * i / 6.0));
    const auto amp_rep = kernel_amplitude_rate_report(kInf, {1, 0, 0}, Side::unprimed, 2.0, as, p);
    const bool amp_ok =
        std::abs(amp_rep.fitted_exponent + 2.0) <= 0.15 && amp_rep.verdict == Verdict::pass;
    bool ordering_ok = true;
    for (double pn : {1.0, 2.0, kInf}) {
        double prev = kInf;
        for (double a : {0.0, 1.0, 2.0, 4.0, 8.0}) {
            Params pa = p;
            pa.a = a;
            const double v =
                kernel_lp_norm(2.0, pn, kernel_grid(2.0, pa), pa, make_kernel_spec({0, 0, 0}));
            if (v > prev) ordering_ok = false;
            prev = v;
        }
    }
    const bool pass = time_ok && amp_ok && ordering_ok;
    std::ostringstream d;
    d << "t-slope " << time_rep.fitted_exponent << " (want -0.75 +- 0.1); A-slope "
      << amp_rep.fitted_exponent << " (want -2 +- 0.15); ordering "
      << (ordering_ok ? "non-increasing" : "VIOLATED");
    report(7, "L^p rates", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 8: pointwise bound stability under grid doubling") {
    const Params base = base_params();
    bool pass = true;
    std::ostringstream d;
    for (double a : {0.0, 4.0})
        for (double t : {1.0, 2.0})
            for (auto deriv : {std::array<int, 3>{0, 0, 0}, {1, 0, 0}}) {
                Params p = base;
                p.a = a;
                const Grid coarse = kernel_grid(t, p, 48);
                const Grid fine = make_grid(
                    {2 * coarse.n[0], 2 * coarse.n[1], 2 * coarse.n[2]}, coarse.l);
                const auto c1 = pointwise_bound_ratio(t, coarse, p, 2, deriv);
                const auto c2 = pointwise_bound_ratio(t, fine, p, 2, deriv);
                const double s1 = c1.parameters.at("sup_ratio");
                const double s2 = c2.parameters.at("sup_ratio");
                const bool ok = std::isfinite(s1) && std::isfinite(s2) && s2 <= 2.0 * s1;
                if (!ok || (a == 0.0 && t == 1.0 && deriv[0] == 0))
                    d << "(t=" << t << ",A=" << a << ",k1=" << deriv[0] << "): " << s1 << " -> "
                      << s2 << "; ";
                pass = pass && ok;
            }
    report(8, "pointwise bound stability", pass, d.str() + "all sup ratios stable within 2x");
    CHECK(pass);
}

TEST_CASE("criterion 9: solver linear exactness across remaps") {
    const Grid g = make_grid({32, 32, 32}, {kTwoPi, kTwoPi, kTwoPi});
    const Params p = make_params(4.0, 0.2);
    RunConfig cfg;
    cfg.nonlinear_enabled = false;
    SolverState st;
    st.params = p;
    st.config = cfg;
    st.spec = band_spectrum(g, 2, 909);
    const SpectralField init = st.spec;
    double init_scale = 0.0;
    for (const auto& c : init.coeffs) init_scale = std::max(init_scale, std::abs(c));
    const double dt = 0.002;
    const int n_steps = 500;  // t_end = 1, remaps at 0.25, 0.5, 0.75, 1
    int remaps = 0;
    double prev_tilt = 0.0, worst = 0.0;
    for (int n = 0; n < n_steps; ++n) {
        step_etdrk2(st, dt);
        if (st.spec.frame_tilt < prev_tilt) ++remaps;
        prev_tilt = st.spec.frame_tilt;
        for (int iz = 0; iz < g.n[2]; ++iz)
            for (int iy = 0; iy < g.n[1]; ++iy)
                for (int ix = 0; ix < g.n[0]; ++ix) {
                    const auto got = st.spec.at(ix, iy, iz);
                    const double xi = g.wavenumber(0, ix);
                    const double eta_phys = st.spec.eta_physical(iy, xi);
                    const double zeta = g.wavenumber(2, iz);
                    const double eta0 = eta_phys + p.a * st.t * xi;
                    const int m0 = static_cast<int>(std::lround(eta0 * g.l[1] / kTwoPi));
                    std::complex<double> expect(0.0, 0.0);
                    if (m0 >= -16 && m0 < 16)
                        expect = init.at(ix, g.mode_index(1, m0), iz) *
                                 multiplier_g2({xi, eta_phys, zeta, st.t}, p);
                    worst = std::max(worst, std::abs(got - expect));
                }
    }
    const bool pass = remaps >= 2 && worst < 1e-12 * init_scale;
    std::ostringstream d;
    d << remaps << " remap events; worst deviation " << worst / init_scale
      << " of the initial amplitude over " << n_steps << " steps";
    report(9, "linear exactness across remaps", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 10: nonlinear self-convergence order") {
    const Grid g = make_grid({32, 32, 32}, {16.0, 16.0, 16.0});
    const Params p = make_params(1.0, 0.2);
    auto run = [&](double dt) {
        RunConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 0.5;
        cfg.output_every = 1000000;
        cfg.init.kind = InitKind::gaussian;
        const RunArtifact art = simulate(g, p, cfg);
        REQUIRE(!art.sentinel);
        return art.final_state.spec;
    };
    const SpectralField u1 = run(0.025);
    const SpectralField u2 = run(0.0125);
    const SpectralField u4 = run(0.00625);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < u1.coeffs.size(); ++i) {
        e1 += std::norm(u1.coeffs[i] - u2.coeffs[i]);
        e2 += std::norm(u2.coeffs[i] - u4.coeffs[i]);
    }
    const double order = std::log2(std::sqrt(e1 / e2));
    const bool pass = order >= 1.7 && order <= 2.3;
    std::ostringstream d;
    d << "observed order " << order << " (dt = 0.025 / 0.0125 / 0.00625)";
    report(10, "self-convergence order", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 11: decay envelope with probe-doubled shear") {
    const Grid g = make_grid({48, 48, 48}, {32.0, 32.0, 32.0});
    const double kappa = 0.2;
    RunConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 8.0;
    cfg.output_every = 10;
    cfg.init.kind = InitKind::gaussian;  // auto amplitude: sup |grad phi0| = 1
    double a_probe = 0.0;
    RunArtifact probe_art;
    for (double a = 1.0; a <= 64.0; a *= 2.0) {
        const RunArtifact art = simulate(g, make_params(a, kappa), cfg);
        if (!art.sentinel && art.envelope_pass) {
            a_probe = a;
            probe_art = art;
            break;
        }
    }
    bool pass = a_probe > 0.0;
    std::ostringstream d;
    if (pass) {
        d << "A_probe = " << a_probe << "; ";
        for (const auto& row : probe_art.envelope) {
            d << "R(k=" << row.k << ",p=" << (std::isinf(row.p) ? "inf" : "2")
              << ") max/ref = " << row.r_max / row.r_ref << "; ";
            pass = pass && row.pass;
        }
        // paired run with the shear off must end with a strictly larger sup norm at t = 2
        RunConfig cfg2 = cfg;
        cfg2.t_end = 2.0;
        const RunArtifact art0 = simulate(g, make_params(0.0, kappa), cfg2);
        const RunArtifact artA = simulate(g, make_params(a_probe, kappa), cfg2);
        auto sup_final = [](const RunArtifact& a) {
            double v = 0.0;
            for (const auto& r : a.records)
                if (std::isinf(r.p) && r.k1 + r.k2 + r.k3 == 0) v = r.value;
            return v;
        };
        const double s0 = sup_final(art0), sA = sup_final(artA);
        pass = pass && !art0.sentinel && s0 > sA;
        d << "sup at t=2: A=0 " << s0 << " vs A=" << a_probe << " " << sA;
    } else {
        d << "no amplitude up to 64 passed the envelope check";
    }
    report(11, "decay envelope", pass, d.str());
    CHECK(pass);
}

TEST_CASE("criterion 12: persistence and config validation") {
    bool pass = true;
    std::ostringstream d;
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "cflm_acceptance").string();
    fs::create_directories(dir);
    // csv round trip
    {
        Rng rng(1212);
        std::vector<NormRecord> recs;
        for (int i = 0; i < 1000; ++i)
            recs.push_back({rng.uniform(0, 10),
                            (i % 3 == 0) ? kInf : (i % 3 == 1 ? 2.0 : 1.0), i % 2, 0, i % 3,
                            std::exp(rng.uniform(-300, 5))});
        write_norm_csv(recs, dir + "/norms.csv");
        const auto back = read_norm_csv(dir + "/norms.csv");
        bool ok = back.size() == recs.size();
        for (std::size_t i = 0; ok && i < recs.size(); ++i)
            ok = back[i].t == recs[i].t && back[i].p == recs[i].p &&
                 back[i].value == recs[i].value;
        pass = pass && ok;
        d << "csv round trip " << (ok ? "exact" : "MISMATCH") << "; ";
    }
    // snapshot round trip
    {
        const Grid g = make_grid({16, 16, 16}, {9.0, 7.0, 5.0});
        Field f(g, 0.31);
        Rng rng(3131);
        for (auto& v : f.values) v = rng.gaussian();
        write_snapshot(f, {2.0, 0.2, 4.5}, dir + "/snap.cflm");
        const auto [back, meta] = read_snapshot(dir + "/snap.cflm");
        const bool ok = back.grid == g && meta.t == 4.5 &&
                        std::memcmp(back.values.data(), f.values.data(),
                                    8 * f.values.size()) == 0;
        pass = pass && ok;
        d << "snapshot round trip " << (ok ? "bit-exact" : "MISMATCH") << "; ";
    }
    // config validation citing the hypothesis
    {
        bool cited = false;
        try {
            parse_config("params.kappa = 0.05\n");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            cited = msg.find("1/16") != std::string::npos &&
                    msg.find("kappa") != std::string::npos;
        }
        pass = pass && cited;
        d << "kappa <= 1/16 " << (cited ? "rejected citing the hypothesis" : "NOT rejected");
    }
    fs::remove_all(dir);
    report(12, "persistence and validation", pass, d.str());
    CHECK(pass);
}
