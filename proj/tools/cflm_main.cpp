#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include "cflm/config.hpp"
#include "cflm/estimates.hpp"
#include "cflm/fft.hpp"
#include "cflm/io.hpp"

namespace fs = std::filesystem;
using namespace cflm;

namespace {

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("CFLM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // library default
}

Config load_with_overrides(const std::string& path, const std::string& out_dir,
                           long long seed) {
    Config cfg = load_config(path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed >= 0) cfg.run.seed = static_cast<std::uint64_t>(seed);
    return cfg;
}

int run_simulate(const Config& cfg) {
    fs::create_directories(cfg.output_dir);
    int output_index = 0;
    auto on_output = [&](const SolverState& st) {
        if (cfg.snapshot_every > 0 && output_index % cfg.snapshot_every == 0) {
            Field f = inverse_transform(st.spec);
            write_snapshot(f, {st.params.a, st.params.kappa, st.t},
                           cfg.output_dir + "/snapshot_" + std::to_string(output_index) + ".cflm");
        }
        ++output_index;
    };
    RunArtifact art = simulate(cfg.grid, cfg.params, cfg.run, on_output);
    write_norm_csv(art.records, cfg.output_dir + "/norms.csv");
    {
        Field f = inverse_transform(art.final_state.spec);
        write_snapshot(f, {cfg.params.a, cfg.params.kappa, art.final_state.t},
                       cfg.output_dir + "/snapshot_final.cflm");
    }
    std::ostringstream sum;
    sum << "steps = " << art.steps << "\n";
    sum << "t_final = " << art.final_state.t << "\n";
    sum << "sentinel = " << (art.sentinel ? "triggered" : "clear") << "\n";
    if (art.sentinel) sum << "sentinel_message = " << art.sentinel_message << "\n";
    for (const auto& row : art.envelope)
        sum << "envelope k=" << row.k << " p=" << (std::isinf(row.p) ? "inf" : "2")
            << ": R(ref)=" << row.r_ref << " Rmax=" << row.r_max << " "
            << (row.pass ? "pass" : "fail") << "\n";
    write_text_file(sum.str(), cfg.output_dir + "/summary.txt");
    std::cout << sum.str();
    if (art.sentinel) {
        std::cerr << "run aborted by sentinel; partial outputs written to " << cfg.output_dir
                  << "\n";
        return 2;
    }
    return art.envelope_pass ? 0 : 1;
}

int run_kernel_norms(const Config& cfg, const std::vector<double>& t_list,
                     const std::vector<std::string>& p_list,
                     const std::vector<std::string>& deriv_list, const std::string& out_path) {
    std::ostringstream out;
    out << "t,A,p,k1,k2,k3,side,value\n";
    for (const std::string& ds : deriv_list) {
        std::array<int, 3> d{};
        if (std::sscanf(ds.c_str(), "%d,%d,%d", &d[0], &d[1], &d[2]) != 3)
            throw std::invalid_argument("bad --deriv spec (want k1,k2,k3): " + ds);
        for (const std::string& ps : p_list) {
            const double p_norm =
                ps == "inf" ? std::numeric_limits<double>::infinity() : std::stod(ps);
            for (double t : t_list) {
                for (Side side : {Side::unprimed, Side::primed}) {
                    const Grid g = kernel_grid(t, cfg.params, cfg.grid.n[0]);
                    const double v =
                        kernel_lp_norm(t, p_norm, g, cfg.params, make_kernel_spec(d, side));
                    out << t << ',' << cfg.params.a << ',' << ps << ',' << d[0] << ',' << d[1]
                        << ',' << d[2] << ',' << (side == Side::unprimed ? "unprimed" : "primed")
                        << ',' << std::setprecision(17) << v << '\n';
                }
            }
        }
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        write_text_file(out.str(), out_path);
    return 0;
}

int run_verify_estimates(const Config& cfg, int threads) {
    const Params& p = cfg.params;
    std::vector<std::string> lines;
    bool all_pass = true;
    auto note = [&](const std::string& s, bool pass) {
        lines.push_back(s);
        all_pass = all_pass && pass;
        std::cout << s << "\n";
    };

    const double c0 = c0_max(p.kappa, p.epsilon);
    note("[INFO] c0_max = " + std::to_string(c0), true);
    {
        auto cert = verify_quadratic_negativity(c0, p.kappa, p.epsilon);
        note(format_certificate(cert), cert.verdict() == Verdict::pass);
    }
    {
        const double c4 = lemma_coercivity_constant(4.0);
        const bool ok = c4 > 0.0 && c4 <= 0.2;
        note(std::string(ok ? "[PASS] " : "[FAIL] ") + "coercivity_constant alpha=4: " +
                 std::to_string(c4),
             ok);
    }
    {
        auto cert = check_symbol_bound(p, 100000, cfg.run.seed, 1.0, threads);
        note(format_certificate(cert), cert.verdict() == Verdict::pass);
    }
    for (double t : {1.0, 2.0}) {
        const Grid g = kernel_grid(t, p, 48);
        auto cert = pointwise_bound_ratio(t, g, p, 2, {0, 0, 0});
        note(format_certificate(cert), cert.verdict() == Verdict::pass);
    }
    for (double t : {0.5, 1.0}) {
        const Grid g = kernel_grid(t, p, 48);
        auto cert = transfer_identity_residual(t, g, p);
        note(format_certificate(cert), cert.verdict() == Verdict::pass);
    }
    std::ostringstream report;
    for (const auto& s : lines) report << s << "\n";
    fs::create_directories(cfg.output_dir);
    write_text_file(report.str(), cfg.output_dir + "/verify_estimates.txt");
    std::ostringstream csv;
    csv << "name,verdict\n";
    for (const auto& s : lines) {
        const bool ok = s.rfind("[PASS]", 0) == 0;
        const auto head = s.substr(7, s.find(':') > 7 ? s.find(':') - 7 : std::string::npos);
        csv << head << ',' << (ok ? "pass" : "fail") << '\n';
    }
    write_text_file(csv.str(), cfg.output_dir + "/verify_estimates.csv");
    return all_pass ? 0 : 1;
}

int run_fit_decay(const std::string& csv_path, const Params& params, const std::string& out_path,
                  bool kernel_series) {
    const auto records = read_norm_csv(csv_path);
    // group by (p, k1, k2, k3)
    std::map<std::tuple<double, int, int, int>, std::vector<NormRecord>> groups;
    for (const auto& r : records) groups[{r.p, r.k1, r.k2, r.k3}].push_back(r);
    std::vector<RateReport> reports;
    bool all_conclusive_pass = true;
    for (auto& [key, recs] : groups) {
        const auto [p_norm, k1, k2, k3] = key;
        const int k = k1 + k2 + k3;
        RateReport rep;
        std::ostringstream name;
        name << "p=" << (std::isinf(p_norm) ? std::string("inf") : std::to_string(p_norm))
             << " k=(" << k1 << "," << k2 << "," << k3 << ")";
        rep.name = name.str();
        const double inv_p = std::isinf(p_norm) ? 0.0 : 1.0 / p_norm;
        rep.predicted_exponent = -0.75 * (1.0 - inv_p) - 0.25 * k;
        rep.tolerance = k == 0 ? 0.1 : 0.15;
        for (const auto& r : recs) {
            if (!(r.value > 0.0)) continue;
            const double x = kernel_series ? r.t : 1.0 + r.t;
            const double at = params.a * r.t;
            const double comp = std::exp(params.epsilon * r.t) *
                                std::pow(1.0 + at * at * at * at, 0.25 * (1.0 - inv_p));
            rep.series.emplace_back(x, comp * r.value);
        }
        if (rep.series.size() >= 5) rep.series.erase(rep.series.begin());
        if (rep.series.size() >= 4) {
            auto [slope, se] = fit_decay_exponent(rep.series);
            rep.fitted_exponent = slope;
            rep.fit_stderr = se;
            rep.verdict = se > 0.05 ? Verdict::inconclusive
                          : std::abs(slope - rep.predicted_exponent) <= rep.tolerance
                              ? Verdict::pass
                              : Verdict::fail;
        } else {
            rep.verdict = Verdict::inconclusive;
        }
        std::cout << format_rate_report(rep) << "\n";
        if (rep.verdict == Verdict::fail) all_conclusive_pass = false;
        reports.push_back(std::move(rep));
    }
    if (!out_path.empty()) write_rate_reports_csv(reports, out_path);
    return all_conclusive_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral shear flame-front simulator and estimate verifier"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_path, csv_path;
    long long seed = -1;
    int threads = 0;
    std::vector<double> t_list{0.5, 1.0, 2.0, 4.0};
    std::vector<std::string> p_list{"1", "2", "inf"};
    std::vector<std::string> deriv_list{"0,0,0"};
    bool kernel_series = false;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* opt = cmd->add_option("--config", config_path, "config file path");
        if (need_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_option("--threads", threads, "worker threads (env CFLM_THREADS as fallback)");
    };

    auto* sim = app.add_subcommand("simulate", "run the time integrator");
    add_common(sim, true);

    auto* kn = app.add_subcommand("kernel-norms", "tabulate kernel L^p norms");
    add_common(kn, true);
    kn->add_option("--t", t_list, "kernel times");
    kn->add_option("--p", p_list, "norm exponents (number or inf)");
    kn->add_option("--deriv", deriv_list, "derivative multi-indices k1,k2,k3");
    kn->add_option("--csv", out_path, "output CSV path (stdout if omitted)");

    auto* ve = app.add_subcommand("verify-estimates", "run the inequality certificates");
    add_common(ve, true);

    auto* fd = app.add_subcommand("fit-decay", "fit decay exponents on a norms CSV");
    add_common(fd, true);
    fd->add_option("--csv", csv_path, "input norms CSV")->required();
    fd->add_option("--report", out_path, "output report CSV path");
    fd->add_flag("--kernel-series", kernel_series,
                 "fit against log t instead of log(1+t) (kernel tabulations)");

    CLI11_PARSE(app, argc, argv);

    try {
        const int nthreads = resolve_threads(threads);
        if (sim->parsed()) return run_simulate(load_with_overrides(config_path, out_dir, seed));
        if (kn->parsed())
            return run_kernel_norms(load_with_overrides(config_path, out_dir, seed), t_list,
                                    p_list, deriv_list, out_path);
        if (ve->parsed())
            return run_verify_estimates(load_with_overrides(config_path, out_dir, seed), nthreads);
        if (fd->parsed()) {
            const Config cfg = load_with_overrides(config_path, out_dir, seed);
            return run_fit_decay(csv_path, cfg.params, out_path, kernel_series);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
