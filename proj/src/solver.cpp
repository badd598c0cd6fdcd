#include "cflm/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cflm/fft.hpp"
#include "cflm/rng.hpp"

namespace cflm {

namespace {

double phi1(double z) {
    if (std::abs(z) < 1e-5) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 1e-5) return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0));
    return (std::expm1(z) - z) / (z * z);
}

// exponent accumulated by the co-moving mode over [t, t+dt]: E evaluated at
// the end-of-step physical wavenumber with time argument dt (cocycle form,
// avoids cancellation between large absolute exponents)
double step_exponent(const SolverState& st, double dt, double xi, double eta_label, double zeta) {
    const double eta_end = eta_label - (st.spec.frame_tilt + st.params.a * dt) * xi;
    return symbol_exponent({xi, eta_end, zeta, dt}, st.params);
}

void etdrk2_substep(SolverState& st, double dt) {
    const Grid& g = st.spec.grid;
    const bool nl = st.config.nonlinear_enabled;
    std::vector<double> z(g.size());
    for (int iz = 0; iz < g.n[2]; ++iz) {
        const double zeta = g.wavenumber(2, iz);
        for (int iy = 0; iy < g.n[1]; ++iy) {
            const double eta = g.wavenumber(1, iy);
            for (int ix = 0; ix < g.n[0]; ++ix)
                z[g.index(ix, iy, iz)] = step_exponent(st, dt, g.wavenumber(0, ix), eta, zeta);
        }
    }
    if (!nl) {
        for (std::size_t i = 0; i < z.size(); ++i) st.spec.coeffs[i] *= std::exp(z[i]);
        st.spec.frame_tilt += st.params.a * dt;
        st.t += dt;
        return;
    }
    const SpectralField n1 = nonlinear_term_spectral(st.spec);
    SpectralField pred(g, st.spec.frame_tilt + st.params.a * dt);
    for (std::size_t i = 0; i < z.size(); ++i)
        pred.coeffs[i] = std::exp(z[i]) * st.spec.coeffs[i] + dt * phi1(z[i]) * n1.coeffs[i];
    const SpectralField n2 = nonlinear_term_spectral(pred);
    for (std::size_t i = 0; i < z.size(); ++i)
        pred.coeffs[i] += dt * phi2(z[i]) * (n2.coeffs[i] - n1.coeffs[i]);
    st.spec = std::move(pred);
    st.t += dt;
}

}  // namespace

Field init_field(const Grid& grid, const InitSpec& init, std::uint64_t seed) {
    Field f(grid);
    switch (init.kind) {
        case InitKind::gaussian: {
            const double w = init.width > 0.0 ? init.width : grid.l[0] / 8.0;
            const double h = std::max({grid.spacing(0), grid.spacing(1), grid.spacing(2)});
            if (w < 3.0 * h)
                throw std::invalid_argument("gaussian width under-resolved (< 3 cells)");
            const double amp =
                init.amplitude >= 0.0 ? init.amplitude : w * std::exp(0.5) / std::sqrt(2.0);
            const double cx = grid.l[0] / 2, cy = grid.l[1] / 2, cz = grid.l[2] / 2;
            for (int iz = 0; iz < grid.n[2]; ++iz)
                for (int iy = 0; iy < grid.n[1]; ++iy)
                    for (int ix = 0; ix < grid.n[0]; ++ix) {
                        const double dx = grid.coord(0, ix) - cx;
                        const double dy = grid.coord(1, iy) - cy;
                        const double dz = grid.coord(2, iz) - cz;
                        f.at(ix, iy, iz) =
                            amp * std::exp(-(dx * dx + dy * dy + dz * dz) / (w * w));
                    }
            break;
        }
        case InitKind::single_mode: {
            const double amp = init.amplitude >= 0.0 ? init.amplitude : 1.0;
            const double kx = kTwoPi * init.mode[0] / grid.l[0];
            const double ky = kTwoPi * init.mode[1] / grid.l[1];
            const double kz = kTwoPi * init.mode[2] / grid.l[2];
            for (int iz = 0; iz < grid.n[2]; ++iz)
                for (int iy = 0; iy < grid.n[1]; ++iy)
                    for (int ix = 0; ix < grid.n[0]; ++ix)
                        f.at(ix, iy, iz) = amp * std::cos(kx * grid.coord(0, ix) +
                                                          ky * grid.coord(1, iy) +
                                                          kz * grid.coord(2, iz));
            break;
        }
        case InitKind::random_band: {
            if (init.band_lo < 0 || init.band_hi < init.band_lo)
                throw std::invalid_argument("random_band: need 0 <= band_lo <= band_hi");
            for (int a = 0; a < 3; ++a)
                if (3 * init.band_hi > grid.n[a])
                    throw std::invalid_argument("random_band: band exceeds the dealias band");
            Rng rng(seed);
            SpectralField s(grid);
            const int B = init.band_hi;
            for (int mz = -B; mz <= B; ++mz)
                for (int my = -B; my <= B; ++my)
                    for (int mx = -B; mx <= B; ++mx) {
                        const int sup = std::max({std::abs(mx), std::abs(my), std::abs(mz)});
                        if (sup < init.band_lo || sup > init.band_hi) continue;
                        // visit each conjugate pair once (lexicographic order)
                        if (mx < 0 || (mx == 0 && my < 0) || (mx == 0 && my == 0 && mz < 0))
                            continue;
                        const int ix = grid.mode_index(0, mx), iy = grid.mode_index(1, my),
                                  iz = grid.mode_index(2, mz);
                        if (mx == 0 && my == 0 && mz == 0) {
                            s.at(ix, iy, iz) = rng.gaussian() * grid.volume();
                        } else {
                            const std::complex<double> c(rng.gaussian(), rng.gaussian());
                            s.at(ix, iy, iz) = c * grid.volume();
                            s.at(grid.mode_index(0, -mx), grid.mode_index(1, -my),
                                 grid.mode_index(2, -mz)) = std::conj(c) * grid.volume();
                        }
                    }
            Field raw = inverse_transform(s);
            const double amp = init.amplitude >= 0.0 ? init.amplitude : 1.0;
            const double sup = lp_norm(raw, std::numeric_limits<double>::infinity());
            const double scale = sup > 0.0 ? amp / sup : 0.0;
            for (auto& v : raw.values) v *= scale;
            f = std::move(raw);
            break;
        }
    }
    return f;
}

SolverState make_state(const Grid& grid, const Params& params, const RunConfig& config) {
    SolverState st;
    st.params = params;
    st.config = config;
    st.t = 0.0;
    Field f0 = init_field(grid, config.init, config.seed);
    st.spec = forward_transform(f0);
    if (config.dealias_enabled) st.spec = dealias(st.spec);
    return st;
}

void linear_step(SolverState& state, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("linear_step: dt must be > 0");
    const Grid& g = state.spec.grid;
    for (int iz = 0; iz < g.n[2]; ++iz) {
        const double zeta = g.wavenumber(2, iz);
        for (int iy = 0; iy < g.n[1]; ++iy) {
            const double eta = g.wavenumber(1, iy);
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const double z = step_exponent(state, dt, g.wavenumber(0, ix), eta, zeta);
                state.spec.coeffs[g.index(ix, iy, iz)] *= std::exp(z);
            }
        }
    }
    state.spec.frame_tilt += state.params.a * dt;
    state.t += dt;
}

SpectralField nonlinear_term_spectral(const SpectralField& s) {
    const Field fx = inverse_transform(spectral_derivative(s, 1, 0, 0));
    const Field fy = inverse_transform(spectral_derivative(s, 0, 1, 0));
    const Field fz = inverse_transform(spectral_derivative(s, 0, 0, 1));
    Field w(s.grid, s.frame_tilt);
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        const double gx = fx.values[i], gy = fy.values[i], gz = fz.values[i];
        const double v = -0.5 * (gx * gx + gy * gy + gz * gz);
        if (!std::isfinite(v)) throw std::runtime_error("blow-up sentinel: non-finite gradient");
        w.values[i] = v;
    }
    return dealias(forward_transform(w));
}

Field nonlinear_term(const Field& f) {
    return inverse_transform(nonlinear_term_spectral(forward_transform(f)));
}

void step_etdrk2(SolverState& state, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_etdrk2: dt must be > 0");
    double remaining = dt;
    const double tiny = dt * 1e-13;
    while (remaining > tiny) {
        double sub = remaining;
        if (state.params.a > 0.0) {
            const double s_unit = remap_unit(state.spec.grid);
            const double room = (s_unit - state.spec.frame_tilt) / state.params.a;
            if (room <= tiny) {
                state.spec = shear_remap(state.spec);
                continue;
            }
            sub = std::min(sub, room);
        }
        etdrk2_substep(state, sub);
        remaining -= sub;
    }
    if (state.params.a > 0.0) {
        const double s_unit = remap_unit(state.spec.grid);
        if (state.spec.frame_tilt >= s_unit * (1.0 - 1e-12)) state.spec = shear_remap(state.spec);
    }
}

std::vector<NormRecord> record_norms(const SolverState& state, const std::vector<double>& p_list,
                                     const std::vector<std::array<int, 3>>& deriv_list) {
    std::vector<NormRecord> out;
    for (const auto& d : deriv_list) {
        const Field f = inverse_transform(spectral_derivative(state.spec, d[0], d[1], d[2]));
        for (double p : p_list)
            out.push_back({state.t, p, d[0], d[1], d[2], lp_norm(f, p)});
    }
    return out;
}

double envelope_ratio(int k, double p, double t, double value, const Params& params) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double at = params.a * t;
    return value * std::exp(params.epsilon * t) *
           std::pow(1.0 + t, 0.75 * (1.0 - inv_p) + 0.25 * k) *
           std::pow(1.0 + at * at * at * at, 0.25 * (1.0 - inv_p));
}

std::vector<EnvelopeRow> envelope_rows(const std::vector<NormRecord>& records,
                                       const Params& params, double t_ref) {
    std::vector<EnvelopeRow> rows;
    const double ps[2] = {2.0, std::numeric_limits<double>::infinity()};
    for (int k = 0; k <= 1; ++k)
        for (double p : ps) {
            // k = 1 takes the max over the three first-derivative records per time
            std::vector<std::pair<double, double>> series;  // (t, norm)
            for (const auto& r : records) {
                if (r.p != p) continue;
                const int rk = r.k1 + r.k2 + r.k3;
                if (rk != k) continue;
                if (!series.empty() && series.back().first == r.t)
                    series.back().second = std::max(series.back().second, r.value);
                else
                    series.emplace_back(r.t, r.value);
            }
            EnvelopeRow row;
            row.k = k;
            row.p = p;
            bool have_ref = false;
            for (auto& [t, v] : series) {
                if (t < t_ref - 1e-9) continue;
                const double R = envelope_ratio(k, p, t, v, params);
                if (!have_ref) {
                    row.r_ref = R;
                    have_ref = true;
                }
                row.r_max = std::max(row.r_max, R);
            }
            row.pass = have_ref && row.r_max <= 10.0 * row.r_ref;
            rows.push_back(row);
        }
    return rows;
}

RunArtifact simulate(const Grid& grid, const Params& params, const RunConfig& config,
                     const std::function<void(const SolverState&)>& on_output) {
    if (!(config.t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
    if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    RunArtifact art;
    SolverState st = make_state(grid, params, config);

    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> p_all = {1.0, 2.0, inf};
    const std::vector<double> p_deriv = {2.0, inf};
    auto record = [&](const SolverState& s) {
        auto r0 = record_norms(s, p_all, {{0, 0, 0}});
        auto r1 = record_norms(s, p_deriv, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
        art.records.insert(art.records.end(), r0.begin(), r0.end());
        art.records.insert(art.records.end(), r1.begin(), r1.end());
        if (on_output) on_output(s);
    };
    record(st);

    const double h_min = std::min({grid.spacing(0), grid.spacing(1), grid.spacing(2)});
    double dt_cap = inf;
    auto refresh_cap = [&]() -> bool {
        const Field gx = inverse_transform(spectral_derivative(st.spec, 1, 0, 0));
        const Field gy = inverse_transform(spectral_derivative(st.spec, 0, 1, 0));
        const Field gz = inverse_transform(spectral_derivative(st.spec, 0, 0, 1));
        double gmax = 0.0;
        for (std::size_t i = 0; i < gx.values.size(); ++i) {
            const double m = std::abs(gx.values[i]) + std::abs(gy.values[i]) +
                             std::abs(gz.values[i]);
            gmax = std::max(gmax, m);
        }
        dt_cap = gmax > 0.0 ? 0.5 * h_min / gmax : inf;
        if (dt_cap < 1e-4 * config.dt) {
            art.sentinel = true;
            art.sentinel_message = "advective dt ceiling collapsed below the floor";
            return false;
        }
        return true;
    };

    while (st.t < config.t_end - 1e-12 * config.t_end) {
        if (config.nonlinear_enabled && art.steps % 10 == 0 && !refresh_cap()) break;
        const double dt_step =
            std::min({config.dt, dt_cap, config.t_end - st.t});
        try {
            step_etdrk2(st, dt_step);
        } catch (const std::runtime_error& e) {
            art.sentinel = true;
            art.sentinel_message = e.what();
            break;
        }
        ++art.steps;
        double sumsq = 0.0;
        for (const auto& c : st.spec.coeffs) sumsq += std::norm(c);
        if (!std::isfinite(sumsq) || sumsq > 1e24 * grid.volume()) {
            art.sentinel = true;
            art.sentinel_message = "blow-up sentinel: solution norm exceeded 1e12";
            break;
        }
        const bool done = st.t >= config.t_end - 1e-12 * config.t_end;
        if (art.steps % static_cast<std::size_t>(config.output_every) == 0 || done) record(st);
    }
    art.final_state = std::move(st);
    // the reference time for the envelope ratios; short runs fall back to
    // the half-way point
    const double t_ref = std::min(1.0, 0.5 * config.t_end);
    art.envelope = envelope_rows(art.records, params, t_ref);
    art.envelope_pass = true;
    for (const auto& row : art.envelope) art.envelope_pass = art.envelope_pass && row.pass;
    return art;
}

}  // namespace cflm
