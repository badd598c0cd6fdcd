#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cflm/green.hpp"
#include "cflm/spectral_ops.hpp"

namespace cflm {

enum class InitKind { gaussian, single_mode, random_band };

struct InitSpec {
    InitKind kind = InitKind::gaussian;
    // amplitude < 0 selects the default normalization: for gaussians the
    // amplitude making sup |grad phi0| = 1.
    double amplitude = -1.0;
    double width = -1.0;  // gaussian; < 0 means l_x / 8
    std::array<int, 3> mode{1, 0, 0};
    int band_lo = 1;
    int band_hi = 2;
};

struct RunConfig {
    double dt = 0.01;
    double t_end = 1.0;
    bool nonlinear_enabled = true;
    bool dealias_enabled = true;
    InitSpec init;
    int output_every = 10;
    std::uint64_t seed = 12345;
};

struct SolverState {
    SpectralField spec;
    double t = 0.0;
    Params params;
    RunConfig config;
};

struct NormRecord {
    double t = 0.0;
    double p = 2.0;  // infinity encoded as +inf
    int k1 = 0, k2 = 0, k3 = 0;
    double value = 0.0;
};

Field init_field(const Grid& grid, const InitSpec& init, std::uint64_t seed);

SolverState make_state(const Grid& grid, const Params& params, const RunConfig& config);

// Exact linear propagation over dt: each coefficient is multiplied by
// exp of the symbol-exponent increment at its co-moving wavenumber. Does
// not apply shear remaps.
void linear_step(SolverState& state, double dt);

// -1/2 |grad phi|^2 with gradients taken spectrally at the physical
// (tilt-corrected) wavenumbers; product in physical space; result dealiased.
SpectralField nonlinear_term_spectral(const SpectralField& s);
Field nonlinear_term(const Field& f);

// One ETDRK2 step with the exact per-mode propagator; splits the step and
// applies shear_remap when the tilt threshold is crossed. Falls back to the
// pure linear update when the nonlinearity is disabled.
void step_etdrk2(SolverState& state, double dt);

std::vector<NormRecord> record_norms(const SolverState& state, const std::vector<double>& p_list,
                                     const std::vector<std::array<int, 3>>& deriv_list);

struct EnvelopeRow {
    int k = 0;
    double p = 2.0;
    double r_ref = 0.0;  // ratio at the reference time
    double r_max = 0.0;  // max ratio over t >= reference
    bool pass = false;   // r_max <= 10 * r_ref
};

struct RunArtifact {
    std::vector<NormRecord> records;
    bool sentinel = false;
    std::string sentinel_message;
    std::size_t steps = 0;
    SolverState final_state;
    std::vector<EnvelopeRow> envelope;
    bool envelope_pass = false;
};

// Normalized decay ratio R_{k,p}(t); boundedness of R over the run certifies
// the decay-envelope constant.
double envelope_ratio(int k, double p, double t, double value, const Params& params);

std::vector<EnvelopeRow> envelope_rows(const std::vector<NormRecord>& records,
                                       const Params& params, double t_ref = 1.0);

// Deterministic run: records norms every output_every steps (plus t = 0 and
// the final time), evaluates envelope ratios, aborts on the blow-up
// sentinel. on_output, when set, fires at every recording point.
RunArtifact simulate(const Grid& grid, const Params& params, const RunConfig& config,
                     const std::function<void(const SolverState&)>& on_output = {});

}  // namespace cflm
