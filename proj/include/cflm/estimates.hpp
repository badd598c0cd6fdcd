#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cflm/green.hpp"

namespace cflm {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

struct InequalityCertificate {
    std::string name;
    std::size_t sampled_points = 0;
    double worst_margin = 0.0;  // min over samples of (bound - quantity)
    double tolerance = 1e-10;   // pass iff worst_margin >= -tolerance
    std::map<std::string, double> parameters;

    Verdict verdict() const { return worst_margin >= -tolerance ? Verdict::pass : Verdict::fail; }
};

struct RateReport {
    std::string name;
    std::vector<std::pair<double, double>> series;  // (x, compensated value)
    double predicted_exponent = 0.0;
    double fitted_exponent = 0.0;
    double fit_stderr = 0.0;
    double ratio_max = 0.0;  // extremes of value / (first-point power law)
    double ratio_min = 0.0;
    double tolerance = 0.1;
    Verdict verdict = Verdict::fail;
};

// Largest admissible C0 in the quadratic condition
// (C0 - 4) v^2 + v - (kappa - epsilon) <= 0 for all v >= 0:
// C0 = 4 - 1/(4(kappa - epsilon)). Requires kappa - epsilon > 1/16.
double c0_max(double kappa, double epsilon);

// Certifies the quadratic condition on a dense v-grid plus the analytic
// vertex v = 1/(2(4 - c0)).
InequalityCertificate verify_quadratic_negativity(double c0, double kappa, double epsilon);

// Empirical constant of the shear-averaging inequality
//   int_0^t |eta + a s xi|^alpha ds >= C_alpha (|eta|^alpha + (at)^alpha |xi|^alpha) t,
// via exact reduction to the one-parameter family
//   rho(theta) = int_0^1 |cos th + u sin th|^alpha du / (|cos th|^alpha + |sin th|^alpha)
// minimized over theta. Throws if the estimate comes out non-positive.
double lemma_coercivity_constant(double alpha, std::size_t sample_budget = 4096);

// Exact closed form of rho(theta); exposed for oracle-style checks.
double coercivity_ratio(double theta, double alpha);

// The concrete constant chain: C0 from c0_max, C4 from
// lemma_coercivity_constant(4), Ctilde0 = C0 * (1/2) * min(C4, 1/5).
struct ChainConstants {
    double c0 = 0.0;
    double c4_empirical = 0.0;
    double ctilde0 = 0.0;
};
ChainConstants chain_constants(const Params& p);

// Margin of the spectral bound at one point with the bound constant scaled
// by `factor`:  margin = [-eps t - factor*Ct0*Q] - E  (>= 0 means the bound
// holds), normalized by max(1, |E|).
double symbol_bound_margin(const SymbolPoint& pt, const Params& p, const ChainConstants& chain,
                           double factor = 1.0);

// Randomized suite over t in (0, 10], |k|_inf <= 4, shear amplitude from
// {0, 1, 8}; kappa/epsilon from `p`. Deterministic for a fixed seed; samples
// are partitioned into fixed chunks with per-chunk derived seeds.
InequalityCertificate check_symbol_bound(const Params& p, std::size_t n_samples,
                                         std::uint64_t seed, double factor = 1.0,
                                         int threads = 0);

// Sup over the grid of |D^deriv G2| divided by the pointwise envelope
//   e^{-eps t} t^{-3/4 - k/4} (1+(at)^4)^{-1/4 - k1/4}
//   * (1 + x^2/(t^{1/2}(1+(at)^4)^{1/2}) + (y^2+z^2)/t^{1/2})^{-N}.
// parameters["sup_ratio"] carries the sup; pass means the ratio is finite.
InequalityCertificate pointwise_bound_ratio(double t, const Grid& grid, const Params& p,
                                            int n_order, std::array<int, 3> deriv);

// Max-norm residuals of the three derivative transfer identities, each side
// built from its own spectral weights; pass iff residual <= 1e-10 * peak.
InequalityCertificate transfer_identity_residual(double t, const Grid& grid, const Params& p);

// Least-squares recovery of the a*t coefficient in the mixed transfer
// identity from the kernels themselves.
double transfer_at_coefficient(double t, const Grid& grid, const Params& p);

// OLS fit of log(value) against log(x); throws on fewer than 4 points or
// non-positive values. Returns (slope, stderr).
std::pair<double, double> fit_decay_exponent(const std::vector<std::pair<double, double>>& series);

// Kernel-norm decay fit in time at a = 0. Compensator e^{eps t}
// (e^{kappa t} for p = 1, deriv = 0, where the mass identity dominates).
// The smallest-t point is discarded; the remaining span must cover at least
// one decade. stderr > 0.05 yields an inconclusive verdict. Boxes are sized
// per time point.
RateReport kernel_time_rate_report(double p_norm, std::array<int, 3> deriv, Side side,
                                   const std::vector<double>& t_grid, const Params& p,
                                   int n = 64);

// Kernel-norm decay fit in the shear amplitude at fixed t (large-A branch);
// predicted slope -(1 - 1/p) - k1. Boxes are sized per amplitude.
RateReport kernel_amplitude_rate_report(double p_norm, std::array<int, 3> deriv, Side side,
                                        double t_fixed, const std::vector<double>& a_grid,
                                        const Params& p, int n = 64);

// The combined report: time branch (a = 0) for each p, plus the enhanced
// branch at t = 2 over a in [4, 32].
std::vector<RateReport> lp_rate_report(const std::vector<double>& p_grid,
                                       const std::vector<double>& t_grid, const Params& params,
                                       const KernelSpec& spec, int n = 64);

}  // namespace cflm
