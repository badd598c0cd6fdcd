#pragma once

#include <array>
#include <vector>

#include "cflm/field.hpp"

namespace cflm {

// Physical constants of the shear flame-front equation
//   phi_t + a*y*phi_x + lap(phi) + 4*lap^2(phi) + kappa*phi = -|grad phi|^2 / 2.
// epsilon is the decay-rate margin; the decay theory requires
// kappa > 1/16 + epsilon, which solver runs may deliberately ignore.
struct Params {
    double a = 0.0;
    double kappa = 0.2;
    double epsilon = 0.06875;

    bool satisfies_decay_hypothesis() const { return kappa > 1.0 / 16.0 + epsilon; }
};

// epsilon defaults to (kappa - 1/16)/2 when not supplied.
Params make_params(double a, double kappa);
Params make_params(double a, double kappa, double epsilon);

struct SymbolPoint {
    double xi = 0.0;
    double eta = 0.0;
    double zeta = 0.0;
    double t = 0.0;
};

enum class Side { unprimed, primed };

struct KernelSpec {
    std::array<int, 3> deriv{0, 0, 0};
    Side side = Side::unprimed;

    int order() const { return deriv[0] + deriv[1] + deriv[2]; }
};

KernelSpec make_kernel_spec(std::array<int, 3> deriv, Side side = Side::unprimed);

// E(t; xi, eta, zeta) = int_0^t [v - kappa - 4 v^2] ds with
// v(s) = xi^2 + (eta + a*xi*s)^2 + zeta^2, evaluated from the exact
// polynomial antiderivatives in (a0, b0, c0) = (|k|^2, 2*a*xi*eta, a^2*xi^2).
double symbol_exponent(const SymbolPoint& pt, const Params& p);

// The spectral multiplier G2hat = exp(E); in (0, e^{-(kappa - 1/16) t}].
double multiplier_g2(const SymbolPoint& pt, const Params& p);

// Spectral weights over the grid lattice for a derivative kernel:
// (i xi)^{k1} (i eta)^{k2} (i zeta)^{k3} * G2hat for the unprimed side,
// (-i xi)^{k1} (-i(eta + a t xi))^{k2} (-i zeta)^{k3} * G2hat for the primed
// side (source-point derivatives via the At transfer relation).
SpectralField g2_spectral_weights(double t, const Grid& grid, const Params& p,
                                  const KernelSpec& spec);

// Physical kernel of the G2 factor at time t > 0 (t = 0 is a delta and is
// rejected). Verifies the periodic-truncation sentinel: the outer 10% shell
// must carry less than 1e-8 of the kernel peak, else the box is too small.
Field g2_kernel(double t, const Grid& grid, const Params& p, const KernelSpec& spec);

// Derivatives in the primed (source) variables, built from the transfer
// relations; equals g2_kernel with spec.side = primed.
Field primed_derivative_kernel(double t, const Grid& grid, const Params& p,
                               std::array<int, 3> deriv);

// Discrete L^p norm (cell-volume weighted; p may be infinity) of the
// requested kernel.
double kernel_lp_norm(double t, double p_norm, const Grid& grid, const Params& p,
                      const KernelSpec& spec);

// Max over the two norm readings of the kernel (norm in the field point at a
// fixed source point, and norm in the source point at a fixed field point).
// The readings sample the same function on a rigid vs. sheared lattice and
// agree up to discretization; offsets allow probing the translation structure.
double kernel_tri_norm(double t, double p_norm, const Grid& grid, const Params& p,
                       const KernelSpec& spec, std::array<double, 3> field_offset = {0, 0, 0},
                       std::array<double, 3> source_offset = {0, 0, 0});

// Norm of a single reading with explicit offsets; reading 2 is the
// source-point reading.
double kernel_reading_norm(double t, double p_norm, const Grid& grid, const Params& p,
                           const KernelSpec& spec, int reading,
                           std::array<double, 3> offset = {0, 0, 0});

// ||G2hat(t, .)||_{L^q} over wavenumber space by lattice quadrature with
// refinement doubling until relative tolerance 1e-8; throws on
// non-convergence.
double g2hat_lq_norm(double t, const Params& p, double q);

// Outer-shell wrap-around sentinel used by kernel evaluation; exposed for
// tests. Returns (shell_max, peak).
std::pair<double, double> wraparound_levels(const Field& f);

// A box adequate for kernels up to time t at shear amplitude a: the x side
// grows with the shear tilt so the tilted kernel support stays inside.
Grid kernel_grid(double t_max, const Params& p, int n = 64);

}  // namespace cflm
