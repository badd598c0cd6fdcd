#pragma once

#include "cflm/field.hpp"

namespace cflm {

// Tilt at which the co-moving lattice re-aligns with the fixed lattice.
inline double remap_unit(const Grid& g) { return g.l[0] / g.l[1]; }

// Re-index coefficients at a commensurate tilt S = j * l_x/l_y: label shift
// m_y -> m_y - j*m_x (wrapped into the principal window), tilt reduced by
// j * l_x/l_y. The represented function on the sheared torus is unchanged.
// Throws if the tilt is not commensurate. The x-Nyquist plane has no
// conjugate partner under the shifted labels and is zeroed.
SpectralField shear_remap(const SpectralField& s, double tol = 1e-9);

// 2/3-rule projection: zero every mode with |m_i| > n_i/3 on any axis.
SpectralField dealias(const SpectralField& s);
bool mode_kept_by_dealias(const Grid& g, int ix, int iy, int iz);

// Cell-volume-weighted discrete L^p norm of the samples; p = infinity
// accepted as std::numeric_limits<double>::infinity().
double lp_norm(const Field& f, double p);

// L^2 norm computed on the spectral side (Parseval under the stated
// normalization): ||f||_2^2 = (1/V) sum |coeff|^2.
double l2_norm_spectral(const SpectralField& s);

// Spectral derivative d^k1_x d^k2_y d^k3_z using physical wavenumbers
// (eta_phys = eta_label - frame_tilt * xi).
SpectralField spectral_derivative(const SpectralField& s, int k1, int k2, int k3);

}  // namespace cflm
