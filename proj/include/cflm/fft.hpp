#pragma once

#include "cflm/field.hpp"

namespace cflm {

// Forward lattice transform: coeff(k) = cell_volume * sum_j f(x_j) e^{-i k.x_j}.
// The zero mode equals mean(f) * box volume.
SpectralField forward_transform(const Field& f);

// Inverse: f(x_j) = (1/volume) * sum_k coeff(k) e^{+i k.x_j}. Rejects input
// that is not Hermitian-symmetric (corrupted spectral data).
Field inverse_transform(const SpectralField& s);

// Inverse transform evaluated at lab-frame grid points, honoring the frame
// tilt: f(x_j) = (1/V) sum c(k) exp(i(xi*x + (eta - S*xi)*y + zeta*z)).
// For frame_tilt == 0 this coincides with inverse_transform.
Field evaluate_lab_frame(const SpectralField& s);

bool is_hermitian(const SpectralField& s, double rel_tol = 1e-8);

namespace detail {
// unnormalized c2c FFT, sign = -1 forward / +1 backward; in-place on data
void fft3(std::complex<double>* data, const Grid& g, int sign);
}  // namespace detail

}  // namespace cflm
