#pragma once

#include <complex>
#include <vector>

#include "cflm/grid.hpp"

namespace cflm {

// Real-space samples. In shear runs the samples live on the co-moving grid:
// a Field with frame_tilt S holds phi at lab points (x + S*y, y, z).
struct Field {
    Grid grid;
    std::vector<double> values;
    double frame_tilt = 0.0;

    Field() = default;
    explicit Field(const Grid& g, double tilt = 0.0)
        : grid(g), values(g.size(), 0.0), frame_tilt(tilt) {}

    double& at(int ix, int iy, int iz) { return values[grid.index(ix, iy, iz)]; }
    double at(int ix, int iy, int iz) const { return values[grid.index(ix, iy, iz)]; }
};

// Fourier coefficients over the full signed wavenumber lattice, in the
// continuum-transform normalization: coeff(k) ~ integral of f * e^{-i k.x}
// over the box, so coeff(0) = mean(f) * volume. Hermitian-symmetric for
// real fields. Lattice labels are co-moving: the physical wavenumber of
// mode (m_x, m_y, m_z) is (xi, eta - frame_tilt*xi, zeta).
struct SpectralField {
    Grid grid;
    std::vector<std::complex<double>> coeffs;
    double frame_tilt = 0.0;

    SpectralField() = default;
    explicit SpectralField(const Grid& g, double tilt = 0.0)
        : grid(g), coeffs(g.size(), {0.0, 0.0}), frame_tilt(tilt) {}

    std::complex<double>& at(int ix, int iy, int iz) { return coeffs[grid.index(ix, iy, iz)]; }
    std::complex<double> at(int ix, int iy, int iz) const {
        return coeffs[grid.index(ix, iy, iz)];
    }

    double eta_physical(int iy, double xi) const {
        return grid.wavenumber(1, iy) - frame_tilt * xi;
    }
};

}  // namespace cflm
