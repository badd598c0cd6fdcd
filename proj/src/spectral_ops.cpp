#include "cflm/spectral_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cflm {

SpectralField shear_remap(const SpectralField& s, double tol) {
    const Grid& g = s.grid;
    const double unit = remap_unit(g);
    const double jr = s.frame_tilt / unit;
    const long j = std::lround(jr);
    if (std::abs(jr - static_cast<double>(j)) > tol)
        throw std::invalid_argument("shear_remap: tilt is not a multiple of l_x/l_y");
    if (j == 0) return s;

    SpectralField out(g, s.frame_tilt - static_cast<double>(j) * unit);
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < ny; ++iy) {
            const long my = g.mode(1, iy);
            for (int ix = 0; ix < nx; ++ix) {
                const long mx = g.mode(0, ix);
                if (mx == -nx / 2) continue;  // no conjugate partner after shifting
                long mys = my - j * mx;
                mys %= ny;
                if (mys >= ny / 2) mys -= ny;
                if (mys < -ny / 2) mys += ny;
                out.at(ix, g.mode_index(1, static_cast<int>(mys)), iz) = s.at(ix, iy, iz);
            }
        }
    return out;
}

bool mode_kept_by_dealias(const Grid& g, int ix, int iy, int iz) {
    const int idx[3] = {ix, iy, iz};
    for (int a = 0; a < 3; ++a)
        if (3 * std::abs(g.mode(a, idx[a])) > g.n[a]) return false;
    return true;
}

SpectralField dealias(const SpectralField& s) {
    SpectralField out = s;
    const Grid& g = s.grid;
    for (int iz = 0; iz < g.n[2]; ++iz)
        for (int iy = 0; iy < g.n[1]; ++iy)
            for (int ix = 0; ix < g.n[0]; ++ix)
                if (!mode_kept_by_dealias(g, ix, iy, iz)) out.at(ix, iy, iz) = 0.0;
    return out;
}

double lp_norm(const Field& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    if (p == 1.0) {
        for (double v : f.values) acc += std::abs(v);
    } else if (p == 2.0) {
        for (double v : f.values) acc += v * v;
    } else {
        for (double v : f.values) acc += std::pow(std::abs(v), p);
    }
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

double l2_norm_spectral(const SpectralField& s) {
    double acc = 0.0;
    for (const auto& c : s.coeffs) acc += std::norm(c);
    return std::sqrt(acc / s.grid.volume());
}

SpectralField spectral_derivative(const SpectralField& s, int k1, int k2, int k3) {
    const Grid& g = s.grid;
    SpectralField out(g, s.frame_tilt);
    const std::complex<double> I(0.0, 1.0);
    // Nyquist planes are self-paired and carry no signed frequency; odd-order
    // factors (and tilt-shifted eta weights) are not Hermitian there, so those
    // modes are dropped
    const bool tilted_eta = k2 > 0 && s.frame_tilt != 0.0;
    const bool drop_nyq[3] = {k1 % 2 != 0 || tilted_eta, k2 % 2 != 0 || tilted_eta,
                              k3 % 2 != 0};
    for (int iz = 0; iz < g.n[2]; ++iz) {
        const double zeta = g.wavenumber(2, iz);
        const bool znyq = drop_nyq[2] && g.mode(2, iz) == -g.n[2] / 2;
        for (int iy = 0; iy < g.n[1]; ++iy) {
            const bool ynyq = drop_nyq[1] && g.mode(1, iy) == -g.n[1] / 2;
            for (int ix = 0; ix < g.n[0]; ++ix) {
                if (znyq || ynyq || (drop_nyq[0] && g.mode(0, ix) == -g.n[0] / 2)) continue;
                const double xi = g.wavenumber(0, ix);
                const double eta = s.eta_physical(iy, xi);
                std::complex<double> w(1.0, 0.0);
                for (int i = 0; i < k1; ++i) w *= I * xi;
                for (int i = 0; i < k2; ++i) w *= I * eta;
                for (int i = 0; i < k3; ++i) w *= I * zeta;
                out.at(ix, iy, iz) = w * s.at(ix, iy, iz);
            }
        }
    }
    return out;
}

}  // namespace cflm
