#include "cflm/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace cflm {

namespace detail {

namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int, int>, fftw_plan> plan_cache;

fftw_plan get_plan(const Grid& g, int sign, std::complex<double>* data) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    const auto key = std::make_tuple(g.n[0], g.n[1], g.n[2], sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    // FFTW_ESTIMATE keeps planning deterministic and does not touch the data.
    // Storage is x-fastest, so FFTW's row-major dims are (nz, ny, nx).
    fftw_plan p = fftw_plan_dft_3d(g.n[2], g.n[1], g.n[0],
                                   reinterpret_cast<fftw_complex*>(data),
                                   reinterpret_cast<fftw_complex*>(data),
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_cache.emplace(key, p);
    return p;
}

}  // namespace

void fft3(std::complex<double>* data, const Grid& g, int sign) {
    fftw_plan p = get_plan(g, sign, data);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

}  // namespace detail

bool is_hermitian(const SpectralField& s, double rel_tol) {
    const Grid& g = s.grid;
    double max_abs = 0.0;
    for (const auto& c : s.coeffs) max_abs = std::max(max_abs, std::abs(c));
    const double tol = rel_tol * std::max(max_abs, 1e-300);
    for (int iz = 0; iz < g.n[2]; ++iz) {
        const int jz = iz == 0 ? 0 : g.n[2] - iz;
        for (int iy = 0; iy < g.n[1]; ++iy) {
            const int jy = iy == 0 ? 0 : g.n[1] - iy;
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const int jx = ix == 0 ? 0 : g.n[0] - ix;
                const auto a = s.at(ix, iy, iz);
                const auto b = std::conj(s.at(jx, jy, jz));
                if (std::abs(a - b) > tol) return false;
            }
        }
    }
    return true;
}

SpectralField forward_transform(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) throw std::invalid_argument("forward_transform: non-finite field");
    SpectralField s(f.grid, f.frame_tilt);
    for (std::size_t i = 0; i < f.values.size(); ++i) s.coeffs[i] = f.values[i];
    detail::fft3(s.coeffs.data(), f.grid, -1);
    const double w = f.grid.cell_volume();
    for (auto& c : s.coeffs) c *= w;
    return s;
}

Field inverse_transform(const SpectralField& s) {
    if (!is_hermitian(s))
        throw std::invalid_argument("inverse_transform: non-Hermitian spectral data");
    std::vector<std::complex<double>> buf = s.coeffs;
    detail::fft3(buf.data(), s.grid, +1);
    Field f(s.grid, s.frame_tilt);
    const double w = 1.0 / s.grid.volume();
    for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i].real() * w;
    return f;
}

Field evaluate_lab_frame(const SpectralField& s) {
    const Grid& g = s.grid;
    const double S = s.frame_tilt;
    if (S == 0.0) return inverse_transform(s);
    // Transform eta -> y first, twist each (xi, y) plane by exp(-i S xi y),
    // then transform the remaining axes.
    std::vector<std::complex<double>> buf = s.coeffs;
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    // 1D backward transforms along y for every (x,z) pencil
    {
        std::vector<std::complex<double>> pencil(ny), out(ny);
        for (int iz = 0; iz < nz; ++iz)
            for (int ix = 0; ix < nx; ++ix) {
                for (int iy = 0; iy < ny; ++iy) pencil[iy] = buf[g.index(ix, iy, iz)];
                // naive DFT would be O(n^2); reuse fftw via a tiny grid
                for (int iy = 0; iy < ny; ++iy) out[iy] = pencil[iy];
                Grid line{{ny, 1, 1}, {g.l[1], 1.0, 1.0}};
                detail::fft3(out.data(), line, +1);
                const double xi = g.wavenumber(0, ix);
                for (int iy = 0; iy < ny; ++iy) {
                    const double y = g.coord(1, iy);
                    const double ph = -S * xi * y;
                    buf[g.index(ix, iy, iz)] = out[iy] * std::complex<double>(std::cos(ph), std::sin(ph));
                }
            }
    }
    // backward transforms along x and z
    {
        std::vector<std::complex<double>> pencil(nx);
        Grid line{{nx, 1, 1}, {g.l[0], 1.0, 1.0}};
        for (int iz = 0; iz < nz; ++iz)
            for (int iy = 0; iy < ny; ++iy) {
                for (int ix = 0; ix < nx; ++ix) pencil[ix] = buf[g.index(ix, iy, iz)];
                detail::fft3(pencil.data(), line, +1);
                for (int ix = 0; ix < nx; ++ix) buf[g.index(ix, iy, iz)] = pencil[ix];
            }
    }
    {
        std::vector<std::complex<double>> pencil(nz);
        Grid line{{nz, 1, 1}, {g.l[2], 1.0, 1.0}};
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                for (int iz = 0; iz < nz; ++iz) pencil[iz] = buf[g.index(ix, iy, iz)];
                detail::fft3(pencil.data(), line, +1);
                for (int iz = 0; iz < nz; ++iz) buf[g.index(ix, iy, iz)] = pencil[iz];
            }
    }
    Field f(g, 0.0);
    const double w = 1.0 / g.volume();
    for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i].real() * w;
    return f;
}

}  // namespace cflm
