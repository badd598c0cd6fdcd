#include "cflm/green.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "cflm/fft.hpp"
#include "cflm/spectral_ops.hpp"

namespace cflm {

namespace {

void check_params(const Params& p) {
    if (!(p.a >= 0.0) || !std::isfinite(p.a)) throw std::invalid_argument("a must be >= 0");
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa))
        throw std::invalid_argument("kappa must be > 0");
    if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon))
        throw std::invalid_argument("epsilon must be > 0");
}

}  // namespace

Params make_params(double a, double kappa) {
    if (!(kappa > 1.0 / 16.0))
        throw std::invalid_argument("default epsilon requires kappa > 1/16");
    Params p{a, kappa, (kappa - 1.0 / 16.0) / 2.0};
    check_params(p);
    return p;
}

Params make_params(double a, double kappa, double epsilon) {
    Params p{a, kappa, epsilon};
    check_params(p);
    return p;
}

KernelSpec make_kernel_spec(std::array<int, 3> deriv, Side side) {
    for (int d : deriv)
        if (d < 0) throw std::invalid_argument("derivative orders must be >= 0");
    KernelSpec spec{deriv, side};
    if (spec.order() > 6) throw std::invalid_argument("derivative order k1+k2+k3 must be <= 6");
    return spec;
}

double symbol_exponent(const SymbolPoint& pt, const Params& p) {
    if (!(pt.t >= 0.0) || !std::isfinite(pt.t))
        throw std::invalid_argument("symbol_exponent: t must be finite and >= 0");
    const double t = pt.t;
    const double a0 = pt.xi * pt.xi + pt.eta * pt.eta + pt.zeta * pt.zeta;
    const double b0 = 2.0 * p.a * pt.xi * pt.eta;
    const double c0 = p.a * p.a * pt.xi * pt.xi;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double iv = a0 * t + b0 * t2 / 2.0 + c0 * t3 / 3.0;
    const double iv2 = a0 * a0 * t + a0 * b0 * t2 + (b0 * b0 + 2.0 * a0 * c0) * t3 / 3.0 +
                       b0 * c0 * t4 / 2.0 + c0 * c0 * t5 / 5.0;
    return iv - p.kappa * t - 4.0 * iv2;
}

double multiplier_g2(const SymbolPoint& pt, const Params& p) {
    return std::exp(symbol_exponent(pt, p));
}

SpectralField g2_spectral_weights(double t, const Grid& grid, const Params& p,
                                  const KernelSpec& spec) {
    if (!(t > 0.0)) throw std::invalid_argument("g2 kernel: t must be > 0 (t = 0 is a delta)");
    SpectralField s(grid, 0.0);
    const std::complex<double> I(0.0, 1.0);
    for (int iz = 0; iz < grid.n[2]; ++iz) {
        const double zeta = grid.wavenumber(2, iz);
        for (int iy = 0; iy < grid.n[1]; ++iy) {
            const double eta = grid.wavenumber(1, iy);
            for (int ix = 0; ix < grid.n[0]; ++ix) {
                const double xi = grid.wavenumber(0, ix);
                const double m = multiplier_g2({xi, eta, zeta, t}, p);
                std::complex<double> w(m, 0.0);
                if (spec.side == Side::unprimed) {
                    for (int i = 0; i < spec.deriv[0]; ++i) w *= I * xi;
                    for (int i = 0; i < spec.deriv[1]; ++i) w *= I * eta;
                    for (int i = 0; i < spec.deriv[2]; ++i) w *= I * zeta;
                } else {
                    const double eta_shift = eta + p.a * t * xi;
                    for (int i = 0; i < spec.deriv[0]; ++i) w *= -I * xi;
                    for (int i = 0; i < spec.deriv[1]; ++i) w *= -I * eta_shift;
                    for (int i = 0; i < spec.deriv[2]; ++i) w *= -I * zeta;
                }
                s.at(ix, iy, iz) = w;
            }
        }
    }
    return s;
}

std::pair<double, double> wraparound_levels(const Field& f) {
    const Grid& g = f.grid;
    double peak = 0.0, shell = 0.0;
    for (int iz = 0; iz < g.n[2]; ++iz) {
        const bool oz = std::abs(g.coord_signed(2, iz)) > 0.45 * g.l[2];
        for (int iy = 0; iy < g.n[1]; ++iy) {
            const bool oy = oz || std::abs(g.coord_signed(1, iy)) > 0.45 * g.l[1];
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const double v = std::abs(f.at(ix, iy, iz));
                peak = std::max(peak, v);
                if (oy || std::abs(g.coord_signed(0, ix)) > 0.45 * g.l[0])
                    shell = std::max(shell, v);
            }
        }
    }
    return {shell, peak};
}

namespace {

void check_wraparound(const Field& f) {
    const auto [shell, peak] = wraparound_levels(f);
    if (shell > 1e-8 * peak)
        throw std::runtime_error("kernel truncation unreliable: outer-shell mass exceeds 1e-8 of peak (box too small)");
}

}  // namespace

Field g2_kernel(double t, const Grid& grid, const Params& p, const KernelSpec& spec) {
    SpectralField s = g2_spectral_weights(t, grid, p, spec);
    Field f = inverse_transform(s);
    check_wraparound(f);
    return f;
}

Field primed_derivative_kernel(double t, const Grid& grid, const Params& p,
                               std::array<int, 3> deriv) {
    return g2_kernel(t, grid, p, make_kernel_spec(deriv, Side::primed));
}

double kernel_lp_norm(double t, double p_norm, const Grid& grid, const Params& p,
                      const KernelSpec& spec) {
    return lp_norm(g2_kernel(t, grid, p, spec), p_norm);
}

double kernel_reading_norm(double t, double p_norm, const Grid& grid, const Params& p,
                           const KernelSpec& spec, int reading, std::array<double, 3> offset) {
    SpectralField s = g2_spectral_weights(t, grid, p, spec);
    const Grid& g = s.grid;
    if (reading == 1) {
        // field-point reading at a fixed source offset (x0', y0', z0'):
        // modulate by exp(-i x0' xi - i y0'(eta + a t xi) - i z0' zeta)
        for (int iz = 0; iz < g.n[2]; ++iz) {
            const double zeta = g.wavenumber(2, iz);
            for (int iy = 0; iy < g.n[1]; ++iy) {
                const double eta = g.wavenumber(1, iy);
                for (int ix = 0; ix < g.n[0]; ++ix) {
                    const double xi = g.wavenumber(0, ix);
                    const double ph =
                        -offset[0] * xi - offset[1] * (eta + p.a * t * xi) - offset[2] * zeta;
                    s.at(ix, iy, iz) *= std::complex<double>(std::cos(ph), std::sin(ph));
                }
            }
        }
        Field f = inverse_transform(s);
        check_wraparound(f);
        return lp_norm(f, p_norm);
    }
    // source-point reading at a fixed field offset (x0, y0, z0): the y'
    // frequency is -(eta + a t xi), a sheared sampling handled by the
    // lab-frame evaluator with tilt -a t on conjugated coefficients.
    SpectralField sheared(g, -p.a * t);
    for (int iz = 0; iz < g.n[2]; ++iz) {
        const double zeta = g.wavenumber(2, iz);
        for (int iy = 0; iy < g.n[1]; ++iy) {
            const double eta = g.wavenumber(1, iy);
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const double xi = g.wavenumber(0, ix);
                const double ph = offset[0] * xi + offset[1] * eta + offset[2] * zeta;
                sheared.at(ix, iy, iz) =
                    std::conj(s.at(ix, iy, iz) * std::complex<double>(std::cos(ph), std::sin(ph)));
            }
        }
    }
    // no shell check here: the sheared resampling smears the kernel support
    // across the box; truncation quality is certified by the field-point
    // reading of the same weights
    Field f = evaluate_lab_frame(sheared);
    return lp_norm(f, p_norm);
}

double kernel_tri_norm(double t, double p_norm, const Grid& grid, const Params& p,
                       const KernelSpec& spec, std::array<double, 3> field_offset,
                       std::array<double, 3> source_offset) {
    const double n1 = kernel_reading_norm(t, p_norm, grid, p, spec, 1, source_offset);
    const double n2 = kernel_reading_norm(t, p_norm, grid, p, spec, 2, field_offset);
    return std::max(n1, n2);
}

double g2hat_lq_norm(double t, const Params& p, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("g2hat_lq_norm: q must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("g2hat_lq_norm: t must be > 0");
    // axis extents: eta/zeta decay like exp(-4 q k^4 t); the xi width shrinks
    // with the shear tilt
    double K = std::pow(80.0 / (4.0 * q * t), 0.25) + 2.0;
    double Kx = K / (1.0 + p.a * t / 2.0);
    auto integrate = [&](int n) {
        const double hx = 2.0 * Kx / n, hy = 2.0 * K / n, hz = 2.0 * K / n;
        double acc = 0.0;
        for (int iz = 0; iz <= n / 2; ++iz) {  // even in zeta
            const double zeta = -K + hz * iz;
            const double wz = (iz == n / 2) ? 1.0 : 2.0;  // mirror weight
            double plane = 0.0;
            for (int iy = 0; iy <= n; ++iy) {
                const double eta = -K + hy * iy;
                for (int ix = 0; ix <= n; ++ix) {
                    const double xi = -Kx + hx * ix;
                    plane += std::exp(q * symbol_exponent({xi, eta, zeta, t}, p));
                }
            }
            acc += wz * plane;
        }
        return acc * hx * hy * hz;
    };
    double prev = integrate(32);
    for (int n = 64; n <= 2048; n *= 2) {
        const double cur = integrate(n);
        if (std::abs(cur - prev) <= 1e-8 * std::abs(cur)) return std::pow(cur, 1.0 / q);
        prev = cur;
    }
    throw std::runtime_error("g2hat_lq_norm: quadrature failed to converge");
}

namespace {

// kappa-free exponent on the zeta = 0 slice, for support scanning
double exponent_free(double t, double xi, double eta, double a) {
    const double a0 = xi * xi + eta * eta;
    const double b0 = 2.0 * a * xi * eta;
    const double c0 = a * a * xi * xi;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double iv = a0 * t + b0 * t2 / 2.0 + c0 * t3 / 3.0;
    const double iv2 = a0 * a0 * t + a0 * b0 * t2 + (b0 * b0 + 2.0 * a0 * c0) * t3 / 3.0 +
                       b0 * c0 * t4 / 2.0 + c0 * c0 * t5 / 5.0;
    return iv - 4.0 * iv2;
}

}  // namespace

Grid kernel_grid(double t_max, const Params& p, int n) {
    if (!(t_max > 0.0)) throw std::invalid_argument("kernel_grid: t must be > 0");
    // box sides sized so the outer 10% shell stays below 1e-8 of the kernel
    // peak; the x side stretches with the total tilt
    const double lyz = std::max(64.0, 85.0 * std::pow(t_max, 0.26));
    const double lx = lyz * (1.0 + p.a * t_max);
    // spectral support box of the multiplier from a scan of the zeta = 0
    // slice (the zeta extent is dominated by the eta extent at xi = 0)
    const double thresh = -40.0 - t_max / 16.0;
    double kxi = 0.05, keta = 0.05;
    const int nxi = 401, neta = 801;
    for (int i = 0; i < nxi; ++i) {
        const double xi =
            i == 0 ? 0.0
                   : std::pow(10.0, -4.0 + (std::log10(6.0) + 4.0) * (i - 1) /
                                               static_cast<double>(nxi - 2));
        for (int j = 0; j < neta; ++j) {
            const double eta = -6.0 + 12.0 * j / static_cast<double>(neta - 1);
            if (exponent_free(t_max, xi, eta, p.a) > thresh) {
                kxi = std::max(kxi, xi);
                keta = std::max(keta, std::abs(eta));
            }
        }
    }
    auto even_at_least = [](double points, int base) {
        int v = std::max(static_cast<int>(std::ceil(points)) + 2, base);
        return v + v % 2;
    };
    const int nyz = even_at_least(keta * lyz / kPi, n);
    const int nx = even_at_least(kxi * lx / kPi, n);
    return make_grid({nx, nyz, nyz}, {lx, lyz, lyz});
}

}  // namespace cflm
