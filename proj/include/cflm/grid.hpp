#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cflm {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Periodic box with even sample counts per axis. Wavenumber lattice on
// axis i is { 2*pi*m / l_i : m = -n_i/2 ... n_i/2 - 1 }.
struct Grid {
    std::array<int, 3> n{8, 8, 8};
    std::array<double, 3> l{kTwoPi, kTwoPi, kTwoPi};

    std::size_t size() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
               static_cast<std::size_t>(n[2]);
    }
    double volume() const { return l[0] * l[1] * l[2]; }
    double cell_volume() const { return volume() / static_cast<double>(size()); }
    double spacing(int axis) const { return l[axis] / n[axis]; }

    // storage is row-major with x fastest: idx = (iz*ny + iy)*nx + ix
    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(iz) * n[1] + iy) * n[0] + ix;
    }

    // signed mode number for storage index i on an axis: 0,1,...,n/2-1,-n/2,...,-1
    int mode(int axis, int i) const { return i < n[axis] / 2 ? i : i - n[axis]; }
    // storage index of signed mode m in [-n/2, n/2)
    int mode_index(int axis, int m) const { return m >= 0 ? m : m + n[axis]; }

    double wavenumber(int axis, int i) const { return kTwoPi * mode(axis, i) / l[axis]; }

    // signed coordinate in [-l/2, l/2) of sample i (minimal image about the origin)
    double coord_signed(int axis, int i) const {
        const double x = spacing(axis) * i;
        return x >= 0.5 * l[axis] ? x - l[axis] : x;
    }
    double coord(int axis, int i) const { return spacing(axis) * i; }

    bool operator==(const Grid&) const = default;
};

inline Grid make_grid(std::array<int, 3> n, std::array<double, 3> l) {
    static const char* axis_name[3] = {"n_x", "n_y", "n_z"};
    for (int a = 0; a < 3; ++a) {
        if (n[a] < 8) throw std::invalid_argument(std::string(axis_name[a]) + " must be >= 8");
        if (n[a] % 2 != 0) throw std::invalid_argument(std::string(axis_name[a]) + " must be even");
        if (!(l[a] > 0.0) || !std::isfinite(l[a]))
            throw std::invalid_argument("box lengths must be positive finite");
    }
    return Grid{n, l};
}

}  // namespace cflm
