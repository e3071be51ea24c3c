#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace phasewalk {

/// Complex amplitudes on a uniform periodic grid, 1D (ny == 1) or 2D (row-major, x major).
///
/// Coordinates are x_i = x_min + i dx, i = 0 .. nx - 1, on [-L, L) with dx = 2L / nx;
/// the second axis uses the same spacing and origin.
struct GridWavefunction {
    std::vector<std::complex<double>> amplitudes;
    std::size_t nx = 0;
    std::size_t ny = 1;
    double x_min = 0.0;
    double dx = 0.0;
    double t = 0.0;
    double norm_drift = 0.0;

    static GridWavefunction uniform_grid_1d(std::size_t points, double half_width);
    static GridWavefunction uniform_grid_2d(std::size_t points_per_axis, double half_width);

    std::size_t dimension() const { return ny == 1 ? 1 : 2; }
    double coordinate(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
    double cell_volume() const { return ny == 1 ? dx : dx * dx; }

    double norm_squared() const;
    void normalize();

    /// Largest |psi|^2 in the outer `fraction` of the grid along any axis.
    double boundary_density(double fraction = 0.05) const;
};

} // namespace phasewalk
