#include "phasewalk/wavefunction.hpp"

#include <algorithm>
#include <cmath>

#include "phasewalk/error.hpp"

namespace phasewalk {

GridWavefunction GridWavefunction::uniform_grid_1d(std::size_t points, double half_width) {
    if (points < 4 || !(half_width > 0.0)) throw ContractError("grid needs >= 4 points and L > 0");
    GridWavefunction psi;
    psi.nx = points;
    psi.ny = 1;
    psi.x_min = -half_width;
    psi.dx = 2.0 * half_width / static_cast<double>(points);
    psi.amplitudes.assign(points, {});
    return psi;
}

GridWavefunction GridWavefunction::uniform_grid_2d(std::size_t points_per_axis, double half_width) {
    GridWavefunction psi = uniform_grid_1d(points_per_axis, half_width);
    psi.ny = points_per_axis;
    psi.amplitudes.assign(points_per_axis * points_per_axis, {});
    return psi;
}

double GridWavefunction::norm_squared() const {
    double total = 0.0;
    for (const auto& a : amplitudes) total += std::norm(a);
    return total * cell_volume();
}

void GridWavefunction::normalize() {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw DomainError("cannot normalise a zero wavefunction");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : amplitudes) a *= scale;
}

double GridWavefunction::boundary_density(double fraction) const {
    const auto edge = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * nx));
    double worst = 0.0;
    auto on_edge = [&](std::size_t i) { return i < edge || i + edge >= nx; };
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            if (on_edge(i) || (ny > 1 && on_edge(j)))
                worst = std::max(worst, std::norm(amplitudes[i * ny + j]));
        }
    }
    return worst;
}

} // namespace phasewalk
