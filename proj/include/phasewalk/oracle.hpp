#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phasewalk/model.hpp"
#include "phasewalk/wavefunction.hpp"

namespace phasewalk {

struct OracleOptions {
    double norm_tolerance = 1e-6;      // abort when |1 - |psi|^2| exceeds this
    double boundary_tolerance = 1e-10; // abort when |psi|^2 in the outer 5% exceeds this
    bool keep_snapshots = false;
};

struct SchrodingerResult {
    std::vector<double> times;
    std::vector<double> q2;      // <Q^2> (1D) or <q_0^2 + q_1^2> (2D)
    std::vector<double> energy;  // <H(t)>
    std::vector<double> norm;
    std::vector<GridWavefunction> snapshots;
    GridWavefunction final_state;
    double max_norm_drift = 0.0;
    double max_boundary_density = 0.0;
};

/// Strang split-operator integration of i hbar d_t psi = H(t) psi on a periodic grid, with the
/// potential evaluated at the midpoint of each step. Each interval between record times is cut
/// into equal steps no longer than dt. 2D grids take the two-site LatticeChain in canonical
/// variables.
SchrodingerResult schrodinger_evolve(const GridWavefunction& psi0, const ModelSpec& model,
                                     double dt, double t_final,
                                     std::span<const double> record_times,
                                     const OracleOptions& options = {});

/// <Q^2> (1D) or <sum_n q_n^2> (2D).
double position_variance(const GridWavefunction& psi);

/// <H(t)> with the kinetic term evaluated spectrally.
double energy_expectation(const GridWavefunction& psi, const ModelSpec& model, double t);

/// Normalized Gaussian psi ~ exp(-(x - x0)^2 / (4 sigma_x^2) + i p0 x / hbar).
GridWavefunction gaussian_wavefunction(std::size_t points, double half_width, double sigma_x,
                                       double x0 = 0.0, double p0 = 0.0, double hbar = 1.0);

/// Ground state of the free two-site chain with mass term mu2_pre, on a G x G grid.
GridWavefunction two_site_vacuum(const ModelSpec& model, double mu2_pre, std::size_t points,
                                 double half_width);

/// sigma_x^2 cos^2(wt) + sigma_p^2 sin^2(wt) / (m w)^2; w = 0 gives free spreading.
double harmonic_q2_analytic(double sigma_x, double sigma_p, double m, double omega, double t);

/// sigma_x^2 + (hbar t / (2 m sigma_x))^2.
double free_width2_analytic(double sigma_x, double hbar, double m, double t);

/// Q = -lambda hbar^2 x t / 24.
double uq_phase_coefficient(double x, double t, double lambda, double hbar);

/// int dz exp(i p z - i Q z^3 - sigma_p^2 z^2 / 2) over the real line, by adaptive quadrature.
double uq_integral(double p, double Q, double sigma_p);

/// Ultraquantum Wigner function
///   hbar / ((2 pi)^{3/2} sigma_x) exp(-x^2 / (2 sigma_x^2)) * uq_integral(p, Q(x, t), sigma_p).
/// Throws QuadratureError when the integral does not converge.
double uq_wigner(double x, double p, double t, double sigma_x, double sigma_p, double lambda,
                 double hbar);

/// zeta = 3 Q p - sigma_p^4 / 4.
double uq_zeta(double p, double Q, double sigma_p);

/// Leading saddle-point approximation of uq_wigner (oscillating for zeta > 0, exponentially
/// suppressed for zeta < 0). Q = 0 returns the exact Gaussian.
double uq_saddle(double x, double p, double sigma_x, double sigma_p, double Q, double hbar);

/// Amplitude of the oscillating branch, i.e. uq_saddle with the cosine replaced by 1.
double uq_saddle_envelope(double x, double p, double sigma_x, double sigma_p, double Q,
                          double hbar);

/// int dp uq_wigner(x, p, t, ...) by adaptive quadrature over the whole p axis.
double uq_position_marginal(double x, double t, double sigma_x, double sigma_p, double lambda,
                            double hbar);

/// uq_wigner(x, p + V'(x) t, t, ...) for a Quartic1D model.
double uq_infinite_mass(double x, double p, double t, const ModelSpec& model, double sigma_x,
                        double sigma_p);

} // namespace phasewalk
