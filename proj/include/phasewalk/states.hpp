#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "phasewalk/model.hpp"
#include "phasewalk/rng.hpp"
#include "phasewalk/walker.hpp"
#include "phasewalk/wavefunction.hpp"

namespace phasewalk {

namespace detail {
class RealBackwardFft;
}

enum class Purity { Pure, Thermal };

/// Factorised Gaussian phase-space distribution, identical for every coordinate.
///
/// Only the factories can build one, so a Pure spec always satisfies
/// sigma_x sigma_p = hbar / 2 and a Thermal spec the oscillator relation
/// sigma_x sigma_p = hbar / (2 tanh(hbar omega beta / 2)).
class GaussianStateSpec {
public:
    double sigma_x() const { return sigma_x_; }
    double sigma_p() const { return sigma_p_; }
    double hbar() const { return hbar_; }
    Purity purity() const { return purity_; }
    double beta() const { return beta_; }
    double omega() const { return omega_; }
    double mean_x() const { return mean_x_; }
    double mean_p() const { return mean_p_; }

    GaussianStateSpec centred_at(double mean_x, double mean_p) const;

    /// W(x, p, 0) / hbar, i.e. a normalised probability density on phase space.
    double density(double x, double p) const;

    friend GaussianStateSpec make_pure_gaussian(double sigma_x, double hbar);
    friend GaussianStateSpec make_thermal_gaussian(double omega, double beta, double hbar,
                                                   double m);

private:
    GaussianStateSpec() = default;

    double sigma_x_ = 1.0;
    double sigma_p_ = 1.0;
    double hbar_ = 1.0;
    Purity purity_ = Purity::Pure;
    double beta_ = 0.0;
    double omega_ = 0.0;
    double mean_x_ = 0.0;
    double mean_p_ = 0.0;
};

/// Minimal-uncertainty packet: sigma_p = hbar / (2 sigma_x).
GaussianStateSpec make_pure_gaussian(double sigma_x, double hbar = 1.0);

/// Harmonic-oscillator thermal state with sigma_p = m omega sigma_x.
GaussianStateSpec make_thermal_gaussian(double omega, double beta, double hbar = 1.0,
                                        double m = 1.0);

/// Draws x and p independently per coordinate; the sign starts at +1.
SignedWalker sample_walker(const GaussianStateSpec& spec, std::size_t dimension, Stream& stream);

/// Ground state of the free (lambda = 0) lattice chain with mu2_pre > 0, described mode by mode
/// in canonical variables: <|q_j|^2> = hbar / (2 omega_j), <|p_j|^2> = hbar omega_j / 2 with
/// q_j the unitary DFT of the site variables.
class LatticeVacuum {
public:
    LatticeVacuum(std::size_t n_sites, double spacing, double mu2_pre, double hbar = 1.0);

    std::size_t n_sites() const { return n_sites_; }
    double spacing() const { return spacing_; }
    double mu2_pre() const { return mu2_pre_; }
    double hbar() const { return hbar_; }

    /// Frequency of Fourier index j in 0 .. N/2 (the remaining indices mirror these).
    double omega(std::size_t j) const { return omega_.at(j); }

    /// Per-mode Gaussian spec (Pure, sigma_x^2 = hbar / (2 omega_j)), j in 0 .. N/2.
    GaussianStateSpec mode_spec(std::size_t j) const;

    /// Sum over all N modes of hbar / (2 omega_j): the vacuum value of sum_k |phi_k|^2.
    double expected_phi2() const;

    /// Samples the modes and returns the site configuration (q_n, p_n) with sign +1.
    SignedWalker sample(Stream& stream) const;

    /// Same draw as `sample`, but returns the complex modes j = 0 .. N/2 of q before the
    /// inverse transform (used to check the reality constraint).
    std::vector<std::complex<double>> sample_position_modes(Stream& stream) const;

private:
    std::size_t n_sites_;
    double spacing_;
    double mu2_pre_;
    double hbar_;
    std::vector<double> omega_;
    std::shared_ptr<const detail::RealBackwardFft> inverse_;
};

/// Checks mu2_pre > 0 on a LatticeChain model and builds its free vacuum.
LatticeVacuum lattice_vacuum_spec(const ModelSpec& model, double mu2_pre);

struct WignerGrid {
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> values; // row-major: values[i * p.size() + m] = W(x_i, p_m)
    double max_imaginary = 0.0;
    bool norm_warning = false;

    double dp() const { return p.size() > 1 ? p[1] - p[0] : 0.0; }
    double at(std::size_t ix, std::size_t ip) const { return values[ix * p.size() + ip]; }
};

/// W(x, p) = int dy / (2 pi) psi*(x + y/2) psi(x - y/2) exp(i p y / hbar) on the grid points,
/// via an FFT over the offset at each x with zero padding to twice the grid.
/// With this normalisation int dp W = hbar |psi(x)|^2, so expectation values use dx dp / hbar.
WignerGrid wigner_from_wavefunction(const GridWavefunction& psi, double hbar = 1.0);

} // namespace phasewalk
