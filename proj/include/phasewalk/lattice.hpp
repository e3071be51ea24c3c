#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "phasewalk/dynamics.hpp"
#include "phasewalk/estimators.hpp"
#include "phasewalk/model.hpp"
#include "phasewalk/oracle.hpp"

namespace phasewalk {

/// Quench setup of the 1+1D chain in units of the post-quench mass m = sqrt(-2 mu2_post).
struct LatticeConfig {
    std::size_t n_sites = 2;
    double mass_unit = 1.0;
    double spacing = 0.8;
    double lambda = 3.0;
    double mu2_pre = 0.5;
    double mu2_post = -0.5;
    double hbar = 1.0;

    /// lambda = 3 m^2, a = 0.8 / m, mu2 = +-m^2 / 2.
    static LatticeConfig standard(std::size_t n_sites, double mass_unit = 1.0);

    double box() const { return static_cast<double>(n_sites) * spacing; }
    double effective_lambda() const { return lambda / spacing; }

    /// Post-quench Hamiltonian (acting for t >= 0).
    ModelSpec model() const;
    void validate() const;
};

struct Dispersion {
    double omega = 0.0;     // |omega|; the growth rate when unstable
    bool unstable = false;  // omega^2 < 0
};

/// omega(k_j)^2 = 4 sin^2(j pi / N) / a^2 + mu2, for j in -N/2 + 1 .. N/2.
Dispersion dispersion(std::size_t n_sites, double spacing, double mu2, long j);

/// Signed mode index of FFT slot s (0 .. N-1): s for s <= N/2, s - N above.
long mode_index(std::size_t slot, std::size_t n_sites);

/// phi_j = (sqrt(L) / N) sum_n exp(-2 pi i n j / N) phi_n in FFT slot order.
std::vector<std::complex<double>> dft_modes(std::span<const double> phi, double box);

/// sum_j |phi_j|^2 = a sum_n phi_n^2.
double observable_phi2(std::span<const double> phi, double box);

/// |phi_j|^2 per FFT slot.
std::vector<double> mode_populations(std::span<const double> phi, double box);

/// Walker observables |q_j|^2 for slots 0 .. N/2 of the unitary DFT of the canonical
/// coordinates (equal to |phi_j|^2 of the field), named "mode_<j>".
std::vector<Observable> mode_observables(std::size_t n_sites);

/// Free (lambda = 0) evolution of <|q_j|^2> after the quench from the vacuum of mu2_pre, for
/// FFT slot j.
double free_quench_mode(const LatticeConfig& config, std::size_t slot, double t);

/// Sum over all slots of free_quench_mode.
double free_quench_phi2(const LatticeConfig& config, double t);

struct QuenchSettings {
    LatticeConfig lattice;
    double dt = 0.01;
    double t_final = 3.0;           // in units of 1 / m
    std::size_t record_stride = 10;
    double kappa = 1.0 / 3.0;
    NoiseSettings noise;
    SamplingSettings sampling;
    bool mode_resolved = false;
    bool run_oracle = true;          // only honoured for N = 2
    std::size_t oracle_points = 192;
    double oracle_half_width = 8.0;
    double oracle_dt = 1e-3;
};

struct QuenchResult {
    ObservableSeries classical;
    ObservableSeries quantum;
    ObservableSeries lqc;
    ObservableSeries correction;           // (O_kappa - O_clas) / kappa, paired errors
    std::optional<ObservableSeries> oracle;
    std::vector<ObservableSeries> classical_modes;
    std::vector<SignDiagnostic> signs;
    NoiseLaw law;
};

/// Classical and kappa runs from common vacuum configurations, the linear quantum correction,
/// and for N = 2 the grid Schrodinger reference. Series times are m t.
QuenchResult quench_experiment(const QuenchSettings& settings);

} // namespace phasewalk
