#include "phasewalk/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "phasewalk/error.hpp"
#include "phasewalk/states.hpp"

namespace phasewalk {

LatticeConfig LatticeConfig::standard(std::size_t n_sites, double mass_unit) {
    LatticeConfig c;
    c.n_sites = n_sites;
    c.mass_unit = mass_unit;
    c.spacing = 0.8 / mass_unit;
    c.lambda = 3.0 * mass_unit * mass_unit;
    c.mu2_pre = 0.5 * mass_unit * mass_unit;
    c.mu2_post = -0.5 * mass_unit * mass_unit;
    return c;
}

ModelSpec LatticeConfig::model() const {
    return ModelSpec::lattice_chain(n_sites, spacing, mu2_post, lambda, hbar);
}

void LatticeConfig::validate() const {
    if (n_sites < 2 || n_sites % 2 != 0) throw ContractError("lattice size must be even and >= 2");
    if (!(mass_unit > 0.0)) throw ContractError("mass unit must be positive");
    if (!(spacing > 0.0)) throw ContractError("lattice spacing must be positive");
    if (!(mu2_pre > 0.0)) throw ContractError("pre-quench mu2 must be positive");
    if (!(lambda >= 0.0)) throw ContractError("lambda must be >= 0");
    model().validate();
}

Dispersion dispersion(std::size_t n_sites, double spacing, double mu2, long j) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_sites));
    const double w2 = 4.0 * s * s / (spacing * spacing) + mu2;
    return {std::sqrt(std::abs(w2)), w2 < 0.0};
}

long mode_index(std::size_t slot, std::size_t n_sites) {
    const auto s = static_cast<long>(slot);
    return slot <= n_sites / 2 ? s : s - static_cast<long>(n_sites);
}

std::vector<std::complex<double>> dft_modes(std::span<const double> phi, double box) {
    const std::size_t n = phi.size();
    if (n == 0) throw ContractError("empty configuration");
    std::vector<std::complex<double>> modes(phi.begin(), phi.end());
    detail::ComplexFft fft(n, 0, FFTW_FORWARD);
    fft.execute(modes);
    const double scale = std::sqrt(box) / static_cast<double>(n);
    for (auto& z : modes) z *= scale;
    return modes;
}

double observable_phi2(std::span<const double> phi, double box) {
    double total = 0.0;
    for (double v : phi) total += v * v;
    return total * box / static_cast<double>(phi.size());
}

std::vector<double> mode_populations(std::span<const double> phi, double box) {
    const auto modes = dft_modes(phi, box);
    std::vector<double> pop(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) pop[j] = std::norm(modes[j]);
    return pop;
}

std::vector<Observable> mode_observables(std::size_t n_sites) {
    std::vector<Observable> out;
    for (std::size_t j = 0; j <= n_sites / 2; ++j) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_sites);
        const double inv_n = 1.0 / static_cast<double>(n_sites);
        out.push_back({"mode_" + std::to_string(j), [k, inv_n](const PhasePoint& pt) {
                           double re = 0.0;
                           double im = 0.0;
                           for (std::size_t i = 0; i < pt.x.size(); ++i) {
                               re += pt.x[i] * std::cos(k * static_cast<double>(i));
                               im -= pt.x[i] * std::sin(k * static_cast<double>(i));
                           }
                           return (re * re + im * im) * inv_n;
                       }});
    }
    return out;
}

double free_quench_mode(const LatticeConfig& config, std::size_t slot, double t) {
    const long j = mode_index(slot, config.n_sites);
    const double w0 = dispersion(config.n_sites, config.spacing, config.mu2_pre, j).omega;
    const double a = config.hbar / (2.0 * w0);
    const double b = config.hbar * w0 / 2.0;
    const Dispersion post = dispersion(config.n_sites, config.spacing, config.mu2_post, j);
    const double w = post.omega;
    if (w == 0.0) return a + b * t * t;
    if (post.unstable) {
        const double c = std::cosh(w * t);
        const double s = std::sinh(w * t);
        return a * c * c + b * s * s / (w * w);
    }
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    return a * c * c + b * s * s / (w * w);
}

double free_quench_phi2(const LatticeConfig& config, double t) {
    double total = 0.0;
    for (std::size_t s = 0; s < config.n_sites; ++s) total += free_quench_mode(config, s, t);
    return total;
}

QuenchResult quench_experiment(const QuenchSettings& settings) {
    const LatticeConfig& lat = settings.lattice;
    lat.validate();
    if (!(settings.kappa > 0.0)) throw ContractError("quench experiment needs kappa > 0");
    const ModelSpec model = lat.model();
    const double m = lat.mass_unit;
    const double t_final = settings.t_final / m;

    std::vector<Observable> observables{position_squared()};
    if (settings.mode_resolved) {
        for (auto& o : mode_observables(lat.n_sites)) observables.push_back(std::move(o));
    }

    NoiseSettings classical_noise = settings.noise;
    const EvolutionConfig classical =
        make_evolution_config(model, settings.dt, t_final, 0.0, settings.record_stride, classical_noise);
    const EvolutionConfig quantum = make_evolution_config(model, settings.dt, t_final, settings.kappa,
                                                          settings.record_stride, settings.noise);
    const std::vector<EvolutionConfig> runs{classical, quantum};

    const LatticeVacuum vacuum = lattice_vacuum_spec(model, lat.mu2_pre);
    SamplingSettings sampling = settings.sampling;
    sampling.paired_initial = true;
    const InitialSampler sampler = [&vacuum](Stream& s) { return vacuum.sample(s); };
    const EnsembleResult ens = evolve_runs(sampler, runs, model, observables, sampling);

    std::vector<double> mt(ens.times);
    for (double& t : mt) t *= m;

    QuenchResult out;
    out.law = quantum.law;
    const auto& ct = ens.runs[0].tally;
    const auto& qt = ens.runs[1].tally;
    out.classical = series_from_tally(ct, 0, mt, "phi2", 0.0);
    out.quantum = series_from_tally(qt, 0, mt, "phi2", settings.kappa);
    out.lqc = lqc_estimate_paired(ct, qt, 0, mt, "phi2_lqc", settings.kappa);
    out.correction = paired_difference(ct, qt, 0, mt, "phi2_correction", settings.kappa);
    for (std::size_t i = 0; i < out.correction.size(); ++i) {
        out.correction.values[i] /= settings.kappa;
        out.correction.errors[i] /= settings.kappa;
    }
    for (std::size_t o = 1; o < observables.size(); ++o)
        out.classical_modes.push_back(series_from_tally(ct, o, mt, observables[o].name, 0.0));
    out.signs = ens.signs(1);
    for (auto& d : out.signs) d.time *= m;

    if (settings.run_oracle && lat.n_sites == 2) {
        GridWavefunction psi0 =
            two_site_vacuum(model, lat.mu2_pre, settings.oracle_points, settings.oracle_half_width);
        const SchrodingerResult ref =
            schrodinger_evolve(psi0, model, settings.oracle_dt, t_final, ens.times);
        ObservableSeries s;
        s.observable = "phi2_oracle";
        s.times = mt;
        s.values = ref.q2;
        s.errors.assign(ref.q2.size(), 0.0);
        s.mean_sign.assign(ref.q2.size(), 1.0);
        s.collapsed.assign(ref.q2.size(), false);
        s.kappa = 1.0;
        s.metadata["max_norm_drift"] = std::to_string(ref.max_norm_drift);
        s.metadata["grid_points"] = std::to_string(settings.oracle_points);
        out.oracle = std::move(s);
    }
    return out;
}

} // namespace phasewalk
