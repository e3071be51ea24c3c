#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "phasewalk/error.hpp"
#include "phasewalk/lattice.hpp"
#include "phasewalk/oracle.hpp"
#include "phasewalk/runner.hpp"
#include "phasewalk/states.hpp"

using namespace phasewalk;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back((ok ? "" : "FAILED ") + what);
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<double> uniform_times(double t_final, int n) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(t_final * i / n);
    return t;
}

InitialSampler gaussian_sampler(double sigma_x, double hbar = 1.0) {
    const auto spec = make_pure_gaussian(sigma_x, hbar);
    return [spec](Stream& s) { return sample_walker(spec, 1, s); };
}

// indices of interior local extrema of a sequence
std::vector<std::size_t> extrema(const std::vector<double>& v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if ((v[i] - v[i - 1]) * (v[i + 1] - v[i]) < 0) out.push_back(i);
    return out;
}

std::size_t index_of(const std::vector<double>& grid, double value) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - value) < std::abs(grid[best] - value)) best = i;
    return best;
}

Outcome noise_law_exactness() {
    Outcome o;
    double worst = 0.0, worst_norm = 0.0;
    for (int level = 1; level <= 3; ++level) {
        for (double eps : {0.3, 0.8, 1.5, 2.5}) {
            for (double c3 : {1e-5, 3e-4, 1e-3}) {
                std::vector<std::vector<double>> patterns{default_abscissa_pattern(level)};
                // minimal patterns: one abscissa per constrained odd moment
                const std::vector<double> minimal{1.0, -std::sqrt(2.0), std::sqrt(3.0)};
                patterns.emplace_back(minimal.begin(), minimal.begin() + level);
                for (const auto& pattern : patterns) {
                    NoiseLaw law;
                    try {
                        law = solve_noise_law(level, eps, c3, pattern);
                    } catch (const ContractError&) {
                        continue;  // kick-rate bound, not a moment failure
                    }
                    const auto r = verify_moments(law, level);
                    for (int p = law.drift_free ? 0 : 1; p <= level; ++p)
                        worst = std::max(worst, r[p] / c3);
                    double gamma = 0.0;
                    for (double g : law.weights) gamma += g;
                    worst_norm = std::max(worst_norm, std::abs(law.norm - (1.0 + 2.0 * gamma / (eps * eps * eps))));
                }
            }
        }
    }
    o.require(worst <= 1e-12, fmt("max constrained-moment residual / c3 = %.2e", worst));
    o.require(worst_norm == 0.0, fmt("max |N - (1 + 2 sum gamma / eps^3)| = %.1e", worst_norm));
    return o;
}

Outcome sign_law() {
    Outcome o;
    const auto model = ModelSpec::quartic(0.5, 0.45);
    NoiseSettings ns;
    ns.level = 1;
    ns.epsilon = 0.3;
    const auto config = make_evolution_config(model, 0.01, 0.2, 1.0, 1, ns);
    SamplingSettings s;
    s.n_walkers = 100000;
    s.seed = 1;
    const std::vector<Observable> obs{position_squared()};
    const std::vector<EvolutionConfig> runs{config};
    const auto r = evolve_runs(gaussian_sampler(0.45), runs, model, obs, s);
    const auto diag = r.signs(0);
    double worst = 0.0;
    for (const auto& d : diag) {
        if (d.step == 0) continue;
        const double predicted = std::pow(config.law.norm, -static_cast<double>(d.step));
        worst = std::max(worst, std::abs(d.mean_sign - predicted) / d.mean_sign_error);
    }
    o.require(worst <= 3.0, fmt("max |<sigma> - N^-n| = %.2f sigma over %zu records (N = %.6f)", worst,
                                diag.size() - 1, config.law.norm));
    const double A = fit_negative_fraction_rate(diag, model.effective_lambda(), model.hbar, ns.epsilon);
    o.require(A >= 0.1 && A <= 10.0, fmt("fitted A = %.3f", A));
    return o;
}

Outcome classical_limit() {
    Outcome o;
    const auto model = ModelSpec::quartic(1.0, 0.0);
    const double sx = 0.45, sp = 1.0 / 0.9;
    NoiseSettings ns;
    ns.level = 1;
    ns.epsilon = 0.3;
    std::vector<EvolutionConfig> runs;
    for (double kappa : {0.0, 0.5, 1.0}) runs.push_back(make_evolution_config(model, 0.002, 10.0, kappa, 100, ns));
    SamplingSettings s;
    s.n_walkers = 100000;
    s.seed = 2;
    const std::vector<Observable> obs{position_squared()};
    const auto r = evolve_runs(gaussian_sampler(sx), runs, model, obs, s);
    double worst = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto q = r.series(k, 0);
        for (std::size_t i = 1; i < q.size(); ++i)
            worst = std::max(worst, std::abs(q.values[i] - harmonic_q2_analytic(sx, sp, 1.0, 1.0, q.times[i])) / q.errors[i]);
    }
    o.require(worst <= 3.0, fmt("harmonic kappa in {0, 1/2, 1}: max deviation %.2f sigma", worst));

    QuenchSettings qs;
    qs.lattice = LatticeConfig::standard(8);
    qs.lattice.lambda = 0.0;
    qs.dt = 0.002;
    qs.t_final = 3.0;
    qs.record_stride = 125;
    qs.mode_resolved = true;
    qs.run_oracle = false;
    qs.noise.epsilon = 1.2;
    qs.sampling.n_walkers = 100000;
    qs.sampling.seed = 3;
    const auto q = quench_experiment(qs);
    double worst_mode = 0.0;
    for (std::size_t j = 0; j < q.classical_modes.size(); ++j) {
        const auto& m = q.classical_modes[j];
        for (std::size_t i = 1; i < m.size(); ++i)
            worst_mode = std::max(worst_mode, std::abs(m.values[i] - free_quench_mode(qs.lattice, j, m.times[i])) / m.errors[i]);
    }
    for (std::size_t i = 1; i < q.quantum.size(); ++i)
        worst_mode = std::max(worst_mode, std::abs(q.quantum.values[i] - free_quench_phi2(qs.lattice, q.quantum.times[i])) / q.quantum.errors[i]);
    o.require(worst_mode <= 3.0, fmt("free lattice N = 8 mode populations: max deviation %.2f sigma", worst_mode));
    return o;
}

Outcome oracle_fidelity() {
    Outcome o;
    {
        const auto free = ModelSpec::quartic(0.0, 0.0);
        const auto times = uniform_times(6.0, 24);
        const auto r = schrodinger_evolve(gaussian_wavefunction(4096, 60.0, 0.45), free, 1e-3, 6.0, times);
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double exact = free_width2_analytic(0.45, 1.0, 1.0, times[i]);
            worst = std::max(worst, std::abs(r.q2[i] - exact) / exact);
        }
        o.require(worst < 1e-6, fmt("free width rel err %.1e", worst));
        o.require(r.max_norm_drift / 6.0 < 1e-8, fmt("free norm drift/time %.1e", r.max_norm_drift / 6.0));
    }
    {
        const auto osc = ModelSpec::quartic(1.0, 0.0);
        const auto times = uniform_times(10.0, 40);
        const auto r = schrodinger_evolve(gaussian_wavefunction(1024, 12.0, 0.45), osc, 1e-3, 10.0, times);
        double worst = 0.0, drift = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double exact = harmonic_q2_analytic(0.45, 1.0 / 0.9, 1.0, 1.0, times[i]);
            worst = std::max(worst, std::abs(r.q2[i] - exact) / exact);
            drift = std::max(drift, std::abs(r.energy[i] / r.energy[0] - 1.0));
        }
        o.require(worst < 1e-6, fmt("harmonic Q2 rel err %.1e", worst));
        o.require(drift < 1e-6, fmt("harmonic energy drift %.1e", drift));
        o.require(r.max_norm_drift / 10.0 < 1e-8, fmt("harmonic norm drift/time %.1e", r.max_norm_drift / 10.0));
    }
    {
        const auto model = ModelSpec::quartic(0.5, 0.45);
        const auto times = uniform_times(20.0, 40);
        const auto r = schrodinger_evolve(gaussian_wavefunction(1024, 12.0, 0.45), model, 1e-3, 20.0, times);
        double drift = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) drift = std::max(drift, std::abs(r.energy[i] / r.energy[0] - 1.0));
        o.require(drift < 1e-6, fmt("anharmonic energy drift %.1e", drift));
        o.require(r.max_norm_drift / 20.0 < 1e-8, fmt("anharmonic norm drift/time %.1e", r.max_norm_drift / 20.0));
    }
    {
        const auto chain = ModelSpec::lattice_chain(2, 0.8, -0.5, 3.0);
        const auto times = uniform_times(3.0, 6);
        const auto r = schrodinger_evolve(two_site_vacuum(chain, 0.5, 192, 8.0), chain, 1e-3, 3.0, times);
        double drift = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) drift = std::max(drift, std::abs(r.energy[i] / r.energy[0] - 1.0));
        o.require(drift < 1e-6, fmt("2D quench energy drift %.1e", drift));
        o.require(r.max_norm_drift / 3.0 < 1e-8, fmt("2D norm drift/time %.1e", r.max_norm_drift / 3.0));
    }
    return o;
}

Outcome anharmonic_benchmark() {
    Outcome o;
    const auto model = ModelSpec::quartic(0.5, 0.45);
    const double T = 2 * std::numbers::pi / std::sqrt(0.5);
    const double dt = T / 800, t_final = 1.25 * T;
    const std::vector<double> kappas{0.0, 0.1, 0.125, 1.0 / 6.0, 0.2, 0.25};
    NoiseSettings ns;
    ns.level = 2;
    ns.epsilon = 1.8;
    std::vector<EvolutionConfig> runs;
    for (double k : kappas) runs.push_back(make_evolution_config(model, dt, t_final, k, 20, ns));
    SamplingSettings s;
    s.n_walkers = 10000000;
    s.seed = 11;
    const std::vector<Observable> obs{position_squared()};
    const auto r = evolve_runs(gaussian_sampler(0.45), runs, model, obs, s);
    const auto oracle = schrodinger_evolve(gaussian_wavefunction(1024, 12.0, 0.45), model, 1e-3, t_final, r.times);

    std::vector<double> half_periods;
    for (double t : r.times) half_periods.push_back(2 * t / T);
    const auto cl = r.series(0, 0);
    auto rel = [&](double v, std::size_t i) { return (v - oracle.q2[i]) / oracle.q2[i]; };

    const std::size_t i08 = index_of(half_periods, 0.8), i21 = index_of(half_periods, 2.1),
                      i25 = index_of(half_periods, 2.5);
    const double e08 = 100 * rel(cl.values[i08], i08), e25 = 100 * rel(cl.values[i25], i25);
    o.require(near(e08, 20.0, 10.0), fmt("classical rel err %.1f%% at 2t/T = 0.8", e08));
    o.require(near(e25, 40.0, 10.0), fmt("classical rel err %.1f%% at 2t/T = 2.5", e25));

    const std::size_t k6 = 3;
    const auto lqc = lqc_estimate_paired(r.runs[0].tally, r.runs[k6].tally, 0, r.times, "Q2", kappas[k6]);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.times.size() && half_periods[i] <= 1.4 + 1e-9; ++i)
        worst = std::max(worst, std::abs(rel(lqc.values[i], i)));
    o.require(worst < 0.05, fmt("LQC(1/6) max rel err %.2f%% for 2t/T <= 1.4", 100 * worst));

    const double full = oracle.q2[i21] - cl.values[i21];
    const double recovery = (lqc.values[i21] - cl.values[i21]) / full;
    const auto shift = paired_difference(r.runs[0].tally, r.runs[k6].tally, 0, r.times, "d", kappas[k6]);
    const double recovery_err = shift.errors[i21] / kappas[k6] / full;
    o.require(near(100 * recovery, 80.0, 10.0), fmt("LQC recovers %.1f%% +- %.1f of the quantum shift at 2t/T = 2.1", 100 * recovery, 100 * recovery_err));

    std::vector<double> values, errors;
    for (std::size_t k = 0; k < kappas.size(); ++k) {
        const auto v = r.series(k, 0);
        values.push_back(v.values[i21]);
        errors.push_back(k == 0 ? v.errors[i21]
                                : paired_difference(r.runs[0].tally, r.runs[k].tally, 0, r.times, "d", 1.0).errors[i21]);
    }
    const auto fit = kappa_scan_fit(kappas, values, errors, 1);
    o.require(fit.chi2_per_dof() < 2.0, fmt("kappa-scan chi2/dof = %.2f", fit.chi2_per_dof()));
    const double ext = rel(fit.extrapolated, i21);
    o.require(std::abs(ext) < 0.05, fmt("kappa = 1 extrapolation %.4f +- %.4f vs oracle %.4f (%.1f%%)", fit.extrapolated,
                                        fit.extrapolated_error, oracle.q2[i21], 100 * ext));
    return o;
}

Outcome tanh_benchmark() {
    Outcome o;
    const auto model = ModelSpec::tanh_quench(2.0, 0.2, 0.4);
    const double t_final = 16.4, kappa = 0.5;
    NoiseSettings ns;
    ns.level = 1;
    ns.epsilon = 1.5;
    const std::vector<EvolutionConfig> runs{make_evolution_config(model, 0.01, t_final, 0.0, 20, ns),
                                            make_evolution_config(model, 0.01, t_final, kappa, 20, ns)};
    SamplingSettings s;
    s.n_walkers = 4000000;
    s.seed = 5;
    const std::vector<Observable> obs{position_squared()};
    const auto r = evolve_runs(gaussian_sampler(0.5), runs, model, obs, s);
    const auto cl = r.series(0, 0);
    const auto lqc = lqc_estimate_paired(r.runs[0].tally, r.runs[1].tally, 0, r.times, "Q2", kappa);
    const auto oracle = schrodinger_evolve(gaussian_wavefunction(2048, 20.0, 0.5), model, 1e-3, t_final, r.times);

    const double x_min2 = 6 * model.mu2 / model.lambda;
    double late = 0.0;
    std::size_t n_late = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i)
        if (r.times[i] >= 8.0) late += oracle.q2[i], ++n_late;
    late /= static_cast<double>(n_late);
    o.require(std::abs(late / x_min2 - 1.0) < 0.1, fmt("oracle <Q2> over t >= 8 averages %.2f (x_min^2 = %.1f)", late, x_min2));

    const auto ext = extrema(oracle.q2);
    std::size_t improved = 0;
    std::string detail;
    for (std::size_t i : ext) {
        const double dc = std::abs(cl.values[i] - oracle.q2[i]), dl = std::abs(lqc.values[i] - oracle.q2[i]);
        improved += dl < dc;
        detail += fmt(" t=%.1f:%.3f/%.3f", r.times[i], dl, dc);
    }
    o.require(!ext.empty() && improved == ext.size(),
              fmt("LQC(1/2) beats classical at %zu of %zu oracle extrema (|dLQC|/|dcl|:%s)", improved, ext.size(), detail.c_str()));
    return o;
}

QuenchResult lattice_quench(std::size_t n_sites, std::size_t walkers, double dt, bool oracle) {
    QuenchSettings qs;
    qs.lattice = LatticeConfig::standard(n_sites);
    qs.dt = dt;
    qs.t_final = 3.0;
    qs.record_stride = static_cast<std::size_t>(std::lround(0.25 / dt));
    qs.kappa = 1.0 / 3.0;
    qs.noise.level = 1;
    qs.noise.epsilon = 1.2;
    qs.run_oracle = oracle;
    qs.sampling.n_walkers = walkers;
    qs.sampling.seed = 7;
    return quench_experiment(qs);
}

Outcome quench_two_sites() {
    Outcome o;
    const auto q = lattice_quench(2, 4000000, 0.002, true);
    const auto& orc = *q.oracle;
    std::size_t strict = 0, tolerated = 0, failed = 0;
    std::string bad;
    for (std::size_t i = 1; i < q.lqc.size(); ++i) {
        const double dc = std::abs(q.classical.values[i] - orc.values[i]);
        const double dl = std::abs(q.lqc.values[i] - orc.values[i]);
        if (dl <= dc) ++strict;
        else if (dc < 3 * q.lqc.errors[i] && dl - dc <= 2 * q.lqc.errors[i]) ++tolerated;
        else {
            ++failed;
            bad += fmt(" mt=%.2f: |dLQC| = %.4f +- %.4f vs |dcl| = %.4f", q.lqc.times[i], dl, q.lqc.errors[i], dc);
        }
    }
    o.require(failed == 0, fmt("|dLQC| <= |dcl| at %zu records, unresolved and within 2 sigma at %zu, violated at %zu%s", strict,
                               tolerated, failed, bad.c_str()));
    const std::size_t last = q.lqc.size() - 1;
    const double dc = std::abs(q.classical.values[last] - orc.values[last]);
    const double dl = std::abs(q.lqc.values[last] - orc.values[last]);
    o.require(dc > 3 * q.classical.errors[last] && dl > 3 * q.lqc.errors[last],
              fmt("mt = 3: |dcl| = %.4f (%.0f sigma), |dLQC| = %.4f (%.1f sigma)", dc, dc / q.classical.errors[last], dl,
                  dl / q.lqc.errors[last]));
    return o;
}

Outcome n_scaling() {
    Outcome o;
    std::vector<double> errs;
    std::string detail, relative;
    for (std::size_t n : {2, 8, 32}) {
        const auto q = lattice_quench(n, 1000000, 0.01, false);
        errs.push_back(q.correction.errors.back());
        detail += fmt(" N=%zu:%.4f", n, errs.back());
        relative += fmt(" N=%zu:%.4f", n, errs.back() / q.classical.values.back());
    }
    const double ratio = *std::max_element(errs.begin(), errs.end()) / *std::min_element(errs.begin(), errs.end());
    o.require(ratio < 2.0, fmt("correction error at mt = 3 (%s ) max/min = %.2f", detail.c_str(), ratio));
    o.notes.push_back(fmt("info: error / classical value (%s )", relative.c_str()));
    return o;
}

Outcome ultraquantum() {
    Outcome o;
    const double sx = 0.45, sp = 1.0 / 0.9, lambda = 0.45, hbar = 1.0;
    double worst_osc = 0.0, worst_dec = 0.0;
    for (double x : {-0.9, 0.9}) {
        for (double q_abs : {1.0, 2.0}) {
            const double t = 24.0 * q_abs / (lambda * hbar * hbar * std::abs(x));
            const double Q = uq_phase_coefficient(x, t, lambda, hbar);
            const double scale = std::pow(3.0 * q_abs, 4.0 / 3.0);
            // z = |zeta| / (3|Q|)^(4/3) is the Airy argument
            for (double z : {8.0, 15.0, 25.0, -4.0, -6.0, -8.0}) {
                const double zeta = z * scale;
                const double p = (zeta + std::pow(sp, 4) / 4) / (3 * Q);
                const double exact = uq_wigner(x, p, t, sx, sp, lambda, hbar);
                const double saddle = uq_saddle(x, p, sx, sp, Q, hbar);
                if (zeta > 0)
                    worst_osc = std::max(worst_osc, std::abs(saddle - exact) / uq_saddle_envelope(x, p, sx, sp, Q, hbar));
                else
                    worst_dec = std::max(worst_dec, std::abs(saddle - exact) / std::abs(exact));
            }
        }
    }
    o.require(worst_osc < 0.05, fmt("oscillating branch |saddle - W|/envelope <= %.2e", worst_osc));
    o.require(worst_dec < 0.05, fmt("decaying branch |saddle - W|/|W| <= %.2e", worst_dec));

    double worst_marginal = 0.0;
    for (double x : {-1.2, 0.3, 0.9})
        for (double t : {1.0, 5.0, 20.0}) {
            const double m0 = uq_position_marginal(x, 0.0, sx, sp, lambda, hbar);
            worst_marginal = std::max(worst_marginal, std::abs(uq_position_marginal(x, t, sx, sp, lambda, hbar) / m0 - 1.0));
        }
    o.require(worst_marginal < 1e-8, fmt("marginal t-dependence %.1e", worst_marginal));

    const auto spec = make_pure_gaussian(sx, hbar);
    double worst_t0 = 0.0;
    for (double x = -1.5; x <= 1.5; x += 0.25)
        for (double p = -3.0; p <= 3.0; p += 0.5)
            worst_t0 = std::max(worst_t0, std::abs(uq_wigner(x, p, 0.0, sx, sp, lambda, hbar) / spec.density(x, p) - 1.0));
    o.require(worst_t0 < 1e-12, fmt("t = 0 vs initial gaussian rel %.1e", worst_t0));
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism_and_estimators() {
    Outcome o;
    {
        const auto model = ModelSpec::quartic(0.5, 0.45);
        NoiseSettings ns;
        ns.level = 2;
        ns.epsilon = 1.0;
        const std::vector<EvolutionConfig> runs{make_evolution_config(model, 0.01, 2.0, 0.0, 10, ns),
                                                make_evolution_config(model, 0.01, 2.0, 1.0, 10, ns)};
        const std::vector<Observable> obs{position_squared(), momentum_squared()};
        SamplingSettings s;
        s.n_walkers = 20000;
        s.seed = 99;
        s.workers = 3;
        const auto a = evolve_runs(gaussian_sampler(0.45), runs, model, obs, s);
        const auto b = evolve_runs(gaussian_sampler(0.45), runs, model, obs, s);
        o.require(a.runs[0].tally == b.runs[0].tally && a.runs[1].tally == b.runs[1].tally, "tallies bit-identical on rerun");

        auto m = parse_manifest(slurp(std::filesystem::path(PHASEWALK_SOURCE_DIR) / "tools/manifests/harmonic_signed.ini"));
        m.walkers = 5000;
        m.lambda = 0.45;
        m.epsilon = 1.0;
        const auto dir = std::filesystem::temp_directory_path() / "phasewalk_acceptance";
        m.output_dir = (dir / "a").string();
        run_experiment(m);
        m.output_dir = (dir / "b").string();
        run_experiment(m);
        const auto fa = slurp(dir / "a/observables.csv"), fb = slurp(dir / "b/observables.csv");
        o.require(!fa.empty() && fa == fb, "observables.csv byte-identical on rerun");
        std::filesystem::remove_all(dir);
    }
    {
        std::vector<double> ms, errs;
        for (std::size_t M : {1000, 10000, 100000, 1000000}) {
            double sum = 0.0;
            const int reps = 20;
            for (int rep = 0; rep < reps; ++rep) {
                Stream st(M, rep);
                std::vector<double> v(M);
                std::vector<int> sg(M);
                for (std::size_t a = 0; a < M; ++a) {
                    v[a] = 1.0 + st.normal();
                    sg[a] = st.uniform() < 0.2 ? -1 : 1;
                }
                sum += jackknife(v, sg, kDefaultJackknifeBlocks).error;
            }
            ms.push_back(std::log(static_cast<double>(M)));
            errs.push_back(std::log(sum / reps));
        }
        const double mx = (ms[0] + ms[1] + ms[2] + ms[3]) / 4, my = (errs[0] + errs[1] + errs[2] + errs[3]) / 4;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < ms.size(); ++i) sxy += (ms[i] - mx) * (errs[i] - my), sxx += (ms[i] - mx) * (ms[i] - mx);
        const double slope = sxy / sxx;
        o.require(near(slope, -0.5, 0.05), fmt("jackknife error slope vs M = %.3f", slope));
    }
    {
        bool ok = true;
        const std::vector<double> v{3, 1, 1};
        const std::vector<int> sg{1, 1, -1};
        ok &= signed_mean(v, sg) == 3.0;
        const std::vector<double> v2{2, 4};
        const std::vector<int> sg2{1, -1};
        try {
            signed_mean(v2, sg2);
            ok = false;
        } catch (const SignCollapse&) {
        }
        const std::vector<double> flat(100, 2.5);
        const std::vector<int> plus(100, 1);
        const auto jk = jackknife(flat, plus, 10);
        ok &= jk.value == 2.5 && jk.error == 0.0;

        ObservableSeries c, q;
        c.times = q.times = {0.0};
        c.values = {1.0};
        q.values = {1.1};
        c.errors = q.errors = {0.0};
        c.mean_sign = q.mean_sign = {1.0};
        c.collapsed = q.collapsed = {false};
        ok &= near(lqc_estimate(c, q, 1.0 / 6.0).values[0], 1.6, 1e-14);
        ok &= lqc_estimate(c, q, 1.0).values[0] == 1.1;

        const std::vector<double> ks{0.0, 0.1, 0.125, 1.0 / 6.0, 0.2, 0.25};
        std::vector<double> lin, e(ks.size(), 0.01);
        for (double k : ks) lin.push_back(1.25 + 0.7 * k);
        const auto fit = kappa_scan_fit(ks, lin, e, 1);
        ok &= near(fit.coefficients[0], 0.7, 1e-12) && fit.chi2 < 1e-20;

        NoiseLaw law;
        law.norm = 1.01;
        const auto p0 = mean_sign_prediction(law, 0);
        ok &= p0.mean_sign == 1.0 && p0.negative_fraction == 0.0;
        const auto p100 = mean_sign_prediction(law, 100);
        ok &= near(p100.mean_sign, std::pow(1.01, -100), 1e-15) && near(p100.negative_fraction, (1 - std::pow(1.01, -100)) / 2, 1e-15);
        ok &= near(breakdown_time(0.45, 1.0, 1.0, 0.3), 0.06, 1e-15);
        o.require(ok, "signed_mean / jackknife / LQC / kappa-fit / sign-prediction examples");
    }
    return o;
}

struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> run;
};

}

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "noise-law exactness", noise_law_exactness},
        {2, "sign law", sign_law},
        {3, "classical-limit oracle equivalence", classical_limit},
        {4, "Schrodinger-oracle fidelity", oracle_fidelity},
        {5, "anharmonic benchmark", anharmonic_benchmark},
        {6, "tanh-quench benchmark", tanh_benchmark},
        {7, "two-site lattice quench", quench_two_sites},
        {8, "N-scaling of the correction error", n_scaling},
        {9, "ultraquantum module", ultraquantum},
        {10, "determinism and estimator properties", determinism_and_estimators},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string detail;
        for (const auto& n : out.notes) detail += (detail.empty() ? "" : "; ") + n;
        std::printf("%s criterion %d (%s) [%.0fs]: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs, detail.c_str());
        std::fflush(stdout);
        failures += !out.pass;
    }
    return failures == 0 ? 0 : 1;
}
