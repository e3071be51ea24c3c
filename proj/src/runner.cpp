#include "phasewalk/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "phasewalk/lattice.hpp"
#include "phasewalk/oracle.hpp"
#include "phasewalk/states.hpp"

namespace phasewalk {

namespace {

using Severity = ValidationItem::Severity;

std::vector<double> run_kappas(const ExperimentManifest& m) {
    switch (m.kind) {
    case ExperimentKind::Classical: return {0.0};
    case ExperimentKind::SignedRun: return {m.kappa};
    case ExperimentKind::KappaScan: return m.kappas;
    case ExperimentKind::Lqc:
    case ExperimentKind::Quench: return {0.0, m.kappa};
    case ExperimentKind::SchrodingerOracle:
    case ExperimentKind::UqAnalysis: return {};
    }
    return {};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double mass_unit(const ExperimentManifest& m) {
    return m.mu2 < 0.0 ? std::sqrt(-2.0 * m.mu2) : 1.0;
}

bool lattice_model(const ModelSpec& model) { return model.kind == ModelKind::LatticeChain; }

LatticeConfig lattice_config(const ExperimentManifest& m) {
    LatticeConfig c;
    c.n_sites = m.n_sites;
    c.mass_unit = mass_unit(m);
    c.spacing = m.spacing;
    c.lambda = m.lambda;
    c.mu2_pre = m.mu2_pre;
    c.mu2_post = m.mu2;
    c.hbar = m.hbar;
    return c;
}

} // namespace

bool ValidationReport::ok() const { return count(Severity::Error) == 0; }

std::size_t ValidationReport::count(Severity s) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [s](const ValidationItem& i) { return i.severity == s; }));
}

std::string ValidationReport::format() const {
    std::ostringstream os;
    for (const auto& i : items) {
        const char* tag = i.severity == Severity::Error ? "error" : i.severity == Severity::Warning ? "warning" : "info";
        os << tag << ": " << (i.field.empty() ? "" : "[" + i.field + "] ") << i.message << "\n";
    }
    os << count(Severity::Error) << " error(s), " << count(Severity::Warning) << " warning(s)\n";
    return os.str();
}

ValidationReport validate_manifest(const ExperimentManifest& m) {
    ValidationReport report;
    auto add = [&](Severity s, std::string field, std::string msg) {
        report.items.push_back({s, std::move(field), std::move(msg)});
    };

    ModelSpec model;
    try {
        model = m.model_spec();
        model.validate();
    } catch (const std::exception& e) {
        add(Severity::Error, "model", e.what());
        return report;
    }

    double w_max = std::max(model.max_frequency(0.0), model.max_frequency(m.t_final));
    for (double t : {0.0, m.t_final}) {
        const double mu2 = model.mu2_at(t);
        if (mu2 < 0.0 && model.lambda > 0.0) {
            double w2 = -2.0 * mu2 / model.kinetic_mass();
            if (lattice_model(model)) w2 += 4.0 / (model.spacing * model.spacing);
            w_max = std::max(w_max, std::sqrt(w2));
        }
    }
    const double bound = 0.05 / std::max(w_max, 1e-300);
    if (m.dt * w_max > 0.05) {
        add(Severity::Error, "evolution.dt",
            "dt = " + fmt(m.dt) + " breaks the stability bound dt * omega_max <= 0.05 (omega_max = "
                + fmt(w_max) + ", need dt <= " + fmt(bound) + ")");
    } else {
        add(Severity::Info, "evolution.dt", "dt * omega_max = " + fmt(m.dt * w_max));
    }

    const bool lattice = m.model == ModelKind::LatticeChain;
    if (lattice && m.state != "lattice-vacuum")
        add(Severity::Error, "state.kind", "lattice models start from the lattice-vacuum state");
    if (!lattice && m.state == "lattice-vacuum")
        add(Severity::Error, "state.kind", "lattice-vacuum needs a lattice model");
    if (m.kind == ExperimentKind::Quench && !lattice)
        add(Severity::Error, "experiment.kind", "quench experiments need a lattice model");
    if ((m.kind == ExperimentKind::Lqc || m.kind == ExperimentKind::Quench) && !(m.kappa > 0.0))
        add(Severity::Error, "evolution.kappa", "LQC needs kappa > 0");
    if (m.kind == ExperimentKind::KappaScan
        && std::find(m.kappas.begin(), m.kappas.end(), 0.0) == m.kappas.end())
        add(Severity::Error, "evolution.kappas", "a kappa scan needs the kappa = 0 anchor");
    if (m.integrator == "leapfrog") {
        for (double k : run_kappas(m)) {
            if (k > 0.0) add(Severity::Error, "evolution.integrator", "leapfrog is only valid for kappa = 0 runs");
        }
    }
    const bool wants_oracle = m.oracle && (m.kind == ExperimentKind::Lqc || m.kind == ExperimentKind::Classical
                                           || m.kind == ExperimentKind::KappaScan
                                           || m.kind == ExperimentKind::SchrodingerOracle
                                           || m.kind == ExperimentKind::Quench);
    if (wants_oracle) {
        if (lattice && m.n_sites != 2)
            add(Severity::Warning, "oracle.enabled", "grid oracle only exists for the two-site chain; skipped");
        if (m.state == "thermal") add(Severity::Warning, "oracle.enabled", "grid oracle needs a pure state; skipped");
    }

    const auto steps = static_cast<std::size_t>(std::llround(m.t_final / m.dt));
    for (double kappa : run_kappas(m)) {
        const std::string tag = "kappa = " + fmt(kappa) + ": ";
        if (kappa == 0.0) continue;
        try {
            const double c3 = third_moment_target(kappa, model.effective_lambda(), model.hbar, m.dt);
            const NoiseSettings ns = m.noise_settings();
            const NoiseLaw law = ns.pattern.empty() ? solve_noise_law(ns.level, ns.epsilon, c3)
                                                    : solve_noise_law(ns.level, ns.epsilon, c3, ns.pattern);
            add(Severity::Info, "noise", tag + "kick probability per step " + fmt(law.kick_rate()) + ", norm " + fmt(law.norm));
            const double t_break = breakdown_time(model.effective_lambda(), model.hbar, kappa, m.epsilon);
            if (m.t_final > t_break) {
                add(Severity::Warning, "evolution.t_final",
                    tag + "t_final = " + fmt(m.t_final) + " exceeds the breakdown time T = eps^3 / (kappa lambda hbar^2) = "
                        + fmt(t_break));
            }
            const SignPrediction sp = mean_sign_prediction(law, steps);
            const double floor = kSignCollapseThreshold / std::sqrt(static_cast<double>(m.walkers));
            if (sp.mean_sign < floor) {
                add(Severity::Warning, "sampling.walkers",
                    tag + "projected <sigma> = " + fmt(sp.mean_sign) + " at t_final is below the collapse threshold "
                        + fmt(floor) + " for " + std::to_string(m.walkers) + " walkers");
            } else {
                add(Severity::Info, "sampling.walkers", tag + "projected <sigma> at t_final = " + fmt(sp.mean_sign));
            }
        } catch (const std::exception& e) {
            add(Severity::Error, "noise", tag + e.what());
        }
    }
    return report;
}

void write_series_csv(const std::filesystem::path& path, const std::vector<ObservableSeries>& series,
                      std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "time,observable,value,error,mean_sign,kappa,n_walkers,seed\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << csv_number(s.times[i]) << ',' << s.observable << ',' << csv_number(s.values[i]) << ','
                << csv_number(s.errors[i]) << ',' << csv_number(s.mean_sign[i]) << ',' << csv_number(s.kappa)
                << ',' << s.sample_size << ',' << seed << '\n';
        }
    }
}

std::vector<ObservableSeries> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "time,observable,value,error,mean_sign,kappa,n_walkers,seed")
        throw ContractError(path.string() + " does not use the observable CSV schema");
    std::vector<ObservableSeries> out;
    auto number = [](const std::string& s) {
        return s == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 8) throw ContractError("malformed CSV row: " + line);
        const double kappa = number(f[5]);
        auto it = std::find_if(out.begin(), out.end(), [&](const ObservableSeries& s) {
            return s.observable == f[1] && s.kappa == kappa;
        });
        if (it == out.end()) {
            out.emplace_back();
            it = out.end() - 1;
            it->observable = f[1];
            it->kappa = kappa;
            it->sample_size = std::stoull(f[6]);
        }
        it->times.push_back(number(f[0]));
        it->values.push_back(number(f[2]));
        it->errors.push_back(number(f[3]));
        it->mean_sign.push_back(number(f[4]));
        it->collapsed.push_back(std::isnan(number(f[2])));
    }
    return out;
}

std::filesystem::path compare_series(const std::filesystem::path& csv, const std::string& reference,
                                     const std::filesystem::path& out) {
    const auto all = read_series_csv(csv);
    const auto ref = std::find_if(all.begin(), all.end(), [&](const ObservableSeries& s) { return s.observable == reference; });
    if (ref == all.end()) throw ContractError("reference series '" + reference + "' not found in " + csv.string());
    std::ofstream o(out);
    if (!o) throw std::runtime_error("cannot write " + out.string());
    o << "time,observable,value,error,reference,difference,relative_difference,sigma\n";
    for (const auto& s : all) {
        if (&s == &*ref) continue;
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::size_t j = 0;
            while (j < ref->size() && std::abs(ref->times[j] - s.times[i]) > 1e-9 * std::max(1.0, std::abs(s.times[i]))) ++j;
            if (j == ref->size()) continue;
            const double d = s.values[i] - ref->values[j];
            const double err = std::hypot(s.errors[i], ref->errors[j]);
            o << csv_number(s.times[i]) << ',' << s.observable << ',' << csv_number(s.values[i]) << ','
              << csv_number(s.errors[i]) << ',' << csv_number(ref->values[j]) << ',' << csv_number(d) << ','
              << csv_number(d / ref->values[j]) << ','
              << csv_number(err > 0.0 ? d / err : std::numeric_limits<double>::quiet_NaN()) << '\n';
        }
    }
    return out;
}

namespace {

struct Context {
    const ExperimentManifest& m;
    ModelSpec model;
    std::filesystem::path dir;
    RunSummary summary;
    nlohmann::json meta;
};

SamplingSettings sampling_settings(const ExperimentManifest& m) {
    SamplingSettings s;
    s.n_walkers = m.walkers;
    s.seed = m.seed;
    s.n_blocks = m.blocks;
    s.workers = m.workers;
    return s;
}

std::vector<Observable> observables_for(const ExperimentManifest& m) {
    std::vector<Observable> out;
    for (const auto& name : m.observables) {
        if (name == "Q2") out.push_back(position_squared());
        else if (name == "P2") out.push_back(momentum_squared());
        else if (name == "P") out.push_back(total_momentum());
        else if (name == "X") out.push_back(mean_position());
        else if (name == "modes") {
            if (m.model != ModelKind::LatticeChain) throw ContractError("'modes' needs a lattice model");
            for (auto& o : mode_observables(m.n_sites)) out.push_back(std::move(o));
        }
    }
    if (out.empty()) throw ContractError("no observables requested");
    return out;
}

InitialSampler sampler_for(const ExperimentManifest& m, const ModelSpec& model) {
    if (m.state == "lattice-vacuum") {
        auto vacuum = std::make_shared<LatticeVacuum>(lattice_vacuum_spec(model, m.mu2_pre));
        return [vacuum](Stream& s) { return vacuum->sample(s); };
    }
    const GaussianStateSpec spec = m.state == "thermal" ? make_thermal_gaussian(m.omega, m.beta, m.hbar, m.mass)
                                                        : make_pure_gaussian(m.sigma_x, m.hbar);
    const std::size_t dim = model.dimension();
    return [spec, dim](Stream& s) { return sample_walker(spec, dim, s); };
}

nlohmann::json law_json(double kappa, const NoiseLaw& law) {
    return {{"kappa", kappa},
            {"level", law.level},
            {"drift_free", law.drift_free},
            {"epsilon", law.epsilon},
            {"c3", law.c3},
            {"alpha", law.abscissae},
            {"gamma", law.weights},
            {"norm", law.norm},
            {"kick_probability_per_step", law.kick_rate()},
            {"condition_number", law.condition_number}};
}

std::vector<EvolutionConfig> configs_for(const Context& c, const std::vector<double>& kappas) {
    std::vector<EvolutionConfig> runs;
    for (double k : kappas) {
        EvolutionConfig cfg = make_evolution_config(c.model, c.m.dt, c.m.t_final, k, c.m.record_stride,
                                                    c.m.noise_settings());
        if (c.m.integrator == "leapfrog") cfg.integrator = Integrator::Leapfrog;
        runs.push_back(std::move(cfg));
    }
    return runs;
}

std::optional<ObservableSeries> oracle_series(Context& c, const std::vector<double>& times) {
    const auto& m = c.m;
    if (!m.oracle || m.state == "thermal") return std::nullopt;
    GridWavefunction psi0;
    if (m.model == ModelKind::LatticeChain) {
        if (m.n_sites != 2) return std::nullopt;
        psi0 = two_site_vacuum(c.model, m.mu2_pre, m.oracle_points, m.oracle_half_width);
    } else {
        psi0 = gaussian_wavefunction(m.oracle_points, m.oracle_half_width, m.sigma_x, 0.0, 0.0, m.hbar);
    }
    OracleOptions opt;
    opt.keep_snapshots = m.snapshots;
    const SchrodingerResult r = schrodinger_evolve(psi0, c.model, m.oracle_dt, m.t_final, times, opt);
    ObservableSeries s;
    s.observable = "Q2_oracle";
    s.times = r.times;
    s.values = r.q2;
    s.errors.assign(r.q2.size(), 0.0);
    s.mean_sign.assign(r.q2.size(), 1.0);
    s.collapsed.assign(r.q2.size(), false);
    s.kappa = 1.0;
    c.meta["oracle"] = {{"grid_points", m.oracle_points},
                        {"half_width", m.oracle_half_width},
                        {"dt", m.oracle_dt},
                        {"max_norm_drift", r.max_norm_drift},
                        {"max_boundary_density", r.max_boundary_density},
                        {"energy", r.energy}};
    if (m.snapshots) {
        const auto path = c.dir / "snapshots.csv";
        std::ofstream o(path);
        o << "time,index_x,index_y,x,y,density\n";
        for (const auto& snap : r.snapshots) {
            for (std::size_t i = 0; i < snap.nx; ++i) {
                for (std::size_t j = 0; j < snap.ny; ++j) {
                    o << csv_number(snap.t) << ',' << i << ',' << j << ',' << csv_number(snap.coordinate(i)) << ','
                      << csv_number(snap.ny > 1 ? snap.coordinate(j) : 0.0) << ','
                      << csv_number(std::norm(snap.amplitudes[i * snap.ny + j])) << '\n';
                }
            }
        }
        c.summary.files.push_back(path);
    }
    return s;
}

void write_signs(Context& c, const std::vector<SignDiagnostic>& diag, const std::string& file) {
    const auto path = c.dir / file;
    std::ofstream o(path);
    o << "time,step,mean_sign,mean_sign_error,negative_fraction,predicted_mean_sign,predicted_negative_fraction\n";
    for (const auto& d : diag) {
        o << csv_number(d.time) << ',' << d.step << ',' << csv_number(d.mean_sign) << ','
          << csv_number(d.mean_sign_error) << ',' << csv_number(d.negative_fraction) << ','
          << csv_number(d.predicted_mean_sign) << ',' << csv_number(d.predicted_negative_fraction) << '\n';
    }
    c.summary.files.push_back(path);
}

void run_sampling(Context& c) {
    const auto& m = c.m;
    const auto kappas = run_kappas(m);
    const auto runs = configs_for(c, kappas);
    const auto observables = observables_for(m);
    const EnsembleResult ens = evolve_runs(sampler_for(m, c.model), runs, c.model, observables, sampling_settings(m));
    for (std::size_t r = 0; r < runs.size(); ++r) c.meta["noise_laws"].push_back(law_json(kappas[r], runs[r].law));

    std::vector<ObservableSeries> main;
    if (m.kind == ExperimentKind::Classical || m.kind == ExperimentKind::SignedRun) {
        for (std::size_t o = 0; o < observables.size(); ++o) main.push_back(ens.series(0, o));
        if (m.kind == ExperimentKind::SignedRun) {
            const auto diag = ens.signs(0);
            write_signs(c, diag, "signs.csv");
            if (runs[0].law.kick_rate() > 0.0) {
                try {
                    const double a = fit_negative_fraction_rate(diag, c.model.effective_lambda() * m.kappa, m.hbar,
                                                                m.epsilon);
                    c.summary.notes["sign_rate_A"] = csv_number(a);
                } catch (const ContractError& e) {
                    c.summary.notes["sign_rate_A"] = std::string("unavailable: ") + e.what();
                }
            }
        }
    } else if (m.kind == ExperimentKind::Lqc) {
        for (std::size_t o = 0; o < observables.size(); ++o) {
            main.push_back(ens.series(0, o));
            main.push_back(ens.series(1, o));
            main.push_back(lqc_estimate_paired(ens.runs[0].tally, ens.runs[1].tally, o, ens.times,
                                               observables[o].name + "_lqc", m.kappa));
        }
        write_signs(c, ens.signs(1), "signs.csv");
    } else if (m.kind == ExperimentKind::KappaScan) {
        const std::size_t anchor = static_cast<std::size_t>(
            std::find(kappas.begin(), kappas.end(), 0.0) - kappas.begin());
        for (std::size_t r = 0; r < runs.size(); ++r) {
            std::vector<ObservableSeries> per;
            for (std::size_t o = 0; o < observables.size(); ++o) per.push_back(ens.series(r, o));
            const auto path = c.dir / ("observables_kappa_" + std::to_string(r) + ".csv");
            write_series_csv(path, per, m.seed);
            c.summary.files.push_back(path);
        }
        const auto fit_path = c.dir / "fit_summary.csv";
        std::ofstream fit(fit_path);
        fit << "time,observable,degree,anchor,slope,chi2_per_dof,dof,extrapolated,extrapolated_error\n";
        for (std::size_t o = 0; o < observables.size(); ++o) {
            const ObservableSeries base = ens.series(anchor, o);
            std::vector<ObservableSeries> diffs;
            std::vector<ObservableSeries> vals;
            for (std::size_t r = 0; r < runs.size(); ++r) {
                vals.push_back(ens.series(r, o));
                diffs.push_back(r == anchor ? base
                                            : paired_difference(ens.runs[anchor].tally, ens.runs[r].tally, o,
                                                                ens.times, observables[o].name, kappas[r]));
            }
            ObservableSeries extrap = base;
            extrap.observable = observables[o].name + "_extrapolated";
            extrap.kappa = 1.0;
            for (std::size_t i = 0; i < ens.times.size(); ++i) {
                std::vector<double> k, v, e;
                bool ok = !std::isnan(base.values[i]);
                for (std::size_t r = 0; r < runs.size(); ++r) {
                    if (r != anchor && kappas[r] > m.fit_kappa_max) continue;
                    if (std::isnan(vals[r].values[i])) ok = false;
                    k.push_back(kappas[r]);
                    v.push_back(vals[r].values[i]);
                    e.push_back(r == anchor ? base.errors[i] : diffs[r].errors[i]);
                }
                double value = std::numeric_limits<double>::quiet_NaN();
                double error = value;
                if (ok) {
                    try {
                        const KappaFit f = kappa_scan_fit(k, v, e, m.fit_degree);
                        value = f.extrapolated;
                        error = f.extrapolated_error;
                        fit << csv_number(ens.times[i]) << ',' << observables[o].name << ',' << f.degree << ','
                            << csv_number(f.anchor) << ',' << csv_number(f.coefficients.front()) << ','
                            << csv_number(f.chi2_per_dof()) << ',' << f.dof << ',' << csv_number(f.extrapolated)
                            << ',' << csv_number(f.extrapolated_error) << '\n';
                    } catch (const SolverError&) {
                    }
                }
                extrap.values[i] = value;
                extrap.errors[i] = error;
            }
            main.push_back(base);
            main.push_back(extrap);
        }
        c.summary.files.push_back(fit_path);
    }

    if (m.kind != ExperimentKind::SignedRun) {
        if (auto o = oracle_series(c, ens.times)) main.push_back(*o);
    }
    const auto path = c.dir / "observables.csv";
    write_series_csv(path, main, m.seed);
    c.summary.files.push_back(path);
    c.summary.series = std::move(main);
}

void run_quench(Context& c) {
    const auto& m = c.m;
    QuenchSettings s;
    s.lattice = lattice_config(m);
    const double mu = s.lattice.mass_unit;
    s.dt = m.dt;
    s.t_final = m.t_final * mu;
    s.record_stride = m.record_stride;
    s.kappa = m.kappa;
    s.noise = m.noise_settings();
    s.sampling = sampling_settings(m);
    s.mode_resolved = std::find(m.observables.begin(), m.observables.end(), "modes") != m.observables.end();
    s.run_oracle = m.oracle;
    s.oracle_points = m.oracle_points;
    s.oracle_half_width = m.oracle_half_width;
    s.oracle_dt = m.oracle_dt;
    QuenchResult r = quench_experiment(s);
    c.meta["noise_laws"].push_back(law_json(m.kappa, r.law));
    c.meta["time_unit"] = "m t with m = " + csv_number(mu);
    std::vector<ObservableSeries> main{r.classical, r.quantum, r.lqc, r.correction};
    if (r.oracle) main.push_back(*r.oracle);
    for (auto& mode : r.classical_modes) main.push_back(mode);
    if (m.lambda == 0.0) {
        ObservableSeries free = r.classical;
        free.observable = "phi2_free_analytic";
        for (std::size_t i = 0; i < free.size(); ++i) {
            free.values[i] = free_quench_phi2(s.lattice, free.times[i] / mu);
            free.errors[i] = 0.0;
            free.mean_sign[i] = 1.0;
        }
        main.push_back(free);
    }
    for (auto& series : main) series.sample_size = series.observable.find("oracle") != std::string::npos ||
                                                           series.observable.find("analytic") != std::string::npos
                                                       ? 0
                                                       : m.walkers;
    write_signs(c, r.signs, "signs.csv");
    const auto path = c.dir / "observables.csv";
    write_series_csv(path, main, m.seed);
    c.summary.files.push_back(path);
    c.summary.series = std::move(main);
}

void run_oracle_only(Context& c) {
    const auto& m = c.m;
    EvolutionConfig grid;
    grid.dt = m.dt;
    grid.t_final = m.t_final;
    grid.record_stride = m.record_stride;
    auto o = oracle_series(c, grid.record_times());
    if (!o) throw ContractError("no grid oracle exists for this model/state");
    const auto path = c.dir / "observables.csv";
    write_series_csv(path, {*o}, m.seed);
    c.summary.files.push_back(path);
    c.summary.series = {*o};
}

void run_uq(Context& c) {
    const auto& m = c.m;
    if (m.model != ModelKind::Quartic1D) throw ContractError("uq-analysis needs the quartic model");
    const double sp = m.hbar / (2.0 * m.sigma_x);
    const auto scan = c.dir / "uq_scan.csv";
    std::ofstream o(scan);
    o << "x,p,t,Q,zeta,w_uq,w_saddle,w_infinite_mass\n";
    const double Q = uq_phase_coefficient(m.uq_x, m.uq_t, m.lambda, m.hbar);
    for (std::size_t i = 0; i < m.uq_p_points; ++i) {
        const double p = m.uq_p_min + (m.uq_p_max - m.uq_p_min) * static_cast<double>(i)
                                          / static_cast<double>(m.uq_p_points - 1);
        o << csv_number(m.uq_x) << ',' << csv_number(p) << ',' << csv_number(m.uq_t) << ',' << csv_number(Q) << ','
          << csv_number(uq_zeta(p, Q, sp)) << ','
          << csv_number(uq_wigner(m.uq_x, p, m.uq_t, m.sigma_x, sp, m.lambda, m.hbar)) << ','
          << csv_number(uq_saddle(m.uq_x, p, m.sigma_x, sp, Q, m.hbar)) << ','
          << csv_number(uq_infinite_mass(m.uq_x, p, m.uq_t, c.model, m.sigma_x, sp)) << '\n';
    }
    c.summary.files.push_back(scan);

    EvolutionConfig grid;
    grid.dt = m.dt;
    grid.t_final = m.t_final;
    grid.record_stride = m.record_stride;
    ObservableSeries s;
    s.observable = "uq_position_marginal";
    s.kappa = 1.0;
    s.times = grid.record_times();
    for (double t : s.times) {
        s.values.push_back(uq_position_marginal(m.uq_x, t, m.sigma_x, sp, m.lambda, m.hbar));
        s.errors.push_back(0.0);
        s.mean_sign.push_back(1.0);
        s.collapsed.push_back(false);
    }
    const auto path = c.dir / "observables.csv";
    write_series_csv(path, {s}, m.seed);
    c.summary.files.push_back(path);
    c.summary.series = {s};
}

} // namespace

RunSummary run_experiment(const ExperimentManifest& m) {
    const ValidationReport report = validate_manifest(m);
    if (!report.ok()) throw ContractError("manifest failed validation:\n" + report.format());

    Context c{m, m.model_spec(), std::filesystem::path(m.output_dir), {}, {}};
    std::filesystem::create_directories(c.dir);
    c.meta["library"] = {{"name", "phasewalk"}, {"version", library_version()}};
    c.meta["manifest"] = emit_manifest(m);
    c.meta["noise_laws"] = nlohmann::json::array();
    c.meta["csv_columns"] = {"time", "observable", "value", "error", "mean_sign", "kappa", "n_walkers", "seed"};
    c.meta["estimator"] = {{"jackknife_blocks", m.blocks},
                           {"sign_collapse_threshold", kSignCollapseThreshold},
                           {"rng", "xoshiro256++ per walker, seeded by splitmix64(seed, walker, lane)"}};

    switch (m.kind) {
    case ExperimentKind::Classical:
    case ExperimentKind::SignedRun:
    case ExperimentKind::KappaScan: run_sampling(c); break;
    case ExperimentKind::Lqc:
        if (m.model == ModelKind::LatticeChain)
            run_quench(c);
        else
            run_sampling(c);
        break;
    case ExperimentKind::Quench: run_quench(c); break;
    case ExperimentKind::SchrodingerOracle: run_oracle_only(c); break;
    case ExperimentKind::UqAnalysis: run_uq(c); break;
    }

    c.meta["notes"] = c.summary.notes;
    c.meta["validation"] = report.format();
    std::vector<std::string> files;
    for (const auto& f : c.summary.files) files.push_back(f.filename().string());
    c.meta["files"] = files;
    const auto meta_path = c.dir / "metadata.json";
    std::ofstream meta(meta_path);
    meta << c.meta.dump(2) << "\n";
    c.summary.files.push_back(meta_path);
    return c.summary;
}

} // namespace phasewalk
