#include "phasewalk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "phasewalk/error.hpp"

namespace phasewalk {

std::size_t EvolutionConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

std::vector<std::size_t> EvolutionConfig::record_steps() const {
    std::vector<std::size_t> steps;
    const std::size_t n = n_steps();
    for (std::size_t s = 0; s <= n; s += record_stride) steps.push_back(s);
    return steps;
}

std::vector<double> EvolutionConfig::record_times() const {
    std::vector<double> times;
    for (std::size_t s : record_steps()) times.push_back(static_cast<double>(s) * dt);
    return times;
}

void EvolutionConfig::validate(const ModelSpec& model) const {
    model.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractError("time step must be positive");
    if (!(t_final >= 0.0)) throw ContractError("final time must be >= 0");
    if (record_stride == 0) throw ContractError("record stride must be >= 1");
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw ContractError("kappa must lie in [0, 1]");
    if (kappa == 0.0 && !law.degenerate())
        throw ContractError("kappa = 0 requires the degenerate (classical) kick law");
    if (!law.degenerate() && integrator != Integrator::SymplecticEuler)
        throw ContractError("the kick law is matched to the symplectic Euler splitting only");
    // largest linearised frequency over [0, t_final]
    const double w = std::max(model.max_frequency(0.0), model.max_frequency(t_final));
    if (dt * w > stability_factor) {
        throw ContractError("time step " + std::to_string(dt) + " exceeds the stability bound "
                            + std::to_string(stability_factor) + " / omega_max = "
                            + std::to_string(stability_factor / w));
    }
}

EvolutionConfig make_evolution_config(const ModelSpec& model, double dt, double t_final,
                                      double kappa, std::size_t record_stride,
                                      const NoiseSettings& noise) {
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.t_final = t_final;
    cfg.kappa = kappa;
    cfg.record_stride = record_stride;
    const double c3 = third_moment_target(kappa, model.effective_lambda(), model.hbar, dt);
    cfg.law = noise.pattern.empty()
                  ? solve_noise_law(noise.level, noise.epsilon, c3)
                  : solve_noise_law(noise.level, noise.epsilon, c3, noise.pattern);
    cfg.xi = noise.xi == XiKind::TwoAtom ? XiLaw::two_atom() : XiLaw::three_atom();
    return cfg;
}

Observable position_squared() {
    return {"Q2", [](const PhasePoint& pt) {
                double s = 0.0;
                for (double v : pt.x) s += v * v;
                return s;
            }};
}

Observable momentum_squared() {
    return {"P2", [](const PhasePoint& pt) {
                double s = 0.0;
                for (double v : pt.p) s += v * v;
                return s;
            }};
}

Observable total_momentum() {
    return {"P", [](const PhasePoint& pt) {
                double s = 0.0;
                for (double v : pt.p) s += v;
                return s;
            }};
}

Observable mean_position() {
    return {"X", [](const PhasePoint& pt) {
                double s = 0.0;
                for (double v : pt.x) s += v;
                return s / static_cast<double>(pt.x.size());
            }};
}

namespace {

void check_finite(const SignedWalker& walker) {
    for (std::size_t i = 0; i < walker.point.x.size(); ++i) {
        if (!std::isfinite(walker.point.x[i]) || !std::isfinite(walker.point.p[i])) {
            throw IntegrationBlowup("non-finite phase-space state for walker "
                                        + std::to_string(walker.id) + " at t = "
                                        + std::to_string(walker.point.t),
                                    walker.id, walker.point.t);
        }
    }
}

} // namespace

void drift_step(SignedWalker& walker, double dt, const ModelSpec& model, double t,
                StepWorkspace& work, Integrator integrator) {
    auto& x = walker.point.x;
    auto& p = walker.point.p;
    const std::size_t d = x.size();
    const double inv_m = 1.0 / model.kinetic_mass();
    work.force.resize(d);
    if (integrator == Integrator::SymplecticEuler) {
        for (std::size_t i = 0; i < d; ++i) x[i] += dt * p[i] * inv_m;
        force(model, x, t + 0.5 * dt, work.force);
        for (std::size_t i = 0; i < d; ++i) p[i] += dt * work.force[i];
    } else {
        force(model, x, t, work.force);
        for (std::size_t i = 0; i < d; ++i) {
            p[i] += 0.5 * dt * work.force[i];
            x[i] += dt * p[i] * inv_m;
        }
        force(model, x, t + dt, work.force);
        for (std::size_t i = 0; i < d; ++i) p[i] += 0.5 * dt * work.force[i];
    }
    walker.point.t = t + dt;
    check_finite(walker);
}

KickOutcome kick_step(SignedWalker& walker, const NoiseLaw& law, const ModelSpec& model,
                      const XiLaw& xi, Stream& stream) {
    if (law.degenerate()) return {};
    const SignedTransition tr = sample_transition(law, stream);
    if (tr.outcome == SignedTransition::Outcome::Stay) return {};
    auto& x = walker.point.x;
    auto& p = walker.point.p;
    if (model.dimension() == 1) {
        p[0] += tr.eta * std::cbrt(x[0]);
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) p[i] += tr.eta * std::cbrt(x[i]) * xi.sample(stream);
    }
    if (tr.sign_flip) walker.sign = -walker.sign;
    return {true, tr.sign_flip};
}

namespace {

struct RunPlan {
    std::vector<std::size_t> steps;
    std::size_t n_steps = 0;
};

// Evolves one walker under one configuration, calling `record(r, walker, flips, kicks)` at each
// record step.
template <typename Record>
void evolve_walker(SignedWalker& walker, const EvolutionConfig& cfg, const ModelSpec& model,
                   const RunPlan& plan, Stream& kicks, StepWorkspace& work, Record&& record) {
    std::size_t flips = 0;
    std::size_t n_kicks = 0;
    std::size_t next = 0;
    for (std::size_t step = 0;; ++step) {
        if (next < plan.steps.size() && plan.steps[next] == step) {
            record(next, walker, flips, n_kicks);
            ++next;
        }
        if (step == plan.n_steps) break;
        const double t = static_cast<double>(step) * cfg.dt;
        drift_step(walker, cfg.dt, model, t, work, cfg.integrator);
        const KickOutcome k = kick_step(walker, cfg.law, model, cfg.xi, kicks);
        n_kicks += k.kicked;
        flips += k.flipped;
    }
}

struct Shared {
    std::span<const EvolutionConfig> runs;
    const ModelSpec* model;
    std::span<const Observable> observables;
    const SamplingSettings* sampling;
    RunPlan plan;
    EnsembleResult* result;
};

template <typename Initial>
void process_blocks(const Shared& sh, std::size_t worker, std::size_t n_workers, Initial&& initial) {
    const std::size_t m = sh.sampling->n_walkers;
    const std::size_t nb = sh.result->runs.front().tally.n_blocks();
    const std::size_t n_obs = sh.observables.size();
    const std::size_t size = std::max<std::size_t>(1, m / nb);
    StepWorkspace work;
    std::vector<double> values(n_obs);

    for (std::size_t b = worker; b < nb; b += n_workers) {
        const std::size_t begin = b * size;
        const std::size_t end = b + 1 == nb ? m : begin + size;
        for (std::size_t a = begin; a < end; ++a) {
            for (std::size_t r = 0; r < sh.runs.size(); ++r) {
                SignedWalker walker = initial(a, r);
                walker.id = a;
                Stream kicks(sh.sampling->seed, a, r + 1);
                RunResult& out = sh.result->runs[r];
                auto record = [&](std::size_t rec, const SignedWalker& w, std::size_t flips,
                                  std::size_t n_kicks) {
                    for (std::size_t o = 0; o < n_obs; ++o) values[o] = sh.observables[o].evaluate(w.point);
                    out.tally.add(rec, b, w.sign, values, flips, n_kicks);
                    if (out.raw) {
                        for (std::size_t o = 0; o < n_obs; ++o) out.raw->values[rec][o][a] = values[o];
                        out.raw->signs[rec][a] = w.sign;
                    }
                };
                evolve_walker(walker, sh.runs[r], *sh.model, sh.plan, kicks, work, record);
                if (sh.sampling->keep_final) out.final_ensemble[a] = std::move(walker);
            }
        }
    }
}

template <typename Initial>
EnsembleResult run_all(std::span<const EvolutionConfig> runs, const ModelSpec& model,
                       std::span<const Observable> observables, const SamplingSettings& sampling,
                       Initial&& initial) {
    if (runs.empty()) throw ContractError("at least one evolution configuration is required");
    if (sampling.n_walkers == 0) throw ContractError("ensemble must be nonempty");
    if (observables.empty()) throw ContractError("at least one observable is required");
    for (const auto& cfg : runs) {
        cfg.validate(model);
        if (cfg.dt != runs.front().dt || cfg.n_steps() != runs.front().n_steps()
            || cfg.record_stride != runs.front().record_stride)
            throw ContractError("all runs must share dt, t_final and the record grid");
    }

    EnsembleResult result;
    result.n_walkers = sampling.n_walkers;
    result.seed = sampling.seed;
    result.steps = runs.front().record_steps();
    result.times = runs.front().record_times();
    for (const auto& o : observables) result.observable_names.push_back(o.name);

    const std::size_t nb = std::max<std::size_t>(1, std::min(sampling.n_blocks, sampling.n_walkers));
    const std::size_t n_rec = result.steps.size();
    for (const auto& cfg : runs) {
        RunResult rr;
        rr.config = cfg;
        rr.tally = SignedTally(n_rec, nb, observables.size());
        if (sampling.keep_raw) {
            RawRecords raw;
            raw.values.assign(n_rec, std::vector<std::vector<double>>(
                                         observables.size(), std::vector<double>(sampling.n_walkers)));
            raw.signs.assign(n_rec, std::vector<int>(sampling.n_walkers, 1));
            rr.raw = std::move(raw);
        }
        if (sampling.keep_final) rr.final_ensemble.resize(sampling.n_walkers);
        result.runs.push_back(std::move(rr));
    }

    Shared sh{runs, &model, observables, &sampling, RunPlan{result.steps, runs.front().n_steps()},
              &result};
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(sampling.workers, nb));
    if (n_workers == 1) {
        process_blocks(sh, 0, 1, initial);
        return result;
    }
    std::vector<std::thread> threads;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < n_workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                process_blocks(sh, w, n_workers, initial);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    return result;
}

} // namespace

EnsembleResult evolve_runs(const InitialSampler& sampler, std::span<const EvolutionConfig> runs,
                           const ModelSpec& model, std::span<const Observable> observables,
                           const SamplingSettings& sampling) {
    const std::uint64_t n_runs = runs.size();
    auto initial = [&](std::size_t a, std::size_t r) {
        // Unpaired runs draw their initial walkers from lanes past the kick lanes.
        Stream stream(sampling.seed, a, sampling.paired_initial ? 0 : n_runs + 1 + r);
        SignedWalker w = sampler(stream);
        if (w.point.dimension() != model.dimension())
            throw ContractError("initial sampler produced walkers of the wrong dimension");
        return w;
    };
    return run_all(runs, model, observables, sampling, initial);
}

EnsembleResult evolve_ensemble(std::span<const SignedWalker> walkers, const EvolutionConfig& config,
                               const ModelSpec& model, std::span<const Observable> observables,
                               const SamplingSettings& sampling) {
    if (walkers.empty()) throw ContractError("ensemble must be nonempty");
    for (const auto& w : walkers) {
        if (w.point.dimension() != model.dimension() || w.point.p.size() != w.point.x.size())
            throw ContractError("walker dimension does not match the model");
        if (w.sign != 1 && w.sign != -1) throw ContractError("walker sign must be +1 or -1");
    }
    SamplingSettings s = sampling;
    s.n_walkers = walkers.size();
    auto initial = [&](std::size_t a, std::size_t) { return walkers[a]; };
    return run_all(std::span<const EvolutionConfig>(&config, 1), model, observables, s, initial);
}

ObservableSeries EnsembleResult::series(std::size_t run, std::size_t obs) const {
    ObservableSeries s = series_from_tally(runs.at(run).tally, obs, times,
                                           observable_names.at(obs), runs.at(run).config.kappa);
    s.metadata["seed"] = std::to_string(seed);
    s.metadata["law"] = runs.at(run).config.law.describe();
    return s;
}

std::vector<SignDiagnostic> EnsembleResult::signs(std::size_t run) const {
    return sign_diagnostics(runs.at(run).tally, times, steps, runs.at(run).config.law.norm);
}

} // namespace phasewalk
