#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasewalk/estimators.hpp"
#include "phasewalk/model.hpp"
#include "phasewalk/noise.hpp"
#include "phasewalk/rng.hpp"
#include "phasewalk/walker.hpp"

namespace phasewalk {

enum class Integrator {
    SymplecticEuler,  // x' = x + dt p / m, p' = p + dt F(x', t + dt/2); required when kappa > 0
    Leapfrog,         // velocity Verlet; classical (kappa = 0) runs only
};

enum class XiKind { TwoAtom, ThreeAtom };

struct NoiseSettings {
    int level = 2;
    double epsilon = 0.3;
    std::vector<double> pattern;  // empty: default pattern for the level
    XiKind xi = XiKind::TwoAtom;
};

struct EvolutionConfig {
    double dt = 0.01;
    double t_final = 1.0;
    double kappa = 0.0;
    std::size_t record_stride = 1;  // record every this many steps (step 0 included)
    NoiseLaw law;                   // built with c3 = kappa lambda_eff hbar^2 dt / 4
    XiLaw xi = XiLaw::two_atom();
    Integrator integrator = Integrator::SymplecticEuler;
    double stability_factor = 0.05;  // require dt * omega_max <= stability_factor

    std::size_t n_steps() const;
    std::vector<std::size_t> record_steps() const;
    std::vector<double> record_times() const;

    /// Throws ContractError on an inconsistent configuration for `model`.
    void validate(const ModelSpec& model) const;
};

/// Builds the step law for `kappa` on `model` (degenerate when kappa or lambda vanish).
EvolutionConfig make_evolution_config(const ModelSpec& model, double dt, double t_final,
                                      double kappa, std::size_t record_stride,
                                      const NoiseSettings& noise);

struct Observable {
    std::string name;
    std::function<double(const PhasePoint&)> evaluate;
};

/// sum_n x_n^2; for the lattice chain in canonical variables this is sum_k |phi_k|^2.
Observable position_squared();
Observable momentum_squared();
Observable total_momentum();
Observable mean_position();

/// Scratch space reused across steps of one walker.
struct StepWorkspace {
    std::vector<double> force;
};

/// Deterministic part of one time step starting at time t.
void drift_step(SignedWalker& walker, double dt, const ModelSpec& model, double t,
                StepWorkspace& work, Integrator integrator = Integrator::SymplecticEuler);

struct KickOutcome {
    bool kicked = false;
    bool flipped = false;
};

/// Samples one transition of the signed kick law and applies it at the current position:
/// p_n += eta cbrt(x_n) xi_n (xi = 1 for a single degree of freedom), sign *= -1 on a flip.
KickOutcome kick_step(SignedWalker& walker, const NoiseLaw& law, const ModelSpec& model,
                      const XiLaw& xi, Stream& stream);

using InitialSampler = std::function<SignedWalker(Stream&)>;

struct SamplingSettings {
    std::size_t n_walkers = 1000;
    std::uint64_t seed = 1;
    std::size_t n_blocks = kDefaultJackknifeBlocks;
    std::size_t workers = 1;
    bool keep_raw = false;      // store per-walker values and signs at every record
    bool keep_final = false;    // return the final ensemble
    bool paired_initial = true; // every run starts from the same initial walkers
};

/// Per-walker arrays at every record (only when SamplingSettings::keep_raw).
struct RawRecords {
    std::vector<std::vector<std::vector<double>>> values;  // [record][observable][walker]
    std::vector<std::vector<int>> signs;                   // [record][walker]
};

struct RunResult {
    EvolutionConfig config;
    SignedTally tally;
    std::optional<RawRecords> raw;
    std::vector<SignedWalker> final_ensemble;
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<std::size_t> steps;
    std::vector<std::string> observable_names;
    std::size_t n_walkers = 0;
    std::uint64_t seed = 0;
    std::vector<RunResult> runs;

    ObservableSeries series(std::size_t run, std::size_t obs) const;
    std::vector<SignDiagnostic> signs(std::size_t run) const;
};

/// Evolves the walkers through every configuration in `runs` (all sharing dt, t_final and the
/// record grid). Walker a starts from sampler(Stream(seed, a, 0)); with paired_initial all runs
/// reuse it, and run r draws kicks from Stream(seed, a, r + 1). Walkers are processed whole
/// block at a time, so results are bit-identical for any worker count.
EnsembleResult evolve_runs(const InitialSampler& sampler, std::span<const EvolutionConfig> runs,
                           const ModelSpec& model, std::span<const Observable> observables,
                           const SamplingSettings& sampling);

/// Evolves an explicit ensemble under one configuration.
EnsembleResult evolve_ensemble(std::span<const SignedWalker> walkers, const EvolutionConfig& config,
                               const ModelSpec& model, std::span<const Observable> observables,
                               const SamplingSettings& sampling);

} // namespace phasewalk
