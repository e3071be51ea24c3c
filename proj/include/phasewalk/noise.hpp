#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phasewalk/rng.hpp"

namespace phasewalk {

/// Level-N coarse-grained kick law
///
///   rho_N(eta) = delta(eta) + sum_i gamma_i / eps^3 [delta(eta - eps alpha_i) - delta(eta + eps alpha_i)]
///
/// together with its sign-extended probability law: stay with probability 1/norm, or kick by
/// +eps alpha_i (sign kept) / -eps alpha_i (sign flipped), each with probability
/// gamma_i / (eps^3 norm). Odd moments mu_{2p+1} = 2 sum_i gamma_i alpha_i^{2p+1} eps^{2(p-1)}
/// equal c3 at p = 1 and vanish for 2 <= p <= level, and also at p = 0 (the drift <eta>) when
/// the law has level + 1 abscissae.
struct NoiseLaw {
    int level = 1;
    bool drift_free = true;  // mu_1 = 0 is part of the moment system
    double epsilon = 1.0;
    double c3 = 0.0;
    std::vector<double> abscissae;
    std::vector<double> weights;
    double norm = 1.0;
    double condition_number = 1.0;

    double stay_probability() const { return 1.0 / norm; }
    /// Probability of each individual kick branch (either direction) for abscissa i.
    double kick_probability(std::size_t i) const;
    /// sum_i gamma_i / eps^3, the quantity bounded by the per-step validity limit.
    double kick_rate() const;
    bool degenerate() const { return c3 == 0.0; }

    /// Signed moment <eta^n> under rho_N (even moments are identically zero).
    double moment(int n) const;

    std::string describe() const;
};

/// Default nodes with level + 1 entries, so that mu_1 vanishes as well:
/// (1, -1/2), (-1, 3/4, -1/4), (1, 1/2, -1/4, -sqrt(3)/2).
std::vector<double> default_abscissa_pattern(int level);

/// Upper bound on sum_i gamma_i / eps^3 enforced at construction (first-order validity in dt).
inline constexpr double kMaxKickRatePerStep = 0.1;

/// Solves the moment system for the weights gamma_i. A pattern of level + 1 abscissae imposes
/// mu_1 = 0 together with the conditions for p = 1 .. level; a pattern of exactly `level`
/// abscissae imposes p = 1 .. level only and leaves a drift mu_1 != 0.
/// Throws SolverError on a singular system, InfeasiblePatternError on a nonpositive weight and
/// ContractError if the resulting per-step kick rate breaks kMaxKickRatePerStep.
NoiseLaw solve_noise_law(int level, double epsilon, double c3, std::span<const double> pattern);
NoiseLaw solve_noise_law(int level, double epsilon, double c3);

/// Target third moment kappa lambda_eff hbar^2 dt / 4 for one time step.
double third_moment_target(double kappa, double lambda_eff, double hbar, double dt);

/// Entry p holds |mu_{2p+1} - target_p| for p = 0 .. p_max: target c3 at p = 1 and 0 elsewhere.
/// Entries above the level (and p = 0 for a law that is not drift free) are unconstrained.
std::vector<double> verify_moments(const NoiseLaw& law, int p_max);

struct SignedTransition {
    enum class Outcome { Stay, Kick };
    Outcome outcome = Outcome::Stay;
    std::size_t index = 0;
    int direction = +1;
    double eta = 0.0;
    bool sign_flip = false;
};

SignedTransition sample_transition(const NoiseLaw& law, Stream& stream);

struct SignPrediction {
    double mean_sign;
    double negative_fraction;
};

/// <sigma> = norm^{-n}, P_- = (1 - norm^{-n}) / 2.
SignPrediction mean_sign_prediction(const NoiseLaw& law, std::size_t n_steps);

/// eps^3 / (kappa lambda hbar^2); +infinity when the quantum term vanishes.
double breakdown_time(double lambda, double hbar, double kappa, double epsilon);

/// Positive-definite law for the per-coordinate factors xi_i of multi-site kicks.
struct XiLaw {
    std::vector<double> values;
    std::vector<double> probabilities;

    /// xi in {4^{1/3} w.p. 1/3, -4^{1/3}/2 w.p. 2/3}: <xi> = 0, <xi^3> = 1.
    static XiLaw two_atom();
    /// Three atoms with <xi> = 0, <xi^3> = 1 and <xi^5> = 0.
    static XiLaw three_atom();

    double moment(int n) const;
    double sample(Stream& stream) const;
};

} // namespace phasewalk
