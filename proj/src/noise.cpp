#include "phasewalk/noise.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "phasewalk/error.hpp"

namespace phasewalk {

double NoiseLaw::kick_probability(std::size_t i) const {
    return weights.at(i) / (epsilon * epsilon * epsilon * norm);
}

double NoiseLaw::kick_rate() const {
    double total = 0.0;
    for (double g : weights) total += g;
    return total / (epsilon * epsilon * epsilon);
}

double NoiseLaw::moment(int n) const {
    if (n <= 0) return n == 0 ? 1.0 : 0.0;
    if (n % 2 == 0) return 0.0;
    if (weights.empty()) return 0.0;
    // gamma_i / eps^3 * [(eps a)^n - (-eps a)^n] = 2 gamma_i a^n eps^{n-3}
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        total += 2.0 * weights[i] * std::pow(abscissae[i], n);
    return total * std::pow(epsilon, n - 3);
}

std::string NoiseLaw::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "level=" << level << " drift_free=" << drift_free << " epsilon=" << epsilon << " c3=" << c3 << " norm=" << norm
       << " alpha=[";
    for (std::size_t i = 0; i < abscissae.size(); ++i) os << (i ? "," : "") << abscissae[i];
    os << "] gamma=[";
    for (std::size_t i = 0; i < weights.size(); ++i) os << (i ? "," : "") << weights[i];
    os << "]";
    return os.str();
}

std::vector<double> default_abscissa_pattern(int level) {
    switch (level) {
    case 1: return {1.0, -0.5};
    case 2: return {-1.0, 0.75, -0.25};
    case 3: return {1.0, 0.5, -0.25, -0.5 * std::sqrt(3.0)};
    default: throw ContractError("no default abscissa pattern for level " + std::to_string(level));
    }
}

NoiseLaw solve_noise_law(int level, double epsilon, double c3, std::span<const double> pattern) {
    if (level < 1) throw ContractError("noise level must be >= 1");
    if (!(epsilon > 0.0)) throw ContractError("kick scale epsilon must be positive");
    if (!(c3 >= 0.0) || !std::isfinite(c3)) throw ContractError("third moment target must be >= 0");
    const bool drift_free = pattern.size() == static_cast<std::size_t>(level) + 1;
    if (!drift_free && pattern.size() != static_cast<std::size_t>(level))
        throw ContractError("abscissa pattern must have level or level + 1 entries");

    const auto n = static_cast<Eigen::Index>(pattern.size());
    const int p_first = drift_free ? 0 : 1;
    Eigen::MatrixXd system(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (Eigen::Index row = 0; row < n; ++row) {
        const int p = p_first + static_cast<int>(row);
        for (Eigen::Index i = 0; i < n; ++i) {
            system(row, i) = 2.0 * std::pow(pattern[i], 2 * p + 1) * std::pow(epsilon, 2 * (p - 1));
        }
        if (p == 1) rhs(row) = c3;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    if (!(smallest > 0.0) || sv(0) / smallest > 1e12)
        throw SolverError("moment system is singular for the given abscissa pattern");

    Eigen::VectorXd gamma = system.colPivHouseholderQr().solve(rhs);

    NoiseLaw law;
    law.level = level;
    law.drift_free = drift_free;
    law.epsilon = epsilon;
    law.c3 = c3;
    law.abscissae.assign(pattern.begin(), pattern.end());
    law.weights.resize(pattern.size());
    law.condition_number = sv(0) / smallest;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        law.weights[i] = c3 == 0.0 ? 0.0 : gamma(i);
        if (c3 > 0.0 && !(gamma(i) > 0.0)) {
            throw InfeasiblePatternError("abscissa pattern yields a nonpositive weight gamma_"
                                         + std::to_string(i + 1)
                                         + "; choose a pattern with mixed signs");
        }
    }
    law.norm = 1.0 + 2.0 * law.kick_rate();
    if (law.kick_rate() >= kMaxKickRatePerStep) {
        throw ContractError("kick probability per step " + std::to_string(law.kick_rate())
                            + " exceeds " + std::to_string(kMaxKickRatePerStep)
                            + "; reduce the time step or increase epsilon");
    }
    return law;
}

NoiseLaw solve_noise_law(int level, double epsilon, double c3) {
    const auto pattern = default_abscissa_pattern(level);
    return solve_noise_law(level, epsilon, c3, pattern);
}

double third_moment_target(double kappa, double lambda_eff, double hbar, double dt) {
    return kappa * lambda_eff * hbar * hbar * dt / 4.0;
}

std::vector<double> verify_moments(const NoiseLaw& law, int p_max) {
    if (p_max < law.level) throw ContractError("p_max must be >= the law's level");
    std::vector<double> residuals;
    residuals.reserve(p_max + 1);
    for (int p = 0; p <= p_max; ++p) {
        const double target = p == 1 ? law.c3 : 0.0;
        residuals.push_back(std::abs(law.moment(2 * p + 1) - target));
    }
    return residuals;
}

SignedTransition sample_transition(const NoiseLaw& law, Stream& stream) {
    SignedTransition tr;
    double u = stream.uniform();
    const double stay = law.stay_probability();
    if (u < stay || law.degenerate()) return tr;
    u -= stay;
    const std::size_t m = law.weights.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double pi = law.kick_probability(i);
        for (int dir : {+1, -1}) {
            // The last branch absorbs the rounding remainder of the cumulative table.
            if (u < pi || (i + 1 == m && dir == -1)) {
                tr.outcome = SignedTransition::Outcome::Kick;
                tr.index = i;
                tr.direction = dir;
                tr.eta = dir * law.epsilon * law.abscissae[i];
                tr.sign_flip = dir < 0;
                return tr;
            }
            u -= pi;
        }
    }
    return tr;
}

SignPrediction mean_sign_prediction(const NoiseLaw& law, std::size_t n_steps) {
    const double mean = std::pow(law.norm, -static_cast<double>(n_steps));
    return {mean, 0.5 * (1.0 - mean)};
}

double breakdown_time(double lambda, double hbar, double kappa, double epsilon) {
    if (!(epsilon > 0.0) || !(hbar > 0.0) || lambda < 0.0 || kappa < 0.0)
        throw ContractError("breakdown time needs eps, hbar > 0 and lambda, kappa >= 0");
    const double rate = kappa * lambda * hbar * hbar;
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return epsilon * epsilon * epsilon / rate;
}

XiLaw XiLaw::two_atom() {
    const double c = std::cbrt(4.0);
    return XiLaw{{c, -0.5 * c}, {1.0 / 3.0, 2.0 / 3.0}};
}

namespace {

// Probabilities on atoms (a, b, c) matching <1> = 1, <xi> = 0, <xi^3> = 1.
Eigen::Vector3d three_atom_weights(double a, double b, double c) {
    Eigen::Matrix3d m;
    m << 1.0, 1.0, 1.0, a, b, c, a * a * a, b * b * b, c * c * c;
    return m.colPivHouseholderQr().solve(Eigen::Vector3d(1.0, 0.0, 1.0));
}

double fifth_moment(double a, double b, double c) {
    const Eigen::Vector3d w = three_atom_weights(a, b, c);
    return w(0) * std::pow(a, 5) + w(1) * std::pow(b, 5) + w(2) * std::pow(c, 5);
}

} // namespace

XiLaw XiLaw::three_atom() {
    // Atoms 2 and -1 fixed; the third is tuned by bisection so that <xi^5> = 0.
    constexpr double a = 2.0;
    constexpr double b = -1.0;
    double lo = -3.0;
    double hi = -2.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fifth_moment(a, b, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double c = 0.5 * (lo + hi);
    const Eigen::Vector3d w = three_atom_weights(a, b, c);
    return XiLaw{{a, b, c}, {w(0), w(1), w(2)}};
}

double XiLaw::moment(int n) const {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) total += probabilities[i] * std::pow(values[i], n);
    return total;
}

double XiLaw::sample(Stream& stream) const {
    double u = stream.uniform();
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (u < probabilities[i]) return values[i];
        u -= probabilities[i];
    }
    return values.back();
}

} // namespace phasewalk
