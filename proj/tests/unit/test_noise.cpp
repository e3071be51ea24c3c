#include "doctest.h"

#include <cmath>

#include "phasewalk/error.hpp"
#include "phasewalk/noise.hpp"

using namespace phasewalk;

namespace {

// sum over the atoms of rho_N, written out directly
double brute_moment(const NoiseLaw& law, int n) {
    const double e3 = std::pow(law.epsilon, 3);
    double total = 0;
    for (std::size_t i = 0; i < law.abscissae.size(); ++i) {
        const double eta = law.epsilon * law.abscissae[i];
        total += law.weights[i] / e3 * (std::pow(eta, n) - std::pow(-eta, n));
    }
    return total;
}

}

TEST_CASE("level-1 law with a single abscissa") {
    const double c = 1e-3;
    const std::vector<double> pattern{1.0};
    const auto law = solve_noise_law(1, 0.5, c, pattern);
    REQUIRE(law.weights.size() == 1);
    CHECK(law.weights[0] == doctest::Approx(c / 2).epsilon(1e-14));
    CHECK(law.norm == doctest::Approx(1.0 + c / 0.125).epsilon(1e-14));
    CHECK(brute_moment(law, 3) == doctest::Approx(c).epsilon(1e-13));
    CHECK(std::abs(brute_moment(law, 5)) > 0.0);
    CHECK(verify_moments(law, 2)[1] <= 1e-12 * c);
}

TEST_CASE("level-2 law on (1, -sqrt 2)") {
    const double c = 2e-3;
    const std::vector<double> pattern{1.0, -std::sqrt(2.0)};
    const auto law = solve_noise_law(2, 0.6, c, pattern);
    CHECK(brute_moment(law, 3) == doctest::Approx(c).epsilon(1e-12));
    CHECK(std::abs(brute_moment(law, 5)) < 1e-15);
    for (double g : law.weights) CHECK(g > 0.0);
}

TEST_CASE("same-sign pattern is infeasible") {
    const std::vector<double> pattern{1.0, 2.0};
    CHECK_THROWS_AS(solve_noise_law(2, 0.5, 1e-3, pattern), InfeasiblePatternError);
}

TEST_CASE("default patterns remove the drift and match every constrained moment") {
    for (int level = 1; level <= 3; ++level) {
        const double c = 1e-3;
        const double eps = 0.9;
        const auto law = solve_noise_law(level, eps, c);
        CHECK(law.drift_free);
        CHECK(law.abscissae.size() == std::size_t(level + 1));
        CHECK(std::abs(brute_moment(law, 1)) < 1e-15);
        CHECK(brute_moment(law, 3) == doctest::Approx(c).epsilon(1e-12));
        for (int p = 2; p <= level; ++p) CHECK(std::abs(brute_moment(law, 2 * p + 1)) < 1e-15);
        for (int n = 2; n <= 8; n += 2) CHECK(brute_moment(law, n) == 0.0);
        const auto res = verify_moments(law, level);
        for (double r : res) CHECK(r <= 1e-12);
        double sum = 0;
        for (double g : law.weights) sum += g;
        CHECK(law.norm == 1.0 + 2.0 * sum / (eps * eps * eps));
        for (int n = 1; n <= 7; ++n) CHECK(law.moment(n) == doctest::Approx(brute_moment(law, n)).epsilon(1e-12));
    }
}

TEST_CASE("classical limit degenerates to stay-always") {
    const auto law = solve_noise_law(2, 0.5, 0.0);
    CHECK(law.degenerate());
    for (double g : law.weights) CHECK(g == 0.0);
    CHECK(law.norm == 1.0);
    Stream s(1, 2, 3);
    for (int i = 0; i < 1000; ++i) CHECK(sample_transition(law, s).outcome == SignedTransition::Outcome::Stay);
}

TEST_CASE("kick-rate bound") {
    CHECK_THROWS_AS(solve_noise_law(1, 0.1, 1e-3), ContractError);
    CHECK_NOTHROW(solve_noise_law(1, 0.3, third_moment_target(1.0, 0.45, 1.0, 0.01)));
}

TEST_CASE("transition frequencies") {
    const double c = 1e-3;
    const auto law = solve_noise_law(2, 0.6, c);
    const std::size_t n = 10000000;
    std::size_t stays = 0, flips = 0;
    double m3 = 0, m3sq = 0;
    Stream s(11, 0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = sample_transition(law, s);
        if (t.outcome == SignedTransition::Outcome::Stay) {
            ++stays;
            continue;
        }
        if (t.sign_flip) ++flips;
        CHECK(t.sign_flip == (t.direction < 0));
        const double sig = t.sign_flip ? -1.0 : 1.0;
        const double v = sig * t.eta * t.eta * t.eta * law.norm;
        m3 += v;
        m3sq += v * v;
    }
    const double p = 1.0 / law.norm;
    const double sd = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(double(stays) - n * p) < 4 * sd);
    const double pf = (1 - p) / 2;
    CHECK(std::abs(double(flips) - n * pf) < 4 * std::sqrt(n * pf * (1 - pf)));
    const double mean3 = m3 / n;
    CHECK(std::abs(mean3 - c) < 4 * std::sqrt(m3sq / n / n));
}

TEST_CASE("sign predictions and breakdown time") {
    NoiseLaw law;
    law.norm = 1.01;
    const auto zero = mean_sign_prediction(law, 0);
    CHECK(zero.mean_sign == 1.0);
    CHECK(zero.negative_fraction == 0.0);
    const auto hundred = mean_sign_prediction(law, 100);
    CHECK(hundred.mean_sign == doctest::Approx(0.3697).epsilon(2e-3));
    CHECK(hundred.mean_sign == doctest::Approx(std::pow(1.01, -100)).epsilon(1e-14));
    CHECK(hundred.negative_fraction == doctest::Approx((1 - std::pow(1.01, -100)) / 2).epsilon(1e-14));
    CHECK(mean_sign_prediction(law, 100000).negative_fraction == doctest::Approx(0.5));
    CHECK(breakdown_time(0.45, 1.0, 1.0, 0.3) == doctest::Approx(0.06));
    CHECK(breakdown_time(0.45, 1.0, 1.0 / 6, 0.3) == doctest::Approx(0.36));
    CHECK(std::isinf(breakdown_time(0.0, 1.0, 1.0, 0.3)));
}

TEST_CASE("xi laws") {
    const auto two = XiLaw::two_atom();
    CHECK(two.moment(1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(two.moment(3) == doctest::Approx(1.0).epsilon(1e-14));
    const auto three = XiLaw::three_atom();
    CHECK(std::abs(three.moment(1)) < 1e-14);
    CHECK(three.moment(3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(three.moment(5)) < 1e-12);
    for (double p : three.probabilities) CHECK(p > 0.0);
}
