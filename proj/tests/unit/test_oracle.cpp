#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include <gsl/gsl_sf_airy.h>

#include "phasewalk/error.hpp"
#include "phasewalk/oracle.hpp"
#include "phasewalk/states.hpp"

using namespace phasewalk;

namespace {

std::vector<double> grid_times(double t_final, int n) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(t_final * i / n);
    return t;
}

// closed form of int dz exp(i p z - i Q z^3 - s^2 z^2 / 2) through the Airy function
double airy_integral(double p, double Q, double sp) {
    const double s2 = sp * sp;
    const double zeta = 3 * Q * p - s2 * s2 / 4;
    const double c = std::cbrt(3 * std::abs(Q));
    const double arg = -zeta / (c * c * c * c);
    return std::exp(s2 * s2 * s2 / (108 * Q * Q) - p * s2 / (6 * Q)) * 2 * std::numbers::pi / c
           * gsl_sf_airy_Ai(arg, GSL_PREC_DOUBLE);
}

}

TEST_CASE("free packet spreads by the closed form") {
    const auto free = ModelSpec::quartic(0.0, 0.0);
    const auto psi = gaussian_wavefunction(4096, 60.0, 0.45);
    const auto times = grid_times(6.0, 12);
    const auto r = schrodinger_evolve(psi, free, 1e-3, 6.0, times);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(r.q2[i] == doctest::Approx(free_width2_analytic(0.45, 1.0, 1.0, times[i])).epsilon(1e-6));
    CHECK(r.max_norm_drift < 1e-8 * 6.0);
}

TEST_CASE("harmonic width and energy") {
    const auto osc = ModelSpec::quartic(1.0, 0.0);
    const auto psi = gaussian_wavefunction(1024, 12.0, 0.45);
    const auto times = grid_times(10.0, 40);
    const auto r = schrodinger_evolve(psi, osc, 1e-3, 10.0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(r.q2[i] == doctest::Approx(harmonic_q2_analytic(0.45, 1.0 / 0.9, 1.0, 1.0, times[i])).epsilon(1e-6));
        CHECK(r.energy[i] == doctest::Approx(r.energy[0]).epsilon(1e-6));
    }
    CHECK(r.energy[0] == doctest::Approx(0.5 * (0.45 * 0.45 + 1.0 / 0.81)).epsilon(1e-9));
}

TEST_CASE("harmonic closed form") {
    CHECK(harmonic_q2_analytic(0.4, 1.2, 1.0, 2.0, 0.0) == doctest::Approx(0.16));
    CHECK(harmonic_q2_analytic(0.4, 1.2, 1.0, 2.0, std::numbers::pi / 4) == doctest::Approx(1.44 / 4));
    CHECK(harmonic_q2_analytic(0.4, 0.8, 1.0, 2.0, 1.234) == doctest::Approx(0.16));
}

TEST_CASE("anharmonic oracle conserves energy and converges in the grid") {
    const auto model = ModelSpec::quartic(0.5, 0.45);
    const auto times = grid_times(5.0, 5);
    const auto a = schrodinger_evolve(gaussian_wavefunction(512, 12.0, 0.45), model, 1e-3, 5.0, times);
    const auto b = schrodinger_evolve(gaussian_wavefunction(1024, 12.0, 0.45), model, 1e-3, 5.0, times);
    CHECK(b.q2.back() == doctest::Approx(a.q2.back()).epsilon(1e-6));
    CHECK(b.energy.back() == doctest::Approx(b.energy.front()).epsilon(1e-6));
    CHECK(b.max_norm_drift < 5e-8);
}

TEST_CASE("boundary leakage aborts") {
    const auto free = ModelSpec::quartic(0.0, 0.0);
    const auto psi = gaussian_wavefunction(256, 4.0, 0.45, 0.0, 3.0);
    const auto times = grid_times(5.0, 5);
    CHECK_THROWS_AS(schrodinger_evolve(psi, free, 1e-3, 5.0, times), OracleError);
}

TEST_CASE("two-site vacuum matches the free mode sum") {
    const auto chain = ModelSpec::lattice_chain(2, 0.8, -0.5, 0.0);
    const auto psi = two_site_vacuum(chain, 0.5, 128, 8.0);
    const double w0 = std::sqrt(0.5), w1 = std::sqrt(4 / 0.64 + 0.5);
    CHECK(position_variance(psi) == doctest::Approx(0.5 / w0 + 0.5 / w1).epsilon(1e-9));
}

TEST_CASE("wigner transport is classical for quadratic potentials") {
    const auto osc = ModelSpec::quartic(1.0, 0.0);
    auto psi = gaussian_wavefunction(256, 8.0, 0.6, 0.7, -0.4);
    const double t = 0.9;
    const std::vector<double> times{0.0, t};
    OracleOptions opt;
    opt.keep_snapshots = true;
    const auto r = schrodinger_evolve(psi, osc, 1e-4, t, times, opt);
    const auto w0 = wigner_from_wavefunction(r.snapshots.front());
    const auto wt = wigner_from_wavefunction(r.final_state);
    const auto spec = make_pure_gaussian(0.6).centred_at(0.7, -0.4);
    double worst = 0;
    for (std::size_t i = 60; i < 200; i += 7) {
        for (std::size_t k = 0; k < wt.p.size(); k += 5) {
            const double x = wt.x[i], p = wt.p[k];
            // back along the characteristic
            const double x0 = x * std::cos(t) - p * std::sin(t);
            const double p0 = x * std::sin(t) + p * std::cos(t);
            worst = std::max(worst, std::abs(wt.at(i, k) - spec.density(x0, p0)));
        }
    }
    CHECK(worst < 1e-8);
    CHECK(w0.at(128, w0.p.size() / 2) > 0.0);
}

TEST_CASE("ultraquantum integral matches the Airy closed form") {
    for (double Q : {2.0, -1.3, 0.05}) {
        for (double p : {-6.0, -1.0, 0.0, 2.5, 8.0}) {
            const double sp = std::sqrt(2.0);
            const double exact = airy_integral(p, Q, sp);
            CHECK(std::abs(uq_integral(p, Q, sp) - exact) < 1e-8 * std::abs(exact) + 1e-13);
        }
    }
}

TEST_CASE("ultraquantum wigner at t = 0 is the initial gaussian") {
    const auto spec = make_pure_gaussian(0.45);
    for (double x : {-0.5, 0.0, 0.9})
        for (double p : {-2.0, 0.0, 1.3})
            CHECK(uq_wigner(x, p, 0.0, 0.45, 1.0 / 0.9, 0.45, 1.0) == doctest::Approx(spec.density(x, p)).epsilon(1e-10));
}

TEST_CASE("position marginal is time independent") {
    const double sp = 1.0 / 0.9;
    const double m0 = uq_position_marginal(1.0, 0.0, 0.45, sp, 0.45, 1.0);
    CHECK(m0 == doctest::Approx(std::exp(-1.0 / (2 * 0.45 * 0.45)) / std::sqrt(2 * std::numbers::pi * 0.45 * 0.45)));
    for (double t : {1.0, 5.0, 20.0})
        CHECK(uq_position_marginal(1.0, t, 0.45, sp, 0.45, 1.0) == doctest::Approx(m0).epsilon(1e-8));
}

TEST_CASE("saddle branches") {
    const double sp = std::sqrt(2.0), Q = 2.0;
    const double pref = 1.0 / std::pow(2 * std::numbers::pi, 1.5);
    for (double p : {12.0, 15.0, 20.0}) {
        const double exact = pref * uq_integral(p, Q, sp);
        const double env = uq_saddle_envelope(0.0, p, 1.0, sp, Q, 1.0);
        CHECK(std::abs(uq_saddle(0.0, p, 1.0, sp, Q, 1.0) - exact) < 0.05 * env);
    }
    double last = 1e300;
    for (double p = -2.0; p >= -8.0; p -= 1.0) {
        const double v = uq_saddle(0.0, p, 1.0, sp, Q, 1.0);
        CHECK(v > 0.0);
        CHECK(v < last);
        last = v;
    }
    CHECK(uq_zeta(1.0, 2.0, sp) == doctest::Approx(6.0 - 1.0));
}

TEST_CASE("infinite-mass variant") {
    const auto model = ModelSpec::quartic(0.5, 0.45);
    const double sp = 1.0 / 0.9;
    CHECK(uq_infinite_mass(0.7, 0.3, 0.0, model, 0.45, sp) == uq_wigner(0.7, 0.3, 0.0, 0.45, sp, 0.45, 1.0));
    CHECK(uq_infinite_mass(0.0, 0.3, 2.0, model, 0.45, sp) == uq_wigner(0.0, 0.3, 2.0, 0.45, sp, 0.45, 1.0));
}
