#include "phasewalk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "fft.hpp"
#include "phasewalk/error.hpp"

namespace phasewalk {

namespace {

using cplx = std::complex<double>;

// Angular wavenumbers of a periodic FFT grid in FFTW order.
std::vector<double> wavenumbers(std::size_t n, double dx) {
    std::vector<double> k(n);
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<long>(i);
        const long half = static_cast<long>(n / 2);
        k[i] = dk * static_cast<double>(s < half ? s : s - static_cast<long>(n));
    }
    return k;
}

void check_grid(const GridWavefunction& psi, const ModelSpec& model) {
    if (psi.amplitudes.size() != psi.nx * psi.ny || psi.nx < 4)
        throw ContractError("malformed grid wavefunction");
    if (psi.ny == 1) {
        if (model.dimension() != 1) throw ContractError("1D grid needs a one-dimensional model");
    } else {
        if (psi.ny != psi.nx) throw ContractError("2D grids must be square");
        if (model.kind != ModelKind::LatticeChain || model.n_sites != 2)
            throw ContractError("2D grids support only the two-site lattice chain");
    }
}

// Potential on every grid point at time t.
void fill_potential(const GridWavefunction& psi, const ModelSpec& model, double t,
                    std::vector<double>& v) {
    v.resize(psi.amplitudes.size());
    if (psi.ny == 1) {
        for (std::size_t i = 0; i < psi.nx; ++i) {
            const double x = psi.coordinate(i);
            v[i] = potential_energy(model, std::span<const double>(&x, 1), t);
        }
        return;
    }
    double q[2];
    for (std::size_t i = 0; i < psi.nx; ++i) {
        q[0] = psi.coordinate(i);
        for (std::size_t j = 0; j < psi.ny; ++j) {
            q[1] = psi.coordinate(j);
            v[i * psi.ny + j] = potential_energy(model, q, t);
        }
    }
}

std::vector<double> kinetic_energies(const GridWavefunction& psi, const ModelSpec& model) {
    const auto k = wavenumbers(psi.nx, psi.dx);
    const double c = model.hbar * model.hbar / (2.0 * model.kinetic_mass());
    std::vector<double> e(psi.amplitudes.size());
    for (std::size_t i = 0; i < psi.nx; ++i) {
        if (psi.ny == 1) {
            e[i] = c * k[i] * k[i];
        } else {
            for (std::size_t j = 0; j < psi.ny; ++j) e[i * psi.ny + j] = c * (k[i] * k[i] + k[j] * k[j]);
        }
    }
    return e;
}

} // namespace

double position_variance(const GridWavefunction& psi) {
    double total = 0.0;
    for (std::size_t i = 0; i < psi.nx; ++i) {
        const double x = psi.coordinate(i);
        for (std::size_t j = 0; j < psi.ny; ++j) {
            double r2 = x * x;
            if (psi.ny > 1) {
                const double y = psi.coordinate(j);
                r2 += y * y;
            }
            total += r2 * std::norm(psi.amplitudes[i * psi.ny + j]);
        }
    }
    return total * psi.cell_volume();
}

double energy_expectation(const GridWavefunction& psi, const ModelSpec& model, double t) {
    check_grid(psi, model);
    std::vector<double> v;
    fill_potential(psi, model, t, v);
    double potential = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) potential += v[i] * std::norm(psi.amplitudes[i]);
    potential *= psi.cell_volume();

    detail::ComplexFft forward(psi.nx, psi.ny == 1 ? 0 : psi.ny, FFTW_FORWARD);
    std::vector<cplx> spec = psi.amplitudes;
    forward.execute(spec);
    const auto ek = kinetic_energies(psi, model);
    double kinetic = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        kinetic += ek[i] * std::norm(spec[i]);
        total += std::norm(spec[i]);
    }
    // Parseval: sum |psi_k|^2 = n sum |psi_x|^2, so normalise by the spectral total.
    return potential + kinetic / total * psi.norm_squared();
}

SchrodingerResult schrodinger_evolve(const GridWavefunction& psi0, const ModelSpec& model,
                                     double dt, double t_final,
                                     std::span<const double> record_times,
                                     const OracleOptions& options) {
    model.validate();
    check_grid(psi0, model);
    if (!(dt > 0.0)) throw ContractError("time step must be positive");
    if (!(t_final >= psi0.t)) throw ContractError("final time precedes the initial time");
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        throw ContractError("record times must be sorted");
    for (double t : record_times) {
        if (t < psi0.t - 1e-12 || t > t_final + 1e-12)
            throw ContractError("record time outside [t0, t_final]");
    }
    if (std::abs(psi0.norm_squared() - 1.0) > options.norm_tolerance)
        throw ContractError("initial wavefunction is not normalized");

    const bool two_d = psi0.ny > 1;
    const double hbar = model.hbar;
    const bool static_potential = model.kind != ModelKind::TanhQuench1D;

    detail::ComplexFft forward(psi0.nx, two_d ? psi0.ny : 0, FFTW_FORWARD);
    detail::ComplexFft backward(psi0.nx, two_d ? psi0.ny : 0, FFTW_BACKWARD);
    const auto ek = kinetic_energies(psi0, model);
    const double inv_n = 1.0 / static_cast<double>(psi0.amplitudes.size());

    SchrodingerResult result;
    GridWavefunction psi = psi0;
    std::vector<double> v;
    std::vector<cplx> kin_phase(ek.size());
    std::vector<cplx> pot_phase(ek.size());
    double cached_h = -1.0;

    auto record = [&]() {
        result.times.push_back(psi.t);
        result.q2.push_back(position_variance(psi));
        result.energy.push_back(energy_expectation(psi, model, psi.t));
        const double n2 = psi.norm_squared();
        result.norm.push_back(n2);
        if (options.keep_snapshots) result.snapshots.push_back(psi);
    };

    auto check = [&]() {
        const double drift = std::abs(1.0 - psi.norm_squared());
        psi.norm_drift = drift;
        result.max_norm_drift = std::max(result.max_norm_drift, drift);
        const double edge = psi.boundary_density();
        result.max_boundary_density = std::max(result.max_boundary_density, edge);
        if (drift > options.norm_tolerance || edge > options.boundary_tolerance) {
            std::ostringstream os;
            os << "Schrodinger oracle aborted at t = " << psi.t << ": norm drift " << drift
               << ", boundary density " << edge << " (grid " << psi.nx << " points on ["
               << psi.x_min << ", " << -psi.x_min << "])";
            throw OracleError(os.str());
        }
    };

    auto step = [&](double h) {
        const bool new_h = h != cached_h;
        if (new_h) {
            for (std::size_t i = 0; i < ek.size(); ++i)
                kin_phase[i] = std::polar(inv_n, -ek[i] * h / hbar);
        }
        if (!static_potential || v.empty()) fill_potential(psi, model, psi.t + 0.5 * h, v);
        if (!static_potential || new_h) {
            for (std::size_t i = 0; i < v.size(); ++i) pot_phase[i] = std::polar(1.0, -0.5 * v[i] * h / hbar);
        }
        cached_h = h;
        for (std::size_t i = 0; i < v.size(); ++i) psi.amplitudes[i] *= pot_phase[i];
        forward.execute(psi.amplitudes);
        for (std::size_t i = 0; i < v.size(); ++i) psi.amplitudes[i] *= kin_phase[i];
        backward.execute(psi.amplitudes);
        for (std::size_t i = 0; i < v.size(); ++i) psi.amplitudes[i] *= pot_phase[i];
        psi.t += h;
    };

    std::vector<double> targets(record_times.begin(), record_times.end());
    if (targets.empty() || targets.back() < t_final - 1e-12) targets.push_back(t_final);
    std::size_t next = 0;
    while (next < targets.size() && targets[next] <= psi.t + 1e-12) {
        if (next < record_times.size()) record();
        ++next;
    }
    check();
    for (; next < targets.size(); ++next) {
        const double span = targets[next] - psi.t;
        const auto n = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
        const double h = span / static_cast<double>(std::max<std::size_t>(n, 1));
        for (std::size_t s = 0; s < n; ++s) {
            step(h);
            if ((s + 1) % 64 == 0) check();
        }
        psi.t = targets[next];
        check();
        if (next < record_times.size()) record();
    }
    result.final_state = std::move(psi);
    return result;
}

GridWavefunction gaussian_wavefunction(std::size_t points, double half_width, double sigma_x,
                                       double x0, double p0, double hbar) {
    if (!(sigma_x > 0.0)) throw ContractError("sigma_x must be positive");
    GridWavefunction psi = GridWavefunction::uniform_grid_1d(points, half_width);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = psi.coordinate(i);
        const double d = x - x0;
        psi.amplitudes[i] = std::polar(std::exp(-d * d / (4.0 * sigma_x * sigma_x)), p0 * x / hbar);
    }
    psi.normalize();
    return psi;
}

GridWavefunction two_site_vacuum(const ModelSpec& model, double mu2_pre, std::size_t points,
                                 double half_width) {
    if (model.kind != ModelKind::LatticeChain || model.n_sites != 2)
        throw ContractError("two_site_vacuum needs the two-site lattice chain");
    // Normal modes (q0 + q1)/sqrt2 at w_0 and (q0 - q1)/sqrt2 at w_1.
    const double w0_2 = mu2_pre;
    const double w1_2 = 4.0 / (model.spacing * model.spacing) + mu2_pre;
    if (!(w0_2 > 0.0) || !(w1_2 > 0.0)) throw DomainError("pre-quench vacuum needs mu2_pre > 0");
    const double w0 = std::sqrt(w0_2);
    const double w1 = std::sqrt(w1_2);
    GridWavefunction psi = GridWavefunction::uniform_grid_2d(points, half_width);
    for (std::size_t i = 0; i < points; ++i) {
        const double a = psi.coordinate(i);
        for (std::size_t j = 0; j < points; ++j) {
            const double b = psi.coordinate(j);
            const double s = (a + b) / std::numbers::sqrt2;
            const double d = (a - b) / std::numbers::sqrt2;
            psi.amplitudes[i * points + j] = std::exp(-(w0 * s * s + w1 * d * d) / (2.0 * model.hbar));
        }
    }
    psi.normalize();
    return psi;
}

double harmonic_q2_analytic(double sigma_x, double sigma_p, double m, double omega, double t) {
    if (omega < 0.0) throw ContractError("omega must be >= 0");
    if (omega == 0.0) return sigma_x * sigma_x + sigma_p * sigma_p * t * t / (m * m);
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return sigma_x * sigma_x * c * c + sigma_p * sigma_p * s * s / (m * m * omega * omega);
}

double free_width2_analytic(double sigma_x, double hbar, double m, double t) {
    const double spread = hbar * t / (2.0 * m * sigma_x);
    return sigma_x * sigma_x + spread * spread;
}

double uq_phase_coefficient(double x, double t, double lambda, double hbar) {
    return -lambda * hbar * hbar * x * t / 24.0;
}

namespace {

struct UqParams {
    double p;
    double Q;
    double sigma2;
    bool imaginary;
};

double uq_integrand(double z, void* raw) {
    const auto* u = static_cast<const UqParams*>(raw);
    const double phase = u->p * z - u->Q * z * z * z;
    const double damp = std::exp(-0.5 * u->sigma2 * z * z);
    return damp * (u->imaginary ? std::sin(phase) : std::cos(phase));
}

class IntegrationWorkspace {
public:
    explicit IntegrationWorkspace(std::size_t n) : n_(n), ws_(gsl_integration_workspace_alloc(n)) {}
    ~IntegrationWorkspace() { gsl_integration_workspace_free(ws_); }
    IntegrationWorkspace(const IntegrationWorkspace&) = delete;
    IntegrationWorkspace& operator=(const IntegrationWorkspace&) = delete;
    gsl_integration_workspace* get() { return ws_; }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    gsl_integration_workspace* ws_;
};

double integrate(UqParams params, double a, double b) {
    constexpr std::size_t kLimit = 20000;
    thread_local IntegrationWorkspace ws(kLimit);
    gsl_function f{&uq_integrand, &params};
    double value = 0.0;
    double abserr = 0.0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_integration_qag(&f, a, b, 1e-14, 1e-11, kLimit, GSL_INTEG_GAUSS61,
                                           ws.get(), &value, &abserr);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS && !(abserr < 1e-10)) {
        std::ostringstream os;
        os << "ultraquantum quadrature failed (" << gsl_strerror(status) << ") for p = " << params.p
           << ", Q = " << params.Q << ", sigma_p^2 = " << params.sigma2 << ", error " << abserr;
        throw QuadratureError(os.str());
    }
    return value;
}

} // namespace

double uq_integral(double p, double Q, double sigma_p) {
    if (!std::isfinite(p) || !std::isfinite(Q) || !(sigma_p > 0.0))
        throw ContractError("uq_integral needs finite p, Q and sigma_p > 0");
    const double s2 = sigma_p * sigma_p;
    // exp(-s2 z^2 / 2) < 1e-20 beyond this point.
    const double z_max = std::sqrt(2.0 * 46.0 / s2);
    const double re = 2.0 * integrate({p, Q, s2, false}, 0.0, z_max);
    const double im = integrate({p, Q, s2, true}, -z_max, z_max);
    if (std::abs(im) > 1e-10) {
        std::ostringstream os;
        os << "ultraquantum integral has imaginary part " << im << " for p = " << p << ", Q = " << Q;
        throw QuadratureError(os.str());
    }
    return re;
}

namespace {

double uq_prefactor(double x, double sigma_x, double hbar) {
    return hbar / (std::pow(2.0 * std::numbers::pi, 1.5) * sigma_x)
           * std::exp(-x * x / (2.0 * sigma_x * sigma_x));
}

} // namespace

double uq_wigner(double x, double p, double t, double sigma_x, double sigma_p, double lambda,
                 double hbar) {
    if (!std::isfinite(x) || !std::isfinite(p) || !std::isfinite(t) || !(sigma_x > 0.0))
        throw ContractError("uq_wigner needs finite arguments and sigma_x > 0");
    const double Q = uq_phase_coefficient(x, t, lambda, hbar);
    return uq_prefactor(x, sigma_x, hbar) * uq_integral(p, Q, sigma_p);
}

double uq_zeta(double p, double Q, double sigma_p) {
    const double s2 = sigma_p * sigma_p;
    return 3.0 * Q * p - s2 * s2 / 4.0;
}

namespace {

double saddle_integral(double p, double sigma_p, double Q, bool envelope) {
    const double s2 = sigma_p * sigma_p;
    if (Q == 0.0) return std::sqrt(2.0 * std::numbers::pi) / sigma_p * std::exp(-p * p / (2.0 * s2));
    const double zeta = uq_zeta(p, Q, sigma_p);
    const double shift = std::exp(s2 * s2 * s2 / (108.0 * Q * Q) - p * s2 / (6.0 * Q));
    const double root_pi = std::sqrt(std::numbers::pi);
    if (zeta > 0.0) {
        const double amp = 2.0 * root_pi * std::pow(zeta, -0.25) * shift;
        if (envelope) return amp;
        return amp * std::cos(2.0 * std::pow(zeta, 1.5) / (27.0 * Q * Q) - std::numbers::pi / 4.0);
    }
    const double az = -zeta;
    return root_pi * std::pow(az, -0.25) * std::exp(-2.0 * std::pow(az, 1.5) / (27.0 * Q * Q)) * shift;
}

} // namespace

double uq_saddle(double x, double p, double sigma_x, double sigma_p, double Q, double hbar) {
    return uq_prefactor(x, sigma_x, hbar) * saddle_integral(p, sigma_p, Q, false);
}

double uq_saddle_envelope(double x, double p, double sigma_x, double sigma_p, double Q,
                          double hbar) {
    return uq_prefactor(x, sigma_x, hbar) * saddle_integral(p, sigma_p, Q, true);
}

namespace {

struct MarginalParams {
    double x, t, sigma_x, sigma_p, lambda, hbar;
};

double marginal_integrand(double p, void* raw) {
    const auto* m = static_cast<const MarginalParams*>(raw);
    return uq_wigner(m->x, p, m->t, m->sigma_x, m->sigma_p, m->lambda, m->hbar);
}

} // namespace

double uq_position_marginal(double x, double t, double sigma_x, double sigma_p, double lambda,
                            double hbar) {
    MarginalParams params{x, t, sigma_x, sigma_p, lambda, hbar};
    gsl_function f{&marginal_integrand, &params};
    constexpr std::size_t kLimit = 2000;
    IntegrationWorkspace ws(kLimit);
    double value = 0.0;
    double abserr = 0.0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    // |W| < exp(-50) of its peak outside [-p_max, p_max]
    const double s2 = sigma_p * sigma_p;
    const double Q = uq_phase_coefficient(x, t, lambda, hbar);
    const double p_max = 12.0 * sigma_p + 300.0 * std::abs(Q) / s2;
    const int status = gsl_integration_qag(&f, -p_max, p_max, 1e-13, 1e-10, kLimit, GSL_INTEG_GAUSS61,
                                           ws.get(), &value, &abserr);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS && !(abserr < 1e-9)) {
        std::ostringstream os;
        os << "marginal quadrature failed (" << gsl_strerror(status) << ") at x = " << x << ", t = " << t;
        throw QuadratureError(os.str());
    }
    return value;
}

double uq_infinite_mass(double x, double p, double t, const ModelSpec& model, double sigma_x,
                        double sigma_p) {
    if (model.kind != ModelKind::Quartic1D) throw ContractError("uq_infinite_mass needs a Quartic1D model");
    const double v_prime = -force(model, std::span<const double>(&x, 1), t).front();
    return uq_wigner(x, p + v_prime * t, t, sigma_x, sigma_p, model.lambda, model.hbar);
}

} // namespace phasewalk
