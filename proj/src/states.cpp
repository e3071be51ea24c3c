#include "phasewalk/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "phasewalk/error.hpp"

namespace phasewalk {

GaussianStateSpec GaussianStateSpec::centred_at(double mean_x, double mean_p) const {
    GaussianStateSpec out = *this;
    out.mean_x_ = mean_x;
    out.mean_p_ = mean_p;
    return out;
}

double GaussianStateSpec::density(double x, double p) const {
    const double ux = (x - mean_x_) / sigma_x_;
    const double up = (p - mean_p_) / sigma_p_;
    return std::exp(-0.5 * (ux * ux + up * up)) / (2.0 * std::numbers::pi * sigma_x_ * sigma_p_);
}

GaussianStateSpec make_pure_gaussian(double sigma_x, double hbar) {
    if (!(sigma_x > 0.0) || !std::isfinite(sigma_x))
        throw DomainError("pure Gaussian needs a positive finite width");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    GaussianStateSpec spec;
    spec.sigma_x_ = sigma_x;
    spec.sigma_p_ = hbar / (2.0 * sigma_x);
    spec.hbar_ = hbar;
    spec.purity_ = Purity::Pure;
    return spec;
}

GaussianStateSpec make_thermal_gaussian(double omega, double beta, double hbar, double m) {
    if (!(omega > 0.0) || !(beta > 0.0) || !(hbar > 0.0) || !(m > 0.0))
        throw DomainError("thermal Gaussian needs omega, beta, hbar, m > 0");
    // sigma_x sigma_p = hbar / (2 tanh(hbar omega beta / 2)) and sigma_p = m omega sigma_x.
    const double product = hbar / (2.0 * std::tanh(0.5 * hbar * omega * beta));
    GaussianStateSpec spec;
    spec.sigma_x_ = std::sqrt(product / (m * omega));
    spec.sigma_p_ = m * omega * spec.sigma_x_;
    spec.hbar_ = hbar;
    spec.purity_ = Purity::Thermal;
    spec.beta_ = beta;
    spec.omega_ = omega;
    return spec;
}

SignedWalker sample_walker(const GaussianStateSpec& spec, std::size_t dimension, Stream& stream) {
    SignedWalker walker;
    walker.point = PhasePoint(dimension);
    for (std::size_t i = 0; i < dimension; ++i) {
        walker.point.x[i] = spec.mean_x() + spec.sigma_x() * stream.normal();
        walker.point.p[i] = spec.mean_p() + spec.sigma_p() * stream.normal();
    }
    walker.sign = +1;
    return walker;
}

LatticeVacuum::LatticeVacuum(std::size_t n_sites, double spacing, double mu2_pre, double hbar)
    : n_sites_(n_sites), spacing_(spacing), mu2_pre_(mu2_pre), hbar_(hbar) {
    if (n_sites < 2 || n_sites % 2 != 0) throw ContractError("lattice size must be even and >= 2");
    if (!(spacing > 0.0)) throw ContractError("lattice spacing must be positive");
    if (!(mu2_pre > 0.0)) throw DomainError("free vacuum needs mu2 > 0 before the quench");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    omega_.resize(n_sites / 2 + 1);
    for (std::size_t j = 0; j < omega_.size(); ++j) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(j) / n_sites);
        omega_[j] = std::sqrt(4.0 * s * s / (spacing * spacing) + mu2_pre);
    }
    inverse_ = std::make_shared<const detail::RealBackwardFft>(n_sites);
}

GaussianStateSpec LatticeVacuum::mode_spec(std::size_t j) const {
    return make_pure_gaussian(std::sqrt(hbar_ / (2.0 * omega_.at(j))), hbar_);
}

double LatticeVacuum::expected_phi2() const {
    const std::size_t half = n_sites_ / 2;
    double total = 0.0;
    for (std::size_t j = 0; j <= half; ++j) {
        const double weight = (j == 0 || j == half) ? 1.0 : 2.0;
        total += weight * hbar_ / (2.0 * omega_[j]);
    }
    return total;
}

namespace {

// Half spectrum j = 0..N/2 of a real Gaussian field with <|z_j|^2> = variance[j].
void draw_half_spectrum(const std::vector<double>& variance, Stream& stream,
                        std::vector<std::complex<double>>& modes) {
    const std::size_t half = variance.size() - 1;
    modes.resize(variance.size());
    for (std::size_t j = 0; j <= half; ++j) {
        const double sd = std::sqrt(variance[j]);
        if (j == 0 || j == half) {
            modes[j] = {sd * stream.normal(), 0.0};
        } else {
            const double re = stream.normal();
            const double im = stream.normal();
            modes[j] = {sd * re * (1.0 / std::numbers::sqrt2), sd * im * (1.0 / std::numbers::sqrt2)};
        }
    }
}

} // namespace

std::vector<std::complex<double>> LatticeVacuum::sample_position_modes(Stream& stream) const {
    std::vector<double> var(omega_.size());
    for (std::size_t j = 0; j < var.size(); ++j) var[j] = hbar_ / (2.0 * omega_[j]);
    std::vector<std::complex<double>> modes;
    draw_half_spectrum(var, stream, modes);
    return modes;
}

SignedWalker LatticeVacuum::sample(Stream& stream) const {
    const std::size_t n = n_sites_;
    std::vector<double> var_q(omega_.size());
    std::vector<double> var_p(omega_.size());
    for (std::size_t j = 0; j < omega_.size(); ++j) {
        var_q[j] = hbar_ / (2.0 * omega_[j]);
        var_p[j] = hbar_ * omega_[j] / 2.0;
    }
    SignedWalker walker;
    walker.point = PhasePoint(n);
    std::vector<std::complex<double>> modes;
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));

    draw_half_spectrum(var_q, stream, modes);
    inverse_->execute(modes, walker.point.x);
    draw_half_spectrum(var_p, stream, modes);
    inverse_->execute(modes, walker.point.p);
    for (std::size_t i = 0; i < n; ++i) {
        walker.point.x[i] *= norm;
        walker.point.p[i] *= norm;
    }
    walker.sign = +1;
    return walker;
}

LatticeVacuum lattice_vacuum_spec(const ModelSpec& model, double mu2_pre) {
    if (model.kind != ModelKind::LatticeChain)
        throw ContractError("lattice vacuum requires a LatticeChain model");
    if (!(mu2_pre > 0.0)) throw DomainError("vacuum undefined for mu2 <= 0");
    return LatticeVacuum(model.n_sites, model.spacing, mu2_pre, model.hbar);
}

WignerGrid wigner_from_wavefunction(const GridWavefunction& psi, double hbar) {
    if (psi.ny != 1) throw ContractError("Wigner transform is implemented for 1D wavefunctions");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    const std::size_t g = psi.nx;
    if (g < 2 || psi.amplitudes.size() != g) throw ContractError("malformed grid wavefunction");

    const std::size_t m = 2 * g;
    const double dx = psi.dx;
    // The offset is y = 2 k dx, so the momentum period is pi hbar / dx.
    const double dp = std::numbers::pi * hbar / (static_cast<double>(m) * dx);

    WignerGrid out;
    out.norm_warning = std::abs(psi.norm_squared() - 1.0) > 1e-6;
    out.x.resize(g);
    for (std::size_t i = 0; i < g; ++i) out.x[i] = psi.coordinate(i);
    out.p.resize(m);
    for (std::size_t k = 0; k < m; ++k)
        out.p[k] = (static_cast<double>(k) - static_cast<double>(m / 2)) * dp;
    out.values.assign(g * m, 0.0);

    detail::ComplexFft fft(m, 0, FFTW_BACKWARD);
    std::vector<std::complex<double>> buffer(m);
    const double prefactor = 2.0 * dx / (2.0 * std::numbers::pi);
    const auto& a = psi.amplitudes;

    for (std::size_t i = 0; i < g; ++i) {
        std::fill(buffer.begin(), buffer.end(), std::complex<double>{});
        const std::size_t reach = std::min(i, g - 1 - i);
        for (std::size_t k = 0; k <= reach; ++k) {
            const auto value = std::conj(a[i + k]) * a[i - k];
            buffer[k] = value;
            if (k > 0) buffer[m - k] = std::conj(value);
        }
        fft.execute(buffer);
        for (std::size_t k = 0; k < m; ++k) {
            // Output index k carries frequency k (mod m); shift so p runs from -m/2.
            const std::size_t src = (k + m / 2) % m;
            out.values[i * m + k] = prefactor * buffer[src].real();
            out.max_imaginary = std::max(out.max_imaginary, std::abs(prefactor * buffer[src].imag()));
        }
    }
    return out;
}

} // namespace phasewalk
