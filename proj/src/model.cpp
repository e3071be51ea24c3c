#include "phasewalk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phasewalk/error.hpp"

namespace phasewalk {

namespace {

void check_dimension(const ModelSpec& model, std::size_t got) {
    if (got != model.dimension()) {
        throw ContractError("coordinate vector has length " + std::to_string(got) + ", model "
                            + to_string(model.kind) + " expects "
                            + std::to_string(model.dimension()));
    }
}

} // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::Quartic1D: return "quartic";
    case ModelKind::TanhQuench1D: return "tanh";
    case ModelKind::LatticeChain: return "lattice";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "quartic") return ModelKind::Quartic1D;
    if (name == "tanh") return ModelKind::TanhQuench1D;
    if (name == "lattice") return ModelKind::LatticeChain;
    throw ContractError("unknown model kind '" + name + "' (expected quartic, tanh or lattice)");
}

ModelSpec ModelSpec::quartic(double mu2, double lambda, double m, double hbar) {
    ModelSpec spec;
    spec.kind = ModelKind::Quartic1D;
    spec.mu2 = mu2;
    spec.lambda = lambda;
    spec.m = m;
    spec.hbar = hbar;
    spec.validate();
    return spec;
}

ModelSpec ModelSpec::tanh_quench(double mu2, double alpha_rate, double lambda, double m,
                                 double hbar) {
    ModelSpec spec;
    spec.kind = ModelKind::TanhQuench1D;
    spec.mu2 = mu2;
    spec.alpha_rate = alpha_rate;
    spec.lambda = lambda;
    spec.m = m;
    spec.hbar = hbar;
    spec.validate();
    return spec;
}

ModelSpec ModelSpec::lattice_chain(std::size_t n_sites, double spacing, double mu2, double lambda,
                                   double hbar) {
    ModelSpec spec;
    spec.kind = ModelKind::LatticeChain;
    spec.n_sites = n_sites;
    spec.spacing = spacing;
    spec.mu2 = mu2;
    spec.lambda = lambda;
    spec.hbar = hbar;
    spec.validate();
    return spec;
}

double ModelSpec::effective_lambda() const {
    return kind == ModelKind::LatticeChain ? lambda / spacing : lambda;
}

double ModelSpec::mu2_at(double t) const {
    if (kind == ModelKind::TanhQuench1D) return -mu2 * std::tanh(alpha_rate * t);
    return mu2;
}

double ModelSpec::max_frequency(double t) const {
    double w2 = mu2_at(t) / kinetic_mass();
    if (kind == ModelKind::LatticeChain) w2 += 4.0 / (spacing * spacing);
    return w2 > 0.0 ? std::sqrt(w2) : 0.0;
}

void ModelSpec::validate() const {
    if (!(m > 0.0)) throw ContractError("model mass must be positive");
    if (!(hbar > 0.0)) throw ContractError("hbar must be positive");
    if (!(lambda >= 0.0)) throw ContractError("quartic coupling lambda must be >= 0");
    if (!std::isfinite(mu2)) throw ContractError("mu2 must be finite");
    if (kind == ModelKind::TanhQuench1D && !std::isfinite(alpha_rate))
        throw ContractError("tanh ramp rate must be finite");
    if (kind == ModelKind::LatticeChain) {
        if (!(spacing > 0.0)) throw ContractError("lattice spacing must be positive");
        if (n_sites < 2 || n_sites % 2 != 0)
            throw ContractError("lattice site count must be even and >= 2");
    }
}

double potential_energy(const ModelSpec& model, std::span<const double> x, double t) {
    check_dimension(model, x.size());
    const double mu2 = model.mu2_at(t);
    const double quartic = model.effective_lambda() / 24.0;
    double energy = 0.0;
    for (double xi : x) {
        const double x2 = xi * xi;
        energy += 0.5 * mu2 * x2 + quartic * x2 * x2;
    }
    if (model.kind == ModelKind::LatticeChain) {
        const std::size_t n = x.size();
        const double hop = 0.5 / (model.spacing * model.spacing);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[(i + 1) % n] - x[i];
            energy += hop * d * d;
        }
    }
    return energy;
}

void force(const ModelSpec& model, std::span<const double> x, double t, std::span<double> out) {
    check_dimension(model, x.size());
    if (out.size() != x.size()) throw ContractError("force output buffer has the wrong length");
    const double mu2 = model.mu2_at(t);
    const double cubic = model.effective_lambda() / 6.0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) out[i] = -(mu2 + cubic * x[i] * x[i]) * x[i];
    if (model.kind == ModelKind::LatticeChain) {
        const double inv_a2 = 1.0 / (model.spacing * model.spacing);
        for (std::size_t i = 0; i < n; ++i) {
            const double left = x[(i + n - 1) % n];
            const double right = x[(i + 1) % n];
            out[i] += inv_a2 * (left + right - 2.0 * x[i]);
        }
    }
}

std::vector<double> force(const ModelSpec& model, std::span<const double> x, double t) {
    std::vector<double> out(x.size());
    force(model, x, t, out);
    return out;
}

std::vector<double> cubic_kick_coefficient(const ModelSpec& model, std::span<const double> x) {
    check_dimension(model, x.size());
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::cbrt(v); });
    return out;
}

double dimensionless_r(const ModelSpec& model, double sigma_x, double sigma_p) {
    if (model.kind != ModelKind::Quartic1D) throw ContractError("r is defined for Quartic1D only");
    if (!(sigma_x > 0.0) || !(sigma_p > 0.0) || !(model.mu2 > 0.0))
        throw DomainError("r needs positive widths and mu2 > 0");
    const double denom = model.lambda * sigma_x * sigma_p;
    if (denom == 0.0) throw DomainError("r: zero denominator (lambda = 0)");
    const double mu = std::sqrt(model.mu2);
    return std::sqrt(model.m) * mu * mu * mu / denom;
}

double dimensionless_s(const ModelSpec& model, double sigma_x, double sigma_p) {
    if (model.kind != ModelKind::Quartic1D) throw ContractError("s is defined for Quartic1D only");
    if (!(sigma_x > 0.0) || !(sigma_p > 0.0) || !(model.mu2 > 0.0))
        throw DomainError("s needs positive widths and mu2 > 0");
    const double denom = sigma_x * sigma_x * sigma_x * model.lambda * std::sqrt(model.m);
    if (denom == 0.0) throw DomainError("s: zero denominator (lambda = 0)");
    return sigma_p * std::sqrt(model.mu2) / denom;
}

} // namespace phasewalk
