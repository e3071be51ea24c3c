#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace phasewalk {

enum class ModelKind { Quartic1D, TanhQuench1D, LatticeChain };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Hamiltonian family with quartic self-interaction.
///
///  - Quartic1D:     V(x)   = mu2 x^2 / 2 + lambda x^4 / 24
///  - TanhQuench1D:  V(x,t) = -mu2 tanh(alpha t) x^2 / 2 + lambda x^4 / 24
///  - LatticeChain:  periodic chain of n_sites fields with spacing a, stored in canonical
///    variables q_n = sqrt(a) phi_n, p_n = sqrt(a) pi_n. In those variables the mass is 1,
///    the neighbour coupling is 1/a^2 and the quartic coupling is lambda / a.
///
/// `lambda` is always the coupling as written in the field Hamiltonian; use
/// `effective_lambda()` for the coefficient that multiplies q^4/24 in the dynamics.
/// `mu2` of a LatticeChain is the post-quench value used for t >= 0.
struct ModelSpec {
    ModelKind kind = ModelKind::Quartic1D;
    double m = 1.0;
    double mu2 = 0.0;
    double lambda = 0.0;
    double hbar = 1.0;
    double alpha_rate = 0.0;
    std::size_t n_sites = 1;
    double spacing = 1.0;

    static ModelSpec quartic(double mu2, double lambda, double m = 1.0, double hbar = 1.0);
    static ModelSpec tanh_quench(double mu2, double alpha_rate, double lambda, double m = 1.0,
                                 double hbar = 1.0);
    static ModelSpec lattice_chain(std::size_t n_sites, double spacing, double mu2, double lambda,
                                   double hbar = 1.0);

    /// Degrees of freedom D.
    std::size_t dimension() const { return kind == ModelKind::LatticeChain ? n_sites : 1; }

    /// Coefficient c of c q^4 / 24 in canonical variables.
    double effective_lambda() const;

    /// Effective quadratic coefficient at time t (the tanh ramp is folded in here).
    double mu2_at(double t) const;

    /// Mass entering the kinetic term in the canonical variables.
    double kinetic_mass() const { return kind == ModelKind::LatticeChain ? 1.0 : m; }

    /// Largest linearised frequency of the quadratic part at time t (0 if nothing is stable).
    double max_frequency(double t = 0.0) const;

    /// Throws ContractError when an invariant is broken.
    void validate() const;
};

struct PhasePoint {
    std::vector<double> x;
    std::vector<double> p;
    double t = 0.0;

    PhasePoint() = default;
    explicit PhasePoint(std::size_t dim) : x(dim, 0.0), p(dim, 0.0) {}
    std::size_t dimension() const { return x.size(); }
};

double potential_energy(const ModelSpec& model, std::span<const double> x, double t = 0.0);

/// Writes -dV/dx_n into `out`.
void force(const ModelSpec& model, std::span<const double> x, double t, std::span<double> out);
std::vector<double> force(const ModelSpec& model, std::span<const double> x, double t = 0.0);

/// Signed real cube root per coordinate. The kick applied to coordinate n is
/// eta * cbrt(x_n) * xi_n, so the third cumulant of the kick is proportional to x_n.
std::vector<double> cubic_kick_coefficient(const ModelSpec& model, std::span<const double> x);

/// r = sqrt(m) mu^3 / (lambda sigma_x sigma_p). Quartic1D only.
double dimensionless_r(const ModelSpec& model, double sigma_x, double sigma_p);

/// s = sigma_p mu / (sigma_x^3 lambda sqrt(m)). Quartic1D only.
double dimensionless_s(const ModelSpec& model, double sigma_x, double sigma_p);

} // namespace phasewalk
