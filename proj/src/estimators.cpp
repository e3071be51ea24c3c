#include "phasewalk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "phasewalk/error.hpp"

namespace phasewalk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Delete-one-block jackknife of an arbitrary statistic. `statistic(b)` evaluates the estimator
// with block b removed; `statistic(n_blocks)` evaluates it on the full sample.
template <typename Statistic>
Estimate block_jackknife(std::size_t n_blocks, Statistic&& statistic, bool bias_corrected = false) {
    const double full = statistic(n_blocks);
    if (n_blocks < 2) return {full, kNaN};
    std::vector<double> deleted(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) deleted[b] = statistic(b);
    const double mean = std::accumulate(deleted.begin(), deleted.end(), 0.0) / n_blocks;
    double ss = 0.0;
    for (double d : deleted) ss += (d - mean) * (d - mean);
    const double nb = static_cast<double>(n_blocks);
    const double error = std::sqrt((nb - 1.0) / nb * ss);
    const double value = bias_corrected ? nb * full - (nb - 1.0) * mean : full;
    return {value, error};
}

bool sign_collapsed(double sign_sum, double count) {
    if (count <= 0.0) return true;
    return std::abs(sign_sum / count) < kSignCollapseThreshold / std::sqrt(count);
}

ObservableSeries make_series(const std::string& name, std::span<const double> times, double kappa,
                             std::size_t sample_size) {
    ObservableSeries s;
    s.observable = name;
    s.times.assign(times.begin(), times.end());
    s.values.assign(times.size(), kNaN);
    s.errors.assign(times.size(), kNaN);
    s.mean_sign.assign(times.size(), 1.0);
    s.collapsed.assign(times.size(), false);
    s.kappa = kappa;
    s.sample_size = sample_size;
    return s;
}

void check_tally_pair(const SignedTally& a, const SignedTally& b, std::size_t obs,
                      std::size_t n_times) {
    if (a.n_records() != b.n_records() || a.n_blocks() != b.n_blocks())
        throw ContractError("paired tallies must share records and block layout");
    if (obs >= a.n_observables() || obs >= b.n_observables())
        throw ContractError("observable index out of range");
    if (n_times != a.n_records()) throw ContractError("time grid does not match the tally");
}

} // namespace

std::size_t block_of(std::size_t walker_index, std::size_t n_walkers, std::size_t n_blocks) {
    if (n_blocks == 0 || n_walkers == 0) throw ContractError("block layout needs M, B > 0");
    const std::size_t size = std::max<std::size_t>(1, n_walkers / n_blocks);
    return std::min(walker_index / size, n_blocks - 1);
}

SignedTally::SignedTally(std::size_t n_records, std::size_t n_blocks, std::size_t n_observables)
    : n_records_(n_records), n_blocks_(n_blocks), n_obs_(n_observables),
      signed_(n_records * n_blocks * n_observables, 0.0), sign_(n_records * n_blocks, 0.0),
      count_(n_records * n_blocks, 0.0), negative_(n_records * n_blocks, 0.0),
      flips_(n_records * n_blocks, 0.0), kicks_(n_records * n_blocks, 0.0) {}

void SignedTally::add(std::size_t record, std::size_t block, int sign,
                      std::span<const double> values, std::size_t flips, std::size_t kicks) {
    const std::size_t rb = record * n_blocks_ + block;
    const double s = static_cast<double>(sign);
    for (std::size_t o = 0; o < n_obs_; ++o) signed_[rb * n_obs_ + o] += s * values[o];
    sign_[rb] += s;
    count_[rb] += 1.0;
    if (sign < 0) negative_[rb] += 1.0;
    flips_[rb] += static_cast<double>(flips);
    kicks_[rb] += static_cast<double>(kicks);
}

double SignedTally::total_signed(std::size_t record, std::size_t obs) const {
    double total = 0.0;
    for (std::size_t b = 0; b < n_blocks_; ++b) total += signed_sum(record, b, obs);
    return total;
}

double SignedTally::total_sign(std::size_t record) const {
    double total = 0.0;
    for (std::size_t b = 0; b < n_blocks_; ++b) total += sign_sum(record, b);
    return total;
}

double SignedTally::total_count(std::size_t record) const {
    double total = 0.0;
    for (std::size_t b = 0; b < n_blocks_; ++b) total += count(record, b);
    return total;
}

double SignedTally::total_negatives(std::size_t record) const {
    double total = 0.0;
    for (std::size_t b = 0; b < n_blocks_; ++b) total += negatives(record, b);
    return total;
}

double SignedTally::total_flips(std::size_t record) const {
    double total = 0.0;
    for (std::size_t b = 0; b < n_blocks_; ++b) total += flips(record, b);
    return total;
}

double signed_mean(std::span<const double> values, std::span<const int> signs) {
    if (values.size() != signs.size() || values.empty())
        throw ContractError("signed_mean needs equal-length nonempty arrays");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a) {
        num += signs[a] * values[a];
        den += signs[a];
    }
    if (den == 0.0) throw SignCollapse("sum of signs vanished: signed average undefined");
    return num / den;
}

Estimate jackknife(std::span<const double> values, std::span<const int> signs,
                   std::size_t n_blocks, bool bias_corrected) {
    if (values.size() != signs.size() || values.empty())
        throw ContractError("jackknife needs equal-length nonempty arrays");
    if (n_blocks < 2 || n_blocks > values.size())
        throw ContractError("jackknife needs 2 <= n_blocks <= sample size");
    std::vector<double> num(n_blocks, 0.0);
    std::vector<double> den(n_blocks, 0.0);
    for (std::size_t a = 0; a < values.size(); ++a) {
        const std::size_t b = block_of(a, values.size(), n_blocks);
        num[b] += signs[a] * values[a];
        den[b] += signs[a];
    }
    const double num_total = std::accumulate(num.begin(), num.end(), 0.0);
    const double den_total = std::accumulate(den.begin(), den.end(), 0.0);
    auto statistic = [&](std::size_t skip) {
        const double n = skip < n_blocks ? num_total - num[skip] : num_total;
        const double d = skip < n_blocks ? den_total - den[skip] : den_total;
        if (d == 0.0) throw SignCollapse("sum of signs vanished in a jackknife deletion");
        return n / d;
    };
    return block_jackknife(n_blocks, statistic, bias_corrected);
}

ObservableSeries series_from_tally(const SignedTally& tally, std::size_t obs,
                                   std::span<const double> times, const std::string& name,
                                   double kappa) {
    if (times.size() != tally.n_records()) throw ContractError("time grid does not match tally");
    if (obs >= tally.n_observables()) throw ContractError("observable index out of range");
    const std::size_t nb = tally.n_blocks();
    const std::size_t m = tally.n_records() ? static_cast<std::size_t>(tally.total_count(0)) : 0;
    ObservableSeries s = make_series(name, times, kappa, m);
    for (std::size_t r = 0; r < tally.n_records(); ++r) {
        const double num_total = tally.total_signed(r, obs);
        const double den_total = tally.total_sign(r);
        const double count = tally.total_count(r);
        s.mean_sign[r] = count > 0.0 ? den_total / count : 0.0;
        if (sign_collapsed(den_total, count)) {
            s.collapsed[r] = true;
            continue;
        }
        auto statistic = [&](std::size_t skip) {
            const double n = skip < nb ? num_total - tally.signed_sum(r, skip, obs) : num_total;
            const double d = skip < nb ? den_total - tally.sign_sum(r, skip) : den_total;
            return n / d;
        };
        const Estimate e = block_jackknife(nb, statistic);
        s.values[r] = e.value;
        s.errors[r] = e.error;
    }
    return s;
}

ObservableSeries lqc_estimate(const ObservableSeries& classical, const ObservableSeries& quantum,
                              double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ContractError("LQC needs kappa in (0, 1]");
    if (classical.times != quantum.times)
        throw ContractError("LQC needs classical and kappa series on the same time grid");
    ObservableSeries out = make_series(quantum.observable + "_lqc", quantum.times, kappa,
                                       quantum.sample_size);
    out.mean_sign = quantum.mean_sign;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.collapsed[i] = classical.collapsed[i] || quantum.collapsed[i];
        const double oc = classical.values[i];
        const double ok = quantum.values[i];
        out.values[i] = oc + (ok - oc) / kappa;
        const double ec = classical.errors[i] * (1.0 - 1.0 / kappa);
        const double ek = quantum.errors[i] / kappa;
        out.errors[i] = std::sqrt(ec * ec + ek * ek);
    }
    return out;
}

namespace {

ObservableSeries paired_combination(const SignedTally& classical, const SignedTally& quantum,
                                    std::size_t obs, std::span<const double> times,
                                    const std::string& name, double kappa, double weight_c,
                                    double weight_q) {
    check_tally_pair(classical, quantum, obs, times.size());
    const std::size_t nb = classical.n_blocks();
    ObservableSeries s = make_series(name, times, kappa,
                                     static_cast<std::size_t>(quantum.total_count(0)));
    for (std::size_t r = 0; r < classical.n_records(); ++r) {
        const double nc = classical.total_signed(r, obs);
        const double dc = classical.total_sign(r);
        const double nq = quantum.total_signed(r, obs);
        const double dq = quantum.total_sign(r);
        s.mean_sign[r] = dq / quantum.total_count(r);
        if (sign_collapsed(dc, classical.total_count(r))
            || sign_collapsed(dq, quantum.total_count(r))) {
            s.collapsed[r] = true;
            continue;
        }
        auto statistic = [&](std::size_t skip) {
            const bool del = skip < nb;
            const double oc = (nc - (del ? classical.signed_sum(r, skip, obs) : 0.0))
                              / (dc - (del ? classical.sign_sum(r, skip) : 0.0));
            const double oq = (nq - (del ? quantum.signed_sum(r, skip, obs) : 0.0))
                              / (dq - (del ? quantum.sign_sum(r, skip) : 0.0));
            return weight_c * oc + weight_q * oq;
        };
        const Estimate e = block_jackknife(nb, statistic);
        s.values[r] = e.value;
        s.errors[r] = e.error;
    }
    return s;
}

} // namespace

ObservableSeries lqc_estimate_paired(const SignedTally& classical, const SignedTally& quantum,
                                     std::size_t obs, std::span<const double> times,
                                     const std::string& name, double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ContractError("LQC needs kappa in (0, 1]");
    return paired_combination(classical, quantum, obs, times, name, kappa, 1.0 - 1.0 / kappa,
                              1.0 / kappa);
}

ObservableSeries paired_difference(const SignedTally& classical, const SignedTally& quantum,
                                   std::size_t obs, std::span<const double> times,
                                   const std::string& name, double kappa) {
    return paired_combination(classical, quantum, obs, times, name, kappa, -1.0, 1.0);
}

double KappaFit::evaluate(double kappa) const {
    double value = anchor;
    double power = 1.0;
    for (double c : coefficients) {
        power *= kappa;
        value += c * power;
    }
    return value;
}

KappaFit kappa_scan_fit(std::span<const double> kappa_values, std::span<const double> values,
                        std::span<const double> errors, int degree) {
    if (kappa_values.size() != values.size() || values.size() != errors.size())
        throw ContractError("kappa scan arrays must have equal lengths");
    if (degree < 1) throw ContractError("fit degree must be >= 1");

    std::ptrdiff_t anchor_index = -1;
    std::vector<std::size_t> points;
    for (std::size_t i = 0; i < kappa_values.size(); ++i) {
        if (kappa_values[i] == 0.0)
            anchor_index = static_cast<std::ptrdiff_t>(i);
        else
            points.push_back(i);
    }
    if (anchor_index < 0) throw ContractError("kappa scan needs the kappa = 0 classical anchor");
    std::vector<double> distinct;
    for (std::size_t i : points) distinct.push_back(kappa_values[i]);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < static_cast<std::size_t>(degree))
        throw SolverError("kappa scan is underdetermined: need degree + 1 distinct kappa values");

    const bool weighted = std::all_of(points.begin(), points.end(),
                                      [&](std::size_t i) { return errors[i] > 0.0; });
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(n, degree);
    Eigen::VectorXd target(n);
    Eigen::VectorXd w(n);
    const double anchor = values[anchor_index];
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::size_t i = points[k];
        double power = 1.0;
        for (int d = 0; d < degree; ++d) {
            power *= kappa_values[i];
            design(k, d) = power;
        }
        target(k) = values[i] - anchor;
        w(k) = weighted ? 1.0 / (errors[i] * errors[i]) : 1.0;
    }
    const Eigen::MatrixXd normal = design.transpose() * w.asDiagonal() * design;
    const Eigen::VectorXd rhs = design.transpose() * w.asDiagonal() * target;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14)
        throw SolverError("kappa scan normal equations are singular");
    const Eigen::VectorXd coeffs = ldlt.solve(rhs);
    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(degree, degree));

    KappaFit fit;
    fit.degree = degree;
    fit.anchor = anchor;
    fit.coefficients.assign(coeffs.data(), coeffs.data() + degree);
    const Eigen::VectorXd resid = target - design * coeffs;
    fit.chi2 = resid.dot(w.asDiagonal() * resid);
    fit.dof = points.size() - static_cast<std::size_t>(degree);
    if (!weighted && fit.dof > 0) cov *= fit.chi2 / static_cast<double>(fit.dof);
    fit.covariance.assign(cov.data(), cov.data() + cov.size());
    fit.extrapolated = fit.evaluate(1.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(degree);
    double var = ones.dot(cov * ones);
    if (errors[anchor_index] > 0.0) var += errors[anchor_index] * errors[anchor_index];
    fit.extrapolated_error = std::sqrt(std::max(var, 0.0));
    return fit;
}

std::vector<SignDiagnostic> sign_diagnostics(const SignedTally& tally,
                                             std::span<const double> times,
                                             std::span<const std::size_t> steps, double law_norm) {
    if (times.size() != tally.n_records() || steps.size() != tally.n_records())
        throw ContractError("sign diagnostics: grids do not match the tally");
    std::vector<SignDiagnostic> out(tally.n_records());
    for (std::size_t r = 0; r < tally.n_records(); ++r) {
        const double count = tally.total_count(r);
        auto& d = out[r];
        d.time = times[r];
        d.step = steps[r];
        d.mean_sign = tally.total_sign(r) / count;
        d.mean_sign_error = std::sqrt(std::max(0.0, 1.0 - d.mean_sign * d.mean_sign) / count);
        d.negative_fraction = tally.total_negatives(r) / count;
        d.predicted_mean_sign = std::pow(law_norm, -static_cast<double>(steps[r]));
        d.predicted_negative_fraction = 0.5 * (1.0 - d.predicted_mean_sign);
        d.signal_to_noise = d.mean_sign * std::sqrt(count);
    }
    return out;
}

double fit_negative_fraction_rate(std::span<const SignDiagnostic> history, double lambda,
                                  double hbar, double epsilon) {
    const double scale = lambda * hbar * hbar / (epsilon * epsilon * epsilon);
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& d : history) {
        const double remaining = 1.0 - 2.0 * d.negative_fraction;
        if (d.time <= 0.0 || remaining <= 0.0) continue;
        if (d.signal_to_noise < kSignCollapseThreshold) continue;
        const double x = d.time * scale;
        sxy += x * -std::log(remaining);
        sxx += x * x;
    }
    if (sxx == 0.0) throw ContractError("no usable points to fit the negative-sign growth rate");
    return sxy / sxx;
}

} // namespace phasewalk
