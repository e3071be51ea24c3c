#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace phasewalk {

/// Contiguous walker blocks for jackknife: block b holds walkers [b s, (b + 1) s) with
/// s = M / B, the remainder folded into the last block.
std::size_t block_of(std::size_t walker_index, std::size_t n_walkers, std::size_t n_blocks);

/// Per (record, block) sums of a signed ensemble: sum sigma O for each observable, sum sigma,
/// walker count, negative-sign count, accumulated sign flips and kicks.
///
/// Block sums are all the delete-one-block jackknife needs, so ensembles of any size can be
/// analysed without keeping per-walker arrays.
class SignedTally {
public:
    SignedTally() = default;
    SignedTally(std::size_t n_records, std::size_t n_blocks, std::size_t n_observables);

    std::size_t n_records() const { return n_records_; }
    std::size_t n_blocks() const { return n_blocks_; }
    std::size_t n_observables() const { return n_obs_; }

    void add(std::size_t record, std::size_t block, int sign, std::span<const double> values,
             std::size_t flips, std::size_t kicks);

    double signed_sum(std::size_t record, std::size_t block, std::size_t obs) const {
        return signed_[(record * n_blocks_ + block) * n_obs_ + obs];
    }
    double sign_sum(std::size_t record, std::size_t block) const { return at(sign_, record, block); }
    double count(std::size_t record, std::size_t block) const { return at(count_, record, block); }
    double negatives(std::size_t record, std::size_t block) const {
        return at(negative_, record, block);
    }
    double flips(std::size_t record, std::size_t block) const { return at(flips_, record, block); }
    double kicks(std::size_t record, std::size_t block) const { return at(kicks_, record, block); }

    double total_signed(std::size_t record, std::size_t obs) const;
    double total_sign(std::size_t record) const;
    double total_count(std::size_t record) const;
    double total_negatives(std::size_t record) const;
    double total_flips(std::size_t record) const;

    /// Exact equality of every stored sum (bit-level determinism checks).
    bool operator==(const SignedTally& other) const = default;

private:
    double at(const std::vector<double>& v, std::size_t r, std::size_t b) const {
        return v[r * n_blocks_ + b];
    }

    std::size_t n_records_ = 0;
    std::size_t n_blocks_ = 0;
    std::size_t n_obs_ = 0;
    std::vector<double> signed_;
    std::vector<double> sign_;
    std::vector<double> count_;
    std::vector<double> negative_;
    std::vector<double> flips_;
    std::vector<double> kicks_;
};

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// sum sigma_a O_a / sum sigma_a. Throws SignCollapse when the sign sum is zero.
double signed_mean(std::span<const double> values, std::span<const int> signs);

/// Delete-one-block jackknife of the signed ratio estimator on per-walker arrays.
/// The central value is the full-sample ratio unless `bias_corrected`.
Estimate jackknife(std::span<const double> values, std::span<const int> signs,
                   std::size_t n_blocks, bool bias_corrected = false);

/// Default block count for jackknife errors.
inline constexpr std::size_t kDefaultJackknifeBlocks = 50;

/// |<sigma>| below this many standard errors of a +-1 variable means the signal is lost.
inline constexpr double kSignCollapseThreshold = 5.0;

struct ObservableSeries {
    std::string observable;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> errors;
    std::vector<double> mean_sign;
    std::vector<bool> collapsed;
    double kappa = 0.0;
    std::size_t sample_size = 0;
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return times.size(); }
};

/// Signed mean and jackknife error at every record of one observable. Points where
/// |<sigma>| < kSignCollapseThreshold / sqrt(M) are marked collapsed and carry NaN values.
ObservableSeries series_from_tally(const SignedTally& tally, std::size_t obs,
                                   std::span<const double> times, const std::string& name,
                                   double kappa);

/// O_clas + (O_kappa - O_clas) / kappa on matching grids, errors added in quadrature.
ObservableSeries lqc_estimate(const ObservableSeries& classical, const ObservableSeries& quantum,
                              double kappa);

/// Same combination, but with a joint delete-one-block jackknife over two tallies that share
/// walkers (common initial conditions), so correlated fluctuations cancel in the error.
ObservableSeries lqc_estimate_paired(const SignedTally& classical, const SignedTally& quantum,
                                     std::size_t obs, std::span<const double> times,
                                     const std::string& name, double kappa);

/// Paired jackknife of O_kappa - O_clas (the raw quantum shift at this kappa).
ObservableSeries paired_difference(const SignedTally& classical, const SignedTally& quantum,
                                   std::size_t obs, std::span<const double> times,
                                   const std::string& name, double kappa);

struct KappaFit {
    int degree = 1;
    double anchor = 0.0;               // value at kappa = 0, held fixed
    std::vector<double> coefficients;  // c_1 .. c_degree of sum c_d kappa^d
    std::vector<double> covariance;    // degree x degree, row-major
    double chi2 = 0.0;
    std::size_t dof = 0;
    double extrapolated = 0.0;  // value at kappa = 1
    double extrapolated_error = 0.0;

    double chi2_per_dof() const { return dof > 0 ? chi2 / static_cast<double>(dof) : 0.0; }
    double evaluate(double kappa) const;
};

/// Weighted least squares O(kappa) = O(0) + sum_{d=1}^{degree} c_d kappa^d through the
/// kappa = 0 anchor. Errors of the kappa > 0 points are taken relative to the anchor (for
/// paired runs, the error of O_kappa - O_clas); the anchor error is added in quadrature to
/// the extrapolation.
KappaFit kappa_scan_fit(std::span<const double> kappa_values, std::span<const double> values,
                        std::span<const double> errors, int degree);

struct SignDiagnostic {
    double time = 0.0;
    std::size_t step = 0;
    double mean_sign = 1.0;
    double mean_sign_error = 0.0;
    double negative_fraction = 0.0;
    double predicted_mean_sign = 1.0;
    double predicted_negative_fraction = 0.0;
    double signal_to_noise = 0.0;  // <sigma> sqrt(M)
};

std::vector<SignDiagnostic> sign_diagnostics(const SignedTally& tally,
                                             std::span<const double> times,
                                             std::span<const std::size_t> steps, double law_norm);

/// Least-squares fit of A in P_- = (1 - exp(-A t lambda hbar^2 / eps^3)) / 2, using
/// -ln(1 - 2 P_-) = A t lambda hbar^2 / eps^3 through the origin.
double fit_negative_fraction_rate(std::span<const SignDiagnostic> history, double lambda,
                                  double hbar, double epsilon);

} // namespace phasewalk
