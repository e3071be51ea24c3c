#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phasewalk/error.hpp"
#include "phasewalk/estimators.hpp"
#include "phasewalk/model.hpp"
#include "phasewalk/dynamics.hpp"

namespace phasewalk {

std::string library_version();

enum class ExperimentKind { Classical, SignedRun, KappaScan, Lqc, SchrodingerOracle, Quench, UqAnalysis };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Manifest field that failed to parse or validate.
class ManifestError : public ContractError {
public:
    ManifestError(const std::string& what, std::string field, int line)
        : ContractError(what), field_(std::move(field)), line_(line) {}
    const std::string& field() const { return field_; }
    int line() const { return line_; }  // 0 when the field is absent from the file

private:
    std::string field_;
    int line_;
};

/// Fully resolved experiment description. Every field has a default; `emit` writes all of
/// them back, so parse(emit(m)) == m.
struct ExperimentManifest {
    ExperimentKind kind = ExperimentKind::Lqc;
    std::string name = "experiment";

    // [model]
    ModelKind model = ModelKind::Quartic1D;
    double mass = 1.0;
    double mu2 = 0.5;
    double lambda = 0.45;
    double hbar = 1.0;
    double alpha = 0.2;
    std::size_t n_sites = 2;
    double spacing = 0.8;
    double mu2_pre = 0.5;

    // [state]
    std::string state = "pure-gaussian";  // pure-gaussian | thermal | lattice-vacuum
    double sigma_x = 0.45;
    double beta = 1.0;
    double omega = 1.0;

    // [noise]
    int level = 1;
    double epsilon = 0.8;
    std::vector<double> pattern;  // empty: default for the level
    std::string xi = "two-atom";

    // [evolution]
    double dt = 0.01;
    double t_final = 1.0;
    std::size_t record_stride = 10;
    double kappa = 1.0 / 6.0;
    std::vector<double> kappas{0.0, 0.1, 0.125, 1.0 / 6.0, 0.2, 0.25};
    std::string integrator = "symplectic-euler";
    std::vector<std::string> observables{"Q2"};

    // [sampling]
    std::size_t walkers = 100000;
    std::size_t long_run_walkers = 8000000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::size_t blocks = kDefaultJackknifeBlocks;

    // [oracle]
    bool oracle = true;
    std::size_t oracle_points = 1024;
    double oracle_half_width = 12.0;
    double oracle_dt = 1e-3;

    // [analysis]
    int fit_degree = 1;
    double fit_kappa_max = 1.0;  // kappa-scan points above this are excluded from the fit

    // [uq]
    double uq_x = 1.0;
    double uq_t = 1.0;
    double uq_p_min = -6.0;
    double uq_p_max = 10.0;
    std::size_t uq_p_points = 65;

    // [output]
    std::string output_dir = "phasewalk_out";
    bool snapshots = false;

    bool operator==(const ExperimentManifest&) const = default;

    ModelSpec model_spec() const;
    NoiseSettings noise_settings() const;
};

ExperimentManifest parse_manifest(const std::string& text);
ExperimentManifest load_manifest(const std::filesystem::path& path);
std::string emit_manifest(const ExperimentManifest& manifest);

struct ValidationItem {
    enum class Severity { Info, Warning, Error };
    Severity severity = Severity::Info;
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationItem> items;

    bool ok() const;
    std::size_t count(ValidationItem::Severity s) const;
    std::string format() const;
};

/// Stability bound dt * omega_max, the per-step kick bound, breakdown time and sign-collapse
/// projection for every kappa the manifest would run.
ValidationReport validate_manifest(const ExperimentManifest& manifest);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::filesystem::path> output_dir;
    bool long_run = false;
};

/// Applies command-line overrides (seed, workers, output directory, long-run sample size).
ExperimentManifest apply_options(ExperimentManifest manifest, const RunOptions& options);

struct RunSummary {
    std::vector<std::filesystem::path> files;
    std::vector<ObservableSeries> series;
    std::map<std::string, std::string> notes;
};

/// Executes the experiment and writes observables.csv (or one CSV per kappa for a scan),
/// metadata.json and any auxiliary tables into manifest.output_dir.
RunSummary run_experiment(const ExperimentManifest& manifest);

/// Writes series in the common CSV schema
/// time,observable,value,error,mean_sign,kappa,n_walkers,seed.
void write_series_csv(const std::filesystem::path& path, const std::vector<ObservableSeries>& series,
                      std::uint64_t seed);
std::vector<ObservableSeries> read_series_csv(const std::filesystem::path& path);

/// Overlays every series against `reference` on matching times and writes
/// time,observable,value,error,reference,difference,relative_difference,sigma.
std::filesystem::path compare_series(const std::filesystem::path& csv, const std::string& reference,
                                     const std::filesystem::path& out);

} // namespace phasewalk
