#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "phasewalk/error.hpp"
#include "phasewalk/runner.hpp"

using namespace phasewalk;

namespace {

enum Exit { Ok = 0, Failed = 1, Contract = 2, Numerical = 3, Runtime = 4 };

struct CommonFlags {
    std::string manifest;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> out;
    bool long_run = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--manifest", f.manifest, "experiment manifest (INI)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed override");
    cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "output directory (overrides PHASEWALK_OUT and the manifest)");
    cmd->add_flag("--long-run", f.long_run, "use the long-run walker count from the manifest");
}

ExperimentManifest resolve(const CommonFlags& f) {
    RunOptions opts;
    opts.seed = f.seed;
    opts.workers = f.workers;
    opts.long_run = f.long_run;
    if (f.out) {
        opts.output_dir = *f.out;
    } else if (const char* env = std::getenv("PHASEWALK_OUT"); env && *env) {
        opts.output_dir = env;
    }
    return apply_options(load_manifest(f.manifest), opts);
}

void print_summary(const RunSummary& s) {
    for (const auto& f : s.files) std::cout << "wrote " << f.string() << "\n";
    for (const auto& [k, v] : s.notes) std::cout << k << " = " << v << "\n";
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ManifestError& e) {
        std::cerr << "manifest error";
        if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
        if (e.line() > 0) std::cerr << " line " << e.line();
        std::cerr << ": " << e.what() << "\n";
        return Contract;
    } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return Contract;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return Numerical;
    } catch (const SolverError& e) {
        std::cerr << "noise-law solver error: " << e.what() << "\n";
        return Numerical;
    } catch (const QuadratureError& e) {
        std::cerr << "quadrature error: " << e.what() << "\n";
        return Numerical;
    } catch (const OracleError& e) {
        std::cerr << "oracle error: " << e.what() << "\n";
        return Numerical;
    } catch (const IntegrationBlowup& e) {
        std::cerr << "integration error: " << e.what() << "\n";
        return Runtime;
    } catch (const SignCollapse& e) {
        std::cerr << "sign collapse: " << e.what() << "\n";
        return Runtime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Runtime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phasewalk: signed-walker Wigner dynamics experiments"};
    app.set_version_flag("--version", library_version());
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run = app.add_subcommand("run", "run the experiment described by a manifest");
    add_common(run, run_flags);

    CommonFlags val_flags;
    auto* validate = app.add_subcommand("validate", "check a manifest without running it");
    add_common(validate, val_flags);

    CommonFlags scan_flags;
    std::vector<double> kappas;
    auto* scan = app.add_subcommand("scan", "kappa sweep with linear extrapolation to kappa = 1");
    add_common(scan, scan_flags);
    scan->add_option("--kappas", kappas, "kappa values (must include 0)")->delimiter(',');

    CommonFlags cmp_flags;
    std::string csv;
    std::string reference;
    auto* compare = app.add_subcommand("compare", "overlay sampler series against a reference series");
    compare->add_option("--manifest", cmp_flags.manifest, "run this manifest first")->check(CLI::ExistingFile);
    compare->add_option("--csv", csv, "existing observables CSV")->check(CLI::ExistingFile);
    compare->add_option("--reference", reference, "reference observable (default: the *_oracle series)");
    compare->add_option("--seed", cmp_flags.seed, "master seed override");
    compare->add_option("--workers", cmp_flags.workers, "worker threads")->check(CLI::PositiveNumber);
    compare->add_option("--out", cmp_flags.out, "output directory");
    compare->add_flag("--long-run", cmp_flags.long_run, "use the long-run walker count");

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        return guarded([&] {
            print_summary(run_experiment(resolve(run_flags)));
            return Ok;
        });
    }
    if (*validate) {
        return guarded([&] {
            const ExperimentManifest m = resolve(val_flags);
            const ValidationReport report = validate_manifest(m);
            std::cout << report.format();
            return report.ok() ? Ok : Failed;
        });
    }
    if (*scan) {
        return guarded([&] {
            ExperimentManifest m = resolve(scan_flags);
            m.kind = ExperimentKind::KappaScan;
            if (!kappas.empty()) m.kappas = kappas;
            print_summary(run_experiment(m));
            return Ok;
        });
    }
    return guarded([&] {
        std::filesystem::path source = csv;
        std::filesystem::path dir;
        if (!cmp_flags.manifest.empty()) {
            const ExperimentManifest m = resolve(cmp_flags);
            const RunSummary s = run_experiment(m);
            print_summary(s);
            dir = m.output_dir;
            source = dir / "observables.csv";
        } else if (csv.empty()) {
            throw ContractError("compare needs --csv or --manifest");
        } else {
            dir = cmp_flags.out ? std::filesystem::path(*cmp_flags.out) : source.parent_path();
        }
        std::string ref = reference;
        if (ref.empty()) {
            for (const auto& s : read_series_csv(source)) {
                if (s.observable.ends_with("_oracle")) ref = s.observable;
            }
            if (ref.empty()) throw ContractError("no *_oracle series in " + source.string() + "; pass --reference");
        }
        std::filesystem::create_directories(dir.empty() ? "." : dir);
        const auto out = compare_series(source, ref, (dir.empty() ? std::filesystem::path(".") : dir) / "comparison.csv");
        std::cout << "wrote " << out.string() << "\n";
        return Ok;
    });
}
