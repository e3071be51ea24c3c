#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phasewalk/lattice.hpp"
#include "phasewalk/oracle.hpp"
#include "phasewalk/runner.hpp"
#include "phasewalk/states.hpp"

namespace py = pybind11;
using namespace phasewalk;

namespace {

py::dict series_dict(const ObservableSeries& s) {
    py::dict d;
    d["observable"] = s.observable;
    d["times"] = s.times;
    d["values"] = s.values;
    d["errors"] = s.errors;
    d["mean_sign"] = s.mean_sign;
    d["kappa"] = s.kappa;
    d["n_walkers"] = s.sample_size;
    return d;
}

ObservableSeries to_series(const std::vector<double>& values, const std::vector<double>& errors, double kappa) {
    ObservableSeries s;
    s.values = values;
    s.errors = errors.empty() ? std::vector<double>(values.size(), 0.0) : errors;
    s.times.resize(values.size());
    s.mean_sign.assign(values.size(), 1.0);
    s.collapsed.assign(values.size(), false);
    s.kappa = kappa;
    return s;
}

}

PYBIND11_MODULE(_phasewalk, m) {
    m.doc() = "phasewalk core bindings";
    m.attr("__version__") = library_version();

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<SignCollapse>(m, "SignCollapse", PyExc_ArithmeticError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::enum_<ModelKind>(m, "ModelKind")
        .value("Quartic1D", ModelKind::Quartic1D)
        .value("TanhQuench1D", ModelKind::TanhQuench1D)
        .value("LatticeChain", ModelKind::LatticeChain);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def_static("quartic", &ModelSpec::quartic, py::arg("mu2"), py::arg("lam"), py::arg("m") = 1.0,
                    py::arg("hbar") = 1.0)
        .def_static("tanh_quench", &ModelSpec::tanh_quench, py::arg("mu2"), py::arg("alpha_rate"), py::arg("lam"),
                    py::arg("m") = 1.0, py::arg("hbar") = 1.0)
        .def_static("lattice_chain", &ModelSpec::lattice_chain, py::arg("n_sites"), py::arg("spacing"),
                    py::arg("mu2"), py::arg("lam"), py::arg("hbar") = 1.0)
        .def_readonly("kind", &ModelSpec::kind)
        .def_readonly("mu2", &ModelSpec::mu2)
        .def_readonly("lam", &ModelSpec::lambda)
        .def_readonly("hbar", &ModelSpec::hbar)
        .def("dimension", &ModelSpec::dimension)
        .def("effective_lambda", &ModelSpec::effective_lambda);

    m.def("potential_energy", [](const ModelSpec& model, const std::vector<double>& x, double t) {
        return potential_energy(model, x, t);
    }, py::arg("model"), py::arg("x"), py::arg("t") = 0.0);
    m.def("force", [](const ModelSpec& model, const std::vector<double>& x, double t) {
        return force(model, x, t);
    }, py::arg("model"), py::arg("x"), py::arg("t") = 0.0);
    m.def("dimensionless_r", &dimensionless_r);
    m.def("dimensionless_s", &dimensionless_s);

    py::class_<NoiseLaw>(m, "NoiseLaw")
        .def_readonly("level", &NoiseLaw::level)
        .def_readonly("drift_free", &NoiseLaw::drift_free)
        .def_readonly("epsilon", &NoiseLaw::epsilon)
        .def_readonly("c3", &NoiseLaw::c3)
        .def_readonly("abscissae", &NoiseLaw::abscissae)
        .def_readonly("weights", &NoiseLaw::weights)
        .def_readonly("norm", &NoiseLaw::norm)
        .def("moment", &NoiseLaw::moment)
        .def("kick_rate", &NoiseLaw::kick_rate)
        .def("__repr__", &NoiseLaw::describe);

    m.def("solve_noise_law", [](int level, double epsilon, double c3, std::vector<double> pattern) {
        return pattern.empty() ? solve_noise_law(level, epsilon, c3) : solve_noise_law(level, epsilon, c3, pattern);
    }, py::arg("level"), py::arg("epsilon"), py::arg("c3"), py::arg("pattern") = std::vector<double>{});
    m.def("default_abscissa_pattern", &default_abscissa_pattern);
    m.def("verify_moments", [](const NoiseLaw& law, std::optional<int> p_max) {
        return verify_moments(law, p_max.value_or(law.level));
    }, py::arg("law"), py::arg("p_max") = py::none());
    m.def("third_moment_target", &third_moment_target);
    m.def("breakdown_time", &breakdown_time);
    m.def("mean_sign_prediction", [](double norm, std::size_t n) {
        NoiseLaw law;
        law.norm = norm;
        const auto p = mean_sign_prediction(law, n);
        return py::make_tuple(p.mean_sign, p.negative_fraction);
    }, py::arg("norm"), py::arg("n_steps"));

    m.def("signed_mean", [](const std::vector<double>& v, const std::vector<int>& s) { return signed_mean(v, s); });
    m.def("jackknife", [](const std::vector<double>& v, const std::vector<int>& s, std::size_t blocks) {
        const auto e = jackknife(v, s, blocks);
        return py::make_tuple(e.value, e.error);
    }, py::arg("values"), py::arg("signs"), py::arg("n_blocks") = kDefaultJackknifeBlocks);
    m.def("lqc_estimate", [](const std::vector<double>& classical, const std::vector<double>& quantum, double kappa) {
        return lqc_estimate(to_series(classical, {}, 0.0), to_series(quantum, {}, kappa), kappa).values;
    });
    m.def("kappa_scan_fit", [](const std::vector<double>& k, const std::vector<double>& v,
                               const std::vector<double>& e, int degree) {
        const auto f = kappa_scan_fit(k, v, e, degree);
        py::dict d;
        d["anchor"] = f.anchor;
        d["coefficients"] = f.coefficients;
        d["chi2_per_dof"] = f.chi2_per_dof();
        d["extrapolated"] = f.extrapolated;
        d["extrapolated_error"] = f.extrapolated_error;
        return d;
    }, py::arg("kappas"), py::arg("values"), py::arg("errors"), py::arg("degree") = 1);

    m.def("harmonic_q2_analytic", &harmonic_q2_analytic);
    m.def("free_width2_analytic", &free_width2_analytic);
    m.def("uq_integral", &uq_integral);
    m.def("uq_wigner", &uq_wigner);
    m.def("uq_saddle", &uq_saddle);
    m.def("uq_position_marginal", &uq_position_marginal);
    m.def("schrodinger_q2", [](const ModelSpec& model, double sigma_x, double t_final, std::vector<double> times,
                               std::size_t points, double half_width, double dt) {
        const auto psi = gaussian_wavefunction(points, half_width, sigma_x, 0.0, 0.0, model.hbar);
        return schrodinger_evolve(psi, model, dt, t_final, times).q2;
    }, py::arg("model"), py::arg("sigma_x"), py::arg("t_final"), py::arg("times"), py::arg("points") = 1024,
       py::arg("half_width") = 12.0, py::arg("dt") = 1e-3);

    m.def("dispersion", [](std::size_t n, double a, double mu2, long j) {
        const auto d = dispersion(n, a, mu2, j);
        return py::make_tuple(d.omega, d.unstable);
    });
    m.def("dft_modes", [](const std::vector<double>& phi, double box) { return dft_modes(phi, box); });
    m.def("observable_phi2", [](const std::vector<double>& phi, double box) { return observable_phi2(phi, box); });
    m.def("free_quench_phi2", [](std::size_t n_sites, double t) {
        auto c = LatticeConfig::standard(n_sites);
        c.lambda = 0.0;
        return free_quench_phi2(c, t);
    });

    m.def("parse_manifest_text", [](const std::string& text) { return emit_manifest(parse_manifest(text)); },
          "Parse a manifest and return its fully resolved form.");
    m.def("validate_manifest_text", [](const std::string& text) {
        const auto r = validate_manifest(parse_manifest(text));
        return py::make_tuple(r.ok(), r.format());
    });
    m.def("run_manifest_text", [](const std::string& text, std::optional<std::uint64_t> seed,
                                  std::optional<std::size_t> workers, std::optional<std::string> out, bool long_run) {
        RunOptions o;
        o.seed = seed;
        o.workers = workers;
        if (out) o.output_dir = *out;
        o.long_run = long_run;
        RunSummary s;
        {
            py::gil_scoped_release release;
            s = run_experiment(apply_options(parse_manifest(text), o));
        }
        py::dict d;
        std::vector<std::string> files;
        for (const auto& f : s.files) files.push_back(f.string());
        d["files"] = files;
        py::list series;
        for (const auto& x : s.series) series.append(series_dict(x));
        d["series"] = series;
        d["notes"] = s.notes;
        return d;
    }, py::arg("text"), py::arg("seed") = py::none(), py::arg("workers") = py::none(), py::arg("out") = py::none(),
       py::arg("long_run") = false);
}
