#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "phasewalk/runner.hpp"

namespace phasewalk {

namespace pt = boost::property_tree;

std::string library_version() { return "0.3.0"; }

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::Classical: return "classical";
    case ExperimentKind::SignedRun: return "signed-run";
    case ExperimentKind::KappaScan: return "kappa-scan";
    case ExperimentKind::Lqc: return "lqc";
    case ExperimentKind::SchrodingerOracle: return "schrodinger-oracle";
    case ExperimentKind::Quench: return "quench";
    case ExperimentKind::UqAnalysis: return "uq-analysis";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (auto k : {ExperimentKind::Classical, ExperimentKind::SignedRun, ExperimentKind::KappaScan,
                   ExperimentKind::Lqc, ExperimentKind::SchrodingerOracle, ExperimentKind::Quench,
                   ExperimentKind::UqAnalysis}) {
        if (to_string(k) == name) return k;
    }
    throw ContractError("unknown experiment kind '" + name + "'");
}

ModelSpec ExperimentManifest::model_spec() const {
    switch (model) {
    case ModelKind::Quartic1D: return ModelSpec::quartic(mu2, lambda, mass, hbar);
    case ModelKind::TanhQuench1D: return ModelSpec::tanh_quench(mu2, alpha, lambda, mass, hbar);
    case ModelKind::LatticeChain: return ModelSpec::lattice_chain(n_sites, spacing, mu2, lambda, hbar);
    }
    throw ContractError("unknown model kind");
}

NoiseSettings ExperimentManifest::noise_settings() const {
    NoiseSettings n;
    n.level = level;
    n.epsilon = epsilon;
    n.pattern = pattern;
    if (xi == "two-atom")
        n.xi = XiKind::TwoAtom;
    else if (xi == "three-atom")
        n.xi = XiKind::ThreeAtom;
    else
        throw ContractError("unknown xi law '" + xi + "'");
    return n;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Accepts plain numbers and ratios such as "1/6".
double parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const double num = parse_number(s.substr(0, slash));
        const double den = parse_number(s.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("zero denominator");
        return num / den;
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class ManifestReader {
public:
    explicit ManifestReader(const std::string& text) {
        std::string cleaned;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            std::string t = trim(line);
            if (!t.empty() && t[0] == '#') t[0] = ';';
            if (!t.empty() && t[0] == '[') {
                section = trim(t.substr(1, t.find(']') - 1));
            } else if (!t.empty() && t[0] != ';') {
                const auto eq = t.find('=');
                if (eq != std::string::npos) lines_[section + "." + trim(t.substr(0, eq))] = number;
            }
            cleaned += t + "\n";
        }
        std::istringstream clean_in(cleaned);
        try {
            pt::read_ini(clean_in, tree_);
        } catch (const pt::ini_parser_error& e) {
            throw ManifestError("manifest syntax error: " + e.message(), "", static_cast<int>(e.line()));
        }
        for (const auto& [section, body] : tree_) {
            for (const auto& [key, value] : body) present_.insert(section + "." + key);
        }
    }

    template <typename Parse>
    void read(const std::string& field, Parse&& parse) {
        const auto it = present_.find(field);
        if (it == present_.end()) return;
        used_.insert(field);
        const std::string value = trim(tree_.get<std::string>(pt::ptree::path_type(field, '.')));
        try {
            parse(value);
        } catch (const std::exception& e) {
            throw ManifestError("invalid value '" + value + "' for " + field + " (line "
                                    + std::to_string(line(field)) + "): " + e.what(),
                                field, line(field));
        }
    }

    void number(const std::string& field, double& out) {
        read(field, [&](const std::string& v) { out = parse_number(v); });
    }
    void count(const std::string& field, std::size_t& out) {
        read(field, [&](const std::string& v) {
            const double d = parse_number(v);
            if (d < 0.0 || d != std::floor(d)) throw std::invalid_argument("expected a nonnegative integer");
            out = static_cast<std::size_t>(d);
        });
    }
    void integer(const std::string& field, int& out) {
        read(field, [&](const std::string& v) {
            const double d = parse_number(v);
            if (d != std::floor(d)) throw std::invalid_argument("expected an integer");
            out = static_cast<int>(d);
        });
    }
    void seed(const std::string& field, std::uint64_t& out) {
        read(field, [&](const std::string& v) {
            std::size_t used = 0;
            out = std::stoull(v, &used);
            if (used != v.size()) throw std::invalid_argument("expected an unsigned integer");
        });
    }
    void text(const std::string& field, std::string& out) {
        read(field, [&](const std::string& v) { out = v; });
    }
    void flag(const std::string& field, bool& out) {
        read(field, [&](const std::string& v) {
            if (v == "true" || v == "1" || v == "yes")
                out = true;
            else if (v == "false" || v == "0" || v == "no")
                out = false;
            else
                throw std::invalid_argument("expected true or false");
        });
    }
    void numbers(const std::string& field, std::vector<double>& out) {
        read(field, [&](const std::string& v) {
            out.clear();
            for (const auto& item : split_list(v)) out.push_back(parse_number(item));
        });
    }
    void words(const std::string& field, std::vector<std::string>& out) {
        read(field, [&](const std::string& v) { out = split_list(v); });
    }

    void reject_unknown() const {
        for (const auto& f : present_) {
            if (!used_.count(f))
                throw ManifestError("unknown manifest field " + f + " (line " + std::to_string(line(f)) + ")",
                                    f, line(f));
        }
    }

    int line(const std::string& field) const {
        const auto it = lines_.find(field);
        return it == lines_.end() ? 0 : it->second;
    }

private:
    pt::ptree tree_;
    std::map<std::string, int> lines_;
    std::set<std::string> present_;
    std::set<std::string> used_;
};

} // namespace

ExperimentManifest parse_manifest(const std::string& text) {
    ManifestReader r(text);
    ExperimentManifest m;
    r.read("experiment.kind", [&](const std::string& v) { m.kind = experiment_kind_from_string(v); });
    r.text("experiment.name", m.name);

    r.read("model.kind", [&](const std::string& v) { m.model = model_kind_from_string(v); });
    r.number("model.m", m.mass);
    r.number("model.mu2", m.mu2);
    r.number("model.lambda", m.lambda);
    r.number("model.hbar", m.hbar);
    r.number("model.alpha", m.alpha);
    r.count("model.n_sites", m.n_sites);
    r.number("model.spacing", m.spacing);
    r.number("model.mu2_pre", m.mu2_pre);

    r.text("state.kind", m.state);
    r.number("state.sigma_x", m.sigma_x);
    r.number("state.beta", m.beta);
    r.number("state.omega", m.omega);

    r.integer("noise.level", m.level);
    r.number("noise.epsilon", m.epsilon);
    r.numbers("noise.pattern", m.pattern);
    r.text("noise.xi", m.xi);

    r.number("evolution.dt", m.dt);
    r.number("evolution.t_final", m.t_final);
    r.count("evolution.record_stride", m.record_stride);
    r.number("evolution.kappa", m.kappa);
    r.numbers("evolution.kappas", m.kappas);
    r.text("evolution.integrator", m.integrator);
    r.words("evolution.observables", m.observables);

    r.count("sampling.walkers", m.walkers);
    r.count("sampling.long_run_walkers", m.long_run_walkers);
    r.seed("sampling.seed", m.seed);
    r.count("sampling.workers", m.workers);
    r.count("sampling.blocks", m.blocks);

    r.flag("oracle.enabled", m.oracle);
    r.count("oracle.points", m.oracle_points);
    r.number("oracle.half_width", m.oracle_half_width);
    r.number("oracle.dt", m.oracle_dt);

    r.integer("analysis.fit_degree", m.fit_degree);
    r.number("analysis.fit_kappa_max", m.fit_kappa_max);

    r.number("uq.x", m.uq_x);
    r.number("uq.t", m.uq_t);
    r.number("uq.p_min", m.uq_p_min);
    r.number("uq.p_max", m.uq_p_max);
    r.count("uq.p_points", m.uq_p_points);

    r.text("output.directory", m.output_dir);
    r.flag("output.snapshots", m.snapshots);
    r.reject_unknown();

    auto check = [&](bool ok, const std::string& field, const std::string& msg) {
        if (!ok) throw ManifestError(field + " (line " + std::to_string(r.line(field)) + "): " + msg, field, r.line(field));
    };
    check(m.state == "pure-gaussian" || m.state == "thermal" || m.state == "lattice-vacuum",
          "state.kind", "expected pure-gaussian, thermal or lattice-vacuum");
    check(m.xi == "two-atom" || m.xi == "three-atom", "noise.xi", "expected two-atom or three-atom");
    check(m.integrator == "symplectic-euler" || m.integrator == "leapfrog", "evolution.integrator",
          "expected symplectic-euler or leapfrog");
    check(m.level >= 1, "noise.level", "must be >= 1");
    check(m.epsilon > 0.0, "noise.epsilon", "must be positive");
    check(m.dt > 0.0, "evolution.dt", "must be positive");
    check(m.t_final >= 0.0, "evolution.t_final", "must be >= 0");
    check(m.record_stride >= 1, "evolution.record_stride", "must be >= 1");
    check(m.kappa >= 0.0 && m.kappa <= 1.0, "evolution.kappa", "must lie in [0, 1]");
    for (double k : m.kappas) check(k >= 0.0 && k <= 1.0, "evolution.kappas", "entries must lie in [0, 1]");
    check(m.walkers >= 1, "sampling.walkers", "must be >= 1");
    check(m.workers >= 1, "sampling.workers", "must be >= 1");
    check(m.blocks >= 2, "sampling.blocks", "must be >= 2");
    check(m.fit_degree >= 1, "analysis.fit_degree", "must be >= 1");
    check(m.uq_p_points >= 2, "uq.p_points", "must be >= 2");
    for (const auto& o : m.observables) {
        check(o == "Q2" || o == "P2" || o == "P" || o == "X" || o == "modes", "evolution.observables",
              "unknown observable '" + o + "' (Q2, P2, P, X, modes)");
    }
    return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest " + path.string(), "", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

std::string emit_manifest(const ExperimentManifest& m) {
    std::ostringstream os;
    auto list = [](const auto& v, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
        return s;
    };
    auto num = [](double v) { return format_double(v); };
    auto word = [](const std::string& w) { return w; };
    os << "[experiment]\nkind = " << to_string(m.kind) << "\nname = " << m.name << "\n\n";
    os << "[model]\nkind = " << to_string(m.model) << "\nm = " << num(m.mass) << "\nmu2 = " << num(m.mu2)
       << "\nlambda = " << num(m.lambda) << "\nhbar = " << num(m.hbar) << "\nalpha = " << num(m.alpha)
       << "\nn_sites = " << m.n_sites << "\nspacing = " << num(m.spacing)
       << "\nmu2_pre = " << num(m.mu2_pre) << "\n\n";
    os << "[state]\nkind = " << m.state << "\nsigma_x = " << num(m.sigma_x) << "\nbeta = " << num(m.beta)
       << "\nomega = " << num(m.omega) << "\n\n";
    os << "[noise]\nlevel = " << m.level << "\nepsilon = " << num(m.epsilon);
    if (!m.pattern.empty()) os << "\npattern = " << list(m.pattern, num);
    os << "\nxi = " << m.xi << "\n\n";
    os << "[evolution]\ndt = " << num(m.dt) << "\nt_final = " << num(m.t_final)
       << "\nrecord_stride = " << m.record_stride << "\nkappa = " << num(m.kappa)
       << "\nkappas = " << list(m.kappas, num) << "\nintegrator = " << m.integrator
       << "\nobservables = " << list(m.observables, word) << "\n\n";
    os << "[sampling]\nwalkers = " << m.walkers << "\nlong_run_walkers = " << m.long_run_walkers
       << "\nseed = " << m.seed << "\nworkers = " << m.workers << "\nblocks = " << m.blocks << "\n\n";
    os << "[oracle]\nenabled = " << (m.oracle ? "true" : "false") << "\npoints = " << m.oracle_points
       << "\nhalf_width = " << num(m.oracle_half_width) << "\ndt = " << num(m.oracle_dt) << "\n\n";
    os << "[analysis]\nfit_degree = " << m.fit_degree << "\nfit_kappa_max = " << num(m.fit_kappa_max)
       << "\n\n";
    os << "[uq]\nx = " << num(m.uq_x) << "\nt = " << num(m.uq_t) << "\np_min = " << num(m.uq_p_min)
       << "\np_max = " << num(m.uq_p_max) << "\np_points = " << m.uq_p_points << "\n\n";
    os << "[output]\ndirectory = " << m.output_dir << "\nsnapshots = " << (m.snapshots ? "true" : "false")
       << "\n";
    return os.str();
}

ExperimentManifest apply_options(ExperimentManifest m, const RunOptions& options) {
    if (options.seed) m.seed = *options.seed;
    if (options.workers) m.workers = std::max<std::size_t>(1, *options.workers);
    if (options.output_dir) m.output_dir = options.output_dir->string();
    if (options.long_run) m.walkers = m.long_run_walkers;
    return m;
}

} // namespace phasewalk
