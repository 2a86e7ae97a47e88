#include "rpslab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rpslab/errors.hpp"

namespace rps {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& field) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    throw SchemaError(field + ": expected a number, got '" + v + "'");
}

long long to_int(const std::string& v, const std::string& field) {
    const double d = to_double(v, field);
    if (d != std::floor(d)) throw SchemaError(field + ": expected an integer, got '" + v + "'");
    return static_cast<long long>(d);
}

bool to_bool(const std::string& v, const std::string& field) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw SchemaError(field + ": expected a boolean, got '" + v + "'");
}

RVec to_list(const std::string& v, const std::string& field) {
    RVec out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(item, field));
    }
    return out;
}

Vec3 to_vec3(const std::string& v, const std::string& field, int dim) {
    const RVec l = to_list(v, field);
    if (int(l.size()) != dim) throw SchemaError(field + ": expected " + std::to_string(dim) + " components");
    Vec3 out{0, 0, 0};
    for (int a = 0; a < dim; ++a) out[a] = l[a];
    return out;
}

// Section reader that remembers which keys were consumed, so leftovers are reported.
class Section {
public:
    Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
        if (auto c = root.get_child_optional(name_)) tree_ = *c;
    }
    bool present() const { return !tree_.empty(); }
    std::optional<std::string> raw(const std::string& key) {
        used_[key] = true;
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '/'))) return trim(*v);
        return std::nullopt;
    }
    std::string field(const std::string& key) const { return name_ + "." + key; }
    double num(const std::string& key, double def) {
        auto v = raw(key);
        return v ? to_double(*v, field(key)) : def;
    }
    double num_req(const std::string& key) {
        auto v = raw(key);
        if (!v) throw SchemaError(field(key) + ": required");
        return to_double(*v, field(key));
    }
    long long integer(const std::string& key, long long def) {
        auto v = raw(key);
        return v ? to_int(*v, field(key)) : def;
    }
    bool flag(const std::string& key, bool def) {
        auto v = raw(key);
        return v ? to_bool(*v, field(key)) : def;
    }
    std::string str(const std::string& key, const std::string& def) {
        auto v = raw(key);
        return v ? *v : def;
    }
    void finish() const {
        for (const auto& [k, v] : tree_)
            if (!used_.count(k)) throw SchemaError(field(k) + ": unknown key");
    }

private:
    std::string name_;
    pt::ptree tree_;
    std::map<std::string, bool> used_;
};

std::map<std::string, std::string> spec_args(const std::string& spec, const std::string& field,
                                             std::string& kind) {
    std::stringstream ss(spec);
    ss >> kind;
    std::map<std::string, std::string> args;
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) throw SchemaError(field + ": malformed argument '" + tok + "'");
        args[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return args;
}

} // namespace

PathComponent parse_component(const std::string& spec, double T, double dt, std::uint64_t seed,
                              const std::string& field) {
    std::string kind;
    auto args = spec_args(spec, field, kind);
    std::map<std::string, bool> used;
    auto get = [&](const std::string& k, double def) {
        used[k] = true;
        auto it = args.find(k);
        return it == args.end() ? def : to_double(it->second, field + " " + k);
    };
    auto need = [&](const std::string& k) {
        used[k] = true;
        auto it = args.find(k);
        if (it == args.end()) throw SchemaError(field + ": generator '" + kind + "' needs " + k);
        return to_double(it->second, field + " " + k);
    };
    PathComponent c;
    if (kind.empty() || kind == "zero") {
        c = constant_path(0.0, T, dt);
    } else if (kind == "constant") {
        c = constant_path(need("value"), T, dt);
    } else if (kind == "sine" || kind == "decaying") {
        const double A = need("amplitude"), w = need("omega"), ph = get("phase", 0.0);
        const double tau = kind == "decaying" ? need("tau") : 0.0;
        c = constant_path(0.0, T, dt);
        for (std::size_t j = 0; j < c.count(); ++j) {
            const double t = dt * double(j);
            double val = A * std::sin(w * t + ph);
            if (kind == "decaying") val /= (1.0 + t / tau) * (1.0 + t / tau);
            c.values[j] = val;
        }
        c.tag = Modality::smooth;
    } else if (kind == "h12") {
        const double q = get("q", 1.1);
        if (!(q > 0.5)) throw SchemaError(field + ": h12 needs q > 1/2");
        c = gen_h12_path(need("amplitude"), q, int(get("K", 256)),
                         std::uint64_t(get("seed", double(seed))), T, dt);
    } else if (kind == "brownian") {
        const double s2 = need("sigma2");
        if (s2 < 0.0) throw SchemaError(field + ": brownian needs sigma2 >= 0");
        c = gen_brownian_path(s2, std::uint64_t(get("seed", double(seed))), T, dt);
    } else if (kind == "bv") {
        used["jumps"] = true;
        std::vector<std::pair<double, double>> jumps;
        if (auto it = args.find("jumps"); it != args.end()) {
            std::stringstream ss(it->second);
            std::string item;
            while (std::getline(ss, item, ';')) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw SchemaError(field + ": jump '" + item + "' must be time:increment");
                const double t = to_double(item.substr(0, colon), field + " jump time");
                if (t < 0.0 || t > T) throw SchemaError(field + ": jump time outside [0, T]");
                jumps.emplace_back(t, to_double(item.substr(colon + 1), field + " jump size"));
            }
        }
        c = gen_bv_step_path(std::move(jumps), T, dt);
    } else {
        throw SchemaError(field + ": unknown path generator '" + kind + "'");
    }
    for (const auto& [k, v] : args)
        if (!used.count(k)) throw SchemaError(field + ": unknown argument '" + k + "' for " + kind);
    return c;
}

RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw SchemaError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const char* known[] = {"run", "grid", "potential", "path", "evolve", "initial",
                                  "source", "solver", "sweep", "kernel"};
    for (const auto& [name, sub] : root) {
        bool ok = false;
        for (const char* k : known) ok = ok || name == k;
        if (!ok) throw SchemaError(name + ": unknown section");
    }

    RunConfig rc;
    // canonical echo: sections and keys sorted, values as written
    for (const auto& [name, sub] : root)
        for (const auto& [k, v] : sub) rc.echo[name][k] = trim(v.data());

    Section run(root, "run");
    const auto file_seed = std::uint64_t(run.integer("seed", 0));
    rc.seed = seed_override ? *seed_override : file_seed;
    rc.memory_cap_bytes = run.num("memory_cap_gb", 4.0) * 1e9;
    run.finish();
    if (seed_override) rc.echo["run"]["seed"] = std::to_string(*seed_override);

    Section grid(root, "grid");
    const int dim = int(grid.integer("dim", 1));
    const int n = int(grid.integer("n", 256));
    const double L = grid.num("L", 16.0);
    try {
        rc.grid = Grid(dim, n, L);
    } catch (const Error& e) {
        throw SchemaError(std::string("grid: ") + e.what());
    }
    grid.finish();

    Section pot(root, "potential");
    const std::string kind = pot.str("kind", "none");
    try {
        const auto k = potential_kind_from_string(kind);
        rc.profile.kind = k;
        rc.profile.depth = pot.num("depth", 0.0);
        rc.profile.width = pot.num("width", 1.0);
        rc.profile.validate();
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(std::string("potential: ") + e.what());
    }
    pot.finish();

    Section ev(root, "evolve");
    EvolveConfig& c = rc.evolve;
    c.grid = rc.grid;
    c.profile = rc.profile;
    c.dt = ev.num("dt", 0.01);
    c.T = ev.num("T", 1.0);
    c.record_stride = int(ev.integer("record_stride", 1));
    c.snapshot_stride = int(ev.integer("snapshot_stride", 0));
    c.record_energy = ev.flag("record_energy", true);
    c.record_flux = ev.flag("record_flux", false);
    c.record_lorentz = ev.flag("record_lorentz", false);
    c.beta_max = ev.num("beta_max", kDefaultBetaMax);
    c.monitor_layer = ev.num("monitor_layer", 0.125);
    c.monitor_threshold = ev.num("monitor_threshold", 1e-4);
    c.abort_on_breach = ev.flag("abort_on_breach", true);
    ev.finish();
    if (!(c.dt > 0.0)) throw SchemaError("evolve.dt: must be positive");
    if (!(c.T >= 0.0)) throw SchemaError("evolve.T: must be nonnegative");

    Section path(root, "path");
    const double pT = path.num("T", c.T);
    const double pdt = path.num("dt", c.dt);
    if (auto file = path.raw("file")) {
        rc.path_file = *file;
        try {
            rc.path = read_path_csv(*file);
        } catch (const Error& e) {
            throw SchemaError(std::string("path.file: ") + e.what());
        }
        if (rc.path.dim != dim) throw SchemaError("path.file: dimension does not match grid.dim");
    } else {
        try {
            sample_count(pT, pdt);
        } catch (const Error& e) {
            throw SchemaError(std::string("path: ") + e.what());
        }
        ParamPath p = ParamPath::zero(dim, pT, pdt);
        const char* ax[3] = {"x", "y", "z"};
        std::uint64_t stream = 0;
        auto comp = [&](const std::string& key) {
            ++stream;
            const std::string spec = path.str(key, "zero");
            return parse_component(spec, pT, pdt, rc.seed * 1000003ULL + stream, "path." + key);
        };
        for (int a = 0; a < 3; ++a) {
            const std::string D = std::string("D_") + ax[a], v = std::string("v_") + ax[a];
            if (a < dim) {
                p.D[a] = comp(D);
                p.v[a] = comp(v);
            } else if (path.raw(D) || path.raw(v)) {
                throw SchemaError("path." + D + ": component beyond grid dimension");
            }
        }
        p.beta = comp("beta");
        p.alpha = comp("alpha");
        p.metadata = rc.echo.contains("path") ? rc.echo["path"] : nlohmann::json::object();
        p.metadata["seed"] = rc.seed;
        try {
            p.finalize();
            if (path.flag("normalize_origin", true)) p.normalize_origin();
        } catch (const Error& e) {
            throw SchemaError(std::string("path: ") + e.what());
        }
        rc.path = std::move(p);
    }
    path.finish();
    c.path = rc.path;

    Section ini(root, "initial");
    const std::string ik = ini.str("kind", "gaussian");
    if (ik == "gaussian") c.initial.kind = InitialSpec::Kind::gaussian;
    else if (ik == "ground_state") c.initial.kind = InitialSpec::Kind::ground_state;
    else if (ik == "mix") c.initial.kind = InitialSpec::Kind::mix;
    else throw SchemaError("initial.kind: unknown initial state '" + ik + "'");
    c.initial.sigma = ini.num("sigma", 1.0);
    if (auto v = ini.raw("center")) c.initial.center = to_vec3(*v, "initial.center", dim);
    if (auto v = ini.raw("momentum")) c.initial.momentum = to_vec3(*v, "initial.momentum", dim);
    if (auto v = ini.raw("weights")) c.initial.weights = to_list(*v, "initial.weights");
    c.initial.continuum_weight = ini.num("continuum_weight", 0.0);
    c.initial.scale = ini.num("scale", 1.0);
    ini.finish();
    if (!(c.initial.sigma > 0.0)) throw SchemaError("initial.sigma: must be positive");

    Section src(root, "source");
    const std::string sk = src.str("kind", "none");
    if (sk == "none") c.source.kind = SourceSpec::Kind::none;
    else if (sk == "nonlinear") c.source.kind = SourceSpec::Kind::nonlinear;
    else throw SchemaError("source.kind: '" + sk + "' is not available from a config file (none, nonlinear)");
    c.source.c1 = src.num("c1", 0.0);
    c.source.c2 = src.num("c2", 0.0);
    c.source.amplitude_cap = src.num("amplitude_cap", 1e3);
    src.finish();

    Section sol(root, "solver");
    rc.solver.k_max = int(sol.integer("k_max", 3));
    rc.solver.tol = sol.num("tol", 1e-6);
    rc.solver.options.e_floor_fraction = sol.num("e_floor_fraction", 0.02);
    rc.solver.options.max_iter = int(sol.integer("max_iter", 600));
    rc.solver.options.itp_steps = int(sol.integer("itp_steps", 120));
    sol.finish();
    if (rc.solver.k_max < 1) throw SchemaError("solver.k_max: must be >= 1");

    Section sw(root, "sweep");
    if (auto v = sw.raw("amplitudes")) rc.sweep.amplitudes = to_list(*v, "sweep.amplitudes");
    rc.sweep.pairs = int(sw.integer("pairs", 0));
    rc.sweep.component = sw.str("component", "D_x");
    rc.sweep.q = sw.num("q", 1.1);
    rc.sweep.K = int(sw.integer("K", 256));
    sw.finish();

    Section ker(root, "kernel");
    rc.kernel.slices = std::size_t(ker.integer("slices", 64));
    rc.kernel.dt = ker.num("dt", 0.05);
    if (auto v = ker.raw("epsilons")) rc.kernel.epsilons = to_list(*v, "kernel.epsilons");
    rc.kernel.component = ker.str("component", "gamma");
    rc.kernel.max_iter = int(ker.integer("max_iter", 60));
    ker.finish();
    if (rc.kernel.slices < 2) throw SchemaError("kernel.slices: must be >= 2");

    try {
        c.steps();
        if (c.path.T() < c.T - 1e-9 * std::max(1.0, c.T))
            throw SchemaError("path.T: shorter than evolve.T");
        if (c.path.max_abs_beta() > c.beta_max) throw SchemaError("path.beta: exceeds evolve.beta_max");
        if (c.dt * c.profile.depth > c.accuracy_bound * (1 + 1e-12))
            throw SchemaError("evolve.dt: dt·V0 exceeds 0.2");
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(std::string("evolve: ") + e.what());
    }
    return rc;
}

RunConfig load_config(const std::filesystem::path& file, std::optional<std::uint64_t> seed) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), seed);
}

} // namespace rps
