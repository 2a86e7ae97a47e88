#include "rpslab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "rpslab/diagnostics.hpp"
#include "rpslab/errors.hpp"
#include "rpslab/modulation.hpp"
#include "rpslab/path_norms.hpp"
#include "rpslab/snapshot.hpp"

namespace rps {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return "rpslab-0.1.0"; }

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw ResourceError("SHA-256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

std::string compute_run_id(const json& echo, const std::string& subcommand,
                           const std::vector<std::string>& extra) {
    json j;
    j["config"] = echo;
    j["subcommand"] = subcommand;
    j["args"] = extra;
    j["code_version"] = code_version();
    return sha256_hex(j.dump());
}

fs::path output_root() {
    if (const char* e = std::getenv("RPSLAB_OUTPUT_ROOT"); e && *e) return e;
    return "runs";
}

json RunManifest::to_json() const {
    json j;
    j["run_id"] = run_id;
    j["subcommand"] = subcommand;
    j["code_version"] = code_version();
    j["config"] = config;
    j["started"] = started;
    j["finished"] = finished;
    j["dir"] = dir.string();
    j["outputs"] = outputs;
    j["flags"] = flags;
    j["summary"] = summary;
    return j;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f) {
    const std::size_t nw = std::clamp<std::size_t>(std::size_t(std::max(workers, 1)), 1, std::max<std::size_t>(count, 1));
    if (nw <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

std::string now_iso() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const fs::path& file, const json& j) {
    std::ofstream out(file);
    if (!out) throw ResourceError("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("missing " + file.string());
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw DataError(file.string() + ": " + e.what());
    }
}

// Simple numeric CSV: header row, '#' comment lines skipped.
struct Table {
    std::vector<std::string> cols;
    std::vector<std::vector<std::string>> rows;
    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return i;
        throw DataError("CSV has no column '" + name + "'");
    }
    RVec numbers(const std::string& name) const {
        const std::size_t c = col(name);
        RVec out;
        for (const auto& r : rows) out.push_back(std::stod(r.at(c)));
        return out;
    }
};

Table read_table(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("missing " + file.string());
    Table t;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (header) {
            t.cols = f;
            header = false;
        } else {
            t.rows.push_back(f);
        }
    }
    return t;
}

double sup_abs(const RVec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::shared_ptr<const BoundStateBasis> solve_basis(const RunConfig& cfg) {
    if (cfg.profile.is_zero()) {
        auto b = std::make_shared<BoundStateBasis>();
        b->grid = cfg.grid;
        return b;
    }
    return std::make_shared<BoundStateBasis>(
        solve_bound_states(cfg.profile, cfg.grid, cfg.solver.k_max, cfg.solver.tol, cfg.solver.options));
}

json run_flags(const TrajectoryBundle& run) {
    json f;
    f["wraparound_breach"] = run.wraparound_breach;
    f["breach_time"] = run.breach_time;
    f["amplitude_blowup"] = run.amplitude_blowup;
    f["aborted"] = run.aborted;
    f["abort_reason"] = run.abort_reason;
    f["large_beta"] = run.large_beta;
    return f;
}

json run_summary(const TrajectoryBundle& run) {
    json s;
    if (run.records.empty()) return s;
    const double m0 = run.records.front().mass;
    double drift = 0.0, max_b = 0.0;
    for (const auto& r : run.records) {
        drift = std::max(drift, std::abs(r.mass - m0) / m0);
        max_b = std::max(max_b, r.boundary_fraction);
    }
    s["steps"] = run.config.steps();
    s["records"] = run.records.size();
    s["mass_drift"] = drift;
    s["max_boundary_fraction"] = max_b;
    const auto eb = energy_bound(run);
    s["sup_energy"] = eb.sup_energy;
    s["h1_initial"] = eb.h1_initial;
    s["energy_ratio"] = eb.ratio;
    if (run.config.record_lorentz) {
        const auto st = strichartz_accumulate(run);
        s["strichartz_l2_l62"] = st.l2_l62;
        s["strichartz_linf_l2"] = st.linf_l2;
        s["strichartz_tail_ratio"] = st.tail_increment_ratio;
    }
    if (run.config.basis && !run.config.basis->empty() && run.records.front().pp_mass > 0.0) {
        const auto ion = ionization_metrics(run);
        s["tail_min"] = ion.tail_min;
        s["transfer_estimate"] = ion.transfer_estimate;
    }
    return s;
}

json decay_json(const DecayReport& d) {
    return json{{"rate", d.rate},           {"target", d.target},   {"rel_error", d.rel_error},
                {"r2", d.r2},               {"curvature", d.curvature}, {"r_min", d.r_min},
                {"r_max", d.r_max},         {"bins", d.bins},       {"dynamic_range", d.dynamic_range},
                {"inconclusive", d.inconclusive}, {"reason", d.reason}};
}

std::string fmt(double x) {
    std::ostringstream o;
    o << std::setprecision(17) << x;
    return o.str();
}

} // namespace

void write_diagnostics_csv(const fs::path& file, const TrajectoryBundle& run) {
    std::ofstream out(file);
    if (!out) throw ResourceError("cannot write " + file.string());
    out << std::setprecision(17);
    const std::size_t nz = run.records.empty() ? 0 : run.records.front().zeta.size();
    out << "t,mass,kinetic,potential,nonlinear,total,pp_mass,lorentz62,strichartz_running,"
           "boundary_fraction,sup_abs,flux_x";
    for (std::size_t k = 0; k < nz; ++k) out << ",zeta" << k << "_re,zeta" << k << "_im";
    out << '\n';
    for (const auto& r : run.records) {
        out << r.t << ',' << r.mass << ',' << r.kinetic << ',' << r.potential << ',' << r.nonlinear << ','
            << r.total << ',' << r.pp_mass << ',' << r.lorentz62 << ',' << r.strichartz_running << ','
            << r.boundary_fraction << ',' << r.sup_abs << ',' << r.flux[0];
        for (std::size_t k = 0; k < nz; ++k) out << ',' << r.zeta[k].real() << ',' << r.zeta[k].imag();
        out << '\n';
    }
}

PathComponent matched_h12(double sup, double q, int K, std::uint64_t seed, double T, double dt) {
    PathComponent c = gen_h12_path(1.0, q, K, seed, T, dt);
    const double f0 = c.values.front();
    for (double& x : c.values) x -= f0;
    const double m = sup_abs(c.values);
    for (double& x : c.values) x *= m > 0.0 ? sup / m : 0.0;
    return c;
}

PathComponent matched_brownian(double sup, std::uint64_t seed, double T, double dt) {
    PathComponent c = gen_brownian_path(1.0, seed, T, dt);
    const double m = sup_abs(c.values);
    for (double& x : c.values) x *= m > 0.0 ? sup / m : 0.0;
    return c;
}

ParamPath position_path(int dim, const PathComponent& c, int axis) {
    ParamPath p = ParamPath::zero(dim, c.T(), c.dt);
    p.D[axis] = c;
    p.finalize();
    return p;
}

namespace {

EvolveConfig with_path(const EvolveConfig& base, ParamPath p) {
    EvolveConfig c = base;
    c.path = std::move(p);
    return c;
}

IonizationPoint ionization_point(const EvolveConfig& cfg, double amplitude) {
    const TrajectoryBundle run = evolve(cfg);
    IonizationPoint pt;
    pt.amplitude = amplitude;
    pt.breach = run.wraparound_breach;
    for (const auto& r : run.records) pt.max_boundary = std::max(pt.max_boundary, r.boundary_fraction);
    const auto ion = ionization_metrics(run);
    pt.tail_min = ion.tail_min;
    pt.transfer = ion.transfer_estimate;
    return pt;
}

} // namespace

IonizationSweep ionization_sweep(const EvolveConfig& base, const RVec& amplitudes, double q, int K,
                                 std::uint64_t seed, int workers) {
    IonizationSweep sw;
    const double T = base.path.T(), dt = base.path.dt;
    const int dim = base.grid.dim;
    // one fixed path shape, scaled in amplitude, so the sweep isolates the size of the path
    const PathComponent shape = matched_h12(1.0, q, K, seed, T, dt);
    sw.points.resize(amplitudes.size() + 1);
    parallel_for(amplitudes.size() + 1, workers, [&](std::size_t i) {
        PathComponent c = shape;
        const double a = i < amplitudes.size() ? amplitudes[i] : 0.0;
        for (double& x : c.values) x *= a;
        sw.points[i] = ionization_point(with_path(base, position_path(dim, c)), a);
    });
    sw.stationary_tail_min = sw.points.back().tail_min;
    sw.points.pop_back();
    RVec a, t;
    for (const auto& p : sw.points) {
        a.push_back(p.amplitude);
        t.push_back(p.tail_min);
        if (p.tail_min >= 0.5) sw.threshold = std::max(sw.threshold, p.amplitude);
    }
    sw.spearman = a.size() >= 2 ? spearman(a, t) : 0.0;
    return sw;
}

std::vector<ContrastPair> brownian_contrast(const EvolveConfig& base, double sup, int pairs, double q,
                                            int K, std::uint64_t seed, int workers) {
    std::vector<ContrastPair> out(std::size_t(std::max(pairs, 0)));
    const double T = base.path.T(), dt = base.path.dt;
    const int dim = base.grid.dim;
    parallel_for(2 * out.size(), workers, [&](std::size_t job) {
        const std::size_t i = job / 2;
        const bool brown = job % 2 == 1;
        const std::uint64_t s = seed + i;
        const PathComponent c = brown ? matched_brownian(sup, s + 100, T, dt) : matched_h12(sup, q, K, s, T, dt);
        const IonizationPoint p = ionization_point(with_path(base, position_path(dim, c)), sup);
        (brown ? out[i].brownian_tail : out[i].h12_tail) = p.tail_min;
        if (p.breach) out[i].breach = true;
    });
    return out;
}

ParamPath kernel_perturbation(int dim, double eps, const std::string& component, double T, double dt) {
    ParamPath p = ParamPath::zero(dim, T, dt);
    PathComponent u = constant_path(0.0, T, dt);
    for (std::size_t j = 0; j < u.count(); ++j)
        u.values[j] = eps * std::sin(std::numbers::pi * dt * double(j) / T);
    if (component == "gamma") p.D[0] = u;
    else if (component == "alpha") p.alpha = u;
    else if (component == "beta") p.beta = u;
    else throw ConfigError("kernel.component must be gamma, alpha or beta");
    p.finalize();
    return p;
}

KernelSweep kernel_norm_sweep(const Grid& grid, const PotentialProfile& profile, const KernelConfig& kc,
                              std::uint64_t seed) {
    KernelSweep ks;
    const double T = kc.dt * double(kc.slices - 1);
    const ParamPath zero = ParamPath::zero(grid.dim, T, kc.dt);
    NormEstimateOptions opt;
    opt.max_iter = kc.max_iter;
    opt.seed = seed;
    ks.zero_norm = operator_norm_estimate(zero, zero, profile, grid, kc.dt, kc.slices, opt).value;
    RVec le, ln;
    for (double e : kc.epsilons) {
        const ParamPath pi = kernel_perturbation(grid.dim, e, kc.component, T, kc.dt);
        const NormEstimate est = operator_norm_estimate(pi, zero, profile, grid, kc.dt, kc.slices, opt);
        ks.eps.push_back(e);
        ks.norms.push_back(est.value);
        ks.converged = ks.converged && est.converged;
        if (est.value > 0.0) {
            le.push_back(std::log(e));
            ln.push_back(std::log(est.value));
        }
    }
    if (le.size() >= 2) ks.fit = linear_fit(le, ln);
    return ks;
}

double estimate_memory(const std::string& sub, const RunConfig& cfg) {
    const double field = double(cfg.grid.size()) * 16.0;
    const int b = cfg.solver.k_max + cfg.solver.options.guard;
    const double solver = field * (8.0 * b + 8.0);
    if (sub == "bound-states") return solver;
    if (sub == "paths-gen" || sub == "paths-norms" || sub == "report" || sub == "export")
        return 64.0 * double(cfg.path.count()) * 16.0;
    if (sub == "kernel-norm") return field * double(cfg.kernel.slices) * 8.0;
    const double snaps = cfg.evolve.snapshot_stride > 0
                             ? double(cfg.evolve.steps() / std::size_t(cfg.evolve.snapshot_stride) + 1) * field
                             : 0.0;
    const double probes = sub == "modulation" ? field * double(cfg.solver.k_max) * (2 * cfg.grid.dim + 1) : 0.0;
    return std::max(solver, field * 16.0 + snaps + probes);
}

fs::path export_plot_data(const fs::path& run_dir, const std::string& kind, const fs::path& out_path) {
    const fs::path out = out_path.empty() ? run_dir / ("plot_" + kind + ".csv") : out_path;
    std::ostringstream body;
    body << std::setprecision(17);
    if (kind == "decay_fit") {
        const Table t = read_table(run_dir / "diagnostics.csv");
        const RVec ts = t.numbers("t"), sup = t.numbers("sup_abs");
        RVec lx, ly;
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i] > 0.0 && sup[i] > 0.0) {
                lx.push_back(std::log(ts[i]));
                ly.push_back(std::log(sup[i]));
            }
        if (lx.size() < 2) throw DataError("decay_fit needs at least two positive times");
        const LinearFit f = linear_fit(lx, ly);
        body << "# slope = " << f.slope << "\n# intercept = " << f.intercept << "\n# r2 = " << f.r2 << '\n';
        body << "log_t,log_sup,fit_slope\n";
        for (std::size_t i = 0; i < lx.size(); ++i) body << lx[i] << ',' << ly[i] << ',' << f.slope << '\n';
    } else if (kind == "ionization_curve") {
        const Table t = read_table(run_dir / "ionization.csv");
        const RVec a = t.numbers("amplitude"), m = t.numbers("tail_min");
        const json s = read_json(run_dir / "summary.json");
        body << "# spearman = " << s.value("spearman", 0.0) << "\n# threshold = " << s.value("threshold", 0.0) << '\n';
        body << "amplitude,tail_min\n";
        for (std::size_t i = 0; i < a.size(); ++i) body << a[i] << ',' << m[i] << '\n';
    } else if (kind == "slope_sweep") {
        const Table t = read_table(run_dir / "kernel.csv");
        const RVec e = t.numbers("eps"), n = t.numbers("norm");
        RVec le, ln;
        for (std::size_t i = 0; i < e.size(); ++i)
            if (n[i] > 0.0) {
                le.push_back(std::log(e[i]));
                ln.push_back(std::log(n[i]));
            }
        if (le.size() < 2) throw DataError("slope_sweep needs at least two nonzero norms");
        const LinearFit f = linear_fit(le, ln);
        body << "# slope = " << f.slope << "\n# intercept = " << f.intercept << '\n';
        body << "log_eps,log_norm,slope,intercept\n";
        for (std::size_t i = 0; i < le.size(); ++i)
            body << le[i] << ',' << ln[i] << ',' << f.slope << ',' << f.intercept << '\n';
    } else if (kind == "norm_ratio") {
        const Table t = read_table(run_dir / "norms.csv");
        const std::size_t cc = t.col("component");
        const RVec b = t.numbers("besov"), p = t.numbers("plancherel");
        body << "component,besov,plancherel,ratio\n";
        for (std::size_t i = 0; i < b.size(); ++i)
            body << t.rows[i][cc] << ',' << b[i] << ',' << p[i] << ',' << (b[i] > 0.0 ? p[i] / b[i] : 0.0) << '\n';
    } else {
        throw ConfigError("export kind must be decay_fit, ionization_curve, slope_sweep or norm_ratio");
    }
    std::ofstream f(out);
    if (!f) throw ResourceError("cannot write " + out.string());
    f << body.str();
    return out;
}

RunManifest run_experiment(const std::string& sub, const RunConfig& cfg, const RunOptions& opt) {
    static const char* subs[] = {"bound-states", "paths-gen", "paths-norms", "evolve", "nls", "modulation",
                                 "kernel-norm", "ionization-sweep", "report", "export"};
    if (std::none_of(std::begin(subs), std::end(subs), [&](const char* s) { return sub == s; }))
        throw ConfigError("unknown subcommand '" + sub + "'");
    const double need = estimate_memory(sub, cfg);
    if (need > cfg.memory_cap_bytes)
        throw ResourceError("estimated memory " + std::to_string(need / 1e9) + " GB exceeds the cap of " +
                            std::to_string(cfg.memory_cap_bytes / 1e9) + " GB");

    RunManifest man;
    man.subcommand = sub;
    man.config = cfg.echo;
    std::vector<std::string> extra = opt.args;
    if (opt.sweep) extra.push_back("--sweep");
    man.run_id = compute_run_id(cfg.echo, sub, extra);
    man.started = now_iso();
    const fs::path root = opt.output_root.empty() ? output_root() : opt.output_root;
    man.dir = root / (sub + "-" + man.run_id.substr(0, 16));

    // Everything is computed before the run directory is created, so a failing run
    // leaves no partial outputs behind.
    std::vector<std::pair<std::string, std::function<void(const fs::path&)>>> writers;
    auto add = [&](std::string name, std::function<void(const fs::path&)> w) {
        writers.emplace_back(std::move(name), std::move(w));
    };

    if (sub == "bound-states") {
        auto basis = solve_basis(cfg);
        json st = json::array();
        for (const auto& s : basis->states) {
            json j{{"E", s.E}, {"residual", s.residual}};
            j["decay"] = decay_json(check_exponential_decay(s.g, s.E, cfg.profile.width));
            st.push_back(j);
        }
        man.summary["states"] = st;
        man.summary["count"] = basis->size();
        man.summary["gram_error"] = basis->gram_error();
        man.summary["iterations"] = basis->iterations;
        man.flags["threshold_resonance"] = basis->threshold_flag;
        const std::string id = man.run_id;
        add("basis", [basis, id](const fs::path& p) { write_basis(p, *basis, id); });
    } else if (sub == "paths-gen") {
        const ParamPath p = cfg.path;
        man.summary["samples"] = p.count();
        man.summary["T"] = p.T();
        add("path.csv", [p](const fs::path& f) { write_path_csv(f, p); });
        add("path.csv.json", [](const fs::path&) {});
    } else if (sub == "paths-norms") {
        ParamPath p = cfg.path;
        if (!opt.args.empty()) p = read_path_csv(opt.args.front());
        std::vector<std::pair<std::string, const PathComponent*>> chans;
        const char* ax[3] = {"x", "y", "z"};
        for (int a = 0; a < p.dim; ++a) {
            chans.emplace_back(std::string("D_") + ax[a], &p.D[a]);
            chans.emplace_back(std::string("v_") + ax[a], &p.v[a]);
        }
        chans.emplace_back("beta", &p.beta);
        chans.emplace_back("alpha", &p.alpha);
        std::ostringstream csv;
        csv << std::setprecision(17) << "component,besov,plancherel,gamma_upper,sup,bv,jumps\n";
        json comps = json::object();
        for (const auto& [name, c] : chans) {
            const auto rep = gamma_norm_estimate(c->values, c->dt);
            double besov = 0.0;
            if (besov_scale_count(c->count(), c->dt) >= 4) besov = besov_norm(c->values, c->dt, 0.5);
            const double pl = h12_norm_fourier(c->values, c->dt);
            comps[name] = json{{"besov", besov},  {"plancherel", pl}, {"gamma_upper", rep.gamma_upper},
                               {"sup", rep.sup},  {"bv", rep.bv},     {"jumps", rep.jumps.size()},
                               {"tag", to_string(c->tag)}};
            csv << name << ',' << besov << ',' << pl << ',' << rep.gamma_upper << ',' << rep.sup << ','
                << rep.bv << ',' << rep.jumps.size() << '\n';
        }
        man.summary["components"] = comps;
        const std::string text = csv.str();
        add("norms.csv", [text](const fs::path& f) { std::ofstream(f) << text; });
    } else if (sub == "evolve" || sub == "nls" || sub == "modulation") {
        EvolveConfig ec = cfg.evolve;
        std::shared_ptr<const BoundStateBasis> basis;
        if (!cfg.profile.is_zero()) {
            basis = solve_basis(cfg);
            ec.basis = basis;
            man.flags["threshold_resonance"] = basis->threshold_flag;
        }
        if (sub == "modulation") {
            if (!basis || basis->empty()) throw ConfigError("modulation needs a potential with bound states");
            ec.probes = generator_probes(*basis);
            ec.record_stride = 1;
        }
        if (sub == "nls") ec.record_lorentz = true;
        const TrajectoryBundle run = sub == "nls" ? nls_evolve(ec) : evolve(ec);
        man.flags.update(run_flags(run));
        man.summary = run_summary(run);
        if (sub == "nls") {
            EvolveConfig lin = ec;
            lin.source.kind = SourceSpec::Kind::none;
            const TrajectoryBundle lr = evolve(lin);
            const double s_nl = strichartz_accumulate(run).l2_l62, s_l = strichartz_accumulate(lr).l2_l62;
            man.summary["strichartz_linear"] = s_l;
            man.summary["strichartz_ratio"] = s_l > 0.0 ? s_nl / s_l : 0.0;
        }
        if (sub == "modulation") {
            const RVec Et = calibrated_energies(*basis, cfg.profile, ec.dt);
            const ModulationResult mod = evolve_modulation_integral(run, *basis, ec.path, Et);
            const ChannelReport ch = wave_operator_estimate(mod);
            man.summary["consistency"] = mod.consistency;
            man.summary["modulus_consistency"] = mod.modulus_consistency;
            man.summary["max_A_unitarity"] = mod.max_A_unitarity;
            man.summary["max_B_unitarity"] = mod.max_B_unitarity;
            man.summary["max_P_hermiticity"] = mod.max_P_hermiticity;
            man.summary["channel_cauchy_residual"] = ch.cauchy_residual;
            man.flags["large_beta"] = mod.large_beta || run.large_beta;
            man.flags["channel_not_settled"] = ch.flagged;
            std::ostringstream csv;
            csv << std::setprecision(17) << "t";
            const std::size_t N = basis->size();
            for (std::size_t k = 0; k < N; ++k)
                csv << ",direct" << k << "_re,direct" << k << "_im,modulation" << k << "_re,modulation" << k
                    << "_im,channel" << k << "_re,channel" << k << "_im";
            csv << ",A_unitarity,B_unitarity\n";
            for (std::size_t n = 0; n < mod.times.size(); ++n) {
                csv << mod.times[n];
                for (std::size_t k = 0; k < N; ++k)
                    csv << ',' << mod.zeta_direct[n](k).real() << ',' << mod.zeta_direct[n](k).imag() << ','
                        << mod.zeta_modulation[n](k).real() << ',' << mod.zeta_modulation[n](k).imag() << ','
                        << ch.channel[n][k].real() << ',' << ch.channel[n][k].imag();
                const auto I = CMatrix::Identity(N, N);
                csv << ',' << (mod.A[n].adjoint() * mod.A[n] - I).cwiseAbs().maxCoeff() << ','
                    << (mod.B[n].adjoint() * mod.B[n] - I).cwiseAbs().maxCoeff() << '\n';
            }
            const std::string text = csv.str();
            add("modulation.csv", [text](const fs::path& f) { std::ofstream(f) << text; });
        }
        auto shared = std::make_shared<const TrajectoryBundle>(run);
        add("diagnostics.csv", [shared](const fs::path& f) { write_diagnostics_csv(f, *shared); });
        const std::string id = man.run_id;
        for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
            std::ostringstream name;
            name << "snap_" << std::setw(5) << std::setfill('0') << i;
            add(name.str() + ".bin", [shared, i, id, stem = name.str()](const fs::path& f) {
                write_snapshot(f.parent_path() / stem, shared->snapshots[i], id);
            });
            add(name.str() + ".json", [](const fs::path&) {});
        }
    } else if (sub == "kernel-norm") {
        std::ostringstream csv;
        csv << std::setprecision(17) << "eps,norm\n";
        if (opt.sweep) {
            const KernelSweep ks = kernel_norm_sweep(cfg.grid, cfg.profile, cfg.kernel, cfg.seed);
            for (std::size_t i = 0; i < ks.eps.size(); ++i) csv << ks.eps[i] << ',' << ks.norms[i] << '\n';
            man.summary["slope"] = ks.fit.slope;
            man.summary["intercept"] = ks.fit.intercept;
            man.summary["zero_norm"] = ks.zero_norm;
            man.flags["not_converged"] = !ks.converged;
        } else {
            const double T = cfg.kernel.dt * double(cfg.kernel.slices - 1);
            if (cfg.path.T() < T - 1e-9) throw ConfigError("path shorter than the kernel time grid");
            const ParamPath zero = ParamPath::zero(cfg.grid.dim, T, cfg.kernel.dt);
            NormEstimateOptions no;
            no.max_iter = cfg.kernel.max_iter;
            no.seed = cfg.seed;
            const auto est = operator_norm_estimate(cfg.path, zero, cfg.profile, cfg.grid, cfg.kernel.dt,
                                                    cfg.kernel.slices, no);
            man.summary["norm"] = est.value;
            man.summary["iterations"] = est.iterations;
            man.flags["not_converged"] = !est.converged;
            csv << "nan," << est.value << '\n';
        }
        const std::string text = csv.str();
        add("kernel.csv", [text](const fs::path& f) { std::ofstream(f) << text; });
    } else if (sub == "ionization-sweep") {
        if (cfg.sweep.amplitudes.empty()) throw SchemaError("sweep.amplitudes: required for ionization-sweep");
        EvolveConfig ec = cfg.evolve;
        auto basis = solve_basis(cfg);
        if (basis->empty()) throw ConfigError("ionization sweep needs a potential with bound states");
        ec.basis = basis;
        ec.initial.kind = InitialSpec::Kind::ground_state;
        const IonizationSweep sw = ionization_sweep(ec, cfg.sweep.amplitudes, cfg.sweep.q, cfg.sweep.K,
                                                    cfg.seed, opt.workers);
        man.summary["spearman"] = sw.spearman;
        man.summary["threshold"] = sw.threshold;
        man.summary["stationary_tail_min"] = sw.stationary_tail_min;
        bool breach = false;
        std::ostringstream csv;
        csv << std::setprecision(17) << "amplitude,tail_min,transfer,max_boundary,breach\n";
        for (const auto& p : sw.points) {
            csv << p.amplitude << ',' << p.tail_min << ',' << p.transfer << ',' << p.max_boundary << ','
                << int(p.breach) << '\n';
            breach = breach || p.breach;
        }
        if (cfg.sweep.pairs > 0) {
            const double sup = cfg.sweep.amplitudes.front();
            const auto pairs = brownian_contrast(ec, sup, cfg.sweep.pairs, cfg.sweep.q, cfg.sweep.K, cfg.seed,
                                                 opt.workers);
            int wins = 0;
            std::ostringstream cc;
            cc << std::setprecision(17) << "pair,h12_tail_min,brownian_tail_min\n";
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                wins += pairs[i].brownian_tail < pairs[i].h12_tail;
                breach = breach || pairs[i].breach;
                cc << i << ',' << pairs[i].h12_tail << ',' << pairs[i].brownian_tail << '\n';
            }
            man.summary["brownian_wins"] = wins;
            man.summary["pairs"] = pairs.size();
            const std::string text = cc.str();
            add("contrast.csv", [text](const fs::path& f) { std::ofstream(f) << text; });
        }
        man.flags["wraparound_breach"] = breach;
        man.flags["threshold_resonance"] = basis->threshold_flag;
        const std::string text = csv.str();
        add("ionization.csv", [text](const fs::path& f) { std::ofstream(f) << text; });
        // one child directory per amplitude, each with its own manifest
        for (std::size_t i = 0; i < sw.points.size(); ++i) {
            const auto p = sw.points[i];
            const std::string child = "child_" + std::to_string(i);
            const json parent = man.config;
            const std::string pid = man.run_id;
            add(child + "/manifest.json", [p, parent, pid, child](const fs::path& f) {
                fs::create_directories(f.parent_path());
                json c;
                c["parent_run_id"] = pid;
                c["run_id"] = compute_run_id(parent, "ionization-child", {fmt(p.amplitude)});
                c["amplitude"] = p.amplitude;
                c["summary"] = json{{"tail_min", p.tail_min}, {"transfer_estimate", p.transfer},
                                    {"max_boundary_fraction", p.max_boundary}};
                c["flags"] = json{{"wraparound_breach", p.breach}};
                write_json(f, c);
            });
        }
    } else if (sub == "report") {
        if (opt.args.empty()) throw ConfigError("report needs at least one run directory");
        json runs = json::array();
        std::ostringstream csv;
        csv << "run_id,subcommand,flags\n";
        for (const auto& d : opt.args) {
            const json m = read_json(fs::path(d) / "manifest.json");
            runs.push_back(json{{"dir", d}, {"run_id", m.at("run_id")}, {"subcommand", m.at("subcommand")},
                                {"summary", m.value("summary", json::object())},
                                {"flags", m.value("flags", json::object())}});
            std::string raised;
            for (auto& [k, v] : m.value("flags", json::object()).items())
                if (v.is_boolean() && v.get<bool>()) raised += (raised.empty() ? "" : ";") + k;
            csv << m.at("run_id").get<std::string>() << ',' << m.at("subcommand").get<std::string>() << ','
                << raised << '\n';
        }
        man.summary["runs"] = runs;
        const std::string text = csv.str();
        add("report.csv", [text](const fs::path& f) { std::ofstream(f) << text; });
    } else if (sub == "export") {
        if (opt.args.size() < 2) throw ConfigError("export needs a run directory and a kind");
        const fs::path src = opt.args[0];
        const std::string kind = opt.args[1];
        // write straight into the source run: the plot data belongs to it
        const fs::path out = export_plot_data(src, kind);
        man.summary["exported"] = out.string();
        man.dir = src;
        man.finished = now_iso();
        man.outputs.push_back(out.filename().string());
        return man;
    }

    fs::remove_all(man.dir);
    fs::create_directories(man.dir);
    for (auto& [name, w] : writers) {
        w(man.dir / name);
        man.outputs.push_back(name);
    }
    man.finished = now_iso();
    man.outputs.push_back("summary.json");
    man.outputs.push_back("manifest.json");
    json summary = man.summary;
    summary["run_id"] = man.run_id;
    summary["flags"] = man.flags;
    write_json(man.dir / "summary.json", summary);
    write_json(man.dir / "manifest.json", man.to_json());
    return man;
}

} // namespace rps
