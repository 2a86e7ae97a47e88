#include "rpslab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "rpslab/errors.hpp"

namespace rps {

std::string to_string(Modality m) {
    switch (m) {
    case Modality::bv: return "bv";
    case Modality::h12c: return "h12c";
    case Modality::brownian: return "brownian";
    case Modality::composite: return "composite";
    case Modality::smooth: return "smooth";
    }
    return "smooth";
}

Modality modality_from_string(const std::string& s) {
    if (s == "bv") return Modality::bv;
    if (s == "h12c" || s == "h12") return Modality::h12c;
    if (s == "brownian") return Modality::brownian;
    if (s == "composite") return Modality::composite;
    if (s == "smooth") return Modality::smooth;
    throw SchemaError("unknown path modality '" + s + "'");
}

std::size_t sample_count(double T, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("path step dt must be positive");
    if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("path horizon T must be nonnegative");
    const double steps = T / dt;
    const double r = std::round(steps);
    if (std::abs(steps - r) > 1e-8 * std::max(1.0, r))
        throw ConfigError("T/dt must be an integer");
    return static_cast<std::size_t>(r) + 1;
}

double PathComponent::at(double t) const {
    if (values.empty()) return 0.0;
    const std::size_t n = values.size();
    if (n == 1 || t <= 0.0) return values.front();
    const double s = t / dt;
    if (s >= double(n - 1)) return values.back();
    if (tag == Modality::bv) {
        // right-continuous: a sample at t_j already carries the jump at t_j
        auto j = static_cast<std::size_t>(std::floor(s + 1e-9));
        return values[std::min(j, n - 1)];
    }
    auto j = static_cast<std::size_t>(std::floor(s));
    const double w = s - double(j);
    return (1.0 - w) * values[j] + w * values[j + 1];
}

std::vector<std::pair<double, double>> merge_jumps(std::vector<std::pair<double, double>> jumps) {
    std::sort(jumps.begin(), jumps.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<double, double>> out;
    for (const auto& j : jumps) {
        if (!out.empty() && out.back().first == j.first)
            out.back().second += j.second;
        else
            out.push_back(j);
    }
    return out;
}

PathComponent gen_bv_step_path(std::vector<std::pair<double, double>> jumps, double T, double dt) {
    const std::size_t n = sample_count(T, dt);
    PathComponent p;
    p.dt = dt;
    p.tag = Modality::bv;
    p.values.assign(n, 0.0);
    for (const auto& [time, inc] : merge_jumps(std::move(jumps))) {
        if (!(time >= 0.0 && time <= T * (1 + 1e-12)))
            throw RangeError("jump time outside [0, T]");
        if (!std::isfinite(inc)) throw RangeError("jump increment not finite");
        auto first = static_cast<std::size_t>(std::ceil(time / dt - 1e-9));
        for (std::size_t j = first; j < n; ++j) p.values[j] += inc;
    }
    return p;
}

PathComponent gen_h12_path(double amplitude, double q, int K, std::uint64_t seed, double T,
                           double dt) {
    if (!(q > 0.5)) throw RangeError("h12 synthesis needs q > 1/2");
    if (K < 1) throw RangeError("h12 synthesis needs K >= 1");
    if (!(T > 0.0)) throw RangeError("h12 synthesis needs T > 0");
    const std::size_t n = sample_count(T, dt);
    PathComponent p;
    p.dt = dt;
    p.tag = Modality::h12c;
    p.values.assign(n, 0.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    RVec phase(K), coef(K);
    for (int k = 1; k <= K; ++k) {
        phase[k - 1] = uni(rng);
        coef[k - 1] = amplitude / (k * std::pow(1.0 + std::log(double(k)), q));
    }
    if (amplitude == 0.0) return p;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = dt * double(j);
        double s = 0.0;
        for (int k = 1; k <= K; ++k)
            s += coef[k - 1] * std::cos(2.0 * std::numbers::pi * k * t / T + phase[k - 1]);
        p.values[j] = s;
    }
    return p;
}

PathComponent gen_brownian_path(double sigma2, std::uint64_t seed, double T, double dt) {
    if (!(sigma2 >= 0.0)) throw RangeError("Brownian diffusion must be nonnegative");
    const std::size_t n = sample_count(T, dt);
    PathComponent p;
    p.dt = dt;
    p.tag = Modality::brownian;
    p.values.assign(n, 0.0);
    if (sigma2 == 0.0) return p;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2 * dt));
    for (std::size_t j = 1; j < n; ++j) p.values[j] = p.values[j - 1] + gauss(rng);
    return p;
}

PathComponent constant_path(double value, double T, double dt) {
    PathComponent p;
    p.dt = dt;
    p.tag = Modality::smooth;
    p.values.assign(sample_count(T, dt), value);
    return p;
}

PathComponent sampled_path(RVec values, double dt, Modality tag) {
    if (!(dt > 0.0)) throw ConfigError("path step dt must be positive");
    PathComponent p;
    p.values = std::move(values);
    p.dt = dt;
    p.tag = tag;
    return p;
}

ParamPath ParamPath::zero(int dim, double T, double dt) {
    if (dim != 1 && dim != 3) throw ConfigError("path dimension must be 1 or 3");
    ParamPath p;
    p.dim = dim;
    p.dt = dt;
    for (int a = 0; a < 3; ++a) {
        p.D[a] = constant_path(0.0, T, dt);
        p.v[a] = constant_path(0.0, T, dt);
    }
    p.beta = constant_path(0.0, T, dt);
    p.alpha = constant_path(0.0, T, dt);
    p.finalize();
    return p;
}

void ParamPath::finalize() {
    if (dim != 1 && dim != 3) throw ConfigError("path dimension must be 1 or 3");
    const std::size_t n = beta.count();
    if (n == 0) throw DataError("empty path");
    auto check = [&](PathComponent& c, const char* name) {
        if (c.values.empty()) c.values.assign(n, 0.0), c.dt = dt;
        if (c.count() != n) throw DataError(std::string("path channel ") + name + " has wrong length");
        if (std::abs(c.dt - dt) > 1e-12 * dt) throw DataError(std::string("path channel ") + name + " has wrong step");
        for (double x : c.values)
            if (!std::isfinite(x)) throw DataError(std::string("path channel ") + name + " not finite");
    };
    for (int a = 0; a < 3; ++a) {
        check(D[a], "D");
        check(v[a], "v");
    }
    check(beta, "beta");
    check(alpha, "alpha");
    for (int a = 0; a < 3; ++a) {
        gamma[a].assign(n, 0.0);
        double I = 0.0;
        gamma[a][0] = D[a].values[0];
        for (std::size_t j = 1; j < n; ++j) {
            if (v[a].tag == Modality::bv)
                I += dt * v[a].values[j - 1];
            else
                I += 0.5 * dt * (v[a].values[j - 1] + v[a].values[j]);
            gamma[a][j] = D[a].values[j] + 2.0 * I;
        }
    }
}

void ParamPath::normalize_origin() {
    for (int a = 0; a < 3; ++a) {
        const double g0 = gamma[a].empty() ? D[a].values.front() : gamma[a][0];
        for (double& x : D[a].values) x -= g0;
    }
    finalize();
}

Vec3 ParamPath::D_at(double t) const { return {D[0].at(t), D[1].at(t), D[2].at(t)}; }
Vec3 ParamPath::v_at(double t) const { return {v[0].at(t), v[1].at(t), v[2].at(t)}; }

Vec3 ParamPath::gamma_at(double t) const {
    Vec3 g{0, 0, 0};
    const std::size_t n = count();
    double s = std::clamp(t / dt, 0.0, double(n - 1));
    auto j = static_cast<std::size_t>(std::floor(s));
    if (j >= n - 1) j = n - 1;
    const double w = (s - double(j)) * dt;
    for (int a = 0; a < 3; ++a) {
        // ∫v up to t_j, then the partial cell with v interpolated like at()
        const double Ij = 0.5 * (gamma[a][j] - D[a].values[j]);
        double part = 0.0;
        if (w > 0.0 && j + 1 < n) {
            const double v0 = v[a].values[j];
            if (v[a].tag == Modality::bv) {
                part = w * v0;
            } else {
                const double v1 = v[a].values[j + 1];
                part = w * v0 + 0.5 * w * w / dt * (v1 - v0);
            }
        }
        g[a] = D[a].at(t) + 2.0 * (Ij + part);
    }
    return g;
}

FrameParams ParamPath::frame_at(double t) const {
    FrameParams fp;
    fp.gamma = gamma_at(t);
    fp.v = v_at(t);
    fp.beta = beta.at(t);
    fp.alpha = alpha.at(t);
    for (int a = dim; a < 3; ++a) fp.gamma[a] = fp.v[a] = 0.0;
    return fp;
}

double ParamPath::max_abs_beta() const {
    double m = 0.0;
    for (double b : beta.values) m = std::max(m, std::abs(b));
    return m;
}

bool ParamPath::finite() const {
    auto ok = [](const RVec& x) {
        return std::all_of(x.begin(), x.end(), [](double y) { return std::isfinite(y); });
    };
    for (int a = 0; a < 3; ++a)
        if (!ok(D[a].values) || !ok(v[a].values) || !ok(gamma[a])) return false;
    return ok(beta.values) && ok(alpha.values);
}

namespace {

const char* kAxis[3] = {"x", "y", "z"};

nlohmann::json tags_json(const ParamPath& p) {
    nlohmann::json t;
    for (int a = 0; a < p.dim; ++a) {
        t[std::string("D_") + kAxis[a]] = to_string(p.D[a].tag);
        t[std::string("v_") + kAxis[a]] = to_string(p.v[a].tag);
    }
    t["beta"] = to_string(p.beta.tag);
    t["alpha"] = to_string(p.alpha.tag);
    return t;
}

} // namespace

void write_path_csv(const std::filesystem::path& csv, const ParamPath& p) {
    std::ofstream out(csv);
    if (!out) throw ResourceError("cannot write " + csv.string());
    out.precision(17);
    out << "t";
    for (int a = 0; a < p.dim; ++a) out << ",D_" << kAxis[a];
    for (int a = 0; a < p.dim; ++a) out << ",v_" << kAxis[a];
    out << ",beta,alpha\n";
    for (std::size_t j = 0; j < p.count(); ++j) {
        out << p.time(j);
        for (int a = 0; a < p.dim; ++a) out << ',' << p.D[a].values[j];
        for (int a = 0; a < p.dim; ++a) out << ',' << p.v[a].values[j];
        out << ',' << p.beta.values[j] << ',' << p.alpha.values[j] << '\n';
    }
    nlohmann::json meta = p.metadata;
    meta["dim"] = p.dim;
    meta["dt"] = p.dt;
    meta["T"] = p.T();
    meta["tags"] = tags_json(p);
    std::ofstream js(csv.string() + ".json");
    js << meta.dump(2) << '\n';
}

ParamPath read_path_csv(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw DataError("cannot read path file " + csv.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("path file is empty");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    int dim = 0;
    if (cols.size() == 5) dim = 1;
    else if (cols.size() == 9) dim = 3;
    else throw SchemaError("path CSV needs columns t, D_*, v_*, beta, alpha");
    std::vector<RVec> data(cols.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string c;
        std::size_t i = 0;
        while (std::getline(ss, c, ',')) {
            if (i >= cols.size()) throw SchemaError("path CSV row has too many fields");
            try {
                data[i++].push_back(std::stod(c));
            } catch (const std::exception&) {
                throw SchemaError("path CSV field '" + c + "' is not a number");
            }
        }
        if (i != cols.size()) throw SchemaError("path CSV row has too few fields");
    }
    if (data[0].size() < 2) throw SchemaError("path CSV needs at least two samples");
    const double dt = data[0][1] - data[0][0];

    std::map<std::string, Modality> tags;
    nlohmann::json meta = nlohmann::json::object();
    const std::filesystem::path side = csv.string() + ".json";
    if (std::filesystem::exists(side)) {
        std::ifstream js(side);
        try {
            meta = nlohmann::json::parse(js);
        } catch (const std::exception& e) {
            throw SchemaError(std::string("path metadata: ") + e.what());
        }
        if (meta.contains("tags"))
            for (auto& [k, v] : meta["tags"].items()) tags[k] = modality_from_string(v.get<std::string>());
    }
    auto tag = [&](const std::string& name) {
        auto it = tags.find(name);
        return it == tags.end() ? Modality::smooth : it->second;
    };

    ParamPath p;
    p.dim = dim;
    p.dt = dt;
    p.metadata = meta;
    for (int a = 0; a < dim; ++a) {
        p.D[a] = sampled_path(data[1 + a], dt, tag(std::string("D_") + kAxis[a]));
        p.v[a] = sampled_path(data[1 + dim + a], dt, tag(std::string("v_") + kAxis[a]));
    }
    p.beta = sampled_path(data[1 + 2 * dim], dt, tag("beta"));
    p.alpha = sampled_path(data[2 + 2 * dim], dt, tag("alpha"));
    p.finalize();
    return p;
}

} // namespace rps
