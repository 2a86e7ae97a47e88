// Acceptance gate. `acceptance` runs every criterion; `acceptance --only N` runs one.
// One line per criterion: "C<N> PASS|FAIL <name>: <measured values>".

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/gaussian.hpp"
#include "oracles/sturm.hpp"
#include "rpslab/diagnostics.hpp"
#include "rpslab/duhamel.hpp"
#include "rpslab/errors.hpp"
#include "rpslab/experiments.hpp"
#include "rpslab/fit.hpp"
#include "rpslab/frame.hpp"
#include "rpslab/modulation.hpp"
#include "rpslab/path_norms.hpp"
#include "rpslab/paths.hpp"
#include "rpslab/propagator.hpp"
#include "rpslab/spectral.hpp"

using namespace rps;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Detail {
    std::ostringstream s;
    template <class T>
    Detail& operator()(const char* key, const T& v) {
        if (s.tellp() > 0) s << ", ";
        s << key << '=' << v;
        return *this;
    }
    std::string str() const { return s.str(); }
};

ComplexField gaussian_field(const Grid& g, double sigma) {
    ComplexField f(g);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const auto ijk = g.unravel(idx);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += g.x(ijk[a]) * g.x(ijk[a]);
        f.values[idx] = std::exp(-r2 / (2 * sigma * sigma));
    }
    return f;
}

PathComponent sine(double amp, double omega, double T, double dt) {
    PathComponent c = constant_path(0.0, T, dt);
    for (std::size_t j = 0; j < c.count(); ++j) c.values[j] = amp * std::sin(omega * dt * double(j));
    return c;
}

double max_mass_drift(const TrajectoryBundle& run) {
    double d = 0.0;
    const double m0 = run.records.front().mass;
    for (const auto& r : run.records) d = std::max(d, std::abs(r.mass - m0) / m0);
    return d;
}

// ---------------------------------------------------------------------------

Outcome c1_unitarity() {
    EvolveConfig c;
    c.grid = Grid(3, 64, 10.0);
    c.profile = PotentialProfile::gaussian(10.0, 1.0);
    c.dt = 5e-4;
    c.T = 1.0;
    c.path = ParamPath::zero(3, 1.0, 5e-4);
    c.path.D[0] = sine(0.5, 2.0, 1.0, 5e-4);
    c.path.finalize();
    c.initial.sigma = 1.0;
    c.record_stride = 100;
    c.record_energy = false;
    const auto run = evolve(c);
    const double drift = max_mass_drift(run);
    Detail d;
    d("steps", c.steps())("mass_drift", drift)("breach", run.wraparound_breach);
    return {drift <= 1e-7 && !run.aborted && c.steps() == 2000, d.str()};
}

Outcome c2_free_decay() {
    const Grid g(3, 256, 90.0);
    const ComplexField z0 = gaussian_field(g, 1.0);
    RVec lt, ls;
    double boundary = 0.0;
    const int probes = 10;
    for (int i = 0; i < probes; ++i) {
        const double t = 1.25 * std::pow(10.0, double(i) / (probes - 1));
        ComplexField z = z0;
        detail::free_propagate_inplace(g, z.values.data(), t);
        double sup = 0.0;
        for (const auto& v : z.values) sup = std::max(sup, std::abs(v));
        lt.push_back(std::log(t));
        ls.push_back(std::log(sup));
        if (i == probes - 1) boundary = boundary_fraction(z, 0.125);
    }
    const auto fit = linear_fit(lt, ls);
    Detail d;
    d("slope", fit.slope)("r2", fit.r2)("window", "[1.25,12.5]")("boundary_fraction", boundary);
    return {std::abs(fit.slope + 1.5) <= 0.05 && boundary <= 1e-4, d.str()};
}

Outcome c3_gaussian_oracle() {
    EvolveConfig c;
    c.grid = Grid(3, 64, 12.0);
    c.profile = PotentialProfile::zero();
    c.dt = 0.01;
    c.T = 0.8;
    c.path = ParamPath::zero(3, 0.8, 0.01);
    c.initial.sigma = 1.0;
    c.record_stride = 1000;
    c.record_energy = false;
    const auto run = evolve(c);
    double err = 0.0;
    const Grid& g = c.grid;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const auto ijk = g.unravel(idx);
        cplx ex = 1.0;
        for (int a = 0; a < 3; ++a) ex *= oracle::spreading_gaussian_1d(g.x(ijk[a]), c.T, 1.0);
        err = std::max(err, std::abs(run.final_state.values[idx] - ex));
    }
    const double rel = err / oracle::spreading_gaussian_sup(c.T, 1.0, 3);
    Detail d;
    d("max_rel_error", rel);
    return {rel <= 1e-6, d.str()};
}

Outcome c4_lorentz() {
    // measure-1 indicator on a 3D grid with cell volume 1/64
    const Grid g(3, 16, 2.0);
    ComplexField ind(g);
    for (std::size_t i = 0; i < 64; ++i) ind.values[i * 37 % g.size()] = 1.0;
    double measure = 0.0;
    for (const auto& v : ind.values) measure += std::norm(v) * g.cell_volume();
    const double l62 = lorentz_norm(ind, 6.0, 2.0);
    const double e1 = std::abs(l62 - std::sqrt(3.0));

    ComplexField f(g);
    std::uint64_t s = 88172645463325252ull;
    for (auto& v : f.values) {
        s ^= s << 13, s ^= s >> 7, s ^= s << 17;
        v = {double(s % 1000) / 1000.0 - 0.5, double((s >> 20) % 1000) / 1000.0 - 0.5};
    }
    const double e2 = std::abs(lorentz_norm(f, 2.0, 2.0) - f.norm()) / f.norm();
    Detail d;
    d("indicator_measure", measure)("l62_error", e1)("l22_vs_l2_rel_error", e2);
    return {e1 <= 1e-12 && e2 <= 1e-12 && std::abs(measure - 1.0) < 1e-15, d.str()};
}

Outcome c5_bound_states() {
    const Grid g(3, 64, 8.0);
    const auto prof = PotentialProfile::gaussian(10.0, 1.0);
    const auto b = solve_bound_states(prof, g, 1, 1e-7);
    if (b.empty()) return {false, "no bound state found"};
    const auto& s = b.states[0];
    const auto dec = check_exponential_decay(s.g, s.E, prof.width);
    // radial oracle: u = r g on (0, R]
    auto V = [](double r) { return -10.0 * std::exp(-r * r); };
    const double E_oracle = oracle::refined_eigenvalue(V, 0.0, 12.0, 6000, 0, -10.0, 0.0);
    const double e_rel = std::abs(s.E - E_oracle) / std::abs(E_oracle);
    const double res_rel = s.residual / std::abs(s.E);
    Detail d;
    d("E0", s.E)("E_oracle", E_oracle)("E_rel_error", e_rel)("residual_rel", res_rel)("decay_rate", dec.rate)(
        "sqrt(-E0)", dec.target)("decay_rel_error", dec.rel_error)("fit_r2", dec.r2);
    return {res_rel <= 1e-6 && !dec.inconclusive && dec.rel_error <= 0.1 && e_rel <= 0.01, d.str()};
}

Outcome c6_besov() {
    const double T = 10.0, dt = T / 4096;
    std::vector<RVec> corpus;
    const double qs[6] = {0.8, 1.0, 1.1, 1.3, 1.6, 2.0};
    for (int i = 0; i < 6; ++i) corpus.push_back(gen_h12_path(1.0, qs[i], 256, 100 + i, T, dt).values);
    for (int i = 0; i < 2; ++i) corpus.push_back(sine(1.0, 0.7 * (i + 1), T, dt).values);
    for (int i = 0; i < 2; ++i) {
        RVec f = gen_h12_path(0.5, 1.1, 256, 200 + i, T, dt).values;
        const RVec s = sine(1.0, 1.3 + i, T, dt).values;
        for (std::size_t j = 0; j < f.size(); ++j) f[j] += s[j];
        corpus.push_back(f);
    }
    double rmin = 1e300, rmax = 0.0;
    for (const auto& f : corpus) {
        const double r = besov_norm(f, dt, 0.5) / h12_norm_fourier(f, dt);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    // unit step: the estimate grows like sqrt(log(1/dt)) under refinement
    RVec lev, sq;
    bool increasing = true;
    double tv_err = 0.0, prev = 0.0;
    for (int k = 8; k <= 16; ++k) {
        const double h = 1.0 / double(1 << k);
        const auto u = gen_bv_step_path({{0.5 + 0.5 * h, 1.0}}, 1.0, h);
        const double e = besov_norm(u.values, h, 0.5);
        increasing = increasing && e > prev;
        prev = e;
        lev.push_back(k);
        sq.push_back(e * e);
        tv_err = std::max(tv_err, std::abs(total_variation(to_complex(u.values)) - 1.0));
    }
    const auto fit = linear_fit(lev, sq);
    const bool log_div = increasing && fit.slope > 0.0 && fit.r2 >= 0.95;
    Detail d;
    d("ratio_min", rmin)("ratio_max", rmax)("step_growth_per_level", fit.slope)("step_fit_r2", fit.r2)(
        "bv_error", tv_err);
    return {rmin >= 1.0 / 3.0 && rmax <= 3.0 && log_div && tv_err == 0.0, d.str()};
}

struct GammaConstants {
    double product = 0.0, cutoff = 0.0, exponential = 0.0;
};

GammaConstants gamma_corpus(std::uint64_t seed) {
    const double T = 10.0;
    const std::size_t n = 4096;
    const double dt = T / double(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss;
    auto draw = [&]() {
        RVec f;
        const int kind = int(uni(rng) * 3);
        if (kind == 0) {
            f = gen_h12_path(1.0, 1.1, 256, rng(), T, dt).values;
        } else if (kind == 1) {
            f.assign(n + 1, 0.0);
            const int jumps = 1 + int(uni(rng) * 4);
            for (int j = 0; j < jumps; ++j) {
                const std::size_t at = 1 + std::size_t(uni(rng) * double(n - 1));
                const double inc = gauss(rng);
                for (std::size_t i = at; i <= n; ++i) f[i] += inc;
            }
        } else {
            f = gen_brownian_path(1.0, rng(), T, dt).values;
        }
        double m = 0.0;
        for (double x : f) m = std::max(m, std::abs(x));
        // log-uniform sup in [0.1, 2]: every corpus reaches the small-norm end where the
        // exponential bound is tight
        const double target = 0.1 * std::pow(20.0, uni(rng));
        if (m > 0.0)
            for (double& x : f) x *= target / m;
        return f;
    };
    auto gnorm = [&](const RVec& f) { return gamma_norm_estimate(f, dt).gamma_upper; };
    GammaConstants c;
    for (int i = 0; i < 50; ++i) {
        const RVec f = draw(), g = draw();
        RVec fg(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) fg[j] = f[j] * g[j];
        c.product = std::max(c.product, gnorm(fg) / (gnorm(f) * gnorm(g)));
        const std::size_t t0 = 1 + std::size_t(uni(rng) * double(n - 1));
        RVec cut = f;
        for (std::size_t j = 0; j < t0; ++j) cut[j] = 0.0;
        c.cutoff = std::max(c.cutoff, gnorm(cut) / gnorm(f));
        CVec e(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) e[j] = std::polar(1.0, f[j]);
        const double gf = gnorm(f);
        c.exponential = std::max(c.exponential, gamma_norm_estimate(e, dt).gamma_upper / (1.0 + gf * gf));
    }
    return c;
}

Outcome c7_gamma_algebra() {
    const auto a = gamma_corpus(1001), b = gamma_corpus(2002);
    auto stable = [](double x, double y) { return std::max(x, y) <= 1.5 * std::min(x, y); };
    Detail d;
    d("product", std::to_string(a.product) + "/" + std::to_string(b.product))(
        "cutoff", std::to_string(a.cutoff) + "/" + std::to_string(b.cutoff))(
        "exponential", std::to_string(a.exponential) + "/" + std::to_string(b.exponential));
    const bool bounded = std::max({a.product, b.product, a.cutoff, b.cutoff, a.exponential, b.exponential}) <= 10.0;
    return {bounded && stable(a.product, b.product) && stable(a.cutoff, b.cutoff) &&
                stable(a.exponential, b.exponential),
            d.str()};
}

Outcome c8_kernel() {
    KernelConfig kc;
    kc.slices = 32;
    kc.dt = 0.05;
    kc.epsilons = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    kc.component = "gamma";
    kc.max_iter = 60;
    const Grid g(1, 128, 16.0);
    const auto prof = PotentialProfile::gaussian(4.0, 1.0);
    const auto ks = kernel_norm_sweep(g, prof, kc, 7);
    double C = 0.0;
    for (std::size_t i = 0; i < ks.eps.size(); ++i) C = std::max(C, ks.norms[i] / std::pow(ks.eps[i], 0.4));
    Detail d;
    d("slope", ks.fit.slope)("C_fit", C)("zero_norm", ks.zero_norm)("converged", ks.converged);
    return {ks.fit.slope >= 0.35 && ks.zero_norm <= 1e-12 && ks.converged, d.str()};
}

Outcome c9_energy_identity() {
    Detail d;
    bool ok = true;
    for (int dim : {1, 3}) {
        RVec res;
        for (double dt : {0.02, 0.01, 0.005}) {
            EvolveConfig c;
            c.grid = dim == 1 ? Grid(1, 256, 16.0) : Grid(3, 32, 8.0);
            c.profile = PotentialProfile::gaussian(4.0, 1.0);
            c.dt = dt;
            c.T = 1.0;
            c.path = ParamPath::zero(dim, 1.0, 1e-3);
            c.path.D[0] = sine(0.5, 2.0, 1.0, 1e-3);
            c.path.finalize();
            c.initial.sigma = 1.0;
            c.initial.center = {0.5, 0, 0};
            c.record_stride = 1;
            c.record_flux = true;
            const auto run = evolve(c);
            res.push_back(energy_flux_residual(run).max_abs);
        }
        const double o1 = std::log2(res[0] / res[1]), o2 = std::log2(res[1] / res[2]);
        ok = ok && std::abs(o1 - 2.0) <= 0.3 && std::abs(o2 - 2.0) <= 0.3;
        d(dim == 1 ? "order_1d" : "order_3d", std::to_string(o1) + "," + std::to_string(o2));

        // constant gamma: the bound state at a shifted centre keeps its energy
        EvolveConfig c;
        c.grid = dim == 1 ? Grid(1, 256, 16.0) : Grid(3, 64, 8.0);
        c.profile = PotentialProfile::gaussian(4.0, 1.0);
        c.dt = 0.005;
        c.T = 2.0;
        c.path = ParamPath::zero(dim, 2.0, 0.005);
        c.path.D[0] = constant_path(0.7, 2.0, 0.005);
        c.path.finalize();
        c.basis = std::make_shared<BoundStateBasis>(solve_bound_states(c.profile, c.grid, 1, 1e-9));
        c.initial.kind = InitialSpec::Kind::ground_state;
        c.record_stride = 10;
        const auto run = evolve(c);
        double dev = 0.0;
        const double E0 = run.records.front().total;
        for (const auto& r : run.records) dev = std::max(dev, std::abs(r.total - E0) / std::abs(E0));
        ok = ok && dev <= 1e-8;
        d(dim == 1 ? "const_gamma_drift_1d" : "const_gamma_drift_3d", dev);
    }
    return {ok, d.str()};
}

// 1D well used by the ionization, energy-bound and channel criteria
EvolveConfig ionization_base(double T, std::shared_ptr<const BoundStateBasis> basis) {
    EvolveConfig c;
    c.grid = Grid(1, 8192, 512.0);
    c.profile = PotentialProfile::gaussian(10.0, 1.0);
    c.dt = 0.005;
    c.T = T;
    c.path = ParamPath::zero(1, T, 0.005);
    c.basis = std::move(basis);
    c.initial.kind = InitialSpec::Kind::ground_state;
    c.record_stride = 20;
    c.record_energy = false;
    return c;
}

std::shared_ptr<const BoundStateBasis> ionization_basis() {
    static const auto b = std::make_shared<BoundStateBasis>(
        solve_bound_states(PotentialProfile::gaussian(10.0, 1.0), Grid(1, 8192, 512.0), 3, 1e-9));
    return b;
}

Outcome c10_energy_bound() {
    RVec lT, ratio;
    Detail d;
    bool breach = false;
    for (double T : {10.0, 20.0, 40.0}) {
        EvolveConfig c = ionization_base(T, ionization_basis());
        c.record_energy = true;
        c.path = position_path(1, matched_h12(0.3, 1.1, 256, 5, T, c.dt));
        const auto run = evolve(c);
        const auto eb = energy_bound(run);
        lT.push_back(std::log(T));
        ratio.push_back(eb.ratio);
        breach = breach || run.wraparound_breach;
        d(("sup_E/H1(T=" + std::to_string(int(T)) + ")").c_str(), eb.ratio);
    }
    const auto fit = linear_fit(lT, ratio);
    d("slope_vs_logT", fit.slope)("breach", breach);
    return {fit.slope <= 0.1 && !breach, d.str()};
}

const RVec kIonAmplitudes{0.5, 1.0, 2.0, 4.0, 8.0};

Outcome c11_incomplete_ionization() {
    const auto base = ionization_base(40.0, ionization_basis());
    const auto sw = ionization_sweep(base, kIonAmplitudes, 1.1, 256, 11, 1);
    bool below_ok = sw.threshold > 0.0, breach = false;
    std::ostringstream tails;
    for (const auto& p : sw.points) {
        if (p.amplitude <= sw.threshold) below_ok = below_ok && p.tail_min >= 0.5;
        breach = breach || p.breach;
        tails << (tails.tellp() > 0 ? "," : "") << p.tail_min;
    }
    Detail d;
    d("amplitudes", "0.5,1,2,4,8")("tail_min", tails.str())("threshold", sw.threshold)("spearman", sw.spearman)(
        "stationary_deviation", std::abs(sw.stationary_tail_min - 1.0))("breach", breach);
    return {below_ok && sw.spearman <= -0.9 && std::abs(sw.stationary_tail_min - 1.0) <= 1e-6 && !breach,
            d.str()};
}

Outcome c12_brownian_contrast() {
    const auto base = ionization_base(40.0, ionization_basis());
    const auto pairs = brownian_contrast(base, 2.0, 8, 1.1, 256, 31, 1);
    int wins = 0;
    bool breach = false;
    std::ostringstream s;
    for (const auto& p : pairs) {
        wins += p.brownian_tail < p.h12_tail;
        breach = breach || p.breach;
        s << (s.tellp() > 0 ? " " : "") << p.h12_tail << "/" << p.brownian_tail;
    }
    Detail d;
    d("sup", 2.0)("wins", std::to_string(wins) + "/8")("h12/brownian", s.str())("breach", breach);
    return {wins >= 7 && !breach, d.str()};
}

ModulationResult run_modulation(const EvolveConfig& c, const BoundStateBasis& b) {
    const auto run = evolve(c);
    return evolve_modulation_integral(run, b, c.path, calibrated_energies(b, c.profile, c.dt));
}

Outcome c13_modulation() {
    Detail d;
    // 1D, two bound states, mixed data
    auto b1 = std::make_shared<BoundStateBasis>(
        solve_bound_states(PotentialProfile::gaussian(10.0, 1.0), Grid(1, 512, 32.0), 3, 1e-9));
    EvolveConfig c;
    c.grid = b1->grid;
    c.profile = PotentialProfile::gaussian(10.0, 1.0);
    c.dt = 0.005;
    c.T = 4.0;
    c.path = ParamPath::zero(1, 4.0, 0.005);
    c.path.D[0] = sine(0.1, 1.5, 4.0, 0.005);
    c.path.finalize();
    c.basis = b1;
    c.probes = generator_probes(*b1);
    c.record_energy = false;
    c.initial.kind = InitialSpec::Kind::mix;
    c.initial.weights = {0.8, 0.5};
    c.initial.continuum_weight = 0.2;
    c.initial.center = {2.0, 0, 0};
    const auto m1 = run_modulation(c, *b1);
    d("N_1d", b1->size())("consistency_1d", m1.consistency);

    // 3D, one radial state, small sine path in D and beta
    auto b3 = std::make_shared<BoundStateBasis>(
        solve_bound_states(PotentialProfile::gaussian(10.0, 1.0), Grid(3, 32, 8.0), 1, 1e-8));
    EvolveConfig c3;
    c3.grid = b3->grid;
    c3.profile = PotentialProfile::gaussian(10.0, 1.0);
    c3.dt = 0.005;
    c3.T = 1.0;
    c3.path = ParamPath::zero(3, 1.0, 0.005);
    c3.path.D[0] = sine(0.1, 2.0, 1.0, 0.005);
    c3.path.beta = sine(0.02, 3.0, 1.0, 0.005);
    c3.path.finalize();
    c3.basis = b3;
    c3.probes = generator_probes(*b3);
    c3.record_energy = false;
    c3.initial.kind = InitialSpec::Kind::ground_state;
    const auto m3 = run_modulation(c3, *b3);

    // scalar phase B(t) = exp(i ∫ (e^{-2β}E − |v|² − v·Ḋ) ds) with v = 0, integrated by fine
    // Simpson over the sampled path the solver is handed
    const double E = m3.energies[0];
    double phase_err = 0.0;
    for (std::size_t n = 0; n < m3.times.size(); ++n) {
        const double t = m3.times[n];
        const int M = 2000;
        double acc = 0.0;
        for (int j = 0; j <= M; ++j) {
            const double s = t * j / M;
            const double w = (j == 0 || j == M) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            acc += w * std::exp(-2.0 * c3.path.beta_at(s)) * E;
        }
        acc *= t / (3.0 * M);
        phase_err = std::max(phase_err, std::abs(m3.B[n](0, 0) - std::polar(1.0, acc)));
    }
    d("N_3d", b3->size())("consistency_3d", m3.consistency)("homogeneous_phase_error", phase_err);
    return {b1->size() >= 1 && m1.consistency <= 5e-2 && m3.consistency <= 5e-2 && phase_err <= 1e-6, d.str()};
}

Outcome c14_channel_limit() {
    auto b = std::make_shared<BoundStateBasis>(
        solve_bound_states(PotentialProfile::gaussian(10.0, 1.0), Grid(1, 4096, 256.0), 3, 1e-9));
    RVec res;
    Detail d;
    for (double T : {10.0, 20.0}) {
        EvolveConfig c;
        c.grid = b->grid;
        c.profile = PotentialProfile::gaussian(10.0, 1.0);
        c.dt = 0.005;
        c.T = T;
        c.path = ParamPath::zero(1, T, 0.005);
        for (std::size_t j = 0; j < c.path.count(); ++j) {
            const double t = c.path.time(j);
            c.path.D[0].values[j] = 0.3 * std::sin(2.0 * t) / ((1 + t / 2.0) * (1 + t / 2.0));
        }
        c.path.finalize();
        c.basis = b;
        c.probes = generator_probes(*b);
        c.record_energy = false;
        c.initial.kind = InitialSpec::Kind::mix;
        c.initial.weights = {0.8, 0.5};
        c.initial.continuum_weight = 0.0;
        const auto mod = run_modulation(c, *b);
        const auto ch = wave_operator_estimate(mod);
        res.push_back(ch.cauchy_residual);
        d(("cauchy_residual(T=" + std::to_string(int(T)) + ")").c_str(), ch.cauchy_residual);
    }
    d("ratio", res[1] / res[0]);
    return {res[1] <= 0.5 * res[0], d.str()};
}

Outcome c15_nls() {
    Detail d;
    bool ok = true;
    for (double eps : {1.0, 0.5, 0.25}) {
        EvolveConfig c;
        c.grid = Grid(3, 64, 16.0);
        c.profile = PotentialProfile::gaussian(1.0, 1.0);
        c.dt = 0.01;
        c.T = 2.0;
        c.path = ParamPath::zero(3, 2.0, 0.01);
        c.path.D[0] = sine(0.2, 1.0, 2.0, 0.01);
        c.path.finalize();
        c.initial.sigma = 1.0;
        c.initial.scale = eps;
        c.record_stride = 5;
        c.record_energy = false;
        c.record_lorentz = true;
        const auto lin = evolve(c);
        c.source.kind = SourceSpec::Kind::nonlinear;
        c.source.c1 = 1.0;
        c.source.c2 = 1.0;
        const auto nl = nls_evolve(c);
        const double s_l = strichartz_accumulate(lin).l2_l62, s_n = strichartz_accumulate(nl).l2_l62;
        const double dev = std::abs(s_n / s_l - 1.0), bound = 5.0 * std::pow(eps, 4.0 / 3.0);
        const double drift = max_mass_drift(nl);
        ok = ok && dev <= bound && drift <= 1e-8 && !nl.aborted;
        const std::string tag = "(eps=" + std::to_string(eps).substr(0, 4) + ")";
        d(("ratio_dev" + tag).c_str(), dev)(("bound" + tag).c_str(), bound)(("mass_drift" + tag).c_str(), drift);
    }
    return {ok, d.str()};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria{
    {1, "unitarity/mass", c1_unitarity},
    {2, "free-kernel decay", c2_free_decay},
    {3, "closed-form Gaussian", c3_gaussian_oracle},
    {4, "Lorentz norms", c4_lorentz},
    {5, "bound states", c5_bound_states},
    {6, "Besov machinery", c6_besov},
    {7, "Gamma algebra", c7_gamma_algebra},
    {8, "kernel perturbation", c8_kernel},
    {9, "energy identity", c9_energy_identity},
    {10, "energy boundedness", c10_energy_bound},
    {11, "incomplete ionization", c11_incomplete_ionization},
    {12, "Brownian contrast", c12_brownian_contrast},
    {13, "modulation consistency", c13_modulation},
    {14, "channel limit", c14_channel_limit},
    {15, "NLS small data", c15_nls},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    int failed = 0;
    for (const auto& c : kCriteria) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("C%-2d %s %s: %s [%.1fs]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), sec);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
