#include "rpslab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "rpslab/diagnostics.hpp"
#include "rpslab/errors.hpp"
#include "rpslab/fft.hpp"
#include "rpslab/kernels.hpp"

namespace rps {

std::size_t EvolveConfig::steps() const {
    const double s = T / dt;
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-8 * std::max(1.0, r)) throw ConfigError("T/dt must be an integer");
    return static_cast<std::size_t>(r);
}

void EvolveConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("T must be nonnegative");
    steps();
    profile.validate();
    if (dt * profile.depth > accuracy_bound * (1 + 1e-12))
        throw ConfigError("dt·V0 exceeds the accuracy bound " + std::to_string(accuracy_bound));
    if (path.dim != grid.dim) throw ConfigError("path dimension does not match grid");
    if (path.T() < T - 1e-9 * std::max(1.0, T)) throw ConfigError("path is shorter than the run");
    if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
    if (snapshot_stride < 0) throw ConfigError("snapshot_stride must be >= 0");
    if (path.max_abs_beta() > beta_max) throw RangeError("path beta exceeds beta_max");
    if (initial.kind != InitialSpec::Kind::gaussian && (!basis || basis->empty()))
        throw ConfigError("initial state needs a nonempty bound-state basis");
    if (basis) require_same_grid(basis->grid, grid, "EvolveConfig basis");
    for (const auto& h : probes) require_same_grid(h.grid, grid, "EvolveConfig probes");
    if (source.kind == SourceSpec::Kind::separable) require_same_grid(source.f.grid, grid, "source");
}

RVec TrajectoryBundle::times() const {
    RVec t;
    for (const auto& r : records) t.push_back(r.t);
    return t;
}

RVec TrajectoryBundle::column(double DiagnosticsRecord::*field) const {
    RVec c;
    for (const auto& r : records) c.push_back(r.*field);
    return c;
}

namespace {

FrameParams comoving_params(const ParamPath& path, double t, bool dilated) {
    FrameParams fp = path.frame_at(t);
    fp.alpha = 0.0;
    if (!dilated) fp.beta = 0.0;
    return fp;
}

std::shared_ptr<const RVec> layer_mask(const Grid& g, double layer) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double, double>, std::shared_ptr<const RVec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(g.dim, g.n, g.L, layer);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    RVec m(g.size(), 0.0);
    const double edge = (1.0 - layer) * g.L;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ijk = g.unravel(i);
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(g.x(ijk[a])) >= edge) m[i] = 1.0;
    }
    auto p = std::make_shared<const RVec>(std::move(m));
    cache.emplace(key, p);
    return p;
}

// e^{i s (V + N(|Z|²))} pointwise
void potential_substep(cplx* z, const RVec& V, double s, const SourceSpec& src, std::size_t N) {
    if (src.kind == SourceSpec::Kind::nonlinear && (src.c1 != 0.0 || src.c2 != 0.0)) {
        for (std::size_t i = 0; i < N; ++i) {
            const double rho = std::norm(z[i]);
            const double w = V[i] + src.c1 * std::cbrt(rho * rho) + src.c2 * rho * rho;
            z[i] *= std::polar(1.0, s * w);
        }
    } else {
        kernels::phase(z, V.data(), s, N);
    }
}

} // namespace

double boundary_fraction(const ComplexField& Z, double layer) {
    const double total = kernels::norm2(Z.values.data(), Z.size());
    if (total == 0.0) return 0.0;
    auto m = layer_mask(Z.grid, layer);
    return kernels::wnorm2(Z.values.data(), m->data(), Z.size()) / total;
}

double h1_norm2(const ComplexField& Z) {
    const Hamiltonian H0(Z.grid, RVec(Z.size(), 0.0));
    return Z.norm2() + H0.kinetic(Z);
}

ComplexField comoving_view(const ComplexField& Z, const ParamPath& path, double t, bool dilated,
                           double beta_max) {
    return apply_frame(Z, comoving_params(path, t, dilated), DilationWeight::three_halves,
                       Direction::forward, beta_max);
}

ComplexField comoving_inverse(const ComplexField& z, const ParamPath& path, double t, bool dilated,
                              double beta_max) {
    return apply_frame(z, comoving_params(path, t, dilated), DilationWeight::three_halves,
                       Direction::inverse, beta_max);
}

ComplexField step_strang(const ComplexField& state, double t, double dt, const EvolveConfig& cfg) {
    ComplexField out = state;
    const Grid& g = out.grid;
    const std::size_t N = g.size();
    cplx* z = out.values.data();
    const bool has_V = !cfg.profile.is_zero();
    const bool has_N = cfg.source.kind == SourceSpec::Kind::nonlinear;
    const bool has_F = cfg.source.kind == SourceSpec::Kind::separable;

    // trapezoid Duhamel term for F: Z ← U(Z − i(dt/2)F(t)) − i(dt/2)F(t+dt)
    if (has_F) {
        const double phi = cfg.source.phi.at(t);
        kernels::axpy(cplx(0.0, -0.5 * dt * phi), cfg.source.f.values.data(), z, N);
    }
    RVec V;
    if (has_V) V = sample_moving_potential(cfg.profile, cfg.path.frame_at(t + 0.5 * dt), g).values;
    else if (has_N) V.assign(N, 0.0);
    if (has_V || has_N) potential_substep(z, V, 0.5 * dt, cfg.source, N);
    detail::free_propagate_inplace(g, z, dt);
    if (has_V || has_N) potential_substep(z, V, 0.5 * dt, cfg.source, N);
    if (has_F) {
        const double phi = cfg.source.phi.at(t + dt);
        kernels::axpy(cplx(0.0, -0.5 * dt * phi), cfg.source.f.values.data(), z, N);
    }
    out.time = t + dt;
    return out;
}

ComplexField make_initial(const EvolveConfig& cfg) {
    const Grid& g = cfg.grid;
    const InitialSpec& in = cfg.initial;
    auto gaussian_packet = [&](bool normalized) {
        ComplexField f(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto ijk = g.unravel(i);
            double r2 = 0.0, ph = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                const double d = g.x(ijk[a]) - in.center[a];
                r2 += d * d;
                ph += in.momentum[a] * g.x(ijk[a]);
            }
            f.values[i] = std::polar(std::exp(-0.5 * r2 / (in.sigma * in.sigma)), ph);
        }
        if (normalized) kernels::scale(f.values.data(), 1.0 / f.norm(), f.size());
        return f;
    };
    ComplexField z(g);
    switch (in.kind) {
    case InitialSpec::Kind::gaussian:
        z = gaussian_packet(false);
        break;
    case InitialSpec::Kind::ground_state:
        z = cfg.basis->states.at(0).g;
        break;
    case InitialSpec::Kind::mix: {
        if (in.weights.size() > cfg.basis->size())
            throw ConfigError("mix weights exceed the number of bound states");
        for (std::size_t k = 0; k < in.weights.size(); ++k)
            kernels::axpy(in.weights[k], cfg.basis->states[k].g.values.data(), z.values.data(), z.size());
        if (in.continuum_weight != 0.0) {
            const ComplexField c = gaussian_packet(true);
            kernels::axpy(in.continuum_weight, c.values.data(), z.values.data(), z.size());
        }
        break;
    }
    }
    if (in.scale != 1.0) kernels::scale(z.values.data(), in.scale, z.size());
    z.frame = Frame::lab;
    z.time = 0.0;
    if (in.kind != InitialSpec::Kind::gaussian) {
        // bound states live in the comoving frame; bring them to the lab frame at t = 0
        FrameParams fp = cfg.path.frame_at(0.0);
        fp.alpha = 0.0;
        if (!fp.is_identity())
            z = apply_frame(z, fp, DilationWeight::three_halves, Direction::inverse, cfg.beta_max);
    }
    return z;
}

namespace {

void record_state(const ComplexField& Z, double t, const EvolveConfig& cfg, TrajectoryBundle& run,
                  double& strichartz_acc, double& last_l62, double& last_t) {
    DiagnosticsRecord rec;
    rec.t = t;
    rec.mass = Z.norm2();
    rec.sup_abs = kernels::max_abs(Z.values.data(), Z.size());
    rec.boundary_fraction = boundary_fraction(Z, cfg.monitor_layer);
    const FrameParams fp = cfg.path.frame_at(t);
    const double c1 = cfg.source.kind == SourceSpec::Kind::nonlinear ? cfg.source.c1 : 0.0;
    const double c2 = cfg.source.kind == SourceSpec::Kind::nonlinear ? cfg.source.c2 : 0.0;
    if (cfg.record_energy) {
        const EnergyParts e = energy(Z, cfg.profile, fp, c1, c2);
        rec.kinetic = e.kinetic;
        rec.potential = e.potential;
        rec.nonlinear = e.nonlinear;
        rec.total = e.total;
    }
    if (cfg.record_flux && !cfg.profile.is_zero()) {
        const auto grad = sample_moving_gradient(cfg.profile, fp, Z.grid);
        for (int a = 0; a < Z.grid.dim; ++a)
            rec.flux[a] = kernels::wnorm2(Z.values.data(), grad[a].values.data(), Z.size()) *
                          Z.grid.cell_volume();
    }
    const bool need_comoving = (cfg.basis && !cfg.basis->empty()) || !cfg.probes.empty() ||
                               cfg.record_lorentz;
    if (need_comoving) {
        const ComplexField z3 = comoving_view(Z, cfg.path, t, true, cfg.beta_max);
        ComplexField cont = z3;
        if (cfg.basis && !cfg.basis->empty()) {
            rec.zeta = project_point(z3, *cfg.basis);
            for (const auto& c : rec.zeta) rec.pp_mass += std::norm(c);
            if (cfg.record_lorentz) cont = project_continuous(z3, *cfg.basis);
        }
        for (const auto& h : cfg.probes) rec.probe.push_back(inner(h, z3));
        if (cfg.record_lorentz) rec.lorentz62 = lorentz_norm(cont, 6.0, 2.0);
    }
    if (cfg.record_lorentz) {
        if (!run.records.empty())
            strichartz_acc += 0.5 * (t - last_t) * (last_l62 * last_l62 + rec.lorentz62 * rec.lorentz62);
        rec.strichartz_running = std::sqrt(strichartz_acc);
        last_l62 = rec.lorentz62;
    }
    last_t = t;
    run.records.push_back(std::move(rec));
}

} // namespace

TrajectoryBundle evolve(const EvolveConfig& cfg) {
    cfg.validate();
    TrajectoryBundle run;
    run.config = cfg;
    run.large_beta = cfg.path.max_abs_beta() > 0.25;
    ComplexField Z = make_initial(cfg);
    run.initial_state = Z;
    run.h1_norm2_initial = h1_norm2(Z);
    const std::size_t steps = cfg.steps();
    double acc = 0.0, last_l62 = 0.0, last_t = 0.0;
    record_state(Z, 0.0, cfg, run, acc, last_l62, last_t);
    if (cfg.snapshot_stride > 0) run.snapshots.push_back(Z);

    for (std::size_t s = 0; s < steps; ++s) {
        const double t = cfg.dt * double(s);
        Z = step_strang(Z, t, cfg.dt, cfg);
        const double t1 = cfg.dt * double(s + 1);
        Z.time = t1;
        if (cfg.source.kind == SourceSpec::Kind::nonlinear &&
            kernels::max_abs(Z.values.data(), Z.size()) > cfg.source.amplitude_cap) {
            run.amplitude_blowup = true;
            run.aborted = true;
            run.abort_reason = "amplitude exceeded the small-data cap";
            record_state(Z, t1, cfg, run, acc, last_l62, last_t);
            break;
        }
        const bool last = s + 1 == steps;
        if ((s + 1) % cfg.record_stride == 0 || last) {
            record_state(Z, t1, cfg, run, acc, last_l62, last_t);
            if (run.records.back().boundary_fraction > cfg.monitor_threshold && !run.wraparound_breach) {
                run.wraparound_breach = true;
                run.breach_time = t1;
                if (cfg.abort_on_breach) {
                    run.aborted = true;
                    run.abort_reason = "boundary-layer mass fraction exceeded the wraparound threshold";
                    break;
                }
            }
        }
        if (cfg.snapshot_stride > 0 && (s + 1) % cfg.snapshot_stride == 0) run.snapshots.push_back(Z);
    }
    run.final_state = Z;
    return run;
}

TrajectoryBundle nls_evolve(const EvolveConfig& cfg) {
    if (cfg.source.kind != SourceSpec::Kind::nonlinear && cfg.source.kind != SourceSpec::Kind::none)
        throw ConfigError("nls_evolve needs a nonlinear source");
    EvolveConfig c = cfg;
    c.source.kind = SourceSpec::Kind::nonlinear;
    return evolve(c);
}

} // namespace rps
