#include "rpslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "rpslab/errors.hpp"
#include "rpslab/fft.hpp"
#include "rpslab/frame.hpp"
#include "rpslab/kernels.hpp"

namespace rps {

double nonlinear_density(double rho, double c1, double c2) {
    return 0.6 * c1 * rho * std::cbrt(rho * rho) + c2 * rho * rho * rho / 3.0;
}

EnergyParts energy(const ComplexField& Z, const PotentialProfile& profile, const FrameParams& fp,
                   double c1, double c2) {
    const Grid& g = Z.grid;
    const double cv = g.cell_volume();
    EnergyParts e;
    CVec w = Z.values;
    fft::forward(g, w.data());
    const auto k2 = detail::cached_k2(g);
    e.kinetic = kernels::wnorm2(w.data(), k2->data(), w.size()) * cv / double(g.size());
    if (!profile.is_zero()) {
        const RealField V = sample_moving_potential(profile, fp, g);
        e.potential = kernels::wnorm2(Z.values.data(), V.values.data(), Z.size()) * cv;
    }
    if (c1 != 0.0 || c2 != 0.0) {
        double s = 0.0;
        for (const auto& z : Z.values) s += nonlinear_density(std::norm(z), c1, c2);
        e.nonlinear = s * cv;
    }
    e.total = e.kinetic + e.potential + e.nonlinear;
    return e;
}

StrichartzReport strichartz_accumulate(const TrajectoryBundle& run) {
    StrichartzReport rep;
    if (run.records.empty()) return rep;
    double acc = 0.0;
    for (std::size_t n = 0; n < run.records.size(); ++n) {
        const auto& r = run.records[n];
        rep.linf_l2 = std::max(rep.linf_l2, std::sqrt(r.mass));
        if (n > 0) {
            const auto& p = run.records[n - 1];
            acc += 0.5 * (r.t - p.t) * (p.lorentz62 * p.lorentz62 + r.lorentz62 * r.lorentz62);
        }
        rep.running.push_back(std::sqrt(acc));
    }
    rep.l2_l62 = rep.running.back();
    const double T = run.records.back().t;
    double half = 0.0;
    for (std::size_t n = 0; n < run.records.size(); ++n)
        if (run.records[n].t <= 0.5 * T + 1e-12) half = rep.running[n];
    const double full2 = rep.l2_l62 * rep.l2_l62;
    rep.tail_increment_ratio = full2 > 0.0 ? (full2 - half * half) / full2 : 0.0;
    return rep;
}

IonizationReport ionization_metrics(const TrajectoryBundle& run) {
    if (!run.config.basis || run.config.basis->empty())
        throw DataError("ionization metrics need a nonempty bound-state basis");
    if (run.records.empty()) throw DataError("ionization metrics need a recorded run");
    IonizationReport rep;
    const double p0 = run.records.front().pp_mass;
    if (!(p0 > 0.0)) throw DataError("initial point-spectrum mass is zero");
    const double T = run.records.back().t;
    rep.tail_min = 1e300;
    for (const auto& r : run.records) {
        rep.times.push_back(r.t);
        rep.pp_mass.push_back(r.pp_mass);
        if (r.t >= 0.5 * T - 1e-12) rep.tail_min = std::min(rep.tail_min, r.pp_mass / p0);
        rep.transfer_estimate = std::max(rep.transfer_estimate, std::sqrt(std::abs(r.pp_mass - p0)));
    }
    return rep;
}

EnergyFluxReport energy_flux_residual(const TrajectoryBundle& run) {
    EnergyFluxReport rep;
    const auto& path = run.config.path;
    for (std::size_t n = 0; n + 1 < run.records.size(); ++n) {
        const auto& a = run.records[n];
        const auto& b = run.records[n + 1];
        const double dt = b.t - a.t;
        const Vec3 g0 = path.gamma_at(a.t), g1 = path.gamma_at(b.t);
        double flux = 0.0;
        for (int k = 0; k < path.dim; ++k) flux += (g1[k] - g0[k]) / dt * 0.5 * (a.flux[k] + b.flux[k]);
        const double r = (b.total - a.total) / dt + flux;
        rep.times.push_back(0.5 * (a.t + b.t));
        rep.residual.push_back(r);
        rep.max_abs = std::max(rep.max_abs, std::abs(r));
    }
    return rep;
}

EnergyBoundReport energy_bound(const TrajectoryBundle& run) {
    EnergyBoundReport rep;
    rep.sup_energy = -1e300;
    for (const auto& r : run.records) rep.sup_energy = std::max(rep.sup_energy, r.total);
    rep.h1_initial = run.h1_norm2_initial;
    rep.ratio = rep.h1_initial > 0.0 ? rep.sup_energy / rep.h1_initial : 0.0;
    return rep;
}

double potential_time_average(const TrajectoryBundle& run) {
    if (run.config.basis && !run.config.basis->empty())
        throw DataError("potential time average is defined here for dispersing runs only");
    if (run.records.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t n = 1; n < run.records.size(); ++n) {
        const auto& a = run.records[n - 1];
        const auto& b = run.records[n];
        acc += 0.5 * (b.t - a.t) * (std::abs(a.potential) + std::abs(b.potential));
    }
    return acc / run.records.back().t;
}

ChannelReport wave_operator_estimate(const ModulationResult& mod, double window_fraction,
                                     double flag_threshold) {
    ChannelReport rep;
    if (mod.times.empty()) return rep;
    for (std::size_t n = 0; n < mod.times.size(); ++n) {
        rep.probe_times.push_back(mod.times[n]);
        const CVector c = mod.B[n].adjoint() * mod.zeta_tilde[n];
        rep.channel.emplace_back(c.data(), c.data() + c.size());
    }
    const double T = mod.times.back();
    const double start = (1.0 - window_fraction) * T;
    // max pairwise distance in the window = max over pairs; O(m²) over probe samples
    std::vector<std::size_t> idx;
    for (std::size_t n = 0; n < rep.probe_times.size(); ++n)
        if (rep.probe_times[n] >= start - 1e-12) idx.push_back(n);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < rep.channel[idx[i]].size(); ++k)
                d += std::norm(rep.channel[idx[i]][k] - rep.channel[idx[j]][k]);
            rep.cauchy_residual = std::max(rep.cauchy_residual, std::sqrt(d));
        }
    rep.flagged = rep.cauchy_residual > flag_threshold;
    return rep;
}

} // namespace rps
