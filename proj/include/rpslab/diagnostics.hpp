#pragma once

#include <string>
#include <vector>

#include "rpslab/grid.hpp"
#include "rpslab/modulation.hpp"
#include "rpslab/potential.hpp"
#include "rpslab/propagator.hpp"

namespace rps {

struct EnergyParts {
    double kinetic = 0.0;
    double potential = 0.0;
    double nonlinear = 0.0;
    double total = 0.0;
};

/// ⟨−ΔZ,Z⟩ + ⟨V_fp Z,Z⟩ (+ ∫𝒢(|Z|²) when c1, c2 ≠ 0), with V_fp the moving potential.
EnergyParts energy(const ComplexField& Z, const PotentialProfile& profile, const FrameParams& fp,
                   double c1 = 0.0, double c2 = 0.0);

/// 𝒢(ρ) = (3/5)c1 ρ^{5/3} + (1/3)c2 ρ³, the antiderivative of N(ρ) = c1 ρ^{2/3} + c2 ρ².
double nonlinear_density(double rho, double c1, double c2);

struct StrichartzReport {
    double linf_l2 = 0.0;  // sup_t ‖Z‖₂
    double l2_l62 = 0.0;   // (∫ lorentz62² dt)^{1/2}
    double tail_increment_ratio = 0.0; // (S(T)² − S(T/2)²)/S(T)²
    RVec running;
};
StrichartzReport strichartz_accumulate(const TrajectoryBundle& run);

struct IonizationReport {
    RVec times;
    RVec pp_mass;
    double tail_min = 0.0;       // min over [T/2, T] of pp_mass / pp_mass(0)
    double transfer_estimate = 0.0;
};
IonizationReport ionization_metrics(const TrajectoryBundle& run);

struct EnergyFluxReport {
    RVec times;      // step midpoints
    RVec residual;   // ΔE/Δt + γ̇·⟨Z,∇V(x−γ)Z⟩
    double max_abs = 0.0;
};
/// Needs record_energy and record_flux on every step; γ̇ is the step difference of γ.
EnergyFluxReport energy_flux_residual(const TrajectoryBundle& run);

struct EnergyBoundReport {
    double sup_energy = 0.0;
    double h1_initial = 0.0;
    double ratio = 0.0;  // sup_t E(t) / ‖Z(0)‖²_{H¹}
};
EnergyBoundReport energy_bound(const TrajectoryBundle& run);

/// (1/T)∫₀^T |⟨V(x−γ)Z, Z⟩| for dispersing runs (no bound-state basis).
double potential_time_average(const TrajectoryBundle& run);

struct ChannelReport {
    RVec probe_times;
    std::vector<CVec> channel;   // B(t)^{-1} ζ̃(t)
    double cauchy_residual = 0.0; // max pairwise difference over the last quarter
    bool flagged = false;
};
/// B(t)^{-1} ζ̃(t) at the recorded times; Cauchy residual over the trailing window.
ChannelReport wave_operator_estimate(const ModulationResult& mod, double window_fraction = 0.25,
                                     double flag_threshold = 1e-3);

} // namespace rps
