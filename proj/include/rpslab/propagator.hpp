#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rpslab/frame.hpp"
#include "rpslab/grid.hpp"
#include "rpslab/paths.hpp"
#include "rpslab/potential.hpp"
#include "rpslab/spectral.hpp"

namespace rps {

struct InitialSpec {
    enum class Kind { ground_state, gaussian, mix };
    Kind kind = Kind::gaussian;
    double sigma = 1.0;
    Vec3 center{0, 0, 0};
    Vec3 momentum{0, 0, 0};
    // mix: Σ weights[k]·g_k + continuum_weight·(normalized Gaussian packet)
    std::vector<double> weights;
    double continuum_weight = 0.0;
    double scale = 1.0;
};

struct SourceSpec {
    enum class Kind { none, separable, nonlinear };
    Kind kind = Kind::none;
    // separable: F(x, t) = φ(t) f(x)
    ComplexField f;
    PathComponent phi;
    // nonlinear: N(ρ) = c1 ρ^{2/3} + c2 ρ², ρ = |ψ|²
    double c1 = 0.0;
    double c2 = 0.0;
    double amplitude_cap = 1e3;
};

struct EvolveConfig {
    Grid grid;
    PotentialProfile profile;
    ParamPath path;
    double dt = 0.01;
    double T = 1.0;
    InitialSpec initial;
    SourceSpec source;
    std::shared_ptr<const BoundStateBasis> basis;
    // Fields h_j (comoving frame); ⟨h_j, S(t)Z⟩ is recorded at every record step.
    std::vector<ComplexField> probes;

    int record_stride = 1;
    int snapshot_stride = 0; // 0: no snapshots
    bool record_energy = true;
    bool record_flux = false;   // ⟨Z, ∇V(x−γ)Z⟩
    bool record_lorentz = false;
    double beta_max = kDefaultBetaMax;
    double monitor_layer = 0.125;
    double monitor_threshold = 1e-4;
    bool abort_on_breach = true;
    double accuracy_bound = 0.2; // dt·V₀ limit

    std::size_t steps() const;
    void validate() const;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double kinetic = 0.0;   // ⟨−ΔZ, Z⟩
    double potential = 0.0; // ⟨V(t)Z, Z⟩
    double nonlinear = 0.0; // ∫𝒢(|Z|²)
    double total = 0.0;
    double pp_mass = 0.0;
    CVec zeta;
    double lorentz62 = 0.0;
    double strichartz_running = 0.0; // (∫₀^t lorentz62²)^{1/2}
    double boundary_fraction = 0.0;
    double sup_abs = 0.0;
    Vec3 flux{0, 0, 0};
    CVec probe;
};

struct TrajectoryBundle {
    EvolveConfig config;
    std::vector<DiagnosticsRecord> records;
    std::vector<ComplexField> snapshots;
    ComplexField final_state;
    ComplexField initial_state;
    double h1_norm2_initial = 0.0;
    bool wraparound_breach = false;
    double breach_time = 0.0;
    bool amplitude_blowup = false;
    bool aborted = false;
    bool large_beta = false;
    std::string abort_reason;

    RVec times() const;
    RVec column(double DiagnosticsRecord::*field) const;
};

/// One Strang step of i∂tZ + (−Δ + V(t) + N(|Z|²))Z = 0 from t to t + dt.
ComplexField step_strang(const ComplexField& state, double t, double dt, const EvolveConfig& cfg);

ComplexField make_initial(const EvolveConfig& cfg);

TrajectoryBundle evolve(const EvolveConfig& cfg);
/// evolve() with a nonlinear source; refuses other source kinds.
TrajectoryBundle nls_evolve(const EvolveConfig& cfg);

/// z = e^{iv·x}Z(x+γ), and with `dilated` also the β rescaling (3/2-type weight).
ComplexField comoving_view(const ComplexField& Z, const ParamPath& path, double t,
                           bool dilated = true, double beta_max = kDefaultBetaMax);
ComplexField comoving_inverse(const ComplexField& z, const ParamPath& path, double t,
                              bool dilated = true, double beta_max = kDefaultBetaMax);

/// Mass fraction in the outer layer max_a |x_a| ≥ (1 − layer)·L.
double boundary_fraction(const ComplexField& Z, double layer);

double h1_norm2(const ComplexField& Z);

} // namespace rps
