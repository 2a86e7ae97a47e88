#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rpslab/grid.hpp"
#include "rpslab/potential.hpp"

namespace rps {

struct BoundState {
    ComplexField g;
    double E = 0.0;
    double residual = 0.0; // ‖(H − E)g‖₂
};

struct BoundStateBasis {
    Grid grid;
    std::vector<BoundState> states;
    double gram_tol = 1e-8;
    double e_floor = 0.0;
    // A state with −E_floor ≤ E < 0 was found and rejected (threshold-resonance proxy).
    bool threshold_flag = false;
    int iterations = 0;

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }
    RVec energies() const;
    // max |⟨g_j, g_k⟩ − δ_jk|
    double gram_error() const;
};

struct SolverOptions {
    double e_floor_fraction = 0.02; // E_floor = fraction · V₀
    int itp_steps = 120;
    double itp_dtau = 0.02;
    int max_iter = 600;
    int guard = 2;                  // extra block vectors beyond k_max
    unsigned seed = 12345;
};

/// Static Hamiltonian −Δ + V on a grid.
class Hamiltonian {
public:
    Hamiltonian(const Grid& g, const PotentialProfile& profile);
    Hamiltonian(const Grid& g, RVec potential);

    const Grid& grid() const { return grid_; }
    const RVec& potential() const { return V_; }
    void apply(const cplx* in, cplx* out) const;
    ComplexField apply(const ComplexField& z) const;
    // ⟨−Δz, z⟩ and ⟨Vz, z⟩
    double kinetic(const ComplexField& z) const;
    double potential_energy(const ComplexField& z) const;

private:
    Grid grid_;
    RVec V_;
    RVec k2_;
};

/// Bound states of −Δ+V below −E_floor, at most k_max of them, with
/// residual ≤ tol·|E|. Throws ConvergenceError (with the residuals) otherwise.
BoundStateBasis solve_bound_states(const PotentialProfile& profile, const Grid& grid, int k_max,
                                   double tol, const SolverOptions& opt = {});

CVec project_point(const ComplexField& field, const BoundStateBasis& basis);
ComplexField project_continuous(const ComplexField& field, const BoundStateBasis& basis);
double point_mass(const ComplexField& field, const BoundStateBasis& basis);

struct DecayReport {
    double rate = 0.0;    // fitted κ in |g| ~ e^{−κ r}
    double target = 0.0;  // √(−E)
    double rel_error = 0.0;
    double r2 = 0.0;
    double curvature = 0.0; // |c₂|·Δr/|c₁| of a quadratic fit
    double r_min = 0.0, r_max = 0.0;
    double dynamic_range = 0.0;
    int bins = 0;
    bool inconclusive = false;
    std::string reason;
};

/// Fit of ln(r^{(d−1)/2} · radial average |g|) against r over [2σ, r_max].
DecayReport check_exponential_decay(const ComplexField& g, double E, double sigma);

/// Lorentz quasi-norm from the exact decreasing rearrangement with cell measure.
double lorentz_norm(const ComplexField& f, double p, double q);
double lorentz_norm(const RVec& abs_values, double cell_measure, double p, double q);

void write_basis(const std::filesystem::path& dir, const BoundStateBasis& basis,
                 const std::string& run_id);
BoundStateBasis read_basis(const std::filesystem::path& dir);

} // namespace rps
