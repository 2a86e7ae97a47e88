#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "rpslab/paths.hpp"
#include "rpslab/propagator.hpp"
#include "rpslab/spectral.hpp"

namespace rps {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// X_{kl} = ⟨g_k, x_a g_l⟩, Grad_{kl} = ⟨g_k, −i∂_a g_l⟩, Dil_{kl} = ⟨g_k, −i(x·∇ + d/2) g_l⟩.
struct GeneratorMatrices {
    int dim = 1;
    std::array<CMatrix, 3> X;
    std::array<CMatrix, 3> Grad;
    CMatrix Dil;

    std::size_t size() const { return std::size_t(Dil.rows()); }
    double hermiticity_residual() const;
};

/// Per state k: x_a g_k (a < dim), −i∂_a g_k (a < dim), −i(x·∇ + d/2) g_k.
std::vector<ComplexField> generator_probes(const BoundStateBasis& basis);
int probes_per_state(int dim);

GeneratorMatrices generator_matrices(const BoundStateBasis& basis);

/// P(t) = v(t)·X + D(t)·Grad + β(t)·Dil.
CMatrix compute_P(const GeneratorMatrices& gm, const ParamPath& path, double t);
/// exp(−iP) through the Hermitian eigendecomposition.
CMatrix compute_A(const CMatrix& P);
CMatrix hermitian_expi(const CMatrix& H, double s); // exp(i s H)

/// B series on `times`: B' = i(e^{−2β}A E A^{-1} − φ̇)B, one midpoint exponential per step,
/// φ = ∫|v|² + ∫v·dD. `A` is given on the same times.
std::vector<CMatrix> compute_B(const ParamPath& path, const std::vector<CMatrix>& A,
                               const RVec& energies, const RVec& times);

/// Eigenphases of one static Strang step: Ẽ_k = arg⟨g_k, U_dt g_k⟩/dt.
RVec calibrated_energies(const BoundStateBasis& basis, const PotentialProfile& profile, double dt);

struct ModulationResult {
    RVec times;
    std::vector<CVector> zeta_direct;     // ⟨g_k, S(t)Z(t)⟩ from the run
    std::vector<CVector> zeta_modulation; // integral form
    std::vector<CVector> zeta_tilde;      // A ζ_direct
    std::vector<CMatrix> P, A, B;
    RVec energies;
    double max_P_hermiticity = 0.0;
    double max_A_unitarity = 0.0;
    double max_B_unitarity = 0.0;
    double consistency = 0.0;          // sup_t |ζ_mod − ζ_direct| / sup_t |ζ_direct|
    double modulus_consistency = 0.0;  // same on |ζ| componentwise
    bool large_beta = false;
};

/// Integral form ζ̃(t) = B(t)(ζ̃(0) + i∫B(s)^{-1}A(s) dC(s)), with dC a Stieltjes sum over
/// path increments of the recorded ⟨O g_k, P_c S Z⟩. Needs a run recorded with
/// generator_probes(basis) as its probes and record_stride 1.
ModulationResult evolve_modulation_integral(const TrajectoryBundle& run, const BoundStateBasis& basis,
                                            const ParamPath& path, const RVec& energies);

} // namespace rps
