#pragma once

#include <cstdint>
#include <vector>

#include "rpslab/frame.hpp"
#include "rpslab/paths.hpp"
#include "rpslab/potential.hpp"

namespace rps {

/// Time-sliced space–time field F_i(x) on t_i = i·dt, i = 0..slices−1.
struct SliceField {
    Grid grid;
    double dt = 0.0;
    std::vector<CVec> slices;

    SliceField() = default;
    SliceField(const Grid& g, double dt, std::size_t count);
    std::size_t count() const { return slices.size(); }
    // discrete L²_{t,x}: Σ_i dt·‖F_i‖²
    double norm2() const;
};

/// (T(π)F)(t_i) = V₂ S_π(t_i) Σ_{j<i} w_j U₀(t_i − s_j) S_π(s_j)^{-1} V₁ F_j with trapezoid
/// weights (w_0 = dt/2) and the s = t cell excluded. V₁ = |V|^{1/2}, V₂ = |V|^{1/2} sgn V.
SliceField duhamel_T_apply(const ParamPath& pi, const SliceField& F, const PotentialProfile& profile);
SliceField duhamel_T_adjoint(const ParamPath& pi, const SliceField& G, const PotentialProfile& profile);

struct NormEstimateOptions {
    double tol = 1e-3;
    int max_iter = 60;
    std::uint64_t seed = 7;
};

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// √(top eigenvalue of (T(π)−T(π₀))*(T(π)−T(π₀))) by power iteration.
NormEstimate operator_norm_estimate(const ParamPath& pi, const ParamPath& pi0,
                                    const PotentialProfile& profile, const Grid& grid, double dt,
                                    std::size_t slices, const NormEstimateOptions& opt = {});

} // namespace rps
