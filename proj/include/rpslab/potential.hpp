#pragma once

#include <string>

#include "rpslab/grid.hpp"

namespace rps {

/// Radial well centred at the origin: −V₀e^{−r²/σ²} or −V₀e^{−r/σ}.
struct PotentialProfile {
    enum class Kind { none, gaussian_well, exponential_well };

    Kind kind = Kind::none;
    double depth = 0.0;  // V₀ ≥ 0
    double width = 1.0;  // σ > 0

    static PotentialProfile gaussian(double V0, double sigma);
    static PotentialProfile exponential(double V0, double sigma);
    static PotentialProfile zero() { return {}; }

    void validate() const;
    bool is_zero() const { return kind == Kind::none || depth == 0.0; }

    double value(double r2) const;
    // V'(r)/r, so that ∇V(x) = x · dvdr_over_r(|x|²).
    double dvdr_over_r(double r2) const;
};

std::string to_string(PotentialProfile::Kind k);
PotentialProfile::Kind potential_kind_from_string(const std::string& s);

} // namespace rps
