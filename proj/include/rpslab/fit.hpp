#pragma once

#include "rpslab/grid.hpp"

namespace rps {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

// Ordinary least squares y ≈ intercept + slope·x.
LinearFit linear_fit(const RVec& x, const RVec& y);

// y ≈ c0 + c1 x + c2 x², returned as {c0, c1, c2}; r2 in the last slot.
std::array<double, 4> quadratic_fit(const RVec& x, const RVec& y);

// Rank correlation with average ranks for ties.
double spearman(const RVec& x, const RVec& y);

} // namespace rps
