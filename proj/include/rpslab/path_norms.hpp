#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rpslab/grid.hpp"

namespace rps {

struct PathNormReport {
    double besov_s = 0.0;     // dyadic Ḃ^{1/2} estimate of the continuous remainder
    double sup = 0.0;         // sup of the whole path
    double bv = 0.0;          // total variation of the whole path
    double gamma_upper = 0.0; // (besov + sup) of remainder + (variation + sup) of step part
    double remainder_sup = 0.0;
    double step_variation = 0.0;
    double step_sup = 0.0;
    CVec continuous_part;
    CVec jump_part;
    std::vector<std::pair<double, cplx>> jumps; // (time, increment)

    double bv_norm() const { return bv + sup; }
};

struct GammaOptions {
    double theta = 8.0;        // jump threshold, multiple of the local median increment
    std::size_t window = 129;  // local median window (samples)
    double s = 0.5;
};

/// Dyadic Besov estimate ‖(2^{sk} sup_{|h|≤2^{-k}} ‖f(·+h)−f‖_{L²})_k‖_{ℓ²} over scales
/// 2^{-k} ∈ [dt, T]; the path is extended by even reflection. Throws DataError when
/// fewer than 4 scales fit.
double besov_norm(const CVec& f, double dt, double s);
double besov_norm(const RVec& f, double dt, double s);
int besov_scale_count(std::size_t samples, double dt);

/// Per-scale values g(2^k), coarse to fine.
RVec besov_profile(const CVec& f, double dt, double s);

/// ‖|λ|^{1/2} f̂‖₂ of the mean-removed, Tukey-tapered path.
double h12_norm_fourier(const CVec& f, double dt, double taper = 0.1);
double h12_norm_fourier(const RVec& f, double dt, double taper = 0.1);

PathNormReport gamma_norm_estimate(const CVec& f, double dt, const GammaOptions& opt = {});
PathNormReport gamma_norm_estimate(const RVec& f, double dt, const GammaOptions& opt = {});

/// Γ' surrogate: gamma_norm_estimate of the trapezoid running integral.
double gammaprime_norm_estimate(const RVec& f, double dt, const GammaOptions& opt = {});

double sup_norm(const CVec& f);
double total_variation(const CVec& f);
double quadratic_variation(const RVec& f);

CVec to_complex(const RVec& f);

} // namespace rps
