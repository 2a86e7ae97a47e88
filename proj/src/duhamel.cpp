#include "rpslab/duhamel.hpp"

#include <cmath>
#include <random>

#include "rpslab/errors.hpp"
#include "rpslab/kernels.hpp"

namespace rps {

SliceField::SliceField(const Grid& g, double dt_, std::size_t count)
    : grid(g), dt(dt_), slices(count, CVec(g.size(), 0.0)) {}

double SliceField::norm2() const {
    double s = 0.0;
    for (const auto& f : slices) s += kernels::norm2(f.data(), f.size());
    return s * dt * grid.cell_volume();
}

namespace {

struct Weights {
    RVec v1, v2;
    bool zero = true;
};

Weights weights(const PotentialProfile& profile, const Grid& g) {
    Weights w;
    const RVec V = sample_moving_potential(profile, FrameParams{}, g).values;
    w.v1.resize(V.size());
    w.v2.resize(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) {
        w.v1[i] = std::sqrt(std::abs(V[i]));
        w.v2[i] = V[i] < 0.0 ? -w.v1[i] : w.v1[i];
        if (V[i] != 0.0) w.zero = false;
    }
    return w;
}

Vec3 neg(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }

double weight_exp(const Grid& g) { return dilation_exponent(DilationWeight::three_halves, g.dim); }

// S = e^{iα}·Dil(β)·Boost(v)·Translate(γ)
void frame_forward(const Grid& g, cplx* d, const FrameParams& fp) {
    detail::translate_inplace(g, d, fp.gamma);
    detail::boost_inplace(g, d, fp.v);
    detail::dilate_inplace(g, d, fp.beta, weight_exp(g), false);
    if (fp.alpha != 0.0) kernels::scale(d, std::polar(1.0, fp.alpha), g.size());
}
void frame_inverse(const Grid& g, cplx* d, const FrameParams& fp) {
    if (fp.alpha != 0.0) kernels::scale(d, std::polar(1.0, -fp.alpha), g.size());
    detail::dilate_inplace(g, d, -fp.beta, weight_exp(g), false);
    detail::boost_inplace(g, d, neg(fp.v));
    detail::translate_inplace(g, d, neg(fp.gamma));
}
void frame_forward_adjoint(const Grid& g, cplx* d, const FrameParams& fp) {
    if (fp.alpha != 0.0) kernels::scale(d, std::polar(1.0, -fp.alpha), g.size());
    detail::dilate_inplace(g, d, fp.beta, weight_exp(g), true);
    detail::boost_inplace(g, d, neg(fp.v));
    detail::translate_inplace(g, d, neg(fp.gamma));
}
void frame_inverse_adjoint(const Grid& g, cplx* d, const FrameParams& fp) {
    detail::translate_inplace(g, d, fp.gamma);
    detail::boost_inplace(g, d, fp.v);
    detail::dilate_inplace(g, d, -fp.beta, weight_exp(g), true);
    if (fp.alpha != 0.0) kernels::scale(d, std::polar(1.0, fp.alpha), g.size());
}

void check(const ParamPath& pi, const SliceField& F) {
    if (pi.dim != F.grid.dim) throw ConfigError("path dimension does not match the grid");
    const double T = F.dt * double(F.count() == 0 ? 0 : F.count() - 1);
    if (pi.T() < T - 1e-9 * std::max(1.0, T)) throw ConfigError("path is shorter than the time grid");
}

} // namespace

SliceField duhamel_T_apply(const ParamPath& pi, const SliceField& F, const PotentialProfile& profile) {
    check(pi, F);
    const Grid& g = F.grid;
    const std::size_t N = g.size(), M = F.count();
    SliceField out(g, F.dt, M);
    const Weights w = weights(profile, g);
    if (w.zero || M < 2) return out;
    // interaction picture: accumulate Σ_{j<i} w_j U₀(−s_j) S_j^{-1} V₁ F_j
    CVec acc(N, 0.0), y(N);
    for (std::size_t i = 0; i < M; ++i) {
        const double t = F.dt * double(i);
        if (i > 0) {
            CVec& o = out.slices[i];
            o = acc;
            detail::free_propagate_inplace(g, o.data(), t);
            frame_forward(g, o.data(), pi.frame_at(t));
            kernels::mul_real(o.data(), w.v2.data(), N);
        }
        if (i + 1 < M) {
            y = F.slices[i];
            kernels::mul_real(y.data(), w.v1.data(), N);
            frame_inverse(g, y.data(), pi.frame_at(t));
            detail::free_propagate_inplace(g, y.data(), -t);
            const double wj = i == 0 ? 0.5 * F.dt : F.dt;
            kernels::axpy(wj, y.data(), acc.data(), N);
        }
    }
    return out;
}

SliceField duhamel_T_adjoint(const ParamPath& pi, const SliceField& G, const PotentialProfile& profile) {
    check(pi, G);
    const Grid& g = G.grid;
    const std::size_t N = g.size(), M = G.count();
    SliceField out(g, G.dt, M);
    const Weights w = weights(profile, g);
    if (w.zero || M < 2) return out;
    // reverse accumulation of Σ_{i>j} U₀(−t_i) S_i^* V₂ G_i
    CVec acc(N, 0.0), y(N);
    for (std::size_t ii = M; ii-- > 0;) {
        const double t = G.dt * double(ii);
        if (ii + 1 < M) {
            CVec& o = out.slices[ii];
            o = acc;
            detail::free_propagate_inplace(g, o.data(), t);
            frame_inverse_adjoint(g, o.data(), pi.frame_at(t));
            kernels::mul_real(o.data(), w.v1.data(), N);
            const double wj = ii == 0 ? 0.5 * G.dt : G.dt;
            kernels::scale(o.data(), wj, N);
        }
        if (ii > 0) {
            y = G.slices[ii];
            kernels::mul_real(y.data(), w.v2.data(), N);
            frame_forward_adjoint(g, y.data(), pi.frame_at(t));
            detail::free_propagate_inplace(g, y.data(), -t);
            kernels::axpy(1.0, y.data(), acc.data(), N);
        }
    }
    return out;
}

NormEstimate operator_norm_estimate(const ParamPath& pi, const ParamPath& pi0,
                                    const PotentialProfile& profile, const Grid& grid, double dt,
                                    std::size_t slices, const NormEstimateOptions& opt) {
    if (opt.max_iter < 20) throw ConfigError("power iteration needs at least 20 iterations");
    NormEstimate est;
    SliceField x(grid, dt, slices);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& s : x.slices)
        for (auto& z : s) z = cplx(gauss(rng), gauss(rng));
    auto normalize = [&](SliceField& f) {
        const double n = std::sqrt(f.norm2());
        if (n > 0.0)
            for (auto& s : f.slices) kernels::scale(s.data(), 1.0 / n, s.size());
        return n;
    };
    auto apply_D = [&](const SliceField& f) {
        SliceField a = duhamel_T_apply(pi, f, profile);
        const SliceField b = duhamel_T_apply(pi0, f, profile);
        for (std::size_t i = 0; i < a.count(); ++i)
            kernels::axpy(-1.0, b.slices[i].data(), a.slices[i].data(), a.slices[i].size());
        return a;
    };
    auto apply_Dadj = [&](const SliceField& f) {
        SliceField a = duhamel_T_adjoint(pi, f, profile);
        const SliceField b = duhamel_T_adjoint(pi0, f, profile);
        for (std::size_t i = 0; i < a.count(); ++i)
            kernels::axpy(-1.0, b.slices[i].data(), a.slices[i].data(), a.slices[i].size());
        return a;
    };
    normalize(x);
    double lambda = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const SliceField Dx = apply_D(x);
        const double lam = Dx.norm2();
        est.iterations = it;
        if (lam == 0.0) {
            est.value = 0.0;
            est.converged = true;
            return est;
        }
        const bool conv = it > 1 && std::abs(lam - lambda) <= opt.tol * lam;
        lambda = lam;
        if (conv) {
            est.converged = true;
            break;
        }
        x = apply_Dadj(Dx);
        normalize(x);
    }
    est.value = std::sqrt(lambda);
    return est;
}

} // namespace rps
