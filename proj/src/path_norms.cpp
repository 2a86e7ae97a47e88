#include "rpslab/path_norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rpslab/errors.hpp"
#include "rpslab/fft.hpp"
#include "rpslab/kernels.hpp"

namespace rps {

CVec to_complex(const RVec& f) { return CVec(f.begin(), f.end()); }

double sup_norm(const CVec& f) {
    double m = 0.0;
    for (const auto& z : f) m = std::max(m, std::abs(z));
    return m;
}

double total_variation(const CVec& f) {
    double s = 0.0;
    for (std::size_t j = 1; j < f.size(); ++j) s += std::abs(f[j] - f[j - 1]);
    return s;
}

double quadratic_variation(const RVec& f) {
    double s = 0.0;
    for (std::size_t j = 1; j < f.size(); ++j) s += (f[j] - f[j - 1]) * (f[j] - f[j - 1]);
    return s;
}

namespace {

struct Scales {
    int kmin, kmax;
};

Scales scales_for(std::size_t samples, double dt) {
    const double T = dt * double(samples - 1);
    return {static_cast<int>(std::ceil(-std::log2(T) - 1e-12)),
            static_cast<int>(std::floor(-std::log2(dt) + 1e-12))};
}

} // namespace

int besov_scale_count(std::size_t samples, double dt) {
    if (samples < 2 || !(dt > 0.0)) return 0;
    auto s = scales_for(samples, dt);
    return std::max(0, s.kmax - s.kmin + 1);
}

RVec besov_profile(const CVec& f, double dt, double s) {
    if (!(s > 0.0 && s < 1.0)) throw RangeError("Besov index s must lie in (0,1)");
    const int count = besov_scale_count(f.size(), dt);
    if (count < 4) throw DataError("fewer than 4 dyadic scales resolvable; refine the path");
    const auto sc = scales_for(f.size(), dt);

    // Even reflection about both ends: period 2(n-1), no repeated endpoints.
    const std::size_t n = f.size();
    CVec e(f.begin(), f.end());
    for (std::size_t j = n - 2; j >= 1; --j) e.push_back(f[j]);
    const std::size_t P = e.size();

    const auto m_of = [&](int k) {
        auto m = static_cast<std::size_t>(std::floor(std::ldexp(1.0, -k) / dt + 1e-9));
        return std::min(m, P / 2);
    };
    const std::size_t mmax = m_of(sc.kmin);
    // Direct sums rather than an FFT autocorrelation: the difference 2(ac0 - ac_m)
    // cancels catastrophically for small shifts.
    RVec D2(mmax + 1);
    kernels::increment_norms(e.data(), P, mmax, D2.data());

    // prefix maxima give sup over |h| <= 2^{-k} for every scale at once
    for (std::size_t m = 1; m <= mmax; ++m) D2[m] = std::max(D2[m], D2[m - 1]);
    RVec g;
    g.reserve(count);
    for (int k = sc.kmin; k <= sc.kmax; ++k)
        g.push_back(std::pow(2.0, s * k) * std::sqrt(D2[m_of(k)] * dt / 2.0));
    return g;
}

double besov_norm(const CVec& f, double dt, double s) {
    const RVec g = besov_profile(f, dt, s);
    double acc = 0.0;
    for (double x : g) acc += x * x;
    return std::sqrt(acc);
}

double besov_norm(const RVec& f, double dt, double s) { return besov_norm(to_complex(f), dt, s); }

double h12_norm_fourier(const CVec& f, double dt, double taper) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    cplx mean = 0.0;
    for (const auto& z : f) mean += z;
    mean /= double(n);
    CVec g(n);
    const auto m = static_cast<std::size_t>(taper * double(n - 1) / 2.0);
    for (std::size_t j = 0; j < n; ++j) {
        double w = 1.0;
        const std::size_t d = std::min(j, n - 1 - j);
        if (m > 0 && d <= m) w = 0.5 * (1.0 - std::cos(std::numbers::pi * double(d) / double(m)));
        g[j] = (f[j] - mean) * w;
    }
    fft::dft_1d(g.data(), n, -1);
    const double span = double(n) * dt;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double idx = j <= (n - 1) / 2 ? double(j) : double(j) - double(n);
        const double lam = 2.0 * std::numbers::pi * idx / span;
        acc += std::abs(lam) * std::norm(g[j] * dt);
    }
    return std::sqrt(acc / span);
}

double h12_norm_fourier(const RVec& f, double dt, double taper) {
    return h12_norm_fourier(to_complex(f), dt, taper);
}

namespace {

// Sliding median with edge values repeated outside the array.
RVec local_median(const RVec& a, std::size_t window) {
    const std::size_t n = a.size();
    if (window < 1) window = 1;
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(window / 2);
    RVec out(n), buf(window);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t w = 0; w < window; ++w) {
            std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - h + static_cast<std::ptrdiff_t>(w);
            j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 1);
            buf[w] = a[j];
        }
        auto mid = buf.begin() + static_cast<std::ptrdiff_t>(window / 2);
        std::nth_element(buf.begin(), mid, buf.end());
        out[i] = *mid;
    }
    return out;
}

} // namespace

PathNormReport gamma_norm_estimate(const CVec& f, double dt, const GammaOptions& opt) {
    PathNormReport r;
    const std::size_t n = f.size();
    r.sup = sup_norm(f);
    r.bv = total_variation(f);
    r.jump_part.assign(n, 0.0);
    r.continuous_part = f;
    if (n < 2) {
        r.gamma_upper = r.sup;
        return r;
    }
    RVec a(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) a[j] = std::abs(f[j + 1] - f[j]);
    if (*std::max_element(a.begin(), a.end()) == 0.0) {
        // constant path: the whole value sits in the continuous part
        r.remainder_sup = r.sup;
        r.gamma_upper = r.sup;
        return r;
    }
    const RVec med = local_median(a, opt.window);
    cplx acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (a[j] > opt.theta * med[j]) {
            const cplx inc = f[j + 1] - f[j];
            r.jumps.emplace_back(dt * double(j + 1), inc);
            acc += inc;
        }
        r.jump_part[j + 1] = acc;
    }
    for (std::size_t j = 0; j < n; ++j) r.continuous_part[j] = f[j] - r.jump_part[j];

    r.besov_s = besov_norm(r.continuous_part, dt, opt.s);
    r.remainder_sup = sup_norm(r.continuous_part);
    r.step_variation = total_variation(r.jump_part);
    r.step_sup = sup_norm(r.jump_part);
    r.gamma_upper = r.besov_s + r.remainder_sup + r.step_variation + r.step_sup;
    return r;
}

PathNormReport gamma_norm_estimate(const RVec& f, double dt, const GammaOptions& opt) {
    return gamma_norm_estimate(to_complex(f), dt, opt);
}

double gammaprime_norm_estimate(const RVec& f, double dt, const GammaOptions& opt) {
    RVec F(f.size(), 0.0);
    for (std::size_t j = 1; j < f.size(); ++j) F[j] = F[j - 1] + 0.5 * dt * (f[j - 1] + f[j]);
    return gamma_norm_estimate(F, dt, opt).gamma_upper;
}

} // namespace rps
