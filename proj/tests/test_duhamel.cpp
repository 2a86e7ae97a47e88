#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "rpslab/duhamel.hpp"

using namespace rps;

namespace {

SliceField random_slices(const Grid& g, double dt, std::size_t n, gen::Rng& r) {
    SliceField F(g, dt, n);
    for (auto& s : F.slices)
        for (auto& z : s) z = {r.normal(), r.normal()};
    return F;
}

cplx dot(const SliceField& a, const SliceField& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.count(); ++i)
        for (std::size_t j = 0; j < a.slices[i].size(); ++j) s += std::conj(a.slices[i][j]) * b.slices[i][j];
    return s;
}

ParamPath rough_path(double T, double dt, gen::Rng& r) {
    auto p = ParamPath::zero(1, T, dt);
    p.D[0] = gen::smooth_path(0.5, T, dt, r);
    p.v[0] = gen::smooth_path(0.3, T, dt, r);
    p.beta = gen::smooth_path(0.1, T, dt, r);
    p.alpha = gen::smooth_path(1.0, T, dt, r);
    p.finalize();
    return p;
}

} // namespace

TEST_CASE("property: adjoint passes the dot test") {
    const Grid g(1, 64, 8.0);
    const auto prof = PotentialProfile::gaussian(3.0, 1.0);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        gen::Rng r(seed);
        const double dt = 0.05;
        const std::size_t n = 12;
        const auto pi = rough_path(dt * (n - 1), dt, r);
        const auto F = random_slices(g, dt, n, r), G = random_slices(g, dt, n, r);
        const cplx lhs = dot(G, duhamel_T_apply(pi, F, prof));
        const cplx rhs = dot(duhamel_T_adjoint(pi, G, prof), F);
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("T vanishes with no potential and on the first slice") {
    const Grid g(1, 32, 4.0);
    gen::Rng r(2);
    const auto pi = rough_path(0.5, 0.05, r);
    const auto F = random_slices(g, 0.05, 11, r);
    CHECK(duhamel_T_apply(pi, F, PotentialProfile::zero()).norm2() == 0.0);
    const auto TF = duhamel_T_apply(pi, F, PotentialProfile::gaussian(2.0, 1.0));
    for (auto z : TF.slices[0]) CHECK(z == cplx(0.0));
    CHECK(TF.norm2() > 0.0);
}

TEST_CASE("operator norm of T(pi) - T(pi) is exactly zero") {
    const Grid g(1, 32, 4.0);
    gen::Rng r(5);
    const auto pi = rough_path(0.5, 0.05, r);
    const auto est = operator_norm_estimate(pi, pi, PotentialProfile::gaussian(2.0, 1.0), g, 0.05, 11);
    CHECK(est.value == 0.0);
}

TEST_CASE("norm estimate bounds the action on random inputs and grows with the perturbation") {
    const Grid g(1, 64, 8.0);
    const auto prof = PotentialProfile::gaussian(3.0, 1.0);
    const double dt = 0.05;
    const std::size_t n = 16;
    const double T = dt * (n - 1);
    const auto zero = ParamPath::zero(1, T, dt);
    auto shift = [&](double eps) {
        auto p = ParamPath::zero(1, T, dt);
        for (std::size_t j = 0; j < p.count(); ++j) p.D[0].values[j] = eps * std::sin(M_PI * p.time(j) / T);
        p.finalize();
        return p;
    };
    const auto small = operator_norm_estimate(shift(0.01), zero, prof, g, dt, n);
    const auto big = operator_norm_estimate(shift(0.1), zero, prof, g, dt, n);
    CHECK(small.value > 0.0);
    CHECK(big.value > small.value);

    gen::Rng r(1);
    const auto F = random_slices(g, dt, n, r);
    auto a = duhamel_T_apply(shift(0.1), F, prof);
    const auto b = duhamel_T_apply(zero, F, prof);
    for (std::size_t i = 0; i < a.count(); ++i)
        for (std::size_t j = 0; j < a.slices[i].size(); ++j) a.slices[i][j] -= b.slices[i][j];
    CHECK(std::sqrt(a.norm2() / F.norm2()) <= big.value * (1 + 1e-3));
}
