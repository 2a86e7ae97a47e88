#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles/gaussian.hpp"
#include "rpslab/errors.hpp"
#include "rpslab/fft.hpp"
#include "rpslab/frame.hpp"
#include "rpslab/grid.hpp"
#include "rpslab/kernels.hpp"

using namespace rps;

namespace {

ComplexField gaussian(const Grid& g, double s) {
    ComplexField f(g);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const auto ijk = g.unravel(idx);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += g.x(ijk[a]) * g.x(ijk[a]);
        f.values[idx] = std::exp(-r2 / (2 * s * s));
    }
    return f;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace

TEST_CASE("grid geometry") {
    Grid g(1, 8, 2.0);
    CHECK(g.dx() == doctest::Approx(0.5));
    CHECK(g.x(0) == -2.0);
    CHECK(g.k(1) == doctest::Approx(M_PI / 2.0));
    CHECK(g.k(7) == doctest::Approx(-M_PI / 2.0));
    CHECK_THROWS_AS(Grid(2, 8, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid(1, 12, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid(1, 8, -1.0), ConfigError);
}

TEST_CASE("spectral transform: constant maps to (2L)^{d/2} at k=0, Parseval") {
    Grid g(3, 8, 1.5);
    ComplexField one(g);
    for (auto& z : one.values) z = 1.0;
    const auto hat = spectral_transform(one, Direction::forward);
    CHECK(std::abs(hat.values[0] - std::pow(3.0, 1.5)) < 1e-12);
    gen::Rng r(3);
    const auto f = gen::random_field(g, r);
    const auto fh = spectral_transform(f, Direction::forward);
    double s = 0.0;
    for (auto z : fh.values) s += std::norm(z);
    CHECK(s == doctest::Approx(f.norm2()).epsilon(1e-12));
    CHECK(max_diff(spectral_transform(fh, Direction::inverse), f) < 1e-12);
}

TEST_CASE("free propagator matches the spreading Gaussian") {
    for (int dim : {1, 3}) {
        Grid g(dim, dim == 1 ? 512 : 64, dim == 1 ? 40.0 : 12.0);
        const double s = 1.0, t = 0.8;
        const auto z = apply_free_propagator(gaussian(g, s), t);
        double err = 0.0;
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            const auto ijk = g.unravel(idx);
            std::complex<double> ex = 1.0;
            for (int a = 0; a < dim; ++a) ex *= oracle::spreading_gaussian_1d(g.x(ijk[a]), t, s);
            err = std::max(err, std::abs(z.values[idx] - ex));
        }
        CHECK(err / oracle::spreading_gaussian_sup(t, s, dim) < 1e-6);
    }
}

TEST_CASE("property: free flow is unitary and a group") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        gen::Rng r(seed);
        Grid g(1, 64, r.uniform(2.0, 10.0));
        const auto f = gen::random_field(g, r);
        const double a = r.uniform(-1, 1), b = r.uniform(-1, 1);
        const auto fa = apply_free_propagator(f, a);
        CHECK(fa.norm2() == doctest::Approx(f.norm2()).epsilon(1e-12));
        const auto fab = apply_free_propagator(fa, b);
        CHECK(max_diff(fab, apply_free_propagator(f, a + b)) < 1e-11 * std::sqrt(double(g.size())) * 10);
        CHECK(max_diff(apply_free_propagator(fa, -a), f) < 1e-11 * 10);
    }
}

TEST_CASE("translation by a lattice vector is an index shift") {
    gen::Rng r(11);
    Grid g(3, 8, 2.0);
    const auto f = gen::random_field(g, r);
    const Vec3 gamma{2 * g.dx(), -g.dx(), 3 * g.dx()};
    const auto t = translate(f, gamma);
    double err = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int l = 0; l < 8; ++l) {
                const auto src = ((i + 2) % 8) * 64 + ((j + 7) % 8) * 8 + (l + 3) % 8;
                err = std::max(err, std::abs(t.values[i * 64 + j * 8 + l] - f.values[src]));
            }
    CHECK(err < 1e-12);
}

TEST_CASE("property: translations compose and commute with boosts up to e^{iv.gamma}") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        gen::Rng r(seed);
        Grid g(1, 128, 8.0);
        const auto f = gen::random_packet(g, r);
        const Vec3 a{r.uniform(-1, 1), 0, 0}, b{r.uniform(-1, 1), 0, 0}, v{r.uniform(-2, 2), 0, 0};
        CHECK(max_diff(translate(translate(f, a), b), translate(f, {a[0] + b[0], 0, 0})) < 1e-12);
        // (e^{ivx} f)(x + a) = e^{iva} e^{ivx} f(x + a)
        auto lhs = translate(boost(f, v), a);
        auto rhs = boost(translate(f, a), v);
        for (auto& z : rhs.values) z *= std::polar(1.0, v[0] * a[0]);
        CHECK(max_diff(lhs, rhs) < 1e-9);
    }
}

TEST_CASE("dilation of a Gaussian") {
    Grid g(1, 256, 16.0);
    const double beta = 0.3;
    const auto d = dilate(gaussian(g, 1.0), beta, DilationWeight::three_halves);
    double err = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double y = std::exp(beta) * g.x(i);
        err = std::max(err, std::abs(d.values[i] - std::exp(0.5 * beta) * std::exp(-y * y / 2)));
    }
    CHECK(err < 1e-6);
    CHECK(d.norm2() == doctest::Approx(gaussian(g, 1.0).norm2()).epsilon(1e-9));
}

TEST_CASE("property: dilate_adjoint is the adjoint of dilate") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        Grid g(seed % 2 ? 1 : 3, seed % 2 ? 32 : 8, 3.0);
        const auto f = gen::random_field(g, r), h = gen::random_field(g, r);
        const double beta = r.uniform(-0.4, 0.4);
        const auto w = seed % 3 ? DilationWeight::three_halves : DilationWeight::two;
        const cplx lhs = inner(h, dilate(f, beta, w));
        const cplx rhs = inner(dilate_adjoint(h, beta, w), f);
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs) + 1e-10);
    }
}

TEST_CASE("property: frame forward then inverse is the identity on packets") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        Grid g(1, 256, 16.0);
        const auto f = gen::random_packet(g, r);
        FrameParams fp;
        fp.gamma = {r.uniform(-2, 2), 0, 0};
        fp.v = {r.uniform(-1, 1), 0, 0};
        fp.beta = r.uniform(-0.2, 0.2);
        fp.alpha = r.uniform(-3, 3);
        const auto fwd = apply_frame(f, fp, DilationWeight::three_halves, Direction::forward);
        CHECK(fwd.frame == Frame::comoving);
        const auto back = apply_frame(fwd, fp, DilationWeight::three_halves, Direction::inverse);
        CHECK(max_diff(back, f) < 1e-6);
    }
}

TEST_CASE("frame errors") {
    Grid g(1, 16, 2.0);
    ComplexField f(g);
    FrameParams fp;
    fp.beta = 0.9;
    CHECK_THROWS_AS(apply_frame(f, fp, DilationWeight::two, Direction::forward), RangeError);
    fp.beta = 0.0;
    fp.gamma[0] = std::nan("");
    CHECK_THROWS_AS(apply_frame(f, fp, DilationWeight::two, Direction::forward), RangeError);
}

TEST_CASE("moving potential is the profile at x - gamma") {
    Grid g(1, 64, 8.0);
    const auto prof = PotentialProfile::gaussian(10.0, 1.0);
    FrameParams fp;
    fp.gamma = {1.25, 0, 0};
    const auto V = sample_moving_potential(prof, fp, g);
    for (int i = 0; i < g.n; i += 7) {
        const double x = g.x(i) - 1.25;
        CHECK(V.values[i] == doctest::Approx(-10.0 * std::exp(-x * x)));
    }
}
