#include "rpslab/frame.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "rpslab/errors.hpp"
#include "rpslab/kernels.hpp"

namespace rps {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

} // namespace

namespace detail {
std::shared_ptr<const RVec> cached_k2(const Grid& g) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double>, std::shared_ptr<const RVec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(g.dim, g.n, g.L);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto p = std::make_shared<const RVec>(k_squared(g));
    cache.emplace(key, p);
    return p;
}
} // namespace detail

namespace {

using detail::cached_k2;

// Periodic sinc (Dirichlet) kernel of the n-point band-limited interpolant,
// with the Nyquist mode split symmetrically so real data stays real.
double dirichlet(double delta, int n, double L) {
    const double th = std::numbers::pi * delta / L;
    const double s = std::sin(0.5 * th);
    double core;
    if (std::abs(s) < 1e-12) {
        const double c = std::cos(0.5 * th);
        core = (n - 1) * std::cos(0.5 * (n - 1) * th) / c;
    } else {
        core = std::sin(0.5 * (n - 1) * th) / s;
    }
    return (core + std::cos(0.5 * n * th)) / n;
}

CMat interpolation_matrix(const Grid& g, double beta) {
    const int n = g.n;
    const double eb = std::exp(beta);
    CMat M(n, n);
    for (int j = 0; j < n; ++j) {
        const double y = eb * g.x(j);
        for (int m = 0; m < n; ++m) M(j, m) = dirichlet(y - g.x(m), n, g.L);
    }
    return M;
}

void apply_along_axes(const Grid& g, cplx* data, const CMat& M) {
    const int n = g.n;
    if (g.dim == 1) {
        Eigen::Map<Eigen::VectorXcd> v(data, n);
        Eigen::VectorXcd out = M * v;
        v = out;
        return;
    }
    const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
    {
        Eigen::Map<RowMat> A(data, n, n2);
        RowMat out = M * A;
        A = out;
    }
    {
        for (int i = 0; i < n; ++i) {
            Eigen::Map<RowMat> S(data + i * n2, n, n);
            RowMat out = M * S;
            S = out;
        }
    }
    {
        Eigen::Map<RowMat> A(data, n2, n);
        RowMat out = A * M.transpose();
        A = out;
    }
}

double wrap(double d, double L) {
    const double P = 2.0 * L;
    d = std::fmod(d + L, P);
    if (d < 0) d += P;
    return d - L;
}

} // namespace

double dilation_exponent(DilationWeight w, int dim) {
    return w == DilationWeight::three_halves ? 0.5 * dim : 2.0;
}

namespace detail {

void free_propagate_inplace(const Grid& g, cplx* data, double dt) {
    if (dt == 0.0) return;
    auto k2 = cached_k2(g);
    const std::size_t N = g.size();
    fft::forward(g, data);
    kernels::phase(data, k2->data(), dt, N);
    kernels::scale(data, 1.0 / static_cast<double>(N), N);
    fft::backward(g, data);
}

void translate_inplace(const Grid& g, cplx* data, const Vec3& gamma) {
    bool any = false;
    for (int a = 0; a < g.dim; ++a) any = any || gamma[a] != 0.0;
    if (!any) return;
    const int n = g.n;
    const double invN = 1.0 / static_cast<double>(g.size());
    std::array<CVec, 3> ph;
    for (int a = 0; a < 3; ++a) {
        ph[a].assign(n, cplx(1.0, 0.0));
        if (a >= g.dim) continue;
        for (int m = 0; m < n; ++m) {
            const double th = g.k(m) * gamma[a];
            ph[a][m] = cplx(std::cos(th), std::sin(th));
        }
    }
    for (auto& z : ph[0]) z *= invN;
    fft::forward(g, data);
    kernels::mul_separable(data, g.dim, n, ph[0].data(), ph[1].data(), ph[2].data());
    fft::backward(g, data);
}

void boost_inplace(const Grid& g, cplx* data, const Vec3& v) {
    bool any = false;
    for (int a = 0; a < g.dim; ++a) any = any || v[a] != 0.0;
    if (!any) return;
    const int n = g.n;
    std::array<CVec, 3> ph;
    for (int a = 0; a < 3; ++a) {
        ph[a].assign(n, cplx(1.0, 0.0));
        if (a >= g.dim) continue;
        for (int i = 0; i < n; ++i) {
            const double th = v[a] * g.x(i);
            ph[a][i] = cplx(std::cos(th), std::sin(th));
        }
    }
    kernels::mul_separable(data, g.dim, n, ph[0].data(), ph[1].data(), ph[2].data());
}

void dilate_inplace(const Grid& g, cplx* data, double beta, double weight_exp, bool adjoint) {
    if (beta == 0.0) return;
    CMat M = interpolation_matrix(g, beta);
    if (adjoint) M = M.adjoint().eval();
    apply_along_axes(g, data, M);
    kernels::scale(data, std::exp(weight_exp * beta), g.size());
}

} // namespace detail

ComplexField apply_free_propagator(const ComplexField& field, double dt) {
    ComplexField out = field;
    detail::free_propagate_inplace(out.grid, out.values.data(), dt);
    out.time = field.time + dt;
    return out;
}

ComplexField translate(const ComplexField& field, const Vec3& gamma) {
    ComplexField out = field;
    detail::translate_inplace(out.grid, out.values.data(), gamma);
    return out;
}

ComplexField boost(const ComplexField& field, const Vec3& v) {
    ComplexField out = field;
    detail::boost_inplace(out.grid, out.values.data(), v);
    return out;
}

ComplexField dilate(const ComplexField& field, double beta, DilationWeight w) {
    ComplexField out = field;
    detail::dilate_inplace(out.grid, out.values.data(), beta, dilation_exponent(w, field.grid.dim),
                           false);
    return out;
}

ComplexField dilate_adjoint(const ComplexField& field, double beta, DilationWeight w) {
    ComplexField out = field;
    detail::dilate_inplace(out.grid, out.values.data(), beta, dilation_exponent(w, field.grid.dim),
                           true);
    return out;
}

namespace {
void check_beta(double beta, double beta_max) {
    if (!std::isfinite(beta) || std::abs(beta) > beta_max)
        throw RangeError("|beta| exceeds beta_max (" + std::to_string(beta_max) + ")");
}
Vec3 neg(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
} // namespace

ComplexField apply_frame(const ComplexField& field, const FrameParams& fp, DilationWeight w,
                         Direction dir, double beta_max) {
    if (!fp.finite()) throw RangeError("frame parameters must be finite");
    check_beta(fp.beta, beta_max);
    ComplexField out = field;
    const Grid& g = out.grid;
    cplx* d = out.values.data();
    const double we = dilation_exponent(w, g.dim);
    if (dir == Direction::forward) {
        detail::translate_inplace(g, d, fp.gamma);
        detail::boost_inplace(g, d, fp.v);
        detail::dilate_inplace(g, d, fp.beta, we, false);
        if (fp.alpha != 0.0) kernels::scale(d, std::polar(1.0, fp.alpha), out.size());
        out.frame = Frame::comoving;
    } else {
        if (fp.alpha != 0.0) kernels::scale(d, std::polar(1.0, -fp.alpha), out.size());
        detail::dilate_inplace(g, d, -fp.beta, we, false);
        detail::boost_inplace(g, d, neg(fp.v));
        detail::translate_inplace(g, d, neg(fp.gamma));
        out.frame = Frame::lab;
    }
    return out;
}

ComplexField apply_frame_adjoint(const ComplexField& field, const FrameParams& fp,
                                 DilationWeight w, double beta_max) {
    if (!fp.finite()) throw RangeError("frame parameters must be finite");
    check_beta(fp.beta, beta_max);
    ComplexField out = field;
    const Grid& g = out.grid;
    cplx* d = out.values.data();
    if (fp.alpha != 0.0) kernels::scale(d, std::polar(1.0, -fp.alpha), out.size());
    detail::dilate_inplace(g, d, fp.beta, dilation_exponent(w, g.dim), true);
    detail::boost_inplace(g, d, neg(fp.v));
    detail::translate_inplace(g, d, neg(fp.gamma));
    out.frame = Frame::lab;
    return out;
}

RealField sample_moving_potential(const PotentialProfile& profile, const FrameParams& fp,
                                  const Grid& grid) {
    RealField out(grid);
    if (profile.is_zero()) return out;
    const int n = grid.n;
    const double eb = std::exp(-fp.beta);
    const double amp = std::exp(-2.0 * fp.beta);
    // y_a = e^{−β}·wrap(x_a − γ_a): nearest periodic image of the well centre.
    std::array<RVec, 3> y;
    for (int a = 0; a < 3; ++a) {
        y[a].assign(n, 0.0);
        if (a >= grid.dim) continue;
        for (int i = 0; i < n; ++i) y[a][i] = eb * wrap(grid.x(i) - fp.gamma[a], grid.L);
    }
    if (profile.kind == PotentialProfile::Kind::gaussian_well) {
        const double s2 = profile.width * profile.width;
        std::array<RVec, 3> e;
        for (int a = 0; a < 3; ++a) {
            e[a].assign(n, 1.0);
            if (a >= grid.dim) continue;
            for (int i = 0; i < n; ++i) e[a][i] = std::exp(-y[a][i] * y[a][i] / s2);
        }
        const double c = -profile.depth * amp;
        if (grid.dim == 1) {
            for (int i = 0; i < n; ++i) out.values[i] = c * e[0][i];
        } else {
            std::size_t idx = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double eij = c * e[0][i] * e[1][j];
                    for (int l = 0; l < n; ++l) out.values[idx++] = eij * e[2][l];
                }
        }
        return out;
    }
    if (grid.dim == 1) {
        for (int i = 0; i < n; ++i) out.values[i] = amp * profile.value(y[0][i] * y[0][i]);
    } else {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const double r2 = y[0][i] * y[0][i] + y[1][j] * y[1][j] + y[2][l] * y[2][l];
                    out.values[idx++] = amp * profile.value(r2);
                }
    }
    return out;
}

std::array<RealField, 3> sample_moving_gradient(const PotentialProfile& profile,
                                                const FrameParams& fp, const Grid& grid) {
    std::array<RealField, 3> out{RealField(grid), RealField(grid), RealField(grid)};
    if (profile.is_zero()) return out;
    const int n = grid.n;
    const double eb = std::exp(-fp.beta);
    const double amp = std::exp(-3.0 * fp.beta);
    std::array<RVec, 3> y;
    for (int a = 0; a < 3; ++a) {
        y[a].assign(n, 0.0);
        if (a >= grid.dim) continue;
        for (int i = 0; i < n; ++i) y[a][i] = eb * wrap(grid.x(i) - fp.gamma[a], grid.L);
    }
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const auto ijk = grid.unravel(idx);
        double r2 = 0.0;
        Vec3 yy{0, 0, 0};
        for (int a = 0; a < grid.dim; ++a) {
            yy[a] = y[a][ijk[a]];
            r2 += yy[a] * yy[a];
        }
        const double f = amp * profile.dvdr_over_r(r2);
        for (int a = 0; a < grid.dim; ++a) out[a].values[idx] = f * yy[a];
    }
    return out;
}

} // namespace rps
