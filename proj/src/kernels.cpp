#include "rpslab/kernels.hpp"

#include <atomic>
#include <cmath>
#include <vector>

#ifdef RPSLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace rps::kernels {

namespace serial {

void mul(cplx* z, const cplx* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= m[i];
}

void mul_real(cplx* z, const double* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= m[i];
}

void scale(cplx* z, cplx a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= a;
}

void phase(cplx* z, const double* theta, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = s * theta[i];
        z[i] *= cplx(std::cos(a), std::sin(a));
    }
}

void phase_table(cplx* out, const double* theta, double s, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = s * theta[i];
        out[i] = cplx(c * std::cos(a), c * std::sin(a));
    }
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double norm2(const cplx* z, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(z[i]);
    return s;
}

double wnorm2(const cplx* z, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::norm(z[i]);
    return s;
}

cplx dot(const cplx* a, const cplx* b, std::size_t n) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double max_abs(const cplx* z, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(z[i]));
    return m;
}

void increment_norms(const cplx* e, std::size_t len, std::size_t mmax, double* out) {
    for (std::size_t m = 0; m <= mmax; ++m) {
        double s = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            std::size_t jm = j + m;
            if (jm >= len) jm -= len;
            s += std::norm(e[jm] - e[j]);
        }
        out[m] = s;
    }
}

void mul_separable(cplx* z, int dim, int n, const cplx* a0, const cplx* a1, const cplx* a2) {
    if (dim == 1) {
        for (int i = 0; i < n; ++i) z[i] *= a0[i];
        return;
    }
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx aij = a0[i] * a1[j];
            for (int l = 0; l < n; ++l) z[idx++] *= aij * a2[l];
        }
}

} // namespace serial

namespace omp {

namespace {
std::size_t nblocks(std::size_t n) { return (n + kBlock - 1) / kBlock; }
}

void mul(cplx* z, const cplx* m, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)n; ++i) z[i] *= m[i];
}

void mul_real(cplx* z, const double* m, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)n; ++i) z[i] *= m[i];
}

void scale(cplx* z, cplx a, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)n; ++i) z[i] *= a;
}

void phase(cplx* z, const double* theta, double s, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)n; ++i) {
        const double a = s * theta[i];
        z[i] *= cplx(std::cos(a), std::sin(a));
    }
}

void phase_table(cplx* out, const double* theta, double s, double c, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)n; ++i) {
        const double a = s * theta[i];
        out[i] = cplx(c * std::cos(a), c * std::sin(a));
    }
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)n; ++i) y[i] += a * x[i];
}

double norm2(const cplx* z, std::size_t n) {
    const std::size_t nb = nblocks(n);
    std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < (std::ptrdiff_t)nb; ++b) {
        const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::norm(z[i]);
        part[b] = s;
    }
    double s = 0.0;
    for (double p : part) s += p;
    return s;
}

double wnorm2(const cplx* z, const double* w, std::size_t n) {
    const std::size_t nb = nblocks(n);
    std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < (std::ptrdiff_t)nb; ++b) {
        const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += w[i] * std::norm(z[i]);
        part[b] = s;
    }
    double s = 0.0;
    for (double p : part) s += p;
    return s;
}

cplx dot(const cplx* a, const cplx* b, std::size_t n) {
    const std::size_t nb = nblocks(n);
    std::vector<cplx> part(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bl = 0; bl < (std::ptrdiff_t)nb; ++bl) {
        const std::size_t lo = bl * kBlock, hi = std::min(n, lo + kBlock);
        cplx s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::conj(a[i]) * b[i];
        part[bl] = s;
    }
    cplx s = 0.0;
    for (const cplx& p : part) s += p;
    return s;
}

double max_abs(const cplx* z, std::size_t n) {
    const std::size_t nb = nblocks(n);
    std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < (std::ptrdiff_t)nb; ++b) {
        const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(z[i]));
        part[b] = m;
    }
    double m = 0.0;
    for (double p : part) m = std::max(m, p);
    return m;
}

void increment_norms(const cplx* e, std::size_t len, std::size_t mmax, double* out) {
    // Each shift is summed serially, so the result matches the reference bit for bit.
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t m = 0; m <= (std::ptrdiff_t)mmax; ++m) {
        double s = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            std::size_t jm = j + m;
            if (jm >= len) jm -= len;
            s += std::norm(e[jm] - e[j]);
        }
        out[m] = s;
    }
}

void mul_separable(cplx* z, int dim, int n, const cplx* a0, const cplx* a1, const cplx* a2) {
    if (dim == 1) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) z[i] *= a0[i];
        return;
    }
    const std::size_t plane = static_cast<std::size_t>(n) * n;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        cplx* zi = z + i * plane;
        std::size_t idx = 0;
        for (int j = 0; j < n; ++j) {
            const cplx aij = a0[i] * a1[j];
            for (int l = 0; l < n; ++l) zi[idx++] *= aij * a2[l];
        }
    }
}

} // namespace omp

namespace {
std::atomic<Backend> g_backend{
#ifdef RPSLAB_HAVE_OPENMP
    Backend::omp
#else
    Backend::serial
#endif
};
bool use_omp() { return g_backend.load(std::memory_order_relaxed) == Backend::omp; }
} // namespace

void set_backend(Backend b) {
    if (b == Backend::omp && !omp_available()) b = Backend::serial;
    g_backend.store(b);
}
Backend backend() { return g_backend.load(); }

bool omp_available() {
#ifdef RPSLAB_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() {
#ifdef RPSLAB_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

#define RPSLAB_DISPATCH(name, ...) \
    return use_omp() ? omp::name(__VA_ARGS__) : serial::name(__VA_ARGS__)

void mul(cplx* z, const cplx* m, std::size_t n) { RPSLAB_DISPATCH(mul, z, m, n); }
void mul_real(cplx* z, const double* m, std::size_t n) { RPSLAB_DISPATCH(mul_real, z, m, n); }
void scale(cplx* z, cplx a, std::size_t n) { RPSLAB_DISPATCH(scale, z, a, n); }
void phase(cplx* z, const double* theta, double s, std::size_t n) {
    RPSLAB_DISPATCH(phase, z, theta, s, n);
}
void phase_table(cplx* out, const double* theta, double s, double c, std::size_t n) {
    RPSLAB_DISPATCH(phase_table, out, theta, s, c, n);
}
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) { RPSLAB_DISPATCH(axpy, a, x, y, n); }
double norm2(const cplx* z, std::size_t n) { RPSLAB_DISPATCH(norm2, z, n); }
double wnorm2(const cplx* z, const double* w, std::size_t n) { RPSLAB_DISPATCH(wnorm2, z, w, n); }
cplx dot(const cplx* a, const cplx* b, std::size_t n) { RPSLAB_DISPATCH(dot, a, b, n); }
double max_abs(const cplx* z, std::size_t n) { RPSLAB_DISPATCH(max_abs, z, n); }
void increment_norms(const cplx* e, std::size_t len, std::size_t mmax, double* out) {
    RPSLAB_DISPATCH(increment_norms, e, len, mmax, out);
}

void mul_separable(cplx* z, int dim, int n, const cplx* a0, const cplx* a1, const cplx* a2) {
    RPSLAB_DISPATCH(mul_separable, z, dim, n, a0, a1, a2);
}

#undef RPSLAB_DISPATCH

} // namespace rps::kernels
