#pragma once

// Pointwise and reduction kernels used by every hot loop. Two backends with
// identical signatures: `serial` is the plain reference, `omp` is the
// parallel one. Reductions in `omp` sum fixed-size blocks and then combine the
// block partials in order, so the result does not depend on the thread count.

#include <cstddef>

#include "rpslab/grid.hpp"

namespace rps::kernels {

constexpr std::size_t kBlock = 8192;

#define RPSLAB_KERNEL_DECLS                                                        \
    void mul(cplx* z, const cplx* m, std::size_t n);                               \
    void mul_real(cplx* z, const double* m, std::size_t n);                        \
    void scale(cplx* z, cplx a, std::size_t n);                                    \
    /* z[i] *= exp(i * s * theta[i]) */                                            \
    void phase(cplx* z, const double* theta, double s, std::size_t n);             \
    /* out[i] = exp(i * s * theta[i]) * c */                                       \
    void phase_table(cplx* out, const double* theta, double s, double c, std::size_t n); \
    void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);                      \
    double norm2(const cplx* z, std::size_t n);                                    \
    double wnorm2(const cplx* z, const double* w, std::size_t n);                  \
    cplx dot(const cplx* a, const cplx* b, std::size_t n);                         \
    double max_abs(const cplx* z, std::size_t n);                                  \
    /* out[m] = Σ_j |e[j+m] - e[j]|^2 over the periodic sequence e, m = 0..mmax */ \
    void increment_norms(const cplx* e, std::size_t len, std::size_t mmax, double* out); \
    /* z *= a0[i]·a1[j]·a2[l] on an n^dim row-major array (a1, a2 unused in 1D) */  \
    void mul_separable(cplx* z, int dim, int n, const cplx* a0, const cplx* a1, const cplx* a2);

namespace serial {
RPSLAB_KERNEL_DECLS
}
namespace omp {
RPSLAB_KERNEL_DECLS
}

enum class Backend { serial, omp };
void set_backend(Backend b);
Backend backend();
bool omp_available();
int max_threads();

// Dispatching front end used by the library.
RPSLAB_KERNEL_DECLS

#undef RPSLAB_KERNEL_DECLS

} // namespace rps::kernels
