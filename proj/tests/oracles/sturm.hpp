#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Eigenvalues of -u'' + V u = E u on a uniform finite-difference grid with Dirichlet
// ends, by Sturm-sequence bisection on the symmetric tridiagonal matrix. Used both for
// 1D wells on [-R, R] and for the 3D radial problem on (0, R] with u = r g.
namespace oracle {

struct Tridiagonal {
    std::vector<double> diag;
    double off = 0.0; // constant off-diagonal
};

inline Tridiagonal fd_operator(const std::function<double(double)>& V, double a, double b, int n) {
    // n interior points on (a, b)
    const double h = (b - a) / (n + 1);
    Tridiagonal t;
    t.diag.resize(n);
    for (int i = 0; i < n; ++i) t.diag[i] = 2.0 / (h * h) + V(a + (i + 1) * h);
    t.off = -1.0 / (h * h);
    return t;
}

// number of eigenvalues strictly below x
inline int sturm_count(const Tridiagonal& t, double x) {
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < t.diag.size(); ++i) {
        const double prev = i == 0 ? 0.0 : t.off * t.off / q;
        q = t.diag[i] - x - prev;
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

// k-th eigenvalue (0-based)
inline double sturm_eigenvalue(const Tridiagonal& t, int k, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sturm_count(t, mid) > k ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// Richardson extrapolation of the O(h^2) finite-difference error from n and 2n+1 points.
inline double refined_eigenvalue(const std::function<double(double)>& V, double a, double b, int n, int k,
                                 double lo, double hi) {
    const double e1 = sturm_eigenvalue(fd_operator(V, a, b, n), k, lo, hi);
    const double e2 = sturm_eigenvalue(fd_operator(V, a, b, 2 * n + 1), k, lo, hi);
    return (4.0 * e2 - e1) / 3.0;
}

} // namespace oracle
