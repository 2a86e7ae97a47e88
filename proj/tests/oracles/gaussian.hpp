#pragma once

#include <cmath>
#include <complex>

// Free evolution of exp(-|x|^2/(2 s^2)) under i dZ/dt - Laplace Z = 0, product of
// one-dimensional factors: sqrt(s^2/(s^2 - 2it)) exp(-x^2/(2(s^2 - 2it))).
namespace oracle {

inline std::complex<double> spreading_gaussian_1d(double x, double t, double s) {
    const std::complex<double> a(s * s, -2.0 * t);
    return std::sqrt(s * s / a) * std::exp(-x * x / (2.0 * a));
}

inline double spreading_gaussian_sup(double t, double s, int dim) {
    return std::pow(1.0 + 4.0 * t * t / (s * s * s * s), -0.25 * dim);
}

} // namespace oracle
