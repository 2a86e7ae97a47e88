#pragma once

#include <cmath>
#include <vector>

namespace oracle {

// (sum_{i != j} |f_i - f_j|^2 / |t_i - t_j|^{1+2s} dt^2)^{1/2}
inline double gagliardo(const std::vector<double>& f, double dt, double s) {
    const std::size_t n = f.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double h = std::abs(double(i) - double(j)) * dt;
            acc += (f[i] - f[j]) * (f[i] - f[j]) / std::pow(h, 1.0 + 2.0 * s);
        }
    return std::sqrt(acc * dt * dt);
}

} // namespace oracle
