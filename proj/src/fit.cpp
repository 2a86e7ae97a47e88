#include "rpslab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "rpslab/errors.hpp"

namespace rps {

namespace {

double r_squared(const RVec& y, const RVec& yhat) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

RVec ranks(const RVec& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    RVec r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * double(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace

LinearFit linear_fit(const RVec& x, const RVec& y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("linear fit needs >= 2 paired points");
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DataError("linear fit: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points = x.size();
    RVec yhat(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) yhat[i] = f.intercept + f.slope * x[i];
    f.r2 = r_squared(y, yhat);
    return f;
}

std::array<double, 4> quadratic_fit(const RVec& x, const RVec& y) {
    if (x.size() != y.size() || x.size() < 3) throw DataError("quadratic fit needs >= 3 points");
    Eigen::MatrixXd A(x.size(), 3);
    Eigen::VectorXd b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = x[i];
        A(i, 2) = x[i] * x[i];
        b(i) = y[i];
    }
    Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
    RVec yhat(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) yhat[i] = c(0) + c(1) * x[i] + c(2) * x[i] * x[i];
    return {c(0), c(1), c(2), r_squared(y, yhat)};
}

double spearman(const RVec& x, const RVec& y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("spearman needs >= 2 paired points");
    const RVec rx = ranks(x), ry = ranks(y);
    const double n = double(x.size());
    const double m = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - m) * (ry[i] - m);
        sxx += (rx[i] - m) * (rx[i] - m);
        syy += (ry[i] - m) * (ry[i] - m);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace rps
