#include "rpslab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rpslab/errors.hpp"
#include "rpslab/kernels.hpp"

namespace rps {

Grid::Grid(int dim_, int n_, double L_) : dim(dim_), n(n_), L(L_) {
    if (dim != 1 && dim != 3) throw ConfigError("grid dim must be 1 or 3");
    if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("grid n must be a power of two >= 8");
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid L must be positive");
}

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n);
    return s;
}

double Grid::cell_volume() const { return std::pow(dx(), dim); }

double Grid::k(int m) const {
    const double dk = std::numbers::pi / L;
    return dk * (m < n / 2 ? m : m - n);
}

double Grid::k_nyquist() const { return std::numbers::pi / L * (n / 2); }

std::array<int, 3> Grid::unravel(std::size_t idx) const {
    std::array<int, 3> out{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        out[a] = static_cast<int>(idx % n);
        idx /= n;
    }
    return out;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

const char* to_string(Frame f) { return f == Frame::lab ? "lab" : "comoving"; }

Frame frame_from_string(const std::string& s) {
    if (s == "lab") return Frame::lab;
    if (s == "comoving") return Frame::comoving;
    throw SchemaError("unknown frame '" + s + "'");
}

ComplexField::ComplexField(const Grid& g, CVec v, Frame f, double t)
    : grid(g), values(std::move(v)), frame(f), time(t) {
    if (values.size() != g.size()) throw GridMismatch("field size does not match grid");
}

double ComplexField::norm2() const {
    return kernels::norm2(values.data(), values.size()) * grid.cell_volume();
}

double ComplexField::norm() const { return std::sqrt(norm2()); }

bool ComplexField::finite() const {
    for (const auto& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

bool FrameParams::finite() const {
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(gamma[i]) || !std::isfinite(v[i])) return false;
    return std::isfinite(beta) && std::isfinite(alpha);
}

bool FrameParams::is_identity() const {
    for (int i = 0; i < 3; ++i)
        if (gamma[i] != 0.0 || v[i] != 0.0) return false;
    return beta == 0.0 && alpha == 0.0;
}

cplx inner(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a.grid, b.grid, "inner");
    return kernels::dot(a.values.data(), b.values.data(), a.size()) * a.grid.cell_volume();
}

RVec axis_coords(const Grid& g) {
    RVec x(g.n);
    for (int i = 0; i < g.n; ++i) x[i] = g.x(i);
    return x;
}

RVec axis_wavenumbers(const Grid& g) {
    RVec k(g.n);
    for (int i = 0; i < g.n; ++i) k[i] = g.k(i);
    return k;
}

RVec k_squared(const Grid& g) {
    const RVec k = axis_wavenumbers(g);
    RVec out(g.size());
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) out[i] = k[i] * k[i];
    } else {
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int l = 0; l < g.n; ++l) out[idx++] = k[i] * k[i] + k[j] * k[j] + k[l] * k[l];
    }
    return out;
}

} // namespace rps
