#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace rps {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;
using Vec3 = std::array<double, 3>;

/// Periodic box [-L, L)^dim with n points per axis. Row-major storage, axis 0
/// slowest.
struct Grid {
    int dim = 1;
    int n = 8;
    double L = 1.0;

    Grid() = default;
    Grid(int dim, int n, double L);

    std::size_t size() const;
    double dx() const { return 2.0 * L / n; }
    double cell_volume() const;
    double x(int i) const { return -L + i * dx(); }
    // Angular wavenumber of FFT index m (standard FFT ordering).
    double k(int m) const;
    double k_nyquist() const;
    std::array<int, 3> unravel(std::size_t idx) const;

    bool operator==(const Grid& o) const { return dim == o.dim && n == o.n && L == o.L; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

enum class Frame { lab, comoving };
const char* to_string(Frame f);
Frame frame_from_string(const std::string& s);

struct ComplexField {
    Grid grid;
    CVec values;
    Frame frame = Frame::lab;
    double time = 0.0;

    ComplexField() = default;
    explicit ComplexField(const Grid& g, Frame f = Frame::lab, double t = 0.0)
        : grid(g), values(g.size()), frame(f), time(t) {}
    ComplexField(const Grid& g, CVec v, Frame f = Frame::lab, double t = 0.0);

    std::size_t size() const { return values.size(); }
    double norm2() const;               // ‖·‖₂² with cell_volume weight
    double norm() const;
    bool finite() const;
};

struct RealField {
    Grid grid;
    RVec values;

    RealField() = default;
    explicit RealField(const Grid& g) : grid(g), values(g.size(), 0.0) {}
};

struct FrameParams {
    Vec3 gamma{0, 0, 0};
    Vec3 v{0, 0, 0};
    double beta = 0.0;
    double alpha = 0.0;

    bool finite() const;
    bool is_identity() const;
};

// ⟨a, b⟩ = Σ conj(a) b · cell_volume
cplx inner(const ComplexField& a, const ComplexField& b);

// Coordinates along one axis, x_i = -L + i dx.
RVec axis_coords(const Grid& g);
// Wavenumbers along one axis in FFT order.
RVec axis_wavenumbers(const Grid& g);
// |k|^2 on the full grid in FFT order.
RVec k_squared(const Grid& g);

} // namespace rps
