#include "rpslab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "rpslab/errors.hpp"
#include "rpslab/kernels.hpp"

namespace rps::fft {

namespace {

std::mutex g_plan_mutex;
std::map<std::tuple<int, std::size_t, int>, fftw_plan> g_plans;

fftw_plan get_plan(int rank, std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_tuple(rank, n, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    std::size_t total = 1;
    int dims[3];
    for (int i = 0; i < rank; ++i) {
        dims[i] = static_cast<int>(n);
        total *= n;
    }
    auto* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(rank, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw ConfigError("FFTW could not create a plan");
    g_plans.emplace(key, p);
    return p;
}

void run(const Grid& g, cplx* data, int sign) {
    if (g.n < 8 || (g.n & (g.n - 1)) != 0)
        throw ConfigError("spectral transform needs a power-of-two n >= 8");
    fftw_plan p = get_plan(g.dim, static_cast<std::size_t>(g.n), sign);
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

} // namespace

void forward(const Grid& g, cplx* data) { run(g, data, FFTW_FORWARD); }
void backward(const Grid& g, cplx* data) { run(g, data, FFTW_BACKWARD); }

void dft_1d(cplx* data, std::size_t len, int sign) {
    if (len == 0) return;
    fftw_plan p = get_plan(1, len, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

} // namespace rps::fft

namespace rps {

ComplexField spectral_transform(const ComplexField& field, Direction dir) {
    ComplexField out = field;
    const Grid& g = field.grid;
    const double N = static_cast<double>(g.size());
    if (dir == Direction::forward) {
        fft::forward(g, out.values.data());
        kernels::scale(out.values.data(), std::sqrt(g.cell_volume() / N), out.size());
    } else {
        fft::backward(g, out.values.data());
        kernels::scale(out.values.data(), 1.0 / std::sqrt(g.cell_volume() * N), out.size());
    }
    return out;
}

} // namespace rps
