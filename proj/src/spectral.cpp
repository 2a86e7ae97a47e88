#include "rpslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "rpslab/errors.hpp"
#include "rpslab/fft.hpp"
#include "rpslab/fit.hpp"
#include "rpslab/frame.hpp"
#include "rpslab/kernels.hpp"
#include "rpslab/snapshot.hpp"

namespace rps {

using CMat = Eigen::MatrixXcd;
using RMatX = Eigen::MatrixXd;

RVec BoundStateBasis::energies() const {
    RVec e;
    for (const auto& s : states) e.push_back(s.E);
    return e;
}

double BoundStateBasis::gram_error() const {
    double err = 0.0;
    for (std::size_t j = 0; j < states.size(); ++j)
        for (std::size_t k = 0; k < states.size(); ++k) {
            const cplx ip = inner(states[j].g, states[k].g);
            err = std::max(err, std::abs(ip - (j == k ? 1.0 : 0.0)));
        }
    return err;
}

Hamiltonian::Hamiltonian(const Grid& g, const PotentialProfile& profile)
    : Hamiltonian(g, sample_moving_potential(profile, FrameParams{}, g).values) {}

Hamiltonian::Hamiltonian(const Grid& g, RVec potential)
    : grid_(g), V_(std::move(potential)), k2_(k_squared(g)) {
    if (V_.size() != g.size()) throw GridMismatch("potential size does not match grid");
    const double inv = 1.0 / double(g.size());
    for (double& k : k2_) k *= inv;
}

void Hamiltonian::apply(const cplx* in, cplx* out) const {
    const std::size_t N = grid_.size();
    std::copy(in, in + N, out);
    fft::forward(grid_, out);
    kernels::mul_real(out, k2_.data(), N);
    fft::backward(grid_, out);
    for (std::size_t i = 0; i < N; ++i) out[i] += V_[i] * in[i];
}

ComplexField Hamiltonian::apply(const ComplexField& z) const {
    require_same_grid(z.grid, grid_, "Hamiltonian::apply");
    ComplexField out(z.grid, z.frame, z.time);
    apply(z.values.data(), out.values.data());
    return out;
}

double Hamiltonian::kinetic(const ComplexField& z) const {
    require_same_grid(z.grid, grid_, "Hamiltonian::kinetic");
    CVec w = z.values;
    fft::forward(grid_, w.data());
    // Σ|k|²|ẑ|² with ẑ the unitary transform: (cv/N)·Σ|k|²|DFT|²
    const double s = kernels::wnorm2(w.data(), k2_.data(), w.size());
    return s * grid_.cell_volume();
}

double Hamiltonian::potential_energy(const ComplexField& z) const {
    require_same_grid(z.grid, grid_, "Hamiltonian::potential_energy");
    return kernels::wnorm2(z.values.data(), V_.data(), z.size()) * grid_.cell_volume();
}

namespace {

// Two-pass modified Gram–Schmidt in the cv-weighted inner product. Columns that
// lose almost all their norm are dropped.
CMat orthonormalize(const CMat& S, double cv, std::size_t keep_first = 0) {
    std::vector<Eigen::VectorXcd> cols;
    for (Eigen::Index c = 0; c < S.cols(); ++c) {
        Eigen::VectorXcd v = S.col(c);
        const double n0 = std::sqrt(v.squaredNorm() * cv);
        if (!(n0 > 0.0)) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : cols) v -= u * (u.dot(v) * cv);
        const double n1 = std::sqrt(v.squaredNorm() * cv);
        if (n1 < 1e-10 * n0 && std::size_t(c) >= keep_first) continue;
        cols.push_back(v / n1);
    }
    CMat out(S.rows(), Eigen::Index(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(Eigen::Index(c)) = cols[c];
    return out;
}

CMat apply_block(const Hamiltonian& H, const CMat& X) {
    CMat HX(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) H.apply(X.col(c).data(), HX.col(c).data());
    return HX;
}

// Rayleigh–Ritz on an orthonormal basis S: lowest b Ritz pairs.
void rayleigh_ritz(const CMat& S, const CMat& HS, double cv, Eigen::Index b, CMat& C,
                   Eigen::VectorXd& theta) {
    CMat Hs = (S.adjoint() * HS) * cv;
    Hs = 0.5 * (Hs + Hs.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> es(Hs);
    C = es.eigenvectors().leftCols(b);
    theta = es.eigenvalues().head(b);
}

void imaginary_time_block(const Grid& g, const RVec& V, CMat& X, int steps, double dtau) {
    const std::size_t N = g.size();
    RVec half(N), kin = k_squared(g);
    for (std::size_t i = 0; i < N; ++i) half[i] = std::exp(-0.5 * dtau * V[i]);
    const double inv = 1.0 / double(N);
    for (double& k : kin) k = std::exp(-dtau * k) * inv;
    const double cv = g.cell_volume();
    for (int s = 0; s < steps; ++s) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            cplx* d = X.col(c).data();
            kernels::mul_real(d, half.data(), N);
            fft::forward(g, d);
            kernels::mul_real(d, kin.data(), N);
            fft::backward(g, d);
            kernels::mul_real(d, half.data(), N);
        }
        X = orthonormalize(X, cv, X.cols());
    }
}

} // namespace

BoundStateBasis solve_bound_states(const PotentialProfile& profile, const Grid& grid, int k_max,
                                   double tol, const SolverOptions& opt) {
    if (k_max < 1) throw ConfigError("k_max must be at least 1");
    if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    profile.validate();
    BoundStateBasis basis;
    basis.grid = grid;
    basis.e_floor = opt.e_floor_fraction * profile.depth;
    if (profile.is_zero()) return basis;

    const Hamiltonian H(grid, profile);
    const std::size_t N = grid.size();
    const double cv = grid.cell_volume();
    const Eigen::Index b = std::min<Eigen::Index>(k_max + opt.guard, Eigen::Index(N) / 2);

    // Seeded random start under a broad envelope, so every symmetry sector is present.
    CMat X(Eigen::Index(N), b);
    {
        std::mt19937_64 rng(opt.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double w = std::max(profile.width, grid.L / 4.0);
        for (Eigen::Index c = 0; c < b; ++c)
            for (std::size_t i = 0; i < N; ++i) {
                const auto ijk = grid.unravel(i);
                double r2 = 0.0;
                for (int a = 0; a < grid.dim; ++a) r2 += grid.x(ijk[a]) * grid.x(ijk[a]);
                X(Eigen::Index(i), c) = gauss(rng) * std::exp(-0.5 * r2 / (w * w));
            }
    }
    X = orthonormalize(X, cv, b);
    imaginary_time_block(grid, H.potential(), X, opt.itp_steps, opt.itp_dtau);

    // Block LOBPCG on the exact discrete H with a kinetic preconditioner.
    const RVec k2 = k_squared(grid);
    CMat HX = apply_block(H, X);
    CMat C;
    Eigen::VectorXd theta;
    rayleigh_ritz(X, HX, cv, b, C, theta);
    X = X * C;
    HX = HX * C;
    CMat P;
    Eigen::VectorXd res(b);
    const Eigen::Index want = std::min<Eigen::Index>(k_max, b);
    bool done = false;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        CMat R = HX - X * theta.asDiagonal();
        for (Eigen::Index c = 0; c < b; ++c) res(c) = std::sqrt(R.col(c).squaredNorm() * cv);
        done = true;
        for (Eigen::Index c = 0; c < want; ++c) {
            const bool bound_ok = theta(c) < -basis.e_floor && res(c) <= tol * std::abs(theta(c));
            // only trust "no state below the floor" once the Ritz pair is itself accurate
            const bool above = theta(c) - res(c) >= -basis.e_floor && res(c) <= 0.25 * basis.e_floor;
            if (!bound_ok && !above) done = false;
        }
        if (done) break;
        CMat W = R;
        for (Eigen::Index c = 0; c < b; ++c) {
            cplx* d = W.col(c).data();
            const double shift = theta(c) < 0.0 ? -theta(c) : 1.0;
            fft::forward(grid, d);
            for (std::size_t i = 0; i < N; ++i) d[i] /= (k2[i] + shift) * double(N);
            fft::backward(grid, d);
        }
        CMat S(Eigen::Index(N), b + W.cols() + P.cols());
        S.leftCols(b) = X;
        S.middleCols(b, W.cols()) = W;
        if (P.cols() > 0) S.rightCols(P.cols()) = P;
        S = orthonormalize(S, cv, b);
        const CMat HS = apply_block(H, S);
        rayleigh_ritz(S, HS, cv, b, C, theta);
        const CMat Xn = S * C;
        HX = HS * C;
        P = S.rightCols(S.cols() - b) * C.bottomRows(S.cols() - b);
        X = Xn;
    }
    basis.iterations = it;
    if (!done) {
        std::ostringstream msg;
        msg << "bound-state solver did not converge in " << opt.max_iter << " iterations; residuals";
        for (Eigen::Index c = 0; c < want; ++c) msg << " E=" << theta(c) << ":" << res(c);
        throw ConvergenceError(msg.str());
    }

    // Final orthonormalization of the accepted states, then Rayleigh energies.
    std::vector<Eigen::Index> accepted;
    for (Eigen::Index c = 0; c < b; ++c) {
        if (theta(c) < -basis.e_floor && c < want) accepted.push_back(c);
        else if (theta(c) < 0.0 && theta(c) >= -basis.e_floor) basis.threshold_flag = true;
    }
    CMat G(Eigen::Index(N), Eigen::Index(accepted.size()));
    for (std::size_t j = 0; j < accepted.size(); ++j) G.col(Eigen::Index(j)) = X.col(accepted[j]);
    G = orthonormalize(G, cv, G.cols());
    for (Eigen::Index c = 0; c < G.cols(); ++c) {
        ComplexField f(grid);
        Eigen::Index peak;
        G.col(c).cwiseAbs().maxCoeff(&peak);
        const cplx ph = std::conj(G(peak, c)) / std::abs(G(peak, c));
        for (std::size_t i = 0; i < N; ++i) f.values[i] = G(Eigen::Index(i), c) * ph;
        BoundState st;
        const ComplexField Hf = H.apply(f);
        st.E = inner(f, Hf).real();
        CVec r(N);
        for (std::size_t i = 0; i < N; ++i) r[i] = Hf.values[i] - st.E * f.values[i];
        st.residual = std::sqrt(kernels::norm2(r.data(), N) * cv);
        st.g = std::move(f);
        basis.states.push_back(std::move(st));
    }
    std::stable_sort(basis.states.begin(), basis.states.end(),
                     [](const auto& a, const auto& b2) { return a.E < b2.E; });
    return basis;
}

CVec project_point(const ComplexField& field, const BoundStateBasis& basis) {
    CVec z;
    for (const auto& s : basis.states) {
        require_same_grid(field.grid, s.g.grid, "project_point");
        z.push_back(inner(s.g, field));
    }
    return z;
}

ComplexField project_continuous(const ComplexField& field, const BoundStateBasis& basis) {
    ComplexField out = field;
    const CVec z = project_point(field, basis);
    for (std::size_t k = 0; k < z.size(); ++k)
        kernels::axpy(-z[k], basis.states[k].g.values.data(), out.values.data(), out.size());
    return out;
}

double point_mass(const ComplexField& field, const BoundStateBasis& basis) {
    double m = 0.0;
    for (const auto& c : project_point(field, basis)) m += std::norm(c);
    return m;
}

DecayReport check_exponential_decay(const ComplexField& g, double E, double sigma) {
    DecayReport rep;
    if (!(E < 0.0)) throw RangeError("decay check needs E < 0");
    rep.target = std::sqrt(-E);
    const Grid& grid = g.grid;
    const double dr = grid.dx();
    const std::size_t nb = static_cast<std::size_t>(std::ceil(grid.L * std::sqrt(double(grid.dim)) / dr)) + 2;
    RVec sum(nb, 0.0), cnt(nb, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto ijk = grid.unravel(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) r2 += grid.x(ijk[a]) * grid.x(ijk[a]);
        const auto bin = static_cast<std::size_t>(std::floor(std::sqrt(r2) / dr + 0.5));
        sum[bin] += std::abs(g.values[i]);
        cnt[bin] += 1.0;
    }
    RVec r, y;
    double hi = 0.0, lo = 0.0;
    const double rmax_box = 0.75 * grid.L;
    for (std::size_t b = 0; b < nb; ++b) {
        if (cnt[b] == 0.0) continue;
        const double rb = double(b) * dr;
        if (rb < 2.0 * sigma) continue;
        if (rb > rmax_box) break;
        const double avg = sum[b] / cnt[b];
        if (avg < 1e-12) break;
        if (r.empty()) hi = avg;
        lo = avg;
        r.push_back(rb);
        y.push_back(std::log(avg) + 0.5 * double(grid.dim - 1) * std::log(rb));
    }
    rep.bins = int(r.size());
    if (r.size() < 6) {
        rep.inconclusive = true;
        rep.reason = "fewer than 6 radial bins in the fit window";
        return rep;
    }
    rep.r_min = r.front();
    rep.r_max = r.back();
    rep.dynamic_range = lo > 0.0 ? hi / lo : 0.0;
    const LinearFit lf = linear_fit(r, y);
    rep.rate = -lf.slope;
    rep.r2 = lf.r2;
    rep.rel_error = std::abs(rep.rate - rep.target) / rep.target;
    const auto q = quadratic_fit(r, y);
    const double span = rep.r_max - rep.r_min;
    rep.curvature = std::abs(q[1]) > 0.0 ? std::abs(q[2]) * span / std::abs(q[1]) : 1e300;
    if (rep.dynamic_range < 100.0) {
        rep.inconclusive = true;
        rep.reason = "dynamic range below 100";
    } else if (rep.r2 < 0.995) {
        rep.inconclusive = true;
        rep.reason = "poor linear fit (R^2 < 0.995)";
    } else if (rep.curvature > 0.1) {
        rep.inconclusive = true;
        rep.reason = "quadratic-in-r residual";
    }
    return rep;
}

double lorentz_norm(const RVec& abs_values, double w, double p, double q) {
    if (!(p > 1.0) || !std::isfinite(p)) throw RangeError("Lorentz p must lie in (1, inf)");
    if (!(q >= 1.0) || !std::isfinite(q)) throw RangeError("Lorentz q must lie in [1, inf)");
    RVec a = abs_values;
    std::sort(a.begin(), a.end(), std::greater<>());
    const double r = q / p;
    // Σ a^q (p/q)(W_i^r − W_{i−1}^r) over runs of equal values, Neumaier summation
    double sum = 0.0, comp = 0.0;
    std::size_t i = 0;
    while (i < a.size() && a[i] > 0.0) {
        std::size_t j = i;
        while (j + 1 < a.size() && a[j + 1] == a[i]) ++j;
        const double Wi = double(j + 1) * w;
        const double frac = double(j + 1 - i) / double(j + 1);
        const double dW = -std::pow(Wi, r) * std::expm1(r * std::log1p(-frac));
        const double term = std::pow(a[i], q) * (p / q) * dW;
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        i = j + 1;
    }
    return std::pow(sum + comp, 1.0 / q);
}

double lorentz_norm(const ComplexField& f, double p, double q) {
    RVec a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f.values[i]);
    return lorentz_norm(a, f.grid.cell_volume(), p, q);
}

void write_basis(const std::filesystem::path& dir, const BoundStateBasis& basis,
                 const std::string& run_id) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    j["dim"] = basis.grid.dim;
    j["n"] = basis.grid.n;
    j["L"] = basis.grid.L;
    j["e_floor"] = basis.e_floor;
    j["threshold_flag"] = basis.threshold_flag;
    j["gram_error"] = basis.gram_error();
    j["E_k"] = nlohmann::json::array();
    j["residuals"] = nlohmann::json::array();
    for (std::size_t k = 0; k < basis.size(); ++k) {
        j["E_k"].push_back(basis.states[k].E);
        j["residuals"].push_back(basis.states[k].residual);
        write_snapshot(dir / ("g" + std::to_string(k)), basis.states[k].g, run_id);
    }
    std::ofstream out(dir / "basis.json");
    out << j.dump(2) << '\n';
}

BoundStateBasis read_basis(const std::filesystem::path& dir) {
    std::ifstream in(dir / "basis.json");
    if (!in) throw DataError("missing basis.json in " + dir.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("basis.json: ") + e.what());
    }
    BoundStateBasis b;
    b.grid = Grid(j.at("dim").get<int>(), j.at("n").get<int>(), j.at("L").get<double>());
    b.e_floor = j.value("e_floor", 0.0);
    b.threshold_flag = j.value("threshold_flag", false);
    const auto& E = j.at("E_k");
    for (std::size_t k = 0; k < E.size(); ++k) {
        BoundState s;
        s.E = E[k].get<double>();
        s.residual = j.at("residuals")[k].get<double>();
        s.g = read_snapshot(dir / ("g" + std::to_string(k)));
        require_same_grid(s.g.grid, b.grid, "read_basis");
        b.states.push_back(std::move(s));
    }
    return b;
}

} // namespace rps
