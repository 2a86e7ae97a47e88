#include "rpslab/modulation.hpp"

#include <cmath>

#include "rpslab/errors.hpp"
#include "rpslab/fft.hpp"
#include "rpslab/frame.hpp"
#include "rpslab/kernels.hpp"

namespace rps {

namespace {

CMatrix hermitian_part(const CMatrix& M) { return 0.5 * (M + M.adjoint()); }

double unitarity_residual(const CMatrix& U) {
    return (U.adjoint() * U - CMatrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
}

// ∂_a f by spectral differentiation
CVec spectral_derivative(const ComplexField& f, int axis) {
    const Grid& g = f.grid;
    CVec d = f.values;
    fft::forward(g, d.data());
    const RVec k = axis_wavenumbers(g);
    const double inv = 1.0 / double(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ijk = g.unravel(i);
        d[i] *= cplx(0.0, k[ijk[axis]] * inv);
    }
    fft::backward(g, d.data());
    return d;
}

CVec times_coordinate(const CVec& v, const Grid& g, int axis) {
    CVec out = v;
    for (std::size_t i = 0; i < g.size(); ++i) out[i] *= g.x(g.unravel(i)[axis]);
    return out;
}

} // namespace

int probes_per_state(int dim) { return 2 * dim + 1; }

std::vector<ComplexField> generator_probes(const BoundStateBasis& basis) {
    std::vector<ComplexField> out;
    const Grid& g = basis.grid;
    for (const auto& st : basis.states) {
        const ComplexField& f = st.g;
        for (int a = 0; a < g.dim; ++a) out.emplace_back(g, times_coordinate(f.values, g, a), Frame::comoving);
        for (int a = 0; a < g.dim; ++a) {
            CVec d = spectral_derivative(f, a);
            kernels::scale(d.data(), cplx(0.0, -1.0), d.size());
            out.emplace_back(g, std::move(d), Frame::comoving);
        }
        // −(i/2)Σ_a (x_a∂_a + ∂_a x_a): the symmetric form is Hermitian on the grid
        CVec dil(g.size(), 0.0);
        for (int a = 0; a < g.dim; ++a) {
            const CVec xd = times_coordinate(spectral_derivative(f, a), g, a);
            const ComplexField xf(g, times_coordinate(f.values, g, a));
            const CVec dx = spectral_derivative(xf, a);
            for (std::size_t i = 0; i < g.size(); ++i) dil[i] += cplx(0.0, -0.5) * (xd[i] + dx[i]);
        }
        out.emplace_back(g, std::move(dil), Frame::comoving);
    }
    return out;
}

double GeneratorMatrices::hermiticity_residual() const {
    double r = (Dil - Dil.adjoint()).cwiseAbs().maxCoeff();
    for (int a = 0; a < dim; ++a) {
        r = std::max(r, (X[a] - X[a].adjoint()).cwiseAbs().maxCoeff());
        r = std::max(r, (Grad[a] - Grad[a].adjoint()).cwiseAbs().maxCoeff());
    }
    return r;
}

GeneratorMatrices generator_matrices(const BoundStateBasis& basis) {
    if (basis.empty()) throw DataError("generator matrices need a nonempty basis");
    GeneratorMatrices gm;
    const int d = basis.grid.dim;
    gm.dim = d;
    const auto N = Eigen::Index(basis.size());
    for (int a = 0; a < 3; ++a) {
        gm.X[a] = CMatrix::Zero(N, N);
        gm.Grad[a] = CMatrix::Zero(N, N);
    }
    gm.Dil = CMatrix::Zero(N, N);
    const auto probes = generator_probes(basis);
    const int ppk = probes_per_state(d);
    for (Eigen::Index k = 0; k < N; ++k)
        for (Eigen::Index l = 0; l < N; ++l) {
            const ComplexField& gk = basis.states[k].g;
            const std::size_t base = std::size_t(l) * ppk;
            for (int a = 0; a < d; ++a) {
                gm.X[a](k, l) = inner(gk, probes[base + a]);
                gm.Grad[a](k, l) = inner(gk, probes[base + d + a]);
            }
            gm.Dil(k, l) = inner(gk, probes[base + 2 * d]);
        }
    return gm;
}

CMatrix compute_P(const GeneratorMatrices& gm, const ParamPath& path, double t) {
    const Vec3 v = path.v_at(t), D = path.D_at(t);
    CMatrix P = path.beta_at(t) * gm.Dil;
    for (int a = 0; a < gm.dim; ++a) P += v[a] * gm.X[a] + D[a] * gm.Grad[a];
    return P;
}

CMatrix hermitian_expi(const CMatrix& H, double s) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(H));
    CVector ph(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, s * es.eigenvalues()(i));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix compute_A(const CMatrix& P) { return hermitian_expi(P, -1.0); }

namespace {

// ∫_{t0}^{t1} |v|² dt + v_mid·ΔD
double phase_increment(const ParamPath& path, double t0, double t1) {
    const Vec3 v0 = path.v_at(t0), v1 = path.v_at(t1);
    const double tm = 0.5 * (t0 + t1);
    const Vec3 vm = path.v_at(tm), D0 = path.D_at(t0), D1 = path.D_at(t1);
    double s = 0.0;
    for (int a = 0; a < path.dim; ++a) {
        // Simpson on |v|², exact for linear v
        s += (t1 - t0) / 6.0 * (v0[a] * v0[a] + 4.0 * vm[a] * vm[a] + v1[a] * v1[a]);
        s += vm[a] * (D1[a] - D0[a]);
    }
    return s;
}

// Midpoint generator: e^{−2β_mid}·½(A0 E A0^H + A1 E A1^H) − phase/dt.
CMatrix midpoint_generator(const ParamPath& path, const CMatrix& A0, const CMatrix& A1, const CMatrix& E,
                           double t0, double t1) {
    const double dt = t1 - t0;
    const double w = std::exp(-2.0 * path.beta_at(0.5 * (t0 + t1)));
    CMatrix G = 0.5 * w * (A0 * E * A0.adjoint() + A1 * E * A1.adjoint());
    G -= (phase_increment(path, t0, t1) / dt) * CMatrix::Identity(E.rows(), E.cols());
    return hermitian_part(G);
}

} // namespace

std::vector<CMatrix> compute_B(const ParamPath& path, const std::vector<CMatrix>& A,
                               const RVec& energies, const RVec& times) {
    if (A.size() != times.size()) throw DataError("A series and time grid differ in length");
    const auto N = Eigen::Index(energies.size());
    CMatrix E = CMatrix::Zero(N, N);
    for (Eigen::Index k = 0; k < N; ++k) E(k, k) = energies[k];
    std::vector<CMatrix> B{CMatrix::Identity(N, N)};
    for (std::size_t n = 0; n + 1 < times.size(); ++n) {
        const double dt = times[n + 1] - times[n];
        const CMatrix G = midpoint_generator(path, A[n], A[n + 1], E, times[n], times[n + 1]);
        B.push_back(hermitian_expi(G, dt) * B.back());
    }
    return B;
}

RVec calibrated_energies(const BoundStateBasis& basis, const PotentialProfile& profile, double dt) {
    RVec out;
    if (basis.empty()) return out;
    const Grid& g = basis.grid;
    const RVec V = sample_moving_potential(profile, FrameParams{}, g).values;
    for (const auto& st : basis.states) {
        CVec z = st.g.values;
        kernels::phase(z.data(), V.data(), 0.5 * dt, z.size());
        detail::free_propagate_inplace(g, z.data(), dt);
        kernels::phase(z.data(), V.data(), 0.5 * dt, z.size());
        const cplx ov = kernels::dot(st.g.values.data(), z.data(), z.size()) * g.cell_volume();
        out.push_back(std::arg(ov) / dt);
    }
    return out;
}

ModulationResult evolve_modulation_integral(const TrajectoryBundle& run, const BoundStateBasis& basis,
                                            const ParamPath& path, const RVec& energies) {
    if (basis.empty()) throw DataError("modulation needs a nonempty basis");
    if (run.records.size() < 2) throw DataError("modulation needs a recorded run");
    const auto N = Eigen::Index(basis.size());
    if (energies.size() != basis.size()) throw DataError("energy list does not match the basis");
    const int d = basis.grid.dim;
    const int ppk = probes_per_state(d);
    for (const auto& r : run.records)
        if (r.probe.size() != std::size_t(N) * ppk || r.zeta.size() != std::size_t(N))
            throw DataError("run is missing recorded generator inner products");

    const GeneratorMatrices gm = generator_matrices(basis);
    ModulationResult res;
    res.energies = energies;
    res.large_beta = path.max_abs_beta() > 0.25;
    CMatrix E = CMatrix::Zero(N, N);
    for (Eigen::Index k = 0; k < N; ++k) E(k, k) = energies[k];

    const std::size_t M = run.records.size();
    std::vector<CVector> zeta(M);
    // continuum couplings ⟨O g_k, P_c z⟩ for O = x_a, −i∂_a, dilation
    std::vector<std::array<CVector, 3>> cx(M), cg(M);
    std::vector<CVector> cd(M);
    for (std::size_t n = 0; n < M; ++n) {
        const auto& r = run.records[n];
        res.times.push_back(r.t);
        zeta[n] = Eigen::Map<const CVector>(r.zeta.data(), N);
        for (int a = 0; a < 3; ++a) {
            cx[n][a] = CVector::Zero(N);
            cg[n][a] = CVector::Zero(N);
        }
        cd[n] = CVector::Zero(N);
        for (Eigen::Index k = 0; k < N; ++k) {
            const std::size_t base = std::size_t(k) * ppk;
            for (int a = 0; a < d; ++a) {
                cx[n][a](k) = r.probe[base + a] - (gm.X[a].row(k) * zeta[n])(0);
                cg[n][a](k) = r.probe[base + d + a] - (gm.Grad[a].row(k) * zeta[n])(0);
            }
            cd[n](k) = r.probe[base + 2 * d] - (gm.Dil.row(k) * zeta[n])(0);
        }
    }

    CMatrix A = CMatrix::Identity(N, N), B = CMatrix::Identity(N, N);
    CVector J = CVector::Zero(N);
    const CVector zt0 = zeta[0];
    const cplx I(0.0, 1.0);
    auto push = [&](const CMatrix& Acur, const CMatrix& Bcur, std::size_t n) {
        res.A.push_back(Acur);
        res.B.push_back(Bcur);
        res.P.push_back(compute_P(gm, path, res.times[n]));
        res.max_P_hermiticity = std::max(
            res.max_P_hermiticity, (res.P.back() - res.P.back().adjoint()).cwiseAbs().maxCoeff());
        res.max_A_unitarity = std::max(res.max_A_unitarity, unitarity_residual(Acur));
        res.max_B_unitarity = std::max(res.max_B_unitarity, unitarity_residual(Bcur));
        const CVector ztil = Bcur * (zt0 + I * J);
        res.zeta_modulation.push_back(Acur.adjoint() * ztil);
        res.zeta_direct.push_back(zeta[n]);
        res.zeta_tilde.push_back(Acur * zeta[n]);
    };
    push(A, B, 0);
    for (std::size_t n = 0; n + 1 < M; ++n) {
        const double t0 = res.times[n], t1 = res.times[n + 1], dt = t1 - t0;
        const double bm = path.beta_at(0.5 * (t0 + t1));
        const Vec3 v0 = path.v_at(t0), v1 = path.v_at(t1), D0 = path.D_at(t0), D1 = path.D_at(t1);
        const double dbeta = path.beta_at(t1) - path.beta_at(t0);
        CMatrix dP = dbeta * gm.Dil;
        CVector dC = dbeta * 0.5 * (cd[n] + cd[n + 1]);
        for (int a = 0; a < d; ++a) {
            const double dv = v1[a] - v0[a], dD = D1[a] - D0[a];
            dP += std::exp(bm) * dv * gm.X[a] + std::exp(-bm) * dD * gm.Grad[a];
            dC += std::exp(bm) * dv * 0.5 * (cx[n][a] + cx[n + 1][a]) +
                  std::exp(-bm) * dD * 0.5 * (cg[n][a] + cg[n + 1][a]);
        }
        // ζ̃ = Aζ removes the i dP̃ ζ term when dA = −i A dP̃
        const CMatrix Amid = A * hermitian_expi(dP, -0.5);
        const CMatrix A1 = A * hermitian_expi(dP, -1.0);
        const CMatrix G = midpoint_generator(path, A, A1, E, t0, t1);
        const CMatrix Bmid = hermitian_expi(G, 0.5 * dt) * B;
        J += Bmid.adjoint() * (Amid * dC);
        B = hermitian_expi(G, dt) * B;
        A = A1;
        push(A, B, n + 1);
    }

    double sup_direct = 0.0, sup_diff = 0.0, sup_mod_diff = 0.0;
    for (std::size_t n = 0; n < M; ++n) {
        sup_direct = std::max(sup_direct, res.zeta_direct[n].norm());
        sup_diff = std::max(sup_diff, (res.zeta_modulation[n] - res.zeta_direct[n]).norm());
        sup_mod_diff = std::max(sup_mod_diff, (res.zeta_modulation[n].cwiseAbs() -
                                               res.zeta_direct[n].cwiseAbs()).norm());
    }
    res.consistency = sup_direct > 0.0 ? sup_diff / sup_direct : sup_diff;
    res.modulus_consistency = sup_direct > 0.0 ? sup_mod_diff / sup_direct : sup_mod_diff;
    return res;
}

} // namespace rps
