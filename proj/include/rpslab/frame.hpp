#pragma once

#include <memory>

#include "rpslab/fft.hpp"
#include "rpslab/grid.hpp"
#include "rpslab/potential.hpp"

namespace rps {

enum class DilationWeight { three_halves, two };

constexpr double kDefaultBetaMax = 0.5;

/// Z ← e^{+i|k|²dt} Z, the free flow of i∂tZ − ΔZ = 0 (i.e. i∂tZ + H₀Z = 0).
ComplexField apply_free_propagator(const ComplexField& field, double dt);

/// f ↦ f(x + γ), applied spectrally.
ComplexField translate(const ComplexField& field, const Vec3& gamma);
/// f ↦ e^{iv·x} f.
ComplexField boost(const ComplexField& field, const Vec3& v);
/// f ↦ e^{wβ} f(e^{β} x) by band-limited interpolation, w = dim/2 or 2.
ComplexField dilate(const ComplexField& field, double beta, DilationWeight w);
/// Exact adjoint of `dilate` as implemented (not its inverse).
ComplexField dilate_adjoint(const ComplexField& field, double beta, DilationWeight w);

/// Forward: e^{iα}·Dil(β)·Boost(v)·Translate(γ); inverse undoes it in reverse order.
ComplexField apply_frame(const ComplexField& field, const FrameParams& fp, DilationWeight w,
                         Direction dir, double beta_max = kDefaultBetaMax);
/// Adjoint of the forward frame operator.
ComplexField apply_frame_adjoint(const ComplexField& field, const FrameParams& fp,
                                 DilationWeight w, double beta_max = kDefaultBetaMax);

/// Lab-frame multiplication potential e^{−2β}V(e^{−β}(x−γ)), evaluated analytically.
RealField sample_moving_potential(const PotentialProfile& profile, const FrameParams& fp,
                                  const Grid& grid);
/// ∇ₓ of the sampled moving potential, one field per axis.
std::array<RealField, 3> sample_moving_gradient(const PotentialProfile& profile,
                                                const FrameParams& fp, const Grid& grid);

double dilation_exponent(DilationWeight w, int dim);

namespace detail {
// |k|² in FFT order, shared per grid shape.
std::shared_ptr<const RVec> cached_k2(const Grid& g);
// In-place building blocks shared by the propagator; `scratch` is resized as needed.
void translate_inplace(const Grid& g, cplx* data, const Vec3& gamma);
void boost_inplace(const Grid& g, cplx* data, const Vec3& v);
void dilate_inplace(const Grid& g, cplx* data, double beta, double weight_exp, bool adjoint);
void free_propagate_inplace(const Grid& g, cplx* data, double dt);
} // namespace detail

} // namespace rps
