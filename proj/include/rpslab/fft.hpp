#pragma once

#include "rpslab/grid.hpp"

namespace rps {

enum class Direction { forward, inverse };

namespace fft {

// Unnormalized in-place transforms over the whole grid (sign −1 forward,
// +1 backward). Plans are cached per shape; execution is thread safe.
void forward(const Grid& g, cplx* data);
void backward(const Grid& g, cplx* data);

// Unnormalized in-place 1D transform of arbitrary length.
void dft_1d(cplx* data, std::size_t len, int sign);

} // namespace fft

/// Unitary-normalized transform: forward = sqrt(cell_volume/N)·DFT, so the
/// constant 1 maps to (2L)^{dim/2} at k = 0 and Σ|f̂|² = ‖f‖₂².
ComplexField spectral_transform(const ComplexField& field, Direction dir);

} // namespace rps
