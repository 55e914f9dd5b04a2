#pragma once

#include <complex>
#include <vector>

namespace hypfill::detail {

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized forward DFT of an m^dim row-major array (dim 1 or 2).
Spectrum fft_forward(const std::vector<double>& values, int dim, int m);

/// Inverse DFT scaled by 1 / m^dim; returns the real part.
std::vector<double> fft_inverse_real(Spectrum spec, int dim, int m);

/// Signed frequency index of DFT bin k: k for k < m/2, k - m otherwise.
inline int signed_bin(int k, int m) { return k < (m + 1) / 2 ? k : k - m; }

}  // namespace hypfill::detail
