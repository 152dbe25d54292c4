#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gpscat::detail {

/// Unnormalized d-dimensional complex DFT, sign -1 (forward) or +1 (inverse).
/// Plans are created once per (d, N, sign) and shared; execution is reentrant.
void fft_nd(int dim, int points, int sign, std::span<const std::complex<double>> in,
            std::span<std::complex<double>> out);

/// Unnormalized 1D complex DFT of arbitrary length.
void fft_1d(int sign, std::span<const std::complex<double>> in,
            std::span<std::complex<double>> out);

}  // namespace gpscat::detail
