#pragma once

#include <cmath>
#include <cstdint>

#include "gpscat/grid.hpp"
#include "gpscat/multipliers.hpp"

namespace gpscat::test {

/// Smooth random envelope exp(-|xi|^2 / (2 width^2)), zero at the origin.
inline Profile gaussian_profile(double width) {
  return [width](const Wavevector& w) {
    return w.abs == 0.0 ? 0.0 : std::exp(-w.abs * w.abs / (2.0 * width * width));
  };
}

/// Real, mean-free, dealiased at `order`.
inline SpectralField smooth_real_field(const Grid& grid, std::uint64_t seed, double width,
                                       int order = 2, Frame frame = Frame::u) {
  return without_mean(dealias(random_real_field(grid, gaussian_profile(width), seed, frame), order));
}

/// Complex (u1 + i u2), mean-free, dealiased at `order`.
inline SpectralField smooth_complex_field(const Grid& grid, std::uint64_t seed, double width,
                                          int order = 2, Frame frame = Frame::u) {
  auto a = random_real_field(grid, gaussian_profile(width), seed, frame);
  auto b = random_real_field(grid, gaussian_profile(width), seed + 7919, frame);
  return without_mean(dealias(a + Complex(0.0, 1.0) * b, order));
}

inline double relative(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

/// ||a - b||_2 / ||b||_2.
inline double relative_l2(const SpectralField& a, const SpectralField& b) {
  return l2_norm(to_frequency(a) - to_frequency(b)) / l2_norm(b);
}

}  // namespace gpscat::test
