#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"
#include "gpscat/normal_form.hpp"
#include "support.hpp"

using namespace gpscat;
using test::relative_l2;
using test::smooth_complex_field;
using test::smooth_real_field;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

SpectralField scaled_to(const SpectralField& f, double target, double sigma, double s) {
  return Complex(target / sobolev_weighted_norm(f, sigma, s)) * f;
}

SpectralField pointwise_square(const SpectralField& f) {
  auto p = to_physical(f).copy_values();
  for (auto& x : p) x = Complex(std::norm(x));
  return to_frequency(SpectralField(f.grid(), std::move(p), f.frame(), Representation::physical));
}

double sup_norm(const SpectralField& f) {
  double m = 0.0;
  for (auto v : to_physical(f).values()) m = std::max(m, std::abs(v));
  return m;
}

SpectralField low_field(const Grid& g, std::uint64_t seed, double cap) {
  Profile p = [cap](const Wavevector& w) { return (w.abs > 0.0 && w.abs <= cap) ? 1.0 : 0.0; };
  return random_real_field(g, p, seed);
}

}  // namespace

TEST_SUITE("normal_form") {

TEST_CASE("F on constants") {
  Grid g(1, 16, 3.0);
  CHECK(l2_norm(nonlinearity_F(SpectralField::zeros(g))) == 0.0);
  const double c = 0.3;
  auto F = nonlinearity_F(to_frequency(sample_field(g, [&](auto) { return Complex(c); })));
  CHECK(std::abs(F[0] - Complex(3 * c * c + c * c * c)) < 1e-15);
  const double e = 0.01;
  auto Fi = nonlinearity_F(to_frequency(sample_field(g, [&](auto) { return Complex(0.0, e); })));
  CHECK(std::abs(Fi[0] - Complex(e * e, e * e * e)) < 1e-17);
}

TEST_CASE("G terms vanish for zero and reduce for imaginary low fields") {
  Grid g(2, 32, 16.0 * kPi);
  auto [G1z, G2z] = compute_G(SpectralField::zeros(g));
  CHECK(l2_norm(G1z) == 0.0);
  CHECK(l2_norm(G2z) == 0.0);

  // u = i u2 with |xi| <= 1/4: u2^2 lives where P = 1 and Q = 0.
  auto u2 = Complex(0.05) * low_field(g, 3, 0.25);
  auto u = kI * u2;
  auto [G1, G2] = compute_G(u);
  auto lap_half = Complex(0.5) * apply_multiplier(multiplier::laplacian(), pointwise_square(u2));
  CHECK(max_abs_difference(G1, lap_half) < 1e-16);
  CHECK(l2_norm(G2) < 1e-18);
}

TEST_CASE("Q u2^2 split") {
  Grid g(2, 32, 16.0 * kPi);
  auto low = Complex(0.1) * low_field(g, 5, 0.5);
  auto [a0, b0] = q_split(low);
  CHECK(l2_norm(a0) <= 1e-15);
  CHECK(l2_norm(b0) <= 1e-15);

  Grid g2(2, 48, 20.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto u2 = smooth_real_field(g2, seed, 2.0);
    auto [a, b] = q_split(u2);
    auto full = apply_multiplier(multiplier::Q(), dealiased_product(u2, u2));
    CHECK(max_abs_difference(a + b, full) <= 1e-12 * l2_norm(full));
  }

  // cos(4x)^2 = 1/2 + cos(8x)/2; Q keeps only the cos(8x) half.
  Grid line(1, 32, 2.0 * kPi);
  auto c4 = sample_field(line, [](std::span<const double> x) { return Complex(std::cos(4.0 * x[0])); });
  auto [a, b] = q_split(c4);
  auto c8 = sample_field(line, [](std::span<const double> x) { return Complex(0.5 * std::cos(8.0 * x[0])); });
  CHECK(max_abs_difference(a, c8) < 1e-15);
  CHECK(l2_norm(b) < 1e-15);
}

TEST_CASE("normal form substitution") {
  Grid line(1, 32, 2.0 * kPi);
  CHECK(l2_norm(to_normal_form(SpectralField::zeros(line))) == 0.0);
  auto c4 = sample_field(line, [](std::span<const double> x) { return Complex(std::cos(4.0 * x[0])); });
  auto w = to_normal_form(c4);
  CHECK(w.frame() == Frame::w);
  CHECK(std::abs(w[0] - Complex(0.25)) < 1e-15);
  CHECK(max_abs_difference(without_mean(w), to_frequency(c4)) < 1e-15);

  Grid g(2, 32, 16.0 * kPi);
  auto u = Complex(0.2) * low_field(g, 7, 0.25);
  auto expected = to_frequency(u) + Complex(0.5) * pointwise_square(u);
  CHECK(max_abs_difference(to_normal_form(u), expected) < 1e-15);
}

TEST_CASE("M on imaginary fields and its quadratic size") {
  Grid g(2, 32, 24.0);
  CHECK(l2_norm(apply_M(SpectralField::zeros(g, Frame::v))) == 0.0);

  auto gfield = Complex(0.05) * smooth_real_field(g, 2, 1.5);
  auto z = apply_M(kI * gfield);
  auto expected = kI * gfield + Complex(0.5) * apply_multiplier(
      multiplier::U_inverse(), apply_multiplier(multiplier::P(), without_mean(pointwise_square(gfield))));
  CHECK(max_abs_difference(z, expected) < 1e-15);
  CHECK(z.frame() == Frame::z);

  const auto [sigma, s] = default_norm_exponents(2);
  std::vector<double> constants;
  for (double amp : {0.01, 0.05, 0.1}) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto v = scaled_to(smooth_complex_field(g, seed, 1.5, 2, Frame::v), amp, sigma, s);
      const double diff = sobolev_weighted_norm(without_mean(apply_M(v) - v), sigma, s);
      worst = std::max(worst, diff / (amp * amp));
      const double ratio = sobolev_weighted_norm(without_mean(apply_M(v)), sigma, s) / amp;
      CHECK(ratio >= 0.5);
      CHECK(ratio <= 2.0);
    }
    constants.push_back(worst);
  }
  CHECK(constants.back() / constants.front() == doctest::Approx(1.0).epsilon(0.5));
}

TEST_CASE("M^{-1} iteration") {
  Grid g(2, 32, 24.0);
  auto [zero, rep0] = invert_M(SpectralField::zeros(g, Frame::z));
  CHECK(rep0.iterations == 1);
  CHECK(l2_norm(zero) == 0.0);

  const auto [sigma, s] = default_norm_exponents(2);
  auto v = scaled_to(smooth_complex_field(g, 17, 1.5, 2, Frame::v), 0.05, sigma, s);
  FixedPointOptions opt;
  opt.tol = 1e-11;
  auto [back, rep] = invert_M(apply_M(v), opt);
  CHECK(sobolev_weighted_norm(without_mean(back - v), sigma, s) <= 1e-10);
  CHECK(back.frame() == Frame::v);

  // The contraction ratio is linear in ||z||.
  auto ratio_at = [&](double amp) {
    auto z = scaled_to(smooth_complex_field(g, 23, 1.5, 2, Frame::z), amp, sigma, s);
    FixedPointOptions o;
    o.tol = 1e-14;
    return invert_M(z, o).second.contraction_ratio;
  };
  const double r1 = ratio_at(0.04), r2 = ratio_at(0.02);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.25));

  auto big = scaled_to(smooth_complex_field(g, 1, 1.5, 2, Frame::z), 0.5, sigma, s);
  CHECK_THROWS_AS(invert_M(big), SmallnessViolated);
}

TEST_CASE("w identity residuals") {
  Grid g(2, 64, 20.0);
  CHECK(w_identity_residual(SpectralField::zeros(g), {}) == 0.0);
  // |k| < N/9 keeps u_t (cubic) inside the order-2 mask, so every product is exact.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto u = smooth_complex_field(g, seed, 2.0, 8);
    u = Complex(0.1 / sup_norm(u)) * u;
    CHECK(w_identity_residual(u, {0.01, -0.02}) <= 1e-10);
  }
  Grid line(1, 32, 2.0 * kPi);
  auto mode = sample_field(line, [](std::span<const double> x) { return 0.1 * std::exp(kI * x[0]); });
  CHECK(w_identity_residual(mode, {}) <= 1e-12);
}

TEST_CASE("radial encoding of |f|^2") {
  Grid line(1, 256, 40.0);
  auto radius = [&](double x) { return x < 20.0 ? x : x - 40.0; };
  auto F = dealias(sample_field(line, [&](std::span<const double> x) {
    const double r = radius(x[0]);
    return Complex(0.1 * r * std::exp(-r * r / 2.0));
  }));
  auto expected = dealias(sample_field(line, [&](std::span<const double> x) {
    const double r = radius(x[0]);
    return Complex(0.01 * r * std::exp(-r * r));
  }));
  CHECK(max_abs_difference(radial3::square_modulus(F), expected) < 1e-12);
}

}  // TEST_SUITE
