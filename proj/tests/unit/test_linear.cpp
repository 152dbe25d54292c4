#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"
#include "gpscat/linear.hpp"
#include "support.hpp"

using namespace gpscat;
using test::relative_l2;
using test::smooth_complex_field;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// (2 pi)^{-d/2} |S^{d-1}| int r^{d-1} chi_R(r) dr by composite Simpson on [R/2, 2R].
double transform_at_origin(int d, double R) {
  const double sphere = d == 1 ? 2.0 : d == 2 ? 2.0 * kPi : 4.0 * kPi;
  const int n = 20000;
  const double a = 0.5 * R, b = 2.0 * R, h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = a + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::pow(r, d - 1) * block_cutoff(R, r);
  }
  return sum * h / 3.0 * sphere / std::pow(2.0 * kPi, 0.5 * d);
}

}  // namespace

TEST_SUITE("linear") {

TEST_CASE("diagonal propagator on single modes, unitarity and group law") {
  Grid g(1, 16, 2.0 * kPi);
  auto mode = sample_field(g, [](std::span<const double> x) { return std::exp(kI * x[0]); });
  CHECK(relative_l2(propagate_diag(mode, kPi / std::sqrt(3.0)), Complex(-1.0) * mode) < 1e-14);
  CHECK(max_abs_difference(propagate_diag(mode, 0.0), mode) == 0.0);

  Grid g2(2, 32, 17.0);
  auto v = smooth_complex_field(g2, 3, 3.0);
  for (double t : {0.1, 1.0, 7.3, 100.0}) {
    CHECK(l2_norm(propagate_diag(v, t)) == doctest::Approx(l2_norm(v)).epsilon(1e-12));
    CHECK(relative_l2(propagate_diag(propagate_diag(v, t), 1.7), propagate_diag(v, t + 1.7)) < 1e-12);
    CHECK(relative_l2(propagate_diag(propagate_diag(v, t), -t), v) < 1e-12);
  }
}

TEST_CASE("twisted flow: constants and reversibility") {
  Grid g(2, 16, 6.0);
  auto imag_const = to_frequency(sample_field(g, [](auto) { return Complex(0.0, 0.4); }));
  CHECK(max_abs_difference(propagate_u_linear(imag_const, 3.0), imag_const) < 1e-16);

  auto real_const = to_frequency(sample_field(g, [](auto) { return Complex(0.5, 0.0); }));
  auto moved = propagate_u_linear(real_const, 1.0);
  CHECK(std::abs(moved[0] - Complex(0.5, -1.0)) < 1e-15);

  auto u = smooth_complex_field(g, 9, 2.0);
  CHECK(relative_l2(propagate_u_linear(propagate_u_linear(u, 2.5), -2.5), u) < 1e-11);
}

TEST_CASE("twisted flow agrees with the per-mode integrator") {
  Grid g(2, 16, 8.0);
  auto u = with_mean(smooth_complex_field(g, 21, 2.0), {0.3, -0.2});
  auto exact = propagate_u_linear(u, 1.0);
  auto oracle = permode_oracle(u, 1.0, 10000);
  CHECK(max_abs_difference(exact, oracle) <= 1e-8);
  CHECK(l2_norm(permode_oracle(SpectralField::zeros(g), 1.0, 10)) == 0.0);
  CHECK_THROWS_AS(permode_oracle(u, 1.0, 0), InvalidArgument);
}

TEST_CASE("|V^{-1} u| per mode is conserved on a cosine") {
  Grid g(1, 16, 2.0 * kPi);
  auto c = sample_field(g, [](std::span<const double> x) { return Complex(std::cos(2.0 * x[0])); });
  const double before = l2_norm(apply_V(c, Direction::inverse));
  for (double t : {0.3, 1.0, 4.0}) {
    CHECK(l2_norm(apply_V(propagate_u_linear(c, t), Direction::inverse)) ==
          doctest::Approx(before).epsilon(1e-12));
    CHECK(l2_norm(apply_V(permode_oracle(c, t, 4000), Direction::inverse)) ==
          doctest::Approx(before).epsilon(1e-8));
  }
}

TEST_CASE("oracle at t = 0, x = 0 is the transform of the cutoff") {
  for (int d = 1; d <= 3; ++d) {
    const auto v = stationary_phase_oracle({d, 1.0, 0.0, 0.0});
    CHECK(v.converged);
    CHECK(v.value.real() == doctest::Approx(transform_at_origin(d, 1.0)).epsilon(1e-8));
    CHECK(std::abs(v.value.imag()) < 1e-10);
  }
}

TEST_CASE("ray suprema at t = 20 (frozen) and the envelope constant") {
  const double frozen[] = {0.1946211998, 0.02850783595, 0.004197001996};
  for (int d = 1; d <= 3; ++d) {
    const auto ray = stationary_phase_ray(d, 1.0, 20.0);
    CHECK(ray.sup == doctest::Approx(frozen[d - 1]).epsilon(1e-7));
    const double c = ray.sup / stationary_phase_envelope(d, 1.0, 20.0);
    CHECK(c <= 3.0);
    CHECK(c >= 1.0 / 3.0);
    // The sup sits near the stationary point t phi'(R).
    CHECK(ray.argmax == doctest::Approx(20.0 * dispersion_dphi(1.0)).epsilon(0.25));
  }
}

TEST_CASE("oracle decay exponents") {
  const auto one = decay_fit_oracle(1, 1.0, {10.0, 31.6, 100.0, 316.0, 1000.0});
  CHECK(one.predicted == -0.5);
  CHECK(std::abs(one.exponent + 0.5) <= 0.05);
  const auto three = decay_fit_oracle(3, 1.0, {10.0, 20.0, 40.0, 70.0, 100.0});
  CHECK(std::abs(three.exponent + 1.5) <= 0.1);
  CHECK(three.constant <= 3.0);
}

TEST_CASE("power law fit recovers an exact exponent") {
  std::vector<double> t{1, 2, 4, 8, 16}, v;
  for (double x : t) v.push_back(3.0 * std::pow(x, -0.75));
  const auto fit = fit_power_law(t, v);
  CHECK(fit.exponent == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.reliable());
}

TEST_CASE("grid decay path: L^2 conserved, wrap-around guarded") {
  Grid g(1, 256, 400.0);
  auto phi = smooth_complex_field(g, 4, 1.0, 2);
  const auto flat = decay_fit(phi, 2.0, {1.0, 2.0, 4.0, 8.0, 16.0});
  CHECK(flat.predicted == 0.0);
  CHECK(std::abs(flat.exponent) <= 0.02);
  CHECK_THROWS_AS(decay_fit(phi, kInfinity, {10.0, 1000.0}), GuardViolation);
  CHECK_THROWS_AS(decay_fit(phi, 2.0, {4.0, 1.0}), InvalidArgument);
}

TEST_CASE("Strichartz weights and admissibility") {
  CHECK(strichartz_weight(4, 4.0) == doctest::Approx(0.25));
  CHECK(strichartz_admissible(4, 2.0, 4.0));
  CHECK(strichartz_admissible(2, 4.0, 4.0));
  CHECK_FALSE(strichartz_admissible(2, 2.0, kInfinity));
  CHECK_FALSE(strichartz_admissible(3, 3.0, 3.0));
  Grid g(2, 16, 10.0);
  CHECK_THROWS_AS(strichartz_ratio(SpectralField::zeros(g), 4.0, 4.0, 8.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(strichartz_ratio(smooth_complex_field(g, 1, 2.0), 2.0, 4.0, 8.0, 0.5), InvalidArgument);
}

TEST_CASE("Strichartz ratio stays bounded as the horizon doubles") {
  Grid g(2, 32, 64.0);
  double max8 = 0.0, max16 = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto phi = smooth_complex_field(g, 300 + seed, 1.0);
    max8 = std::max(max8, strichartz_ratio(phi, 4.0, 4.0, 8.0, 0.5));
    max16 = std::max(max16, strichartz_ratio(phi, 4.0, 4.0, 16.0, 0.5));
  }
  CHECK(std::isfinite(max16));
  CHECK(max16 / max8 < 2.0);
}

}  // TEST_SUITE
