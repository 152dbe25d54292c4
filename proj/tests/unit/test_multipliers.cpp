#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpscat/errors.hpp"
#include "gpscat/multipliers.hpp"
#include "support.hpp"

using namespace gpscat;
using test::relative_l2;
using test::smooth_complex_field;
using test::smooth_real_field;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// Richardson-extrapolated central differences with steps h and h/10.
double richardson_first(double (*f)(double), double r, double h) {
  auto d = [&](double s) { return (f(r + s) - f(r - s)) / (2.0 * s); };
  const double coarse = d(h), fine = d(h / 10.0);
  return fine + (fine - coarse) / 99.0;
}

double richardson_second(double (*f)(double), double r, double h) {
  auto d = [&](double s) { return (f(r + s) - 2.0 * f(r) + f(r - s)) / (s * s); };
  const double coarse = d(h), fine = d(h / 10.0);
  return fine + (fine - coarse) / 99.0;
}

SpectralField cosine(const Grid& g, int k, Complex amp) {
  return sample_field(g, [&](std::span<const double> x) {
    return amp * std::cos(2.0 * kPi * k * x[0] / g.length());
  });
}

}  // namespace

TEST_SUITE("multipliers") {

TEST_CASE("cutoff plateau, support and transition") {
  CHECK(cutoff_chi(0.0) == 1.0);
  CHECK(cutoff_chi(0.5) == 1.0);
  CHECK(cutoff_chi(1.0) == 1.0);
  CHECK(cutoff_chi(2.0) == 0.0);
  CHECK(cutoff_chi(3.0) == 0.0);
  CHECK(cutoff_chi(1.5) == doctest::Approx(1.0 - chi_transition(0.5)).epsilon(1e-15));
  CHECK(cutoff_chi(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  // Independent evaluation of the bump-glue formula at an asymmetric point.
  const double x = 0.3;
  const double e0 = std::exp(-1.0 / x), e1 = std::exp(-1.0 / (1.0 - x));
  CHECK(cutoff_chi(1.3) == doctest::Approx(1.0 - e0 / (e0 + e1)).epsilon(1e-14));
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 1.0 / 64) {
    const double c = cutoff_chi(r);
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("dispersion relation and its derivatives") {
  CHECK(dispersion_phi(1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(dispersion_phi(0.0) == 0.0);
  const auto v = dispersion_values(1.0);
  CHECK(v.dphi == doctest::Approx(2.3094011).epsilon(1e-7));
  CHECK(v.d2phi == doctest::Approx(1.5396007).epsilon(1e-7));
  for (double r : {0.05, 0.3, 1.0, 2.5, 7.0}) {
    CHECK(dispersion_dphi(r) == doctest::Approx(richardson_first(dispersion_phi, r, 1e-3)).epsilon(1e-9));
    CHECK(dispersion_d2phi(r) == doctest::Approx(richardson_second(dispersion_phi, r, 1e-2)).epsilon(1e-6));
    CHECK(dispersion_dphi(r) > 0.0);
    CHECK(dispersion_d2phi(r) > 0.0);
  }
}

TEST_CASE("pointwise symbol identities") {
  for (double r : {1e-4, 0.1, 0.7, 1.0, 3.0, 20.0}) {
    CHECK(symbol_H(r) == doctest::Approx((2.0 + r * r) * symbol_U(r)).epsilon(1e-14));
    CHECK(symbol_H(r) == doctest::Approx(r * r / symbol_U(r)).epsilon(1e-14));
    CHECK(symbol_U(r) <= 1.0);
  }
  CHECK(symbol_U(1e-8) / 1e-8 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("multipliers on single modes") {
  Grid g(1, 16, 2.0 * kPi);
  auto m1 = cosine(g, 1, 1.0);
  CHECK(relative_l2(apply_multiplier(multiplier::H(), m1), Complex(std::sqrt(3.0)) * m1) < 1e-14);

  Grid half(1, 16, 4.0 * kPi);  // xi = k / 2
  auto m = cosine(half, 1, 1.0);
  CHECK(relative_l2(apply_multiplier(multiplier::P(), m), m) < 1e-15);
  CHECK(l2_norm(apply_multiplier(multiplier::Q(), m)) < 1e-15);
}

TEST_CASE("zero-mode policies") {
  Grid g(2, 8, 3.0);
  auto c = to_frequency(sample_field(g, [](auto) { return Complex(1.5, 0.0); }));
  CHECK(l2_norm(apply_multiplier(multiplier::U_inverse(), c)) == 0.0);
  CHECK_THROWS_AS(
      apply_multiplier(multiplier::U_inverse().with_policy(ZeroModePolicy::reject()), c),
      SingularZeroMode);
  auto fixed = apply_multiplier(multiplier::U_inverse().with_policy(ZeroModePolicy::fixed(2.0)), c);
  CHECK(std::abs(fixed[0] - Complex(3.0, 0.0)) < 1e-15);
  // A mean-free field passes the rejecting policy.
  auto f = smooth_real_field(g, 1, 2.0);
  CHECK_NOTHROW(apply_multiplier(multiplier::U_inverse().with_policy(ZeroModePolicy::reject()), f));
}

TEST_CASE("symbols are finite on every lattice point") {
  Grid g(3, 16, 64.0);
  for (const auto& spec : {multiplier::H(), multiplier::U_inverse(), multiplier::U_power(-2.5),
                           multiplier::grad_P(1), multiplier::P_laplacian()}) {
    auto table = symbol_table(spec, g);
    for (auto v : *table) CHECK(std::isfinite(std::abs(v)));
  }
}

TEST_CASE("H = (2 - Delta) U = -Delta U^{-1} on random mean-free fields") {
  for (int d = 1; d <= 3; ++d) {
    Grid g(d, d == 3 ? 16 : 64, 10.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto f = smooth_complex_field(g, seed, 3.0);
      auto Hf = apply_multiplier(multiplier::H(), f);
      auto Uf = apply_multiplier(multiplier::U(), f);
      auto a = Complex(2.0) * Uf - apply_multiplier(multiplier::laplacian(), Uf);
      auto b = Complex(-1.0) * apply_multiplier(multiplier::laplacian(),
                                                apply_multiplier(multiplier::U_inverse(), f));
      REQUIRE(relative_l2(a, Hf) <= 1e-12);
      REQUIRE(relative_l2(b, Hf) <= 1e-12);
    }
  }
}

TEST_CASE("U powers compose") {
  Grid g(2, 32, 12.0);
  auto f = smooth_complex_field(g, 5, 2.0);
  for (double s : {-1.0, -0.5, 0.5, 1.0})
    for (double t : {-1.0, -0.5, 0.5, 1.0}) {
      auto lhs = apply_multiplier(multiplier::U_power(s), apply_multiplier(multiplier::U_power(t), f));
      auto rhs = apply_multiplier(multiplier::U_power(s + t), f);
      CHECK(relative_l2(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("V examples and round trip") {
  Grid g(1, 16, 2.0 * kPi);
  auto imag = Complex(0.0, 1.0) * smooth_real_field(g, 2, 3.0);
  CHECK(max_abs_difference(apply_V(imag, Direction::forward), imag) < 1e-16);
  CHECK(max_abs_difference(apply_V(imag, Direction::inverse), imag) < 1e-16);

  auto c = cosine(g, 1, 1.0);
  CHECK(relative_l2(apply_V(c, Direction::inverse), Complex(std::sqrt(3.0)) * c) < 1e-14);

  Grid g2(2, 32, 20.0);
  auto f = smooth_complex_field(g2, 8, 2.0);
  CHECK(relative_l2(apply_V(apply_V(f, Direction::inverse), Direction::forward), f) < 1e-12);
  CHECK(relative_l2(apply_V(apply_V(f, Direction::forward), Direction::inverse), f) < 1e-12);

  // V acts separately on the real and imaginary parts, both kept real.
  auto r = smooth_real_field(g2, 3, 2.0);
  auto Vr = to_physical(apply_V(r, Direction::inverse));
  double imag_max = 0.0;
  for (auto v : Vr.values()) imag_max = std::max(imag_max, std::abs(v.imag()));
  CHECK(imag_max < 1e-14);
}

TEST_CASE("twist identity i u' + Delta u - 2 Re u = i V (V^{-1} u' + i H V^{-1} u)") {
  Grid g(2, 32, 15.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto u = smooth_complex_field(g, 100 + seed, 2.0);
    auto ut = smooth_complex_field(g, 200 + seed, 2.0);
    auto lhs = kI * ut + apply_multiplier(multiplier::laplacian(), u) - Complex(2.0) * real_part(u);
    auto vin = apply_V(u, Direction::inverse);
    auto inner = apply_V(ut, Direction::inverse) + kI * apply_multiplier(multiplier::H(), vin);
    auto rhs = kI * apply_V(inner, Direction::forward);
    REQUIRE(relative_l2(rhs, lhs) <= 1e-11);
  }
}

TEST_CASE("Jordan block of the zero mode") {
  CHECK(zero_mode_evolve({1.0, 0.0}, 1.0) == ZeroModeState{1.0, -2.0});
  CHECK(zero_mode_evolve({0.0, 0.7}, 13.0) == ZeroModeState{0.0, 0.7});
  CHECK(zero_mode_evolve(zero_mode_evolve({1.0, 0.0}, 2.5), -2.5) == ZeroModeState{1.0, 0.0});

  Grid g(1, 16, 5.0);
  auto f = smooth_complex_field(g, 1, 2.0);
  auto shifted = with_mean(f, {0.25, -0.5});
  auto [free, mean] = split_mean(shifted);
  CHECK(mean.m1 == doctest::Approx(0.25));
  CHECK(mean.m2 == doctest::Approx(-0.5));
  CHECK(max_abs_difference(free, f) < 1e-16);
}

TEST_CASE("low products stay in the plateau of P") {
  Grid g(2, 48, 24.0 * kPi);
  auto low = [&](std::uint64_t seed) {
    return apply_multiplier(multiplier::P_minus2(), smooth_real_field(g, seed, 1.0));
  };
  auto f = low(1), h = low(2);
  auto fp = to_physical(f), hp = to_physical(h);
  auto vals = fp.copy_values();
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= hp[i];
  auto product = dealias(SpectralField(g, std::move(vals), Frame::u, Representation::physical));
  // Exact up to the transform's roundoff, which Q sees at every mode.
  CHECK(l2_norm(product) > 0.0);
  CHECK(l2_norm(apply_multiplier(multiplier::Q(), product)) <= 1e-13 * l2_norm(product));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.abs_frequencies()[i] > 1.0) CHECK(std::abs(product[i]) <= 1e-15 * l2_norm(product));
}

}  // TEST_SUITE
