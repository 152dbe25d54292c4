#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"
#include "gpscat/evolve.hpp"
#include "gpscat/linear.hpp"
#include "support.hpp"

using namespace gpscat;

namespace {

const Grid kGrid(2, 32, 40.0);

SpectralField datum(double amplitude, std::uint64_t seed = 1, const char* profile = "gaussian") {
  DataSpec spec;
  spec.profile = profile;
  spec.amplitude = amplitude;
  spec.seed = seed;
  spec.width = 3.0;
  return make_initial_data(kGrid, spec);
}

SolveConfig config(double dt, double T) {
  SolveConfig cfg;
  cfg.dt = dt;
  cfg.T = T;
  return cfg;
}

SpectralField run(const SpectralField& u0, double dt, double T) {
  auto cfg = config(dt, T);
  cfg.epsilon_max = 1.0;
  auto traj = evolve(u0, cfg);
  return with_mean(traj.states.back(), traj.means.back());
}

double v_norm(const SpectralField& u) {
  return sobolev_weighted_norm(apply_V(without_mean(u), Direction::inverse), 0.0, 0.0);
}

}  // namespace

TEST_SUITE("evolve") {

TEST_CASE("initial data are scaled, mean-free and band-limited") {
  auto u0 = datum(0.05);
  CHECK(v_norm(u0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(!has_nonzero_mean(u0));
  for (std::size_t f = 0; f < kGrid.size(); ++f)
    if (!dealias_keeps(kGrid, f, 3)) CHECK(u0[f] == Complex{});
  CHECK(l2_norm(datum(0.0)) == 0.0);
  CHECK(max_abs_difference(datum(0.02, 4, "random-window"), datum(0.02, 4, "random-window")) == 0.0);
  CHECK_THROWS_AS(datum(0.02, 1, "square"), InvalidArgument);
}

TEST_CASE("zero stays zero") {
  auto [u, m] = step_strang(SpectralField::zeros(kGrid), {}, 0.1);
  CHECK(l2_norm(u) == 0.0);
  CHECK(m == ZeroModeState{});
  auto traj = evolve(SpectralField::zeros(kGrid), config(0.5, 4.0));
  CHECK(traj.states.size() == 9);
  for (const auto& s : traj.states) CHECK(l2_norm(s) == 0.0);
}

TEST_CASE("linear regime: a step is the linear flow") {
  auto u0 = datum(1e-8);
  auto [u, m] = step_strang(u0, {}, 0.2);
  CHECK(max_abs_difference(u, propagate_u_linear(u0, 0.2)) <= 1e-18);
  auto far = run(u0, 0.25, 8.0);
  // amplitude^2 per step, over 32 steps
  CHECK(max_abs_difference(far, propagate_u_linear(u0, 8.0)) <= 32 * 1e-16);
}

TEST_CASE("Strang splitting is second order") {
  auto u0 = datum(0.2);
  const double T = 2.0;
  auto ref = run(u0, 0.025, T);
  const double e1 = test::relative_l2(run(u0, 0.2, T), ref);
  const double e2 = test::relative_l2(run(u0, 0.1, T), ref);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.7);
  CHECK(order <= 2.2);
}

TEST_CASE("time reversal returns to the datum") {
  auto u0 = datum(0.2);
  auto back_error = [&](double dt) {
    auto there = run(u0, dt, 2.0);
    // Reverse by stepping with -dt directly.
    auto [u, m] = split_mean(there);
    for (long n = 0; n < std::lround(2.0 / dt); ++n) std::tie(u, m) = step_strang(u, m, -dt);
    return test::relative_l2(with_mean(u, m), u0);
  };
  // The splitting is symmetric and RK4 is reversible to O(h^5 |u|^2) per
  // substep, so both runs land far below the dt^2 T allowance.
  for (double dt : {0.2, 0.1}) CHECK(back_error(dt) <= 1e-12);
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(evolve(datum(0.5), config(0.1, 1.0)), SmallnessViolated);
  CHECK_THROWS_AS(config(0.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(check_recurrence(kGrid, 20.0, 1.25), GuardViolation);
  CHECK_NOTHROW(check_recurrence(kGrid, 16.0, 1.25));
  auto cfg = config(0.1, 0.5);
  cfg.amplitude_guard = 1e-6;
  CHECK_THROWS_AS(evolve(datum(0.05), cfg), BlowupGuard);
  CHECK(phase_resolution_warning(kGrid, 10.0));
  CHECK_FALSE(phase_resolution_warning(kGrid, 0.01));
}

TEST_CASE("smallness persists over the horizon") {
  auto u0 = datum(0.05);
  auto cfg = config(0.25, 16.0);
  cfg.observe_every = 4;
  auto traj = evolve(u0, cfg, {}, false);
  double worst = 0.0;
  for (const auto& rec : traj.records) worst = std::max(worst, rec.v_norm);
  CHECK(worst <= 2.0 * traj.records.front().v_norm);
  CHECK_FALSE(traj.smallness_breached);
  CHECK(traj.records.back().t == doctest::Approx(16.0));
}

TEST_CASE("scatter diagnostics in the linear regime and for zero data") {
  auto cfg = config(0.25, 16.0);
  auto lin = scatter_forward(datum(1e-8), cfg);
  CHECK(lin.times == std::vector<double>{1, 2, 4, 8, 16});
  for (double c : lin.v_cauchy) CHECK(c <= 1e-14);
  for (double c : lin.z_cauchy) CHECK(c <= 1e-14);

  auto zero = scatter_forward(SpectralField::zeros(kGrid), cfg);
  for (double c : zero.v_cauchy) CHECK(c == 0.0);
  CHECK(l2_norm(zero.v_plus) == 0.0);
  CHECK_THROWS_AS(scatter_forward(datum(0.01), config(0.25, 40.0)), GuardViolation);
}

TEST_CASE("z-frame and v-frame Cauchy sequences are consistent") {
  auto diag = scatter_forward(datum(0.05), config(0.25, 16.0));
  REQUIRE(diag.v_cauchy.size() == 4);
  for (std::size_t k = 0; k < diag.z_cauchy.size(); ++k) {
    // e^{iHt} preserves the radial-weight norm, so z - v differs by the corrections only.
    const double bound = diag.v_cauchy[k] + diag.correction[k] + diag.correction[k + 1];
    CHECK(diag.z_cauchy[k] <= bound * (1.0 + 1e-12));
  }
  CHECK(diag.profile.back() == 0.0);
}

TEST_CASE("wave operator: zero, linear limit, quadratic defect") {
  auto cfg = config(0.5, 8.0);
  auto [zero, rep0] = wave_operator_approx(SpectralField::zeros(kGrid, Frame::z), 8.0, cfg, 1e-10);
  CHECK(l2_norm(zero) == 0.0);

  auto shape = apply_V(datum(1.0e-3), Direction::inverse).with_frame(Frame::z);
  auto at = [&](double eps) {
    return wave_operator_approx(Complex(eps / 1.0e-3) * shape, 8.0, cfg, 1e-12).first;
  };
  auto u1 = at(0.005), u2 = at(0.01);
  const double defect = l2_norm(u2 - Complex(2.0) * u1);
  auto u4 = at(0.02);
  const double defect2 = l2_norm(u4 - Complex(2.0) * u2);
  CHECK(defect > 0.0);
  CHECK(defect2 / defect == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("bi-Lipschitz probe: identical pairs skipped, linear pairs isometric") {
  auto cfg = config(0.5, 8.0);
  auto a = datum(1e-8, 1, "random-window"), b = datum(1e-8, 2, "random-window");
  auto stats = bilipschitz_probe({{a, a}, {a, b}, {b, datum(1e-8)}}, cfg);
  CHECK(stats.skipped == 1);
  REQUIRE(stats.ratios.size() == 2);
  CHECK(std::abs(stats.min - 1.0) <= 1e-6);
  CHECK(std::abs(stats.max - 1.0) <= 1e-6);
}

}  // TEST_SUITE

TEST_SUITE("evolve_long") {

TEST_CASE("smallness persists in d = 3 up to t = 50") {
  const Grid g(3, 64, 16.0 * std::numbers::pi);
  DataSpec spec;
  spec.amplitude = 0.01;
  spec.width = 3.0;
  auto u0 = make_initial_data(g, spec);
  SolveConfig cfg;
  cfg.dt = 0.25;
  cfg.T = 50.0;
  cfg.observe_every = 8;
  auto traj = evolve(u0, cfg, {}, false);
  double worst = 0.0;
  for (const auto& rec : traj.records) worst = std::max(worst, rec.v_norm);
  MESSAGE("sup_t ||V^{-1}u||_{H^{0,1/2}} / initial = " << worst / traj.records.front().v_norm);
  CHECK(worst <= 2.0 * traj.records.front().v_norm);
}

}  // TEST_SUITE
