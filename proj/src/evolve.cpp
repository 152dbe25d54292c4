#include "gpscat/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"
#include "gpscat/linear.hpp"
#include "gpscat/normal_form.hpp"

namespace gpscat {

std::pair<double, double> SolveConfig::norm_exponents(int dim) const {
  return {sigma, s < 0.0 ? default_norm_exponents(dim).second : s};
}

void SolveConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("solve.dt must be positive");
  if (!(T >= 0.0)) throw InvalidArgument("solve.T must be non-negative");
  if (observe_every < 1) throw InvalidArgument("observer cadence must be >= 1");
  if (!(amplitude_guard > 0.0)) throw InvalidArgument("amplitude guard must be positive");
}

bool phase_resolution_warning(const Grid& grid, double dt) {
  return std::abs(dt) * dispersion_phi(grid.max_frequency()) >= 2.0 * std::numbers::pi;
}

namespace {

const Complex kMinusI(0.0, -1.0);

SpectralField nonlinear_rhs(const SpectralField& u) { return kMinusI * nonlinearity_F(u); }

/// Classical RK4 for u_t = -i F(u) over one step h.
SpectralField rk4_nonlinear(const SpectralField& u, double h) {
  const auto k1 = nonlinear_rhs(u);
  const auto k2 = nonlinear_rhs(u + Complex(0.5 * h) * k1);
  const auto k3 = nonlinear_rhs(u + Complex(0.5 * h) * k2);
  const auto k4 = nonlinear_rhs(u + Complex(h) * k3);
  return u + Complex(h / 6.0) * (k1 + Complex(2.0) * k2 + Complex(2.0) * k3 + k4);
}

double v_frame_norm(const SpectralField& u_mean_free, double sigma, double s) {
  return sobolev_weighted_norm(apply_V(without_mean(u_mean_free), Direction::inverse), sigma, s);
}

}  // namespace

std::pair<SpectralField, ZeroModeState> step_strang(const SpectralField& u, ZeroModeState mean,
                                                    double dt, double amplitude_guard) {
  const auto first = rk4_nonlinear(with_mean(u, mean), 0.5 * dt);
  auto [mean_free, m] = split_mean(first);
  auto [moved, moved_mean] = propagate_u_linear(mean_free, m, dt);
  const auto second = rk4_nonlinear(with_mean(moved, moved_mean), 0.5 * dt);
  const double sup = lq_norm(second, kInfinity);
  if (!(sup <= amplitude_guard))
    throw BlowupGuard("||u||_inf = " + std::to_string(sup) + " left the perturbative regime");
  auto [out, out_mean] = split_mean(second);
  return {out.with_frame(u.frame()), out_mean};
}

Trajectory evolve(const SpectralField& u0, const SolveConfig& cfg, const Observer& observer,
                  bool keep_states) {
  cfg.validate();
  const Grid& grid = u0.grid();
  const auto [sigma, s] = cfg.norm_exponents(grid.dim());
  auto [u, mean] = split_mean(to_frequency(u0));
  const double initial = v_frame_norm(u, sigma, s);
  if (initial > cfg.epsilon_max)
    throw SmallnessViolated("initial ||V^{-1}u0||_{H^{sigma,s}} = " + std::to_string(initial) +
                            " exceeds the smallness guard " + std::to_string(cfg.epsilon_max));

  Trajectory traj;
  if (phase_resolution_warning(grid, cfg.dt))
    traj.warnings.push_back("dt * max phi >= 2 pi: fastest phases are not resolved by the mesh");

  const long long steps = std::llround(cfg.T / cfg.dt);
  const double dt = steps > 0 ? cfg.T / static_cast<double>(steps) : cfg.dt;

  auto record = [&](double t) {
    ObserverRecord rec;
    rec.t = t;
    rec.sup_norm = lq_norm(with_mean(u, mean), kInfinity);
    rec.v_norm = v_frame_norm(u, sigma, s);
    if (cfg.observe_identity) rec.identity = w_identity_residual(u, mean);
    if (rec.v_norm > cfg.epsilon_max) traj.smallness_breached = true;
    traj.records.push_back(rec);
    traj.times.push_back(t);
    traj.means.push_back(mean);
    if (keep_states) traj.states.push_back(u);
  };

  record(0.0);
  if (observer) observer(0.0, u, mean);
  for (long long n = 1; n <= steps; ++n) {
    std::tie(u, mean) = step_strang(u, mean, dt, cfg.amplitude_guard);
    const double t = static_cast<double>(n) * dt;
    if (n % cfg.observe_every == 0 || n == steps) record(t);
    if (observer) observer(t, u, mean);
  }
  return traj;
}

void check_recurrence(const Grid& grid, double horizon, double margin) {
  const double limit = margin * grid.length() / (2.0 * std::numbers::sqrt2);
  if (horizon > limit)
    throw GuardViolation("horizon " + std::to_string(horizon) + " exceeds the recurrence limit " +
                         std::to_string(limit) + " = margin * L / (2 sqrt 2)");
}

ScatterDiagnostics scatter_forward(const SpectralField& u0, const SolveConfig& cfg, double T0) {
  cfg.validate();
  const Grid& grid = u0.grid();
  check_recurrence(grid, cfg.T, cfg.recurrence_margin);
  if (!(T0 > 0.0) || T0 > cfg.T) throw InvalidArgument("first scattering sample must lie in (0, T]");
  const double ratio = T0 / cfg.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw InvalidArgument("first scattering sample must be a multiple of dt");
  const auto [sigma, s] = cfg.norm_exponents(grid.dim());
  auto norm = [&](const SpectralField& f) { return sobolev_weighted_norm(f, sigma, s); };

  std::vector<double> samples;
  for (double t = T0; t <= cfg.T * (1.0 + 1e-12); t *= 2.0) samples.push_back(t);

  ScatterDiagnostics out{.times = {}, .v_states = {}, .z_states = {}, .v_cauchy = {},
                         .z_cauchy = {}, .correction = {}, .profile = {},
                         .v_plus = SpectralField::zeros(grid, Frame::v),
                         .z_plus = SpectralField::zeros(grid, Frame::z), .trajectory = {}};
  std::size_t next = 0;
  const double dt = cfg.T / static_cast<double>(std::max(1LL, std::llround(cfg.T / cfg.dt)));
  auto observer = [&](double t, const SpectralField& u, ZeroModeState) {
    if (next >= samples.size() || std::abs(t - samples[next]) > 0.25 * dt) return;
    const auto v = apply_V(without_mean(u), Direction::inverse);
    const auto z = apply_M(v);
    out.times.push_back(t);
    out.v_states.push_back(propagate_diag(v, -t));
    out.z_states.push_back(propagate_diag(z, -t));
    out.correction.push_back(norm(z - v));
    ++next;
  };
  out.trajectory = evolve(u0, cfg, observer, false);

  for (std::size_t k = 0; k + 1 < out.times.size(); ++k) {
    out.v_cauchy.push_back(norm(out.v_states[k + 1] - out.v_states[k]));
    out.z_cauchy.push_back(norm(out.z_states[k + 1] - out.z_states[k]));
    for (auto& rec : out.trajectory.records)
      if (std::abs(rec.t - out.times[k + 1]) <= 0.25 * dt) rec.cauchy = out.v_cauchy.back();
  }
  if (!out.times.empty()) {
    out.v_plus = out.v_states.back();
    out.z_plus = out.z_states.back();
    for (const auto& state : out.v_states) out.profile.push_back(norm(state - out.v_plus));
  }
  return out;
}

namespace {

/// Frequencies kept by the order-2 mask; the forcing never leaves them.
class PackedLayout {
 public:
  explicit PackedLayout(const Grid& grid) : grid_(grid) {
    for (std::size_t f = 0; f < grid.size(); ++f)
      if (dealias_keeps(grid, f, 2)) index_.push_back(f);
  }

  std::vector<Complex> pack(const SpectralField& field) const {
    const auto freq = to_frequency(field);
    std::vector<Complex> out(index_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) out[i] = freq[index_[i]];
    return out;
  }

  SpectralField unpack(const std::vector<Complex>& packed, Frame frame) const {
    std::vector<Complex> c(grid_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) c[index_[i]] = packed[i];
    return SpectralField(grid_, std::move(c), frame, Representation::frequency);
  }

  std::size_t size() const { return index_.size(); }

 private:
  Grid grid_;
  std::vector<std::size_t> index_;
};

struct FinalStateSolution {
  SpectralField u0;
  WaveOperatorReport report;
};

FinalStateSolution solve_final_state(const SpectralField& v_plus, double T, const SolveConfig& cfg,
                                     double tol, int max_iter) {
  const Grid& grid = v_plus.grid();
  const auto [sigma, s] = cfg.norm_exponents(grid.dim());
  auto norm = [&](const SpectralField& f) { return sobolev_weighted_norm(f, sigma, s); };
  FixedPointOptions fp;
  fp.tol = 1e-14;
  fp.sigma = sigma;
  fp.s = s;
  fp.delta = cfg.epsilon_max;

  const auto target = without_mean(v_plus).with_frame(Frame::z);
  FinalStateSolution out{SpectralField::zeros(grid, Frame::u), {}};
  if (l2_norm(target) == 0.0) return out;

  const long long steps = std::max(1LL, std::llround(T / cfg.dt));
  const double h = T / static_cast<double>(steps);
  const PackedLayout layout(grid);
  std::vector<std::vector<Complex>> integral(static_cast<std::size_t>(steps) + 1,
                                             std::vector<Complex>(layout.size()));

  auto z_at = [&](long long n) {
    const double t = static_cast<double>(n) * h;
    return propagate_diag(target - layout.unpack(integral[n], Frame::z), t).with_frame(Frame::z);
  };
  // e^{iHt} times the z forcing at u = V M^{-1} z(t_n).
  auto integrand = [&](long long n) {
    const double t = static_cast<double>(n) * h;
    const auto v = invert_M(z_at(n), fp).first;
    const auto u = apply_V(v, Direction::forward);
    return layout.pack(propagate_diag(z_forcing(u), -t));
  };

  double previous = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    double diff = 0.0;
    auto later = integrand(steps);
    for (long long n = steps - 1; n >= 0; --n) {
      auto current = integrand(n);
      std::vector<Complex> updated(layout.size());
      const auto& upper = integral[n + 1];
      for (std::size_t i = 0; i < updated.size(); ++i)
        updated[i] = upper[i] + 0.5 * h * (current[i] + later[i]);
      std::vector<Complex> delta(layout.size());
      for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = updated[i] - integral[n][i];
      diff = std::max(diff, norm(layout.unpack(delta, Frame::z)));
      integral[n] = std::move(updated);
      later = std::move(current);
    }
    out.report.iterations = iter;
    out.report.difference = diff;
    if (diff < tol) break;
    if (diff >= previous) {
      if (++stalled >= 3) throw SmallnessViolated("final-state iteration is not contracting");
    } else {
      stalled = 0;
    }
    previous = diff;
    if (iter == max_iter)
      throw SmallnessViolated("final-state iteration did not reach tolerance in " +
                              std::to_string(max_iter) + " sweeps");
  }
  const auto v0 = invert_M(z_at(0), fp).first;
  out.u0 = apply_V(v0, Direction::forward).with_frame(Frame::u);
  return out;
}

}  // namespace

std::pair<SpectralField, WaveOperatorReport> wave_operator_approx(const SpectralField& v_plus,
                                                                  double T, const SolveConfig& cfg,
                                                                  double tol, int max_iter,
                                                                  bool check_truncation) {
  cfg.validate();
  if (!(T > 0.0) || !(tol > 0.0)) throw InvalidArgument("wave operator needs T > 0 and tol > 0");
  check_recurrence(v_plus.grid(), T, cfg.recurrence_margin);
  auto result = solve_final_state(v_plus, T, cfg, tol, max_iter);
  if (check_truncation) {
    // Doubling T is a diagnostic only, so the recurrence guard is not applied to it.
    const auto longer = solve_final_state(v_plus, 2.0 * T, cfg, tol, max_iter);
    const auto [sigma, s] = cfg.norm_exponents(v_plus.grid().dim());
    const double change = sobolev_weighted_norm(
        apply_V(without_mean(longer.u0 - result.u0), Direction::inverse), sigma, s);
    result.report.truncation_change = change;
    result.report.truncation_dominant = change > tol;
  }
  return {result.u0, result.report};
}

BilipschitzStats bilipschitz_probe(const std::vector<std::pair<SpectralField, SpectralField>>& pairs,
                                   const SolveConfig& cfg, double T0) {
  BilipschitzStats stats;
  for (const auto& [a, b] : pairs) {
    const auto [sigma, s] = cfg.norm_exponents(a.grid().dim());
    const double denominator = sobolev_weighted_norm(
        apply_V(without_mean(a - b), Direction::inverse), sigma, s);
    if (denominator == 0.0) {
      ++stats.skipped;
      continue;
    }
    const auto va = scatter_forward(a, cfg, T0).v_plus;
    const auto vb = scatter_forward(b, cfg, T0).v_plus;
    stats.ratios.push_back(sobolev_weighted_norm(va - vb, sigma, s) / denominator);
  }
  if (!stats.ratios.empty()) {
    stats.min = *std::min_element(stats.ratios.begin(), stats.ratios.end());
    stats.max = *std::max_element(stats.ratios.begin(), stats.ratios.end());
  }
  return stats;
}

SpectralField make_initial_data(const Grid& grid, const DataSpec& spec) {
  if (spec.amplitude < 0.0) throw InvalidArgument("data.amplitude must be non-negative");
  if (!(spec.width > 0.0)) throw InvalidArgument("data width must be positive");
  if (spec.amplitude == 0.0) return SpectralField::zeros(grid);
  const double center = 0.5 * grid.length();
  auto window = [&](std::span<const double> x, double width) {
    double r2 = 0.0;
    for (double xi : x) r2 += (xi - center) * (xi - center);
    return std::exp(-r2 / (2.0 * width * width));
  };

  SpectralField raw = SpectralField::zeros(grid);
  if (spec.profile == "gaussian") {
    const Complex phase = Complex(1.0, 1.0) / std::numbers::sqrt2;
    raw = sample_field(grid, [&](std::span<const double> x) { return phase * window(x, spec.width); });
  } else if (spec.profile == "random-window") {
    const auto noise = to_physical(random_field(
        grid, [](const Wavevector& w) { return cutoff_chi(2.0 * w.abs); }, spec.seed));
    const auto windowed =
        sample_field(grid, [&](std::span<const double> x) { return Complex(window(x, 1.5 * spec.width)); });
    auto values = noise.copy_values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] *= windowed[i];
    raw = SpectralField(grid, std::move(values), Frame::u, Representation::physical);
  } else {
    throw InvalidArgument("unknown data.profile '" + spec.profile +
                          "' (expected gaussian or random-window)");
  }
  const auto shaped = without_mean(dealias(raw, 3));
  const double sigma = spec.sigma;
  const double s = spec.s < 0.0 ? default_norm_exponents(grid.dim()).second : spec.s;
  const double norm = sobolev_weighted_norm(apply_V(shaped, Direction::inverse), sigma, s);
  if (norm == 0.0) throw InvalidArgument("initial datum vanished after band-limiting");
  return Complex(spec.amplitude / norm) * shaped;
}

}  // namespace gpscat
