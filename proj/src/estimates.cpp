#include "gpscat/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"
#include "gpscat/linear.hpp"
#include "gpscat/multipliers.hpp"
#include "gpscat/normal_form.hpp"

namespace gpscat {

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

Rational to_rational(double x, long long max_den) {
  if (!std::isfinite(x)) throw InvalidArgument("cannot represent a non-finite value as a rational");
  if (max_den < 1) throw InvalidArgument("max_den must be positive");
  // Convergents h/k of the continued fraction of x.
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(rest);
    if (std::abs(a_real) > 1e15) break;
    const auto a = static_cast<long long>(a_real);
    const long long k2 = a * k1 + k0;
    if (k2 > max_den) break;
    const long long h2 = a * h1 + h0;
    h0 = h1; h1 = h2;
    k0 = k1; k1 = k2;
    const double frac = rest - a_real;
    if (frac < 1e-12) break;
    rest = 1.0 / frac;
  }
  return Rational(h1, k1);
}

TheoremParameters theorem_parameters(int d) {
  if (d < 4) throw InvalidArgument("the exponent set needs d >= 4 (got d = " + std::to_string(d) + ")");
  TheoremParameters p;
  p.d = d;
  p.s = Rational(d, 2) - 1;
  p.b = Rational(1, 2) - Rational(1, d);
  p.p = Rational(1) / p.b;
  p.p_dual = Rational(1) / (Rational(1) - p.b);
  p.q_inv = Rational(1, 2) - Rational(1, 2 * d);
  p.q = Rational(1) / p.q_inv;
  p.sigma_max = Rational(d - 3, 2) - Rational(1, d);
  return p;
}

double Slot::p() const { return b.numerator() == 0 ? kInfinity : 1.0 / to_double(b); }

ConditionReport check_conditions(const EstimateCase& c) {
  ConditionReport report;
  auto& out = report.inequalities;
  Rational sum_b, sum_s, sum_t;
  for (const auto& slot : c.slots) {
    sum_b += slot.b;
    sum_s += slot.s;
    sum_t += slot.t;
  }
  const Rational scale = Rational(c.d) * (sum_b - 1);
  out.push_back({"0 <= d(sum b - 1)", Rational(0), scale, false});
  out.push_back({"sum s <= d(sum b - 1)", sum_s, scale, false});
  out.push_back({"d(sum b - 1) <= sum t", scale, sum_t, false});
  for (std::size_t a = 0; a < c.slots.size(); ++a) {
    const auto& slot = c.slots[a];
    const std::string tag = "[" + std::to_string(a + 1) + "]";
    out.push_back({"0 <= b" + tag, Rational(0), slot.b, false});
    out.push_back({"b" + tag + " <= 1/2", slot.b, Rational(1, 2), false});
    out.push_back({"s" + tag + " <= d(sum b - 1)", slot.s, scale, false});
    out.push_back({"t" + tag + " <= sum t", slot.t, sum_t, false});
    out.push_back({"s" + tag + " < d b" + tag, slot.s, Rational(c.d) * slot.b, true});
  }
  report.valid = std::all_of(out.begin(), out.end(), [](const Inequality& i) { return i.holds(); });
  report.min_slack = out.front().slack();
  for (const auto& i : out) report.min_slack = std::min(report.min_slack, i.slack());
  return report;
}

EstimateCase embedding_case(int d, std::string label, const Slot& x, const Slot& y, const Slot& z) {
  return {d, std::move(label), {x, y, z.dual()}};
}

std::vector<EstimateCase> builtin_cases(int d, const Rational& sigma, int j, int k) {
  if (j < 0 || k < 0 || j + k > 1) throw InvalidArgument("case 1 needs j, k >= 0 and j + k <= 1");
  const auto th = theorem_parameters(d);
  const Rational half(1, 2);
  const Rational bp = Rational(1) - th.b;  // 1/p'
  const Rational s = th.s, b = th.b;
  std::vector<EstimateCase> cases;
  cases.push_back(embedding_case(d, "1", {half, sigma - b, s - j}, {b, sigma - b, s - k},
                                 {bp, sigma + b, s - j - k}));
  cases.push_back(embedding_case(d, "2", {half, sigma, s}, {b, sigma - b, s - 1},
                                 {half, sigma - b, s - 1}));
  cases.push_back(embedding_case(d, "3", {th.q_inv, sigma - b / 2, s}, {th.q_inv, sigma - b / 2, s},
                                 {half, sigma, s}));
  cases.push_back(embedding_case(d, "4", {half, sigma, s}, {half, sigma, s}, {bp, sigma, s}));
  cases.push_back(embedding_case(d, "5", {half, sigma, s}, {th.q_inv, sigma - b / 2, s},
                                 {half, sigma - 1, s - half}));
  return cases;
}

bool VerificationLine::holds() const {
  return std::all_of(inequalities.begin(), inequalities.end(),
                     [](const Inequality& i) { return i.holds(); });
}

std::vector<VerificationLine> verification_lines(int d, const Rational& sigma, int j, int k) {
  const auto th = theorem_parameters(d);
  const Rational s = th.s, b = th.b, half(1, 2);
  const Rational abs_sigma = sigma < 0 ? -sigma : sigma;
  const Rational D2 = Rational(d, 2);
  std::vector<VerificationLine> lines(5);
  for (int i = 0; i < 5; ++i) lines[i].index = i + 1;

  lines[0].inequalities = {
      {"max(sigma - 3b, |sigma| - b) <= d/2 - 2", std::max(sigma - 3 * b, abs_sigma - b), D2 - 2, false},
      {"d/2 - 2 <= s", D2 - 2, s, false},
      {"j + k - s <= s", Rational(j + k) - s, s, false},
      {"|sigma| - b < d/2 - 1", abs_sigma - b, D2 - 1, true},
  };
  lines[1].inequalities = {
      {"max(sigma, b - sigma) <= d/2 - 1", std::max(sigma, b - sigma), D2 - 1, false},
      {"d/2 - 1 <= s", D2 - 1, s, false},
      {"1 - s <= s", 1 - s, s, false},
      {"sigma < d/2", sigma, D2, true},
  };
  lines[2].inequalities = {
      {"max(sigma - b/2, -sigma) <= d/2 - 1", std::max(sigma - b / 2, -sigma), D2 - 1, false},
      {"d/2 - 1 <= s", D2 - 1, s, false},
      {"sigma - b/2 < d/2 - 1/2", sigma - b / 2, D2 - half, true},
  };
  lines[3].inequalities = {
      {"|sigma| <= d/2 - 1", abs_sigma, D2 - 1, false},
      {"d/2 - 1 <= s", D2 - 1, s, false},
  };
  lines[4].inequalities = {
      {"max(sigma - b/2 + 1, sigma, 1 - sigma) <= d/2 - 1/2",
       std::max({sigma - b / 2 + 1, sigma, 1 - sigma}), D2 - half, false},
      {"d/2 - 1/2 <= s + 1/2", D2 - half, s + half, false},
      {"1/2 - s <= s + 1/2", half - s, s + half, false},
  };
  return lines;
}

std::optional<Rational> first_invalid_sigma(int d, int index, const Rational& start,
                                            const Rational& step, const Rational& stop) {
  if (index < 1 || index > 5) throw InvalidArgument("case index must be in 1..5");
  if (step <= 0) throw InvalidArgument("sigma step must be positive");
  for (Rational sigma = start; sigma < stop; sigma += step) {
    const auto cases = builtin_cases(d, sigma);
    if (!check_conditions(cases[index - 1]).valid) return sigma;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

double slot_norm(const SpectralField& f, const Slot& slot) {
  return besov_norm(f, NormSpec::besov(to_double(slot.s), to_double(slot.t), slot.p()));
}

/// Sum of dyadic windows j in [top - spread + 1, top]: chi(r / 2^top) - chi(r 2^{spread - top}).
double spread_window(double r, int spread, int top) {
  return cutoff_chi(r / std::ldexp(1.0, top)) - cutoff_chi(r * std::ldexp(1.0, spread - top));
}

SpectralField spread_field(const Grid& grid, int spread, std::uint64_t seed, int order) {
  auto f = random_real_field(
      grid, [spread](const Wavevector& w) { return spread_window(w.abs, spread, -1); }, seed);
  return without_mean(dealias(f, order));
}

}  // namespace

double trilinear_ratio(const SpectralField& f, const SpectralField& g, const SpectralField& h,
                       const EstimateCase& c) {
  const Grid& grid = f.grid();
  const auto pf = to_physical(f).copy_values();
  const auto pg = to_physical(g).copy_values();
  const auto ph = to_physical(h).copy_values();
  Complex sum{};
  for (std::size_t i = 0; i < pf.size(); ++i) sum += pf[i] * pg[i] * ph[i];
  const double integral = std::abs(sum) * grid.cell_volume();
  const double denom = slot_norm(f, c.slots[0]) * slot_norm(g, c.slots[1]) * slot_norm(h, c.slots[2]);
  return denom > 0.0 ? integral / denom : 0.0;
}

TrilinearSuiteResult trilinear_suite(const TrilinearSuiteOptions& options) {
  if (options.trials < 1) throw InvalidArgument("trilinear suite needs at least one trial");
  const double length = options.length > 0.0 ? options.length : 32.0 * std::numbers::pi;
  const Grid grid(options.d, options.points, length);
  const auto cases = builtin_cases(options.d, options.sigma);
  TrilinearSuiteResult result;
  for (const auto& c : cases) result.labels.push_back(c.label);
  result.max_narrow.assign(cases.size(), 0.0);
  result.max_wide.assign(cases.size(), 0.0);

  for (int spread : {2, 4}) {
    auto& best = spread == 2 ? result.max_narrow : result.max_wide;
    for (int trial = 0; trial < options.trials; ++trial) {
      const std::uint64_t base = options.seed + 3ULL * static_cast<std::uint64_t>(trial);
      // Order-2 masks keep |k1 + k2 + k3| < N, so the lattice sum is exact.
      const auto f = spread_field(grid, spread, base, 2);
      const auto g = spread_field(grid, spread, base + 1, 2);
      const auto h = spread_field(grid, spread, base + 2, 2);
      for (std::size_t i = 0; i < cases.size(); ++i)
        best[i] = std::max(best[i], trilinear_ratio(f, g, h, cases[i]));
    }
  }
  for (std::size_t i = 0; i < cases.size(); ++i)
    result.growth.push_back(result.max_narrow[i] > 0.0 ? result.max_wide[i] / result.max_narrow[i] : 0.0);
  return result;
}

std::vector<double> quadratic_cubic_ratios(const SpectralField& phi, double sigma, double T,
                                           double dt) {
  const Grid& grid = phi.grid();
  const auto th = theorem_parameters(grid.dim());
  if (!(dt > 0.0) || !(T >= dt)) throw InvalidArgument("ratio suite needs 0 < dt <= T");
  const double s = to_double(th.s), b = to_double(th.b);
  const double p = to_double(th.p), p_dual = to_double(th.p_dual);
  const NormSpec quad_out = NormSpec::besov(sigma + b, s, p_dual);
  const NormSpec cubic_out = NormSpec::besov(sigma, s, p_dual);
  const NormSpec strichartz = NormSpec::besov(sigma - b, s, p);
  const NormSpec energy = NormSpec::sobolev(sigma, s);
  const NormSpec energy_low = NormSpec::sobolev(sigma - b, s);
  const auto P = multiplier::P();

  const int steps = static_cast<int>(std::lround(T / dt));
  std::vector<double> n_quad, n_grad, n_cubic, n_str, n_energy, n_u1;
  for (int n = 0; n <= steps; ++n) {
    const auto u = propagate_diag(phi, n * dt).with_frame(Frame::u);
    const auto u1 = real_part(u);
    n_quad.push_back(besov_norm(dealiased_product(u1, u, 2), quad_out));
    double grad_sq = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const auto du = apply_multiplier(multiplier::derivative(axis), u);
      const double c = besov_norm(apply_multiplier(P, dealiased_product(u, du, 2)), quad_out);
      grad_sq += c * c;
    }
    n_grad.push_back(std::sqrt(grad_sq));
    n_cubic.push_back(besov_norm(dealiased_product(dealiased_product(u, u, 3), u, 3), cubic_out));
    n_str.push_back(besov_norm(u, strichartz));
    n_energy.push_back(besov_norm(u, energy));
    n_u1.push_back(besov_norm(u1, energy_low));
  }
  const double str = spacetime_norm(n_str, dt, 2.0);
  const double x0 = spacetime_norm(n_energy, dt, kInfinity) + str;
  const double u1_inf = spacetime_norm(n_u1, dt, kInfinity);
  return {
      u1_inf * str > 0.0 ? spacetime_norm(n_quad, dt, 2.0) / (u1_inf * str) : 0.0,
      x0 > 0.0 ? spacetime_norm(n_grad, dt, 2.0) / (x0 * x0) : 0.0,
      x0 > 0.0 ? spacetime_norm(n_cubic, dt, 2.0) / (x0 * x0 * x0) : 0.0,
  };
}

std::vector<RatioTrend> quadratic_cubic_ratio_suite(int d, double sigma, int trials, std::uint64_t seed,
                                                    const RatioSuiteOptions& options) {
  if (trials < 10) throw InvalidArgument("the ratio suite needs at least 10 trials");
  if (options.spread < 1) throw InvalidArgument("profile spread must be at least one scale");
  const double length = options.length > 0.0 ? options.length : 32.0 * std::numbers::pi;
  const Grid grid(d, options.points, length);
  std::vector<RatioTrend> out = {{"u1 u", 0, 0}, {"P(u grad u)", 0, 0}, {"u^3", 0, 0}};
  for (int trial = 0; trial < trials; ++trial) {
    // Order-3 masks: the cubic product stays exact.
    const auto phi = spread_field(grid, options.spread, seed + static_cast<std::uint64_t>(trial), 3);
    const auto short_run = quadratic_cubic_ratios(phi, sigma, options.T, options.dt);
    const auto long_run = quadratic_cubic_ratios(phi, sigma, 2.0 * options.T, options.dt);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].max_short = std::max(out[i].max_short, short_run[i]);
      out[i].max_long = std::max(out[i].max_long, long_run[i]);
    }
  }
  return out;
}

}  // namespace gpscat
