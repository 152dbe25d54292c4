#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <span>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"
#include "gpscat/estimates.hpp"
#include "gpscat/evolve.hpp"
#include "gpscat/linear.hpp"
#include "gpscat/multipliers.hpp"
#include "gpscat/normal_form.hpp"

namespace gpscat::cli {

using nlohmann::json;

namespace {

const Complex kI(0.0, 1.0);

// ---------------------------------------------------------------------------
// Output plumbing. Every number goes through one formatter so identical runs
// produce identical bytes.

std::string fmt(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& command, const std::string& table,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    out_ << "# gpscat-csv v1 " << command << " " << table << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
    width_ = columns.size();
  }

  /// Cells are pre-formatted strings; use fmt() for numbers.
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw InvalidArgument("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  std::size_t width_ = 0;
};

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

std::string optional_cell(const std::optional<double>& x) { return x ? fmt(*x) : ""; }

// ---------------------------------------------------------------------------
// Config readers.

Grid grid_of(const ExperimentConfig& c) {
  return Grid(c.integer("grid.d"), c.integer("grid.N"), c.number("grid.L"));
}

SolveConfig solve_of(const ExperimentConfig& c) {
  SolveConfig s;
  s.dt = c.number("solve.dt");
  s.T = c.number("solve.T");
  s.observe_every = c.integer("solve.observe_every");
  s.sigma = c.number("solve.sigma");
  s.s = c.number("solve.s");
  s.epsilon_max = c.number("solve.epsilon_max");
  s.validate();
  return s;
}

DataSpec data_of(const ExperimentConfig& c) {
  DataSpec d;
  d.profile = c.text("data.profile");
  d.amplitude = c.number("data.amplitude");
  if (c.integer("data.seed") < 0) throw InvalidArgument("data.seed must be non-negative");
  d.seed = static_cast<std::uint64_t>(c.integer("data.seed"));
  d.width = c.number("data.width");
  d.sigma = c.number("solve.sigma");
  d.s = c.number("solve.s");
  return d;
}

double tolerance(const ExperimentConfig& c, const std::string& key) {
  const double scale = c.number("tol.scale");
  if (!(scale > 0.0)) throw InvalidArgument("tol.scale must be positive");
  return c.number(key) * scale;
}

std::vector<double> log_times(const ExperimentConfig& c) {
  const double t0 = c.number("linear.t_min"), t1 = c.number("linear.t_max");
  const int n = c.integer("linear.samples");
  if (!(t0 > 0.0) || !(t1 > t0) || n < 2)
    throw InvalidArgument("linear sampling needs 0 < t_min < t_max and samples >= 2");
  std::vector<double> times;
  for (int i = 0; i < n; ++i) times.push_back(t0 * std::pow(t1 / t0, static_cast<double>(i) / (n - 1)));
  return times;
}

std::uint64_t seed_of(const ExperimentConfig& c) { return data_of(c).seed; }

// ---------------------------------------------------------------------------
// verify-identities

double relative_l2(const SpectralField& a, const SpectralField& b) {
  const double ref = l2_norm(b);
  return ref == 0.0 ? l2_norm(a) : l2_norm(to_frequency(a) - to_frequency(b)) / ref;
}

Profile flat_profile() {
  return [](const Wavevector& w) { return w.abs == 0.0 ? 0.0 : 1.0; };
}

/// |k_a| < N / 12: every product in the w identity stays inside the mask.
Profile band_profile(const Grid& g) {
  const double limit = (g.points() / 12) * g.frequency_step();
  return [limit, d = g.dim()](const Wavevector& w) {
    if (w.abs == 0.0) return 0.0;
    for (int a = 0; a < d; ++a)
      if (std::abs(w.xi[a]) >= limit) return 0.0;
    return 1.0;
  };
}

struct IdentityCheck {
  std::string name;
  std::string tolerance_key;
  int trials;  ///< capped per identity by cost
  std::function<double(const Grid&, std::uint64_t)> residual;
};

std::vector<IdentityCheck> identity_checks(int trials) {
  const int oracle_trials = std::min(trials, 3);
  return {
      {"H = (2 - Delta) U", "tol.identity", trials,
       [](const Grid& g, std::uint64_t seed) {
         const auto f = random_field(g, flat_profile(), seed);
         const auto Uf = apply_multiplier(multiplier::U(), f);
         return relative_l2(Complex(2.0) * Uf - apply_multiplier(multiplier::laplacian(), Uf),
                            apply_multiplier(multiplier::H(), f));
       }},
      {"H = -Delta U^{-1}", "tol.identity", trials,
       [](const Grid& g, std::uint64_t seed) {
         const auto f = random_field(g, flat_profile(), seed);
         const auto a = Complex(-1.0) * apply_multiplier(multiplier::laplacian(),
                                                         apply_multiplier(multiplier::U_inverse(), f));
         return relative_l2(a, apply_multiplier(multiplier::H(), f));
       }},
      {"twist", "tol.identity", trials,
       [](const Grid& g, std::uint64_t seed) {
         const auto u = random_field(g, flat_profile(), seed);
         const auto ut = random_field(g, flat_profile(), seed + 7919);
         const auto lhs =
             kI * ut + apply_multiplier(multiplier::laplacian(), u) - Complex(2.0) * real_part(u);
         const auto vin = apply_V(u, Direction::inverse);
         const auto inner =
             apply_V(ut, Direction::inverse) + kI * apply_multiplier(multiplier::H(), vin);
         return relative_l2(kI * apply_V(inner, Direction::forward), lhs);
       }},
      {"w equation", "tol.identity", trials,
       [](const Grid& g, std::uint64_t seed) {
         auto u = random_field(g, band_profile(g), seed);
         const double sup = lq_norm(u, kInfinity);
         if (sup == 0.0) throw InvalidArgument("grid.N >= 24 is needed for the w identity band");
         u = Complex(0.1 / sup) * u;
         const ZeroModeState mean{0.01 * std::cos(double(seed)), 0.01 * std::sin(double(seed))};
         return w_identity_residual(u, mean);
       }},
      {"Q u2^2 split", "tol.identity", trials,
       [](const Grid& g, std::uint64_t seed) {
         const auto u2 = without_mean(dealias(random_real_field(g, flat_profile(), seed), 2));
         const auto [a, b] = q_split(u2);
         return relative_l2(a + b, apply_multiplier(multiplier::Q(), dealiased_product(u2, u2)));
       }},
      {"M^{-1} M", "tol.identity", trials,
       [](const Grid& g, std::uint64_t seed) {
         const auto [sigma, s] = default_norm_exponents(g.dim());
         auto v = without_mean(random_field(g, band_profile(g), seed, Frame::v));
         const double n = sobolev_weighted_norm(v, sigma, s);
         if (n == 0.0) throw InvalidArgument("grid.N >= 24 is needed for the normal-form band");
         v = Complex(0.05 / n) * v;
         FixedPointOptions opt;
         opt.tol = 1e-13;
         const auto back = invert_M(apply_M(v), opt).first;
         return sobolev_weighted_norm(without_mean(back - v), sigma, s) / 0.05;
       }},
      {"propagator vs per-mode oracle", "tol.oracle", oracle_trials,
       [](const Grid& g, std::uint64_t seed) {
         Profile p = [](const Wavevector& w) { return std::exp(-0.1 * w.abs * w.abs); };
         const auto u = with_mean(without_mean(random_field(g, p, seed)), {0.3, -0.2});
         return max_abs_difference(propagate_u_linear(u, 1.0), permode_oracle(u, 1.0, 10000));
       }},
  };
}

int cmd_verify_identities(RunContext& ctx) {
  const auto& c = ctx.config;
  const Grid g = grid_of(c);
  const int trials = c.integer("identities.trials");
  if (trials < 1) throw InvalidArgument("identities.trials must be >= 1");
  const std::uint64_t seed = seed_of(c);

  json rows = json::array();
  bool pass = true;
  for (const auto& check : identity_checks(trials)) {
    double worst = 0.0;
    for (int i = 0; i < check.trials; ++i)
      worst = std::max(worst, check.residual(g, 1000003 * seed + static_cast<std::uint64_t>(i)));
    const double tol = tolerance(c, check.tolerance_key);
    const bool ok = worst <= tol;
    pass = pass && ok;
    rows.push_back({{"identity", check.name},
                    {"residual", worst},
                    {"tolerance", tol},
                    {"trials", check.trials},
                    {"pass", ok}});
    *ctx.log << (ok ? "ok     " : "BREACH ") << check.name << ": " << fmt(worst) << " (tol "
             << fmt(tol) << ")\n";
  }
  write_json(ctx.out_dir / "identities.json",
             {{"command", "verify-identities"}, {"identities", rows}, {"pass", pass}});
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// linear-decay, stationary-phase, strichartz

int cmd_linear_decay(RunContext& ctx) {
  const auto& c = ctx.config;
  const auto times = log_times(c);
  const std::string path = c.text("linear.path");
  DecayFitResult fit;
  if (path == "oracle") {
    fit = decay_fit_oracle(c.integer("grid.d"), c.number("linear.R"), times);
  } else if (path == "grid") {
    const auto phi0 = apply_V(make_initial_data(grid_of(c), data_of(c)), Direction::inverse);
    fit = decay_fit(phi0, c.number("linear.q"), times);
  } else {
    throw InvalidArgument("linear.path must be 'oracle' or 'grid', got '" + path + "'");
  }
  CsvWriter csv(ctx.out_dir / "decay.csv", "linear-decay", "decay", {"t", "norm", "envelope"});
  for (std::size_t i = 0; i < fit.times.size(); ++i)
    csv.row({fmt(fit.times[i]), fmt(fit.norms[i]),
             i < fit.envelope.size() ? fmt(fit.envelope[i]) : ""});
  const double tol = tolerance(c, "tol.exponent");
  const bool pass = std::abs(fit.exponent - fit.predicted) <= tol;
  write_json(ctx.out_dir / "fit.json", {{"command", "linear-decay"},
                                        {"path", path},
                                        {"exponent", fit.exponent},
                                        {"predicted", fit.predicted},
                                        {"residual", fit.residual},
                                        {"reliable", fit.reliable()},
                                        {"window", {fit.t0, fit.t1}},
                                        {"constant", fit.constant},
                                        {"tolerance", tol},
                                        {"pass", pass}});
  *ctx.log << "exponent " << fmt(fit.exponent) << " (predicted " << fmt(fit.predicted) << ", tol "
           << fmt(tol) << ")\n";
  return pass ? 0 : 1;
}

int cmd_stationary_phase(RunContext& ctx) {
  const auto& c = ctx.config;
  const int d = c.integer("grid.d");
  const double R = c.number("linear.R");
  const double start = decay_window_start(R);
  const double band = tolerance(c, "tol.envelope");
  CsvWriter csv(ctx.out_dir / "ray.csv", "stationary-phase", "ray",
                {"t", "sup", "argmax", "envelope", "ratio", "resolved"});
  double lo = kInfinity, hi = 0.0;
  for (double t : log_times(c)) {
    const auto ray = stationary_phase_ray(d, R, t);
    const double env = stationary_phase_envelope(d, R, t);
    const double ratio = ray.sup / env;
    const bool resolved = t >= start;
    if (resolved) {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    csv.row({fmt(t), fmt(ray.sup), fmt(ray.argmax), fmt(env), fmt(ratio), resolved ? "1" : "0"});
  }
  const bool any = hi > 0.0;
  const bool pass = any && lo >= 1.0 / band && hi <= band;
  json report{{"command", "stationary-phase"}, {"d", d},    {"R", R},       {"window_start", start},
              {"band", band},                  {"pass", pass}};
  report["ratio_min"] = any ? json(lo) : json(nullptr);
  report["ratio_max"] = any ? json(hi) : json(nullptr);
  write_json(ctx.out_dir / "envelope.json", report);
  *ctx.log << "sup / envelope in [" << fmt(lo) << ", " << fmt(hi) << "] for t >= " << fmt(start) << "\n";
  return pass ? 0 : 1;
}

int cmd_strichartz(RunContext& ctx) {
  const auto& c = ctx.config;
  const Grid g = grid_of(c);
  const int d = g.dim();
  const double q = c.number("strichartz.q");
  const double inv_p = 0.25 * d - 0.5 * d / q;
  if (!(inv_p > 0.0)) throw InvalidArgument("strichartz.q gives no admissible p in this dimension");
  const double p = 1.0 / inv_p;
  const auto phi = apply_V(make_initial_data(g, data_of(c)), Direction::inverse);
  const auto solve = solve_of(c);
  CsvWriter csv(ctx.out_dir / "strichartz.csv", "strichartz", "ratio", {"T", "ratio"});
  const double r1 = strichartz_ratio(phi, p, q, solve.T, solve.dt);
  const double r2 = strichartz_ratio(phi, p, q, 2.0 * solve.T, solve.dt);
  csv.row({fmt(solve.T), fmt(r1)});
  csv.row({fmt(2.0 * solve.T), fmt(r2)});
  const double bound = tolerance(c, "tol.growth");
  const bool pass = r2 / r1 < bound;
  json report{{"command", "strichartz"},  {"p", p},   {"ratio_T", r1}, {"ratio_2T", r2},
              {"growth", r2 / r1},        {"bound", bound}, {"weight", strichartz_weight(d, q)},
              {"pass", pass}};
  report["q"] = std::isinf(q) ? json("inf") : json(q);
  write_json(ctx.out_dir / "strichartz.json", report);
  *ctx.log << "ratio " << fmt(r1) << " -> " << fmt(r2) << " (p = " << fmt(p) << ")\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// evolve, scatter, wave-operator, bilipschitz

void write_records(const std::filesystem::path& path, const std::string& command,
                   const std::vector<ObserverRecord>& records) {
  CsvWriter csv(path, command, "trajectory", {"t", "sup_norm", "v_norm", "w_identity", "cauchy"});
  for (const auto& r : records)
    csv.row({fmt(r.t), fmt(r.sup_norm), fmt(r.v_norm), optional_cell(r.identity), optional_cell(r.cauchy)});
}

void snapshot(const RunContext& ctx, const std::string& name, const SpectralField& f) {
  if (ctx.snapshots) write_snapshot_file((ctx.out_dir / (name + ".gpsf")).string(), f);
}

int cmd_evolve(RunContext& ctx) {
  const auto& c = ctx.config;
  const auto u0 = make_initial_data(grid_of(c), data_of(c));
  auto solve = solve_of(c);
  solve.observe_identity = true;
  const auto traj = evolve(u0, solve, {}, ctx.snapshots);
  write_records(ctx.out_dir / "trajectory.csv", "evolve", traj.records);
  if (ctx.snapshots && !traj.states.empty())
    snapshot(ctx, "final", with_mean(traj.states.back(), traj.means.back()));
  double identity = 0.0;
  for (const auto& r : traj.records) identity = std::max(identity, r.identity.value_or(0.0));
  const bool pass = !traj.smallness_breached;
  write_json(ctx.out_dir / "evolve.json", {{"command", "evolve"},
                                           {"records", traj.records.size()},
                                           {"final_time", traj.records.empty() ? 0.0 : traj.records.back().t},
                                           {"max_w_identity", identity},
                                           {"smallness_breached", traj.smallness_breached},
                                           {"warnings", traj.warnings},
                                           {"pass", pass}});
  *ctx.log << traj.records.size() << " records, max w-identity residual " << fmt(identity) << "\n";
  return pass ? 0 : 1;
}

/// c_{k+1} <= slack c_k for k >= 1, ignoring differences at the roundoff floor.
bool cauchy_settles(const std::vector<double>& c, double slack, double floor) {
  for (std::size_t k = 1; k + 1 < c.size(); ++k)
    if (c[k + 1] > slack * c[k] + floor) return false;
  return true;
}

int cmd_scatter(RunContext& ctx) {
  const auto& c = ctx.config;
  const Grid g = grid_of(c);
  const auto u0 = make_initial_data(g, data_of(c));
  const auto solve = solve_of(c);
  const auto diag = scatter_forward(u0, solve, c.number("solve.T0"));
  const auto [sigma, s] = solve.norm_exponents(g.dim());

  write_records(ctx.out_dir / "trajectory.csv", "scatter", diag.trajectory.records);
  CsvWriter csv(ctx.out_dir / "scatter.csv", "scatter", "samples",
                {"t", "v_cauchy", "z_cauchy", "correction", "profile"});
  for (std::size_t k = 0; k < diag.times.size(); ++k) {
    auto at = [k](const std::vector<double>& v) { return k < v.size() ? fmt(v[k]) : std::string(); };
    csv.row({fmt(diag.times[k]), at(diag.v_cauchy), at(diag.z_cauchy), at(diag.correction), at(diag.profile)});
  }
  snapshot(ctx, "v_plus", diag.v_plus);
  snapshot(ctx, "z_plus", diag.z_plus);

  const double v_plus_norm = sobolev_weighted_norm(diag.v_plus, sigma, s);
  const double floor = 1e-14 + 1e-12 * v_plus_norm;
  const double slack = tolerance(c, "tol.monotone");
  // Decay of c_k is only claimed for d >= 4; below that the samples are reported ungated.
  const bool gated = g.dim() >= 4;
  const bool pass = !gated || cauchy_settles(diag.v_cauchy, slack, floor);
  write_json(ctx.out_dir / "scatter.json", {{"command", "scatter"},
                                            {"times", diag.times},
                                            {"v_cauchy", diag.v_cauchy},
                                            {"z_cauchy", diag.z_cauchy},
                                            {"correction", diag.correction},
                                            {"profile", diag.profile},
                                            {"v_plus_norm", v_plus_norm},
                                            {"monotone_slack", slack},
                                            {"roundoff_floor", floor},
                                            {"gated", gated},
                                            {"pass", pass}});
  *ctx.log << "c_k (v frame):";
  for (double x : diag.v_cauchy) *ctx.log << " " << fmt(x);
  *ctx.log << "\n";
  return pass ? 0 : 1;
}

int cmd_wave_operator(RunContext& ctx) {
  const auto& c = ctx.config;
  const Grid g = grid_of(c);
  const auto solve = solve_of(c);
  // The target profile is V^{-1} of the configured datum, read as z_+.
  const auto v_plus = apply_V(make_initial_data(g, data_of(c)), Direction::inverse).with_frame(Frame::z);
  const double tol = c.number("waveop.tol");
  const auto [u0, report] =
      wave_operator_approx(v_plus, c.number("waveop.T"), solve, tol, c.integer("waveop.max_iter"));
  snapshot(ctx, "u0", u0);
  const auto [sigma, s] = solve.norm_exponents(g.dim());
  const bool pass = report.difference <= tol;
  write_json(ctx.out_dir / "wave_operator.json",
             {{"command", "wave-operator"},
              {"iterations", report.iterations},
              {"difference", report.difference},
              {"tolerance", tol},
              {"v_plus_norm", sobolev_weighted_norm(v_plus, sigma, s)},
              {"u0_sup", lq_norm(u0, kInfinity)},
              {"u0_v_norm", sobolev_weighted_norm(without_mean(apply_V(u0, Direction::inverse)), sigma, s)},
              {"pass", pass}});
  *ctx.log << report.iterations << " sweeps, last difference " << fmt(report.difference) << "\n";
  return pass ? 0 : 1;
}

int cmd_bilipschitz(RunContext& ctx) {
  const auto& c = ctx.config;
  const Grid g = grid_of(c);
  const int n = c.integer("bilipschitz.pairs");
  if (n < 1) throw InvalidArgument("bilipschitz.pairs must be >= 1");
  auto spec = data_of(c);
  // Chain: configured datum, then random windows seed, seed + 1, ...
  std::vector<SpectralField> data{make_initial_data(g, spec)};
  const std::uint64_t seed = spec.seed;
  spec.profile = "random-window";
  for (int k = 0; k < n; ++k) {
    spec.seed = seed + static_cast<std::uint64_t>(k);
    data.push_back(make_initial_data(g, spec));
  }
  std::vector<std::pair<SpectralField, SpectralField>> pairs;
  for (int k = 0; k < n; ++k) pairs.emplace_back(data[k], data[k + 1]);
  const auto stats = bilipschitz_probe(pairs, solve_of(c), c.number("solve.T0"));
  CsvWriter csv(ctx.out_dir / "bilipschitz.csv", "bilipschitz", "ratios", {"pair", "ratio"});
  for (std::size_t i = 0; i < stats.ratios.size(); ++i) csv.row({std::to_string(i), fmt(stats.ratios[i])});
  const double band = tolerance(c, "tol.bilipschitz");
  const bool pass = !stats.ratios.empty() && stats.min >= 1.0 / band && stats.max <= band;
  write_json(ctx.out_dir / "bilipschitz.json", {{"command", "bilipschitz"},
                                                {"ratios", stats.ratios},
                                                {"min", stats.min},
                                                {"max", stats.max},
                                                {"skipped", stats.skipped},
                                                {"band", band},
                                                {"pass", pass}});
  *ctx.log << "ratios in [" << fmt(stats.min) << ", " << fmt(stats.max) << "]\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// estimates

json inequality_json(const Inequality& q) {
  return {{"name", q.name},        {"lhs", to_string(q.lhs)}, {"rhs", to_string(q.rhs)},
          {"strict", q.strict},    {"slack", to_string(q.slack())}, {"holds", q.holds()}};
}

int cmd_estimates(RunContext& ctx) {
  const auto& c = ctx.config;
  const int d = c.integer("grid.d");
  const auto params = theorem_parameters(d);
  const Rational sigma = to_rational(c.number("solve.sigma"));
  const int trials = c.integer("estimates.trials");
  if (trials < 1) throw InvalidArgument("estimates.trials must be >= 1");
  const int step_den = c.integer("estimates.sweep_step");
  if (step_den < 1) throw InvalidArgument("estimates.sweep_step must be >= 1");

  const auto cases = builtin_cases(d, sigma);
  const auto lines = verification_lines(d, sigma);
  CsvWriter table(ctx.out_dir / "cases.csv", "estimates", "conditions",
                  {"case", "label", "inequality", "lhs", "rhs", "strict", "slack", "holds"});
  json case_rows = json::array();
  bool consistent = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto report = check_conditions(cases[i]);
    json ineqs = json::array();
    for (const auto& q : report.inequalities) {
      ineqs.push_back(inequality_json(q));
      table.row({std::to_string(i + 1), cases[i].label, q.name, to_string(q.lhs), to_string(q.rhs),
                 q.strict ? "1" : "0", to_string(q.slack()), q.holds() ? "1" : "0"});
    }
    const bool agrees = i < lines.size() && lines[i].holds() == report.valid;
    consistent = consistent && agrees;
    const auto first = first_invalid_sigma(d, static_cast<int>(i) + 1, Rational(0), Rational(1, step_den),
                                           Rational(d));
    case_rows.push_back({{"case", i + 1},
                         {"label", cases[i].label},
                         {"valid", report.valid},
                         {"min_slack", to_string(report.min_slack)},
                         {"verification_line_holds", i < lines.size() && lines[i].holds()},
                         {"first_invalid_sigma", first ? json(to_string(*first)) : json(nullptr)},
                         {"inequalities", ineqs}});
    *ctx.log << "case " << i + 1 << " (" << cases[i].label << "): " << (report.valid ? "valid" : "invalid")
             << ", first invalid sigma " << (first ? to_string(*first) : "none") << "\n";
  }

  TrilinearSuiteOptions opt;
  opt.d = d;
  opt.points = c.integer("estimates.N");
  opt.sigma = sigma;
  opt.trials = trials;
  opt.seed = seed_of(c);
  const auto suite = trilinear_suite(opt);
  const double bound = tolerance(c, "tol.growth");
  CsvWriter ratios(ctx.out_dir / "ratios.csv", "estimates", "trilinear",
                   {"case", "label", "max_narrow", "max_wide", "growth"});
  bool bounded = true;
  for (std::size_t i = 0; i < suite.labels.size(); ++i) {
    ratios.row({std::to_string(i + 1), suite.labels[i], fmt(suite.max_narrow[i]), fmt(suite.max_wide[i]),
                fmt(suite.growth[i])});
    bounded = bounded && std::isfinite(suite.growth[i]) && suite.growth[i] < bound;
  }
  const bool pass = consistent && bounded;
  write_json(ctx.out_dir / "estimates.json",
             {{"command", "estimates"},
              {"d", d},
              {"sigma", to_string(sigma)},
              {"parameters",
               {{"s", to_string(params.s)},
                {"b", to_string(params.b)},
                {"p", to_string(params.p)},
                {"q", to_string(params.q)},
                {"sigma_max", to_string(params.sigma_max)}}},
              {"sweep", {{"start", "0"}, {"step", "1/" + std::to_string(step_den)}, {"stop", std::to_string(d)}}},
              {"cases", case_rows},
              {"verification_consistent", consistent},
              {"trilinear", {{"trials", trials}, {"growth", suite.growth}, {"bound", bound}}},
              {"pass", pass}});
  return pass ? 0 : 1;
}

const std::map<std::string, int (*)(RunContext&)>& registry() {
  static const std::map<std::string, int (*)(RunContext&)> table{
      {"verify-identities", cmd_verify_identities},
      {"linear-decay", cmd_linear_decay},
      {"stationary-phase", cmd_stationary_phase},
      {"strichartz", cmd_strichartz},
      {"scatter", cmd_scatter},
      {"evolve", cmd_evolve},
      {"wave-operator", cmd_wave_operator},
      {"estimates", cmd_estimates},
      {"bilipschitz", cmd_bilipschitz},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"verify-identities", "linear-decay", "stationary-phase",
                                              "strichartz",        "scatter",      "evolve",
                                              "wave-operator",     "estimates",    "bilipschitz"};
  return names;
}

int run_command(const std::string& name, RunContext& ctx) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw InvalidArgument("unknown command '" + name + "'");
  ctx.config.set("command", name);
  std::filesystem::create_directories(ctx.out_dir);
  std::ofstream(ctx.out_dir / "config.json") << ctx.config.dump();
  return it->second(ctx);
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const SmallnessViolated*>(&error) || dynamic_cast<const BlowupGuard*>(&error)) return 1;
  return 2;
}

}  // namespace gpscat::cli
