#include "gpscat/linear.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "fft.hpp"
#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"

namespace gpscat {

SpectralField propagate_diag(const SpectralField& v, double t) {
  if (t == 0.0) return to_frequency(v);
  return apply_multiplier(multiplier::propagator(t), v);
}

std::pair<SpectralField, ZeroModeState> propagate_u_linear(const SpectralField& u,
                                                           ZeroModeState mean, double t) {
  const auto mean_free = without_mean(u);
  const auto v = apply_V(mean_free, Direction::inverse);
  const auto moved = apply_V(propagate_diag(v, t), Direction::forward);
  return {moved.with_frame(u.frame()), zero_mode_evolve(mean, t)};
}

SpectralField propagate_u_linear(const SpectralField& u, double t) {
  auto [mean_free, mean] = split_mean(u);
  auto [moved, moved_mean] = propagate_u_linear(mean_free, mean, t);
  return with_mean(moved, moved_mean);
}

SpectralField permode_oracle(const SpectralField& u, double t, int substeps) {
  if (substeps < 1) throw InvalidArgument("permode_oracle needs substeps >= 1");
  const auto freq = to_frequency(u);
  const Grid& g = freq.grid();
  const auto abs_xi = g.abs_frequencies();
  const double h = t / substeps;
  const Complex minus_i(0.0, -1.0);
  std::vector<Complex> out(freq.size());
  for (std::size_t f = 0; f < freq.size(); ++f) {
    const double w = abs_xi[f] * abs_xi[f] + 1.0;
    auto rhs = [&](Complex a, Complex b) {
      return std::array<Complex, 2>{minus_i * (w * a + b), minus_i * (-a - w * b)};
    };
    Complex a = freq[f];
    Complex b = std::conj(freq[g.negated(f)]);
    if (a == Complex{} && b == Complex{}) continue;
    for (int step = 0; step < substeps; ++step) {
      const auto k1 = rhs(a, b);
      const auto k2 = rhs(a + 0.5 * h * k1[0], b + 0.5 * h * k1[1]);
      const auto k3 = rhs(a + 0.5 * h * k2[0], b + 0.5 * h * k2[1]);
      const auto k4 = rhs(a + h * k3[0], b + h * k3[1]);
      a += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
      b += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    out[f] = a;
  }
  return SpectralField(g, std::move(out), freq.frame(), Representation::frequency);
}

// ---------------------------------------------------------------------------
// Radial oscillatory integrals

double block_cutoff(double R, double r) { return cutoff_chi(r / R) - cutoff_chi(2.0 * r / R); }

double stationary_phase_envelope(int d, double R, double t) {
  const auto dv = dispersion_values(R);
  return std::pow(t, -0.5 * d) * std::pow(dv.dphi / R, -0.5 * (d - 1)) / std::sqrt(dv.d2phi);
}

namespace {

using Gauss8 = boost::math::quadrature::gauss<double, 8>;

void require_dimension(int d) {
  if (d < 1 || d > 6) throw InvalidArgument("radial oracle supports d in 1..6");
}

/// (2 pi)^{-d/2} |S^{d-2}| for d >= 2, (2 pi)^{-1/2} for d = 1.
double angular_prefactor(int d) {
  const double unitary = std::pow(2.0 * std::numbers::pi, -0.5 * d);
  if (d == 1) return unitary;
  const double n = d - 1;
  return unitary * 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Radial amplitude chi_R(r) r^{d-1} e^{i phi(r) t}.
Complex radial_amplitude(int d, double R, double t, double r) {
  const double cut = block_cutoff(R, r);
  if (cut == 0.0) return {};
  return cut * std::pow(r, d - 1) * std::polar(1.0, dispersion_phi(r) * t);
}

/// Composite 8-point Gauss-Legendre nodes on [a, b] with `panels` panels.
void composite_nodes(double a, double b, int panels, std::vector<double>& x,
                     std::vector<double>& w) {
  x.clear();
  w.clear();
  const auto& abscissa = Gauss8::abscissa();
  const auto& weight = Gauss8::weights();
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t k = 0; k < abscissa.size(); ++k) {
      x.push_back(mid - half * abscissa[k]);
      w.push_back(half * weight[k]);
      x.push_back(mid + half * abscissa[k]);
      w.push_back(half * weight[k]);
    }
  }
}

Complex direct_level(const StationaryPhaseQuery& q, int r_panels, int theta_panels) {
  std::vector<double> rx, rw;
  composite_nodes(0.5 * q.R, 2.0 * q.R, r_panels, rx, rw);
  std::vector<Complex> amp(rx.size());
  for (std::size_t i = 0; i < rx.size(); ++i) amp[i] = rw[i] * radial_amplitude(q.d, q.R, q.t, rx[i]);

  auto radial_sum = [&](double c) {
    Complex s{};
    for (std::size_t i = 0; i < rx.size(); ++i) s += amp[i] * std::polar(1.0, rx[i] * c);
    return s;
  };

  if (q.d == 1) return angular_prefactor(1) * (radial_sum(q.x) + radial_sum(-q.x));
  std::vector<double> tx, tw;
  composite_nodes(0.0, std::numbers::pi, theta_panels, tx, tw);
  Complex total{};
  for (std::size_t k = 0; k < tx.size(); ++k) {
    const double weight = tw[k] * std::pow(std::sin(tx[k]), q.d - 2);
    total += weight * radial_sum(q.x * std::cos(tx[k]));
  }
  return angular_prefactor(q.d) * total;
}

/// Integral of the modulus of the integrand: the scale of the error target.
double absolute_scale(int d, double R) {
  std::vector<double> rx, rw;
  composite_nodes(0.5 * R, 2.0 * R, 16, rx, rw);
  double s = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) s += rw[i] * block_cutoff(R, rx[i]) * std::pow(rx[i], d - 1);
  const double sphere =
      d == 1 ? 2.0 : 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  return std::pow(2.0 * std::numbers::pi, -0.5 * d) * sphere * s;
}

/**
 * J(c) = int chi_R(r) r^{d-1} e^{i phi(r) t + i r c} dr on a uniform c-grid
 * (trapezoid in r, evaluated for all c at once by one FFT) together with
 * J'(c), so J can be interpolated by cubic Hermite polynomials.
 */
class RadialTransformTable {
 public:
  RadialTransformTable(int d, double R, double t, double c_max) : d_(d), R_(R), t_(t) {
    const double omega = dispersion_dphi(2.0 * R) * t + c_max;
    h_ = std::numbers::pi / (omega + 40.0 / R);
    r0_ = 0.5 * R;
    const auto n_r = static_cast<std::size_t>(std::ceil(1.5 * R / h_)) + 1;
    const double dc_target = 0.1 / (2.0 * R);
    const auto need = std::max<std::size_t>(
        2 * n_r, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / (h_ * dc_target))));
    m_ = std::bit_ceil(need);
    dc_ = 2.0 * std::numbers::pi / (h_ * static_cast<double>(m_));

    std::vector<Complex> g(m_), gr(m_);
    for (std::size_t n = 0; n < n_r; ++n) {
      const double r = r0_ + static_cast<double>(n) * h_;
      g[n] = radial_amplitude(d, R, t, r);
      gr[n] = Complex(0.0, r) * g[n];
    }
    values_.resize(m_);
    slopes_.resize(m_);
    detail::fft_1d(+1, g, values_);
    detail::fft_1d(+1, gr, slopes_);
    for (std::size_t m = 0; m < m_; ++m) {
      const Complex phase = h_ * std::polar(1.0, r0_ * grid_c(m));
      values_[m] *= phase;
      slopes_[m] *= phase;
    }
  }

  /// Trapezoid sum evaluated directly at one c (the same quadrature as the table).
  Complex direct(double c) const {
    Complex s{};
    const auto n_r = static_cast<std::size_t>(std::ceil(1.5 * R_ / h_)) + 1;
    for (std::size_t n = 0; n < n_r; ++n) {
      const double r = r0_ + static_cast<double>(n) * h_;
      s += radial_amplitude(d_, R_, t_, r) * std::polar(1.0, r * c);
    }
    return h_ * s;
  }

  Complex operator()(double c) const {
    const double pos = c / dc_;
    const double base = std::floor(pos);
    const double s = pos - base;
    const auto m0 = wrap(static_cast<long long>(base));
    const auto m1 = wrap(static_cast<long long>(base) + 1);
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * values_[m0] + h10 * dc_ * slopes_[m0] + h01 * values_[m1] + h11 * dc_ * slopes_[m1];
  }

 private:
  double grid_c(std::size_t m) const {
    const auto signed_m = m < m_ / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(m_);
    return signed_m * dc_;
  }
  std::size_t wrap(long long m) const {
    const auto size = static_cast<long long>(m_);
    return static_cast<std::size_t>(((m % size) + size) % size);
  }

  int d_;
  double R_;
  double t_;
  double h_ = 0.0;
  double r0_ = 0.0;
  double dc_ = 0.0;
  std::size_t m_ = 0;
  std::vector<Complex> values_;
  std::vector<Complex> slopes_;
};

/// I(x) from a J table: angular integral by composite Gauss-Legendre.
class RayEvaluator {
 public:
  RayEvaluator(int d, double R, double t, double x_max)
      : d_(d), R_(R), table_(d, R, t, x_max), prefactor_(angular_prefactor(d)) {}

  double magnitude(double x) const { return std::abs(value(x)); }

  Complex value(double x) const {
    if (d_ == 1) return prefactor_ * (table_(x) + table_(-x));
    const int panels = static_cast<int>(std::ceil(2.0 * R_ * x / std::numbers::pi)) + 4;
    std::vector<double> tx, tw;
    composite_nodes(0.0, std::numbers::pi, panels, tx, tw);
    Complex total{};
    for (std::size_t k = 0; k < tx.size(); ++k)
      total += tw[k] * std::pow(std::sin(tx[k]), d_ - 2) * table_(x * std::cos(tx[k]));
    return prefactor_ * total;
  }

 private:
  int d_;
  double R_;
  RadialTransformTable table_;
  double prefactor_;
};

}  // namespace

OracleValue stationary_phase_oracle(const StationaryPhaseQuery& q, QuadratureBudget budget) {
  require_dimension(q.d);
  if (!(q.R > 0.0) || q.t < 0.0 || q.x < 0.0)
    throw InvalidArgument("stationary-phase query needs R > 0, t >= 0, |x| >= 0");
  const double omega = dispersion_dphi(2.0 * q.R) * q.t + q.x;
  const int base_r = static_cast<int>(std::ceil(omega * 1.5 * q.R / (2.0 * std::numbers::pi))) + 4;
  const int base_theta = static_cast<int>(std::ceil(2.0 * q.R * q.x / (2.0 * std::numbers::pi))) + 4;
  const double target = budget.rel_tol * absolute_scale(q.d, q.R);

  OracleValue out;
  Complex previous = direct_level(q, base_r, base_theta);
  for (int level = 1; level <= budget.max_levels; ++level) {
    const Complex current = direct_level(q, base_r << level, base_theta << level);
    out.value = current;
    out.error = std::abs(current - previous);
    if (out.error <= target) {
      out.converged = true;
      return out;
    }
    previous = current;
  }
  return out;
}

RayProfile stationary_phase_ray(int d, double R, double t, int samples) {
  require_dimension(d);
  if (!(R > 0.0) || !(t > 0.0) || samples < 2)
    throw InvalidArgument("ray sampling needs R > 0, t > 0, samples >= 2");
  const double x_lo = 0.5 * dispersion_dphi(0.5 * R) * t;
  const double x_hi = 1.5 * dispersion_dphi(2.0 * R) * t;
  const RayEvaluator eval(d, R, t, x_hi * 1.01);

  RayProfile out;
  for (int i = 0; i < samples; ++i) out.x.push_back(x_lo + (x_hi - x_lo) * i / (samples - 1));
  out.x.push_back(t * dispersion_dphi(R));
  std::sort(out.x.begin(), out.x.end());
  for (double x : out.x) out.magnitude.push_back(eval.magnitude(x));

  const auto best = static_cast<std::size_t>(
      std::max_element(out.magnitude.begin(), out.magnitude.end()) - out.magnitude.begin());
  out.sup = out.magnitude[best];
  out.argmax = out.x[best];
  const double lo = out.x[best == 0 ? 0 : best - 1];
  const double hi = out.x[std::min(best + 1, out.x.size() - 1)];
  if (hi > lo) {
    const auto polished = boost::math::tools::brent_find_minima(
        [&](double x) { return -eval.magnitude(x); }, lo, hi, 40);
    if (-polished.second > out.sup) {
      out.sup = -polished.second;
      out.argmax = polished.first;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decay fits

DecayFitResult fit_power_law(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size() || times.size() < 2)
    throw InvalidArgument("power-law fit needs matching series of length >= 2");
  const auto n = static_cast<double>(times.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !(values[i] > 0.0))
      throw InvalidArgument("power-law fit needs positive times and values");
    const double x = std::log(times[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  DecayFitResult out;
  const double denom = n * sxx - sx * sx;
  out.exponent = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
  const double intercept = (sy - out.exponent * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double e = std::log(values[i]) - intercept - out.exponent * std::log(times[i]);
    rss += e * e;
  }
  out.residual = std::sqrt(rss / n);
  out.t0 = times.front();
  out.t1 = times.back();
  out.times = times;
  out.norms = values;
  return out;
}

double decay_window_start(double R) {
  return 10.0 / (dispersion_d2phi(R) * R * R);
}

DecayFitResult decay_fit_oracle(int d, double R, const std::vector<double>& times) {
  std::vector<double> sups;
  for (double t : times) sups.push_back(stationary_phase_ray(d, R, t).sup);
  auto out = fit_power_law(times, sups);
  out.predicted = -0.5 * d;
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.envelope.push_back(stationary_phase_envelope(d, R, times[i]));
    out.constant = std::max(out.constant, sups[i] / out.envelope.back());
  }
  return out;
}

double populated_frequency(const SpectralField& field) {
  const auto freq = to_frequency(field);
  const auto abs_xi = freq.grid().abs_frequencies();
  double peak = 0.0;
  for (const auto& c : freq.values()) peak = std::max(peak, std::abs(c));
  double r = 0.0;
  for (std::size_t f = 0; f < freq.size(); ++f)
    if (std::abs(freq[f]) > 1e-12 * peak) r = std::max(r, abs_xi[f]);
  return r;
}

DecayFitResult decay_fit(const SpectralField& phi0, double q, const std::vector<double>& times) {
  if (times.size() < 2 || !std::is_sorted(times.begin(), times.end()) || !(times.front() > 0.0))
    throw InvalidArgument("decay fit needs increasing positive times");
  if (!(q >= 2.0)) throw InvalidArgument("decay fit needs q in [2, inf]");
  const Grid& g = phi0.grid();
  const double speed = dispersion_dphi(populated_frequency(phi0));
  if (speed * times.back() >= 0.5 * g.length())
    throw GuardViolation("wrap-around: group speed * t_max = " +
                         std::to_string(speed * times.back()) + " exceeds L/2 = " +
                         std::to_string(0.5 * g.length()));
  const int d = g.dim();
  const double sigma = std::isinf(q) ? 0.5 : 0.5 - 1.0 / q;
  const double q_dual = std::isinf(q) ? 1.0 : q / (q - 1.0);
  const auto data = without_mean(phi0);
  const double data_norm = homogeneous_besov_norm(
      apply_multiplier(multiplier::U_power((d - 2) * sigma), data), 0.0, q_dual);

  std::vector<double> norms;
  for (double t : times) norms.push_back(homogeneous_besov_norm(propagate_diag(data, t), 0.0, q));
  auto out = fit_power_law(times, norms);
  out.predicted = -d * sigma;
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.envelope.push_back(std::pow(times[i], -d * sigma) * data_norm);
    out.constant = std::max(out.constant, norms[i] / out.envelope.back());
  }
  return out;
}

double strichartz_weight(int d, double q) {
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return 0.5 * (d - 2) * (0.5 - inv_q);
}

bool strichartz_admissible(int d, double p, double q) {
  if (!(p >= 2.0) || !(q >= 2.0)) return false;
  if (p == 2.0 && std::isinf(q)) return false;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return std::abs(2.0 * inv_p + d * inv_q - 0.5 * d) <= 1e-12;
}

double strichartz_ratio(const SpectralField& phi, double p, double q, double T, double dt) {
  const int d = phi.grid().dim();
  if (!strichartz_admissible(d, p, q))
    throw InvalidArgument("inadmissible Strichartz pair: need 2/p + d/q = d/2, (p,q) != (2,inf)");
  if (!(T > 0.0) || !(dt > 0.0)) throw InvalidArgument("Strichartz ratio needs T > 0, dt > 0");
  const auto data = without_mean(phi);
  const double denominator =
      l2_norm(apply_multiplier(multiplier::U_power(strichartz_weight(d, q)), data));
  if (!(denominator > 0.0)) throw InvalidArgument("Strichartz ratio of a zero datum is undefined");
  const auto steps = static_cast<int>(std::llround(T / dt));
  std::vector<double> norms;
  for (int n = 0; n <= steps; ++n)
    norms.push_back(homogeneous_besov_norm(propagate_diag(data, n * dt), 0.0, q));
  return spacetime_norm(norms, T / steps, p) / denominator;
}

}  // namespace gpscat
