#include "gpscat/normal_form.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"

namespace gpscat {

namespace {

const Complex kI(0.0, 1.0);

std::vector<Complex> physical_values(const SpectralField& f, int order) {
  return to_physical(dealias(f, order)).copy_values();
}

SpectralField from_physical(const Grid& grid, std::vector<Complex> values, Frame frame, int order) {
  return dealias(SpectralField(grid, std::move(values), frame, Representation::physical), order);
}

/// Real physical arrays u1 = Re u, u2 = Im u after the order-`order` mask.
std::pair<std::vector<double>, std::vector<double>> split_real_imag(const SpectralField& u, int order) {
  const auto values = physical_values(u, order);
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  return {std::move(re), std::move(im)};
}

template <typename Fn>
SpectralField pointwise(const Grid& grid, Frame frame, int order, Fn&& fn) {
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(i);
  return from_physical(grid, std::move(out), frame, order);
}

SpectralField apply(const MultiplierSpec& spec, const SpectralField& f) {
  return apply_multiplier(spec, f);
}

}  // namespace

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b, int order) {
  const auto pa = physical_values(a, order);
  const auto pb = physical_values(b, order);
  return pointwise(a.grid(), a.frame(), order, [&](std::size_t i) { return pa[i] * pb[i]; });
}

SpectralField nonlinearity_F(const SpectralField& u) {
  const Grid& g = u.grid();
  const auto u2 = physical_values(u, 2);
  const auto u3 = physical_values(u, 3);
  const auto quadratic = pointwise(g, u.frame(), 2, [&](std::size_t i) {
    return u2[i] * u2[i] + 2.0 * std::norm(u2[i]);
  });
  const auto cubic = pointwise(g, u.frame(), 3, [&](std::size_t i) {
    return std::norm(u3[i]) * u3[i];
  });
  return quadratic + cubic;
}

NonlinearTerms compute_G(const SpectralField& u) {
  const Grid& g = u.grid();
  const Frame fr = u.frame();
  const auto [a, b] = split_real_imag(u, 2);
  const auto [a3, b3] = split_real_imag(u, 3);

  const auto u1_sq = pointwise(g, fr, 2, [&](std::size_t i) { return Complex(a[i] * a[i]); });
  const auto u2_sq = pointwise(g, fr, 2, [&](std::size_t i) { return Complex(b[i] * b[i]); });
  const auto u1u2 = pointwise(g, fr, 2, [&](std::size_t i) { return Complex(a[i] * b[i]); });
  const auto mod_sq = u1_sq + u2_sq;
  const auto cubic1 = pointwise(g, fr, 3, [&](std::size_t i) {
    return Complex((a3[i] * a3[i] + b3[i] * b3[i]) * a3[i]);
  });
  const auto cubic2 = pointwise(g, fr, 3, [&](std::size_t i) {
    return Complex((a3[i] * a3[i] + b3[i] * b3[i]) * b3[i]);
  });

  const auto P = multiplier::P();
  const auto Q = multiplier::Q();
  auto G1 = Complex(3.0) * u1_sq - apply(P, u1_sq) + apply(Q, u2_sq) +
            Complex(0.5) * apply(multiplier::P_laplacian(), mod_sq) + cubic1;

  // grad P . (u2 grad u1 - u1 grad u2), one axis at a time.
  const auto re_u = real_part(to_frequency(u));
  const auto im_u = imag_part(to_frequency(u));
  auto flux_div = SpectralField::zeros(g, fr);
  for (int axis = 0; axis < g.dim(); ++axis) {
    const auto d = multiplier::derivative(axis);
    const auto grad1 = physical_values(apply(d, re_u), 2);
    const auto grad2 = physical_values(apply(d, im_u), 2);
    const auto flux = pointwise(g, fr, 2, [&](std::size_t i) {
      return Complex(b[i] * grad1[i].real() - a[i] * grad2[i].real());
    });
    flux_div = flux_div + apply(multiplier::grad_P(axis), flux);
  }
  auto G2 = Complex(2.0) * apply(Q, u1u2) + flux_div + apply(Q, cubic2);
  return {real_part(G1), real_part(G2)};
}

std::pair<SpectralField, SpectralField> q_split(const SpectralField& u2) {
  const auto low = apply(multiplier::P_minus2(), u2);
  const auto high = apply(multiplier::Q_minus2(), u2);
  const auto Q = multiplier::Q();
  return {apply(Q, dealiased_product(u2, high)), apply(Q, dealiased_product(high, low))};
}

SpectralField to_normal_form(const SpectralField& u) {
  const auto values = physical_values(u, 2);
  const auto mod_sq =
      pointwise(u.grid(), u.frame(), 2, [&](std::size_t i) { return Complex(std::norm(values[i])); });
  return (to_frequency(u) + Complex(0.5) * apply(multiplier::P(), mod_sq)).with_frame(Frame::w);
}

namespace {

/// U^{-1} P |V v|^2 / 2 with the mean of |Vv|^2 projected out.
SpectralField normal_form_correction(const SpectralField& v) {
  const auto Vv = physical_values(apply_V(v, Direction::forward), 2);
  const auto mod_sq =
      pointwise(v.grid(), v.frame(), 2, [&](std::size_t i) { return Complex(std::norm(Vv[i])); });
  return Complex(0.5) * apply(multiplier::U_inverse(), apply(multiplier::P(), without_mean(mod_sq)));
}

}  // namespace

SpectralField apply_M(const SpectralField& v) {
  return (to_frequency(v) + normal_form_correction(v)).with_frame(Frame::z);
}

std::pair<double, double> default_norm_exponents(int dim) { return {0.0, 0.5 * dim - 1.0}; }

std::pair<SpectralField, FixedPointReport> invert_M(const SpectralField& z,
                                                    const FixedPointOptions& options) {
  const int dim = z.grid().dim();
  const double sigma = options.sigma;
  const double s = options.s < 0.0 ? default_norm_exponents(dim).second : options.s;
  auto norm = [&](const SpectralField& f) { return sobolev_weighted_norm(f, sigma, s); };

  const auto target = to_frequency(z);
  const double z_norm = norm(without_mean(target));
  if (z_norm > options.delta)
    throw SmallnessViolated("||z||_{H^{sigma,s}} = " + std::to_string(z_norm) +
                            " exceeds the fixed-point threshold " + std::to_string(options.delta));
  FixedPointReport report;
  if (z_norm == 0.0 && mean_value(target) == Complex{}) {
    report.iterations = 1;
    return {target.with_frame(Frame::v), report};
  }
  // Below this the residual is roundoff; it can no longer shrink.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * z_norm;
  auto v = target;
  double previous = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int k = 1; k <= options.max_iter; ++k) {
    auto next = target - normal_form_correction(v);
    const double residual = norm(without_mean(next - v));
    report.iterations = k;
    report.residual = residual;
    report.contraction_ratio = std::isinf(previous) ? 0.0 : residual / previous;
    v = std::move(next);
    if (residual < std::max(options.tol, floor)) return {v.with_frame(Frame::v), report};
    if (!std::isinf(previous) && residual >= previous) {
      if (++stalled >= 3) throw SmallnessViolated("M^{-1} iteration is not contracting");
    } else {
      stalled = 0;
    }
    previous = residual;
  }
  throw SmallnessViolated("M^{-1} iteration did not reach tolerance in " +
                          std::to_string(options.max_iter) + " iterations");
}

SpectralField u_time_derivative(const SpectralField& u) {
  const auto freq = to_frequency(u);
  const auto rhs = Complex(-1.0) * apply(multiplier::laplacian(), freq) +
                   Complex(2.0) * real_part(freq) + nonlinearity_F(freq);
  return -kI * rhs;
}

double w_identity_residual(const SpectralField& u_in, ZeroModeState mean) {
  const auto u = with_mean(u_in, mean);
  const Grid& g = u.grid();
  const auto u_t = u_time_derivative(u);
  const auto pu = physical_values(u, 2);
  const auto pu_t = physical_values(u_t, 2);
  const auto re_prod = pointwise(g, u.frame(), 2, [&](std::size_t i) {
    return Complex((std::conj(pu[i]) * pu_t[i]).real());
  });
  const auto w_t = u_t + apply(multiplier::P(), re_prod);
  const auto w = to_normal_form(u).with_frame(u.frame());
  const auto [G1, G2] = compute_G(u);

  const auto lhs = kI * w_t;
  const auto rhs = Complex(-1.0) * apply(multiplier::laplacian(), w) + Complex(2.0) * real_part(w) +
                   G1 + kI * G2;
  const double scale = std::max(l2_norm(without_mean(lhs)), l2_norm(without_mean(rhs)));
  if (scale == 0.0) return 0.0;
  return l2_norm(without_mean(lhs - rhs)) / scale;
}

SpectralField v_forcing(const SpectralField& u) {
  return (Complex(-1.0) * apply_V(kI * nonlinearity_F(u), Direction::inverse)).with_frame(Frame::v);
}

SpectralField z_forcing(const SpectralField& u) {
  const auto [G1, G2] = compute_G(u);
  return (Complex(-1.0) * (kI * G1 - apply(multiplier::U_inverse(), G2))).with_frame(Frame::z);
}

namespace radial3 {

SpectralField encode(const Grid& line, const std::function<double(double)>& psi, Complex amplitude) {
  if (line.dim() != 1) throw InvalidArgument("radial encoding lives on a 1D grid");
  std::vector<Complex> c(line.size());
  for (std::size_t f = 0; f < c.size(); ++f) {
    if (line.wavenumber(static_cast<int>(f)) == -line.points() / 2) continue;
    const double xi = line.wavevector(f).xi[0];
    c[f] = amplitude * Complex(0.0, -xi) * psi(std::abs(xi));
  }
  return SpectralField(line, std::move(c), Frame::v, Representation::frequency);
}

SpectralField square_modulus(const SpectralField& F) {
  const Grid& g = F.grid();
  const auto values = physical_values(F, 2);
  const double h = g.spacing();
  const int n = g.points();
  return pointwise(g, F.frame(), 2, [&](std::size_t i) {
    const int k = g.wavenumber(static_cast<int>(i));
    if (k == 0 || k == -n / 2) return Complex{};
    return Complex(std::norm(values[i]) / (k * h));
  });
}

double sobolev_norm(const SpectralField& F, double sigma, double s) {
  return std::sqrt(2.0 * std::numbers::pi) * sobolev_weighted_norm(F, sigma, s);
}

SpectralField apply_M(const SpectralField& F) {
  const auto VF = apply_V(F, Direction::forward);
  const auto sq = square_modulus(VF);
  const auto correction =
      Complex(0.5) * apply(multiplier::U_inverse(), apply(multiplier::P(), without_mean(sq)));
  return (to_frequency(F) + correction).with_frame(Frame::z);
}

}  // namespace radial3

}  // namespace gpscat
