#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gpscat/grid.hpp"

namespace gpscat {

// ---------------------------------------------------------------------------
// Radial symbols of the linearization around the vacuum.

/// Smooth plateau cutoff: 1 on [0, 1], 0 on [2, inf), and 1 - S(r - 1) in
/// between with S(x) = e(x) / (e(x) + e(1 - x)), e(x) = exp(-1/x) for x > 0.
double cutoff_chi(double r);
/// The monotone transition S(x) on [0, 1] used by cutoff_chi.
double chi_transition(double x);

struct DispersionValues {
  double phi;
  double dphi;
  double d2phi;
};

/// phi(r) = r sqrt(2 + r^2) with its first two derivatives, closed form.
DispersionValues dispersion_values(double r);
double symbol_H(double r);
double symbol_U(double r);
double dispersion_phi(double r);
double dispersion_dphi(double r);
double dispersion_d2phi(double r);

// ---------------------------------------------------------------------------
// Fourier multipliers.

enum class ZeroModeKind { value, project_out, reject };

struct ZeroModePolicy {
  ZeroModeKind kind = ZeroModeKind::value;
  Complex value{};

  static ZeroModePolicy fixed(Complex c) { return {ZeroModeKind::value, c}; }
  static ZeroModePolicy project_out() { return {ZeroModeKind::project_out, {}}; }
  static ZeroModePolicy reject() { return {ZeroModeKind::reject, {}}; }
};

/**
 * A Fourier multiplier: a symbol evaluated at each nonzero lattice point and
 * a policy for the zero mode. Symbols with a nonempty `name` are cached per
 * grid, so the name must identify the symbol uniquely.
 */
struct MultiplierSpec {
  std::string name;
  std::function<Complex(const Wavevector&)> symbol;
  ZeroModePolicy zero_mode;
  bool singular_at_zero = false;

  MultiplierSpec with_policy(ZeroModePolicy policy) const {
    MultiplierSpec copy = *this;
    copy.zero_mode = policy;
    return copy;
  }
};

namespace multiplier {

MultiplierSpec identity();
/// Radial symbol m(|xi|) with m(0) used at the zero mode.
MultiplierSpec radial(std::string name, std::function<double(double)> symbol);
/// -|xi|^2.
MultiplierSpec laplacian();
/// i xi_axis.
MultiplierSpec derivative(int axis);
MultiplierSpec H();
/// U^power; negative powers default to project-out at the zero mode.
MultiplierSpec U_power(double power);
MultiplierSpec U();
MultiplierSpec U_inverse();
/// chi(|xi|).
MultiplierSpec P();
/// 1 - chi(|xi|).
MultiplierSpec Q();
/// chi(4 |xi|).
MultiplierSpec P_minus2();
/// 1 - chi(4 |xi|).
MultiplierSpec Q_minus2();
/// i xi_axis chi(|xi|): one component of grad P.
MultiplierSpec grad_P(int axis);
/// -|xi|^2 chi(|xi|).
MultiplierSpec P_laplacian();
/// exp(-i t phi(|xi|)).
MultiplierSpec propagator(double t);

}  // namespace multiplier

/// Coefficientwise product with the symbol; zero mode per policy.
/// Throws SingularZeroMode for a rejecting policy on a field with a mean.
SpectralField apply_multiplier(const MultiplierSpec& spec, const SpectralField& field);

/// Symbol values on every nonzero lattice point of `grid`; entry 0 holds the
/// policy value (0 for project-out and reject). Cached for named specs.
std::shared_ptr<const std::vector<Complex>> symbol_table(const MultiplierSpec& spec,
                                                         const Grid& grid);

/**
 * V u = U Re u + i Im u (forward) and V^{-1} u = U^{-1} Re u + i Im u
 * (inverse). The real part's mean is handled by `policy` on the inverse
 * (U^{-1} is singular there); forward V maps it to zero since U(0) = 0.
 */
SpectralField apply_V(const SpectralField& field, Direction direction,
                      ZeroModePolicy policy = ZeroModePolicy::project_out());

// ---------------------------------------------------------------------------
// The xi = 0 mode of the linear flow: a Jordan block.

struct ZeroModeState {
  double m1 = 0.0;  ///< mean of Re u
  double m2 = 0.0;  ///< mean of Im u

  bool operator==(const ZeroModeState&) const = default;
};

/// Exact linear flow of the mean: (m1, m2) -> (m1, m2 - 2 t m1).
ZeroModeState zero_mode_evolve(ZeroModeState state, double t);

/// Split a field into its mean-free part and its mean.
std::pair<SpectralField, ZeroModeState> split_mean(const SpectralField& field);
/// Put a mean back into a (mean-free) field.
SpectralField with_mean(const SpectralField& field, ZeroModeState mean);

}  // namespace gpscat
