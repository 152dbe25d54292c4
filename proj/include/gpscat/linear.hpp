#pragma once

#include <utility>
#include <vector>

#include "gpscat/grid.hpp"
#include "gpscat/multipliers.hpp"

namespace gpscat {

// ---------------------------------------------------------------------------
// Free flow of i u_t + Delta u - 2 Re u = 0.

/// e^{-iHt} v: coefficients times exp(-i phi(|xi|) t). The zero mode is left
/// alone (phi(0) = 0).
SpectralField propagate_diag(const SpectralField& v, double t);

/// V e^{-iHt} V^{-1} on the mean-free part, Jordan block on the mean.
/// The mean of `u` itself is ignored; `mean` is the carried one.
std::pair<SpectralField, ZeroModeState> propagate_u_linear(const SpectralField& u,
                                                           ZeroModeState mean, double t);
/// Convenience form reading the mean from the field's zero mode.
SpectralField propagate_u_linear(const SpectralField& u, double t);

/// Independent check of the twisted flow: each pair (c_k, conj c_{-k}) is
/// integrated under -i [[r^2 + 1, 1], [-1, -(r^2 + 1)]] with classical RK4.
SpectralField permode_oracle(const SpectralField& u, double t, int substeps);

// ---------------------------------------------------------------------------
// Radial oscillatory integrals
//
//   I(x, t) = (2 pi)^{-d/2} int chi_R(|xi|) exp(i phi(|xi|) t + i xi.x) dxi
//
// with the annular cutoff chi_R(r) = chi(r / R) - chi(2 r / R), supported in
// [R/2, 2R]. The prefactor makes I(x, 0) the inverse unitary transform of
// chi_R, so envelope constants are O(1) in every dimension.

struct StationaryPhaseQuery {
  int d = 3;
  double R = 1.0;
  double x = 0.0;  ///< |x|
  double t = 0.0;
};

/// chi(r / R) - chi(2 r / R).
double block_cutoff(double R, double r);

struct QuadratureBudget {
  double rel_tol = 1e-8;
  int max_levels = 7;  ///< panel doublings before giving up
};

struct OracleValue {
  Complex value;
  double error = 0.0;  ///< |difference| between the last two refinement levels
  bool converged = false;
};

/// Direct iterated Gauss-Legendre quadrature (radius, then polar angle)
/// refined by panel doubling until the error estimate meets
/// rel_tol * (integral of |integrand|). d in 1..6.
OracleValue stationary_phase_oracle(const StationaryPhaseQuery& query,
                                    QuadratureBudget budget = {});

/// t^{-d/2} (phi'(R)/R)^{-(d-1)/2} phi''(R)^{-1/2}.
double stationary_phase_envelope(int d, double R, double t);

struct RayProfile {
  std::vector<double> x;
  std::vector<double> magnitude;
  double sup = 0.0;
  double argmax = 0.0;
};

/// |I(x, t)| on the ray |x| in [0.5 phi'(R/2) t, 1.5 phi'(2R) t] at `samples`
/// points plus the stationary point t phi'(R); the sup is then polished by a
/// bracketed 1D maximization around the best sample. Radial symmetry makes the
/// ray exhaustive away from the origin.
RayProfile stationary_phase_ray(int d, double R, double t, int samples = 200);

// ---------------------------------------------------------------------------
// Decay fits.

struct DecayFitResult {
  double exponent = 0.0;   ///< fitted slope of log norm vs log t
  double predicted = 0.0;  ///< -d sigma
  double residual = 0.0;   ///< RMS misfit in log space
  double t0 = 0.0;
  double t1 = 0.0;
  double constant = 0.0;   ///< max over the window of norm / envelope
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> envelope;

  bool reliable() const { return residual <= 0.1; }
};

/// Least-squares slope of log(values) against log(times).
DecayFitResult fit_power_law(const std::vector<double>& times, const std::vector<double>& values);

/// Oracle path: sup_x |I(x, t)| for a block at scale R, envelope from
/// stationary_phase_envelope, predicted exponent -d/2.
DecayFitResult decay_fit_oracle(int d, double R, const std::vector<double>& times);

/// Heuristic start of the oscillation-resolved regime, 10 / (phi''(R) R^2).
double decay_window_start(double R);

/// Grid path: || e^{-itH} phi0 ||_{B^0_q} at each time. Throws GuardViolation
/// when phi'(R) max(times) >= L/2 for R the largest populated frequency.
DecayFitResult decay_fit(const SpectralField& phi0, double q, const std::vector<double>& times);

/// Largest |xi| carrying a coefficient above 1e-12 of the field's peak.
double populated_frequency(const SpectralField& field);

/// s = ((d - 2)/2)(1/2 - 1/q).
double strichartz_weight(int d, double q);
/// 2/p + d/q = d/2, p >= 2, (p, q) != (2, inf).
bool strichartz_admissible(int d, double p, double q);

/// ||e^{-itH} phi||_{L^p([0,T]) B^0_q} / ||U^s phi||_{L^2} on the mesh dt.
double strichartz_ratio(const SpectralField& phi, double p, double q, double T, double dt);

}  // namespace gpscat
