#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpscat/grid.hpp"
#include "gpscat/multipliers.hpp"

namespace gpscat {

struct SolveConfig {
  double dt = 0.1;
  double T = 1.0;
  int observe_every = 1;       ///< observer cadence in steps
  double sigma = 0.0;
  double s = -1.0;             ///< negative: d/2 - 1
  double epsilon_max = 0.1;    ///< smallness guard on ||V^{-1}u||_{H^{sigma,s}}
  double amplitude_guard = 1.0;  ///< BlowupGuard when ||u||_inf exceeds it
  bool observe_identity = false; ///< also record the w-identity residual
  double recurrence_margin = 1.25;

  /// (sigma, s) with the default resolved for `dim`.
  std::pair<double, double> norm_exponents(int dim) const;
  /// Throws InvalidArgument on dt <= 0, T < 0, observe_every < 1.
  void validate() const;
};

/// dt * max_lattice phi >= 2 pi: the exact linear step is fine, but the
/// mesh no longer resolves the fastest phase.
bool phase_resolution_warning(const Grid& grid, double dt);

/// Strang step: half nonlinear step of i u_t = F(u) (classical RK4 on the
/// dealiased right-hand side), exact linear step, half nonlinear step.
/// `u` is mean-free; `mean` carries the zero mode. Negative dt runs backward.
/// Throws BlowupGuard when ||u + mean||_inf exceeds `amplitude_guard`.
std::pair<SpectralField, ZeroModeState> step_strang(const SpectralField& u, ZeroModeState mean,
                                                    double dt, double amplitude_guard = 1.0);

struct ObserverRecord {
  double t = 0.0;
  double sup_norm = 0.0;
  double v_norm = 0.0;              ///< ||V^{-1} u||_{H^{sigma,s}}
  std::optional<double> identity;   ///< w-identity residual when requested
  std::optional<double> cauchy;     ///< filled by scatter_forward at samples
};

struct Trajectory {
  std::vector<double> times;              ///< observed times
  std::vector<SpectralField> states;      ///< mean-free u at observed times
  std::vector<ZeroModeState> means;
  std::vector<ObserverRecord> records;
  bool smallness_breached = false;
  std::vector<std::string> warnings;
};

using Observer = std::function<void(double t, const SpectralField& u, ZeroModeState mean)>;

/// Uniform-mesh integration to cfg.T. Records (and states, when kept) are
/// taken at the observer cadence; `observer` itself runs after every step.
/// Throws SmallnessViolated when the initial datum exceeds epsilon_max,
/// BlowupGuard from the stepper.
Trajectory evolve(const SpectralField& u0, const SolveConfig& cfg, const Observer& observer = {},
                  bool keep_states = true);

struct ScatterDiagnostics {
  std::vector<double> times;          ///< T0 * 2^k
  std::vector<SpectralField> v_states;  ///< e^{iHt_k} v(t_k)
  std::vector<SpectralField> z_states;  ///< e^{iHt_k} M v(t_k)
  std::vector<double> v_cauchy;       ///< ||s_{k+1} - s_k||
  std::vector<double> z_cauchy;
  std::vector<double> correction;     ///< ||M v(t_k) - v(t_k)||
  std::vector<double> profile;        ///< ||v(t_k) - e^{-iHt_k} v_plus||
  SpectralField v_plus;               ///< v-frame candidate
  SpectralField z_plus;               ///< z-frame candidate
  Trajectory trajectory;              ///< observer records only
};

/// Recurrence guard on the torus: horizon <= margin * L / (2 sqrt 2).
void check_recurrence(const Grid& grid, double horizon, double margin);

/// Forward run sampled at T0 * 2^k <= cfg.T. The zero mode is excluded from
/// every diagnostic.
ScatterDiagnostics scatter_forward(const SpectralField& u0, const SolveConfig& cfg, double T0 = 1.0);

struct WaveOperatorReport {
  int iterations = 0;
  double difference = 0.0;  ///< last sup_t ||I_new - I_old||_{H^{sigma,s}}
  std::optional<double> truncation_change;  ///< ||u0(2T) - u0(T)|| when checked
  bool truncation_dominant = false;
};

/**
 * Final-state problem on [0, T]: e^{iHt} z(t) = v_plus - I(t) with
 * I(t) = int_t^T e^{iHs} Zf(s) ds, Zf the z-equation forcing at
 * u(s) = V M^{-1} z(s). Picard iteration from I = 0, each sweep running
 * backward in time and overwriting I in place (trapezoid on the dt mesh).
 * Returns u(0) = V M^{-1} z(0). Throws SmallnessViolated on non-contraction.
 */
std::pair<SpectralField, WaveOperatorReport> wave_operator_approx(const SpectralField& v_plus,
                                                                  double T, const SolveConfig& cfg,
                                                                  double tol, int max_iter = 30,
                                                                  bool check_truncation = false);

struct BilipschitzStats {
  std::vector<double> ratios;
  double min = 0.0;
  double max = 0.0;
  int skipped = 0;  ///< identical pairs
};

BilipschitzStats bilipschitz_probe(const std::vector<std::pair<SpectralField, SpectralField>>& pairs,
                                   const SolveConfig& cfg, double T0 = 1.0);

// ---------------------------------------------------------------------------
// Initial data.

struct DataSpec {
  std::string profile = "gaussian";  ///< "gaussian" or "random-window"
  double amplitude = 0.01;           ///< target ||V^{-1} u0||_{H^{sigma,s}}
  std::uint64_t seed = 1;
  double width = 4.0;                ///< Gaussian width in length units
  double sigma = 0.0;
  double s = -1.0;                   ///< negative: d/2 - 1
};

/// Localized, mean-free, band-limited datum (order-3 dealiasing mask),
/// scaled to the requested amplitude. Zero amplitude gives the zero field.
SpectralField make_initial_data(const Grid& grid, const DataSpec& spec);

}  // namespace gpscat
