#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "gpscat/grid.hpp"

namespace gpscat {

using Rational = boost::rational<long long>;

double to_double(const Rational& r);
std::string to_string(const Rational& r);
/// Best rational approximation with denominator <= max_den (continued fractions).
Rational to_rational(double x, long long max_den = 100000);

/// Exponents of the scattering theorem in dimension d >= 4:
/// s = d/2 - 1, b = 1/p = 1/2 - 1/d, 1/p' = 1 - b, 1/q = 1/2 - 1/(2d),
/// sigma_max = (d - 3)/2 - 1/d.
struct TheoremParameters {
  int d = 4;
  Rational s;
  Rational b;
  Rational p;
  Rational p_dual;
  Rational q_inv;
  Rational q;
  Rational sigma_max;
};

/// Throws InvalidArgument for d < 4.
TheoremParameters theorem_parameters(int d);

/// One factor of a trilinear form: the space B^{s,t}_p with b = 1/p.
struct Slot {
  Rational b;  ///< 1/p, in [0, 1/2]
  Rational s;  ///< low-frequency regularity
  Rational t;  ///< high-frequency regularity

  /// The dual space B^{-s,-t}_{p'}.
  Slot dual() const { return {Rational(1) - b, -s, -t}; }
  /// p as a double (inf for b = 0).
  double p() const;
};

struct Inequality {
  std::string name;
  Rational lhs;
  Rational rhs;
  bool strict = false;

  Rational slack() const { return rhs - lhs; }
  bool holds() const { return strict ? lhs < rhs : lhs <= rhs; }
};

struct EstimateCase {
  int d = 4;
  std::string label;
  std::array<Slot, 3> slots;
};

struct ConditionReport {
  std::vector<Inequality> inequalities;
  bool valid = false;
  Rational min_slack;
};

/**
 * Conditions under which |int f g h| <= C ||f|| ||g|| ||h|| on R^d with the
 * three slot norms, for every slot a:
 *   max(0, s_a, sum s) <= d(sum b - 1) <= sum t,   t_a <= sum t,
 *   s_a < d b_a,   b_a in [0, 1/2].
 * Each inequality is reported with its exact slack.
 */
ConditionReport check_conditions(const EstimateCase& c);

/// Product embedding X x Y into Z as the trilinear case (X, Y, Z').
EstimateCase embedding_case(int d, std::string label, const Slot& x, const Slot& y, const Slot& z);

/**
 * The five bilinear embeddings used for the quadratic and cubic terms, at
 * regularity shift sigma. j, k in {0, 1} with j + k <= 1 only enter case 1:
 *   1. H^{sigma-b,s-j} x B^{sigma-b,s-k}_p   into B^{sigma+b,s-j-k}_{p'}
 *   2. H^{sigma,s}     x B^{sigma-b,s-1}_p   into H^{sigma-b,s-1}
 *   3. B^{sigma-b/2,s}_q x B^{sigma-b/2,s}_q into H^{sigma,s}
 *   4. H^{sigma,s}     x H^{sigma,s}         into B^{sigma,s}_{p'}
 *   5. H^{sigma,s}     x B^{sigma-b/2,s}_q   into H^{sigma-1,s-1/2}
 */
std::vector<EstimateCase> builtin_cases(int d, const Rational& sigma, int j = 0, int k = 0);

/// The hand-simplified verification line of each builtin case, written out
/// inequality by inequality. Case 1 carries the proviso |sigma| - b <= d/2 - 2.
struct VerificationLine {
  int index = 0;
  std::vector<Inequality> inequalities;
  bool holds() const;
};
std::vector<VerificationLine> verification_lines(int d, const Rational& sigma, int j = 0, int k = 0);

/// First sigma on the mesh start, start + step, ... (< stop) where builtin
/// case `index` (1-based) fails; nullopt when it holds throughout.
std::optional<Rational> first_invalid_sigma(int d, int index, const Rational& start,
                                            const Rational& step, const Rational& stop);

// ---------------------------------------------------------------------------
// Empirical ratios on the lattice.

/// |sum f g h| * cell_volume / (||f|| ||g|| ||h||) with the slot norms of
/// `c`. Real physical fields; 0 when a norm vanishes.
double trilinear_ratio(const SpectralField& f, const SpectralField& g, const SpectralField& h,
                       const EstimateCase& c);

struct TrilinearSuiteOptions {
  int d = 4;
  int points = 16;
  double length = 0.0;  ///< 0: 32 pi
  Rational sigma{0};
  int trials = 200;
  std::uint64_t seed = 1;
};

struct TrilinearSuiteResult {
  std::vector<std::string> labels;
  std::vector<double> max_narrow;  ///< max ratio, fields spread over 2 dyadic scales
  std::vector<double> max_wide;    ///< same over 4 scales
  std::vector<double> growth;      ///< max_wide / max_narrow
};

/// Seeded random real fields, band-limited so triple products are exact on
/// the lattice, with Fourier support on a controlled number of dyadic
/// scales below |xi| = 1.
TrilinearSuiteResult trilinear_suite(const TrilinearSuiteOptions& options);

struct RatioTrend {
  std::string name;
  double max_short = 0.0;  ///< over the horizon T
  double max_long = 0.0;   ///< over 2T
  double trend() const { return max_short > 0.0 ? max_long / max_short : 0.0; }
};

struct RatioSuiteOptions {
  int points = 16;
  double length = 0.0;  ///< 0: 32 pi
  double T = 8.0;
  double dt = 1.0;
  int spread = 3;       ///< dyadic scales in the initial profile
};

/**
 * Ratios of the space-time estimates on free trajectories u(t) = e^{-iHt} phi:
 *   ||u1 u||_{L^2 B^{sigma+b,s}_{p'}} / (||u1||_{L^inf H^{sigma-b,s}} ||u||_{L^2 B^{sigma-b,s}_p}),
 *   ||P(u grad u)||_{L^2 B^{sigma+b,s}_{p'}} / ||u||_{X_0}^2,
 *   ||u^3||_{L^2 B^{sigma,s}_{p'}} / ||u||_{X_0}^3,
 * with u1 = Re u, X_0 = L^inf H^{sigma,s} cap L^2 B^{sigma-b,s}_p.
 * Throws InvalidArgument for trials < 10.
 */
std::vector<RatioTrend> quadratic_cubic_ratio_suite(int d, double sigma, int trials, std::uint64_t seed,
                                                    const RatioSuiteOptions& options = {});

/// Same ratios for one trajectory, sampled on [0, T] with step dt.
std::vector<double> quadratic_cubic_ratios(const SpectralField& phi, double sigma, double T, double dt);

}  // namespace gpscat
