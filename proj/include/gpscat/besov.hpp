#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gpscat/grid.hpp"

namespace gpscat {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/**
 * Parameters of the two-tier norm B^{a,b}_q: regularity a on the low side
 * (P = chi(|xi|)), b on the high side (Q = 1 - P), L^q integrability and
 * l^2 summation over dyadic blocks. H^{sigma,s} is B^{sigma,s}_2.
 */
struct NormSpec {
  double a = 0.0;
  double b = 0.0;
  double q = 2.0;

  static NormSpec besov(double a, double b, double q) { return {a, b, q}; }
  static NormSpec sobolev(double sigma, double s) { return {sigma, s, 2.0}; }

  /// q in [1, inf]; a < d/q whenever a > 0. Throws InvalidArgument.
  void validate(int dim) const;
  std::string describe() const;
};

/// Dyadic window phi_j(r) = chi(r / 2^j) - chi(r / 2^{j-1}).
double dyadic_window(int j, double r);

struct DyadicRange {
  int j_min;
  int j_max;
};

/// j_min = floor(log2(2 pi / L)) - 1, j_max = ceil(log2(pi N / L)) + 1.
DyadicRange dyadic_range(const Grid& grid);

/// Weight of block j inside `range`. The extreme blocks absorb the tails:
/// block j_min is chi(r / 2^{j_min}) (it holds the zero mode) and block
/// j_max is 1 - chi(r / 2^{j_max - 1}). The weights sum to 1 exactly.
double block_weight(const DyadicRange& range, int j, double r);

struct DyadicBlock {
  int j;
  SpectralField field;
};

struct DyadicDecomposition {
  DyadicRange range;
  std::vector<DyadicBlock> blocks;  ///< one per j in [j_min, j_max], in order

  SpectralField reconstruct() const;
};

/// Littlewood-Paley blocks of `field` (frequency representation).
DyadicDecomposition decompose(const SpectralField& field);

/// (cell_volume * sum |f|^q)^{1/q}, or the max for q = inf.
double lq_norm(const SpectralField& field, double q);

/// (sum_j 2^{2ja} ||f_j||_q^2)^{1/2} over all blocks of the grid.
double homogeneous_besov_norm(const SpectralField& field, double a, double q);

/// ||P f||_{B^a_q} + ||Q f||_{B^b_q}. L^q norms by lattice quadrature;
/// q = 2 uses discrete Parseval, which is the same number up to roundoff.
/// Throws SingularZeroMode when a < 0 and the field has a mean.
double besov_norm(const SpectralField& field, const NormSpec& spec);

/// H^{sigma,s} norm through the dyadic blocks, evaluated in frequency space.
double sobolev_weighted_norm(const SpectralField& field, double sigma, double s);

/// Direct weights: ||P |xi|^sigma f||_2 + ||Q |xi|^s f||_2. Equivalent to the
/// dyadic route up to the overlap constants of chi, not equal to it.
double sobolev_direct_norm(const SpectralField& field, double sigma, double s);

/// (integral over the mesh of ||f(t)||^p dt)^{1/p} by the trapezoid rule,
/// or the max over samples for p = inf. Samples are on a uniform mesh `dt`.
double spacetime_norm(const std::vector<SpectralField>& samples, double dt, double p,
                      const NormSpec& spatial);
/// Same with precomputed spatial norms.
double spacetime_norm(const std::vector<double>& spatial_norms, double dt, double p);

}  // namespace gpscat
