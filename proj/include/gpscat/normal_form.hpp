#pragma once

#include <functional>
#include <utility>

#include "gpscat/grid.hpp"
#include "gpscat/multipliers.hpp"

namespace gpscat {

/// Dealiased pointwise product a * b (physical space), masked for products
/// of `order` factors on input and output.
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b, int order = 2);

/// F(u) = (u + 2 conj(u) + |u|^2) u. Quadratic part masked at order 2, cubic
/// part at order 3.
SpectralField nonlinearity_F(const SpectralField& u);

struct NonlinearTerms {
  SpectralField G1;
  SpectralField G2;
};

/// G1 = (3 - P) u1^2 + Q u2^2 + P Delta |u|^2 / 2 + |u|^2 u1,
/// G2 = 2 Q(u1 u2) + grad P . (u2 grad u1 - u1 grad u2) + Q(|u|^2 u2),
/// with u = u1 + i u2 in physical space.
NonlinearTerms compute_G(const SpectralField& u);

/// (Q(u2 Q_{-2} u2), Q(Q_{-2} u2 P_{-2} u2)); the pair sums to Q(u2^2).
std::pair<SpectralField, SpectralField> q_split(const SpectralField& u2);

/// w = u + P|u|^2 / 2, tagged w.
SpectralField to_normal_form(const SpectralField& u);

/// z = v + U^{-1} P |Vv|^2 / 2, tagged z. The mean of |Vv|^2 is projected
/// out before U^{-1}.
SpectralField apply_M(const SpectralField& v);

/// Default weighted-Sobolev pair (sigma, s) = (0, d/2 - 1).
std::pair<double, double> default_norm_exponents(int dim);

struct FixedPointOptions {
  double tol = 1e-12;
  int max_iter = 200;
  double sigma = 0.0;
  double s = -1.0;      ///< negative: use d/2 - 1
  double delta = 0.1;   ///< smallness threshold on ||z||_{H^{sigma,s}}
};

struct FixedPointReport {
  int iterations = 0;
  double residual = 0.0;           ///< last ||v_{k+1} - v_k||_{H^{sigma,s}}
  double contraction_ratio = 0.0;  ///< last residual ratio
};

/// M^{-1} z by plain iteration v_{k+1} = z - U^{-1} P |V v_k|^2 / 2, v_0 = z.
/// Throws SmallnessViolated when ||z|| exceeds `delta`, when the residual
/// ratio stays >= 1 for 3 consecutive iterations, or when max_iter runs out.
std::pair<SpectralField, FixedPointReport> invert_M(const SpectralField& z,
                                                    const FixedPointOptions& options = {});

/// u_t from the equation: -i(-Delta u + 2 Re u + F(u)).
SpectralField u_time_derivative(const SpectralField& u);

/// Relative L^2 residual of i w_t - (-Delta w + 2 Re w + G1 + i G2) with
/// w_t = u_t + P Re(conj(u) u_t). Zero mode excluded. The field's own mean
/// is replaced by `mean` first.
double w_identity_residual(const SpectralField& u, ZeroModeState mean);

/// Forcing of the v equation: v_t = -iHv + v_forcing, v_forcing = -V^{-1}(i F(u)).
SpectralField v_forcing(const SpectralField& u);
/// Forcing of the z equation: z_t = -iHz + z_forcing, z_forcing = -(i G1 - U^{-1} G2).
SpectralField z_forcing(const SpectralField& u);

// ---------------------------------------------------------------------------
// Radial fields in three dimensions, carried as F(x) = x f(|x|) on a 1D
// periodic grid. Radial multipliers act on F as the same 1D multipliers,
// and ||f||_{L^2(R^3)} = sqrt(2 pi) ||F||_{L^2(one period)}.

namespace radial3 {

/// F with 1D coefficients (xi / i) psi(|xi|) * amplitude, i.e. a 3D radial
/// field whose transform is proportional to psi.
SpectralField encode(const Grid& line, const std::function<double(double)>& psi, Complex amplitude);

/// Encoding of |f|^2: |F(x)|^2 / x, 0 at x = 0, dealiased.
SpectralField square_modulus(const SpectralField& F);

/// The 3D H^{sigma,s} norm of the encoded field.
double sobolev_norm(const SpectralField& F, double sigma, double s);

/// M acting on an encoded 3D radial field.
SpectralField apply_M(const SpectralField& F);

}  // namespace radial3

}  // namespace gpscat
