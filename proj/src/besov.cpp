#include "gpscat/besov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "gpscat/errors.hpp"
#include "gpscat/multipliers.hpp"

namespace gpscat {

void NormSpec::validate(int dim) const {
  if (!(q >= 1.0)) throw InvalidArgument("norm integrability q must lie in [1, inf]");
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("norm exponents must be finite");
  if (a > 0.0 && !(a < dim / q))
    throw InvalidArgument("low-frequency regularity a must satisfy a < d/q; got " + describe());
}

std::string NormSpec::describe() const {
  std::ostringstream os;
  os << "B^{" << a << "," << b << "}_" << q;
  return os.str();
}

double dyadic_window(int j, double r) {
  return cutoff_chi(std::ldexp(r, -j)) - cutoff_chi(std::ldexp(r, -(j - 1)));
}

DyadicRange dyadic_range(const Grid& grid) {
  const double low = std::floor(std::log2(grid.frequency_step())) - 1.0;
  const double high = std::ceil(std::log2(std::numbers::pi * grid.points() / grid.length())) + 1.0;
  return {static_cast<int>(low), static_cast<int>(high)};
}

double block_weight(const DyadicRange& range, int j, double r) {
  if (j < range.j_min || j > range.j_max) return 0.0;
  if (j == range.j_min) return cutoff_chi(std::ldexp(r, -j));
  if (j == range.j_max) return 1.0 - cutoff_chi(std::ldexp(r, -(j - 1)));
  return dyadic_window(j, r);
}

namespace {

enum class Side { all, low, high };

double side_weight(Side side, double r) {
  switch (side) {
    case Side::all: return 1.0;
    case Side::low: return cutoff_chi(r);
    case Side::high: return 1.0 - cutoff_chi(r);
  }
  return 1.0;
}

/// Frequency coefficients of block j restricted to one side; empty when the
/// block vanishes identically there.
std::vector<Complex> block_coefficients(const SpectralField& freq, const DyadicRange& range,
                                        int j, Side side, bool& nonzero) {
  const auto abs_xi = freq.grid().abs_frequencies();
  std::vector<Complex> c(freq.size());
  nonzero = false;
  for (std::size_t f = 0; f < c.size(); ++f) {
    const double w = block_weight(range, j, abs_xi[f]) * side_weight(side, abs_xi[f]);
    if (w != 0.0) {
      c[f] = w * freq[f];
      nonzero = nonzero || c[f] != Complex{};
    }
  }
  return c;
}

/// sum_j 2^{2ja} (w_j(|xi|) side(|xi|))^2 per frequency: the q = 2 norm is a
/// single weighted Parseval sum.
std::shared_ptr<const std::vector<double>> l2_weights(const Grid& g, double a, Side side) {
  using Key = std::tuple<int, int, double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  const Key key{g.dim(), g.points(), g.length(), a, static_cast<int>(side)};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto range = dyadic_range(g);
  const auto abs_xi = g.abs_frequencies();
  auto table = std::make_shared<std::vector<double>>(g.size());
  for (std::size_t f = 0; f < table->size(); ++f) {
    const double sw = side_weight(side, abs_xi[f]);
    if (sw == 0.0) continue;
    double total = 0.0;
    for (int j = range.j_min; j <= range.j_max; ++j) {
      const double w = block_weight(range, j, abs_xi[f]) * sw;
      if (w != 0.0) total += std::pow(2.0, 2.0 * j * a) * w * w;
    }
    (*table)[f] = total;
  }
  std::lock_guard lock(mutex);
  if (cache.size() >= 64) cache.clear();
  cache.emplace(key, table);
  return table;
}

/// (sum_j 2^{2ja} ||f_j||_q^2)^{1/2} over one side of the cutoff.
double side_norm(const SpectralField& freq, double a, double q, Side side) {
  const Grid& g = freq.grid();
  if (q == 2.0) {
    const auto weights = l2_weights(g, a, side);
    double sum = 0.0;
    for (std::size_t f = 0; f < freq.size(); ++f)
      if ((*weights)[f] != 0.0) sum += (*weights)[f] * std::norm(freq[f]);
    return std::sqrt(sum * g.volume());
  }
  const auto range = dyadic_range(g);
  double total = 0.0;
  for (int j = range.j_min; j <= range.j_max; ++j) {
    bool nonzero = false;
    auto c = block_coefficients(freq, range, j, side, nonzero);
    if (!nonzero) continue;
    SpectralField f(g, std::move(c), freq.frame(), Representation::frequency);
    const double block = lq_norm(to_physical(f), q);
    total += std::pow(2.0, 2.0 * j * a) * block * block;
  }
  return std::sqrt(total);
}

void require_mean_free(const SpectralField& freq, double exponent) {
  if (exponent < 0.0 && has_nonzero_mean(freq))
    throw SingularZeroMode("negative low-frequency regularity needs a mean-free field");
}

}  // namespace

SpectralField DyadicDecomposition::reconstruct() const {
  if (blocks.empty()) throw InvalidArgument("empty decomposition");
  SpectralField sum = blocks.front().field;
  for (std::size_t i = 1; i < blocks.size(); ++i) sum = sum + blocks[i].field;
  return sum;
}

DyadicDecomposition decompose(const SpectralField& field) {
  const auto freq = to_frequency(field);
  DyadicDecomposition out{dyadic_range(freq.grid()), {}};
  for (int j = out.range.j_min; j <= out.range.j_max; ++j) {
    bool nonzero = false;
    auto c = block_coefficients(freq, out.range, j, Side::all, nonzero);
    out.blocks.push_back(
        {j, SpectralField(freq.grid(), std::move(c), freq.frame(), Representation::frequency)});
  }
  return out;
}

double lq_norm(const SpectralField& field, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("L^q needs q >= 1");
  const auto phys = to_physical(field);
  if (std::isinf(q)) {
    double m = 0.0;
    for (const auto& x : phys.values()) m = std::max(m, std::abs(x));
    return m;
  }
  double sum = 0.0;
  for (const auto& x : phys.values()) sum += std::pow(std::abs(x), q);
  return std::pow(sum * phys.grid().cell_volume(), 1.0 / q);
}

double homogeneous_besov_norm(const SpectralField& field, double a, double q) {
  const auto freq = to_frequency(field);
  require_mean_free(freq, a);
  return side_norm(freq, a, q, Side::all);
}

double besov_norm(const SpectralField& field, const NormSpec& spec) {
  spec.validate(field.grid().dim());
  const auto freq = to_frequency(field);
  require_mean_free(freq, spec.a);
  return side_norm(freq, spec.a, spec.q, Side::low) + side_norm(freq, spec.b, spec.q, Side::high);
}

double sobolev_weighted_norm(const SpectralField& field, double sigma, double s) {
  const auto freq = to_frequency(field);
  require_mean_free(freq, sigma);
  return side_norm(freq, sigma, 2.0, Side::low) + side_norm(freq, s, 2.0, Side::high);
}

double sobolev_direct_norm(const SpectralField& field, double sigma, double s) {
  const auto freq = to_frequency(field);
  require_mean_free(freq, sigma);
  const auto abs_xi = freq.grid().abs_frequencies();
  double low = 0.0;
  double high = 0.0;
  for (std::size_t f = 1; f < freq.size(); ++f) {
    const double r = abs_xi[f];
    const double chi = cutoff_chi(r);
    const double mag = std::norm(freq[f]);
    if (chi != 0.0) low += std::pow(r, 2.0 * sigma) * chi * chi * mag;
    if (chi != 1.0) high += std::pow(r, 2.0 * s) * (1.0 - chi) * (1.0 - chi) * mag;
  }
  // The zero mode counts only when sigma = 0, where |xi|^0 = 1.
  if (sigma == 0.0) low += std::norm(freq[0]);
  const double vol = freq.grid().volume();
  return std::sqrt(low * vol) + std::sqrt(high * vol);
}

double spacetime_norm(const std::vector<double>& norms, double dt, double p) {
  if (norms.empty()) throw InvalidArgument("space-time norm needs samples");
  if (std::isinf(p)) return *std::max_element(norms.begin(), norms.end());
  if (norms.size() < 2) throw InvalidArgument("space-time norm needs at least 2 samples");
  if (!(dt > 0.0) || !(p >= 1.0)) throw InvalidArgument("space-time norm needs dt > 0, p >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double w = (i == 0 || i + 1 == norms.size()) ? 0.5 : 1.0;
    sum += w * std::pow(norms[i], p);
  }
  return std::pow(sum * dt, 1.0 / p);
}

double spacetime_norm(const std::vector<SpectralField>& samples, double dt, double p,
                      const NormSpec& spatial) {
  std::vector<double> norms;
  norms.reserve(samples.size());
  for (const auto& s : samples) norms.push_back(besov_norm(s, spatial));
  return spacetime_norm(norms, dt, p);
}

}  // namespace gpscat
