#include "gpscat/multipliers.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <tuple>

#include "gpscat/errors.hpp"

namespace gpscat {

double chi_transition(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double cutoff_chi(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - chi_transition(r - 1.0);
}

DispersionValues dispersion_values(double r) {
  const double q = 2.0 + r * r;
  const double root = std::sqrt(q);
  return {r * root, (2.0 + 2.0 * r * r) / root, r * (6.0 + 2.0 * r * r) / (q * root)};
}

double dispersion_phi(double r) { return r * std::sqrt(2.0 + r * r); }
double dispersion_dphi(double r) { return dispersion_values(r).dphi; }
double dispersion_d2phi(double r) { return dispersion_values(r).d2phi; }
double symbol_H(double r) { return dispersion_phi(r); }
double symbol_U(double r) { return r / std::sqrt(2.0 + r * r); }

namespace multiplier {

namespace {

std::string format_param(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

MultiplierSpec identity() {
  return {"identity", [](const Wavevector&) { return Complex(1.0); },
          ZeroModePolicy::fixed(1.0)};
}

MultiplierSpec radial(std::string name, std::function<double(double)> symbol) {
  const double at_zero = symbol(0.0);
  return {std::move(name),
          [symbol = std::move(symbol)](const Wavevector& w) { return Complex(symbol(w.abs)); },
          ZeroModePolicy::fixed(at_zero)};
}

MultiplierSpec laplacian() {
  return radial("laplacian", [](double r) { return -r * r; });
}

MultiplierSpec derivative(int axis) {
  if (axis < 0 || axis >= kMaxDim) throw InvalidArgument("derivative axis out of range");
  return {"d/dx" + std::to_string(axis),
          [axis](const Wavevector& w) { return Complex(0.0, w.xi[axis]); },
          ZeroModePolicy::fixed(0.0)};
}

MultiplierSpec H() { return radial("H", symbol_H); }

MultiplierSpec U_power(double power) {
  if (power == 0.0) return identity();
  MultiplierSpec spec{"U^" + format_param(power),
                      [power](const Wavevector& w) { return Complex(std::pow(symbol_U(w.abs), power)); },
                      ZeroModePolicy::fixed(0.0)};
  if (power < 0.0) {
    spec.zero_mode = ZeroModePolicy::project_out();
    spec.singular_at_zero = true;
  }
  return spec;
}

MultiplierSpec U() { return radial("U", symbol_U); }

MultiplierSpec U_inverse() {
  MultiplierSpec spec{"U^-1",
                      [](const Wavevector& w) { return Complex(1.0 / symbol_U(w.abs)); },
                      ZeroModePolicy::project_out()};
  spec.singular_at_zero = true;
  return spec;
}

MultiplierSpec P() { return radial("P", cutoff_chi); }
MultiplierSpec Q() { return radial("Q", [](double r) { return 1.0 - cutoff_chi(r); }); }
MultiplierSpec P_minus2() { return radial("P-2", [](double r) { return cutoff_chi(4.0 * r); }); }
MultiplierSpec Q_minus2() {
  return radial("Q-2", [](double r) { return 1.0 - cutoff_chi(4.0 * r); });
}

MultiplierSpec grad_P(int axis) {
  if (axis < 0 || axis >= kMaxDim) throw InvalidArgument("gradient axis out of range");
  return {"gradP" + std::to_string(axis),
          [axis](const Wavevector& w) { return Complex(0.0, w.xi[axis] * cutoff_chi(w.abs)); },
          ZeroModePolicy::fixed(0.0)};
}

MultiplierSpec P_laplacian() {
  return radial("P-laplacian", [](double r) { return -r * r * cutoff_chi(r); });
}

MultiplierSpec propagator(double t) {
  // Unnamed: one table per time would only grow the cache.
  return {"",
          [t](const Wavevector& w) { return std::polar(1.0, -t * dispersion_phi(w.abs)); },
          ZeroModePolicy::fixed(1.0)};
}

}  // namespace multiplier

namespace {

using CacheKey = std::tuple<std::string, int, int, double, int, double, double>;

class SymbolCache {
 public:
  static SymbolCache& instance() {
    static SymbolCache cache;
    return cache;
  }

  std::shared_ptr<const std::vector<Complex>> find(const CacheKey& key) {
    std::lock_guard lock(mutex_);
    auto it = tables_.find(key);
    return it == tables_.end() ? nullptr : it->second;
  }

  void store(const CacheKey& key, std::shared_ptr<const std::vector<Complex>> table) {
    std::lock_guard lock(mutex_);
    if (tables_.size() >= kCapacity) tables_.clear();
    tables_.emplace(key, std::move(table));
  }

 private:
  static constexpr std::size_t kCapacity = 512;
  std::mutex mutex_;
  std::map<CacheKey, std::shared_ptr<const std::vector<Complex>>> tables_;
};

Complex zero_mode_entry(const ZeroModePolicy& policy) {
  return policy.kind == ZeroModeKind::value ? policy.value : Complex{};
}

}  // namespace

std::shared_ptr<const std::vector<Complex>> symbol_table(const MultiplierSpec& spec,
                                                         const Grid& grid) {
  const CacheKey key{spec.name,
                     grid.dim(),
                     grid.points(),
                     grid.length(),
                     static_cast<int>(spec.zero_mode.kind),
                     spec.zero_mode.value.real(),
                     spec.zero_mode.value.imag()};
  if (!spec.name.empty()) {
    if (auto hit = SymbolCache::instance().find(key)) return hit;
  }
  auto table = std::make_shared<std::vector<Complex>>(grid.size());
  (*table)[0] = zero_mode_entry(spec.zero_mode);
  for (std::size_t f = 1; f < grid.size(); ++f) (*table)[f] = spec.symbol(grid.wavevector(f));
  std::shared_ptr<const std::vector<Complex>> result = std::move(table);
  if (!spec.name.empty()) SymbolCache::instance().store(key, result);
  return result;
}

SpectralField apply_multiplier(const MultiplierSpec& spec, const SpectralField& field) {
  const auto freq = to_frequency(field);
  if (spec.zero_mode.kind == ZeroModeKind::reject && spec.singular_at_zero &&
      has_nonzero_mean(freq)) {
    throw SingularZeroMode("multiplier '" + spec.name +
                           "' is singular at the origin and the field has a nonzero mean");
  }
  const auto table = symbol_table(spec, field.grid());
  auto c = freq.copy_values();
  for (std::size_t f = 0; f < c.size(); ++f) c[f] *= (*table)[f];
  if (spec.zero_mode.kind == ZeroModeKind::reject && !spec.singular_at_zero)
    c[0] = freq[0] * spec.symbol(Wavevector{});
  return SpectralField(field.grid(), std::move(c), field.frame(), Representation::frequency);
}

SpectralField apply_V(const SpectralField& field, Direction direction, ZeroModePolicy policy) {
  const auto freq = to_frequency(field);
  const auto re = real_part(freq);
  const auto im = imag_part(freq);
  const Complex i(0.0, 1.0);
  if (direction == Direction::forward) {
    const auto out = apply_multiplier(multiplier::U(), re) + i * im;
    return out.with_frame(Frame::u);
  }
  const auto out = apply_multiplier(multiplier::U_inverse().with_policy(policy), re) + i * im;
  return out.with_frame(Frame::v);
}

ZeroModeState zero_mode_evolve(ZeroModeState state, double t) {
  return {state.m1, state.m2 - 2.0 * t * state.m1};
}

std::pair<SpectralField, ZeroModeState> split_mean(const SpectralField& field) {
  const Complex mean = mean_value(field);
  return {without_mean(field), ZeroModeState{mean.real(), mean.imag()}};
}

SpectralField with_mean(const SpectralField& field, ZeroModeState mean) {
  auto c = to_frequency(field).copy_values();
  c[0] = Complex(mean.m1, mean.m2);
  return SpectralField(field.grid(), std::move(c), field.frame(), Representation::frequency);
}

}  // namespace gpscat
