#include "gpscat/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "gpscat/errors.hpp"

namespace gpscat {

namespace {

bool accepted_size(int n) {
  if (n < 8 || n % 2 != 0) return false;
  const auto un = static_cast<unsigned>(n);
  if (std::has_single_bit(un)) return true;
  return n % 3 == 0 && std::has_single_bit(static_cast<unsigned>(n / 3));
}

void require_same_layout(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
  if (a.representation() != b.representation())
    throw RepresentationMismatch("fields are in different representations");
}

}  // namespace

std::string to_string(Frame frame) {
  switch (frame) {
    case Frame::u: return "u";
    case Frame::v: return "v";
    case Frame::w: return "w";
    case Frame::z: return "z";
  }
  return "?";
}

Grid::Grid(int dim, int points, double length) : dim_(dim), points_(points), length_(length) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("grid dimension must be in 1..4");
  if (!accepted_size(points))
    throw InvalidArgument("points per axis must be even, >= 8, and 2^a or 3*2^a; got " +
                          std::to_string(points));
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidArgument("box length must be positive");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points);

  auto abs_xi = std::make_shared<std::vector<double>>(size_);
  for (std::size_t f = 0; f < size_; ++f) (*abs_xi)[f] = wavevector(f).abs;
  abs_xi_ = std::move(abs_xi);

  auto negation = std::make_shared<std::vector<std::size_t>>(size_);
  for (std::size_t f = 0; f < size_; ++f) {
    auto idx = lattice_index(f);
    for (int a = 0; a < dim; ++a) idx[a] = (points - idx[a]) % points;
    (*negation)[f] = flat_index(std::span<const int>(idx.data(), dim));
  }
  negation_ = std::move(negation);
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }
double Grid::volume() const { return std::pow(length_, dim_); }
double Grid::frequency_step() const { return 2.0 * std::numbers::pi / length_; }
double Grid::max_frequency() const {
  return std::numbers::pi * points_ * std::sqrt(static_cast<double>(dim_)) / length_;
}

std::array<int, kMaxDim> Grid::lattice_index(std::size_t flat) const {
  std::array<int, kMaxDim> idx{};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  return idx;
}

std::array<int, kMaxDim> Grid::wavenumbers(std::size_t flat) const {
  auto idx = lattice_index(flat);
  for (int a = 0; a < dim_; ++a) idx[a] = wavenumber(idx[a]);
  return idx;
}

std::size_t Grid::flat_index(std::span<const int> lattice) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    const int i = ((lattice[a] % points_) + points_) % points_;
    flat = flat * points_ + static_cast<std::size_t>(i);
  }
  return flat;
}

Wavevector Grid::wavevector(std::size_t flat) const {
  Wavevector w;
  const auto k = wavenumbers(flat);
  const double step = frequency_step();
  double sum = 0.0;
  for (int a = 0; a < dim_; ++a) {
    w.xi[a] = step * k[a];
    sum += w.xi[a] * w.xi[a];
  }
  w.abs = std::sqrt(sum);
  return w;
}

Grid make_grid(int dim, int points, double length) { return Grid(dim, points, length); }

SpectralField::SpectralField(Grid grid, std::vector<Complex> values, Frame frame,
                             Representation rep)
    : grid_(std::move(grid)), values_(std::move(values)), frame_(frame), rep_(rep) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field size does not match the grid");
}

SpectralField SpectralField::zeros(const Grid& grid, Frame frame, Representation rep) {
  return SpectralField(grid, std::vector<Complex>(grid.size()), frame, rep);
}

SpectralField SpectralField::with_frame(Frame frame) const {
  return SpectralField(grid_, values_, frame, rep_);
}

SpectralField transform(const SpectralField& field, Direction direction) {
  const Grid& g = field.grid();
  std::vector<Complex> out(g.size());
  if (direction == Direction::forward) {
    if (field.representation() != Representation::physical)
      throw RepresentationMismatch("forward transform needs a physical-space field");
    detail::fft_nd(g.dim(), g.points(), -1, field.values(), out);
    const double scale = 1.0 / static_cast<double>(g.size());
    for (auto& c : out) c *= scale;
    return SpectralField(g, std::move(out), field.frame(), Representation::frequency);
  }
  if (field.representation() != Representation::frequency)
    throw RepresentationMismatch("inverse transform needs a frequency-space field");
  detail::fft_nd(g.dim(), g.points(), +1, field.values(), out);
  return SpectralField(g, std::move(out), field.frame(), Representation::physical);
}

SpectralField to_frequency(const SpectralField& field) {
  return field.is_frequency() ? field : transform(field, Direction::forward);
}

SpectralField to_physical(const SpectralField& field) {
  return field.is_frequency() ? transform(field, Direction::inverse) : field;
}

SpectralField random_field(const Grid& grid, const Profile& profile, std::uint64_t seed,
                           Frame frame) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> c(grid.size());
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const double re = normal(rng);
    const double im = normal(rng);
    const double scale = profile(grid.wavevector(f));
    c[f] = scale == 0.0 ? Complex{} : scale * inv_sqrt2 * Complex(re, im);
  }
  return SpectralField(grid, std::move(c), frame, Representation::frequency);
}

SpectralField random_real_field(const Grid& grid, const Profile& profile, std::uint64_t seed,
                                Frame frame) {
  return real_part(random_field(grid, profile, seed, frame));
}

SpectralField sample_field(const Grid& grid,
                           const std::function<Complex(std::span<const double>)>& fn,
                           Frame frame) {
  std::vector<Complex> values(grid.size());
  std::array<double, kMaxDim> x{};
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto idx = grid.lattice_index(f);
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(idx[a]);
    values[f] = fn(std::span<const double>(x.data(), grid.dim()));
  }
  return SpectralField(grid, std::move(values), frame, Representation::physical);
}

bool dealias_keeps(const Grid& grid, std::size_t flat, int order) {
  const auto k = grid.wavenumbers(flat);
  for (int a = 0; a < grid.dim(); ++a) {
    if ((order + 1) * std::abs(k[a]) >= grid.points()) return false;
  }
  return true;
}

SpectralField dealias(const SpectralField& field, int order) {
  if (order < 1) throw InvalidArgument("dealias order must be >= 1");
  auto c = to_frequency(field).copy_values();
  const Grid& g = field.grid();
  const int limit = g.points();
  // Per-axis test on the storage index avoids recomputing wavevectors.
  std::vector<char> keep_axis(static_cast<std::size_t>(limit));
  for (int i = 0; i < limit; ++i) keep_axis[i] = (order + 1) * std::abs(g.wavenumber(i)) < limit;
  for (std::size_t f = 0; f < c.size(); ++f) {
    std::size_t rest = f;
    bool keep = true;
    for (int a = 0; a < g.dim() && keep; ++a) {
      keep = keep_axis[rest % limit] != 0;
      rest /= limit;
    }
    if (!keep) c[f] = Complex{};
  }
  return SpectralField(g, std::move(c), field.frame(), Representation::frequency);
}

SpectralField real_part(const SpectralField& field) {
  const Grid& g = field.grid();
  if (!field.is_frequency()) {
    auto v = field.copy_values();
    for (auto& x : v) x = Complex(x.real(), 0.0);
    return SpectralField(g, std::move(v), field.frame(), Representation::physical);
  }
  std::vector<Complex> out(g.size());
  const auto c = field.values();
  for (std::size_t f = 0; f < g.size(); ++f) out[f] = 0.5 * (c[f] + std::conj(c[g.negated(f)]));
  return SpectralField(g, std::move(out), field.frame(), Representation::frequency);
}

SpectralField imag_part(const SpectralField& field) {
  const Grid& g = field.grid();
  if (!field.is_frequency()) {
    auto v = field.copy_values();
    for (auto& x : v) x = Complex(x.imag(), 0.0);
    return SpectralField(g, std::move(v), field.frame(), Representation::physical);
  }
  std::vector<Complex> out(g.size());
  const auto c = field.values();
  const Complex minus_half_i(0.0, -0.5);
  for (std::size_t f = 0; f < g.size(); ++f)
    out[f] = minus_half_i * (c[f] - std::conj(c[g.negated(f)]));
  return SpectralField(g, std::move(out), field.frame(), Representation::frequency);
}

double l2_norm(const SpectralField& field) {
  double sum = 0.0;
  for (const auto& c : field.values()) sum += std::norm(c);
  const Grid& g = field.grid();
  return std::sqrt(sum * (field.is_frequency() ? g.volume() : g.cell_volume()));
}

Complex mean_value(const SpectralField& field) {
  if (field.is_frequency()) return field[0];
  Complex sum{};
  for (const auto& c : field.values()) sum += c;
  return sum / static_cast<double>(field.size());
}

bool has_nonzero_mean(const SpectralField& field) {
  const auto freq = to_frequency(field);
  double total = 0.0;
  for (const auto& c : freq.values()) total += std::norm(c);
  return std::abs(freq[0]) > 1e-13 * std::sqrt(total) + 1e-300;
}

SpectralField without_mean(const SpectralField& field) {
  auto c = to_frequency(field).copy_values();
  c[0] = Complex{};
  return SpectralField(field.grid(), std::move(c), field.frame(), Representation::frequency);
}

double max_abs_difference(const SpectralField& a, const SpectralField& b) {
  const auto fa = to_frequency(a);
  const auto fb = to_frequency(b);
  if (!(fa.grid() == fb.grid())) throw InvalidArgument("fields live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) m = std::max(m, std::abs(fa[i] - fb[i]));
  return m;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_layout(a, b);
  auto v = a.copy_values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
  return SpectralField(a.grid(), std::move(v), a.frame(), a.representation());
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_layout(a, b);
  auto v = a.copy_values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b[i];
  return SpectralField(a.grid(), std::move(v), a.frame(), a.representation());
}

SpectralField operator*(Complex scale, const SpectralField& a) {
  auto v = a.copy_values();
  for (auto& x : v) x *= scale;
  return SpectralField(a.grid(), std::move(v), a.frame(), a.representation());
}

// ---------------------------------------------------------------------------
// Snapshot format

namespace {

constexpr char kMagic[4] = {'G', 'P', 'S', 'F'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw ConfigError("snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, const SpectralField& field) {
  const Grid& g = field.grid();
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<double>(out, static_cast<double>(g.dim()));
  put_le<double>(out, static_cast<double>(g.points()));
  put_le<double>(out, g.length());
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(field.frame()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(field.representation()));
  for (const auto& c : field.values()) {
    put_le<double>(out, c.real());
    put_le<double>(out, c.imag());
  }
}

SpectralField read_snapshot(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError("not a GPSF snapshot");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kSnapshotVersion)
    throw ConfigError("unsupported snapshot version " + std::to_string(version));
  const double d = get_le<double>(in);
  const double n = get_le<double>(in);
  const double length = get_le<double>(in);
  const auto frame = get_le<std::uint8_t>(in);
  const auto rep = get_le<std::uint8_t>(in);
  if (d != std::floor(d) || n != std::floor(n)) throw ConfigError("snapshot header corrupt");
  if (frame > 3 || rep > 1) throw ConfigError("snapshot tag bytes out of range");
  Grid grid(static_cast<int>(d), static_cast<int>(n), length);
  std::vector<Complex> values(grid.size());
  for (auto& c : values) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    c = Complex(re, im);
  }
  return SpectralField(grid, std::move(values), static_cast<Frame>(frame),
                       static_cast<Representation>(rep));
}

void write_snapshot_file(const std::string& path, const SpectralField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  write_snapshot(out, field);
}

SpectralField read_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return read_snapshot(in);
}

}  // namespace gpscat
