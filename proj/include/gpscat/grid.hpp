#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gpscat {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 4;

/// Role marker carried by a field. It never changes the numbers.
enum class Frame : std::uint8_t { u = 0, v = 1, w = 2, z = 3 };

enum class Representation : std::uint8_t { physical = 0, frequency = 1 };

enum class Direction { forward, inverse };

std::string to_string(Frame frame);

/// A lattice frequency: components xi[0..d) and the magnitude.
struct Wavevector {
  std::array<double, kMaxDim> xi{};
  double abs = 0.0;
};

/**
 * Periodic box [0, L)^d sampled with N points per axis.
 *
 * The frequency lattice is xi_k = 2*pi*k/L with k in {-N/2, ..., N/2-1};
 * values are stored in FFT order (index i carries k = i for i < N/2 and
 * k = i - N otherwise), row-major with axis 0 slowest. The Nyquist row
 * k = -N/2 is its own negation partner.
 *
 * Accepted sizes: N even, N >= 8, and N = 2^a or 3 * 2^a.
 */
class Grid {
 public:
  Grid(int dim, int points, double length);

  int dim() const { return dim_; }
  int points() const { return points_; }
  double length() const { return length_; }
  std::size_t size() const { return size_; }

  double spacing() const { return length_ / points_; }
  double cell_volume() const;
  double volume() const;
  /// Smallest nonzero frequency magnitude 2*pi/L.
  double frequency_step() const;
  /// Largest lattice frequency magnitude pi*N*sqrt(d)/L.
  double max_frequency() const;

  /// Signed wavenumber k for a per-axis storage index.
  int wavenumber(int index) const { return index < points_ / 2 ? index : index - points_; }

  std::array<int, kMaxDim> lattice_index(std::size_t flat) const;
  std::array<int, kMaxDim> wavenumbers(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> lattice) const;
  /// Flat index of the lattice point -k (mod N).
  std::size_t negated(std::size_t flat) const { return (*negation_)[flat]; }
  Wavevector wavevector(std::size_t flat) const;
  /// |xi| for every flat index, shared between copies of the grid.
  std::span<const double> abs_frequencies() const { return *abs_xi_; }
  /// Physical coordinate of lattice point `index` along one axis.
  double coordinate(int index) const { return index * spacing(); }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && points_ == other.points_ && length_ == other.length_;
  }

 private:
  int dim_;
  int points_;
  double length_;
  std::size_t size_;
  std::shared_ptr<const std::vector<double>> abs_xi_;
  std::shared_ptr<const std::vector<std::size_t>> negation_;
};

Grid make_grid(int dim, int points, double length);

/**
 * Complex samples of a field on a Grid, in physical or frequency space.
 *
 * Frequency coefficients are Fourier-series coefficients,
 * c_k = N^{-d} sum_x f(x) e^{-i xi_k . x}, so f(x) = sum_k c_k e^{i xi_k . x}
 * and ||f||_{L^2}^2 = (L/N)^d sum |f(x)|^2 = L^d sum |c_k|^2.
 */
class SpectralField {
 public:
  SpectralField(Grid grid, std::vector<Complex> values, Frame frame, Representation rep);

  static SpectralField zeros(const Grid& grid, Frame frame = Frame::u,
                             Representation rep = Representation::frequency);

  const Grid& grid() const { return grid_; }
  Frame frame() const { return frame_; }
  Representation representation() const { return rep_; }
  bool is_frequency() const { return rep_ == Representation::frequency; }
  std::span<const Complex> values() const { return values_; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  SpectralField with_frame(Frame frame) const;
  /// Copy of the values, for building a modified field.
  std::vector<Complex> copy_values() const { return values_; }

 private:
  Grid grid_;
  std::vector<Complex> values_;
  Frame frame_;
  Representation rep_;
};

/// Discrete Fourier transform. Throws RepresentationMismatch when the field
/// is not in the representation the direction starts from.
SpectralField transform(const SpectralField& field, Direction direction);
/// Converting versions that pass through fields already in the target space.
SpectralField to_frequency(const SpectralField& field);
SpectralField to_physical(const SpectralField& field);

/// Frequency-envelope profile: evaluated at each lattice wavevector.
using Profile = std::function<double(const Wavevector&)>;

/// Independent complex Gaussian coefficients scaled by `profile`.
/// Deterministic for a fixed seed. Returned in frequency representation.
SpectralField random_field(const Grid& grid, const Profile& profile, std::uint64_t seed,
                           Frame frame = Frame::u);
/// Same, symmetrized so the physical field is real (Hermitian coefficients).
SpectralField random_real_field(const Grid& grid, const Profile& profile, std::uint64_t seed,
                                Frame frame = Frame::u);

/// Field from a function of the physical coordinates.
SpectralField sample_field(const Grid& grid,
                           const std::function<Complex(std::span<const double>)>& fn,
                           Frame frame = Frame::u);

/// True when every |k_a| < N / (order + 1): the modes kept by the dealiasing
/// mask for products of `order` factors (order 2 is the 2/3 rule).
bool dealias_keeps(const Grid& grid, std::size_t flat, int order);
/// Zero the modes outside the mask. Result in frequency representation.
SpectralField dealias(const SpectralField& field, int order = 2);

/// Coefficients of the physical-space real and imaginary parts.
SpectralField real_part(const SpectralField& field);
SpectralField imag_part(const SpectralField& field);

/// L^2 norm by Plancherel (frequency) or cell-volume quadrature (physical).
double l2_norm(const SpectralField& field);
/// Mean value (the zero-mode coefficient).
Complex mean_value(const SpectralField& field);
/// True when |c_0| is above roundoff relative to the field's size.
bool has_nonzero_mean(const SpectralField& field);
SpectralField without_mean(const SpectralField& field);

/// Largest |c_k - d_k| in frequency space (converting as needed).
double max_abs_difference(const SpectralField& a, const SpectralField& b);

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(Complex scale, const SpectralField& a);

/// Binary snapshot: "GPSF", u32 version, d/N/L as little-endian f64,
/// frame byte, representation byte, then N^d (re, im) f64 pairs in storage order.
inline constexpr std::uint32_t kSnapshotVersion = 1;
void write_snapshot(std::ostream& out, const SpectralField& field);
SpectralField read_snapshot(std::istream& in);
void write_snapshot_file(const std::string& path, const SpectralField& field);
SpectralField read_snapshot_file(const std::string& path);

}  // namespace gpscat
