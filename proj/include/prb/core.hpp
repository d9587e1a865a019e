#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prb {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/// Parameter outside the domain of an operation (mu outside the sector, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid numerical parameter (exponent out of range, bad grid size, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Open angular sector {mu != 0 : alpha < arg mu < beta}, or the empty sector.
class Sector {
 public:
  Sector(double alpha, double beta);

  static Sector empty() { return Sector(); }
  static Sector symmetric(double half_angle) { return Sector(-half_angle, half_angle); }

  bool is_empty() const { return empty_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double opening() const { return empty_ ? 0.0 : beta_ - alpha_; }

  bool contains(cplx mu) const;

 private:
  Sector() = default;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  bool empty_ = true;
};

bool sector_contains(const Sector& sector, cplx mu);

/// Throws DomainError unless mu is admissible: a point of a non-empty sector,
/// or absent exactly when the sector is empty.
void require_parameter(const Sector& sector, std::optional<cplx> mu, const std::string& who);

/// (1 + |xi|^2 + |mu|^2)^{1/2}, with |mu| = 0 when mu is absent.
double bracket(std::span<const double> xi, std::optional<cplx> mu = std::nullopt);
double bracket(double xi, std::optional<cplx> mu = std::nullopt);

class TangentialGrid {
 public:
  TangentialGrid(int dim, double box_length, int points_per_dim);

  int dim() const { return dim_; }
  int points_per_dim() const { return n_; }
  double box_length() const { return length_; }
  std::size_t size() const { return size_; }
  double cell_measure() const;
  double total_measure() const;
  double nyquist() const { return pi * n_ / length_; }

  /// Frequency 2 pi k / L of FFT-order index i along one axis.
  double axis_frequency(int i) const;
  /// Frequencies along one axis, sorted ascending.
  std::vector<double> axis_frequencies() const;

  /// Frequency vector of flat index (FFT order, last axis fastest).
  std::span<const double> xi(std::size_t flat) const {
    return {freq_.data() + flat * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> x(std::size_t flat) const {
    return {pos_.data() + flat * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double xi_norm(std::size_t flat) const;

  bool operator==(const TangentialGrid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }

 private:
  int dim_;
  double length_;
  int n_;
  std::size_t size_;
  std::vector<double> freq_;
  std::vector<double> pos_;
};

/// Geometrically graded nodes on [0, X_max] with trapezoid weights.
class NormalGrid {
 public:
  NormalGrid(int count, double extent, double ratio);

  std::size_t size() const { return nodes_.size(); }
  double extent() const { return extent_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double node(std::size_t j) const { return nodes_[j]; }

  bool operator==(const NormalGrid& o) const {
    return nodes_.size() == o.nodes_.size() && extent_ == o.extent_ && ratio_ == o.ratio_;
  }

 private:
  double extent_;
  double ratio_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct GridConfig {
  int dim = 1;
  double box_length = 2.0 * pi;
  int points_per_dim = 256;
  int normal_count = 256;
  double normal_extent = 16.0;
  double normal_ratio = 1.05;
};

std::pair<TangentialGrid, NormalGrid> make_grids(const GridConfig& config);

struct BoundaryField {
  TangentialGrid grid;
  std::vector<cplx> samples;

  static BoundaryField zeros(const TangentialGrid& grid);
  template <class F>
  static BoundaryField from_function(const TangentialGrid& grid, F&& f) {
    BoundaryField out = zeros(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.samples[i] = f(grid.x(i));
    return out;
  }
  /// exp(i xi_k . x) for the lattice frequency with flat FFT-order index k.
  static BoundaryField mode(const TangentialGrid& grid, std::size_t flat_frequency);
};

/// Samples on tangential x normal nodes; normal slice j occupies
/// samples[j * tangential.size() .. (j + 1) * tangential.size()).
struct HalfSpaceField {
  TangentialGrid tangential;
  NormalGrid normal;
  std::vector<cplx> samples;

  static HalfSpaceField zeros(const TangentialGrid& tangential, const NormalGrid& normal);

  cplx& at(std::size_t i, std::size_t j) { return samples[j * tangential.size() + i]; }
  cplx at(std::size_t i, std::size_t j) const { return samples[j * tangential.size() + i]; }
  std::span<cplx> slice(std::size_t j) {
    return {samples.data() + j * tangential.size(), tangential.size()};
  }
  std::span<const cplx> slice(std::size_t j) const {
    return {samples.data() + j * tangential.size(), tangential.size()};
  }
};

/// Flat FFT-order index of the lattice frequency with integer wave numbers.
std::size_t mode_index(const TangentialGrid& grid, std::span<const int> wave_numbers);

}  // namespace prb
