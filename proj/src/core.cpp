#include "prb/core.hpp"

#include <algorithm>
#include <cmath>

namespace prb {

Sector::Sector(double alpha, double beta) : alpha_(alpha), beta_(beta), empty_(false) {
  if (!(alpha < beta) || beta - alpha > 2.0 * pi) {
    throw ParameterError("sector requires alpha < beta and beta - alpha <= 2 pi");
  }
}

bool Sector::contains(cplx mu) const {
  if (empty_ || mu == cplx(0.0)) return false;
  // arg measured continuously from alpha
  double offset = std::fmod(std::arg(mu) - alpha_, 2.0 * pi);
  if (offset < 0.0) offset += 2.0 * pi;
  return offset > 0.0 && offset < beta_ - alpha_;
}

bool sector_contains(const Sector& sector, cplx mu) { return sector.contains(mu); }

void require_parameter(const Sector& sector, std::optional<cplx> mu, const std::string& who) {
  if (sector.is_empty()) {
    if (mu) throw DomainError(who + ": parameter given for a parameter-independent symbol");
    return;
  }
  if (!mu) throw DomainError(who + ": parameter required");
  if (!sector.contains(*mu)) throw DomainError(who + ": mu outside the sector");
}

double bracket(std::span<const double> xi, std::optional<cplx> mu) {
  double acc = 1.0;
  for (double c : xi) acc += c * c;
  if (mu) acc += std::norm(*mu);
  return std::sqrt(acc);
}

double bracket(double xi, std::optional<cplx> mu) { return bracket(std::span<const double>(&xi, 1), mu); }

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

TangentialGrid::TangentialGrid(int dim, double box_length, int points_per_dim)
    : dim_(dim), length_(box_length), n_(points_per_dim) {
  if (dim < 1 || dim > 2) throw ParameterError("tangential dimension must be 1 or 2");
  if (!(box_length > 0.0)) throw ParameterError("box length must be positive");
  if (!is_power_of_two(points_per_dim) || points_per_dim < 2) {
    throw ParameterError("points per dimension must be a power of two");
  }
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n_);
  freq_.resize(size_ * dim_);
  pos_.resize(size_ * dim_);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    std::size_t rest = flat;
    for (int a = dim_ - 1; a >= 0; --a) {
      int idx = static_cast<int>(rest % n_);
      rest /= n_;
      freq_[flat * dim_ + a] = axis_frequency(idx);
      pos_[flat * dim_ + a] = idx * length_ / n_;
    }
  }
}

double TangentialGrid::cell_measure() const { return std::pow(length_ / n_, dim_); }
double TangentialGrid::total_measure() const { return std::pow(length_, dim_); }

double TangentialGrid::axis_frequency(int i) const {
  int k = i < n_ / 2 ? i : i - n_;
  return 2.0 * pi * k / length_;
}

std::vector<double> TangentialGrid::axis_frequencies() const {
  std::vector<double> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = axis_frequency(i);
  std::sort(out.begin(), out.end());
  return out;
}

double TangentialGrid::xi_norm(std::size_t flat) const {
  double acc = 0.0;
  for (double c : xi(flat)) acc += c * c;
  return std::sqrt(acc);
}

NormalGrid::NormalGrid(int count, double extent, double ratio) : extent_(extent), ratio_(ratio) {
  if (count < 2) throw ParameterError("normal grid needs at least 2 nodes");
  if (!(ratio > 1.0)) throw ParameterError("normal grading ratio must exceed 1");
  if (!(extent > 0.0)) throw ParameterError("normal extent must be positive");
  nodes_.resize(count);
  const double denom = std::expm1((count - 1) * std::log(ratio));
  for (int j = 0; j < count; ++j) nodes_[j] = extent * std::expm1(j * std::log(ratio)) / denom;
  nodes_.front() = 0.0;
  nodes_.back() = extent;
  weights_.assign(count, 0.0);
  for (int j = 0; j + 1 < count; ++j) {
    const double h = nodes_[j + 1] - nodes_[j];
    weights_[j] += 0.5 * h;
    weights_[j + 1] += 0.5 * h;
  }
}

std::pair<TangentialGrid, NormalGrid> make_grids(const GridConfig& c) {
  return {TangentialGrid(c.dim, c.box_length, c.points_per_dim),
          NormalGrid(c.normal_count, c.normal_extent, c.normal_ratio)};
}

BoundaryField BoundaryField::zeros(const TangentialGrid& grid) {
  return BoundaryField{grid, std::vector<cplx>(grid.size())};
}

BoundaryField BoundaryField::mode(const TangentialGrid& grid, std::size_t flat_frequency) {
  auto xi = grid.xi(flat_frequency);
  return from_function(grid, [&](std::span<const double> x) {
    double phase = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) phase += xi[a] * x[a];
    return std::polar(1.0, phase);
  });
}

HalfSpaceField HalfSpaceField::zeros(const TangentialGrid& tangential, const NormalGrid& normal) {
  return HalfSpaceField{tangential, normal, std::vector<cplx>(tangential.size() * normal.size())};
}

std::size_t mode_index(const TangentialGrid& grid, std::span<const int> wave_numbers) {
  if (static_cast<int>(wave_numbers.size()) != grid.dim()) {
    throw ParameterError("mode_index: wave number count must equal the grid dimension");
  }
  const int n = grid.points_per_dim();
  std::size_t flat = 0;
  for (int k : wave_numbers) {
    if (k < -n / 2 || k >= n / 2) throw ParameterError("mode_index: wave number beyond Nyquist");
    flat = flat * n + static_cast<std::size_t>(k < 0 ? k + n : k);
  }
  return flat;
}

}  // namespace prb
