#include "prb/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace prb {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t total = 1;
    std::vector<int> dims(dim, n);
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    std::vector<cplx> in(total), out(total);
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

std::vector<cplx> run(const TangentialGrid& grid, std::span<const cplx> data, int sign, double scale) {
  if (data.size() != grid.size()) throw ParameterError("fft: sample count does not match the grid");
  fftw_plan plan = plans().get(grid.dim(), grid.points_per_dim(), sign);
  std::vector<cplx> in(data.begin(), data.end());
  std::vector<cplx> out(grid.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  for (auto& v : out) v *= scale;
  return out;
}

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

}  // namespace

std::vector<cplx> fft_forward(const TangentialGrid& grid, std::span<const cplx> samples) {
  return run(grid, samples, FFTW_FORWARD, grid.cell_measure());
}

std::vector<cplx> fft_inverse(const TangentialGrid& grid, std::span<const cplx> spectrum) {
  return run(grid, spectrum, FFTW_BACKWARD, 1.0 / grid.total_measure());
}

double spectral_l2_norm(const TangentialGrid& grid, std::span<const cplx> spectrum) {
  double acc = 0.0;
  for (const auto& v : spectrum) acc += std::norm(v);
  return std::sqrt(acc / grid.total_measure());
}

BoundaryField apply_frequency_fn(const FrequencyFn& a, const BoundaryField& g) {
  auto spec = fft_forward(g.grid, g.samples);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= a(g.grid.xi(i));
  return {g.grid, fft_inverse(g.grid, spec)};
}

BoundaryField apply_multiplier(const MultiplierSymbol& a, std::optional<cplx> mu, const BoundaryField& g) {
  require_parameter(a.sector, mu, a.name);
  return apply_frequency_fn([&](std::span<const double> xi) { return a.fn(xi, mu); }, g);
}

HalfSpaceField apply_multiplier(const MultiplierSymbol& a, std::optional<cplx> mu, const HalfSpaceField& u) {
  require_parameter(a.sector, mu, a.name);
  const auto& grid = u.tangential;
  std::vector<cplx> symbol(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) symbol[i] = a.fn(grid.xi(i), mu);
  HalfSpaceField out = u;
  for (std::size_t j = 0; j < u.normal.size(); ++j) {
    auto spec = fft_forward(grid, u.slice(j));
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= symbol[i];
    const auto back = fft_inverse(grid, spec);
    std::copy(back.begin(), back.end(), out.slice(j).begin());
  }
  return out;
}

HalfSpaceField apply_poisson_spectral(const SymbolKernel& k, std::optional<cplx> mu, const TangentialGrid& grid,
                                      std::span<const cplx> spectrum, const NormalGrid& normal) {
  require_parameter(k.sector, mu, k.name);
  HalfSpaceField out = HalfSpaceField::zeros(grid, normal);
  std::vector<cplx> slice(grid.size());
  for (std::size_t j = 0; j < normal.size(); ++j) {
    const double x = normal.node(j);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      slice[i] = spectrum[i] == cplx(0.0) ? cplx(0.0) : k.fn(grid.xi(i), mu, x) * spectrum[i];
    }
    const auto back = fft_inverse(grid, slice);
    std::copy(back.begin(), back.end(), out.slice(j).begin());
  }
  return out;
}

HalfSpaceField apply_poisson(const SymbolKernel& k, std::optional<cplx> mu, const BoundaryField& g,
                             const NormalGrid& normal) {
  require_parameter(k.sector, mu, k.name);
  const auto spec = fft_forward(g.grid, g.samples);
  return apply_poisson_spectral(k, mu, g.grid, spec, normal);
}

LPPartition::LPPartition(int blocks) : max_index_(blocks) {
  if (blocks < 0) throw ParameterError("LPPartition: block index must be nonnegative");
}

LPPartition LPPartition::for_grid(const TangentialGrid& grid) {
  double top = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) top = std::max(top, grid.xi_norm(i));
  const int j = top <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(top)));
  return LPPartition(j);
}

double LPPartition::phi(double r) {
  if (r <= 1.0) return 1.0;
  return 1.0 - smoothstep(std::log2(r));
}

double LPPartition::psi(int j, double r) const {
  if (j < 0 || j > max_index_) return 0.0;
  if (j == 0) return phi(r);
  return phi(std::ldexp(r, -j)) - phi(std::ldexp(r, 1 - j));
}

std::vector<BoundaryField> lp_blocks(const BoundaryField& g, const LPPartition& part) {
  const auto spec = fft_forward(g.grid, g.samples);
  std::vector<BoundaryField> out;
  out.reserve(part.max_index() + 1);
  std::vector<cplx> block(spec.size());
  for (int j = 0; j <= part.max_index(); ++j) {
    for (std::size_t i = 0; i < spec.size(); ++i) block[i] = part.psi(j, g.grid.xi_norm(i)) * spec[i];
    out.push_back({g.grid, fft_inverse(g.grid, block)});
  }
  return out;
}

}  // namespace prb
