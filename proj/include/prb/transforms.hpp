#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "prb/core.hpp"
#include "prb/symbols.hpp"

namespace prb {

/// Discrete approximation of the continuous transform: sum g(x) e^{-i xi.x} dx
/// with dx the cell measure.
std::vector<cplx> fft_forward(const TangentialGrid& grid, std::span<const cplx> samples);
/// Inverse of fft_forward: L^{-dim} sum ghat(xi) e^{i xi.x}.
std::vector<cplx> fft_inverse(const TangentialGrid& grid, std::span<const cplx> spectrum);
/// L^2 norm computed on the spectral side; equals lp_norm(g, 2) by Plancherel.
double spectral_l2_norm(const TangentialGrid& grid, std::span<const cplx> spectrum);

using FrequencyFn = std::function<cplx(std::span<const double> xi)>;

BoundaryField apply_frequency_fn(const FrequencyFn& a, const BoundaryField& g);
BoundaryField apply_multiplier(const MultiplierSymbol& a, std::optional<cplx> mu, const BoundaryField& g);
/// Multiplier applied to every normal slice.
HalfSpaceField apply_multiplier(const MultiplierSymbol& a, std::optional<cplx> mu, const HalfSpaceField& u);

/// u(., x_j) = k(D', mu; x_j) g for every normal node.
HalfSpaceField apply_poisson(const SymbolKernel& k, std::optional<cplx> mu, const BoundaryField& g,
                             const NormalGrid& normal);
/// Same, starting from a precomputed spectrum of g.
HalfSpaceField apply_poisson_spectral(const SymbolKernel& k, std::optional<cplx> mu, const TangentialGrid& grid,
                                      std::span<const cplx> spectrum, const NormalGrid& normal);

/// Dyadic partition psi_0 = phi, psi_j = phi(2^-j .) - phi(2^{1-j} .), with
/// phi = 1 - S(log2 |xi|) and S the quintic smoothstep on [0, 1].
class LPPartition {
 public:
  explicit LPPartition(int blocks);
  static LPPartition for_grid(const TangentialGrid& grid);

  /// Highest block index J; the partition has J + 1 blocks.
  int max_index() const { return max_index_; }
  static double phi(double r);
  double psi(int j, double r) const;

 private:
  int max_index_;
};

std::vector<BoundaryField> lp_blocks(const BoundaryField& g, const LPPartition& part);

}  // namespace prb
