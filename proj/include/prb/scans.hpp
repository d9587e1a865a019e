#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "prb/dynbc.hpp"
#include "prb/norms.hpp"
#include "prb/rbound.hpp"
#include "prb/symbols.hpp"

namespace prb {

/// Worker count from PRB_WORKERS (default 1).
int worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// |mu| log-spaced in [min_abs, max_abs] on each ray angle.
struct MuScan {
  std::vector<double> rays{0.0};
  double min_abs = 1.0;
  double max_abs = 1e3;
  int points = 20;

  void validate() const;
  std::vector<double> moduli() const;
};

/// mu -> opnorm_hilbert(k, mu, s, t) on every ray.
ScanResult opnorm_scan(const SymbolKernel& k, double s, double t, const GridConfig& grids, const MuScan& scan);

struct RBoundScanOptions {
  NormSpec in_norm = NormSpec::lp(2.0);
  NormSpec out_norm = NormSpec::mixed(2.0, 2.0, true);
  /// The family is {<mu>^prefactor K_mu}.
  double prefactor = 0.5;
  RBoundOptions search;
  std::uint64_t seed = 0;
};

/// For each |mu|, the family {<mu>^e K_mu : mu on the scan rays} is searched
/// for its R-bound from below; one row per |mu| (arg_mu = 0).
ScanResult rbound_scan(const SymbolKernel& k, const GridConfig& grids, const MuScan& scan,
                       const RBoundScanOptions& options);

/// For each mu, max over the probe dictionary of ||<mu>^e K_mu g||_out / ||g||_in.
ScanResult mixed_scan(const SymbolKernel& k, const GridConfig& grids, const MuScan& scan, const NormSpec& in_norm,
                      const NormSpec& out_norm, double prefactor);

/// One scan per ray of max over the probe dictionary of the scaled resolvent ratio.
std::vector<ScanResult> sectorial_scan(const DynBCProblem& problem, const MuScan& scan);

}  // namespace prb
