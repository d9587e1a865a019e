#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "prb/norms.hpp"

namespace prb {

/// Counter-based stream of complex Rademacher variables (uniform on the unit
/// circle). The n-th draw depends only on (seed, stream, n).
class RademacherSampler {
 public:
  explicit RademacherSampler(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  /// Independent child stream; children of equal index coincide.
  RademacherSampler split(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  cplx next();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

std::vector<cplx> sample_rademacher(RademacherSampler& sampler, std::size_t count);

struct EpsEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int trials = 0;
  bool exact = false;
};

/// (E || sum_n eps_n f_n ||^p)^{1/p}. A single field, or p = 2 with the L^2
/// norm, is evaluated exactly without sampling.
EpsEstimate eps_p_norm(const std::vector<AnyField>& fields, double p, const NormSpec& norm, int trials,
                       RademacherSampler& sampler, bool allow_exact = true);

/// sum_n c_n f_n; all fields must share their grids.
AnyField linear_combination(const std::vector<AnyField>& fields, std::span<const cplx> coefficients);

struct OperatorEntry {
  cplx mu;
  std::function<AnyField(const AnyField&)> apply;
};

struct RBoundOptions {
  double p = 2.0;
  NormSpec in_norm = NormSpec::lp(2.0);
  NormSpec out_norm = NormSpec::lp(2.0);
  int trials = 32;
  int restarts = 16;
  int max_family = 4;
};

struct RBoundEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int trials = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  /// Best ratio over single operator / single input pairs.
  double singleton_best = 0.0;
};

/// Randomized lower bound for the R-bound of {T_j}: the largest observed ratio
/// ||(T_j x_j)||_{eps^p} / ||(x_j)||_{eps^p} over all single pairs and over
/// `restarts` random families drawn from the inputs.
RBoundEstimate rbound_lower(const std::vector<OperatorEntry>& ops, const std::vector<AnyField>& inputs,
                            const RBoundOptions& options, const RademacherSampler& sampler);

/// Single lattice modes, Gaussian bumps at three widths and eight modulated
/// Gaussians on the given grid.
std::vector<BoundaryField> probe_dictionary(const TangentialGrid& grid);

struct ScanRow {
  double abs_mu = 0.0;
  double arg_mu = 0.0;
  double norm = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double slope = 0.0;
  double residual = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;
};

enum class FitAbscissa { bracket, modulus };

struct DecayFit {
  double slope = 0.0;
  double residual = 0.0;
};

/// Least-squares slope of log(norm) against log<mu> (or log|mu|).
DecayFit decay_fit(const ScanResult& scan, FitAbscissa abscissa = FitAbscissa::bracket);

inline constexpr int scan_schema_version = 1;

/// CSV with columns abs_mu,arg_mu,norm,slope,residual,seed; `header` lines are
/// written as leading comments and the fit as a trailing comment.
void write_scan_csv(std::ostream& os, const ScanResult& scan, const std::vector<std::string>& header);
/// JSON lines: a header record echoing `config` and `version`, one record per
/// row, and a closing summary record with the fit.
void write_scan_jsonl(std::ostream& os, const ScanResult& scan, const std::string& config_json,
                      const std::string& version);

}  // namespace prb
