#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "prb/dynbc.hpp"
#include "prb/norms.hpp"
#include "prb/scans.hpp"
#include "prb/symbols.hpp"

namespace prb::cli {

enum ExitCode : int { exit_ok = 0, exit_numerical = 1, exit_usage = 2, exit_io = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScanSection {
  std::string kind = "opnorm";  // opnorm | rbound | mixed | sectorial
  double s = 0.0;
  double t = 0.0;
  double prefactor = 0.0;
  NormSpec in_norm = NormSpec::lp(2.0);
  NormSpec out_norm = NormSpec::mixed(2.0, 2.0, true);
  double eps_p = 2.0;
  int trials = 32;
  int restarts = 16;
  int max_family = 4;
  MuScan mu;
  std::optional<double> expect_slope;
  double slope_tol = 0.1;
  std::optional<double> slope_max;
};

/// Boundary data by name: const, mode (plane wave with integer index) or gaussian.
struct DataSpec {
  std::string name = "const";
  double amplitude = 1.0;
  int index = 1;
  double width = 0.5;
};

struct SolveSection {
  std::string mode = "resolvent";  // resolvent | evolve
  double mu_abs = 1.0;
  double mu_arg = 0.0;
  DataSpec data;
  double dt = 0.01;
  double T = 1.0;
  double tolerance = 1e-8;
};

struct LemmaSection {
  double a = 1.0;
  double rho = 2.0;
  std::vector<double> t{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  int brute_points = 100000;
  double tolerance = 1e-6;
  KppLemmaOptions scan;
};

struct RunConfig {
  std::string command;
  std::string kernel = "heat";
  /// Dynamic boundary problem for `solve` and sectorial scans.
  std::string problem = "heat-dynbc";
  std::string kind = "strong";
  int N = 2;
  double half_angle = catalog::default_half_angle;
  KppParams kpp;
  GridConfig grid;
  ProbeSpec probe;
  ScanSection scan;
  SolveSection solve;
  LemmaSection lemma;
  std::uint64_t seed = 0;
  std::string out = ".";
};

nlohmann::json to_json(const RunConfig& config);
/// Overrides the fields present in `j`. Unknown keys and ill-typed values
/// raise UsageError.
void apply_json(RunConfig& config, const nlohmann::json& j);
nlohmann::json read_config_file(const std::string& path);
void validate(const RunConfig& config);

int cmd_verify_symbol(const RunConfig& config, std::ostream& report);
int cmd_scan(const RunConfig& config, std::ostream& report);
int cmd_solve(const RunConfig& config, std::ostream& report);
int cmd_lemma(const RunConfig& config, std::ostream& report);

/// Dispatches on config.command and maps exceptions to exit codes.
int run(const RunConfig& config, std::ostream& report, std::ostream& errors);

int main(int argc, char** argv);

}  // namespace prb::cli
