#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "prb/transforms.hpp"

namespace prb::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* version = PRB_VERSION;

// ---------------------------------------------------------------------------
// JSON <-> config

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw UsageError("config" + where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw UsageError("config: unknown key '" + where + (where.empty() ? "" : ".") + it.key() + "'");
  }
}

template <class T>
void take(const json& j, const char* key, T& dst, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  const std::string name = where + (where.empty() ? "" : ".") + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw UsageError("config: '" + name + "' must be a boolean");
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!it->is_number_unsigned()) throw UsageError("config: '" + name + "' must be a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw UsageError("config: '" + name + "' must be an integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) throw UsageError("config: '" + name + "' must be a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) throw UsageError("config: '" + name + "' must be a string");
  } else {
    if (!it->is_array()) throw UsageError("config: '" + name + "' must be an array");
    for (const auto& e : *it) {
      if (!e.is_number()) throw UsageError("config: '" + name + "' must hold numbers");
    }
  }
  dst = it->get<T>();
}

void take_optional(const json& j, const char* key, std::optional<double>& dst, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_null()) {
    dst.reset();
    return;
  }
  double v = 0.0;
  take(j, key, v, where);
  dst = v;
}

json norm_to_json(const NormSpec& n) {
  return {{"family", to_string(n.family)}, {"p", n.p}, {"q", n.q}, {"s", n.s}, {"m", n.m}, {"weak", n.weak}};
}

void norm_from_json(NormSpec& n, const json& j, const std::string& where) {
  require_keys(j, where, {"family", "p", "q", "s", "m", "weak"});
  std::string family = to_string(n.family);
  take(j, "family", family, where);
  try {
    n.family = norm_family_from_string(family);
  } catch (const ParameterError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  take(j, "p", n.p, where);
  take(j, "q", n.q, where);
  take(j, "s", n.s, where);
  take(j, "m", n.m, where);
  take(j, "weak", n.weak, where);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

NormalGrid normal_grid(const GridConfig& g) { return make_grids(g).second; }

// ---------------------------------------------------------------------------
// Output

std::vector<std::string> header_lines(const RunConfig& config) {
  return {std::string("version=") + version, "config=" + to_json(config).dump()};
}

fs::path output_dir(const RunConfig& config) {
  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + config.out + "'");
  return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  body(os);
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

KernelKind parse_kind(const std::string& name) {
  if (name == "strong") return KernelKind::strong;
  if (name == "weak") return KernelKind::weak;
  throw UsageError("unknown symbol class '" + name + "' (strong, weak)");
}

SymbolKernel lookup_kernel(const RunConfig& config) {
  auto k = catalog::kernel_by_name(config.kernel, config.half_angle, config.kpp);
  if (!k) {
    std::string names;
    for (const auto& n : catalog::kernel_names()) names += (names.empty() ? "" : ", ") + n;
    throw UsageError("unknown kernel '" + config.kernel + "' (" + names + ")");
  }
  return *k;
}

DynBCProblem lookup_problem(const RunConfig& config) {
  DynBCProblem problem;
  try {
    problem.variant = dynbc_variant_from_string(config.problem);
  } catch (const std::exception&) {
    throw UsageError("unknown problem '" + config.problem + "' (heat-dynbc, ch-boundary, kpp)");
  }
  problem.kpp = config.kpp;
  problem.half_angle = config.half_angle;
  problem.grids = config.grid;
  problem.validate();
  return problem;
}

BoundaryField make_data(const DataSpec& data, const TangentialGrid& grid) {
  const double a = data.amplitude;
  if (data.name == "const") return BoundaryField::from_function(grid, [a](auto) { return cplx(a); });
  if (data.name == "mode") {
    std::vector<int> wave(static_cast<std::size_t>(grid.dim()), 0);
    wave[0] = data.index;
    auto g = BoundaryField::mode(grid, mode_index(grid, wave));
    for (auto& s : g.samples) s *= a;
    return g;
  }
  if (data.name == "gaussian") {
    const double c = grid.box_length() / 2.0;
    const double w = data.width;
    return BoundaryField::from_function(grid, [a, c, w](std::span<const double> x) {
      double r2 = 0.0;
      for (double xi : x) r2 += (xi - c) * (xi - c);
      return cplx(a * std::exp(-r2 / (2.0 * w * w)));
    });
  }
  throw UsageError("unknown data '" + data.name + "' (const, mode, gaussian)");
}

void write_boundary_csv(std::ostream& os, const BoundaryField& f, const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  for (int d = 0; d < f.grid.dim(); ++d) os << 'x' << d << ',';
  os << "re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    for (double x : f.grid.x(i)) os << x << ',';
    os << f.samples[i].real() << ',' << f.samples[i].imag() << '\n';
  }
}

void write_halfspace_csv(std::ostream& os, const HalfSpaceField& f, const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  for (int d = 0; d < f.tangential.dim(); ++d) os << 'x' << d << ',';
  os << "xn,re,im\n" << std::setprecision(17);
  for (std::size_t j = 0; j < f.normal.size(); ++j) {
    for (std::size_t i = 0; i < f.tangential.size(); ++i) {
      for (double x : f.tangential.x(i)) os << x << ',';
      os << f.normal.node(j) << ',' << f.at(i, j).real() << ',' << f.at(i, j).imag() << '\n';
    }
  }
}

double max_relative_change(double base, double refined) {
  if (base == 0.0 && refined == 0.0) return 1.0;
  if (base == 0.0) return std::numeric_limits<double>::infinity();
  return refined / base;
}

}  // namespace

// ---------------------------------------------------------------------------

json to_json(const RunConfig& c) {
  const auto& g = c.grid;
  const auto& p = c.probe;
  const auto& s = c.scan;
  const auto& v = c.solve;
  const auto& l = c.lemma;
  return {
      {"command", c.command},
      {"kernel", c.kernel},
      {"problem", c.problem},
      {"class", c.kind},
      {"N", c.N},
      {"half_angle", c.half_angle},
      {"kpp", {{"d", c.kpp.d}, {"d_prime", c.kpp.d_prime}, {"k", c.kpp.k}}},
      {"grid",
       {{"dim", g.dim},
        {"box_length", g.box_length},
        {"points_per_dim", g.points_per_dim},
        {"normal_count", g.normal_count},
        {"normal_extent", g.normal_extent},
        {"normal_ratio", g.normal_ratio}}},
      {"probe",
       {{"xi_min", p.xi_min},
        {"xi_max", p.xi_max},
        {"mu_min", p.mu_min},
        {"mu_max", p.mu_max},
        {"t_min", p.t_min},
        {"t_max", p.t_max},
        {"points_per_decade", p.points_per_decade},
        {"rays", p.rays},
        {"edge_margin", p.edge_margin},
        {"rel_step", p.rel_step}}},
      {"scan",
       {{"kind", s.kind},
        {"s", s.s},
        {"t", s.t},
        {"prefactor", s.prefactor},
        {"in_norm", norm_to_json(s.in_norm)},
        {"out_norm", norm_to_json(s.out_norm)},
        {"eps_p", s.eps_p},
        {"trials", s.trials},
        {"restarts", s.restarts},
        {"max_family", s.max_family},
        {"mu", {{"rays", s.mu.rays}, {"min_abs", s.mu.min_abs}, {"max_abs", s.mu.max_abs}, {"points", s.mu.points}}},
        {"expect_slope", optional_json(s.expect_slope)},
        {"slope_tol", s.slope_tol},
        {"slope_max", optional_json(s.slope_max)}}},
      {"solve",
       {{"mode", v.mode},
        {"mu", {{"abs", v.mu_abs}, {"arg", v.mu_arg}}},
        {"data",
         {{"name", v.data.name}, {"amplitude", v.data.amplitude}, {"index", v.data.index}, {"width", v.data.width}}},
        {"dt", v.dt},
        {"T", v.T},
        {"tolerance", v.tolerance}}},
      {"lemma",
       {{"a", l.a},
        {"rho", l.rho},
        {"t", l.t},
        {"brute_points", l.brute_points},
        {"tolerance", l.tolerance},
        {"scan",
         {{"z_angle", l.scan.z_angle},
          {"theta", l.scan.theta},
          {"edge_gap", l.scan.edge_gap},
          {"min_modulus", l.scan.min_modulus},
          {"max_modulus", l.scan.max_modulus},
          {"points_per_decade", l.scan.points_per_decade}}}}},
      {"seed", c.seed},
      {"out", c.out},
  };
}

void apply_json(RunConfig& c, const json& j) {
  require_keys(j, "",
               {"command", "kernel", "problem", "class", "N", "half_angle", "kpp", "grid", "probe", "scan", "solve",
                "lemma", "seed", "out"});
  take(j, "command", c.command, "");
  take(j, "kernel", c.kernel, "");
  take(j, "problem", c.problem, "");
  take(j, "class", c.kind, "");
  take(j, "N", c.N, "");
  take(j, "half_angle", c.half_angle, "");
  take(j, "seed", c.seed, "");
  take(j, "out", c.out, "");
  if (j.contains("kpp")) {
    const auto& k = j["kpp"];
    require_keys(k, "kpp", {"d", "d_prime", "k"});
    take(k, "d", c.kpp.d, "kpp");
    take(k, "d_prime", c.kpp.d_prime, "kpp");
    take(k, "k", c.kpp.k, "kpp");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    require_keys(g, "grid", {"dim", "box_length", "points_per_dim", "normal_count", "normal_extent", "normal_ratio"});
    take(g, "dim", c.grid.dim, "grid");
    take(g, "box_length", c.grid.box_length, "grid");
    take(g, "points_per_dim", c.grid.points_per_dim, "grid");
    take(g, "normal_count", c.grid.normal_count, "grid");
    take(g, "normal_extent", c.grid.normal_extent, "grid");
    take(g, "normal_ratio", c.grid.normal_ratio, "grid");
  }
  if (j.contains("probe")) {
    const auto& p = j["probe"];
    require_keys(p, "probe",
                 {"xi_min", "xi_max", "mu_min", "mu_max", "t_min", "t_max", "points_per_decade", "rays",
                  "edge_margin", "rel_step"});
    take(p, "xi_min", c.probe.xi_min, "probe");
    take(p, "xi_max", c.probe.xi_max, "probe");
    take(p, "mu_min", c.probe.mu_min, "probe");
    take(p, "mu_max", c.probe.mu_max, "probe");
    take(p, "t_min", c.probe.t_min, "probe");
    take(p, "t_max", c.probe.t_max, "probe");
    take(p, "points_per_decade", c.probe.points_per_decade, "probe");
    take(p, "rays", c.probe.rays, "probe");
    take(p, "edge_margin", c.probe.edge_margin, "probe");
    take(p, "rel_step", c.probe.rel_step, "probe");
  }
  if (j.contains("scan")) {
    const auto& s = j["scan"];
    require_keys(s, "scan",
                 {"kind", "s", "t", "prefactor", "in_norm", "out_norm", "eps_p", "trials", "restarts", "max_family",
                  "mu", "expect_slope", "slope_tol", "slope_max"});
    auto& d = c.scan;
    take(s, "kind", d.kind, "scan");
    take(s, "s", d.s, "scan");
    take(s, "t", d.t, "scan");
    take(s, "prefactor", d.prefactor, "scan");
    if (s.contains("in_norm")) norm_from_json(d.in_norm, s["in_norm"], "scan.in_norm");
    if (s.contains("out_norm")) norm_from_json(d.out_norm, s["out_norm"], "scan.out_norm");
    take(s, "eps_p", d.eps_p, "scan");
    take(s, "trials", d.trials, "scan");
    take(s, "restarts", d.restarts, "scan");
    take(s, "max_family", d.max_family, "scan");
    if (s.contains("mu")) {
      const auto& m = s["mu"];
      require_keys(m, "scan.mu", {"rays", "min_abs", "max_abs", "points"});
      take(m, "rays", d.mu.rays, "scan.mu");
      take(m, "min_abs", d.mu.min_abs, "scan.mu");
      take(m, "max_abs", d.mu.max_abs, "scan.mu");
      take(m, "points", d.mu.points, "scan.mu");
    }
    take_optional(s, "expect_slope", d.expect_slope, "scan");
    take(s, "slope_tol", d.slope_tol, "scan");
    take_optional(s, "slope_max", d.slope_max, "scan");
  }
  if (j.contains("solve")) {
    const auto& s = j["solve"];
    require_keys(s, "solve", {"mode", "mu", "data", "dt", "T", "tolerance"});
    auto& d = c.solve;
    take(s, "mode", d.mode, "solve");
    if (s.contains("mu")) {
      require_keys(s["mu"], "solve.mu", {"abs", "arg"});
      take(s["mu"], "abs", d.mu_abs, "solve.mu");
      take(s["mu"], "arg", d.mu_arg, "solve.mu");
    }
    if (s.contains("data")) {
      const auto& g = s["data"];
      require_keys(g, "solve.data", {"name", "amplitude", "index", "width"});
      take(g, "name", d.data.name, "solve.data");
      take(g, "amplitude", d.data.amplitude, "solve.data");
      take(g, "index", d.data.index, "solve.data");
      take(g, "width", d.data.width, "solve.data");
    }
    take(s, "dt", d.dt, "solve");
    take(s, "T", d.T, "solve");
    take(s, "tolerance", d.tolerance, "solve");
  }
  if (j.contains("lemma")) {
    const auto& s = j["lemma"];
    require_keys(s, "lemma", {"a", "rho", "t", "brute_points", "tolerance", "scan"});
    auto& d = c.lemma;
    take(s, "a", d.a, "lemma");
    take(s, "rho", d.rho, "lemma");
    take(s, "t", d.t, "lemma");
    take(s, "brute_points", d.brute_points, "lemma");
    take(s, "tolerance", d.tolerance, "lemma");
    if (s.contains("scan")) {
      const auto& k = s["scan"];
      require_keys(k, "lemma.scan",
                   {"z_angle", "theta", "edge_gap", "min_modulus", "max_modulus", "points_per_decade"});
      take(k, "z_angle", d.scan.z_angle, "lemma.scan");
      take(k, "theta", d.scan.theta, "lemma.scan");
      take(k, "edge_gap", d.scan.edge_gap, "lemma.scan");
      take(k, "min_modulus", d.scan.min_modulus, "lemma.scan");
      take(k, "max_modulus", d.scan.max_modulus, "lemma.scan");
      take(k, "points_per_decade", d.scan.points_per_decade, "lemma.scan");
    }
  }
}

json read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

void validate(const RunConfig& c) {
  static const std::vector<std::string> commands{"verify-symbol", "scan", "solve", "lemma"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end()) {
    throw UsageError("unknown command '" + c.command + "' (verify-symbol, scan, solve, lemma)");
  }
  parse_kind(c.kind);
  if (c.N < 0 || c.N > 4) throw UsageError("N must lie in [0, 4]");
  static const std::vector<std::string> kinds{"opnorm", "rbound", "mixed", "sectorial"};
  if (std::find(kinds.begin(), kinds.end(), c.scan.kind) == kinds.end()) {
    throw UsageError("unknown scan kind '" + c.scan.kind + "' (opnorm, rbound, mixed, sectorial)");
  }
  if (c.solve.mode != "resolvent" && c.solve.mode != "evolve") {
    throw UsageError("unknown solve mode '" + c.solve.mode + "' (resolvent, evolve)");
  }
  if (!(c.scan.slope_tol >= 0.0)) throw UsageError("slope_tol must be non-negative");
  if (c.lemma.brute_points < 2) throw UsageError("lemma.brute_points must be at least 2");
  if (c.out.empty()) throw UsageError("output directory must not be empty");
}

// ---------------------------------------------------------------------------

int cmd_verify_symbol(const RunConfig& config, std::ostream& report) {
  const auto k = lookup_kernel(config);
  const KernelKind kind = parse_kind(config.kind);
  const ProbeSpec base = config.probe;
  base.validate();
  const ProbeSpec fine = base.refined();
  const NormalGrid normal = normal_grid(config.grid);

  report << "# version=" << version << "\n# config=" << to_json(config).dump() << '\n';
  report << "seminorm " << config.kind << " of " << k.name << " (order " << k.order << ")\n";
  report << std::left << std::setw(6) << "N" << std::setw(16) << "base" << std::setw(16) << "refined"
         << "ratio\n";

  bool pass = true;
  json rows = json::array();
  for (int n = 0; n <= config.N; ++n) {
    const double a = seminorm_as(k, kind, n, base);
    const double b = seminorm_as(k, kind, n, fine);
    const double ratio = max_relative_change(a, b);
    const bool ok = std::isfinite(a) && std::isfinite(b) && ratio < 1.10;
    pass = pass && ok;
    report << std::setw(6) << n << std::setw(16) << fmt(a) << std::setw(16) << fmt(b) << fmt(ratio)
           << (ok ? "" : "  diverging") << '\n';
    rows.push_back({{"N", n}, {"base", a}, {"refined", b}, {"ratio", ratio}, {"ok", ok}});
  }

  // Zeroth-order characterization bounds in the normal variable.
  report << "characterization bound (l = l' = 0)\n";
  json char_rows = json::array();
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const double a = char_lp_bound(k, p, 0, 0, {}, base, normal);
    const double b = char_lp_bound(k, p, 0, 0, {}, fine, normal);
    const double ratio = max_relative_change(a, b);
    const bool ok = std::isfinite(a) && std::isfinite(b) && ratio < 1.10;
    pass = pass && ok;
    const std::string pname = std::isinf(p) ? "inf" : fmt(p);
    report << std::setw(6) << ("p=" + pname) << std::setw(16) << fmt(a) << std::setw(16) << fmt(b) << fmt(ratio)
           << (ok ? "" : "  diverging") << '\n';
    char_rows.push_back({{"p", pname}, {"base", a}, {"refined", b}, {"ratio", ratio}, {"ok", ok}});
  }
  report << (pass ? "PASS" : "FAIL") << ": refinement ratios " << (pass ? "< 1.10" : "reach 1.10") << '\n';

  const json doc{{"version", version},
                 {"config", to_json(config)},
                 {"seminorms", rows},
                 {"characterization", char_rows},
                 {"pass", pass}};
  write_file(output_dir(config) / "verify_symbol.json", [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return pass ? exit_ok : exit_numerical;
}

int cmd_scan(const RunConfig& config, std::ostream& report) {
  const auto& s = config.scan;
  std::vector<std::pair<std::string, ScanResult>> results;
  std::string subject;

  if (s.kind == "sectorial") {
    const auto problem = lookup_problem(config);
    subject = config.problem;
    auto scans = sectorial_scan(problem, s.mu);
    for (std::size_t r = 0; r < scans.size(); ++r) {
      scans[r].metadata["ray"] = fmt(s.mu.rays[r], 17);
      results.emplace_back("_ray" + std::to_string(r), std::move(scans[r]));
    }
  } else {
    const auto k = lookup_kernel(config);
    subject = config.kernel;
    const auto& grid = config.grid;
    if (s.kind == "opnorm") {
      results.emplace_back("", opnorm_scan(k, s.s, s.t, grid, s.mu));
    } else if (s.kind == "mixed") {
      results.emplace_back("", mixed_scan(k, grid, s.mu, s.in_norm, s.out_norm, s.prefactor));
    } else {
      RBoundScanOptions options;
      options.in_norm = s.in_norm;
      options.out_norm = s.out_norm;
      options.prefactor = s.prefactor;
      options.search.p = s.eps_p;
      options.search.trials = s.trials;
      options.search.restarts = s.restarts;
      options.search.max_family = s.max_family;
      options.seed = config.seed;
      results.emplace_back("", rbound_scan(k, grid, s.mu, options));
    }
  }

  const auto header = header_lines(config);
  const auto dir = output_dir(config);
  const std::string config_json = to_json(config).dump();
  bool pass = true;
  report << "# version=" << version << "\n# config=" << config_json << '\n';
  for (auto& [suffix, scan] : results) {
    scan.metadata["kind"] = s.kind;
    scan.metadata["subject"] = subject;
    const std::string stem = "scan_" + s.kind + suffix;
    write_file(dir / (stem + ".csv"), [&](std::ostream& os) { write_scan_csv(os, scan, header); });
    write_file(dir / (stem + ".jsonl"),
               [&](std::ostream& os) { write_scan_jsonl(os, scan, config_json, version); });

    double peak = 0.0;
    for (const auto& row : scan.rows) peak = std::max(peak, row.norm);
    report << stem << ": rows=" << scan.rows.size() << " max=" << fmt(peak) << " slope=" << fmt(scan.slope)
           << " residual=" << fmt(scan.residual) << '\n';

    if ((s.expect_slope || s.slope_max) && scan.rows.size() < 5) {
      throw UsageError("a slope check needs at least 5 scan points per ray");
    }
    if (s.expect_slope && std::abs(scan.slope - *s.expect_slope) > s.slope_tol) {
      report << "FAIL: slope " << fmt(scan.slope) << " outside " << fmt(*s.expect_slope) << " +- " << fmt(s.slope_tol)
             << '\n';
      pass = false;
    }
    if (s.slope_max && !(scan.slope <= *s.slope_max)) {
      report << "FAIL: slope " << fmt(scan.slope) << " above " << fmt(*s.slope_max) << '\n';
      pass = false;
    }
  }
  if (s.expect_slope || s.slope_max) report << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? exit_ok : exit_numerical;
}

int cmd_solve(const RunConfig& config, std::ostream& report) {
  const auto& s = config.solve;
  const auto problem = lookup_problem(config);
  const auto [tangential, normal] = make_grids(config.grid);
  const auto g = make_data(s.data, tangential);
  const auto header = header_lines(config);
  const auto config_json = to_json(config);
  report << "# version=" << version << "\n# config=" << config_json.dump() << '\n';

  if (s.mode == "evolve") {
    const auto u0 = HalfSpaceField::zeros(tangential, normal);
    const auto traj = implicit_euler_evolve(problem, u0, g, {}, {}, s.dt, s.T);
    bool monotone = true;
    double worst = 0.0;
    for (std::size_t m = 0; m < traj.records.size(); ++m) {
      const auto& r = traj.records[m];
      worst = std::max(worst, r.max_residual);
      if (m > 0 && r.increment > traj.records[m - 1].increment * (1.0 + 1e-12)) monotone = false;
    }
    const bool pass = monotone && worst <= s.tolerance;
    write_file(output_dir(config) / "trajectory.jsonl", [&](std::ostream& os) {
      os << json{{"schema_version", scan_schema_version}, {"record", "header"}, {"version", version},
                 {"config", config_json}}
                .dump()
         << '\n';
      for (const auto& r : traj.records) {
        os << json{{"schema_version", scan_schema_version},
                   {"record", "step"},
                   {"t", r.t},
                   {"increment", r.increment},
                   {"boundary_norm", r.boundary_norm},
                   {"interior_norm", r.interior_norm},
                   {"max_residual", r.max_residual}}
                  .dump()
           << '\n';
      }
      os << json{{"schema_version", scan_schema_version},
                 {"record", "summary"},
                 {"steps", traj.records.size()},
                 {"monotone_increments", monotone},
                 {"max_residual", worst},
                 {"pass", pass}}
                .dump()
         << '\n';
    });
    const auto& last = traj.records.back();
    report << "steps=" << traj.records.size() << " t=" << fmt(last.t) << " |v|=" << fmt(last.boundary_norm)
           << " |u|=" << fmt(last.interior_norm) << " max_residual=" << fmt(worst)
           << " monotone_increments=" << (monotone ? "yes" : "no") << '\n';
    report << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? exit_ok : exit_numerical;
  }

  if (s.mu_abs < 1e-6) throw UsageError("|mu| must be at least 1e-6 (resolvent formulas divide by mu^2)");
  const cplx mu = std::polar(s.mu_abs, s.mu_arg);
  if (!problem.sector().contains(mu)) {
    throw DomainError("mu = " + fmt(s.mu_abs) + " exp(" + fmt(s.mu_arg) + "i) lies outside the sector |arg mu| < " +
                      fmt(problem.half_angle));
  }
  const auto out = boundary_resolvent(problem, g, mu, normal);
  const double residual = out.max_residual();
  const bool pass = residual <= s.tolerance;

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  for (const auto& v : out.v.samples) {
    vmin = std::min(vmin, v.real());
    vmax = std::max(vmax, v.real());
  }
  const auto dir = output_dir(config);
  write_file(dir / "solve_v.csv", [&](std::ostream& os) { write_boundary_csv(os, out.v, header); });
  if (out.u) write_file(dir / "solve_u.csv", [&](std::ostream& os) { write_halfspace_csv(os, *out.u, header); });
  const json doc{{"version", version},
                 {"config", config_json},
                 {"diagnostics", out.diagnostics},
                 {"fd_diagnostics", out.fd_diagnostics},
                 {"max_residual", residual},
                 {"v_real_range", {vmin, vmax}},
                 {"pass", pass}};
  write_file(dir / "solve.json", [&](std::ostream& os) { os << doc.dump(2) << '\n'; });

  report << "problem=" << to_string(problem.variant) << " mu=" << fmt(s.mu_abs) << "@" << fmt(s.mu_arg) << '\n';
  report << "Re v in [" << fmt(vmin, 12) << ", " << fmt(vmax, 12) << "]\n";
  for (const auto& [name, value] : out.diagnostics) report << "residual " << name << " = " << fmt(value) << '\n';
  for (const auto& [name, value] : out.fd_diagnostics) {
    report << "fd residual " << name << " = " << fmt(value) << " (not checked)\n";
  }
  report << (pass ? "PASS" : "FAIL") << ": max residual " << fmt(residual) << " vs tolerance " << fmt(s.tolerance)
         << '\n';
  return pass ? exit_ok : exit_numerical;
}

int cmd_lemma(const RunConfig& config, std::ostream& report) {
  const auto& l = config.lemma;
  report << "# version=" << version << "\n# config=" << to_json(config).dump() << '\n';
  bool pass = true;

  json max_rows = json::array();
  const double log_hi = std::log(1e4);
  for (double t : l.t) {
    const double closed = lemma_max_eval(l.a, l.rho, t);
    double brute = 0.0;
    for (int i = 0; i < l.brute_points; ++i) {
      const double s = std::exp(log_hi * i / (l.brute_points - 1));
      brute = std::max(brute, std::pow(s, l.a) * std::pow(1.0 + s * s * t * t, -l.rho / 2.0));
    }
    const double rel = std::abs(closed - brute) / closed;
    const bool ok = rel <= l.tolerance;
    pass = pass && ok;
    report << "max_s s^a <st>^-rho  t=" << fmt(t) << " closed=" << fmt(closed, 12) << " search=" << fmt(brute, 12)
           << " rel=" << fmt(rel, 3) << (ok ? "" : "  MISMATCH") << '\n';
    max_rows.push_back({{"t", t}, {"closed", closed}, {"search", brute}, {"rel_error", rel}, {"ok", ok}});
  }

  config.kpp.validate();
  KppLemmaOptions fine_opts = l.scan;
  fine_opts.points_per_decade *= 2;
  const auto base = kpp_lemma_scan(config.kpp, l.scan);
  const auto fine = kpp_lemma_scan(config.kpp, fine_opts);
  const double change1 = std::abs(fine.sup_m1 - base.sup_m1) / base.sup_m1;
  const double change2 = std::abs(fine.sup_m2 - base.sup_m2) / base.sup_m2;
  const bool bounded = std::isfinite(base.sup_m1) && std::isfinite(base.sup_m2) && change1 < 0.1 && change2 < 0.1;
  const bool gap = base.min_gap > 0.0 && fine.min_gap > 0.0;
  const bool ends = base.m1_small <= 0.01 * base.sup_m1 && base.m1_large <= 0.01 * base.sup_m1;
  pass = pass && bounded && gap && ends;
  report << "road-field multipliers (" << base.samples << " samples, refined " << fine.samples << ")\n";
  report << "  sup|m1| = " << fmt(base.sup_m1) << " -> " << fmt(fine.sup_m1) << " (change " << fmt(change1, 3)
         << ")\n";
  report << "  sup|m2| = " << fmt(base.sup_m2) << " -> " << fmt(fine.sup_m2) << " (change " << fmt(change2, 3)
         << ")\n";
  report << "  min|f - k| = " << fmt(base.min_gap) << " / " << fmt(fine.min_gap) << '\n';
  report << "  |m1| at the small / large sphere = " << fmt(base.m1_small) << " / " << fmt(base.m1_large) << '\n';
  report << (pass ? "PASS" : "FAIL") << '\n';

  auto scan_json = [](const KppLemmaResult& r) {
    return json{{"sup_m1", r.sup_m1}, {"sup_m2", r.sup_m2},     {"min_gap", r.min_gap},
                {"m1_small", r.m1_small}, {"m1_large", r.m1_large}, {"samples", r.samples}};
  };
  const json doc{{"version", version},       {"config", to_json(config)},   {"max_eval", max_rows},
                 {"kpp_base", scan_json(base)}, {"kpp_refined", scan_json(fine)}, {"pass", pass}};
  write_file(output_dir(config) / "lemma.json", [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return pass ? exit_ok : exit_numerical;
}

int run(const RunConfig& config, std::ostream& report, std::ostream& errors) {
  try {
    validate(config);
    if (config.command == "verify-symbol") return cmd_verify_symbol(config, report);
    if (config.command == "scan") return cmd_scan(config, report);
    if (config.command == "solve") return cmd_solve(config, report);
    return cmd_lemma(config, report);
  } catch (const IoError& e) {
    errors << "prb: " << e.what() << '\n';
    return exit_io;
  } catch (const UsageError& e) {
    errors << "prb: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError& e) {
    errors << "prb: " << e.what() << '\n';
    return exit_usage;
  } catch (const ParameterError& e) {
    errors << "prb: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    errors << "prb: " << e.what() << '\n';
    return exit_numerical;
  }
}

// ---------------------------------------------------------------------------

namespace {

void add_grid_flags(CLI::App* sub, GridConfig& g) {
  sub->add_option("--dim", g.dim, "Tangential dimension n-1")->capture_default_str();
  sub->add_option("--box-length", g.box_length, "Periodization length L")->capture_default_str();
  sub->add_option("--grid-n", g.points_per_dim, "Tangential points per dimension")->capture_default_str();
  sub->add_option("--grid-m", g.normal_count, "Normal nodes")->capture_default_str();
  sub->add_option("--normal-extent", g.normal_extent, "Normal grid extent")->capture_default_str();
  sub->add_option("--normal-ratio", g.normal_ratio, "Normal grid growth ratio")->capture_default_str();
}

void add_kpp_flags(CLI::App* sub, KppParams& k) {
  sub->add_option("--d", k.d, "Road-field diffusion d")->capture_default_str();
  sub->add_option("--dprime", k.d_prime, "Road-field diffusion d'")->capture_default_str();
  sub->add_option("--k", k.k, "Road-field exchange rate k")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Poisson-operator symbol, R-bound and dynamic-boundary resolvent experiments"};
  app.set_version_flag("--version", version);
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON run config; its values override flags");
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();

  auto* verify = app.add_subcommand("verify-symbol", "Seminorm table and refinement ratios of a catalog kernel");
  verify->add_option("--kernel", cfg.kernel, "Kernel name")->capture_default_str();
  verify->add_option("--class", cfg.kind, "strong or weak")->capture_default_str();
  verify->add_option("--N", cfg.N, "Highest seminorm order")->capture_default_str();
  verify->add_option("--half-angle", cfg.half_angle, "Sector half-angle")->capture_default_str();
  verify->add_option("--ppd", cfg.probe.points_per_decade, "Probe points per decade")->capture_default_str();
  add_kpp_flags(verify, cfg.kpp);

  std::string norm_family = to_string(cfg.scan.out_norm.family);
  std::optional<double> expect_slope;
  std::optional<double> slope_max;
  auto* scan = app.add_subcommand("scan", "mu-scan with log-log decay fit, written as CSV and JSON lines");
  scan->add_option("--kind", cfg.scan.kind, "opnorm, rbound, mixed or sectorial")->capture_default_str();
  scan->add_option("--kernel", cfg.kernel, "Kernel name")->capture_default_str();
  scan->add_option("--problem", cfg.problem, "Problem for sectorial scans")->capture_default_str();
  scan->add_option("--s", cfg.scan.s, "Tangential smoothness s (opnorm)")->capture_default_str();
  scan->add_option("--t", cfg.scan.t, "Normal smoothness t (opnorm)")->capture_default_str();
  scan->add_option("--prefactor", cfg.scan.prefactor, "Exponent e of the <mu>^e weight")->capture_default_str();
  scan->add_option("--norm", norm_family, "Output norm family")->capture_default_str();
  scan->add_option("--p", cfg.scan.out_norm.p, "Output norm exponent p")->capture_default_str();
  scan->add_option("--q", cfg.scan.out_norm.q, "Output norm inner exponent q")->capture_default_str();
  scan->add_option("--m", cfg.scan.out_norm.m, "Normal derivatives in the output norm")->capture_default_str();
  scan->add_flag("--weak,!--strong", cfg.scan.out_norm.weak, "Weak or strong L^p in the normal direction");
  scan->add_option("--eps-p", cfg.scan.eps_p, "Rademacher average exponent")->capture_default_str();
  scan->add_option("--trials", cfg.scan.trials, "Rademacher trials")->capture_default_str();
  scan->add_option("--restarts", cfg.scan.restarts, "Random restarts")->capture_default_str();
  scan->add_option("--max-family", cfg.scan.max_family, "Largest sub-family size")->capture_default_str();
  scan->add_option("--rays", cfg.scan.mu.rays, "Ray angles arg mu")->capture_default_str();
  scan->add_option("--mu-min", cfg.scan.mu.min_abs, "Smallest |mu|")->capture_default_str();
  scan->add_option("--mu-max", cfg.scan.mu.max_abs, "Largest |mu|")->capture_default_str();
  scan->add_option("--points", cfg.scan.mu.points, "Points per ray")->capture_default_str();
  scan->add_option("--expect-slope", expect_slope, "Required fitted slope");
  scan->add_option("--slope-tol", cfg.scan.slope_tol, "Tolerance for --expect-slope")->capture_default_str();
  scan->add_option("--slope-max", slope_max, "Upper bound for the fitted slope");
  scan->add_option("--half-angle", cfg.half_angle, "Sector half-angle")->capture_default_str();
  add_grid_flags(scan, cfg.grid);
  add_kpp_flags(scan, cfg.kpp);

  bool evolve = false;
  std::optional<double> mu_flag;
  auto* solve = app.add_subcommand("solve", "Resolvent solve or implicit Euler run of a dynamic boundary problem");
  solve->add_option("--problem", cfg.problem, "heat-dynbc, ch-boundary or kpp")->capture_default_str();
  solve->add_option("--mu", mu_flag, "|mu| of the resolvent parameter");
  solve->add_option("--mu-arg", cfg.solve.mu_arg, "arg mu")->capture_default_str();
  solve->add_option("--g", cfg.solve.data.name, "Boundary data: const, mode or gaussian")->capture_default_str();
  solve->add_option("--g-amplitude", cfg.solve.data.amplitude, "Data amplitude")->capture_default_str();
  solve->add_option("--g-index", cfg.solve.data.index, "Wave number for mode data")->capture_default_str();
  solve->add_option("--g-width", cfg.solve.data.width, "Width for gaussian data")->capture_default_str();
  solve->add_flag("--evolve", evolve, "Run implicit Euler instead of one resolvent solve");
  solve->add_option("--dt", cfg.solve.dt, "Time step")->capture_default_str();
  solve->add_option("--T", cfg.solve.T, "Final time")->capture_default_str();
  solve->add_option("--tol", cfg.solve.tolerance, "Residual tolerance")->capture_default_str();
  solve->add_option("--half-angle", cfg.half_angle, "Sector half-angle")->capture_default_str();
  add_grid_flags(solve, cfg.grid);
  add_kpp_flags(solve, cfg.kpp);

  auto* lemma = app.add_subcommand("lemma", "Closed-form maximum check and road-field multiplier scan");
  lemma->add_option("--a", cfg.lemma.a, "Exponent a")->capture_default_str();
  lemma->add_option("--rho", cfg.lemma.rho, "Exponent rho")->capture_default_str();
  lemma->add_option("--t", cfg.lemma.t, "Values of t")->capture_default_str();
  lemma->add_option("--brute-points", cfg.lemma.brute_points, "Search points in s")->capture_default_str();
  lemma->add_option("--ppd", cfg.lemma.scan.points_per_decade, "Lattice points per decade")->capture_default_str();
  add_kpp_flags(lemma, cfg.kpp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (const auto subs = app.get_subcommands(); !subs.empty()) cfg.command = subs.front()->get_name();
    cfg.scan.out_norm.family = norm_family_from_string(norm_family);
    cfg.scan.expect_slope = expect_slope;
    cfg.scan.slope_max = slope_max;
    if (mu_flag) cfg.solve.mu_abs = *mu_flag;
    if (evolve) cfg.solve.mode = "evolve";
    if (!config_path.empty()) {
      const std::string from_flags = cfg.command;
      apply_json(cfg, read_config_file(config_path));
      if (!from_flags.empty() && cfg.command != from_flags) {
        throw UsageError("config command '" + cfg.command + "' differs from subcommand '" + from_flags + "'");
      }
    }
    if (cfg.command.empty()) throw UsageError("no subcommand given (verify-symbol, scan, solve, lemma)");
  } catch (const IoError& e) {
    std::cerr << "prb: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "prb: " << e.what() << '\n';
    return exit_usage;
  }
  return run(cfg, std::cout, std::cerr);
}

}  // namespace prb::cli
