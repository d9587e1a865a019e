// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: prb_acceptance [criterion-id ...]   (no arguments runs everything)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "prb/core.hpp"
#include "prb/dynbc.hpp"
#include "prb/norms.hpp"
#include "prb/rbound.hpp"
#include "prb/scans.hpp"
#include "prb/symbols.hpp"
#include "prb/transforms.hpp"

using namespace prb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double slope_of(const std::vector<ScanRow>& rows) {
  ScanResult s;
  s.rows = rows;
  return decay_fit(s).slope;
}

BoundaryField random_field(const TangentialGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  BoundaryField f = BoundaryField::zeros(grid);
  for (auto& v : f.samples) v = cplx(n(rng), n(rng));
  return f;
}

// Example: slope s - r/2 of the H^s -> H^{s+(1-r)/2} operator norm.
Outcome example_slopes() {
  GridConfig grids;
  grids.box_length = 2.0 * pi / 16.0;
  MuScan scan;
  scan.min_abs = 1.0;
  scan.max_abs = 1e3;
  scan.points = 20;
  const auto heat = catalog::heat_kernel();
  const double cases[][2] = {{0.0, 0.0}, {0.25, 0.0}, {0.0, 1.0}, {0.25, 0.5}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const double s = c[0], r = c[1];
    const auto start = std::chrono::steady_clock::now();
    const auto res = opnorm_scan(heat, s, s + 0.5 * (1.0 - r), grids, scan);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double expected = s - 0.5 * r;
    const bool pass = std::abs(res.slope - expected) <= 0.05 && secs <= 30.0;
    ok = ok && pass;
    detail += fmt("(s=%.2f,r=%.2f) slope=%.4f expected=%.3f %.1fs; ", s, r, res.slope, expected, secs);
  }
  return {ok, detail};
}

Outcome closed_form_anchor() {
  GridConfig grids;
  grids.box_length = 2.0 * pi / 16.0;
  MuScan scan;
  scan.points = 20;
  const auto res = opnorm_scan(catalog::heat_kernel(), 0.0, 0.0, grids, scan);
  double worst = 0.0;
  for (const auto& row : res.rows) {
    const double exact = std::pow(2.0 * std::sqrt(1.0 + row.abs_mu * row.abs_mu), -0.5);
    worst = std::max(worst, std::abs(row.norm / exact - 1.0));
  }
  return {worst <= 0.02, fmt("max relative deviation %.3e over %zu points", worst, res.rows.size())};
}

GridConfig rbound_grid(bool refined) {
  GridConfig g;
  g.points_per_dim = refined ? 128 : 64;
  g.normal_count = refined ? 255 : 128;
  g.normal_ratio = refined ? std::sqrt(1.1) : 1.1;
  return g;
}

MuScan rbound_mu() {
  MuScan scan;
  const double a = 0.7 * pi / 4.0;
  scan.rays = {0.0, a, -a};
  scan.min_abs = 1.0;
  scan.max_abs = 1e3;
  scan.points = 12;
  return scan;
}

struct RBoundCase {
  double p;
  bool weak;
  double prefactor;
};

Outcome rbound_case(const RBoundCase& c, double slope_cap_low, double slope_cap_high, std::string& detail) {
  RBoundScanOptions opts;
  opts.in_norm = NormSpec::lp(2.0);
  opts.out_norm = NormSpec::mixed(c.p, 2.0, c.weak);
  opts.prefactor = c.prefactor;
  opts.search.p = 2.0;
  opts.search.trials = 16;
  opts.search.restarts = 8;
  opts.seed = 20240601;
  const auto heat = catalog::heat_kernel();
  const auto base = rbound_scan(heat, rbound_grid(false), rbound_mu(), opts);
  const auto fine = rbound_scan(heat, rbound_grid(true), rbound_mu(), opts);
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < base.rows.size(); ++i) worst_ratio = std::max(worst_ratio, fine.rows[i].norm / base.rows[i].norm);
  const bool pass = base.slope >= slope_cap_low && base.slope <= slope_cap_high && fine.slope >= slope_cap_low &&
                    fine.slope <= slope_cap_high && worst_ratio <= 1.1;
  detail += fmt("p=%.1f %s slope=%.4f refined=%.4f max refine ratio=%.4f; ", c.p, c.weak ? "weak" : "strong",
                base.slope, fine.slope, worst_ratio);
  return {pass, ""};
}

Outcome rbound_weak_scans() {
  bool ok = true;
  std::string detail;
  const auto start = std::chrono::steady_clock::now();
  for (double p : {1.5, 2.0, 4.0}) ok = rbound_case({p, true, 1.0 / p}, -0.1, 0.1, detail).pass && ok;
  for (double p : {2.0, 4.0}) ok = rbound_case({p, false, 1.0 / p}, -0.1, 0.1, detail).pass && ok;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail += fmt("%.1fs", secs);
  return {ok && secs <= 300.0, detail};
}

Outcome rbound_eps_loss() {
  std::string detail;
  const auto start = std::chrono::steady_clock::now();
  const bool ok = rbound_case({1.5, false, 1.0 / 1.5 - 0.05}, -std::numeric_limits<double>::infinity(), 0.1, detail).pass;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail += fmt("%.1fs", secs);
  return {ok && secs <= 120.0, detail};
}

Outcome lemma_max() {
  const auto start = std::chrono::steady_clock::now();
  const int n = 100000;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = std::pow(10.0, 4.0 * i / (n - 1));
  double worst = 0.0;
  int tuples = 0;
  for (double rho : {1.5, 2.0, 3.0}) {
    for (double frac : {0.3, 0.7, 0.9}) {
      for (double t : {1e-3, 1.0, 1e3}) {
        const double a = frac * rho;
        double brute = 0.0;
        for (double si : s) brute = std::max(brute, std::pow(si, a) * std::pow(1.0 + si * si * t * t, -0.5 * rho));
        worst = std::max(worst, std::abs(lemma_max_eval(a, rho, t) / brute - 1.0));
        ++tuples;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-6 && secs <= 5.0, fmt("%d tuples, max relative error %.3e, %.2fs", tuples, worst, secs)};
}

Outcome weak_lp_equality() {
  const std::size_t n = 1000000;
  const double lo = 1e-12, hi = 1e4;
  std::vector<double> edges(n + 1);
  for (std::size_t k = 0; k <= n; ++k) edges[k] = lo * std::pow(hi / lo, static_cast<double>(k) / n);
  edges.back() = hi;
  std::vector<double> values(n), measures(n);
  bool ok = true;
  std::string detail;
  for (double p : {1.5, 2.0, 4.0}) {
    for (std::size_t k = 0; k < n; ++k) {
      const double mid = std::sqrt(edges[k] * edges[k + 1]);
      values[k] = std::pow(mid, -1.0 / p);
      measures[k] = edges[k + 1] - edges[k];
    }
    const double w = weak_lp_norm(values, measures, p);
    ok = ok && std::abs(w - 1.0) <= 0.02;
    detail += fmt("p=%.1f -> %.6f; ", p, w);
  }
  return {ok, detail};
}

Outcome resolvent_exactness() {
  const auto [grid, normal] = make_grids(GridConfig{1, 2.0 * pi, 32, 256, 16.0, 1.05});
  const int wave[] = {3};
  const auto g = BoundaryField::mode(grid, mode_index(grid, wave));
  HalfSpaceField f = HalfSpaceField::zeros(grid, normal);
  for (std::size_t j = 0; j < normal.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) f.at(i, j) = g.samples[i] * std::exp(-normal.node(j));
  }
  double worst = 0.0;
  for (cplx mu : {cplx(1.0), std::polar(2.0, 0.5), std::polar(10.0, -0.7)}) {
    worst = std::max(worst, heat_dynbc_resolvent(f, g, mu).max_residual());
    worst = std::max(worst, heat_dynbc_resolvent(HalfSpaceField::zeros(grid, normal), g, mu).max_residual());
    worst = std::max(worst, ch_boundary_solve(g, mu).max_residual());
    worst = std::max(worst, kpp_resolvent(g, mu, KppParams{2.0, 0.5, 3.0}, normal).max_residual());
  }
  const auto one = BoundaryField::from_function(grid, [](std::span<const double>) { return cplx(1.0); });
  const auto kpp = kpp_resolvent(one, 1.0, KppParams{}, normal);
  double dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dev = std::max(dev, std::abs(kpp.u->at(i, 0) - 1.0 / 3.0));
    dev = std::max(dev, std::abs(kpp.v.samples[i] - 2.0 / 3.0));
  }
  return {worst <= 1e-8 && dev <= 1e-10, fmt("max residual %.3e; worked point deviation %.3e", worst, dev)};
}

Outcome sectoriality() {
  bool ok = true;
  std::string detail;
  MuScan scan;
  const double a = 0.7 * pi / 4.0;
  scan.rays = {0.0, a, -a};
  scan.min_abs = 0.1;
  scan.max_abs = 1e3;
  scan.points = 20;
  for (auto variant : {DynBCVariant::HeatDynBC, DynBCVariant::CahnHilliardBoundary, DynBCVariant::KPPRoadField}) {
    DynBCProblem problem;
    problem.variant = variant;
    problem.grids = GridConfig{1, 2.0 * pi, 64, 128, 16.0, 1.1};
    const auto start = std::chrono::steady_clock::now();
    const auto scans = sectorial_scan(problem, scan);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail += to_string(variant) + ":";
    for (const auto& s : scans) {
      double top = 0.0;
      for (const auto& row : s.rows) top = std::max(top, row.norm);
      ok = ok && std::abs(s.slope) <= 0.1 && std::isfinite(top);
      // Tail slope over |mu| >= 10, reported for context only.
      std::vector<ScanRow> tail;
      for (const auto& row : s.rows) {
        if (row.abs_mu >= 10.0) tail.push_back(row);
      }
      detail += fmt(" slope=%.3f (|mu|>=10: %.3f) max=%.3f", s.slope, slope_of(tail), top);
    }
    ok = ok && secs <= 120.0;
    detail += fmt(" %.1fs; ", secs);
  }
  return {ok, detail};
}

Outcome lemma_kpp() {
  KppLemmaOptions base;
  KppLemmaOptions fine = base;
  fine.points_per_decade *= 2;
  bool ok = true;
  std::string detail;
  for (const auto& params : {KppParams{}, KppParams{2.0, 0.5, 3.0}}) {
    const auto a = kpp_lemma_scan(params, base);
    const auto b = kpp_lemma_scan(params, fine);
    const double c1 = std::abs(b.sup_m1 / a.sup_m1 - 1.0);
    const double c2 = std::abs(b.sup_m2 / a.sup_m2 - 1.0);
    const double top = std::max(a.sup_m1, b.sup_m1);
    const bool pass = std::isfinite(a.sup_m1) && std::isfinite(a.sup_m2) && c1 < 0.1 && c2 < 0.1 && a.min_gap > 0.0 &&
                      b.min_gap > 0.0 && a.m1_small <= 0.01 * top && a.m1_large <= 0.01 * top;
    ok = ok && pass;
    detail += fmt("(d=%.1f,d'=%.1f,k=%.1f) sup|m1|=%.4f sup|m2|=%.4f change=%.3f/%.3f min gap=%.3e ends=%.2e/%.2e; ",
                  params.d, params.d_prime, params.k, a.sup_m1, a.sup_m2, c1, c2, std::min(a.min_gap, b.min_gap),
                  a.m1_small / top, a.m1_large / top);
  }
  return {ok, detail};
}

// Manufactured solution u = e^{-t} e^{-x_n}, v = e^{-t}, f = -e^{-t} e^{-x_n}, g = 0.
double euler_error(double dt) {
  DynBCProblem problem;
  problem.grids = GridConfig{1, 2.0 * pi, 8, 1024, 16.0, 1.01};
  const auto [grid, normal] = make_grids(problem.grids);
  HalfSpaceField u0 = HalfSpaceField::zeros(grid, normal);
  for (std::size_t j = 0; j < normal.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) u0.at(i, j) = std::exp(-normal.node(j));
  }
  auto v0 = BoundaryField::from_function(grid, [](std::span<const double>) { return cplx(1.0); });
  InteriorSource f = [u0](double t) {
    HalfSpaceField s = u0;
    for (auto& v : s.samples) v *= -std::exp(-t);
    return s;
  };
  const auto traj = implicit_euler_evolve(problem, u0, v0, f, {}, dt, 1.0);
  double err = 0.0;
  for (const auto& v : traj.v.samples) err = std::max(err, std::abs(v - std::exp(-1.0)));
  return err;
}

Outcome euler_order() {
  const double e1 = euler_error(0.02), e2 = euler_error(0.01), e3 = euler_error(0.005);
  const double r1 = e1 / e2, r2 = e2 / e3;
  const bool ok = std::abs(r1 - 2.0) <= 0.2 && std::abs(r2 - 2.0) <= 0.2;
  return {ok, fmt("errors %.3e %.3e %.3e, ratios %.3f %.3f", e1, e2, e3, r1, r2)};
}

std::string serialized_rbound_scan() {
  RBoundScanOptions opts;
  opts.out_norm = NormSpec::mixed(2.0, 2.0, true);
  opts.search.trials = 8;
  opts.search.restarts = 4;
  opts.seed = 99;
  MuScan scan = rbound_mu();
  scan.points = 5;
  const auto res = rbound_scan(catalog::heat_kernel(), GridConfig{1, 2.0 * pi, 32, 64, 16.0, 1.2}, scan, opts);
  std::ostringstream os;
  write_scan_csv(os, res, {"determinism probe"});
  return os.str();
}

Outcome infrastructure() {
  std::string detail;
  bool ok = true;
  for (int dim : {1, 2}) {
    const TangentialGrid grid(dim, 2.0 * pi, dim == 1 ? 256 : 32);
    const auto g = random_field(grid, 7 + dim);
    const auto spec = fft_forward(grid, g.samples);
    const double plancherel = std::abs(spectral_l2_norm(grid, spec) / lp_norm(g, 2.0) - 1.0);
    const auto blocks = lp_blocks(g, LPPartition::for_grid(grid));
    double recon = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      cplx acc = 0.0;
      for (const auto& b : blocks) acc += b.samples[i];
      recon = std::max(recon, std::abs(acc - g.samples[i]));
      scale = std::max(scale, std::abs(g.samples[i]));
    }
    recon /= scale;
    ok = ok && plancherel <= 1e-12 && recon <= 1e-12;
    detail += fmt("dim %d: Plancherel %.2e, partition %.2e; ", dim, plancherel, recon);
  }
  const TangentialGrid grid(1, 2.0 * pi, 64);
  std::vector<AnyField> fields;
  for (int k = 0; k < 4; ++k) fields.push_back(random_field(grid, 100 + k));
  RademacherSampler sampler(5);
  const auto exact = eps_p_norm(fields, 2.0, NormSpec::lp(2.0), 1, sampler);
  const auto mc = eps_p_norm(fields, 2.0, NormSpec::lp(2.0), 4000, sampler, false);
  const double z = std::abs(mc.value - exact.value) / mc.std_error;
  ok = ok && exact.exact && z <= 3.0;
  detail += fmt("eps exact %.5f vs MC %.5f (%.2f stderr); ", exact.value, mc.value, z);
  const bool same = serialized_rbound_scan() == serialized_rbound_scan();
  ok = ok && same;
  detail += same ? "reruns byte-identical" : "reruns differ";
  return {ok, detail};
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"c01", "operator-norm slopes s - r/2", example_slopes},
      {"c02", "closed-form operator norm at t = s = 0", closed_form_anchor},
      {"c03", "weak/strong R-bound scans with <mu>^{1/p}", rbound_weak_scans},
      {"c04", "epsilon-loss scan p = 1.5", rbound_eps_loss},
      {"c05", "maximum lemma closed form", lemma_max},
      {"c06", "weak-Lp equality case", weak_lp_equality},
      {"c07", "resolvent residuals and road-field worked point", resolvent_exactness},
      {"c08", "scaled resolvent scans bounded with slope 0", sectoriality},
      {"c09", "road-field symbols bounded and vanishing at both ends", lemma_kpp},
      {"c10", "implicit Euler first order", euler_order},
      {"c11", "Plancherel, partition of unity, eps paths, determinism", infrastructure},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
