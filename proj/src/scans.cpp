#include "prb/scans.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "finite_diff.hpp"

namespace prb {

int worker_count() {
  const char* env = std::getenv("PRB_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 256));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void MuScan::validate() const {
  if (rays.empty()) throw ParameterError("mu scan: at least one ray is required");
  if (!(min_abs > 0.0 && max_abs > min_abs)) throw ParameterError("mu scan: need 0 < min < max");
  if (points < 2) throw ParameterError("mu scan: at least two points are required");
}

std::vector<double> MuScan::moduli() const { return detail::logspace(min_abs, max_abs, points); }

namespace {

ScanResult finish(ScanResult scan) {
  if (scan.rows.size() >= 5) {
    const auto fit = decay_fit(scan);
    scan.slope = fit.slope;
    scan.residual = fit.residual;
  }
  return scan;
}

}  // namespace

ScanResult opnorm_scan(const SymbolKernel& k, double s, double t, const GridConfig& grids, const MuScan& scan) {
  scan.validate();
  const auto [tangential, normal] = make_grids(grids);
  const auto moduli = scan.moduli();
  std::vector<ScanRow> rows(moduli.size() * scan.rays.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    const double r = moduli[idx % moduli.size()];
    const double a = scan.rays[idx / moduli.size()];
    rows[idx] = {r, a, opnorm_hilbert(k, std::polar(r, a), s, t, tangential, normal)};
  });
  ScanResult out;
  out.rows = std::move(rows);
  return finish(std::move(out));
}

ScanResult rbound_scan(const SymbolKernel& k, const GridConfig& grids, const MuScan& scan,
                       const RBoundScanOptions& options) {
  scan.validate();
  const auto [tangential, normal] = make_grids(grids);
  const auto dictionary = probe_dictionary(tangential);
  std::vector<AnyField> inputs(dictionary.begin(), dictionary.end());
  const auto moduli = scan.moduli();
  const RademacherSampler root(options.seed);
  std::vector<ScanRow> rows(moduli.size());
  parallel_for(moduli.size(), [&](std::size_t i) {
    const double r = moduli[i];
    const double weight = std::pow(bracket(0.0, cplx(r)), options.prefactor);
    std::vector<OperatorEntry> ops;
    for (double a : scan.rays) {
      const cplx mu = std::polar(r, a);
      ops.push_back({mu, [&, mu, weight](const AnyField& g) -> AnyField {
                       auto u = apply_poisson(k, mu, std::get<BoundaryField>(g), normal);
                       for (auto& v : u.samples) v *= weight;
                       return u;
                     }});
    }
    RBoundOptions search = options.search;
    search.in_norm = options.in_norm;
    search.out_norm = options.out_norm;
    const auto est = rbound_lower(ops, inputs, search, root.split(i));
    rows[i] = {r, 0.0, est.value};
  });
  ScanResult out;
  out.rows = std::move(rows);
  out.seed = options.seed;
  return finish(std::move(out));
}

ScanResult mixed_scan(const SymbolKernel& k, const GridConfig& grids, const MuScan& scan, const NormSpec& in_norm,
                      const NormSpec& out_norm, double prefactor) {
  scan.validate();
  in_norm.validate();
  out_norm.validate();
  const auto [tangential, normal] = make_grids(grids);
  const auto dictionary = probe_dictionary(tangential);
  std::vector<double> in_norms(dictionary.size());
  for (std::size_t d = 0; d < dictionary.size(); ++d) in_norms[d] = evaluate_norm(in_norm, dictionary[d]);
  const auto moduli = scan.moduli();
  std::vector<ScanRow> rows(moduli.size() * scan.rays.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    const double r = moduli[idx % moduli.size()];
    const double a = scan.rays[idx / moduli.size()];
    const cplx mu = std::polar(r, a);
    const double weight = std::pow(bracket(0.0, mu), prefactor);
    double best = 0.0;
    for (std::size_t d = 0; d < dictionary.size(); ++d) {
      best = std::max(best, weight * evaluate_norm(out_norm, apply_poisson(k, mu, dictionary[d], normal)) / in_norms[d]);
    }
    rows[idx] = {r, a, best};
  });
  ScanResult out;
  out.rows = std::move(rows);
  return finish(std::move(out));
}

std::vector<ScanResult> sectorial_scan(const DynBCProblem& problem, const MuScan& scan) {
  problem.validate();
  scan.validate();
  const auto [tangential, normal] = make_grids(problem.grids);
  const auto dictionary = probe_dictionary(tangential);
  const auto moduli = scan.moduli();
  std::vector<ScanResult> out(scan.rays.size());
  std::vector<ScanRow> rows(moduli.size() * scan.rays.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    const double r = moduli[idx % moduli.size()];
    const double a = scan.rays[idx / moduli.size()];
    const cplx mu = std::polar(r, a);
    double best = 0.0;
    for (const auto& g : dictionary) best = std::max(best, scaled_resolvent_ratio(problem, g, mu, normal));
    rows[idx] = {r, a, best};
  });
  for (std::size_t ray = 0; ray < scan.rays.size(); ++ray) {
    ScanResult s;
    s.rows.assign(rows.begin() + ray * moduli.size(), rows.begin() + (ray + 1) * moduli.size());
    out[ray] = finish(std::move(s));
  }
  return out;
}

}  // namespace prb
