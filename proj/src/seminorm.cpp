#include <algorithm>
#include <cmath>
#include <limits>

#include "finite_diff.hpp"
#include "prb/symbols.hpp"

namespace prb {

namespace {

int points_for(double lo, double hi, int per_decade) {
  const double decades = std::log10(hi / lo);
  return std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
}

// S(m, j): Stirling numbers of the second kind, (t d/dt)^m = sum_j S(m,j) t^j (d/dt)^j.
double stirling2(int m, int j) {
  static const double table[5][5] = {
      {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 1, 1, 0, 0}, {0, 1, 3, 1, 0}, {0, 1, 7, 6, 1}};
  return table[m][j];
}

struct ProbePoint {
  std::vector<double> xi;
  std::optional<cplx> mu;
};

std::vector<ProbePoint> xi_mu_lattice(int dim, const Sector& sector, const ProbeSpec& probe) {
  std::vector<std::vector<double>> xis;
  xis.push_back(std::vector<double>(dim, 0.0));
  const auto dirs = detail::probe_directions(dim);
  for (double r : detail::logspace(probe.xi_min, probe.xi_max, points_for(probe.xi_min, probe.xi_max, probe.points_per_decade))) {
    for (const auto& d : dirs) {
      std::vector<double> xi(dim);
      for (int a = 0; a < dim; ++a) xi[a] = r * d[a];
      xis.push_back(std::move(xi));
    }
  }
  std::vector<std::optional<cplx>> mus;
  if (sector.is_empty()) {
    mus.push_back(std::nullopt);
  } else {
    for (double r : probe.mu_magnitudes()) {
      for (double a : probe.ray_angles(sector)) mus.push_back(std::polar(r, a));
    }
  }
  std::vector<ProbePoint> out;
  out.reserve(xis.size() * mus.size());
  for (const auto& xi : xis) {
    for (const auto& mu : mus) out.push_back({xi, mu});
  }
  return out;
}

void check_finite(cplx v, const std::string& who) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError(who + ": kernel not evaluable at a probe point");
}

}  // namespace

ProbeSpec ProbeSpec::refined() const {
  ProbeSpec r = *this;
  r.points_per_decade = 2 * points_per_decade;
  r.xi_min = xi_min / 4.0;
  r.xi_max = xi_max * 4.0;
  r.mu_min = mu_min / 4.0;
  r.mu_max = mu_max * 4.0;
  r.t_min = t_min / 4.0;
  r.t_max = t_max * 4.0;
  r.rays = std::max(rays, 2 * rays - 1);
  return r;
}

void ProbeSpec::validate() const {
  if (!(xi_min > 0.0 && xi_max > xi_min)) throw ParameterError("probe: need 0 < xi_min < xi_max");
  if (!(mu_min > 0.0 && mu_max >= mu_min)) throw ParameterError("probe: need 0 < mu_min <= mu_max");
  if (!(t_min > 0.0 && t_max > t_min)) throw ParameterError("probe: need 0 < t_min < t_max");
  if (points_per_decade < 1 || rays < 1) throw ParameterError("probe: lattice counts must be positive");
  if (!(rel_step > 0.0 && rel_step < 0.1)) throw ParameterError("probe: rel_step must lie in (0, 0.1)");
  if (!(edge_margin >= 0.0)) throw ParameterError("probe: edge margin must be nonnegative");
}

std::vector<double> ProbeSpec::xi_magnitudes() const {
  std::vector<double> out{0.0};
  auto rest = detail::logspace(xi_min, xi_max, points_for(xi_min, xi_max, points_per_decade));
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<double> ProbeSpec::mu_magnitudes() const {
  if (mu_max == mu_min) return {mu_min};
  return detail::logspace(mu_min, mu_max, points_for(mu_min, mu_max, points_per_decade));
}

std::vector<double> ProbeSpec::t_values() const {
  std::vector<double> out{0.0};
  auto rest = detail::logspace(t_min, t_max, points_for(t_min, t_max, points_per_decade));
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<double> ProbeSpec::ray_angles(const Sector& sector) const {
  if (sector.is_empty()) return {};
  const double lo = sector.alpha() + edge_margin;
  const double hi = sector.beta() - edge_margin;
  if (rays == 1 || !(hi > lo)) return {0.5 * (sector.alpha() + sector.beta())};
  std::vector<double> out(rays);
  for (int i = 0; i < rays; ++i) out[i] = lo + (hi - lo) * i / (rays - 1);
  return out;
}

double seminorm_as(const SymbolKernel& k, KernelKind kind, int N, const ProbeSpec& probe) {
  if (N < 0 || N > 4) throw ParameterError("seminorm: N must lie in 0..4");
  probe.validate();
  const bool has_mu = !k.sector.is_empty();
  // Catalog kernels depend on |xi'| only, so one tangential variable suffices.
  const int dim = 1;
  const std::size_t nmu = has_mu ? 2 : 0;
  const std::size_t nsym = static_cast<std::size_t>(dim) + nmu;  // xi components, Re mu, Im mu
  const auto sym_indices = detail::multi_indices(nsym, N);
  const auto lattice = xi_mu_lattice(dim, k.sector, probe);
  const auto ts = probe.t_values();

  double best = 0.0;
  std::unordered_map<std::uint64_t, cplx> cache;
  std::vector<double> point(nsym + 1);
  std::vector<double> steps(nsym + 1);
  std::vector<int> orders(nsym + 1);

  for (const auto& pp : lattice) {
    const double w = bracket(pp.xi, pp.mu);
    for (double t : ts) {
      check_finite(eval_scaled(k, pp.xi, pp.mu, t), k.name);
      cache.clear();
      for (int a = 0; a < dim; ++a) point[a] = pp.xi[a];
      if (has_mu) {
        point[dim] = pp.mu->real();
        point[dim + 1] = pp.mu->imag();
      }
      point[nsym] = t;
      for (std::size_t v = 0; v < nsym; ++v) steps[v] = probe.rel_step * w;
      steps[nsym] = probe.rel_step;
      const bool t_forward = t < 2.0 * steps[nsym];
      // The evaluator is used directly: stencil points may leave the sector by a few steps.
      auto scaled = [&](std::span<const double> p) {
        std::span<const double> xi = p.subspan(0, dim);
        std::optional<cplx> mu;
        if (has_mu) mu = cplx(p[dim], p[dim + 1]);
        return k.fn(xi, mu, p[nsym] / bracket(xi, mu));
      };
      for (const auto& idx : sym_indices) {
        int sym_order = 0;
        for (std::size_t v = 0; v < nsym; ++v) {
          sym_order += idx[v];
          orders[v] = idx[v];
        }
        const int t_budget = N - sym_order;
        const double sym_weight = std::pow(w, -k.order + sym_order);
        std::vector<cplx> dt(t_budget + 1);
        for (int j = 0; j <= t_budget; ++j) {
          orders[nsym] = j;
          bool fwd[4] = {false, false, false, false};
          fwd[nsym] = t_forward;
          dt[j] = detail::mixed_derivative(scaled, point, orders, steps, std::span<const bool>(fwd, nsym + 1), cache);
        }
        if (kind == KernelKind::strong) {
          for (int j = 0; j <= t_budget; ++j) {
            const double tw = std::max(1.0, std::pow(t, t_budget - j));
            best = std::max(best, std::abs(dt[j]) * tw * sym_weight);
          }
        } else {
          for (int m = 0; m <= t_budget; ++m) {
            cplx val = m == 0 ? dt[0] : cplx(0.0);
            for (int j = 1; j <= m; ++j) val += stirling2(m, j) * std::pow(t, j) * dt[j];
            const double tw = std::pow(std::sqrt(1.0 + t * t), t_budget - m);
            best = std::max(best, std::abs(val) * tw * sym_weight);
          }
        }
      }
    }
  }
  return best;
}

double seminorm(const SymbolKernel& k, int N, const ProbeSpec& probe) { return seminorm_as(k, k.kind, N, probe); }

double char_lp_bound(const SymbolKernel& k, double p, int l, int lp, std::span<const int> alpha,
                     const ProbeSpec& probe, const NormalGrid& normal) {
  if (!(p >= 1.0)) throw ParameterError("char_lp_bound: p must lie in [1, inf]");
  if (k.kind != KernelKind::strong) throw ParameterError("char_lp_bound: kernel must be of strong kind");
  if (l < 0 || lp < 0) throw ParameterError("char_lp_bound: derivative orders must be nonnegative");
  int alpha_order = 0;
  for (int a : alpha) {
    if (a < 0) throw ParameterError("char_lp_bound: negative multi-index");
    alpha_order += a;
  }
  if (lp + alpha_order > 3) throw ParameterError("char_lp_bound: lp + |alpha| must not exceed 3");
  probe.validate();
  const int dim = alpha.empty() ? 1 : static_cast<int>(alpha.size());
  const bool inf = std::isinf(p);
  const double inv_p = inf ? 0.0 : 1.0 / p;
  const auto lattice = xi_mu_lattice(dim, k.sector, probe);

  std::vector<int> orders(dim + 1, 0);
  for (int a = 0; a < dim; ++a) orders[a] = alpha.empty() ? 0 : alpha[a];
  orders[dim] = lp;
  std::vector<double> point(dim + 1), steps(dim + 1);
  std::unordered_map<std::uint64_t, cplx> cache;
  double best = 0.0;
  for (const auto& pp : lattice) {
    const double w = bracket(pp.xi, pp.mu);
    for (int a = 0; a < dim; ++a) {
      point[a] = pp.xi[a];
      steps[a] = probe.rel_step * w;
    }
    steps[dim] = probe.rel_step / w;
    auto fn = [&](std::span<const double> q) { return k.fn(q.subspan(0, dim), pp.mu, q[dim]); };
    double acc = 0.0;
    for (std::size_t j = 0; j < normal.size(); ++j) {
      const double x = normal.node(j) / w;
      check_finite(eval_kernel(k, pp.xi, pp.mu, x), k.name);
      point[dim] = x;
      bool fwd[4] = {false, false, false, false};
      fwd[dim] = x < 2.0 * steps[dim];
      cache.clear();
      const cplx d = detail::mixed_derivative(fn, point, orders, steps, std::span<const bool>(fwd, dim + 1), cache);
      const double val = std::abs(d) * std::pow(x, l);
      if (inf) {
        acc = std::max(acc, val);
      } else {
        acc += normal.weights()[j] / w * std::pow(val, p);
      }
    }
    const double lp_norm = inf ? acc : std::pow(acc, inv_p);
    best = std::max(best, lp_norm * std::pow(w, -k.order + inv_p + l - lp + alpha_order));
  }
  return best;
}

double mikhlin_fnorm(const MultiplierSymbol& a, std::optional<cplx> mu, int dim, const ProbeSpec& probe) {
  if (dim < 1 || dim > 3) throw ParameterError("mikhlin_fnorm: dim must lie in 1..3");
  require_parameter(a.sector, mu, a.name);
  probe.validate();
  const auto indices = detail::multi_indices(static_cast<std::size_t>(dim), dim);
  const auto dirs = detail::probe_directions(dim);
  const auto radii = detail::logspace(probe.xi_min, probe.xi_max, points_for(probe.xi_min, probe.xi_max, probe.points_per_decade));
  std::vector<double> point(dim), steps(dim);
  std::unordered_map<std::uint64_t, cplx> cache;
  auto fn = [&](std::span<const double> q) { return a.fn(q, mu); };
  bool fwd[3] = {false, false, false};
  double best = 0.0;
  for (double r : radii) {
    for (const auto& d : dirs) {
      for (int c = 0; c < dim; ++c) {
        point[c] = r * d[c];
        steps[c] = probe.rel_step * r;
      }
      cache.clear();
      for (const auto& idx : indices) {
        int order = 0;
        for (int o : idx) order += o;
        const cplx v = detail::mixed_derivative(fn, point, idx, steps, std::span<const bool>(fwd, dim), cache);
        if (!std::isfinite(std::abs(v))) throw DomainError(a.name + ": multiplier not evaluable at a probe point");
        best = std::max(best, std::pow(r, order) * std::abs(v));
      }
    }
  }
  return best;
}

double lemma_max_eval(double a, double rho, double t) {
  if (!(rho > 1.0)) throw ParameterError("lemma_max_eval: rho must exceed 1");
  if (!(a > 0.0 && a < rho)) throw ParameterError("lemma_max_eval: need 0 < a < rho");
  if (!(t > 0.0)) throw ParameterError("lemma_max_eval: t must be positive");
  const double threshold = std::pow(rho / a - 1.0, -0.5);
  if (t >= threshold) return std::pow(1.0 + t * t, -0.5 * rho);
  const double c = std::pow(1.0 - a / rho, 0.5 * rho) * std::pow(rho / a - 1.0, -0.5 * a);
  return c * std::pow(t, -a);
}

}  // namespace prb
