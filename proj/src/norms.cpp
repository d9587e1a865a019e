#include "prb/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "finite_diff.hpp"

namespace prb {

namespace {

void require_exponent(double p, const char* who) {
  if (!(p >= 1.0) || std::isinf(p)) throw ParameterError(std::string(who) + ": exponent must lie in [1, inf)");
}

double slice_lq(const HalfSpaceField& u, std::size_t j, double q) {
  const double cell = u.tangential.cell_measure();
  double acc = 0.0;
  for (const auto& v : u.slice(j)) acc += std::pow(std::abs(v), q);
  return std::pow(acc * cell, 1.0 / q);
}

double normal_lp(std::span<const double> values, std::span<const double> weights, double p, bool weak) {
  if (weak) return weak_lp_norm(values, weights, p);
  double acc = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) acc += weights[j] * std::pow(values[j], p);
  return std::pow(acc, 1.0 / p);
}

double mixed_single(const HalfSpaceField& u, double p, double q, bool weak) {
  std::vector<double> slices(u.normal.size());
  for (std::size_t j = 0; j < slices.size(); ++j) slices[j] = slice_lq(u, j, q);
  return normal_lp(slices, u.normal.weights(), p, weak);
}

// Three-point first-derivative weights at node j of a nonuniform grid.
std::array<double, 3> first_derivative_weights(const std::vector<double>& x, std::size_t j, std::size_t& start) {
  const std::size_t n = x.size();
  std::size_t a;
  if (j == 0) {
    a = 0;
  } else if (j + 1 == n) {
    a = n - 3;
  } else {
    a = j - 1;
  }
  start = a;
  const double x0 = x[a], x1 = x[a + 1], x2 = x[a + 2], z = x[j];
  // Derivative of the Lagrange interpolant through (x0, x1, x2) at z.
  return {((z - x1) + (z - x2)) / ((x0 - x1) * (x0 - x2)), ((z - x0) + (z - x2)) / ((x1 - x0) * (x1 - x2)),
          ((z - x0) + (z - x1)) / ((x2 - x0) * (x2 - x1))};
}

HalfSpaceField first_derivative(const HalfSpaceField& u) {
  const auto& x = u.normal.nodes();
  if (x.size() < 3) throw ParameterError("normal derivative needs at least three normal nodes");
  HalfSpaceField out = HalfSpaceField::zeros(u.tangential, u.normal);
  const std::size_t n = u.tangential.size();
  for (std::size_t j = 0; j < x.size(); ++j) {
    std::size_t a = 0;
    const auto w = first_derivative_weights(x, j, a);
    auto dst = out.slice(j);
    for (std::size_t i = 0; i < n; ++i) dst[i] = w[0] * u.at(i, a) + w[1] * u.at(i, a + 1) + w[2] * u.at(i, a + 2);
  }
  return out;
}

HalfSpaceField apply_x_times(HalfSpaceField u) {
  for (std::size_t j = 0; j < u.normal.size(); ++j) {
    const double x = u.normal.node(j);
    for (auto& v : u.slice(j)) v *= x;
  }
  return u;
}

// int_0^X k(x) cos(eta x) dx for the piecewise-linear interpolant of k.
cplx cosine_transform(const std::vector<double>& x, const std::vector<cplx>& k, double eta) {
  cplx acc = 0.0;
  if (eta == 0.0) {
    for (std::size_t j = 0; j + 1 < x.size(); ++j) acc += 0.5 * (x[j + 1] - x[j]) * (k[j] + k[j + 1]);
    return acc;
  }
  // Integration by parts: [k sin(eta x)/eta] + sum slope * (cos(eta b) - cos(eta a)) / eta^2.
  const double X = x.back();
  acc = k.back() * std::sin(eta * X) / eta - k.front() * std::sin(eta * x.front()) / eta;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double a = x[j], b = x[j + 1];
    const cplx slope = (k[j + 1] - k[j]) / (b - a);
    const double dcos = -2.0 * std::sin(0.5 * eta * (a + b)) * std::sin(0.5 * eta * (b - a));
    acc += slope * dcos / (eta * eta);
  }
  return acc;
}

double profile_bessel_sq(const std::vector<double>& x, const std::vector<cplx>& k, cplx k_prime0, double weight_sq,
                         double scale, double t) {
  const double eta_lo = 1e-2 / x.back();
  const double eta_hi = 64.0 * scale;
  const int per_decade = 64;
  const int n = std::max(16, static_cast<int>(std::ceil(std::log10(eta_hi / eta_lo) * per_decade)) + 1);
  const auto etas = detail::logspace(eta_lo, eta_hi, n);
  auto integrand = [&](double eta) {
    const cplx h = 2.0 * cosine_transform(x, k, eta);
    return std::pow(weight_sq + eta * eta, t) * std::norm(h);
  };
  // [0, eta_lo] by the midpoint value, then trapezoid in log(eta).
  double acc = integrand(0.5 * eta_lo) * eta_lo;
  double prev = integrand(etas[0]) * etas[0];
  const double dlog = std::log(etas[1] / etas[0]);
  for (int i = 1; i < n; ++i) {
    const double cur = integrand(etas[i]) * etas[i];
    acc += 0.5 * dlog * (prev + cur);
    prev = cur;
  }
  acc += 4.0 * std::norm(k_prime0) * std::pow(eta_hi, 2.0 * t - 3.0) / (3.0 - 2.0 * t);
  return acc / (2.0 * pi);
}

}  // namespace

double lp_norm(const BoundaryField& f, double p) {
  require_exponent(p, "lp_norm");
  double acc = 0.0;
  for (const auto& v : f.samples) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid.cell_measure(), 1.0 / p);
}

double lp_norm(const HalfSpaceField& f, double p) {
  require_exponent(p, "lp_norm");
  const double cell = f.tangential.cell_measure();
  double acc = 0.0;
  for (std::size_t j = 0; j < f.normal.size(); ++j) {
    double slice = 0.0;
    for (const auto& v : f.slice(j)) slice += std::pow(std::abs(v), p);
    acc += f.normal.weights()[j] * slice;
  }
  return std::pow(acc * cell, 1.0 / p);
}

double weak_lp_norm(std::span<const double> values, std::span<const double> measures, double p) {
  if (values.size() != measures.size()) throw ParameterError("weak_lp_norm: values and measures differ in length");
  require_exponent(p, "weak_lp_norm");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  double cumulative = 0.0;
  double best = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double v = values[order[r]];
    if (!(v >= 0.0)) throw ParameterError("weak_lp_norm: values must be nonnegative");
    if (!(measures[order[r]] >= 0.0)) throw ParameterError("weak_lp_norm: measures must be nonnegative");
    cumulative += measures[order[r]];
    // Ties share a level set; evaluate once the last tied cell is counted.
    if (r + 1 < order.size() && values[order[r + 1]] == v) continue;
    best = std::max(best, v * std::pow(cumulative, 1.0 / p));
  }
  return best;
}

HalfSpaceField normal_derivative(const HalfSpaceField& u, int order) {
  if (order < 0 || order > 3) throw ParameterError("normal_derivative: order must lie in 0..3");
  HalfSpaceField out = u;
  for (int l = 0; l < order; ++l) out = first_derivative(out);
  return out;
}

double mixed_norm(const HalfSpaceField& u, double p, double q, int m, bool weak) {
  require_exponent(p, "mixed_norm");
  require_exponent(q, "mixed_norm");
  if (m < 0 || m > 3) throw ParameterError("mixed_norm: derivative order must lie in 0..3");
  double total = 0.0;
  HalfSpaceField d = u;
  for (int l = 0; l <= m; ++l) {
    if (l > 0) d = first_derivative(d);
    total += mixed_single(d, p, q, weak);
  }
  return total;
}

double besov_norm(const BoundaryField& g, double s, double p, double q, const LPPartition& part) {
  require_exponent(p, "besov_norm");
  require_exponent(q, "besov_norm");
  const auto blocks = lp_blocks(g, part);
  double acc = 0.0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    acc += std::pow(std::exp2(static_cast<double>(j) * s) * lp_norm(blocks[j], p), q);
  }
  return std::pow(acc, 1.0 / q);
}

double tot_char_norm(const HalfSpaceField& u, int s, double p, double q, bool weak) {
  require_exponent(p, "tot_char_norm");
  require_exponent(q, "tot_char_norm");
  if (s < 0 || s > 3) throw ParameterError("tot_char_norm: order must lie in 0..3");
  double total = 0.0;
  HalfSpaceField w = u;
  for (int l = 0; l <= s; ++l) {
    if (l > 0) w = apply_x_times(first_derivative(w));
    total += mixed_single(w, p, q, weak);
  }
  return total;
}

double bessel2_norm(const BoundaryField& g, double s) {
  auto spec = fft_forward(g.grid, g.samples);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= std::pow(bracket(g.grid.xi(i)), s);
  return spectral_l2_norm(g.grid, spec);
}

double opnorm_hilbert(const SymbolKernel& k, std::optional<cplx> mu, double s, double t, const TangentialGrid& grid,
                      const NormalGrid& normal) {
  require_parameter(k.sector, mu, k.name);
  if (!(t >= 0.0 && t < 1.5)) throw ParameterError("opnorm_hilbert: t must lie in [0, 3/2)");
  const auto& x = normal.nodes();
  // The profile depends on xi' only through the lattice point; group equal |xi'|
  // only for kernels whose value is radial, which holds for the whole catalog.
  std::map<double, std::size_t> representatives;
  for (std::size_t i = 0; i < grid.size(); ++i) representatives.emplace(grid.xi_norm(i), i);
  double best = 0.0;
  std::vector<cplx> profile(x.size());
  for (const auto& [radius, flat] : representatives) {
    const auto xi = grid.xi(flat);
    for (std::size_t j = 0; j < x.size(); ++j) profile[j] = k.fn(xi, mu, x[j]);
    const double weight = bracket(xi);
    double norm_sq = 0.0;
    if (t == 0.0) {
      for (std::size_t j = 0; j < x.size(); ++j) norm_sq += normal.weights()[j] * std::norm(profile[j]);
    } else {
      const cplx slope0 = k.rate ? -k.rate(xi, mu) * profile[0] : (profile[1] - profile[0]) / (x[1] - x[0]);
      const double scale = std::max(bracket(xi, mu), weight);
      norm_sq = profile_bessel_sq(x, profile, slope0, weight * weight, scale, t);
    }
    if (!std::isfinite(norm_sq)) throw DomainError(k.name + ": kernel not evaluable on the frequency lattice");
    best = std::max(best, std::pow(weight, -s) * std::sqrt(norm_sq));
  }
  return best;
}

void NormSpec::validate() const {
  require_exponent(p, "norm spec");
  if (family == NormFamily::Mixed || family == NormFamily::WeakLp || family == NormFamily::TotChar ||
      family == NormFamily::Besov) {
    require_exponent(q, "norm spec");
  }
  if (family == NormFamily::Mixed && (m < 0 || m > 3)) throw ParameterError("norm spec: m must lie in 0..3");
  if (family == NormFamily::TotChar && (s < 0.0 || s > 3.0 || s != std::floor(s))) {
    throw ParameterError("norm spec: totally characteristic order must be an integer in 0..3");
  }
  if (weak && family != NormFamily::Mixed && family != NormFamily::WeakLp && family != NormFamily::TotChar) {
    throw ParameterError("norm spec: weak norms apply to the normal direction only");
  }
}

std::string NormSpec::describe() const {
  std::ostringstream os;
  os << to_string(family) << "(p=" << p << ", q=" << q << ", s=" << s << ", m=" << m << ", weak=" << weak << ")";
  return os.str();
}

NormFamily norm_family_from_string(const std::string& name) {
  if (name == "lp") return NormFamily::Lp;
  if (name == "weak-lp") return NormFamily::WeakLp;
  if (name == "mixed") return NormFamily::Mixed;
  if (name == "besov") return NormFamily::Besov;
  if (name == "tot-char") return NormFamily::TotChar;
  if (name == "bessel2") return NormFamily::Bessel2;
  throw ParameterError("unknown norm family: " + name);
}

std::string to_string(NormFamily family) {
  switch (family) {
    case NormFamily::Lp: return "lp";
    case NormFamily::WeakLp: return "weak-lp";
    case NormFamily::Mixed: return "mixed";
    case NormFamily::Besov: return "besov";
    case NormFamily::TotChar: return "tot-char";
    case NormFamily::Bessel2: return "bessel2";
  }
  return "unknown";
}

double evaluate_norm(const NormSpec& spec, const BoundaryField& f) {
  spec.validate();
  switch (spec.family) {
    case NormFamily::Lp: return lp_norm(f, spec.p);
    case NormFamily::Besov: return besov_norm(f, spec.s, spec.p, spec.q, LPPartition::for_grid(f.grid));
    case NormFamily::Bessel2: return bessel2_norm(f, spec.s);
    default: throw ParameterError("norm " + to_string(spec.family) + " needs a half-space field");
  }
}

double evaluate_norm(const NormSpec& spec, const HalfSpaceField& f) {
  spec.validate();
  switch (spec.family) {
    case NormFamily::Lp: return lp_norm(f, spec.p);
    case NormFamily::WeakLp: return mixed_norm(f, spec.p, spec.q, 0, true);
    case NormFamily::Mixed: return mixed_norm(f, spec.p, spec.q, spec.m, spec.weak);
    case NormFamily::TotChar: return tot_char_norm(f, static_cast<int>(spec.s), spec.p, spec.q, spec.weak);
    default: throw ParameterError("norm " + to_string(spec.family) + " needs a boundary field");
  }
}

double evaluate_norm(const NormSpec& spec, const AnyField& f) {
  return std::visit([&](const auto& field) { return evaluate_norm(spec, field); }, f);
}

}  // namespace prb
