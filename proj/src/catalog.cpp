#include <cmath>

#include "prb/symbols.hpp"

namespace prb {

namespace {

double xi_sq(std::span<const double> xi) {
  double acc = 0.0;
  for (double c : xi) acc += c * c;
  return acc;
}

cplx mu_or_zero(std::optional<cplx> mu) { return mu.value_or(cplx(0.0)); }

}  // namespace

cplx eval_kernel(const SymbolKernel& k, std::span<const double> xi, std::optional<cplx> mu, double xn) {
  require_parameter(k.sector, mu, k.name);
  if (!(xn >= 0.0)) throw DomainError(k.name + ": x_n must be nonnegative");
  return k.fn(xi, mu, xn);
}

cplx eval_scaled(const SymbolKernel& k, std::span<const double> xi, std::optional<cplx> mu, double t) {
  return eval_kernel(k, xi, mu, t / bracket(xi, mu));
}

cplx eval_multiplier(const MultiplierSymbol& a, std::span<const double> xi, std::optional<cplx> mu) {
  require_parameter(a.sector, mu, a.name);
  return a.fn(xi, mu);
}

SymbolKernel freeze(const SymbolKernel& k, cplx mu) {
  require_parameter(k.sector, mu, k.name);
  SymbolKernel out;
  out.name = k.name + "@mu";
  out.order = k.order;
  out.kind = k.kind;
  out.sector = Sector::empty();
  out.fn = [f = k.fn, mu](std::span<const double> xi, std::optional<cplx>, double xn) { return f(xi, mu, xn); };
  if (k.rate) {
    out.rate = [r = k.rate, mu](std::span<const double> xi, std::optional<cplx>) { return r(xi, mu); };
  }
  return out;
}

void KppParams::validate() const {
  if (!(d > 0.0 && d_prime > 0.0 && k > 0.0)) throw ParameterError("KPP parameters d, d', k must be positive");
}

namespace catalog {

SymbolKernel heat_kernel(double half_angle) {
  SymbolKernel k;
  k.name = "heat";
  k.order = 0.0;
  k.kind = KernelKind::strong;
  k.sector = Sector::symmetric(half_angle);
  k.rate = [](std::span<const double> xi, std::optional<cplx> mu) {
    const cplx m = mu_or_zero(mu);
    return std::sqrt(1.0 + xi_sq(xi) + m * m);
  };
  k.fn = [rate = k.rate](std::span<const double> xi, std::optional<cplx> mu, double xn) {
    return std::exp(-rate(xi, mu) * xn);
  };
  return k;
}

SymbolKernel kpp_kernel(double d, double half_angle) {
  if (!(d > 0.0)) throw ParameterError("kpp kernel requires d > 0");
  SymbolKernel k;
  k.name = "kpp";
  k.order = 0.0;
  k.kind = KernelKind::strong;
  k.sector = Sector::symmetric(half_angle);
  k.rate = [d](std::span<const double> xi, std::optional<cplx> mu) {
    const cplx m = mu_or_zero(mu);
    return std::sqrt(m * m / d + xi_sq(xi));
  };
  k.fn = [rate = k.rate](std::span<const double> xi, std::optional<cplx> mu, double xn) {
    return std::exp(-rate(xi, mu) * xn);
  };
  return k;
}

SymbolKernel constant_one(double half_angle) {
  SymbolKernel k;
  k.name = "constant-one";
  k.sector = Sector::symmetric(half_angle);
  k.fn = [](std::span<const double>, std::optional<cplx>, double) { return cplx(1.0); };
  k.rate = [](std::span<const double>, std::optional<cplx>) { return cplx(0.0); };
  return k;
}

SymbolKernel zero_kernel(double half_angle) {
  SymbolKernel k;
  k.name = "zero";
  k.sector = Sector::symmetric(half_angle);
  k.fn = [](std::span<const double>, std::optional<cplx>, double) { return cplx(0.0); };
  return k;
}

MultiplierSymbol dtn_symbol(double half_angle) {
  return {"dtn", Sector::symmetric(half_angle), [](std::span<const double> xi, std::optional<cplx> mu) {
            const cplx m = mu_or_zero(mu);
            return std::sqrt(1.0 + xi_sq(xi) + m * m);
          }};
}

MultiplierSymbol heat_dynbc_b(double half_angle) {
  return {"heat-dynbc-b", Sector::symmetric(half_angle),
          [](std::span<const double> xi, std::optional<cplx> mu) {
            const cplx m2 = mu_or_zero(mu) * mu_or_zero(mu);
            return m2 / (m2 + std::sqrt(1.0 + xi_sq(xi) + m2));
          }};
}

MultiplierSymbol ch_b(double half_angle) {
  return {"ch-b", Sector::symmetric(half_angle), [](std::span<const double> xi, std::optional<cplx> mu) {
            const cplx m = mu_or_zero(mu);
            const double z2 = xi_sq(xi);
            const cplx i_mu = cplx(0.0, 1.0) * m;
            const cplx tau1 = std::sqrt(z2 + i_mu);
            const cplx tau2 = std::sqrt(z2 - i_mu);
            const cplx sum = tau1 + tau2;
            return m * m * sum / ((m * m + z2) * sum + 2.0 * tau1 * tau2);
          }};
}

namespace {
struct KppParts {
  cplx numerator_q;  // sqrt(d mu^2 + d^2 |xi|^2) + 1
  cplx denominator;
  cplx mu2;
};

KppParts kpp_parts(const KppParams& p, std::span<const double> xi, cplx mu) {
  const double z2 = xi_sq(xi);
  const cplx mu2 = mu * mu;
  const cplx q = std::sqrt(p.d * mu2 + p.d * p.d * z2) + 1.0;
  return {q, (mu2 + p.k + p.d_prime * z2) * q - p.k, mu2};
}
}  // namespace

MultiplierSymbol kpp_m1(const KppParams& params, double half_angle) {
  params.validate();
  return {"kpp-m1", Sector::symmetric(half_angle), [params](std::span<const double> xi, std::optional<cplx> mu) {
            const auto parts = kpp_parts(params, xi, mu_or_zero(mu));
            return parts.mu2 * params.k / parts.denominator;
          }};
}

MultiplierSymbol kpp_m2(const KppParams& params, double half_angle) {
  params.validate();
  return {"kpp-m2", Sector::symmetric(half_angle), [params](std::span<const double> xi, std::optional<cplx> mu) {
            const auto parts = kpp_parts(params, xi, mu_or_zero(mu));
            return parts.mu2 * parts.numerator_q / parts.denominator;
          }};
}

MultiplierSymbol bessel_potential(double s) {
  return {"bessel-potential", Sector::empty(),
          [s](std::span<const double> xi, std::optional<cplx>) { return cplx(std::pow(1.0 + xi_sq(xi), 0.5 * s)); }};
}

MultiplierSymbol shift(std::vector<double> h) {
  return {"shift", Sector::empty(), [h = std::move(h)](std::span<const double> xi, std::optional<cplx>) {
            double phase = 0.0;
            for (std::size_t a = 0; a < xi.size() && a < h.size(); ++a) phase += h[a] * xi[a];
            return std::polar(1.0, phase);
          }};
}

MultiplierSymbol constant(cplx c) {
  return {"constant", Sector::empty(), [c](std::span<const double>, std::optional<cplx>) { return c; }};
}

std::optional<SymbolKernel> kernel_by_name(const std::string& name, double half_angle, const KppParams& kpp) {
  if (name == "heat") return heat_kernel(half_angle);
  if (name == "kpp") return kpp_kernel(kpp.d, half_angle);
  if (name == "constant-one") return constant_one(half_angle);
  if (name == "zero") return zero_kernel(half_angle);
  return std::nullopt;
}

std::vector<std::string> kernel_names() { return {"heat", "kpp", "constant-one", "zero"}; }

}  // namespace catalog
}  // namespace prb
