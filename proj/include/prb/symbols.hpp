#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prb/core.hpp"

namespace prb {

enum class KernelKind { strong, weak };

using KernelFn = std::function<cplx(std::span<const double> xi, std::optional<cplx> mu, double xn)>;
using SymbolFn = std::function<cplx(std::span<const double> xi, std::optional<cplx> mu)>;

/// Symbol-kernel k(xi', mu; x_n) of a Poisson operator.
///
/// `rate` is set for kernels of the form exp(-rate(xi', mu) x_n); solvers use
/// it for exact normal derivatives. It is empty for general kernels.
struct SymbolKernel {
  std::string name;
  double order = 0.0;
  KernelKind kind = KernelKind::strong;
  Sector sector = Sector::empty();
  KernelFn fn;
  SymbolFn rate;
};

struct MultiplierSymbol {
  std::string name;
  Sector sector = Sector::empty();
  SymbolFn fn;
};

cplx eval_kernel(const SymbolKernel& k, std::span<const double> xi, std::optional<cplx> mu, double xn);
/// k(xi', mu; t / <xi', mu>).
cplx eval_scaled(const SymbolKernel& k, std::span<const double> xi, std::optional<cplx> mu, double t);
cplx eval_multiplier(const MultiplierSymbol& a, std::span<const double> xi, std::optional<cplx> mu);

/// k_mu(xi'; x_n) = k(xi', mu; x_n) as a parameter-independent kernel.
SymbolKernel freeze(const SymbolKernel& k, cplx mu);

struct KppParams {
  double d = 1.0;
  double d_prime = 1.0;
  double k = 1.0;
  void validate() const;
};

namespace catalog {

inline constexpr double default_half_angle = pi / 4.0;

/// exp(-tau x_n), tau = sqrt(1 + |xi'|^2 + mu^2).
SymbolKernel heat_kernel(double half_angle = default_half_angle);
/// exp(-sqrt(mu^2 / d + |xi'|^2) x_n).
SymbolKernel kpp_kernel(double d = 1.0, double half_angle = default_half_angle);
SymbolKernel constant_one(double half_angle = default_half_angle);
SymbolKernel zero_kernel(double half_angle = default_half_angle);

MultiplierSymbol dtn_symbol(double half_angle = default_half_angle);
MultiplierSymbol heat_dynbc_b(double half_angle = default_half_angle);
MultiplierSymbol ch_b(double half_angle = default_half_angle);
MultiplierSymbol kpp_m1(const KppParams& params, double half_angle = default_half_angle);
MultiplierSymbol kpp_m2(const KppParams& params, double half_angle = default_half_angle);
/// <xi'>^s, parameter-independent.
MultiplierSymbol bessel_potential(double s);
/// exp(i h . xi'), parameter-independent.
MultiplierSymbol shift(std::vector<double> h);
MultiplierSymbol constant(cplx c);

/// Kernels addressable by name: heat, kpp, constant-one, zero.
std::optional<SymbolKernel> kernel_by_name(const std::string& name, double half_angle = default_half_angle,
                                           const KppParams& kpp = {});
std::vector<std::string> kernel_names();

}  // namespace catalog

/// Sampling lattice for sup-type seminorm estimates.
struct ProbeSpec {
  double xi_min = 1e-2;
  double xi_max = 1e2;
  double mu_min = 1e-1;
  double mu_max = 1e2;
  double t_min = 1e-3;
  double t_max = 16.0;
  int points_per_decade = 3;
  int rays = 3;
  double edge_margin = 0.01;
  double rel_step = 1e-3;

  /// Doubles the lattice density and widens every range by 4x.
  ProbeSpec refined() const;
  void validate() const;

  std::vector<double> xi_magnitudes() const;   // 0 and log-spaced in [xi_min, xi_max]
  std::vector<double> mu_magnitudes() const;   // log-spaced in [mu_min, mu_max]
  std::vector<double> t_values() const;        // 0 and log-spaced in [t_min, t_max]
  std::vector<double> ray_angles(const Sector& sector) const;
};

/// Lower estimate of |||k|||_{d,(N)} (strong kind) or ||k||'_{d,(N)} (weak
/// kind) from the probe lattice and central finite differences.
double seminorm(const SymbolKernel& k, int N, const ProbeSpec& probe);

/// Seminorm of the class opposite to the kernel's declared kind.
double seminorm_as(const SymbolKernel& k, KernelKind kind, int N, const ProbeSpec& probe);

/// sup over probe (xi', mu) of
/// <xi',mu>^{-d + 1/p + l - lp + |alpha|} || x^l D_x^lp D_xi^alpha k(xi', mu; .) ||_{L^p(R_+)}.
/// Normal quadrature runs on `normal` in the scaled variable t = <xi',mu> x_n.
/// p = infinity is passed as std::numeric_limits<double>::infinity().
double char_lp_bound(const SymbolKernel& k, double p, int l, int lp, std::span<const int> alpha,
                     const ProbeSpec& probe, const NormalGrid& normal);

/// Lower estimate of sup_{xi != 0, |alpha| <= dim} |xi|^{|alpha|} |d^alpha a(xi, mu)|.
double mikhlin_fnorm(const MultiplierSymbol& a, std::optional<cplx> mu, int dim, const ProbeSpec& probe);

/// max_{s >= 1} s^a <s t>^{-rho} in closed form.
double lemma_max_eval(double a, double rho, double t);

}  // namespace prb
