#include "prb/dynbc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prb/norms.hpp"
#include "prb/transforms.hpp"

namespace prb {

namespace {

double xi_sq(std::span<const double> xi) {
  double acc = 0.0;
  for (double c : xi) acc += c * c;
  return acc;
}

void require_mu(const Sector& sector, cplx mu, const std::string& who) {
  if (std::abs(mu) < 1e-12) throw DomainError(who + ": mu must be nonzero");
  require_parameter(sector, mu, who);
}

// Coefficients of the product integration over one cell, z = tau h.
void cell_weights(cplx z, cplx& i0, cplx& i1) {
  if (std::abs(z) < 1e-3) {
    i0 = 0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0;
    i1 = 0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0;
    return;
  }
  const cplx e = std::exp(-z);
  i0 = (1.0 - e * (1.0 + z)) / (z * z);
  i1 = 1.0 / z - (1.0 - e) / (z * z);
}

// Spectra of all normal slices, stored mode-major: out[i][j].
std::vector<std::vector<cplx>> slice_spectra(const HalfSpaceField& f) {
  const std::size_t n = f.tangential.size();
  const std::size_t m = f.normal.size();
  std::vector<std::vector<cplx>> out(n, std::vector<cplx>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const auto spec = fft_forward(f.tangential, f.slice(j));
    for (std::size_t i = 0; i < n; ++i) out[i][j] = spec[i];
  }
  return out;
}

HalfSpaceField from_mode_profiles(const TangentialGrid& grid, const NormalGrid& normal,
                                  const std::vector<std::vector<cplx>>& profiles) {
  HalfSpaceField out = HalfSpaceField::zeros(grid, normal);
  std::vector<cplx> slice(grid.size());
  for (std::size_t j = 0; j < normal.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) slice[i] = profiles[i][j];
    const auto back = fft_inverse(grid, slice);
    std::copy(back.begin(), back.end(), out.slice(j).begin());
  }
  return out;
}

void record(std::map<std::string, double>& diag, const std::string& name, double value) {
  auto it = diag.find(name);
  if (it == diag.end()) {
    diag.emplace(name, value);
  } else {
    it->second = std::max(it->second, value);
  }
}

// Second derivative of the interpolating parabola through three nodes.
cplx second_difference(std::span<const double> x, std::span<const cplx> u, std::size_t j) {
  const double h1 = x[j] - x[j - 1], h2 = x[j + 1] - x[j];
  return 2.0 * (u[j - 1] / (h1 * (h1 + h2)) - u[j] / (h1 * h2) + u[j + 1] / (h2 * (h1 + h2)));
}

cplx first_difference_at_zero(std::span<const double> x, std::span<const cplx> u) {
  const double x1 = x[1] - x[0], x2 = x[2] - x[0];
  return (-(x1 + x2) / (x1 * x2)) * u[0] + (x2 / (x1 * (x2 - x1))) * u[1] - (x1 / (x2 * (x2 - x1))) * u[2];
}

void check_grids(const TangentialGrid& a, const TangentialGrid& b) {
  if (!(a == b)) throw ParameterError("interior and boundary data must share the tangential grid");
}

}  // namespace

DynBCVariant dynbc_variant_from_string(const std::string& name) {
  if (name == "heat-dynbc") return DynBCVariant::HeatDynBC;
  if (name == "ch-boundary") return DynBCVariant::CahnHilliardBoundary;
  if (name == "kpp") return DynBCVariant::KPPRoadField;
  throw ParameterError("unknown problem: " + name);
}

std::string to_string(DynBCVariant variant) {
  switch (variant) {
    case DynBCVariant::HeatDynBC: return "heat-dynbc";
    case DynBCVariant::CahnHilliardBoundary: return "ch-boundary";
    case DynBCVariant::KPPRoadField: return "kpp";
  }
  return "unknown";
}

void DynBCProblem::validate() const {
  if (!(half_angle > 0.0 && half_angle < pi / 2.0)) throw ParameterError("problem sector half-angle must lie in (0, pi/2)");
  if (variant == DynBCVariant::KPPRoadField) kpp.validate();
}

double ResolventOutput::max_residual() const {
  double m = 0.0;
  for (const auto& [name, value] : diagnostics) m = std::max(m, value);
  return m;
}

DirichletMode dirichlet_mode(std::span<const double> x, std::span<const cplx> f, cplx tau) {
  const std::size_t m = x.size();
  if (m < 2 || f.size() != m) throw ParameterError("dirichlet_mode: profile does not match the nodes");
  std::vector<cplx> a(m, 0.0), b(m, 0.0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double h = x[j + 1] - x[j];
    cplx i0, i1;
    cell_weights(tau * h, i0, i1);
    a[j + 1] = std::exp(-tau * h) * a[j] + h * (f[j] * i0 + f[j + 1] * i1);
  }
  for (std::size_t j = m - 1; j-- > 0;) {
    const double h = x[j + 1] - x[j];
    cplx i0, i1;
    cell_weights(tau * h, i0, i1);
    b[j] = std::exp(-tau * h) * b[j + 1] + h * (f[j] * i1 + f[j + 1] * i0);
  }
  DirichletMode out;
  out.u.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.u[j] = (a[j] + b[j] - std::exp(-tau * x[j]) * b[0]) / (2.0 * tau);
  out.du0 = b[0];
  return out;
}

HalfSpaceField dirichlet_resolvent(const HalfSpaceField& f, cplx mu, double half_angle) {
  require_mu(Sector::symmetric(half_angle), mu, "dirichlet_resolvent");
  const auto spectra = slice_spectra(f);
  const auto& grid = f.tangential;
  std::vector<std::vector<cplx>> profiles(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx tau = std::sqrt(1.0 + xi_sq(grid.xi(i)) + mu * mu);
    profiles[i] = dirichlet_mode(f.normal.nodes(), spectra[i], tau).u;
  }
  return from_mode_profiles(grid, f.normal, profiles);
}

ResolventOutput heat_dynbc_resolvent(const HalfSpaceField& f, const BoundaryField& g, cplx mu, double half_angle) {
  const Sector sector = Sector::symmetric(half_angle);
  require_mu(sector, mu, "heat_dynbc_resolvent");
  check_grids(f.tangential, g.grid);
  const auto& grid = g.grid;
  const auto& x = f.normal.nodes();
  const auto fs = slice_spectra(f);
  const auto gs = fft_forward(grid, g.samples);
  const SymbolKernel kernel = catalog::heat_kernel(half_angle);
  const cplx mu2 = mu * mu;
  double data_scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double f_max = 0.0;
    for (const auto& c : fs[i]) f_max = std::max(f_max, std::abs(c));
    data_scale = std::max(data_scale, std::abs(gs[i]) + f_max);
  }

  ResolventOutput out{std::nullopt, BoundaryField::zeros(grid), {}, {}};
  std::vector<std::vector<cplx>> profiles(grid.size(), std::vector<cplx>(x.size()));
  std::vector<cplx> vs(grid.size());
  for (const char* name : {"line1", "line2", "line3", "dirichlet_trace"}) out.diagnostics[name] = 0.0;
  for (const char* name : {"line1", "line2"}) out.fd_diagnostics[name] = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto xi = grid.xi(i);
    const cplx tau = std::sqrt(1.0 + xi_sq(xi) + mu2);
    const cplx rate = kernel.rate(xi, mu);
    const auto d = dirichlet_mode(x, fs[i], tau);
    // g - gamma_1 u_1 with gamma_1 = -d/dx_n at the boundary.
    const cplx g_tilde = gs[i] + d.du0;
    const cplx v = g_tilde / (mu2 + tau);
    vs[i] = v;
    auto& u = profiles[i];
    for (std::size_t j = 0; j < x.size(); ++j) u[j] = d.u[j] + v * kernel.fn(xi, mu, x[j]);
    const double scale = data_scale;
    if (scale == 0.0) continue;
    double line1 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      // u'' = (tau^2 u_1 - f) + rate^2 v e^{-rate x}
      const cplx upp = (tau * tau * d.u[j] - fs[i][j]) + rate * rate * v * std::exp(-rate * x[j]);
      line1 = std::max(line1, std::abs(tau * tau * u[j] - upp - fs[i][j]));
    }
    const cplx du0 = d.du0 - rate * v;
    record(out.diagnostics, "line1", line1 / (scale * std::max(1.0, std::abs(tau * tau))));
    record(out.diagnostics, "line2", std::abs(mu2 * v - du0 - gs[i]) / scale);
    record(out.diagnostics, "line3", std::abs(u[0] - v) / scale);
    record(out.diagnostics, "dirichlet_trace", std::abs(d.u[0]) / scale);

    double fd1 = 0.0, u_max = 0.0;
    for (std::size_t j = 1; j + 1 < x.size(); ++j) {
      fd1 = std::max(fd1, std::abs(tau * tau * u[j] - second_difference(x, u, j) - fs[i][j]));
      u_max = std::max(u_max, std::abs(tau * tau * u[j]));
    }
    record(out.fd_diagnostics, "line1", fd1 / std::max(scale, u_max));
    record(out.fd_diagnostics, "line2", std::abs(mu2 * v - first_difference_at_zero(x, u) - gs[i]) / scale);
  }
  out.u = from_mode_profiles(grid, f.normal, profiles);
  out.v = BoundaryField{grid, fft_inverse(grid, vs)};
  return out;
}

BoundaryField ch_boundary_resolvent(const BoundaryField& g, cplx mu, double half_angle) {
  const MultiplierSymbol b = catalog::ch_b(half_angle);
  require_mu(b.sector, mu, "ch_boundary_resolvent");
  BoundaryField v = apply_multiplier(b, mu, g);
  for (auto& s : v.samples) s /= mu * mu;
  return v;
}

ResolventOutput ch_boundary_solve(const BoundaryField& g, cplx mu, double half_angle) {
  ResolventOutput out{std::nullopt, ch_boundary_resolvent(g, mu, half_angle), {}, {}};
  const auto& grid = g.grid;
  const auto gs = fft_forward(grid, g.samples);
  const auto vs = fft_forward(grid, out.v.samples);
  const cplx mu2 = mu * mu;
  const cplx i_mu = cplx(0.0, 1.0) * mu;
  for (const char* name : {"interior", "boundary", "trace", "neumann_laplacian"}) out.diagnostics[name] = 0.0;
  double data_scale = 0.0;
  for (const auto& c : gs) data_scale = std::max(data_scale, std::abs(c));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double scale = data_scale;
    if (scale == 0.0) continue;
    const double z2 = xi_sq(grid.xi(i));
    const cplx t1 = std::sqrt(z2 + i_mu), t2 = std::sqrt(z2 - i_mu);
    // u = c1 e^{-t1 x} + c2 e^{-t2 x} with c1 = t2 c, c2 = t1 c.
    const cplx c = vs[i] / (t1 + t2);
    const cplx c1 = t2 * c, c2 = t1 * c;
    const cplx dnu = t1 * c1 + t2 * c2;
    const double interior =
        std::max(std::abs(mu2 + std::pow(t1 * t1 - z2, 2)) * std::abs(c1), std::abs(mu2 + std::pow(t2 * t2 - z2, 2)) * std::abs(c2));
    record(out.diagnostics, "interior", interior / scale);
    record(out.diagnostics, "boundary", std::abs((mu2 + z2) * vs[i] + dnu - gs[i]) / scale);
    record(out.diagnostics, "trace", std::abs(c1 + c2 - vs[i]) / scale);
    record(out.diagnostics, "neumann_laplacian", std::abs(i_mu * (t1 * c1 - t2 * c2)) / scale);
  }
  return out;
}

ResolventOutput kpp_resolvent(const BoundaryField& g, cplx mu, const KppParams& params, const NormalGrid& normal,
                              double half_angle) {
  params.validate();
  const Sector sector = Sector::symmetric(half_angle);
  require_mu(sector, mu, "kpp_resolvent");
  const auto& grid = g.grid;
  const auto gs = fft_forward(grid, g.samples);
  const SymbolKernel kernel = catalog::kpp_kernel(params.d, half_angle);
  const MultiplierSymbol m1 = catalog::kpp_m1(params, half_angle);
  const MultiplierSymbol m2 = catalog::kpp_m2(params, half_angle);
  const cplx mu2 = mu * mu;
  const auto& x = normal.nodes();

  ResolventOutput out{std::nullopt, BoundaryField::zeros(grid), {}, {}};
  std::vector<cplx> traces(grid.size()), vs(grid.size());
  std::vector<std::vector<cplx>> profiles(grid.size(), std::vector<cplx>(x.size()));
  for (const char* name : {"interior", "system_row1", "robin", "trace"}) out.diagnostics[name] = 0.0;
  out.fd_diagnostics["robin"] = 0.0;
  double data_scale = 0.0;
  for (const auto& c : gs) data_scale = std::max(data_scale, std::abs(c));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto xi = grid.xi(i);
    const double z2 = xi_sq(xi);
    const cplx u0 = m1.fn(xi, mu) * gs[i] / mu2;
    const cplx v = m2.fn(xi, mu) * gs[i] / mu2;
    traces[i] = u0;
    vs[i] = v;
    for (std::size_t j = 0; j < x.size(); ++j) profiles[i][j] = u0 * kernel.fn(xi, mu, x[j]);
    const double scale = data_scale;
    if (scale == 0.0) continue;
    const cplx rate = kernel.rate(xi, mu);
    record(out.diagnostics, "interior", std::abs(mu2 + params.d * z2 - params.d * rate * rate) * std::abs(u0) / scale);
    record(out.diagnostics, "system_row1", std::abs(-u0 + (mu2 + params.k + params.d_prime * z2) * v - gs[i]) / scale);
    // d dnu u + gamma_0 u - k v with dnu u = rate * u0.
    record(out.diagnostics, "robin", std::abs(params.d * rate * u0 + u0 - params.k * v) / scale);
    record(out.diagnostics, "trace", std::abs(profiles[i][0] - u0) / scale);
    const cplx dnu_fd = -first_difference_at_zero(x, profiles[i]);
    record(out.fd_diagnostics, "robin", std::abs(params.d * dnu_fd + u0 - params.k * v) / scale);
  }
  out.u = from_mode_profiles(grid, normal, profiles);
  out.v = BoundaryField{grid, fft_inverse(grid, vs)};
  return out;
}

ResolventOutput boundary_resolvent(const DynBCProblem& problem, const BoundaryField& g, cplx mu,
                                   const NormalGrid& normal) {
  problem.validate();
  switch (problem.variant) {
    case DynBCVariant::HeatDynBC:
      return heat_dynbc_resolvent(HalfSpaceField::zeros(g.grid, normal), g, mu, problem.half_angle);
    case DynBCVariant::CahnHilliardBoundary: return ch_boundary_solve(g, mu, problem.half_angle);
    case DynBCVariant::KPPRoadField: return kpp_resolvent(g, mu, problem.kpp, normal, problem.half_angle);
  }
  throw ParameterError("unknown problem variant");
}

double scaled_resolvent_ratio(const DynBCProblem& problem, const BoundaryField& g, cplx mu, const NormalGrid& normal) {
  const double gn = lp_norm(g, 2.0);
  if (!(gn > 0.0)) throw ParameterError("scaled_resolvent_ratio: boundary data must be nonzero");
  const auto out = boundary_resolvent(problem, g, mu, normal);
  const double m2 = std::norm(mu);
  double acc = std::pow(m2 * lp_norm(out.v, 2.0), 2);
  if (out.u) acc += std::pow(m2 * lp_norm(*out.u, 2.0), 2);
  return std::sqrt(acc) / gn;
}

KppSymbolValues kpp_symbols(const KppParams& params, cplx z, cplx mu) {
  const cplx mu2 = mu * mu;
  const cplx q = std::sqrt(params.d * mu2 + params.d * params.d * z * z) + 1.0;
  const cplx f = (mu2 + params.k + params.d_prime * z * z) * q;
  const cplx den = f - params.k;
  return {mu2 * params.k / den, mu2 * q / den, f};
}

KppLemmaResult kpp_lemma_scan(const KppParams& params, const KppLemmaOptions& options) {
  params.validate();
  if (!(options.theta > 0.0 && options.theta < pi / 2.0)) throw ParameterError("lemma scan: theta must lie in (0, pi/2)");
  if (!(options.z_angle >= 0.0 && options.z_angle < pi / 2.0 - options.theta)) {
    throw ParameterError("lemma scan: z angle must lie in [0, pi/2 - theta)");
  }
  if (!(options.min_modulus > 0.0 && options.max_modulus > options.min_modulus) || options.points_per_decade < 1) {
    throw ParameterError("lemma scan: invalid modulus range");
  }
  const int n = static_cast<int>(std::ceil(std::log10(options.max_modulus / options.min_modulus) * options.points_per_decade)) + 1;
  std::vector<double> radii(n);
  for (int i = 0; i < n; ++i) {
    radii[i] = options.min_modulus * std::pow(options.max_modulus / options.min_modulus, static_cast<double>(i) / (n - 1));
  }
  const double z_args[] = {0.0, options.z_angle, -options.z_angle};
  const double t = options.theta - options.edge_gap;
  const double mu_args[] = {0.0, 0.5 * options.theta, -0.5 * options.theta, t, -t};
  KppLemmaResult out;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (double rz : radii) {
    for (double az : z_args) {
      for (double rm : radii) {
        for (double am : mu_args) {
          const auto v = kpp_symbols(params, std::polar(rz, az), std::polar(rm, am));
          out.sup_m1 = std::max(out.sup_m1, std::abs(v.m1));
          out.sup_m2 = std::max(out.sup_m2, std::abs(v.m2));
          out.min_gap = std::min(out.min_gap, std::abs(v.f - params.k));
          ++out.samples;
        }
      }
    }
  }
  for (int end = 0; end < 2; ++end) {
    const double r = end == 0 ? options.min_modulus : options.max_modulus;
    double m = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const double phi = 0.5 * pi * k / 8.0;
      for (double az : z_args) {
        for (double am : mu_args) {
          m = std::max(m, std::abs(kpp_symbols(params, std::polar(r * std::cos(phi), az), std::polar(r * std::sin(phi), am)).m1));
        }
      }
    }
    (end == 0 ? out.m1_small : out.m1_large) = m;
  }
  return out;
}

Trajectory implicit_euler_evolve(const DynBCProblem& problem, const HalfSpaceField& u0, const BoundaryField& v0,
                                 const InteriorSource& f, const BoundarySource& g, double dt, double T) {
  problem.validate();
  if (!(dt > 0.0) || !(T > 0.0)) throw ParameterError("implicit_euler_evolve: dt and T must be positive");
  if (problem.variant != DynBCVariant::HeatDynBC) {
    throw DomainError("implicit_euler_evolve: only the heat problem carries interior data in its resolvent");
  }
  check_grids(u0.tangential, v0.grid);
  const long steps = std::lround(T / dt);
  if (steps < 1 || std::abs(steps * dt - T) > 1e-9 * T) throw ParameterError("implicit_euler_evolve: dt must divide T");
  const cplx mu = std::sqrt(1.0 / dt);
  Trajectory traj{{}, u0, v0};
  for (long m = 1; m <= steps; ++m) {
    const double t = m * dt;
    HalfSpaceField rhs_u = traj.u;
    for (auto& s : rhs_u.samples) s /= dt;
    if (f) {
      const auto src = f(t);
      for (std::size_t k = 0; k < rhs_u.samples.size(); ++k) rhs_u.samples[k] += src.samples[k];
    }
    BoundaryField rhs_v = traj.v;
    for (auto& s : rhs_v.samples) s /= dt;
    if (g) {
      const auto src = g(t);
      for (std::size_t k = 0; k < rhs_v.samples.size(); ++k) rhs_v.samples[k] += src.samples[k];
    }
    auto out = heat_dynbc_resolvent(rhs_u, rhs_v, mu, problem.half_angle);
    double inc = 0.0;
    {
      HalfSpaceField du = *out.u;
      for (std::size_t k = 0; k < du.samples.size(); ++k) du.samples[k] -= traj.u.samples[k];
      BoundaryField dv = out.v;
      for (std::size_t k = 0; k < dv.samples.size(); ++k) dv.samples[k] -= traj.v.samples[k];
      inc = std::hypot(lp_norm(du, 2.0), lp_norm(dv, 2.0));
    }
    traj.u = std::move(*out.u);
    traj.v = std::move(out.v);
    traj.records.push_back({t, inc, lp_norm(traj.v, 2.0), lp_norm(traj.u, 2.0), out.max_residual()});
  }
  return traj;
}

}  // namespace prb
