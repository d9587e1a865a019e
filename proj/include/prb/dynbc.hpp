#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prb/core.hpp"
#include "prb/symbols.hpp"

namespace prb {

enum class DynBCVariant { HeatDynBC, CahnHilliardBoundary, KPPRoadField };

DynBCVariant dynbc_variant_from_string(const std::string& name);
std::string to_string(DynBCVariant variant);

struct DynBCProblem {
  DynBCVariant variant = DynBCVariant::HeatDynBC;
  KppParams kpp;
  double half_angle = catalog::default_half_angle;
  GridConfig grids;

  void validate() const;
  Sector sector() const { return Sector::symmetric(half_angle); }
};

/// Solution pair and per-mode residuals. `diagnostics` holds the maxima over
/// modes of residuals, relative to the largest data coefficient, computed
/// from analytic per-mode derivatives;
/// `fd_diagnostics` holds residuals that use grid finite differences.
struct ResolventOutput {
  std::optional<HalfSpaceField> u;
  BoundaryField v;
  std::map<std::string, double> diagnostics;
  std::map<std::string, double> fd_diagnostics;

  double max_residual() const;
};

/// Per-mode Dirichlet solve of (tau^2 - d^2/dx^2) u = f, u(0) = 0, bounded,
/// by product integration of the reflected Green kernel against the
/// piecewise-linear interpolant of f. Returns u at the nodes and u'(0).
struct DirichletMode {
  std::vector<cplx> u;
  cplx du0;
};
DirichletMode dirichlet_mode(std::span<const double> nodes, std::span<const cplx> f, cplx tau);

HalfSpaceField dirichlet_resolvent(const HalfSpaceField& f, cplx mu,
                                   double half_angle = catalog::default_half_angle);

ResolventOutput heat_dynbc_resolvent(const HalfSpaceField& f, const BoundaryField& g, cplx mu,
                                     double half_angle = catalog::default_half_angle);

/// v = mu^{-2} b_mu(D') g for the Cahn-Hilliard boundary dynamics.
BoundaryField ch_boundary_resolvent(const BoundaryField& g, cplx mu, double half_angle = catalog::default_half_angle);
/// Same solve with per-mode checks of the boundary system; u is not built.
ResolventOutput ch_boundary_solve(const BoundaryField& g, cplx mu, double half_angle = catalog::default_half_angle);

ResolventOutput kpp_resolvent(const BoundaryField& g, cplx mu, const KppParams& params, const NormalGrid& normal,
                              double half_angle = catalog::default_half_angle);

/// Resolvent of the problem with boundary data g and no interior data.
ResolventOutput boundary_resolvent(const DynBCProblem& problem, const BoundaryField& g, cplx mu,
                                   const NormalGrid& normal);

/// ||mu^2 R(mu)(0, g)||_X / ||g||_{L^2} with X = L^2 x L^2 (boundary part only
/// for the Cahn-Hilliard problem).
double scaled_resolvent_ratio(const DynBCProblem& problem, const BoundaryField& g, cplx mu, const NormalGrid& normal);

/// m1, m2 and f(z, mu) = (mu^2 + k + d' z^2)(sqrt(d mu^2 + d^2 z^2) + 1) of the
/// road-field boundary system, with |xi'| replaced by a complex z.
struct KppSymbolValues {
  cplx m1;
  cplx m2;
  cplx f;
};
KppSymbolValues kpp_symbols(const KppParams& params, cplx z, cplx mu);

struct KppLemmaOptions {
  double z_angle = 0.05;
  double theta = pi / 4.0;
  double edge_gap = 0.01;
  double min_modulus = 1e-3;
  double max_modulus = 1e3;
  int points_per_decade = 4;
};

struct KppLemmaResult {
  double sup_m1 = 0.0;
  double sup_m2 = 0.0;
  /// min |f(z, mu) - k| over the lattice.
  double min_gap = 0.0;
  /// max |m1| on the spheres |(z, mu)| = min_modulus and max_modulus.
  double m1_small = 0.0;
  double m1_large = 0.0;
  std::size_t samples = 0;
};

/// Samples z on the rays arg z in {0, +-z_angle} and mu on the rays
/// arg mu in {0, +-theta/2, +-(theta - edge_gap)} with log-spaced moduli.
KppLemmaResult kpp_lemma_scan(const KppParams& params, const KppLemmaOptions& options);

using InteriorSource = std::function<HalfSpaceField(double t)>;
using BoundarySource = std::function<BoundaryField(double t)>;

struct EvolveRecord {
  double t = 0.0;
  double increment = 0.0;
  double boundary_norm = 0.0;
  double interior_norm = 0.0;
  double max_residual = 0.0;
};

struct Trajectory {
  std::vector<EvolveRecord> records;
  HalfSpaceField u;
  BoundaryField v;
};

/// Implicit Euler: w_{m+1} = R(mu)(w_m / dt + F(t_{m+1})) with mu^2 = 1/dt.
/// Empty sources stand for zero data. Only the heat problem carries interior
/// data in its resolvent, so other variants are rejected.
Trajectory implicit_euler_evolve(const DynBCProblem& problem, const HalfSpaceField& u0, const BoundaryField& v0,
                                 const InteriorSource& f, const BoundarySource& g, double dt, double T);

}  // namespace prb
