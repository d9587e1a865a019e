#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "prb/core.hpp"
#include "prb/symbols.hpp"
#include "prb/transforms.hpp"

namespace prb {

using AnyField = std::variant<BoundaryField, HalfSpaceField>;

double lp_norm(const BoundaryField& f, double p);
double lp_norm(const HalfSpaceField& f, double p);

/// sup_alpha alpha * lambda(|f| > alpha)^{1/p} for a step function with the
/// given values on cells of the given measures.
double weak_lp_norm(std::span<const double> values, std::span<const double> measures, double p);

/// D_{x_n}^order by three-point differences on the graded normal grid.
HalfSpaceField normal_derivative(const HalfSpaceField& u, int order);

/// Sum over l <= m of || || D^l u(., x_n) ||_{L^q} ||_{L^p or L^{p,inf}} in x_n.
double mixed_norm(const HalfSpaceField& u, double p, double q, int m, bool weak);

/// (sum_j 2^{jsq} ||block_j g||_p^q)^{1/q}.
double besov_norm(const BoundaryField& g, double s, double p, double q, const LPPartition& part);

/// Sum over l <= s of the mixed norm of (x_n D_{x_n})^l u.
double tot_char_norm(const HalfSpaceField& u, int s, double p, double q, bool weak);

/// ||<D'>^s g||_{L^2}, computed on the spectral side.
double bessel2_norm(const BoundaryField& g, double s);

/// Operator norm of g -> k(D', mu; x_n) g from H^s_2 on the torus into H^t_2
/// of the half-space, evaluated mode by mode: sup over lattice frequencies of
/// <xi'>^{-s} times the H^t norm of the normal profile. For t > 0 the profile
/// norm is the Bessel norm of its even extension, integrated in the dual
/// normal variable from the exact transform of the piecewise-linear
/// interpolant. Requires 0 <= t < 3/2.
double opnorm_hilbert(const SymbolKernel& k, std::optional<cplx> mu, double s, double t,
                      const TangentialGrid& grid, const NormalGrid& normal);

enum class NormFamily { Lp, WeakLp, Mixed, Besov, TotChar, Bessel2 };

struct NormSpec {
  NormFamily family = NormFamily::Lp;
  double p = 2.0;
  double q = 2.0;
  double s = 0.0;
  int m = 0;
  bool weak = false;

  static NormSpec lp(double p) { return {NormFamily::Lp, p, p, 0.0, 0, false}; }
  /// L^{p or p,inf}(R_+; L^q) with normal derivatives up to m.
  static NormSpec mixed(double p, double q, bool weak, int m = 0) { return {NormFamily::Mixed, p, q, 0.0, m, weak}; }
  static NormSpec weak_lp(double p, double q) { return {NormFamily::WeakLp, p, q, 0.0, 0, true}; }
  static NormSpec besov(double s, double p, double q) { return {NormFamily::Besov, p, q, s, 0, false}; }
  static NormSpec tot_char(int s, double p, double q, bool weak) {
    return {NormFamily::TotChar, p, q, static_cast<double>(s), 0, weak};
  }
  static NormSpec bessel2(double s) { return {NormFamily::Bessel2, 2.0, 2.0, s, 0, false}; }

  void validate() const;
  bool is_l2() const { return family == NormFamily::Lp && p == 2.0; }
  std::string describe() const;
};

NormFamily norm_family_from_string(const std::string& name);
std::string to_string(NormFamily family);

double evaluate_norm(const NormSpec& spec, const AnyField& f);
double evaluate_norm(const NormSpec& spec, const BoundaryField& f);
double evaluate_norm(const NormSpec& spec, const HalfSpaceField& f);

}  // namespace prb
