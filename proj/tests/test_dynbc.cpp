#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "prb/dynbc.hpp"
#include "prb/norms.hpp"
#include "prb/rbound.hpp"
#include "prb/scans.hpp"

using namespace prb;

namespace {

GridConfig small_grid() {
  GridConfig g;
  g.points_per_dim = 32;
  g.normal_count = 256;
  g.normal_ratio = 1.05;
  return g;
}

BoundaryField constant(const TangentialGrid& t, double c) {
  return BoundaryField::from_function(t, [c](auto) { return cplx(c); });
}

double max_abs_diff(const BoundaryField& f, cplx c) {
  double m = 0.0;
  for (const auto& s : f.samples) m = std::max(m, std::abs(s - c));
  return m;
}

}  // namespace

TEST_SUITE("dynbc") {
  TEST_CASE("Dirichlet mode solve") {
    const NormalGrid n(256, 16.0, 1.05);
    std::vector<cplx> f(n.size());
    for (std::size_t j = 0; j < n.size(); ++j) f[j] = std::exp(-n.node(j));
    const auto d = dirichlet_mode(n.nodes(), f, 2.0);
    double err = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j) {
      const double x = n.node(j);
      const double exact = (std::exp(-x) - std::exp(-2.0 * x)) / 3.0;
      err = std::max(err, std::abs(d.u[j] - exact));
      peak = std::max(peak, exact);
    }
    CHECK(err <= 0.005 * peak);
    CHECK(std::abs(d.u[0]) == 0.0);
    CHECK(d.du0.real() == doctest::Approx(1.0 / 3.0).epsilon(0.005));
  }

  TEST_CASE("Dirichlet resolvent on fields") {
    const auto [t, n] = make_grids(small_grid());
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    auto f = HalfSpaceField::zeros(t, n);
    for (std::size_t j = 0; j < n.size(); ++j) {
      for (std::size_t i = 0; i < t.size(); ++i) f.at(i, j) = std::exp(-n.node(j)) * cplx(d(rng), d(rng));
    }
    const auto u = dirichlet_resolvent(f, std::polar(2.0, 0.4));
    double trace = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) trace = std::max(trace, std::abs(u.at(i, 0)));
    CHECK(trace <= 1e-12 * lp_norm(f, 2.0));
    CHECK(lp_norm(dirichlet_resolvent(HalfSpaceField::zeros(t, n), cplx(1.0)), 2.0) == 0.0);
    CHECK_THROWS_AS(dirichlet_resolvent(f, cplx(0.0, 1.0)), DomainError);
  }

  TEST_CASE("heat problem with dynamic boundary condition") {
    const auto [t, n] = make_grids(small_grid());
    const double b = 1.0 / (1.0 + std::sqrt(2.0));
    const auto out = heat_dynbc_resolvent(HalfSpaceField::zeros(t, n), constant(t, 1.0), cplx(1.0));
    CHECK(max_abs_diff(out.v, b) < 1e-14);
    REQUIRE(out.u.has_value());
    for (std::size_t j = 0; j < n.size(); ++j) {
      CHECK(std::abs(out.u->at(5, j) - b * std::exp(-std::sqrt(2.0) * n.node(j))) < 1e-14);
    }
    CHECK(out.max_residual() <= 1e-8);
    CHECK(out.fd_diagnostics.at("line2") <= 1e-3);

    const auto zero = heat_dynbc_resolvent(HalfSpaceField::zeros(t, n), BoundaryField::zeros(t), cplx(2.0));
    CHECK(lp_norm(zero.v, 2.0) == 0.0);
    CHECK(lp_norm(*zero.u, 2.0) == 0.0);

    // Interior data and a complex parameter.
    auto f = HalfSpaceField::zeros(t, n);
    for (std::size_t j = 0; j < n.size(); ++j) {
      for (std::size_t i = 0; i < t.size(); ++i) f.at(i, j) = std::exp(-n.node(j)) * std::cos(t.x(i)[0]);
    }
    const auto g = BoundaryField::from_function(t, [](auto x) { return cplx(std::sin(2.0 * x[0])); });
    const auto full = heat_dynbc_resolvent(f, g, std::polar(3.0, 0.5));
    for (const auto& [name, value] : full.diagnostics) {
      INFO(name);
      CHECK(value <= 1e-8);
    }
  }

  TEST_CASE("Cahn-Hilliard boundary dynamics") {
    const auto [t, n] = make_grids(small_grid());
    const double b = 1.0 / (1.0 + std::sqrt(2.0));
    CHECK(max_abs_diff(ch_boundary_resolvent(constant(t, 1.0), cplx(1.0)), b) < 1e-14);
    CHECK(lp_norm(ch_boundary_resolvent(BoundaryField::zeros(t), cplx(1.0)), 2.0) == 0.0);

    const auto g = BoundaryField::from_function(t, [](auto x) { return cplx(std::exp(std::cos(x[0])), 0.5); });
    const cplx mu = std::polar(2.0, -0.3);
    const auto v = ch_boundary_resolvent(g, mu);
    auto g3 = g;
    for (auto& s : g3.samples) s *= cplx(3.0, -1.0);
    const auto v3 = ch_boundary_resolvent(g3, mu);
    for (std::size_t i = 0; i < v.samples.size(); ++i) {
      CHECK(std::abs(v3.samples[i] - cplx(3.0, -1.0) * v.samples[i]) < 1e-13);
    }
    const auto solve = ch_boundary_solve(g, mu);
    CHECK(solve.max_residual() <= 1e-8);
    CHECK_FALSE(solve.u.has_value());
  }

  TEST_CASE("road-field model") {
    const auto [t, n] = make_grids(small_grid());
    const KppParams p{1.0, 1.0, 1.0};
    const auto out = kpp_resolvent(constant(t, 1.0), cplx(1.0), p, n);
    CHECK(max_abs_diff(out.v, 2.0 / 3.0) < 1e-14);
    REQUIRE(out.u.has_value());
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(out.u->at(i, 0) - 1.0 / 3.0) < 1e-14);
    CHECK(out.diagnostics.at("robin") <= 1e-8);
    CHECK(out.fd_diagnostics.at("robin") <= 1e-3);
    CHECK(out.max_residual() <= 1e-8);

    const auto zero = kpp_resolvent(BoundaryField::zeros(t), cplx(1.0), p, n);
    CHECK(lp_norm(zero.v, 2.0) == 0.0);
    CHECK_THROWS_AS(kpp_resolvent(constant(t, 1.0), cplx(1.0), KppParams{1.0, 0.0, 1.0}, n), ParameterError);
  }

  TEST_CASE("road-field multipliers") {
    const KppParams p{2.0, 0.5, 3.0};
    for (cplx z : {cplx(0.3), std::polar(4.0, 0.05)}) {
      for (cplx mu : {cplx(1.0), std::polar(5.0, 0.6)}) {
        const cplx q = std::sqrt(p.d * mu * mu + p.d * p.d * z * z) + 1.0;
        const cplx den = (mu * mu + p.k + p.d_prime * z * z) * q - p.k;
        const auto s = kpp_symbols(p, z, mu);
        CHECK(std::abs(s.m1 - mu * mu * p.k / den) < 1e-13 * std::abs(s.m1));
        CHECK(std::abs(s.m2 - mu * mu * q / den) < 1e-13 * std::abs(s.m2));
        CHECK(std::abs(s.f - p.k - den) < 1e-12 * std::abs(den));
      }
    }
    const auto r = kpp_lemma_scan(p, KppLemmaOptions{});
    CHECK(std::isfinite(r.sup_m1));
    CHECK(r.min_gap > 0.0);
    CHECK(r.m1_small <= 0.01 * r.sup_m1);
    CHECK(r.m1_large <= 0.01 * r.sup_m1);
  }

  TEST_CASE("scaled resolvents stay bounded on the sector") {
    for (auto variant : {DynBCVariant::HeatDynBC, DynBCVariant::CahnHilliardBoundary, DynBCVariant::KPPRoadField}) {
      DynBCProblem problem;
      problem.variant = variant;
      problem.grids = small_grid();
      const auto [t, n] = make_grids(problem.grids);
      const auto dictionary = probe_dictionary(t);
      for (double arg : {0.0, 0.35, -0.35}) {
        for (double r : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
          double best = 0.0;
          for (const auto& g : dictionary) best = std::max(best, scaled_resolvent_ratio(problem, g, std::polar(r, arg), n));
          CHECK(best <= 1.1);
        }
      }
    }
  }

  TEST_CASE("implicit Euler") {
    DynBCProblem problem;
    problem.grids = small_grid();
    const auto [t, n] = make_grids(problem.grids);
    const auto u0 = HalfSpaceField::zeros(t, n);

    const auto still = implicit_euler_evolve(problem, u0, BoundaryField::zeros(t), {}, {}, 0.1, 1.0);
    CHECK(still.records.size() == 10);
    for (const auto& r : still.records) {
      CHECK(r.increment == 0.0);
      CHECK(r.boundary_norm == 0.0);
    }

    const auto g = BoundaryField::from_function(t, [](auto x) { return cplx(1.0 + std::cos(x[0])); });
    const auto relax = implicit_euler_evolve(problem, u0, BoundaryField::zeros(t), {}, [&](double) { return g; }, 0.05, 2.0);
    for (std::size_t m = 1; m < relax.records.size(); ++m) {
      CHECK(relax.records[m].increment <= relax.records[m - 1].increment);
      CHECK(relax.records[m].max_residual <= 1e-8);
    }

    CHECK_THROWS_AS(implicit_euler_evolve(problem, u0, g, {}, {}, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(implicit_euler_evolve(problem, u0, g, {}, {}, 0.3, 1.0), ParameterError);
    problem.variant = DynBCVariant::KPPRoadField;
    CHECK_THROWS_AS(implicit_euler_evolve(problem, u0, g, {}, {}, 0.1, 1.0), DomainError);
  }

  TEST_CASE("variant names") {
    for (auto v : {DynBCVariant::HeatDynBC, DynBCVariant::CahnHilliardBoundary, DynBCVariant::KPPRoadField}) {
      CHECK(dynbc_variant_from_string(to_string(v)) == v);
    }
    CHECK_THROWS(dynbc_variant_from_string("wave"));
  }
}

TEST_SUITE("scans") {
  TEST_CASE("results do not depend on the worker count") {
    GridConfig g;
    g.points_per_dim = 32;
    g.normal_count = 64;
    g.normal_ratio = 1.1;
    MuScan mu;
    mu.rays = {0.0, 0.5};
    mu.points = 6;
    RBoundScanOptions opt;
    opt.search.trials = 8;
    opt.search.restarts = 4;
    opt.seed = 31;

    ::setenv("PRB_WORKERS", "1", 1);
    CHECK(worker_count() == 1);
    const auto a = rbound_scan(catalog::heat_kernel(), g, mu, opt);
    const auto c = opnorm_scan(catalog::heat_kernel(), 0.0, 0.5, g, mu);
    ::setenv("PRB_WORKERS", "4", 1);
    CHECK(worker_count() == 4);
    const auto b = rbound_scan(catalog::heat_kernel(), g, mu, opt);
    const auto d = opnorm_scan(catalog::heat_kernel(), 0.0, 0.5, g, mu);
    ::setenv("PRB_WORKERS", "zero", 1);
    CHECK(worker_count() == 1);
    ::unsetenv("PRB_WORKERS");

    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].norm == b.rows[i].norm);
    CHECK(a.slope == b.slope);
    REQUIRE(c.rows.size() == 12);
    for (std::size_t i = 0; i < c.rows.size(); ++i) CHECK(c.rows[i].norm == d.rows[i].norm);
  }

  TEST_CASE("parallel_for propagates failures") {
    ::setenv("PRB_WORKERS", "3", 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                      if (i == 7) throw DomainError("boom");
                    }),
                    DomainError);
    ::unsetenv("PRB_WORKERS");
  }

  TEST_CASE("scan validation") {
    MuScan bad;
    bad.min_abs = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    MuScan none;
    none.rays.clear();
    CHECK_THROWS_AS(none.validate(), ParameterError);
  }
}
