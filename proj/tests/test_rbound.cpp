#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "prb/rbound.hpp"
#include "prb/scans.hpp"

using namespace prb;

namespace {

BoundaryField random_field(const TangentialGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  auto g = BoundaryField::zeros(grid);
  for (auto& s : g.samples) s = cplx(n(rng), n(rng));
  return g;
}

std::vector<AnyField> as_any(const std::vector<BoundaryField>& v) { return {v.begin(), v.end()}; }

OperatorEntry scalar_op(cplx c) {
  return {1.0, [c](const AnyField& f) -> AnyField {
            auto g = std::get<BoundaryField>(f);
            for (auto& s : g.samples) s *= c;
            return g;
          }};
}

}  // namespace

TEST_SUITE("rbound") {
  const TangentialGrid grid(1, 2.0 * pi, 64);

  TEST_CASE("complex Rademacher samples") {
    RademacherSampler s(42);
    const auto x = sample_rademacher(s, 100000);
    cplx mean = 0.0;
    for (const auto& e : x) {
      CHECK(std::abs(std::abs(e) - 1.0) < 1e-15);
      mean += e;
    }
    CHECK(std::abs(mean / 1e5) <= 0.02);

    RademacherSampler again(42);
    CHECK(sample_rademacher(again, 100000) == x);
    RademacherSampler other(43);
    CHECK(sample_rademacher(other, 16) != std::vector<cplx>(x.begin(), x.begin() + 16));

    const RademacherSampler root(7);
    auto a = root.split(3), b = root.split(3), c = root.split(4);
    const auto va = sample_rademacher(a, 8);
    CHECK(va == sample_rademacher(b, 8));
    CHECK(va != sample_rademacher(c, 8));
    CHECK_THROWS_AS(sample_rademacher(a, 0), ParameterError);
  }

  TEST_CASE("Rademacher sums") {
    const auto f = random_field(grid, 1), g = random_field(grid, 2), h = random_field(grid, 3);
    RademacherSampler s(1);

    const auto single = eps_p_norm({AnyField(f)}, 1.5, NormSpec::lp(3.0), 10, s);
    CHECK(single.exact);
    CHECK(single.value == doctest::Approx(lp_norm(f, 3.0)));

    const std::vector<AnyField> fields{f, g, h};
    const double orth = std::sqrt(std::pow(lp_norm(f, 2.0), 2) + std::pow(lp_norm(g, 2.0), 2) + std::pow(lp_norm(h, 2.0), 2));
    const auto exact = eps_p_norm(fields, 2.0, NormSpec::lp(2.0), 10, s);
    CHECK(exact.exact);
    CHECK(exact.value == doctest::Approx(orth).epsilon(1e-13));
    const auto mc = eps_p_norm(fields, 2.0, NormSpec::lp(2.0), 4000, s, false);
    CHECK_FALSE(mc.exact);
    CHECK(std::abs(mc.value - orth) <= 3.0 * mc.std_error);

    const auto twin = eps_p_norm({AnyField(f), AnyField(f)}, 2.0, NormSpec::lp(2.0), 10, s);
    CHECK(twin.value == doctest::Approx(std::sqrt(2.0) * lp_norm(f, 2.0)));

    CHECK_THROWS_AS(eps_p_norm({}, 2.0, NormSpec::lp(2.0), 10, s), ParameterError);
  }

  TEST_CASE("Kahane-Khintchine comparison of p = 1 and p = 2") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      std::vector<AnyField> fields;
      for (int n = 0; n < 5; ++n) fields.emplace_back(random_field(grid, 10 * seed + n));
      RademacherSampler s1(seed), s2(seed + 99);
      const double one = eps_p_norm(fields, 1.0, NormSpec::lp(2.0), 2000, s1).value;
      const double two = eps_p_norm(fields, 2.0, NormSpec::lp(2.0), 2000, s2, false).value;
      CHECK(one <= two * (1.0 + 1e-2));
      CHECK(two <= 2.0 * one);
    }
  }

  TEST_CASE("scalar families on L2") {
    const auto inputs = as_any(probe_dictionary(grid));
    const std::vector<OperatorEntry> ops{scalar_op(1.0), scalar_op(cplx(0.0, 2.0)), scalar_op(-3.0)};
    RBoundOptions opt;
    const auto est = rbound_lower(ops, inputs, opt, RademacherSampler(5));
    CHECK(est.value == doctest::Approx(3.0).epsilon(0.05));
    CHECK(est.value >= est.singleton_best);
    CHECK(est.singleton_best == doctest::Approx(3.0));
  }

  TEST_CASE("single multiplier") {
    const auto inputs = as_any(probe_dictionary(grid));
    const auto a = catalog::bessel_potential(-1.0);
    const std::vector<OperatorEntry> ops{
        {1.0, [&](const AnyField& f) -> AnyField { return apply_multiplier(a, std::nullopt, std::get<BoundaryField>(f)); }}};
    const auto est = rbound_lower(ops, inputs, RBoundOptions{}, RademacherSampler(6));
    CHECK(est.value == doctest::Approx(1.0).epsilon(0.02));

    CHECK_THROWS_AS(rbound_lower({}, inputs, RBoundOptions{}, RademacherSampler(6)), ParameterError);
    CHECK_THROWS_AS(rbound_lower(ops, {}, RBoundOptions{}, RademacherSampler(6)), ParameterError);
  }

  TEST_CASE("more restarts never lower the estimate") {
    const auto inputs = as_any(probe_dictionary(grid));
    const NormalGrid normal(64, 16.0, 1.1);
    const auto heat = catalog::heat_kernel();
    std::vector<OperatorEntry> ops;
    for (double arg : {0.0, 0.5, -0.5}) {
      const cplx mu = std::polar(4.0, arg);
      ops.push_back({mu, [&, mu](const AnyField& f) -> AnyField {
                       return apply_poisson(heat, mu, std::get<BoundaryField>(f), normal);
                     }});
    }
    RBoundOptions opt;
    opt.out_norm = NormSpec::mixed(2.0, 2.0, true);
    opt.trials = 8;
    double prev = 0.0;
    for (int restarts : {0, 2, 6, 12}) {
      opt.restarts = restarts;
      const auto est = rbound_lower(ops, inputs, opt, RademacherSampler(77));
      CHECK(est.value >= prev);
      prev = est.value;
    }
  }

  TEST_CASE("decay fit") {
    ScanResult scan;
    for (int i = 0; i < 12; ++i) {
      const double r = std::pow(10.0, 1.0 + 2.0 * i / 11.0);
      scan.rows.push_back({r, 0.0, 7.0 / std::sqrt(r)});
    }
    const auto exact = decay_fit(scan, FitAbscissa::modulus);
    CHECK(exact.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(exact.residual < 1e-10);

    for (auto& row : scan.rows) row.norm = 2.0;
    CHECK(std::abs(decay_fit(scan).slope) < 1e-14);

    scan.rows.resize(4);
    CHECK_THROWS_AS(decay_fit(scan), ParameterError);
  }

  TEST_CASE("heat operator-norm scan decays like <mu>^(-1/2)") {
    GridConfig g;
    g.points_per_dim = 64;
    const auto scan = opnorm_scan(catalog::heat_kernel(), 0.0, 0.0, g, MuScan{});
    CHECK(scan.slope == doctest::Approx(-0.5).epsilon(0.03 / 0.5));
  }

  TEST_CASE("scan serialization") {
    ScanResult scan;
    scan.rows = {{1.0, 0.0, 0.5}, {2.0, 0.0, 0.25}};
    scan.slope = -1.0;
    scan.seed = 9;
    std::ostringstream csv;
    write_scan_csv(csv, scan, {"version=test"});
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "# version=test");
    std::getline(lines, line);
    CHECK(line == "abs_mu,arg_mu,norm,slope,residual,seed");
    std::getline(lines, line);
    CHECK(line == "1,0,0.5,-1,0,9");
    CHECK(csv.str().find("# slope=-1 residual=0\n") != std::string::npos);

    std::ostringstream jl;
    write_scan_jsonl(jl, scan, R"({"kernel":"heat"})", "test");
    std::istringstream records(jl.str());
    int count = 0;
    while (std::getline(records, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.at("schema_version") == scan_schema_version);
      if (count == 0) CHECK(j.at("config").at("kernel") == "heat");
      ++count;
    }
    CHECK(count == 4);
  }
}
