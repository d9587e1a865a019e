#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prb/dynbc.hpp"
#include "prb/scans.hpp"

namespace py = pybind11;
using namespace prb;

namespace {

SymbolKernel lookup(const std::string& name, double half_angle, const KppParams& kpp) {
  auto k = catalog::kernel_by_name(name, half_angle, kpp);
  if (!k) throw ParameterError("unknown kernel '" + name + "'");
  return *k;
}

KernelKind kind_from(const std::string& s) {
  if (s == "strong") return KernelKind::strong;
  if (s == "weak") return KernelKind::weak;
  throw ParameterError("kind must be 'strong' or 'weak'");
}

py::tuple row_tuple(const ScanRow& r) { return py::make_tuple(r.abs_mu, r.arg_mu, r.norm); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of poisson_rbound";
  m.attr("__version__") = PRB_VERSION;

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("bracket", [](const std::vector<double>& xi, std::optional<cplx> mu) { return bracket(xi, mu); },
        py::arg("xi"), py::arg("mu") = py::none(), "(1 + |xi|^2 + |mu|^2)^(1/2)");
  m.def("sector_contains", [](double alpha, double beta, cplx mu) { return Sector(alpha, beta).contains(mu); },
        py::arg("alpha"), py::arg("beta"), py::arg("mu"));
  m.def("lemma_max_eval", &lemma_max_eval, py::arg("a"), py::arg("rho"), py::arg("t"));
  m.def("kernel_names", &catalog::kernel_names);
  m.def("worker_count", &worker_count);

  py::class_<KppParams>(m, "KppParams")
      .def(py::init([](double d, double d_prime, double k) {
             KppParams p{d, d_prime, k};
             p.validate();
             return p;
           }),
           py::arg("d") = 1.0, py::arg("d_prime") = 1.0, py::arg("k") = 1.0)
      .def_readonly("d", &KppParams::d)
      .def_readonly("d_prime", &KppParams::d_prime)
      .def_readonly("k", &KppParams::k);

  py::class_<SymbolKernel>(m, "Kernel")
      .def_readonly("name", &SymbolKernel::name)
      .def_readonly("order", &SymbolKernel::order)
      .def("__call__",
           [](const SymbolKernel& k, std::vector<double> xi, std::optional<cplx> mu, double xn) {
             return eval_kernel(k, xi, mu, xn);
           },
           py::arg("xi"), py::arg("mu") = py::none(), py::arg("xn") = 0.0)
      .def("seminorm",
           [](const SymbolKernel& k, int N, const std::string& kind, int points_per_decade) {
             ProbeSpec probe;
             probe.points_per_decade = points_per_decade;
             return seminorm_as(k, kind_from(kind), N, probe);
           },
           py::arg("N"), py::arg("kind") = "strong", py::arg("points_per_decade") = ProbeSpec{}.points_per_decade,
           py::call_guard<py::gil_scoped_release>())
      .def("__repr__", [](const SymbolKernel& k) { return "<Kernel " + k.name + ">"; });

  m.def("kernel", &lookup, py::arg("name"), py::arg("half_angle") = catalog::default_half_angle,
        py::arg("kpp") = KppParams{});

  py::class_<GridConfig>(m, "GridConfig")
      .def(py::init<>())
      .def_readwrite("dim", &GridConfig::dim)
      .def_readwrite("box_length", &GridConfig::box_length)
      .def_readwrite("points_per_dim", &GridConfig::points_per_dim)
      .def_readwrite("normal_count", &GridConfig::normal_count)
      .def_readwrite("normal_extent", &GridConfig::normal_extent)
      .def_readwrite("normal_ratio", &GridConfig::normal_ratio);

  py::class_<MuScan>(m, "MuScan")
      .def(py::init<>())
      .def_readwrite("rays", &MuScan::rays)
      .def_readwrite("min_abs", &MuScan::min_abs)
      .def_readwrite("max_abs", &MuScan::max_abs)
      .def_readwrite("points", &MuScan::points);

  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("slope", &ScanResult::slope)
      .def_readonly("residual", &ScanResult::residual)
      .def_readonly("seed", &ScanResult::seed)
      .def_property_readonly("rows", [](const ScanResult& s) {
        py::list out;
        for (const auto& r : s.rows) out.append(row_tuple(r));
        return out;
      });

  m.def("decay_fit",
        [](const std::vector<std::tuple<double, double, double>>& rows, bool modulus) {
          ScanResult s;
          for (const auto& [a, b, n] : rows) s.rows.push_back({a, b, n});
          const auto fit = decay_fit(s, modulus ? FitAbscissa::modulus : FitAbscissa::bracket);
          return py::make_tuple(fit.slope, fit.residual);
        },
        py::arg("rows"), py::arg("modulus") = false, "Least-squares slope of log norm against log <mu> or log |mu|.");

  m.def("opnorm_scan", &opnorm_scan, py::arg("kernel"), py::arg("s"), py::arg("t"), py::arg("grids"),
        py::arg("scan"), py::call_guard<py::gil_scoped_release>());

  m.def("rbound_scan",
        [](const SymbolKernel& k, const GridConfig& grids, const MuScan& scan, double prefactor, int trials,
           int restarts, std::uint64_t seed) {
          RBoundScanOptions opt;
          opt.prefactor = prefactor;
          opt.search.trials = trials;
          opt.search.restarts = restarts;
          opt.seed = seed;
          py::gil_scoped_release release;
          return rbound_scan(k, grids, scan, opt);
        },
        py::arg("kernel"), py::arg("grids"), py::arg("scan"), py::arg("prefactor") = 0.5, py::arg("trials") = 32,
        py::arg("restarts") = 16, py::arg("seed") = 0);

  m.def("kpp_resolvent_v",
        [](py::array_t<cplx, py::array::c_style | py::array::forcecast> g, cplx mu, const KppParams& params,
           double box_length, int normal_count) {
          if (g.ndim() != 1) throw ParameterError("g must be one-dimensional");
          DynBCProblem problem;
          problem.variant = DynBCVariant::KPPRoadField;
          problem.kpp = params;
          const TangentialGrid grid(1, box_length, static_cast<int>(g.shape(0)));
          auto field = BoundaryField::zeros(grid);
          std::copy(g.data(), g.data() + g.shape(0), field.samples.begin());
          const NormalGrid normal(normal_count, problem.grids.normal_extent, problem.grids.normal_ratio);
          const auto out = boundary_resolvent(problem, field, mu, normal);
          py::array_t<cplx> v(static_cast<py::ssize_t>(out.v.samples.size()));
          std::copy(out.v.samples.begin(), out.v.samples.end(), v.mutable_data());
          return py::make_tuple(v, out.diagnostics);
        },
        py::arg("g"), py::arg("mu"), py::arg("params") = KppParams{}, py::arg("box_length") = 2.0 * pi,
        py::arg("normal_count") = 128, "Road component v of the KPP resolvent with data (0, g).");

  m.def("kpp_lemma_scan",
        [](const KppParams& params, int points_per_decade) {
          KppLemmaOptions opt;
          opt.points_per_decade = points_per_decade;
          const auto r = kpp_lemma_scan(params, opt);
          return py::dict(py::arg("sup_m1") = r.sup_m1, py::arg("sup_m2") = r.sup_m2, py::arg("min_gap") = r.min_gap,
                          py::arg("m1_small") = r.m1_small, py::arg("m1_large") = r.m1_large,
                          py::arg("samples") = r.samples);
        },
        py::arg("params") = KppParams{}, py::arg("points_per_decade") = KppLemmaOptions{}.points_per_decade);
}
