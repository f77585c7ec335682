#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fgamma/cgf.hpp"
#include "fgamma/cli.hpp"
#include "fgamma/io.hpp"

namespace py = pybind11;
using fgamma::io::Json;

namespace {

py::object to_python(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    default: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
  }
}

fgamma::BoundedFunctionClass parse_class(const std::string& spec) {
  return fgamma::io::class_from_json(Json::parse(spec));
}

fgamma::Sample to_sample(const std::vector<std::vector<double>>& rows) {
  return fgamma::Sample::from_rows(rows);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the fgamma C++ library";

  py::register_exception<fgamma::UserError>(m, "UserError", PyExc_ValueError);
  py::register_exception<fgamma::InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  py::class_<fgamma::DivergenceGenerator>(m, "Generator")
      .def(py::init([](const std::string& spec) { return fgamma::DivergenceGenerator::parse(spec); }),
           py::arg("spec"))
      .def_property_readonly("spec", &fgamma::DivergenceGenerator::spec)
      .def_property_readonly("z0", &fgamma::DivergenceGenerator::z0)
      .def_property_readonly("fstar_finite_sup", &fgamma::DivergenceGenerator::fstar_finite_sup)
      .def("f", &fgamma::DivergenceGenerator::f)
      .def("f_star", &fgamma::DivergenceGenerator::f_star)
      .def("f_star_rprime", &fgamma::DivergenceGenerator::f_star_rprime)
      .def("validate_ok", [](const fgamma::DivergenceGenerator& g) { return g.validate().ok(); })
      .def("__repr__", [](const fgamma::DivergenceGenerator& g) { return "Generator('" + g.spec() + "')"; });

  m.def(
      "lambda_empirical",
      [](const std::vector<double>& values, const fgamma::DivergenceGenerator& gen) {
        const auto r = fgamma::lambda_empirical(values, gen);
        return py::make_tuple(r.value, r.nu_star);
      },
      py::arg("values"), py::arg("gen"), "Lambda_f of the empirical measure and the minimizing shift.");

  m.def(
      "delta_f",
      [](const fgamma::DivergenceGenerator& gen, std::size_t n, double alpha, double beta) {
        return fgamma::delta_f(gen, n, alpha, beta).value;
      },
      py::arg("gen"), py::arg("n"), py::arg("alpha"), py::arg("beta"));

  m.def("k_quantity", &fgamma::k_quantity, py::arg("gen"), py::arg("r"), py::arg("n"),
        py::arg("alpha"), py::arg("beta"), py::arg("class_has_constant") = true);

  m.def(
      "f_divergence_discrete",
      [](const fgamma::DivergenceGenerator& gen, const std::vector<double>& q,
         const std::vector<double>& p) { return fgamma::f_divergence_discrete(gen, q, p); },
      py::arg("gen"), py::arg("q"), py::arg("p"));

  m.def(
      "_estimate",
      [](const fgamma::DivergenceGenerator& gen, const std::string& class_spec,
         const std::vector<std::vector<double>>& q, const std::vector<std::vector<double>>& p,
         std::uint64_t seed) {
        fgamma::AscentConfig cfg;
        cfg.seed = seed;
        const auto res =
            fgamma::estimate_divergence(gen, parse_class(class_spec), to_sample(q), to_sample(p), cfg);
        return to_python(fgamma::io::to_json(res));
      },
      py::arg("gen"), py::arg("class_spec"), py::arg("q"), py::arg("p"), py::arg("seed") = 0);

  m.def(
      "_rademacher",
      [](const std::string& class_spec, const std::vector<std::vector<double>>& points,
         std::size_t draws, std::uint64_t seed) {
        const auto est =
            fgamma::empirical_rademacher(parse_class(class_spec), to_sample(points), draws, seed);
        return to_python(fgamma::io::to_json(est));
      },
      py::arg("class_spec"), py::arg("points"), py::arg("draws"), py::arg("seed") = 0);

  m.def(
      "bound",
      [](const std::string& setting, std::size_t n, std::size_t m_count, double epsilon,
         const std::string& gen, double alpha, double beta, double r, double k, double eps_approx,
         double eps_opt, std::optional<double> delta) {
        fgamma::BoundInputs in;
        in.n = n;
        in.m = m_count;
        in.epsilon = epsilon;
        in.gen = fgamma::DivergenceGenerator::parse(gen);
        in.alpha = alpha;
        in.beta = beta;
        in.r = r;
        in.k = k;
        in.eps_approx = eps_approx;
        in.eps_opt = eps_opt;
        in.delta = delta;
        return to_python(fgamma::io::to_json(
            fgamma::compute_bound(fgamma::parse_setting(setting), in)));
      },
      py::arg("setting"), py::arg("n"), py::arg("m"), py::arg("epsilon"), py::arg("gen") = "kl",
      py::arg("alpha") = 0.0, py::arg("beta") = 1.0, py::arg("r") = 0.0, py::arg("k") = 0.0,
      py::arg("eps_approx") = 0.0, py::arg("eps_opt") = 0.0, py::arg("delta") = py::none());

  m.def(
      "verify",
      [](const std::string& suite, const std::string& budget, std::uint64_t seed) {
        fgamma::VerifyReport rep;
        {
          py::gil_scoped_release release;
          rep = fgamma::verify(suite, fgamma::parse_budget(budget), seed);
        }
        return to_python(fgamma::io::to_json(rep));
      },
      py::arg("suite") = "all", py::arg("budget") = "quick", py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = fgamma::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit code, stdout, stderr).");
}
