#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsaf/config.hpp"
#include "qsaf/error.hpp"
#include "qsaf/extrema_levels.hpp"
#include "qsaf/holder.hpp"
#include "qsaf/qs_codec.hpp"
#include "qsaf/report.hpp"
#include "qsaf/self_affine.hpp"

namespace py = pybind11;
using namespace qsaf;

namespace {

// Digit strings cross the boundary in the same text form the CLI uses.
DigitString digits_in(const std::string& text, std::size_t alphabet) {
  return parse_digit_string(text, alphabet);
}

py::object to_python(const Json& value) {
  return py::module_::import("json").attr("loads")(value.dump());
}

py::dict holder_dict(const HolderReport& r) {
  py::dict d;
  d["kind"] = std::string(to_string(r.kind));
  d["exponent"] = r.exponent;
  d["critical_exponent_undetermined"] = r.critical_exponent_undetermined;
  if (r.regression_points) d["regression_points"] = *r.regression_points;
  if (r.frequencies_used) d["frequencies"] = r.frequencies_used->nu;
  return d;
}

py::list intervals(const std::vector<Interval>& v) {
  py::list out;
  for (const auto& i : v) out.append(py::make_tuple(i.left, i.right));
  return out;
}

}  // namespace

PYBIND11_MODULE(qsaffine, m) {
  m.doc() = "Self-affine functions defined by Q_s digit expansions";

  static PyObject* error_type =
      PyErr_NewException("qsaffine.Error", PyExc_ValueError, nullptr);
  m.attr("Error") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::handle(error_type)(e.what());
      instance.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type, instance.ptr());
    }
  });

  py::class_<SelfAffineSystem>(m, "System")
      .def(py::init([](std::vector<double> q, std::vector<double> g) {
             return SelfAffineSystem(StochasticVector(std::move(q)),
                                     AffineCoefficients(std::move(g)));
           }),
           py::arg("q"), py::arg("g"))
      .def_static("from_config",
                  [](const std::string& path) { return build_system(load_config(path)); })
      .def_property_readonly("size", &SelfAffineSystem::size)
      .def_property_readonly("q", [](const SelfAffineSystem& s) {
        auto w = s.q().weights();
        return std::vector<double>(w.begin(), w.end());
      })
      .def_property_readonly("g", [](const SelfAffineSystem& s) {
        auto w = s.g().coefficients();
        return std::vector<double>(w.begin(), w.end());
      })
      .def_property_readonly("delta", [](const SelfAffineSystem& s) {
        auto w = s.g().offsets();
        return std::vector<double>(w.begin(), w.end());
      })
      .def_property_readonly("bounds", [](const SelfAffineSystem& s) {
        return py::make_tuple(s.bounds().lower, s.bounds().upper);
      })
      .def_property_readonly("default_depth", &SelfAffineSystem::default_depth)
      .def("__call__",
           [](const SelfAffineSystem& s, double x, std::optional<std::size_t> depth) {
             return eval_at(s, x, depth).value;
           },
           py::arg("x"), py::arg("depth") = py::none())
      .def("eval_digits",
           [](const SelfAffineSystem& s, const std::string& digits) {
             auto e = eval(s, digits_in(digits, s.size()));
             return py::make_tuple(e.value, e.error_bound);
           })
      .def("sample",
           [](const SelfAffineSystem& s, std::size_t points, bool extrema) {
             py::list out;
             for (const auto& p : sample(s, points, std::nullopt, extrema))
               out.append(py::make_tuple(p.x, p.value));
             return out;
           },
           py::arg("points") = 1024, py::arg("include_extrema") = true)
      .def("variation_lower_bound", &variation_lower_bound, py::arg("n"))
      .def("global_exponent", [](const SelfAffineSystem& s) {
        return holder_dict(global_exponent(s));
      })
      .def("ae_exponent", [](const SelfAffineSystem& s) {
        return holder_dict(almost_everywhere_exponent(s));
      })
      .def("binary_exponent", [](const SelfAffineSystem& s) {
        return holder_dict(local_exponent_binary(s));
      })
      .def("unary_exponent",
           [](const SelfAffineSystem& s, std::vector<double> nu) {
             FrequencyVector f{std::move(nu), 0, true};
             return holder_dict(local_exponent_unary(s, f));
           })
      .def("empirical_exponent",
           [](const SelfAffineSystem& s, const std::string& digits, std::size_t first,
              std::size_t last, std::size_t stride) {
             return holder_dict(
                 empirical_exponent(s, digits_in(digits, s.size()), {first, last, stride}));
           },
           py::arg("digits"), py::arg("first"), py::arg("last"), py::arg("stride") = 1)
      .def("is_singular", &singularity_predicate)
      .def("is_nowhere_differentiable", &nowhere_differentiable_predicate)
      .def("overshoot_branch", &overshoot_branch)
      .def("maximum", [](const SelfAffineSystem& s) {
        auto r = closed_form_max(s);
        py::dict d;
        d["value"] = r.value;
        d["argmax_digits"] = r.argmax_digits;
        d["branch"] = r.branch;
        d["oracle_value"] = r.oracle_value;
        return d;
      })
      .def("minimum", &closed_form_min)
      .def("maxima_dimension", [](const SelfAffineSystem& s) {
        return maxima_set(s).dimension;
      })
      .def("preimage",
           [](const SelfAffineSystem& s, double y, std::size_t depth) {
             return format_digit_string(preimage_digits(s, y, depth));
           },
           py::arg("y"), py::arg("depth") = 64)
      .def("analyze",
           [](const SelfAffineSystem& s, const std::string& label) {
             SystemConfig config;
             config.label = label;
             auto q = s.q().weights();
             auto g = s.g().coefficients();
             config.q.assign(q.begin(), q.end());
             config.g.assign(g.begin(), g.end());
             for (double v : config.q) config.q_text.push_back(format_real(v));
             for (double v : config.g) config.g_text.push_back(format_real(v));
             return to_python(analyze(config, s));
           },
           py::arg("label") = "unnamed");

  m.def("encode",
        [](double x, std::vector<double> q, std::size_t depth) {
          return format_digit_string(encode(x, StochasticVector(std::move(q)), depth));
        },
        py::arg("x"), py::arg("q"), py::arg("depth") = 64);
  m.def("decode",
        [](const std::string& digits, std::vector<double> q) {
          StochasticVector sv(std::move(q));
          auto e = decode(digits_in(digits, sv.size()), sv);
          return py::make_tuple(e.value, e.error_bound);
        },
        py::arg("digits"), py::arg("q"));
  m.def("cylinder",
        [](std::vector<Digit> base, std::vector<double> q) {
          auto b = cylinder_bounds(Cylinder{std::move(base)}, StochasticVector(std::move(q)));
          return py::make_tuple(b.left, b.right, b.length);
        },
        py::arg("base"), py::arg("q"));
  m.def("moran_dimension",
        [](std::vector<double> q, std::vector<Digit> allowed) {
          return moran_dimension(StochasticVector(std::move(q)), allowed);
        },
        py::arg("q"), py::arg("allowed"));
  m.def("cantor_stage",
        [](std::vector<double> q, std::vector<Digit> allowed, std::size_t t) {
          return intervals(
              cantor_stage(make_cantor_spec(StochasticVector(std::move(q)), std::move(allowed)), t));
        },
        py::arg("q"), py::arg("allowed"), py::arg("t"));
}
