#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hardcore/asymptotics.hpp"
#include "hardcore/config.hpp"
#include "hardcore/estimators.hpp"
#include "hardcore/geometry.hpp"
#include "hardcore/simulator.hpp"

namespace py = pybind11;
using namespace hardcore;

namespace {

// Grain table as an (n, d + 2) array: centers, radius, weight.
py::array_t<double> grain_array(const std::vector<Grain>& grains, int d) {
  py::array_t<double> out({static_cast<py::ssize_t>(grains.size()), static_cast<py::ssize_t>(d + 2)});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < grains.size(); ++i) {
    const auto row = static_cast<py::ssize_t>(i);
    for (int j = 0; j < d; ++j) a(row, j) = grains[i].center[static_cast<std::size_t>(j)];
    a(row, d) = grains[i].radius;
    a(row, d + 1) = grains[i].weight;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_hardcore, m) {
  m.doc() = "Hard-core thinnings of Boolean models";

  m.def("unit_ball_volume", &unit_ball_volume, py::arg("d"));
  m.def("ball_volume", &ball_volume, py::arg("d"), py::arg("r"));
  m.def(
      "ball_intersection_volume",
      [](int d, double r1, double r2, double u) { return ball_intersection_volume(d, {r1, r2, u}); },
      py::arg("d"), py::arg("r1"), py::arg("r2"), py::arg("u"));

  py::class_<RadiusLaw>(m, "RadiusLaw")
      .def_static("pareto", &RadiusLaw::pareto, py::arg("alpha"), py::arg("scale") = 1.0)
      .def_static("deterministic", &RadiusLaw::deterministic, py::arg("radius"))
      .def_static("tabulated", &RadiusLaw::tabulated, py::arg("radii"), py::arg("cdf"))
      .def("tail", &RadiusLaw::tail, py::arg("r"))
      .def("cdf", &RadiusLaw::cdf, py::arg("r"))
      .def("median", &RadiusLaw::median)
      .def("moment_integral", &RadiusLaw::moment_integral, py::arg("p"), py::arg("a") = 0.0)
      .def("karamata_asymptote", &RadiusLaw::karamata_asymptote, py::arg("p"), py::arg("a"), py::arg("x"))
      .def("__repr__", &RadiusLaw::describe);

  py::enum_<WeightKernel>(m, "WeightKernel")
      .value("isolated", WeightKernel::isolated)
      .value("random", WeightKernel::random)
      .value("large", WeightKernel::large)
      .value("small", WeightKernel::small);
  m.def("parse_kernel", &parse_kernel, py::arg("name"));
  m.def("weight_survival", &weight_survival, py::arg("kernel"), py::arg("r"), py::arg("w"));

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](double lambda, const RadiusLaw& law, WeightKernel kernel, int d) {
             ModelSpec s{lambda, law, kernel, d};
             s.validate();
             return s;
           }),
           py::arg("lam"), py::arg("law"), py::arg("kernel"), py::arg("d"))
      .def_readonly("lam", &ModelSpec::lambda)
      .def_readonly("d", &ModelSpec::d)
      .def_readonly("kernel", &ModelSpec::kernel);

  py::class_<ThinnedModel>(m, "ThinnedModel")
      .def(py::init([](const ModelSpec& spec, double nested_rel) {
             AnalyticsOptions o;
             o.nested.rel = nested_rel;
             o.inner.rel = nested_rel;
             return ThinnedModel(spec, o);
           }),
           py::arg("spec"), py::arg("nested_rel") = 1e-6)
      .def("boolean_volume_fraction", &ThinnedModel::boolean_volume_fraction)
      .def("boolean_covariance", &ThinnedModel::boolean_covariance, py::arg("z"))
      .def("retention_probability", &ThinnedModel::retention_probability, py::arg("r"), py::arg("w"))
      .def("mean_retention", &ThinnedModel::mean_retention, py::arg("r"))
      .def("thinned_intensity", &ThinnedModel::thinned_intensity)
      .def("thinned_volume_fraction", &ThinnedModel::thinned_volume_fraction)
      .def("thinned_radius_tail", &ThinnedModel::thinned_radius_tail, py::arg("r"))
      .def("retention_covariance", &ThinnedModel::retention_covariance, py::arg("u"), py::arg("r1"), py::arg("r2"))
      .def("thinned_covariance", &ThinnedModel::thinned_covariance, py::arg("z"),
           py::call_guard<py::gil_scoped_release>())
      .def("thinned_two_point_correlation", &ThinnedModel::thinned_two_point_correlation, py::arg("z"),
           py::call_guard<py::gil_scoped_release>())
      .def("c_alpha_d", &ThinnedModel::c_alpha_d);

  m.def("c_alpha_d", py::overload_cast<double, int>(&c_alpha_d), py::arg("alpha"), py::arg("d"));

  m.def(
      "asymptotic_prediction",
      [](const ThinnedModel& model, const std::string& statistic, const std::vector<double>& x) {
        const AsymptoticLaw law = asymptotic_prediction(model, parse_statistic(statistic));
        std::vector<double> y;
        for (double v : x) y.push_back(law.evaluate(v));
        return py::make_tuple(y, law.note);
      },
      py::arg("model"), py::arg("statistic"), py::arg("x"));

  m.def(
      "simulate",
      [](double lambda, const RadiusLaw& law, WeightKernel kernel, int d, double side, double margin,
         std::uint64_t seed, std::uint64_t replication) {
        const Window w = Window::cube(d, side, margin);
        BooleanSample sample;
        ThinnedSample thinned;
        {
          py::gil_scoped_release release;
          sample = sample_boolean(lambda, law, kernel, w, seed, replication);
          thinned = thin(sample, kernel);
        }
        py::dict out;
        out["grains"] = grain_array(sample.grains, d);
        out["retained"] = grain_array(thinned.retained, d);
        out["parent_index"] = thinned.parent_index;
        out["bias_bound"] = sample.bias_bound;
        out["expected_count"] = sample.expected_count;
        return out;
      },
      py::arg("lam"), py::arg("law"), py::arg("kernel"), py::arg("d"), py::arg("side"), py::arg("margin"),
      py::arg("seed") = 1, py::arg("replication") = 0);

  m.def(
      "fit_tail_exponent",
      [](const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
        const TailFit f = fit_tail_exponent(x, y, lo, hi);
        py::dict out;
        out["slope"] = f.slope;
        out["intercept"] = f.intercept;
        out["r_squared"] = f.r_squared;
        out["lo"] = f.lo;
        out["hi"] = f.hi;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("lo"), py::arg("hi"));

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  m.def(
      "parse_config",
      [](const std::string& text) {
        const ExperimentConfig c = parse_config(text);
        c.validate();
        return emit_config(c);
      },
      py::arg("text"), "Validates a config and returns its canonical text.");
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("text"));
}
