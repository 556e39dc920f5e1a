#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kls/config.hpp"
#include "kls/distributions.hpp"
#include "kls/localization.hpp"
#include "kls/metrics.hpp"
#include "kls/moments.hpp"
#include "kls/tensorcheck.hpp"

namespace py = pybind11;
using namespace kls;

PYBIND11_MODULE(_kls_lab, m) {
  m.doc() = "numerical laboratory for isotropic log-concave experiments";

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("std_error", &Estimate::std_error)
      .def_readonly("n_samples", &Estimate::n_samples)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(value=" + fmt_double(e.value) +
               ", std_error=" + fmt_double(e.std_error) + ")";
      });

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("name", &MetricReport::name)
      .def_readonly("lhs", &MetricReport::lhs)
      .def_readonly("rhs", &MetricReport::rhs)
      .def_readonly("satisfied", &MetricReport::satisfied);

  py::class_<DistributionSpec>(m, "DistributionSpec")
      .def_property_readonly("name", &DistributionSpec::name)
      .def_readonly("dim", &DistributionSpec::dim);

  m.def("make_distribution",
        [](const std::string& family, int dim) {
          return make_distribution(family, dim);
        },
        py::arg("family"), py::arg("dim"));

  m.def("sample",
        [](const DistributionSpec& spec, int count, std::uint64_t seed) {
          return sample(spec, count, seed).data;
        },
        py::arg("spec"), py::arg("count"), py::arg("seed"));

  m.def("third_moment_inner", &third_moment_inner, py::arg("spec_p"),
        py::arg("spec_q"), py::arg("pairs"), py::arg("seed"));
  m.def("tensor_T", &tensor_T, py::arg("spec"), py::arg("A"), py::arg("B"),
        py::arg("C"), py::arg("pairs"), py::arg("seed"));
  m.def("thin_shell", &thin_shell, py::arg("spec"), py::arg("samples"),
        py::arg("seed"));

  m.def("w_p",
        [](std::vector<double> a, std::vector<double> b, double p) {
          return w_p_empirical(Empirical1D(std::move(a)),
                               Empirical1D(std::move(b)), p);
        },
        py::arg("a"), py::arg("b"), py::arg("p"));
  m.def("w_p_vs_normal",
        [](std::vector<double> a, double variance, double p) {
          return w_p_vs_normal(Empirical1D(std::move(a)), variance, p);
        },
        py::arg("a"), py::arg("variance"), py::arg("p"));
  m.def("tv_estimate",
        [](std::vector<double> a, std::vector<double> b) {
          return tv_estimate(Empirical1D(std::move(a)),
                             Empirical1D(std::move(b)));
        },
        py::arg("a"), py::arg("b"));

  m.def("tequ_rel_deviation",
        [](const DistributionSpec& spec, const Eigen::MatrixXd& A,
           const Eigen::MatrixXd& B, int samples, std::uint64_t seed) {
          return tequ_identity(spec, A, B, samples, seed).rel_deviation;
        },
        py::arg("spec"), py::arg("A"), py::arg("B"), py::arg("samples"),
        py::arg("seed"));

  m.def("check_matrix_holder", &check_matrix_holder);
  m.def("check_lieb_thirring", &check_lieb_thirring);
  m.def("check_lieb", &check_lieb);

  m.def("halfspace_cheeger",
        [](const DistributionSpec& spec, int directions, long samples,
           std::uint64_t seed) {
          return halfspace_cheeger(spec, directions, samples, seed).value;
        },
        py::arg("spec"), py::arg("directions"), py::arg("samples"),
        py::arg("seed"));

  m.def("oracle_potential",
        [](int n, double t, int q) {
          return n * std::pow(t / (1.0 + t), q);
        },
        py::arg("n"), py::arg("t"), py::arg("q"));

  m.def("config_hash", [](const std::string& text) {
    ExperimentConfig config;
    if (!text.empty()) {
      std::istringstream in(text);
      std::string line;
      while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos)
          config.set(line.substr(0, eq), line.substr(eq + 1));
      }
    }
    return config.config_hash();
  });
}
