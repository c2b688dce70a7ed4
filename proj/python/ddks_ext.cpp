// Python bindings for the ddks core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddks/baselines.hpp"
#include "ddks/datasets.hpp"
#include "ddks/harness.hpp"
#include "ddks/io.hpp"
#include "ddks/method.hpp"
#include "ddks/significance.hpp"

namespace py = pybind11;
using namespace ddks;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1-D input is read as n points in one dimension.
Sample to_sample(const Array& a) {
  if (a.ndim() != 1 && a.ndim() != 2) fail(ErrorKind::DimensionMismatch, "expected a 1-D or 2-D array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const std::size_t d = a.ndim() == 2 ? static_cast<std::size_t>(a.shape(1)) : 1;
  return Sample(n, d, std::vector<double>(a.data(), a.data() + n * d));
}

Array to_array(const Sample& s) {
  Array out({s.size(), s.dim()});
  std::copy(s.values().begin(), s.values().end(), out.mutable_data());
  return out;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

DatasetSpec make_spec(const std::string& family, std::size_t d, std::uint64_t seed, const py::dict& params) {
  DatasetSpec spec;
  spec.family = parse_family(family);
  spec.d = d;
  spec.params = default_params(spec.family);
  spec.rng = {seed, 0};
  for (const auto& [key, value] : params) set_param(spec.params, py::str(key).cast<std::string>(), value.cast<double>());
  return spec;
}

StatisticOptions statistic_options(std::size_t voxels_per_dim) {
  StatisticOptions o;
  o.vdks.voxels_per_dim = voxels_per_dim;
  return o;
}

}  // namespace

PYBIND11_MODULE(_ddks, m) {
  m.doc() = "d-dimensional two-sample Kolmogorov-Smirnov tests";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr e) {
    try {
      if (e) std::rethrow_exception(e);
    } catch (const Error& x) {
      py::set_error(error, x.what());
    }
  });

  m.def(
      "statistic",
      [](const std::string& method, const Array& p, const Array& t, std::size_t voxels_per_dim) {
        const Sample sp = to_sample(p), st = to_sample(t);
        py::gil_scoped_release release;
        return compute_statistic(parse_method(method), sp, st, statistic_options(voxels_per_dim));
      },
      py::arg("method"), py::arg("p"), py::arg("t"), py::arg("voxels_per_dim") = 0,
      "Statistic of the named method (ddks, ddks_naive, vdks, rdks, onedks, hotelling_t2, kl_div).");

  m.def(
      "test",
      [](const std::string& method, const Array& p, const Array& t, std::size_t permutations, std::uint64_t seed,
         bool analytical, std::size_t voxels_per_dim) {
        const Sample sp = to_sample(p), st = to_sample(t);
        TestConfig config;
        config.permutations = permutations;
        config.seed = seed;
        config.analytical = analytical;
        config.statistic = statistic_options(voxels_per_dim);
        TestOutcome out;
        {
          py::gil_scoped_release release;
          out = run_test(parse_method(method), sp, st, config);
        }
        return json_to_py(to_json(out));
      },
      py::arg("method"), py::arg("p"), py::arg("t"), py::arg("permutations") = 100, py::arg("seed") = 0,
      py::arg("analytical") = false, py::arg("voxels_per_dim") = 0,
      "Statistic and p-value as a dict.");

  m.def(
      "significance",
      [](const Array& p, const Array& t) {
        const Sample sp = to_sample(p), st = to_sample(t);
        py::gil_scoped_release release;
        const auto r = ddks_analytical(sp, st);
        return std::make_pair(r.statistic, r.significance);
      },
      py::arg("p"), py::arg("t"), "Exact ddKS statistic and its analytical significance.");

  m.def("ks_1d", [](const Array& x, const Array& y) {
    const Sample a = to_sample(x), b = to_sample(y);
    return ks_1d(a.column(0), b.column(0));
  });

  m.def(
      "generate",
      [](const std::string& family, std::size_t n, std::size_t d, std::uint64_t seed, const py::dict& params) {
        const auto [p, t] = gen_pair(make_spec(family, d, seed, params), n);
        return std::make_pair(to_array(p), to_array(t));
      },
      py::arg("family"), py::arg("n"), py::arg("d") = 3, py::arg("seed") = 0, py::arg("params") = py::dict(),
      "Synthetic sample pair (p, t) from a dataset family.");

  m.def(
      "min_sample_size",
      [](const std::string& method, const std::string& family, std::size_t d, std::size_t repetitions,
         std::size_t trials, std::size_t permutations, bool analytical, std::size_t n_max, std::uint64_t seed,
         const py::dict& params) {
        PowerConfig c;
        c.method = parse_method(method);
        c.repetitions = repetitions;
        c.trials = trials;
        c.permutations = permutations;
        c.analytical = analytical;
        c.n_max = n_max;
        const DatasetSpec spec = make_spec(family, d, seed, params);
        PowerReport r;
        {
          py::gil_scoped_release release;
          r = min_sample_size(c, spec, {seed, 1});
        }
        return json_to_py(to_json(r));
      },
      py::arg("method"), py::arg("family"), py::arg("d") = 3, py::arg("repetitions") = 10, py::arg("trials") = 100,
      py::arg("permutations") = 100, py::arg("analytical") = false, py::arg("n_max") = 5000, py::arg("seed") = 0,
      py::arg("params") = py::dict(), "Smallest sample size reaching the power criterion, as a report dict.");
}
