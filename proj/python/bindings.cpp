#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lorentz/bounds.hpp"
#include "lorentz/ensemble.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/fields.hpp"
#include "lorentz/rmtstats.hpp"
#include "lorentz/twoscat.hpp"

namespace py = pybind11;
using namespace lorentz;

namespace {

// Row j of the array is Im k = grid.im(j).
py::array_t<double> as_array(const std::vector<double>& v, const ComplexGrid& g) {
  py::array_t<double> out({g.ny(), g.nx()});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<std::uint8_t> as_array(const std::vector<std::uint8_t>& v, const ComplexGrid& g) {
  py::array_t<std::uint8_t> out({g.ny(), g.nx()});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_lorentz, m) {
  m.doc() = "Resonance statistics of a random Lorentz gas of point scatterers";
  m.attr("__version__") = LORENTZ_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PoleError>(m, "PoleError", PyExc_ValueError);
  py::register_exception<OverflowError>(m, "OverflowError", PyExc_OverflowError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  // green
  py::class_<GasGeometry>(m, "GasGeometry")
      .def(py::init<int, int, double>(), py::arg("d"), py::arg("n"), py::arg("sigma") = 1.0)
      .def_property_readonly("d", &GasGeometry::dimension)
      .def_property_readonly("n", &GasGeometry::size)
      .def_property_readonly("sigma", &GasGeometry::sigma)
      .def_property_readonly("radius", &GasGeometry::radius);
  m.def("gas_radius", &gas_radius, py::arg("d"), py::arg("n"), py::arg("sigma") = 1.0);
  m.def("green_plus", &green_plus, py::arg("d"), py::arg("k"), py::arg("r"));
  m.def("green_minus", [](int d, cplx k, double r) { return green_fn(Wave::incoming, d, k, r); }, py::arg("d"),
        py::arg("k"), py::arg("r"));
  m.def("green_I", &green_I, py::arg("d"), py::arg("k"), py::arg("r"));
  m.def("pair_distance_pdf", py::overload_cast<double, int, double>(&pair_distance_pdf), py::arg("s"), py::arg("d"),
        py::arg("radius"));

  // models
  py::class_<ScatteringModel>(m, "ScatteringModel")
      .def_static("resonant", &ScatteringModel::resonant, py::arg("pole"))
      .def_static("hard_sphere", &ScatteringModel::hard_sphere, py::arg("alpha"))
      .def_property_readonly("is_resonant", &ScatteringModel::is_resonant)
      .def_property_readonly("is_hard_sphere", &ScatteringModel::is_hard_sphere)
      .def("__repr__", &ScatteringModel::describe);
  m.def("f_inverse", &f_inverse, py::arg("model"), py::arg("d"), py::arg("k"));
  m.def("cross_section", [](const ScatteringModel& model, int d, double k) {
    const CrossSection cs = cross_section(model, d, k);
    return py::make_tuple(cs.sigma_pt, cs.sigma_max);
  }, py::arg("model"), py::arg("d"), py::arg("k"), "(sigma_pt, sigma_max)");
  m.def("mean_free_path", &mean_free_path, py::arg("model"), py::arg("geom"), py::arg("k"));
  m.def("amplitude_zeros", &amplitude_zeros, py::arg("model"), py::arg("d"), py::arg("k_min"), py::arg("k_max"));

  // ensemble
  m.def("derive_seed", &derive_seed, py::arg("master_seed"), py::arg("index"));
  py::class_<ScattererConfig>(m, "ScattererConfig")
      .def(py::init<int, Eigen::MatrixXd, std::uint64_t>(), py::arg("d"), py::arg("positions"), py::arg("seed") = 0)
      .def_property_readonly("positions", &ScattererConfig::positions)
      .def_property_readonly("distances", &ScattererConfig::distances)
      .def_property_readonly("seed", &ScattererConfig::seed);
  m.def("sample_config", &sample_config, py::arg("geom"), py::arg("seed"));
  py::enum_<MatrixKind>(m, "MatrixKind").value("M", MatrixKind::M).value("N", MatrixKind::N);
  m.def("build_matrix", [](MatrixKind kind, const ScattererConfig& c, const ScatteringModel& model, cplx k) {
    return build_matrix(kind, c, model, k).values;
  }, py::arg("kind"), py::arg("config"), py::arg("model"), py::arg("k"));
  m.def("log_abs_det", [](const Eigen::MatrixXcd& a) { return log_abs_det(a).value; }, py::arg("a"));
  m.def("eigenvalues", [](const Eigen::MatrixXcd& a) { return eigen_spectrum(a).values; }, py::arg("a"));
  m.def("refine_root", [](const ScattererConfig& c, const ScatteringModel& model, cplx k0) {
    const RootResult r = refine_root(c, model, k0);
    return py::make_tuple(r.k, r.residual, r.iterations);
  }, py::arg("config"), py::arg("model"), py::arg("k0"), "(k, residual, iterations)");

  // bounds
  py::enum_<AvgMode>(m, "AvgMode")
      .value("closed_real", AvgMode::closed_real)
      .value("quadrature", AvgMode::quadrature)
      .value("quadrature_exact", AvgMode::quadrature_exact)
      .value("asymptotic_complex", AvgMode::asymptotic_complex);
  m.def("avg_green_sq", &avg_green_sq, py::arg("d"), py::arg("k"), py::arg("radius"), py::arg("mode"));
  m.def("log_avg_green_sq", &log_avg_green_sq, py::arg("d"), py::arg("k"), py::arg("radius"), py::arg("mode"));
  m.def("potential_upper_bound",
        py::overload_cast<const ScatteringModel&, const GasGeometry&, cplx>(&potential_upper_bound), py::arg("model"),
        py::arg("geom"), py::arg("k"));
  m.def("width_density_approx", &width_density_approx, py::arg("d"), py::arg("im_k"));
  m.def("diffusion_rate", &diffusion_rate, py::arg("d"), py::arg("ell"), py::arg("radius"));
  m.def("validity_bound", &validity_bound, py::arg("radius"),
        py::arg("machine_eps") = std::numeric_limits<double>::epsilon());

  // twoscat
  py::enum_<ApproxVariant>(m, "ApproxVariant")
      .value("general", ApproxVariant::general)
      .value("hard_sphere", ApproxVariant::hard_sphere);
  m.def("approx_resonance", &approx_resonance, py::arg("d"), py::arg("model"), py::arg("s"), py::arg("n"),
        py::arg("variant"));
  m.def("exact_resonances", [](int d, const ScatteringModel& model, double s, int n_min, int n_max) {
    py::list out;
    for (const auto& b : exact_resonances(d, model, s, n_min, n_max)) {
      py::dict e;
      e["n"] = b.n;
      e["k"] = b.k;
      e["parity"] = to_string(b.parity);
      e["residual"] = b.residual;
      e["converged"] = b.converged;
      out.append(e);
    }
    return out;
  }, py::arg("d"), py::arg("model"), py::arg("s"), py::arg("n_min"), py::arg("n_max"));
  m.def("escape_rate", &escape_rate, py::arg("k"), py::arg("velocity"));
  m.def("band_escape_rate", &band_escape_rate, py::arg("d"), py::arg("alpha"), py::arg("s"), py::arg("velocity"),
        py::arg("n"));

  // fields
  py::class_<ComplexGrid>(m, "ComplexGrid")
      .def(py::init<double, double, int, double, double, int>(), py::arg("re_min"), py::arg("re_max"), py::arg("nx"),
           py::arg("im_min"), py::arg("im_max"), py::arg("ny"))
      .def_property_readonly("nx", &ComplexGrid::nx)
      .def_property_readonly("ny", &ComplexGrid::ny)
      .def_property_readonly("h_re", &ComplexGrid::h_re)
      .def_property_readonly("h_im", &ComplexGrid::h_im)
      .def("re", &ComplexGrid::re)
      .def("im", &ComplexGrid::im);
  py::class_<ScalarField>(m, "ScalarField")
      .def_readonly("grid", &ScalarField::grid)
      .def_readonly("n_configs", &ScalarField::n_configs)
      .def_property_readonly("kind", [](const ScalarField& f) { return to_string(f.kind); })
      .def_property_readonly("values", [](const ScalarField& f) { return as_array(f.values, f.grid); })
      .def_property_readonly("mask", [](const ScalarField& f) { return as_array(f.mask, f.grid); })
      .def_property_readonly("std_error", [](const ScalarField& f) {
        return f.std_error.empty() ? py::object(py::none()) : py::object(as_array(f.std_error, f.grid));
      })
      .def_readonly("meta", &ScalarField::meta);
  m.def("potential_map", &potential_map, py::arg("geom"), py::arg("model"), py::arg("grid"), py::arg("n_configs"),
        py::arg("master_seed"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("density_from_potential", &density_from_potential, py::arg("potential"));
  m.def("write_field_csv", py::overload_cast<const std::string&, const ScalarField&>(&write_field_csv),
        py::arg("path"), py::arg("field"));
  m.def("read_field_csv", py::overload_cast<const std::string&>(&read_field_csv), py::arg("path"));

  // rmtstats
  m.def("collect_cloud", [](const GasGeometry& geom, double k, int n_configs, std::uint64_t seed, int threads) {
    EigenCloud c;
    {
      py::gil_scoped_release release;
      c = collect_cloud(geom, k, n_configs, seed, threads);
    }
    return py::make_tuple(Eigen::VectorXcd(Eigen::Map<const Eigen::VectorXcd>(c.samples.data(), c.samples.size())),
                          c.config_index);
  }, py::arg("geom"), py::arg("k"), py::arg("n_configs"), py::arg("master_seed"), py::arg("threads") = 0,
        "(samples, config_index)");
  m.def("cloud_radius_estimate", &cloud_radius_estimate, py::arg("geom"), py::arg("k"));
  m.def("mp_pdf", [](double x, double lm, double lp) { return mp_pdf(x, {lm, lp}); }, py::arg("x"),
        py::arg("lambda_minus"), py::arg("lambda_plus"));
  m.def("mp_fit", [](const std::vector<double>& samples) {
    const MPFit f = mp_fit(samples);
    return py::make_tuple(f.params.lambda_minus, f.params.lambda_plus);
  }, py::arg("samples"), "(lambda_minus, lambda_plus)");
  m.def("marginal_slope", [](const std::vector<double>& samples, double lo, double hi) {
    return marginal_slope(samples, lo, hi).slope;
  }, py::arg("samples"), py::arg("lo"), py::arg("hi"));
}
