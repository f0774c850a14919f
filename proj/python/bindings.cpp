#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mwlab/cli.hpp"
#include "mwlab/extrapolation.hpp"
#include "mwlab/io.hpp"
#include "mwlab/john.hpp"

namespace py = pybind11;
using namespace mwlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

MatrixWeight weight_from_array(const DyadicDomain& dom, const Array& a) {
  if (a.ndim() != 3 || a.shape(1) != a.shape(2)) throw py::value_error("cells must have shape (cells, d, d)");
  if (a.shape(0) != dom.num_cells()) throw py::value_error("cell count does not match the domain");
  const auto d = static_cast<int>(a.shape(1));
  auto r = a.unchecked<3>();
  std::vector<SpdMatrix> cells;
  for (py::ssize_t c = 0; c < a.shape(0); ++c) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = r(c, i, j);
    cells.emplace_back(m);
  }
  return MatrixWeight(dom, std::move(cells));
}

py::array_t<double> weight_to_array(const MatrixWeight& w) {
  const auto d = static_cast<py::ssize_t>(w.dim());
  py::array_t<double> out({static_cast<py::ssize_t>(w.size()), d, d});
  auto r = out.mutable_unchecked<3>();
  for (std::size_t c = 0; c < w.size(); ++c)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) r(c, i, j) = w[c](i, j);
  return out;
}

VectorField vfield_from_array(const DyadicDomain& dom, const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != dom.num_cells()) throw py::value_error("field must have shape (cells, d)");
  auto r = a.unchecked<2>();
  const auto d = static_cast<int>(a.shape(1));
  std::vector<Vec> v(a.shape(0));
  for (py::ssize_t c = 0; c < a.shape(0); ++c) {
    v[c] = Vec(d);
    for (int i = 0; i < d; ++i) v[c](i) = r(c, i);
  }
  return VectorField(dom, d, std::move(v));
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict report_dict(const ApReport& r) {
  py::dict d;
  d["constant"] = r.constant;
  d["variant"] = r.variant;
  d["p"] = r.p;
  d["cube"] = py::make_tuple(r.cube.level, r.cube.index);
  d["slack"] = r.slack;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mwlab, m) {
  m.doc() = "matrix weights, convex-set valued maximal operators and extrapolation";

  static py::exception<Error> error(m, "MwlabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<DyadicDomain>(m, "Domain")
      .def(py::init([](int n, std::vector<double> origin, double size, int level) {
             if (origin.empty()) origin.assign(n, 0.0);
             if (static_cast<int>(origin.size()) != n) throw py::value_error("origin needs n entries");
             return DyadicDomain(n, Eigen::Map<Vec>(origin.data(), n), size, level);
           }),
           py::arg("n") = 1, py::arg("origin") = std::vector<double>{}, py::arg("size") = 1.0, py::arg("level") = 6)
      .def_property_readonly("n", &DyadicDomain::n)
      .def_property_readonly("level", &DyadicDomain::level)
      .def_property_readonly("size", &DyadicDomain::size)
      .def_property_readonly("origin", [](const DyadicDomain& d) { return std::vector<double>(d.origin().data(), d.origin().data() + d.n()); })
      .def_property_readonly("num_cells", &DyadicDomain::num_cells)
      .def("cell_midpoint", [](const DyadicDomain& d, std::int64_t c) { return Vec(d.cell_midpoint(c)); });

  py::class_<MatrixWeight>(m, "Weight")
      .def(py::init(&weight_from_array), py::arg("domain"), py::arg("cells"))
      .def_property_readonly("domain", &MatrixWeight::domain)
      .def_property_readonly("dim", &MatrixWeight::dim)
      .def_property_readonly("cells", &weight_to_array)
      .def("inverse", &MatrixWeight::inverse);

  m.def("gen_power_weight", [](const DyadicDomain& dom, int d, double alpha, std::vector<double> center) {
    if (center.empty()) center.assign(dom.origin().data(), dom.origin().data() + dom.n());
    return gen_power_weight(dom, d, alpha, Eigen::Map<Vec>(center.data(), static_cast<Eigen::Index>(center.size())));
  }, py::arg("domain"), py::arg("d"), py::arg("alpha"), py::arg("center") = std::vector<double>{});
  m.def("gen_rotating_weight", py::overload_cast<const DyadicDomain&, double, double, double>(&gen_rotating_weight),
        py::arg("domain"), py::arg("a"), py::arg("b"), py::arg("omega"));
  m.def("weight_suite", [](const DyadicDomain& dom, int count) {
    py::list out;
    for (auto& nw : weight_suite(dom, count)) out.append(py::make_tuple(nw.id, nw.w));
    return out;
  }, py::arg("domain"), py::arg("count"));
  m.def("load_weight", &load_weight, py::arg("path"));
  m.def("save_weight", &save_weight, py::arg("weight"), py::arg("path"));

  m.def("ap_constant", [](const MatrixWeight& w, double p, const std::string& variant) {
    py::gil_scoped_release nogil;
    auto r = ap_constant(w, p, variant);
    py::gil_scoped_acquire gil;
    return report_dict(r);
  }, py::arg("weight"), py::arg("p"), py::arg("variant") = "reducing");
  m.def("reducing_operator", [](const MatrixWeight& w, int level, std::int64_t index, double p) {
    return Mat(reducing_operator(w, {level, index}, p).mat());
  }, py::arg("weight"), py::arg("level"), py::arg("index"), py::arg("p"));
  m.def("scalar_oracle", [](const DyadicDomain& dom, std::vector<double> values, double p) {
    return scalar_oracle(ScalarField(dom, std::move(values)), p);
  }, py::arg("domain"), py::arg("values"), py::arg("p"));
  m.def("geo_mean", [](const Mat& a, const Mat& b, double t) { return Mat(geo_mean(SpdMatrix(a), SpdMatrix(b), t).mat()); },
        py::arg("a"), py::arg("b"), py::arg("t") = 0.5);
  m.def("john_ellipsoid", [](const Array& pts) {
    if (pts.ndim() != 2 || pts.shape(1) != 2) throw py::value_error("points must have shape (k, 2)");
    auto r = pts.unchecked<2>();
    std::vector<Vec2> v;
    for (py::ssize_t i = 0; i < pts.shape(0); ++i) v.emplace_back(r(i, 0), r(i, 1));
    return Mat(john_ellipsoid(ConvexBody::polygon(v)).m.mat());
  }, py::arg("points"), "John matrix of the symmetric hull of the points (d = 2)");

  m.def("factorize", [](const MatrixWeight& w, double p, int k_max, double safety, std::uint64_t seed) {
    FactorizationOptions o;
    o.k_max = k_max;
    o.safety = safety;
    o.seed = seed;
    FactorizationResult f;
    {
      py::gil_scoped_release nogil;
      f = factorize(w, p, o);
    }
    py::dict d;
    d["w0"] = f.w0;
    d["w1"] = f.w1;
    d["rbar"] = to_array(f.rbar.values);
    d["product_residual"] = f.product_residual;
    d["a1"] = report_dict(f.a1);
    d["ainfty"] = report_dict(f.ainfty);
    d["ap"] = report_dict(f.ap);
    d["bound"] = f.bound;
    return d;
  }, py::arg("weight"), py::arg("p"), py::arg("k_max") = 30, py::arg("safety") = 2.0, py::arg("seed") = 1);

  m.def("reverse_factorize", [](const MatrixWeight& w0, const MatrixWeight& w1, double q0, double q1, double t,
                                const std::string& variant) {
    const ReverseResult r = reverse_factorize(w0, w1, q0, q1, t, variant);
    py::dict d;
    d["w"] = r.w;
    d["q"] = r.q;
    d["wbar"] = report_dict(r.wbar);
    d["c_measured"] = r.c_measured;
    return d;
  }, py::arg("w0"), py::arg("w1"), py::arg("q0"), py::arg("q1"), py::arg("t"), py::arg("variant") = "reducing");

  m.def("rescale_weight", [](const MatrixWeight& w, double p, double p0, const Array& f, const Array& g,
                             const std::string& variant) {
    ExtrapolationConfig cfg;
    cfg.variant = variant;
    const ExtrapolationCase c{classify_case(p, p0), p, p0, vfield_from_array(w.domain(), f),
                              vfield_from_array(w.domain(), g), w};
    const ChainReport r = rescale_weight(c, cfg);
    py::list chain;
    for (const auto& s : r.chain) {
      py::dict e;
      e["name"] = s.name;
      e["lhs"] = s.lhs;
      e["rhs"] = s.rhs;
      e["slack"] = s.slack();
      e["exact"] = s.exact;
      chain.append(e);
    }
    py::dict d;
    d["case"] = case_name(r.id);
    d["w0"] = r.w0;
    d["chain"] = chain;
    d["ap_w"] = report_dict(r.ap_w);
    d["ap_w0"] = report_dict(r.ap_w0);
    d["exponent"] = r.exponent;
    d["tail"] = r.tail;
    return d;
  }, py::arg("weight"), py::arg("p"), py::arg("p0"), py::arg("f"), py::arg("g"), py::arg("variant") = "auto");
  m.def("extrapolation_exponent", &extrapolation_exponent, py::arg("p"), py::arg("p0"));

  m.def("run", [](const std::vector<std::string>& args) {
    py::gil_scoped_release nogil;
    return run(args);
  }, py::arg("args"), "run a command-line subcommand; returns the exit code");
}
