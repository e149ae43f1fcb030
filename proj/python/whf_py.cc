#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "whf/errors.h"
#include "whf/indices.h"
#include "whf/json_io.h"
#include "whf/testgen.h"

namespace py = pybind11;
using namespace whf;

namespace {

// numpy sees complex128; the library works in extended precision.
using PyMatrix = Eigen::MatrixXcd;
using Opt = std::optional<PyMatrix>;

Matrix in(const PyMatrix& m) { return m.cast<Complex>(); }
PyMatrix out(const Matrix& m) { return m.cast<std::complex<double>>(); }

TwoSidedRealization make_realization(const PyMatrix& r0, const Opt& a,
                                     const Opt& b, const Opt& c,
                                     const Opt& alpha, const Opt& beta,
                                     const Opt& gamma) {
  const Eigen::Index m = r0.rows();
  const Eigen::Index np = a ? a->rows() : 0;
  const Eigen::Index nm = alpha ? alpha->rows() : 0;
  TwoSidedRealization r;
  r.R0 = in(r0);
  r.A = a ? in(*a) : Matrix(0, 0);
  r.B = b ? in(*b) : Matrix::Zero(np, m);
  r.C = c ? in(*c) : Matrix::Zero(m, np);
  r.alpha = alpha ? in(*alpha) : Matrix(0, 0);
  r.beta = beta ? in(*beta) : Matrix::Zero(nm, m);
  r.gamma = gamma ? in(*gamma) : Matrix::Zero(m, nm);
  check_shapes(r);
  return r;
}

py::dict checks_dict(const VerificationReport& rep) {
  py::dict d;
  for (const Check& c : rep.checks) {
    py::dict e;
    e["value"] = c.applicable ? py::object(py::float_(c.value)) : py::none();
    e["threshold"] = c.threshold;
    e["status"] = !c.applicable ? "n/a" : (c.passed ? "pass" : "fail");
    e["stage"] = c.stage;
    d[py::str(c.name)] = e;
  }
  return d;
}

py::dict result_dict(const PipelineResult& res) {
  py::dict d;
  d["negatives"] = res.indices.negatives;
  d["zeros"] = res.indices.zeros;
  d["positives"] = res.indices.positives;
  d["indices"] = res.indices.sorted();
  d["winding"] = res.report.winding;
  d["flags"] = res.report.flags;
  d["passed"] = res.report.all_passed();
  d["checks"] = checks_dict(res.report);
  return d;
}

PipelineOptions options(double tol, int samples, bool full) {
  PipelineOptions opt;
  opt.tol = tol;
  opt.samples = samples;
  opt.full_verification = full;
  return opt;
}

}  // namespace

PYBIND11_MODULE(_whf, m) {
  m.doc() = "Right Wiener-Hopf indices of rational matrix functions";

  static py::exception<Error> error(m, "WhfError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst =
          py::reinterpret_borrow<py::object>(error)(py::str(e.what()));
      inst.attr("code") = std::string(to_string(e.code()));
      inst.attr("stage") = e.stage();
      inst.attr("validation") = is_validation_error(e.code());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<TwoSidedRealization>(m, "Realization")
      .def(py::init(&make_realization), py::arg("R0"), py::arg("A") = py::none(),
           py::arg("B") = py::none(), py::arg("C") = py::none(),
           py::arg("alpha") = py::none(), py::arg("beta") = py::none(),
           py::arg("gamma") = py::none())
      .def_property_readonly("m", &TwoSidedRealization::m)
      .def_property_readonly("n_plus", &TwoSidedRealization::n_plus)
      .def_property_readonly("n_minus", &TwoSidedRealization::n_minus)
      .def_property_readonly("R0", [](const TwoSidedRealization& r) { return out(r.R0); })
      .def_property_readonly("A", [](const TwoSidedRealization& r) { return out(r.A); })
      .def_property_readonly("B", [](const TwoSidedRealization& r) { return out(r.B); })
      .def_property_readonly("C", [](const TwoSidedRealization& r) { return out(r.C); })
      .def_property_readonly("alpha", [](const TwoSidedRealization& r) { return out(r.alpha); })
      .def_property_readonly("beta", [](const TwoSidedRealization& r) { return out(r.beta); })
      .def_property_readonly("gamma", [](const TwoSidedRealization& r) { return out(r.gamma); })
      .def("__call__",
           [](const TwoSidedRealization& r, std::complex<double> z) {
             return out(evaluate(r, Complex(z.real(), z.imag())));
           },
           py::arg("z"))
      .def("to_json",
           [](const TwoSidedRealization& r) {
             return realization_to_json(r).dump();
           })
      .def_static("from_json",
                  [](const std::string& text) {
                    return realization_from_json(parse_json(text, "<string>"));
                  })
      .def("__mul__", &multiply)
      .def("__repr__", [](const TwoSidedRealization& r) {
        return "<Realization m=" + std::to_string(r.m()) +
               " n_plus=" + std::to_string(r.n_plus()) +
               " n_minus=" + std::to_string(r.n_minus()) + ">";
      });

  m.def("load", [](const std::string& path) { return load_realization(path); },
        py::arg("path"));
  m.def("save",
        [](const std::string& path, const TwoSidedRealization& r) {
          save_realization(path, r);
        },
        py::arg("path"), py::arg("realization"));

  m.def("indices",
        [](const TwoSidedRealization& r, double tol, int samples) {
          PipelineResult res;
          {
            py::gil_scoped_release release;
            res = run_pipeline(r, options(tol, samples, false));
          }
          return result_dict(res);
        },
        py::arg("realization"), py::arg("tol") = kDefaultTolerance,
        py::arg("samples") = 1024,
        "Indices, winding number and the sampled factor checks.");

  m.def("verify",
        [](const TwoSidedRealization& r, double tol, int samples) {
          PipelineResult res;
          {
            py::gil_scoped_release release;
            res = run_pipeline(r, options(tol, samples, true));
          }
          return result_dict(res);
        },
        py::arg("realization"), py::arg("tol") = kDefaultTolerance,
        py::arg("samples") = 1024, "Indices together with every identity check.");

  m.def("factor",
        [](const TwoSidedRealization& r, double tol) {
          PipelineResult res;
          {
            py::gil_scoped_release release;
            res = run_pipeline(r, options(tol, 1024, true));
          }
          auto bi_inner = [](const BiInnerRealization& g) {
            py::dict d;
            d["A"] = out(g.A);
            d["B"] = out(g.B);
            d["C"] = out(g.C);
            d["D"] = out(g.D);
            return d;
          };
          py::dict d = result_dict(res);
          d["psi"] = res.outer.psi();
          d["xi"] = res.xi_reduced.realization();
          d["V"] = bi_inner(res.dss.V);
          d["W"] = bi_inner(res.dss.W);
          d["X"] = out(res.dss.X);
          return d;
        },
        py::arg("realization"), py::arg("tol") = kDefaultTolerance,
        "Outer factor, unitary factor, V, W and the coupling matrix X.");

  m.def("winding_number",
        [](const TwoSidedRealization& r, int samples) {
          return winding_number(r, samples);
        },
        py::arg("realization"), py::arg("samples") = 1024);

  m.def("generate",
        [](int size, const std::vector<int>& indices, int state_plus,
           int state_minus, std::uint64_t seed) {
          ProblemSpec spec;
          spec.m = size;
          spec.indices = indices;
          spec.state_plus = state_plus;
          spec.state_minus = state_minus;
          spec.seed = seed;
          GeneratedProblem g = generate_problem(spec);
          return py::make_tuple(g.realization, g.truth.sorted());
        },
        py::arg("m"), py::arg("indices"), py::arg("state_plus") = 0,
        py::arg("state_minus") = 0, py::arg("seed") = 0,
        "Random problem W-(z) D(z) W+(z) and its sorted indices.");
}
