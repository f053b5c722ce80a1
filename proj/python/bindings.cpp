// Thin binding layer: numbers go through as Python scalars, documents as JSON text.
// The Python package wraps the text in dicts.
#include <cstdint>
#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hms/commands.hpp"
#include "hms/error.hpp"
#include "hms/io.hpp"
#include "hms/mirror.hpp"

namespace py = pybind11;
using namespace hms;

namespace {

TorusModulus modulus(std::complex<double> t) { return TorusModulus::make(t.real(), t.imag()); }

Rational rational(std::pair<std::int64_t, std::int64_t> r) { return Rational(r.first, r.second); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mirror symmetry for elliptic curves (compiled core)";

  static py::exception<Error> error_type(m, "HMSError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code, message) so Python callers can branch on the code
      py::object inst = py::reinterpret_borrow<py::object>(error_type.ptr())(e.code(), e.what());
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  m.def(
      "theta",
      [](std::complex<double> tau, std::complex<double> z, std::pair<std::int64_t, std::int64_t> characteristic,
         std::pair<std::int64_t, std::int64_t> delta, double beta, int level, int freq, int deriv, double tol) {
        const ThetaParams p =
            ThetaParams::make(rational(characteristic), Translation{rational(delta), beta}, level, freq);
        const SeriesValue v = theta_series(p, modulus(tau), z, deriv, tol);
        return py::make_tuple(v.value, v.truncation);
      },
      py::arg("tau"), py::arg("z"), py::arg("characteristic"), py::arg("delta"), py::arg("beta"), py::arg("level"),
      py::arg("freq"), py::arg("deriv"), py::arg("tol"));

  m.def("suite_names", &suite_names);

  m.def(
      "verify",
      [](const std::string& suite, std::complex<double> tau, std::uint64_t seed, std::optional<double> tol) {
        VerifyOptions opts;
        opts.tau = modulus(tau);
        opts.seed = seed;
        opts.tol = tol;
        std::vector<VerificationReport> rs;
        {
          py::gil_scoped_release nogil;
          rs = run_suite(suite, opts);
        }
        return io::dump(io::to_json(rs));
      },
      py::arg("suite"), py::arg("tau"), py::arg("seed"), py::arg("tol"));

  m.def(
      "compose",
      [](const std::string& side, const std::string& first, const std::string& second, std::complex<double> tau,
         double tol) { return io::dump(io::compose_docs(side, io::parse(first), io::parse(second), modulus(tau), tol)); },
      py::arg("side"), py::arg("first"), py::arg("second"), py::arg("tau"), py::arg("tol"));

  m.def(
      "mirror",
      [](const std::string& doc, std::complex<double> tau) { return io::dump(io::mirror_doc(io::parse(doc), modulus(tau))); },
      py::arg("doc"), py::arg("tau"));

  m.def(
      "hom",
      [](const std::string& source, const std::string& target, int degree) {
        return io::dump(io::hom_doc(io::parse(source), io::parse(target), degree));
      },
      py::arg("source"), py::arg("target"), py::arg("degree"));

  m.attr("DEFAULT_TOL") = kDefaultTol;
}
