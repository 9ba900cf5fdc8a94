#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "rsmoments/coeffs.hpp"
#include "rsmoments/constants.hpp"
#include "rsmoments/errterm.hpp"
#include "rsmoments/fourier.hpp"
#include "rsmoments/moments.hpp"
#include "rsmoments/radicals.hpp"

namespace py = pybind11;
using namespace rsmoments;

namespace {

// exact integers cross the boundary as Python ints, via decimal strings
py::object to_pyint(const mpz_class& v) {
    PyObject* obj = PyLong_FromString(v.get_str().c_str(), nullptr, 10);
    if (!obj) throw py::error_already_set();
    return py::reinterpret_steal<py::object>(obj);
}

std::vector<double> default_samples(const CoeffTable& ct) {
    std::vector<double> xs;
    const double n = static_cast<double>(ct.size());
    for (int i = 0; i < 4096; ++i)
        xs.push_back((n / 8 + 0.37) * std::pow((n - 0.63) / (n / 8 + 0.37), i / 4095.0));
    return xs;
}

py::dict report_dict(const MomentReport& r) {
    py::dict d;
    d["k"] = r.k;
    d["T1"] = r.T1;
    d["T2"] = r.T2;
    if (r.has_y) d["y"] = r.y;
    d["regime_warning"] = r.regime_warning;
    d["integral"] = r.integral;
    d["abs_integral"] = r.abs_integral;
    d["prediction"] = r.prediction;
    d["ratio"] = r.ratio;
    d["nodes"] = r.nodes;
    d["intervals"] = r.intervals;
    d["seconds"] = r.seconds;
    return d;
}

} // namespace

PYBIND11_MODULE(_rsmoments, m) {
    m.doc() = "moment laboratory for the cusp-form Rankin-Selberg error term";

    m.def("tau", [](std::uint64_t n) {
        rsmoments::FourierTable t = rsmoments::compute_fourier(n);
        return to_pyint(t.at(n));
    }, py::arg("n"), "n-th coefficient of the weight-12 cusp form, exact");

    py::class_<CoeffTable>(m, "Table", "convolution coefficients c_1..c_N with prefix sums")
        .def(py::init([](std::uint64_t n) {
                 return compute_coeffs(compute_fourier(n));
             }),
             py::arg("n"))
        .def("__len__", &CoeffTable::size)
        .def("c", &CoeffTable::c, py::arg("n"))
        .def("lam", &CoeffTable::lambda, py::arg("n"),
             "normalized coefficient a(n) n^{-(kappa-1)/2}");

    m.def("coeff", [](std::uint64_t n) {
        return compute_coeffs(compute_fourier(n)).c(n);
    }, py::arg("n"), "c_n alone; builds a throwaway table, fine for small n");

    m.def("kernel_decompose", [](std::uint64_t n) {
        Radical r = kernel_decompose(n);
        return py::make_tuple(r.q, r.m);
    }, py::arg("n"), "n = q^4 m with m fourth-power-free, returned as (q, m)");

    m.def("alpha_is_zero", &alpha_is_zero, py::arg("ns"), py::arg("signs"),
          "exact vanishing test for n_1^{1/4} + sum (-1)^{i_j} n_{j+1}^{1/4}");

    m.def("count_rs",
          [](std::uint64_t M, double delta, double c, std::uint64_t budget) {
              return count_rs(M, delta, c, budget);
          },
          py::arg("m"), py::arg("delta"), py::arg("c"), py::arg("budget") = kDefaultBudget,
          "quadruples in (M,2M] with |m1^c + m2^c - m3^c - m4^c| <= delta M^c");

    m.def("s_kl", [](int k, int l, std::uint64_t n) {
        return s_kl(k, l, n, compute_coeffs(compute_fourier(n))).value;
    }, py::arg("k"), py::arg("l"), py::arg("n"), "truncated resonance series s_{k;l}(N)");

    py::class_<CalibrationConstants>(m, "Calibration")
        .def_readonly("A", &CalibrationConstants::A)
        .def_readonly("Z0", &CalibrationConstants::Z0)
        .def_readonly("rho", &CalibrationConstants::rho)
        .def_readonly("residual", &CalibrationConstants::residual);

    m.def("calibrate", [](const CoeffTable& ct, int rho) {
        return calibrate(ct, rho, default_samples(ct));
    }, py::arg("table"), py::arg("rho") = 2,
          "least-squares fit of the two main-term constants");
    m.def("user_calibration", &user_calibration, py::arg("a"), py::arg("z0"));

    m.def("delta1", &delta1, py::arg("table"), py::arg("cal"), py::arg("x"),
          "error term of the once-integrated coefficient sum");

    m.def("moment",
          [](const CoeffTable& ct, const CalibrationConstants& cal, int k, double t1,
             double t2, double y) {
              MomentReport r = y >= 1.0 ? moment_R2(ct, cal, k, t1, y)
                                        : integrate_delta1_power(ct, cal, k, t1, t2);
              return report_dict(r);
          },
          py::arg("table"), py::arg("cal"), py::arg("k"), py::arg("t1"), py::arg("t2"),
          py::arg("y") = 0.0,
          "integral of delta_1^k over [t1,t2]; y >= 1 switches to the remainder "
          "moment on the dyadic window [t1, 2 t1]");
}
