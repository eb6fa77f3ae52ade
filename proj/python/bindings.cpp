#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "focklab/charfn.hpp"
#include "focklab/convolve.hpp"
#include "focklab/fisher.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/lab.hpp"
#include "focklab/metrics.hpp"
#include "focklab/poincare.hpp"

namespace py = pybind11;
using namespace focklab;

namespace {

DensityMatrix make_state(const std::vector<int>& cutoff, const Mat& entries,
                         double tail_mass) {
    return DensityMatrix(FockCutoff(cutoff), entries, tail_mass);
}

DensityMatrix pure_state(const std::map<std::vector<int>, cd>& amplitudes,
                         const std::vector<int>& cutoff) {
    return build_pure_state(amplitudes, FockCutoff(cutoff));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "truncated Fock-space convolution laboratory";

    py::register_exception<CutoffViolationError>(m, "CutoffViolationError");
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError");
    py::register_exception<DimensionCeilingError>(m, "DimensionCeilingError");
    py::register_exception<TailBudgetError>(m, "TailBudgetError");
    py::register_exception<GridError>(m, "GridError");
    py::register_exception<UnsupportedFrameError>(m, "UnsupportedFrameError");

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def(py::init(&make_state), py::arg("cutoff"), py::arg("entries"),
             py::arg("tail_mass") = 0.0)
        .def_property_readonly("matrix",
                               [](const DensityMatrix& r) { return r.matrix(); })
        .def_property_readonly(
            "cutoff",
            [](const DensityMatrix& r) { return r.cutoff().per_mode(); })
        .def_property_readonly("tail_mass", &DensityMatrix::tail_mass)
        .def_property_readonly("modes", &DensityMatrix::modes)
        .def("__repr__", [](const DensityMatrix& r) {
            return "<DensityMatrix modes=" + std::to_string(r.modes()) +
                   " dim=" + std::to_string(r.dim()) + ">";
        });

    m.def("pure_state", &pure_state, py::arg("amplitudes"), py::arg("cutoff"),
          "normalized |v><v| from a {multi-index: amplitude} map");
    m.def("vacuum_state",
          [](const std::vector<int>& cutoff) {
              return vacuum_state(FockCutoff(cutoff));
          });
    m.def("thermal_state", &thermal_state, py::arg("nu"), py::arg("nmax"));
    m.def("tensor", [](const DensityMatrix& a, const DensityMatrix& b) {
        return tensor(a, b);
    });
    m.def("partial_trace", &partial_trace, py::arg("rho"), py::arg("keep"));
    m.def("annihilation_matrix", &annihilation_matrix, py::arg("nmax"));
    m.def("displacement_matrix", &displacement_matrix, py::arg("z"),
          py::arg("nmax"));
    m.def("pad_to", [](const DensityMatrix& rho, const std::vector<int>& cutoff) {
        return pad_to(rho, FockCutoff(cutoff));
    });

    m.def("char_fn", [](const DensityMatrix& rho, const std::vector<cd>& z) {
        return char_fn(rho, std::span<const cd>(z));
    });
    m.def("wigner",
          [](const DensityMatrix& rho, cd z, double radius, int points) {
              return wigner(rho, z, PhaseGrid(rho.modes(), radius, points));
          },
          py::arg("rho"), py::arg("z"), py::arg("radius") = 7.0,
          py::arg("points") = 64);
    m.def("plancherel_hs_norm",
          [](const DensityMatrix& rho, double radius, int points) {
              return plancherel_hs_norm(rho.matrix(), rho.cutoff(),
                                        PhaseGrid(rho.modes(), radius, points));
          },
          py::arg("rho"), py::arg("radius") = 9.0, py::arg("points") = 80);
    m.def("moment", &moment, py::arg("rho"), py::arg("kappa"));
    m.def("covariance", [](const DensityMatrix& rho) {
        CovarianceData c = covariance(rho);
        py::dict out;
        out["d"] = c.d;
        out["gamma"] = c.gamma;
        out["nu"] = c.nu;
        out["mu"] = c.mu;
        return out;
    });

    m.def("williamson", [](const Eigen::MatrixXd& gamma) {
        WilliamsonResult w = williamson(gamma);
        return py::make_tuple(w.S, w.nu);
    });
    m.def("gaussify_fock",
          [](const DensityMatrix& rho, std::optional<std::vector<int>> cutoff) {
              if (cutoff) return gaussify_fock(rho, FockCutoff(*cutoff));
              return gaussify_fock(rho);
          },
          py::arg("rho"), py::arg("cutoff") = std::nullopt);
    m.def("gaussian_char_fn",
          [](const DensityMatrix& rho, const std::vector<cd>& z) {
              return gaussian_char_fn(gaussify(rho), std::span<const cd>(z));
          });

    m.def("convolve",
          [](const DensityMatrix& rho, const DensityMatrix& sigma, double eta,
             std::optional<int> n_max) {
              ConvolutionReport rep =
                  n_max ? convolve(rho, sigma, eta, CutoffPolicy{*n_max, 1e-8})
                        : convolve(rho, sigma, eta);
              return py::make_tuple(rep.output, rep.discarded_mass);
          },
          py::arg("rho"), py::arg("sigma"), py::arg("eta"),
          py::arg("n_max") = std::nullopt);
    m.def("self_convolve",
          [](const DensityMatrix& rho, int n, int n_max, double tail_budget) {
              ConvolutionReport rep =
                  self_convolve(rho, n, CutoffPolicy{n_max, tail_budget});
              return py::make_tuple(rep.output, rep.discarded_mass);
          },
          py::arg("rho"), py::arg("n"), py::arg("n_max") = 64,
          py::arg("tail_budget") = 1e-8);

    m.def("trace_distance", &trace_distance);
    m.def("hs_distance", &hs_distance);
    m.def("relative_entropy", &relative_entropy);

    m.def("sld_fisher", [](const DensityMatrix& rho) {
        FisherResult I = sld_fisher(rho);
        return py::make_tuple(I.total, I.per_mode);
    });
    m.def("fisher_distance", [](const DensityMatrix& rho) {
        FisherDistanceResult J = fisher_distance(rho);
        return py::make_tuple(J.total, J.per_mode);
    });
    m.def("kmb_fisher", &kmb_fisher);
    m.def("lsi_dirichlet", [](const DensityMatrix& rho, std::vector<double> beta) {
        return lsi_dirichlet(rho, beta);
    });
    m.def("lsi_alpha", [](std::vector<double> beta, int modes) {
        return lsi_alpha(beta, modes);
    });

    m.def("estimate_gap",
          [](const DensityMatrix& rho, std::optional<std::vector<int>> cutoff) {
              GapEstimate g =
                  cutoff ? estimate_gap(rho, *cutoff) : estimate_gap(rho);
              py::dict out;
              out["lambda_hat"] = g.lambda_hat;
              out["smoothed"] = g.smoothed;
              out["deflation_residual"] = g.deflation_residual;
              return out;
          },
          py::arg("rho"), py::arg("cutoff") = std::nullopt);

    m.def("chi_rate_probe",
          [](const DensityMatrix& rho, const std::vector<int>& n_list, cd z) {
              return chi_rate_probe(rho, n_list, z);
          });
    m.def("run_invariant_suite",
          [](std::uint64_t seed, int cutoff) {
              InvariantReport r = run_invariant_suite(seed, cutoff);
              return py::make_tuple(r.all_pass, r.text);
          },
          py::arg("seed") = 1, py::arg("cutoff") = 6);
}
