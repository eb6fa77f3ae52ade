#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here deliberately avoids the library's optimized code paths so that tests
// compare two routes: oracles use brute-force sums, explicit closed forms, or
// textbook formulas only.

#include <cmath>
#include <complex>
#include <map>

#include "focklab/fock.hpp"
#include "focklab/gaussian.hpp"

namespace focklab::testing {

/// | (|0> + |3>)/sqrt2 >< ... |, the running example state.
inline DensityMatrix example_state(int nmax = 3) {
    return build_pure_state(std::map<int, cd>{{0, 1.0}, {3, 1.0}},
                            FockCutoff({nmax}));
}

/// Closed-form chi of the example state:
/// e^{-|z|^2/2} (1 - 3/2 |z|^2 + (z^3 - conj(z)^3)/(2 sqrt6)
///               + 3/4 |z|^4 - |z|^6 / 12).
inline cd example_chi(cd z) {
    double r2 = std::norm(z);
    cd z3 = z * z * z;
    cd poly = 1.0 - 1.5 * r2 + (z3 - std::conj(z3)) / (2.0 * std::sqrt(6.0)) +
              0.75 * r2 * r2 - r2 * r2 * r2 / 12.0;
    return std::exp(-0.5 * r2) * poly;
}

/// Geometric thermal weights, independently of thermal_state().
inline double thermal_weight(double nu, int n) {
    double q = (nu - 1.0) / (nu + 1.0);
    return (1.0 - q) * std::pow(q, n);
}

/// Brute-force relative entropy through explicit spectral sums (diagonal or
/// full eigendecompositions done locally).
inline double relent_oracle(const Mat& rho, const Mat& sigma) {
    Eigen::SelfAdjointEigenSolver<Mat> er(rho), es(sigma);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < rho.rows(); ++k) {
        double p = er.eigenvalues()(k);
        if (p <= 1e-14) continue;
        acc += p * std::log(p);
        for (Eigen::Index l = 0; l < rho.rows(); ++l) {
            double q = es.eigenvalues()(l);
            double ov = std::norm(
                cd(er.eigenvectors().col(k).adjoint() * es.eigenvectors().col(l)));
            if (q > 1e-14) acc -= p * ov * std::log(q);
        }
    }
    return acc;
}

/// SLD Fisher information by direct brute-force double sum over an
/// eigendecomposition done right here.
inline double sld_fisher_oracle(const Mat& rho, const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    Mat at = es.eigenvectors().adjoint() * a * es.eigenvectors();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < rho.rows(); ++k)
        for (Eigen::Index l = 0; l < rho.rows(); ++l) {
            double x = std::max(0.0, es.eigenvalues()(k));
            double y = std::max(0.0, es.eigenvalues()(l));
            if (x + y <= 1e-12) continue;
            acc += 2.0 * (x - y) * (x - y) / (x + y) * std::norm(at(k, l));
        }
    return acc;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool close(cd a, cd b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace focklab::testing
