#pragma once

#include "focklab/charfn.hpp"
#include "focklab/fock.hpp"

namespace focklab {

/// Eigendecomposition of a Hermitian (hermitized) matrix with the tiny
/// negative eigenvalues clamped to zero. Eigenvalues descending.
struct SpectralDecomp {
    Eigen::VectorXd eigenvalues;
    Mat eigenvectors;
    int clamped_count = 0;
    double reconstruction_error = 0.0;
};
SpectralDecomp spectral(const Mat& hermitian, double clamp_tol = 1e-12);

/// ||rho - sigma||_1. States on different cutoffs are zero-padded to the
/// common cutoff first.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// ||rho - sigma||_2 = sqrt(tr((rho-sigma)^2)).
double hs_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Trace norm of an arbitrary matrix (sum of singular values).
double trace_norm(const Mat& T);

struct RelEntropyResult {
    double value = 0.0;               // +infinity when the support check fails
    double rho_mass_outside = 0.0;    // rho weight outside sigma's eps-support
    bool infinite = false;
};

/// D(rho || sigma) = tr(rho (log rho - log sigma)), natural log.
/// rho weight above 1e-8 outside the 1e-10-support of sigma yields the
/// +infinity sentinel; below that it is treated as truncation noise.
RelEntropyResult relative_entropy_detailed(const DensityMatrix& rho,
                                           const DensityMatrix& sigma);
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

struct TraceNormBound {
    double lhs;  // ||T||_1^2 by spectral sum
    double rhs;  // (pi^2/6)^m * (1/pi^m) \int |chi_{A^dag T A}|^2, A = a_1...a_m
};

/// Both sides of the trace-norm bound through the characteristic function of
/// A^dag T A; the inequality lhs <= rhs is asserted by callers. A^dag T A is
/// formed on a one-level-padded space so its matrix is exact.
TraceNormBound trace_norm_charfn_bound(const Mat& T, const FockCutoff& cutoff,
                                       const PhaseGrid& grid);

}  // namespace focklab
