#pragma once

#include "focklab/fock.hpp"

namespace focklab {

/// ||dX||^2_{2,rho} = sum_j ||[a_j, X]||^2 + ||[a_j^dag, X]||^2 with the
/// commutators evaluated on a one-level-padded space (exact for operators
/// supported inside the cutoff).
double gradient_norm(const DensityMatrix& rho, const Mat& X);

struct GapEstimate {
    double lambda_hat = 0.0;
    std::vector<int> cutoff;
    double deflation_residual = 0.0;  // |tr(rho X)| / ||X||_{2,rho} of the minimizer
    Mat gap_operator;                 // Rayleigh minimizer, Fock basis
    bool smoothed = false;            // non-faithful input was mixed with its
                                      // Gaussification (eps = 1e-6)
    int gradient_null_dim = 0;        // boundary-supported directions whose
                                      // projected gradient vanishes (deflated)
};

/// Poincare constant estimate: smallest generalized eigenvalue of the
/// Dirichlet form against the SLD Gram form over rho-centered operators.
/// Basis: matrix units in the eigenbasis of rho; commutators are projected
/// to the interior block, where the truncated entries are exact. Operators
/// living entirely on the cutoff shell then have an identically zero
/// projected gradient; those directions are deflated and counted.
GapEstimate estimate_gap(const DensityMatrix& rho);
GapEstimate estimate_gap(const DensityMatrix& rho, const std::vector<int>& cutoff);

/// lambda-hat before and after the single-mode phase rotation e^{i theta n}.
std::pair<double, double> passive_invariance_check(const DensityMatrix& rho,
                                                   double theta);

}  // namespace focklab
