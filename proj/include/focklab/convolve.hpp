#pragma once

#include "focklab/fock.hpp"

namespace focklab {

/// Per-step output cap for iterated convolutions. The joint two-subsystem
/// computation itself is exact (the beam splitter conserves the per-pair
/// photon number); only the reduced output is clipped to n_max, with the
/// clipped weight measured before discard.
struct CutoffPolicy {
    int n_max = 64;
    double tail_budget = 1e-8;
};

/// exp(theta (a^dag b - a b^dagger)) restricted to the total-photon block
/// span{|k, n_total - k>}; exact because the generator conserves the total.
Mat beam_splitter_block(double theta, int n_total);

/// Cached per-(eta, N) unitary blocks of U_eta for one mode pair.
struct BeamSplitterBlocks {
    double eta;
    int n_total;
    std::vector<Mat> blocks;  // blocks[N] has dimension N+1
};
const BeamSplitterBlocks& beam_splitter(double eta, int n_total);

struct ConvolveStep {
    double eta;
    std::vector<int> joint_cutoff;  // output cutoff used this step
    double discarded;
};

struct ConvolutionReport {
    DensityMatrix output;
    double discarded_mass = 0.0;
    std::vector<ConvolveStep> steps;
};

/// Linear extension of T -> tr_2(U_eta (T (x) sigma) U_eta^dag) to arbitrary
/// operators T on the first subsystem; exact, output cutoff N_T + N_sigma
/// per mode, no renormalization.
Mat convolve_operator(const Mat& T, const FockCutoff& cutoff_T,
                      const DensityMatrix& sigma, double eta);

/// rho boxplus_eta sigma, exact (joint per-mode cutoff N_rho + N_sigma).
ConvolutionReport convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                           double eta);
/// Same with the output clipped per the policy.
ConvolutionReport convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                           double eta, const CutoffPolicy& policy);

/// Symmetric n-fold convolution via sigma_k = sigma_{k-1} boxplus_{1-1/k} rho.
/// Aborts with TailBudgetError (carrying the step index) if the accumulated
/// discarded weight crosses the budget.
ConvolutionReport self_convolve(const DensityMatrix& rho, int n,
                                const CutoffPolicy& policy = {});

/// || sqrt(eta) [a_j, rho boxplus_eta sigma] - [a_{j,1}, rho] boxplus_eta sigma ||_1
/// maximized over modes j, with commutators evaluated on a one-level-padded
/// space so they are exact for the truncated inputs.
double commutator_compat_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                               double eta);

}  // namespace focklab
