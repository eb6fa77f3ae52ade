#pragma once

#include <functional>

#include "focklab/fock.hpp"

namespace focklab {

/// Bivariate spectral kernel g(x, y) evaluated on pairs of eigenvalues of a
/// state. Singularities on the clamped spectrum are handled by explicit
/// special cases baked into each kernel (the degenerate-kernel convention):
/// phi masks to 0 when x + y <= 1e-12, zeta(0,0) = 0, logmean(x,x) = x.
struct KernelFn {
    std::function<double(double, double)> eval;
    const char* label = "custom";
};

namespace kernels {
KernelFn psi();                 // (x + y) / 2
KernelFn phi();                 // 2 / (x + y), masked on the kernel
KernelFn zeta();                // 2 (x - y)^2 / (x + y), continuous at (0,0)
KernelFn logmean_reciprocal();  // (log x - log y)/(x - y); 1/x at x = y
KernelFn lsi_g(double beta);    // (e^{b/4} sqrt(y) - e^{-b/4} sqrt(x))^2
KernelFn constant(double c);
}  // namespace kernels

inline constexpr double kKernelMaskTol = 1e-12;

/// Pi_rho^g(X): entrywise multiply by g(p_k, p_l) in the eigenbasis of rho.
Mat pi_apply(const DensityMatrix& rho, const KernelFn& g, const Mat& X);

/// SLD inner product <X, Y>_rho = tr(rho X^dag Y)/2 + tr(X^dag rho Y)/2.
cd sld_inner(const DensityMatrix& rho, const Mat& X, const Mat& Y);
double sld_norm_sq(const DensityMatrix& rho, const Mat& X);

/// SLD score in the eigenbasis convention: S_kl = 2 [a_j, rho]_kl / (p_k + p_l)
/// where the denominator clears the mask, else 0. The matrix lives on the
/// one-level-padded cutoff: Fisher quantities are evaluated on that padded
/// embedding, where the ladder operators are exact on the support of rho.
struct ScoreOperator {
    Mat matrix;  // on the padded cutoff (N_j + 1 per mode)
    int mode = 0;
    int masked_pairs = 0;  // kernel index pairs still coupled by the ladder
};
ScoreOperator sld_score(const DensityMatrix& rho, int mode);

struct FisherResult {
    double total = 0.0;
    Eigen::VectorXd per_mode;
};

/// SLD Fisher information I_j = tr(a_j^dag Pi_rho^zeta(a_j)); requires the
/// Williamson frame (per-mode diagonal covariance), else UnsupportedFrameError.
FisherResult sld_fisher(const DensityMatrix& rho);

struct FisherDistanceResult {
    double total = 0.0;
    Eigen::VectorXd per_mode;     // I_j - 1/mu_j
    bool norm_form_checked = false;
    double max_form_gap = 0.0;    // |zeta-form - norm-form| when checked
};

/// J_j = I_j - 1/mu_j. For faithful states the ||S + a/mu||^2 route is
/// evaluated as well and the agreement recorded.
FisherDistanceResult fisher_distance(const DensityMatrix& rho);

/// Kubo-Mori-Bogoliubov Fisher information; +infinity for non-faithful rho.
double kmb_fisher(const DensityMatrix& rho);

/// Entropic Dirichlet form sum_j tr|e^{b_j/4} a_j sqrt(rho) - e^{-b_j/4}
/// sqrt(rho) a_j|^2; rejects infinite beta (nu = 1 modes).
double lsi_dirichlet(const DensityMatrix& rho, std::span<const double> beta);

/// Closed-form log-Sobolev constant
/// 1/alpha = (2 + log(2m+1))/sinh(b_min/2) + b_min/(4 sinh^2(b_min/4)).
double lsi_alpha(std::span<const double> beta, int modes);

/// max over a [0, x_max]^2 grid of C g - h for the scalar comparison behind
/// the Dirichlet-form vs J bound, C = 8 e^{-3b/2}/(1+e^{-b})^2.
double scalar_gh_check(double beta, double x_max, int points_per_axis);

struct CauchySchwarzCheck {
    double lhs;  // || tr_1(Pi^psi_{rho1}(A) B) ||_{2, rho2}
    double rhs;  // ||A||_{2, rho1} ||B||_{2, rho1 (x) rho2}
};

/// Both sides of the bipartite Cauchy-Schwarz bound; A acts on subsystem 1,
/// B on the joint space of rho1 (x) rho2.
CauchySchwarzCheck cauchy_schwarz_check(const DensityMatrix& rho1,
                                        const DensityMatrix& rho2, const Mat& A,
                                        const Mat& B);

/// Throws UnsupportedFrameError unless gamma(rho) is per-mode diagonal.
void require_williamson_frame(const DensityMatrix& rho, double tol = 1e-6);

}  // namespace focklab
