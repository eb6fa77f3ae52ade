#pragma once

#include "focklab/fock.hpp"

namespace focklab {

struct CovarianceData;

/// Omega_m = direct sum of [[0, 1], [-1, 0]] blocks.
Eigen::MatrixXd symplectic_form(int modes);

struct WilliamsonResult {
    Eigen::MatrixXd S;    // symplectic, S gamma S^T = diag(nu_1, nu_1, ...)
    Eigen::VectorXd nu;   // symplectic eigenvalues, descending
};

/// Williamson normal form of a positive definite covariance matrix.
/// Built from the canonical antisymmetric form of gamma^{-1/2} Omega
/// gamma^{-1/2}; degenerate nu blocks get a deterministic basis.
WilliamsonResult williamson(const Eigen::MatrixXd& gamma);

/// Analytic Gaussian state: moments plus the Williamson data. beta_j carries
/// the +infinity sentinel when nu_j = 1.
struct GaussianSpec {
    Eigen::VectorXd d;
    Eigen::MatrixXd gamma;
    Eigen::VectorXd nu;
    Eigen::MatrixXd S;
    Eigen::VectorXd beta;
};

double nu_to_beta(double nu);   // beta = log((nu+1)/(nu-1)), +inf at nu = 1
double beta_to_nu(double beta);

/// Thermal state tau with symplectic eigenvalue nu >= 1 on {|0>..|nmax>}:
/// weights (1-q) q^n with q = (nu-1)/(nu+1). nu = 1 is exactly the vacuum.
/// tail_mass is set to the discarded geometric tail q^{nmax+1}.
DensityMatrix thermal_state(double nu, int nmax);

/// Tensor product of thermal states, one nu per mode.
DensityMatrix thermal_product(std::span<const double> nu, const FockCutoff& cutoff);

/// Gaussification: the Gaussian state sharing d(rho) and gamma(rho).
GaussianSpec gaussify(const DensityMatrix& rho);
GaussianSpec gaussian_spec_from(const CovarianceData& cov, Eigen::VectorXd d);

/// True when gamma is per-mode diagonal (Williamson frame) within tol.
bool is_williamson_frame(const Eigen::MatrixXd& gamma, double tol = 1e-6);

/// Fock synthesis of the Gaussification as a thermal product. Only available
/// in the Williamson frame with d = 0; otherwise UnsupportedFrameError.
DensityMatrix gaussify_fock(const DensityMatrix& rho, double tol = 1e-6);
DensityMatrix gaussify_fock(const DensityMatrix& rho, const FockCutoff& cutoff,
                            double tol = 1e-6);

/// chi of the Gaussian spec: exp(i xi^T d - xi^T gamma xi / 4) with xi the
/// real phase-space vector of z. In the Williamson frame this is the product
/// of e^{-nu_j |z_j|^2 / 2} factors.
cd gaussian_char_fn(const GaussianSpec& spec, std::span<const cd> z);
cd gaussian_char_fn(const GaussianSpec& spec, cd z);

}  // namespace focklab
