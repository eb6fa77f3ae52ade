#include "focklab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "focklab/charfn.hpp"

namespace focklab {

Eigen::MatrixXd symplectic_form(int modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int j = 0; j < modes; ++j) {
        omega(2 * j, 2 * j + 1) = 1.0;
        omega(2 * j + 1, 2 * j) = -1.0;
    }
    return omega;
}

WilliamsonResult williamson(const Eigen::MatrixXd& gamma) {
    const int n = static_cast<int>(gamma.rows());
    if (n % 2 != 0 || gamma.cols() != n)
        throw DegenerateInputError("williamson: gamma must be 2m x 2m");
    const int m = n / 2;
    Eigen::MatrixXd sym = 0.5 * (gamma + gamma.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw DegenerateInputError("williamson: gamma is not positive definite");
    Eigen::MatrixXd gamma_inv_sqrt =
        es.eigenvectors() *
        es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();

    // B = gamma^{-1/2} Omega gamma^{-1/2} is antisymmetric with eigenvalues
    // +- i/nu_j; iB is Hermitian. Each positive eigenpair 1/nu with unit
    // eigenvector w = (u + i v)/sqrt2 gives an orthonormal plane (v, u) in
    // which B acts as (1/nu) * Omega_1.
    Eigen::MatrixXd B = gamma_inv_sqrt * symplectic_form(m) * gamma_inv_sqrt;
    Mat iB = cd(0.0, 1.0) * B.cast<cd>();
    Eigen::SelfAdjointEigenSolver<Mat> bes(iB);

    struct Pair {
        double kappa;
        Eigen::VectorXcd w;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < n; ++i)
        if (bes.eigenvalues()(i) > 0.0)
            pairs.push_back({bes.eigenvalues()(i), bes.eigenvectors().col(i)});
    if (static_cast<int>(pairs.size()) != m)
        throw DegenerateInputError("williamson: failed to pair eigenvalues");
    // kappa = 1/nu ascending <=> nu descending.
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.kappa < b.kappa; });

    Eigen::MatrixXd Q(n, n);
    Eigen::VectorXd nu(m);
    for (int j = 0; j < m; ++j) {
        nu(j) = 1.0 / pairs[j].kappa;
        Eigen::VectorXcd w = pairs[j].w;
        // Deterministic phase: largest-magnitude component real positive.
        int arg = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(w(i)) > std::abs(w(arg))) arg = i;
        w *= std::polar(1.0, -std::arg(w(arg)));
        Eigen::VectorXd u = std::sqrt(2.0) * w.real();
        Eigen::VectorXd v = std::sqrt(2.0) * w.imag();
        Q.col(2 * j) = v;
        Q.col(2 * j + 1) = u;
    }

    // Degenerate nu blocks: the complex eigenvectors within a degenerate
    // eigenspace may come out non-orthogonal after the (u, v) split; a final
    // Gram-Schmidt over the block columns restores orthonormality without
    // leaving the invariant subspace.
    for (int j = 0; j < m; ++j) {
        for (int c = 2 * j; c < 2 * j + 2; ++c) {
            Eigen::VectorXd col = Q.col(c);
            for (int prev = 0; prev < c; ++prev)
                col -= Q.col(prev).dot(col) * Q.col(prev);
            double norm = col.norm();
            if (norm < 1e-10)
                throw DegenerateInputError("williamson: degenerate block collapse");
            Q.col(c) = col / norm;
        }
    }

    WilliamsonResult out;
    out.nu = nu;
    Eigen::VectorXd scale(n);
    for (int j = 0; j < m; ++j) scale(2 * j) = scale(2 * j + 1) = std::sqrt(nu(j));
    out.S = scale.asDiagonal() * Q.transpose() * gamma_inv_sqrt;
    return out;
}

double nu_to_beta(double nu) {
    if (nu < 1.0 - 1e-8) throw DegenerateInputError("nu_to_beta: nu < 1");
    if (nu <= 1.0) return std::numeric_limits<double>::infinity();
    return std::log((nu + 1.0) / (nu - 1.0));
}

double beta_to_nu(double beta) {
    if (!(beta > 0.0)) throw DegenerateInputError("beta_to_nu: beta must be > 0");
    double q = std::exp(-beta);
    return (1.0 + q) / (1.0 - q);
}

DensityMatrix thermal_state(double nu, int nmax) {
    if (nu < 1.0) throw DegenerateInputError("thermal_state: nu must be >= 1");
    FockCutoff cut({nmax});
    Mat rho = Mat::Zero(cut.dim(), cut.dim());
    double q = (nu - 1.0) / (nu + 1.0);
    if (q == 0.0) {
        rho(0, 0) = 1.0;
        return DensityMatrix(cut, std::move(rho), 0.0);
    }
    double w = 1.0 - q;
    for (int n = 0; n <= nmax; ++n) {
        rho(n, n) = w;
        w *= q;
    }
    double tail = std::pow(q, nmax + 1);
    return DensityMatrix(cut, std::move(rho), tail);
}

DensityMatrix thermal_product(std::span<const double> nu, const FockCutoff& cutoff) {
    if (static_cast<int>(nu.size()) != cutoff.modes())
        throw CutoffViolationError("thermal_product: nu count mismatch");
    DensityMatrix out = thermal_state(nu[0], cutoff.max_photons(0));
    for (int j = 1; j < cutoff.modes(); ++j)
        out = tensor(out, thermal_state(nu[j], cutoff.max_photons(j)));
    return out;
}

GaussianSpec gaussian_spec_from(const CovarianceData& cov, Eigen::VectorXd d) {
    GaussianSpec spec;
    spec.d = std::move(d);
    spec.gamma = cov.gamma;
    WilliamsonResult w = williamson(cov.gamma);
    spec.nu = w.nu;
    spec.S = w.S;
    spec.beta = Eigen::VectorXd(w.nu.size());
    for (int j = 0; j < w.nu.size(); ++j) spec.beta(j) = nu_to_beta(w.nu(j));
    return spec;
}

GaussianSpec gaussify(const DensityMatrix& rho) {
    CovarianceData cov = covariance(rho);
    return gaussian_spec_from(cov, cov.d);
}

bool is_williamson_frame(const Eigen::MatrixXd& gamma, double tol) {
    const int m = static_cast<int>(gamma.rows()) / 2;
    for (int r = 0; r < 2 * m; ++r)
        for (int c = 0; c < 2 * m; ++c) {
            if (r == c) continue;
            if (std::abs(gamma(r, c)) > tol) return false;
        }
    for (int j = 0; j < m; ++j)
        if (std::abs(gamma(2 * j, 2 * j) - gamma(2 * j + 1, 2 * j + 1)) > tol)
            return false;
    return true;
}

DensityMatrix gaussify_fock(const DensityMatrix& rho, const FockCutoff& cutoff,
                            double tol) {
    CovarianceData cov = covariance(rho);
    if (cov.d.cwiseAbs().maxCoeff() > tol)
        throw UnsupportedFrameError("gaussify_fock: state is not centered");
    if (!is_williamson_frame(cov.gamma, tol))
        throw UnsupportedFrameError(
            "gaussify_fock: covariance is not per-mode diagonal (Williamson frame)");
    std::vector<double> nu(rho.modes());
    for (int j = 0; j < rho.modes(); ++j)
        nu[j] = 0.5 * (cov.gamma(2 * j, 2 * j) + cov.gamma(2 * j + 1, 2 * j + 1));
    return thermal_product(nu, cutoff);
}

DensityMatrix gaussify_fock(const DensityMatrix& rho, double tol) {
    return gaussify_fock(rho, rho.cutoff(), tol);
}

cd gaussian_char_fn(const GaussianSpec& spec, std::span<const cd> z) {
    const int m = static_cast<int>(spec.nu.size());
    if (static_cast<int>(z.size()) != m)
        throw CutoffViolationError("gaussian_char_fn: z has wrong mode count");
    // D_z = exp(i xi^T R) with xi = (sqrt2 Im z_1, -sqrt2 Re z_1, ...).
    Eigen::VectorXd xi(2 * m);
    for (int j = 0; j < m; ++j) {
        xi(2 * j) = std::sqrt(2.0) * z[j].imag();
        xi(2 * j + 1) = -std::sqrt(2.0) * z[j].real();
    }
    double quad = 0.25 * xi.dot(spec.gamma * xi);
    double phase = xi.dot(spec.d);
    return std::exp(cd(-quad, phase));
}

cd gaussian_char_fn(const GaussianSpec& spec, cd z) {
    std::vector<cd> zz{z};
    return gaussian_char_fn(spec, zz);
}

}  // namespace focklab
