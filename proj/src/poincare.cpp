#include "focklab/poincare.hpp"

#include <cmath>

#include "focklab/fisher.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/metrics.hpp"

namespace focklab {

namespace {

// Mask of Fock basis states with every per-mode occupation strictly below
// the cutoff. Entries of a truncated commutator inside this block are exact;
// the boundary rows and columns carry the cutoff CCR violation and are
// projected away before any gradient norm.
Eigen::VectorXd interior_mask(const FockCutoff& cutoff) {
    Eigen::VectorXd mask(cutoff.dim());
    for (std::size_t i = 0; i < cutoff.dim(); ++i) {
        bool interior = true;
        for (int j = 0; j < cutoff.modes(); ++j)
            if (cutoff.occupation(i, j) >= cutoff.max_photons(j)) interior = false;
        mask(i) = interior ? 1.0 : 0.0;
    }
    return mask;
}

}  // namespace

double gradient_norm(const DensityMatrix& rho, const Mat& X) {
    if (X.rows() != rho.matrix().rows())
        throw CutoffViolationError("gradient_norm: dimension mismatch");
    Eigen::VectorXd mask = interior_mask(rho.cutoff());
    double acc = 0.0;
    for (int j = 0; j < rho.modes(); ++j) {
        Mat a = annihilation(rho.cutoff(), j).matrix;
        Mat c1 = a * X - X * a;
        Mat c2 = a.adjoint() * X - X * a.adjoint();
        c1 = mask.asDiagonal() * c1 * mask.asDiagonal();
        c2 = mask.asDiagonal() * c2 * mask.asDiagonal();
        acc += sld_norm_sq(rho, c1) + sld_norm_sq(rho, c2);
    }
    return acc;
}

GapEstimate estimate_gap(const DensityMatrix& rho_in) {
    GapEstimate out;
    out.cutoff = rho_in.cutoff().per_mode();

    DensityMatrix rho = rho_in;
    {
        SpectralDecomp d = spectral(rho.matrix());
        if (d.eigenvalues.minCoeff() <= kKernelMaskTol) {
            // The SLD Gram form is singular on kernels; mix non-faithful
            // inputs with their Gaussification and label the estimate.
            constexpr double eps = 1e-6;
            DensityMatrix tau = gaussify_fock(rho_in, rho_in.cutoff());
            Mat mix = (1.0 - eps) * rho_in.matrix() + eps * tau.matrix();
            rho = DensityMatrix(rho_in.cutoff(), std::move(mix), rho_in.tail_mass());
            out.smoothed = true;
        }
    }

    const Eigen::Index d = rho.matrix().rows();
    const std::size_t nb = static_cast<std::size_t>(d) * d;

    SpectralDecomp dec = spectral(rho.matrix());
    Eigen::VectorXd p = dec.eigenvalues.cwiseMax(0.0);
    const Mat& U = dec.eigenvectors;

    int deficient = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (p(i) <= kKernelMaskTol) ++deficient;
    if (deficient > 0)
        throw DegenerateInputError(
            "estimate_gap: SLD Gram rank-deficient on a subspace of dimension " +
            std::to_string(deficient));

    // Everything in the eigenbasis of rho: matrix units E_kl have the exactly
    // diagonal Gram psi(p_k, p_l), and [a, E_kl] is rank two, built from the
    // columns of (Pi a) and Pi with Pi the interior projector.
    Eigen::VectorXd mask = interior_mask(rho.cutoff());
    Mat proj = U.adjoint() * mask.asDiagonal() * U;

    Eigen::VectorXd w_psi(nb);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            w_psi(r * d + c) = 0.5 * (p(r) + p(c));

    Mat D = Mat::Zero(nb, nb);
    for (int j = 0; j < rho.modes(); ++j) {
        Mat at = U.adjoint() * annihilation(rho.cutoff(), j).matrix * U;
        for (int dagger = 0; dagger < 2; ++dagger) {
            const Mat op = dagger ? Mat(at.adjoint()) : at;
            Mat M1 = proj * op;            // columns (Pi op) e_k
            Mat M2 = proj * op.adjoint();  // columns (Pi op^dag) e_l
            Mat C(nb, nb);
            for (std::size_t b = 0; b < nb; ++b) {
                Eigen::Index k = static_cast<Eigen::Index>(b) / d;
                Eigen::Index l = static_cast<Eigen::Index>(b) % d;
                Mat comm = M1.col(k) * proj.col(l).adjoint() -
                           proj.col(k) * M2.col(l).adjoint();
                C.col(b) = Eigen::Map<const Eigen::VectorXcd>(comm.data(), nb);
            }
            D += C.adjoint() * w_psi.asDiagonal() * C;
        }
    }
    D = 0.5 * (D + D.adjoint().eval());

    // Diagonal Gram and the centering constraint tr(rho X) = sum p_k X_kk.
    Eigen::VectorXd gram_sqrt(nb);
    for (std::size_t b = 0; b < nb; ++b)
        gram_sqrt(b) = std::sqrt(w_psi(static_cast<Eigen::Index>(b)));
    Eigen::VectorXcd w_id = Eigen::VectorXcd::Zero(nb);
    for (Eigen::Index k = 0; k < d; ++k)
        w_id(k * d + k) = p(k) / gram_sqrt(k * d + k);
    w_id /= w_id.norm();

    Mat H(nb, nb);
    for (std::size_t r = 0; r < nb; ++r)
        for (std::size_t c = 0; c < nb; ++c)
            H(r, c) = D(r, c) / (gram_sqrt(r) * gram_sqrt(c));
    H = 0.5 * (H + H.adjoint().eval());

    Mat P = Mat::Identity(nb, nb) - w_id * w_id.adjoint();
    double shift = H.cwiseAbs().maxCoeff() * 16.0 + 1.0;
    Mat Hp = P * H * P + shift * (w_id * w_id.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> ges(Hp);

    // Skip the deflated boundary-null cluster: eigenvalues at numerical zero
    // whose gradients vanished entirely under the interior projection.
    double diag_scale = 0.0;
    for (std::size_t b = 0; b < nb; ++b)
        diag_scale = std::max(diag_scale, std::abs(H(b, b).real()));
    double eps_null = 1e-8 * std::max(1.0, diag_scale);
    Eigen::Index pick = 0;
    while (pick < static_cast<Eigen::Index>(nb) - 1 &&
           ges.eigenvalues()(pick) < eps_null)
        ++pick;
    out.gradient_null_dim = static_cast<int>(pick);
    out.lambda_hat = ges.eigenvalues()(pick);

    Eigen::VectorXcd u = ges.eigenvectors().col(pick);
    Mat Xe(d, d);
    for (std::size_t b = 0; b < nb; ++b)
        Xe(static_cast<Eigen::Index>(b) / d, static_cast<Eigen::Index>(b) % d) =
            u(b) / gram_sqrt(b);
    out.gap_operator = U * Xe * U.adjoint();

    // Centering of the returned minimizer, relative to its SLD norm.
    double centering = std::abs(trace_of_product(rho.matrix(), out.gap_operator));
    double xnorm = std::sqrt(sld_norm_sq(rho, out.gap_operator));
    out.deflation_residual = xnorm > 0.0 ? centering / xnorm : centering;

    if (out.lambda_hat < -1e-9)
        throw DegenerateInputError("estimate_gap: negative gap beyond tolerance");
    return out;
}

GapEstimate estimate_gap(const DensityMatrix& rho, const std::vector<int>& cutoff) {
    FockCutoff target(cutoff);
    bool grows = false, shrinks = false;
    for (int j = 0; j < rho.modes(); ++j) {
        if (target.max_photons(j) > rho.cutoff().max_photons(j)) grows = true;
        if (target.max_photons(j) < rho.cutoff().max_photons(j)) shrinks = true;
    }
    if (grows && shrinks)
        throw CutoffViolationError("estimate_gap: mixed pad/truncate cutoff");
    if (grows) return estimate_gap(pad_to(rho, target));
    if (shrinks) return estimate_gap(truncate_to(rho, target));
    return estimate_gap(rho);
}

std::pair<double, double> passive_invariance_check(const DensityMatrix& rho,
                                                   double theta) {
    if (rho.modes() != 1)
        throw CutoffViolationError("passive_invariance_check: single mode only");
    const Eigen::Index d = rho.matrix().rows();
    Eigen::VectorXcd phase(d);
    for (Eigen::Index n = 0; n < d; ++n)
        phase(n) = std::polar(1.0, theta * static_cast<double>(n));
    Mat rotated = phase.asDiagonal() * rho.matrix() * phase.conjugate().asDiagonal();
    DensityMatrix rot(rho.cutoff(), std::move(rotated), rho.tail_mass());
    return {estimate_gap(rho).lambda_hat, estimate_gap(rot).lambda_hat};
}

}  // namespace focklab
