#include "focklab/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

namespace focklab {

SpectralDecomp spectral(const Mat& hermitian, double clamp_tol) {
    Mat H = 0.5 * (hermitian + hermitian.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(H);

    const Eigen::Index d = H.rows();
    SpectralDecomp out;
    out.eigenvalues = Eigen::VectorXd(d);
    out.eigenvectors = Mat(d, d);
    // SelfAdjointEigenSolver sorts ascending; flip to descending.
    for (Eigen::Index i = 0; i < d; ++i) {
        out.eigenvalues(i) = es.eigenvalues()(d - 1 - i);
        out.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (out.eigenvalues(i) < 0.0 && out.eigenvalues(i) >= -clamp_tol) {
            out.eigenvalues(i) = 0.0;
            ++out.clamped_count;
        }
    }
    Mat rec = out.eigenvectors * out.eigenvalues.asDiagonal() * out.eigenvectors.adjoint();
    out.reconstruction_error = (rec - H).cwiseAbs().maxCoeff();
    return out;
}

namespace {

std::pair<Mat, Mat> on_common_cutoff(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.cutoff() == b.cutoff()) return {a.matrix(), b.matrix()};
    FockCutoff common = common_cutoff(a.cutoff(), b.cutoff());
    return {pad_to(a, common).matrix(), pad_to(b, common).matrix()};
}

}  // namespace

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    auto [a, b] = on_common_cutoff(rho, sigma);
    Mat diff = a - b;
    Eigen::SelfAdjointEigenSolver<Mat> es(diff, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double hs_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    auto [a, b] = on_common_cutoff(rho, sigma);
    return (a - b).norm();
}

double trace_norm(const Mat& T) {
    Eigen::BDCSVD<Mat> svd(T);
    return svd.singularValues().sum();
}

RelEntropyResult relative_entropy_detailed(const DensityMatrix& rho,
                                           const DensityMatrix& sigma) {
    constexpr double kSupportEps = 1e-10;   // sigma eigenvalues below this are kernel
    constexpr double kMassTol = 1e-8;       // tolerated rho weight on that kernel
    auto [a, b] = on_common_cutoff(rho, sigma);
    SpectralDecomp dr = spectral(a);
    SpectralDecomp ds = spectral(b);

    RelEntropyResult out;
    const Eigen::Index d = a.rows();

    // overlaps |<u_k | v_l>|^2
    Mat overlap = dr.eigenvectors.adjoint() * ds.eigenvectors;

    double mass_outside = 0.0;
    for (Eigen::Index l = 0; l < d; ++l) {
        if (ds.eigenvalues(l) > kSupportEps) continue;
        for (Eigen::Index k = 0; k < d; ++k)
            mass_outside += dr.eigenvalues(k) * std::norm(overlap(k, l));
    }
    out.rho_mass_outside = mass_outside;
    if (mass_outside > kMassTol) {
        out.infinite = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }

    double acc = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        double p = dr.eigenvalues(k);
        if (p <= 1e-12) continue;  // 0 log 0 = 0
        acc += p * std::log(p);
        for (Eigen::Index l = 0; l < d; ++l) {
            double q = ds.eigenvalues(l);
            if (q <= kSupportEps) continue;
            acc -= p * std::norm(overlap(k, l)) * std::log(q);
        }
    }
    out.value = acc;
    return out;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    return relative_entropy_detailed(rho, sigma).value;
}

TraceNormBound trace_norm_charfn_bound(const Mat& T, const FockCutoff& cutoff,
                                       const PhaseGrid& grid) {
    const int m = cutoff.modes();
    TraceNormBound out{};

    Mat H = 0.5 * (T + T.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    double tn = es.eigenvalues().cwiseAbs().sum();
    out.lhs = tn * tn;

    // A^dag T A raises indices by one per mode; pad so the product is exact.
    std::vector<int> padded = cutoff.per_mode();
    for (int& c : padded) ++c;
    FockCutoff pad_cut(padded);
    Mat Tp = Mat::Zero(pad_cut.dim(), pad_cut.dim());
    std::vector<std::size_t> map(cutoff.dim());
    for (std::size_t i = 0; i < cutoff.dim(); ++i)
        map[i] = pad_cut.flatten(cutoff.unflatten(i));
    for (std::size_t i = 0; i < cutoff.dim(); ++i)
        for (std::size_t j = 0; j < cutoff.dim(); ++j)
            Tp(map[i], map[j]) = H(i, j);

    Mat A = Mat::Identity(pad_cut.dim(), pad_cut.dim());
    for (int j = 0; j < m; ++j) A = (A * annihilation(pad_cut, j).matrix).eval();
    Mat ATA = A.adjoint() * Tp * A;

    double integral = plancherel_hs_norm(ATA, pad_cut, grid);
    out.rhs = std::pow(std::numbers::pi * std::numbers::pi / 6.0, m) * integral;
    return out;
}

}  // namespace focklab
