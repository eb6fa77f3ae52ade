#include "focklab/fisher.hpp"

#include <cmath>
#include <limits>

#include "focklab/charfn.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/metrics.hpp"

namespace focklab {

namespace kernels {

KernelFn psi() {
    return {[](double x, double y) { return 0.5 * (x + y); }, "psi"};
}

KernelFn phi() {
    return {[](double x, double y) {
                double s = x + y;
                return s > kKernelMaskTol ? 2.0 / s : 0.0;
            },
            "phi"};
}

KernelFn zeta() {
    return {[](double x, double y) {
                double s = x + y;
                if (s <= kKernelMaskTol) return 0.0;
                double d = x - y;
                return 2.0 * d * d / s;
            },
            "zeta"};
}

KernelFn logmean_reciprocal() {
    return {[](double x, double y) {
                if (std::abs(x - y) <= kKernelMaskTol * std::max(1.0, x))
                    return x > 0.0 ? 1.0 / (0.5 * (x + y)) : 0.0;
                return (std::log(x) - std::log(y)) / (x - y);
            },
            "logmean_reciprocal"};
}

KernelFn lsi_g(double beta) {
    double ep = std::exp(0.25 * beta), em = std::exp(-0.25 * beta);
    return {[ep, em](double x, double y) {
                double t = ep * std::sqrt(std::max(0.0, y)) -
                           em * std::sqrt(std::max(0.0, x));
                return t * t;
            },
            "lsi_g"};
}

KernelFn constant(double c) {
    return {[c](double, double) { return c; }, "constant"};
}

}  // namespace kernels

namespace {

struct EigenState {
    Eigen::VectorXd p;  // clamped eigenvalues, descending
    Mat U;              // columns are eigenvectors
};

EigenState eigen_state(const DensityMatrix& rho) {
    SpectralDecomp d = spectral(rho.matrix());
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i)
        if (d.eigenvalues(i) < 0.0) d.eigenvalues(i) = 0.0;
    return {d.eigenvalues, d.eigenvectors};
}

bool is_faithful(const Eigen::VectorXd& p) { return p.minCoeff() > kKernelMaskTol; }

// One-level padding makes the ladder matrix exact on the support of rho;
// without it a state occupying the boundary level loses the a^dag column
// and Fisher sums come out low.
DensityMatrix padded_by_one(const DensityMatrix& rho) {
    std::vector<int> padded = rho.cutoff().per_mode();
    for (int& c : padded) ++c;
    return pad_to(rho, FockCutoff(padded));
}

}  // namespace

Mat pi_apply(const DensityMatrix& rho, const KernelFn& g, const Mat& X) {
    if (X.rows() != rho.matrix().rows() || X.cols() != rho.matrix().cols())
        throw CutoffViolationError("pi_apply: dimension mismatch");
    EigenState es = eigen_state(rho);
    Mat Xt = es.U.adjoint() * X * es.U;
    for (Eigen::Index k = 0; k < Xt.rows(); ++k)
        for (Eigen::Index l = 0; l < Xt.cols(); ++l)
            Xt(k, l) *= g.eval(es.p(k), es.p(l));
    return es.U * Xt * es.U.adjoint();
}

cd sld_inner(const DensityMatrix& rho, const Mat& X, const Mat& Y) {
    const Mat& r = rho.matrix();
    Mat Xd = X.adjoint();
    return 0.5 * (trace_of_product(r, (Xd * Y).eval()) +
                  trace_of_product(Xd, (r * Y).eval()));
}

double sld_norm_sq(const DensityMatrix& rho, const Mat& X) {
    return std::max(0.0, sld_inner(rho, X, X).real());
}

void require_williamson_frame(const DensityMatrix& rho, double tol) {
    CovarianceData cov = covariance(rho);
    if (!is_williamson_frame(cov.gamma, tol))
        throw UnsupportedFrameError(
            "state covariance is not per-mode diagonal; rotate to the "
            "Williamson frame before Fisher operations");
}

ScoreOperator sld_score(const DensityMatrix& rho_in, int mode) {
    require_williamson_frame(rho_in);
    DensityMatrix rho = padded_by_one(rho_in);
    EigenState es = eigen_state(rho);
    Mat a = annihilation(rho.cutoff(), mode).matrix;
    Mat at = es.U.adjoint() * a * es.U;  // a in the eigenbasis
    const Eigen::Index d = at.rows();
    Mat S = Mat::Zero(d, d);
    int masked = 0;
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) {
            double s = es.p(k) + es.p(l);
            cd comm = at(k, l) * (es.p(l) - es.p(k));  // [a, rho] in eigenbasis
            if (s > kKernelMaskTol)
                S(k, l) = 2.0 * comm / s;
            else if (std::abs(at(k, l)) > 0.0)
                ++masked;
        }
    ScoreOperator out;
    out.matrix = es.U * S * es.U.adjoint();
    out.mode = mode;
    out.masked_pairs = masked;
    return out;
}

FisherResult sld_fisher(const DensityMatrix& rho_in) {
    require_williamson_frame(rho_in);
    DensityMatrix rho = padded_by_one(rho_in);
    EigenState es = eigen_state(rho);
    KernelFn zeta = kernels::zeta();
    const int m = rho.modes();
    FisherResult out;
    out.per_mode = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
        Mat a = annihilation(rho.cutoff(), j).matrix;
        Mat at = es.U.adjoint() * a * es.U;
        double acc = 0.0;
        for (Eigen::Index k = 0; k < at.rows(); ++k)
            for (Eigen::Index l = 0; l < at.cols(); ++l)
                acc += zeta.eval(es.p(k), es.p(l)) * std::norm(at(k, l));
        out.per_mode(j) = acc;
    }
    out.total = out.per_mode.sum();
    return out;
}

FisherDistanceResult fisher_distance(const DensityMatrix& rho) {
    FisherResult I = sld_fisher(rho);
    CovarianceData cov = covariance(rho);
    EigenState es = eigen_state(rho);

    FisherDistanceResult out;
    const int m = rho.modes();
    out.per_mode = Eigen::VectorXd(m);
    for (int j = 0; j < m; ++j) out.per_mode(j) = I.per_mode(j) - 1.0 / cov.mu(j);
    out.total = out.per_mode.sum();

    // Faithfulness on the state's own space gates the ||S + a/mu||^2 route;
    // both forms are evaluated on the padded embedding.
    if (is_faithful(es.p)) {
        out.norm_form_checked = true;
        DensityMatrix rho_pad = padded_by_one(rho);
        for (int j = 0; j < m; ++j) {
            ScoreOperator S = sld_score(rho, j);
            Mat shifted =
                S.matrix + annihilation(rho_pad.cutoff(), j).matrix / cov.mu(j);
            double norm_form = sld_norm_sq(rho_pad, shifted);
            out.max_form_gap =
                std::max(out.max_form_gap, std::abs(norm_form - out.per_mode(j)));
        }
    }
    return out;
}

double kmb_fisher(const DensityMatrix& rho) {
    EigenState es = eigen_state(rho);
    if (!is_faithful(es.p)) return std::numeric_limits<double>::infinity();
    KernelFn k = kernels::logmean_reciprocal();
    double acc = 0.0;
    for (int j = 0; j < rho.modes(); ++j) {
        Mat a = annihilation(rho.cutoff(), j).matrix;
        Mat at = es.U.adjoint() * a * es.U;
        for (Eigen::Index r = 0; r < at.rows(); ++r)
            for (Eigen::Index c = 0; c < at.cols(); ++c) {
                cd comm = at(r, c) * (es.p(c) - es.p(r));
                acc += std::norm(comm) * k.eval(es.p(r), es.p(c));
            }
    }
    return acc;
}

double lsi_dirichlet(const DensityMatrix& rho_in, std::span<const double> beta) {
    if (static_cast<int>(beta.size()) != rho_in.modes())
        throw CutoffViolationError("lsi_dirichlet: beta count mismatch");
    for (double b : beta)
        if (!(b > 0.0) || std::isinf(b))
            throw DegenerateInputError(
                "lsi_dirichlet: beta must be finite positive (nu = 1 modes "
                "are rejected)");
    DensityMatrix rho = padded_by_one(rho_in);
    EigenState es = eigen_state(rho);
    double acc = 0.0;
    for (int j = 0; j < rho.modes(); ++j) {
        KernelFn g = kernels::lsi_g(beta[j]);
        Mat a = annihilation(rho.cutoff(), j).matrix;
        Mat at = es.U.adjoint() * a * es.U;
        for (Eigen::Index r = 0; r < at.rows(); ++r)
            for (Eigen::Index c = 0; c < at.cols(); ++c)
                acc += g.eval(es.p(r), es.p(c)) * std::norm(at(r, c));
    }
    return acc;
}

double lsi_alpha(std::span<const double> beta, int modes) {
    if (beta.empty()) throw DegenerateInputError("lsi_alpha: empty beta list");
    double bmin = std::numeric_limits<double>::infinity();
    for (double b : beta) {
        if (!(b > 0.0)) throw DegenerateInputError("lsi_alpha: beta must be > 0");
        bmin = std::min(bmin, b);
    }
    double inv = (2.0 + std::log(2.0 * modes + 1.0)) / std::sinh(0.5 * bmin) +
                 bmin / (4.0 * std::pow(std::sinh(0.25 * bmin), 2));
    return 1.0 / inv;
}

double scalar_gh_check(double beta, double x_max, int points_per_axis) {
    if (!(beta > 0.0)) throw DegenerateInputError("scalar_gh_check: beta must be > 0");
    double q = std::exp(-beta);
    double C = 8.0 * std::exp(-1.5 * beta) / ((1.0 + q) * (1.0 + q));
    double mu = (1.0 + q) / (2.0 * (1.0 - q));
    double ep = std::exp(0.25 * beta), em = std::exp(-0.25 * beta);
    double h_step = x_max / (points_per_axis - 1);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < points_per_axis; ++i) {
        double x = i * h_step;
        for (int j = 0; j < points_per_axis; ++j) {
            double y = j * h_step;
            double g = ep * std::sqrt(y) - em * std::sqrt(x);
            g *= g;
            double s = x + y;
            double h;
            if (s == 0.0) {
                h = 0.0;
            } else {
                double t = std::sqrt(2.0 / s) * (y - x) + std::sqrt(0.5 * s) / mu;
                h = t * t;
            }
            worst = std::max(worst, C * g - h);
        }
    }
    return worst;
}

CauchySchwarzCheck cauchy_schwarz_check(const DensityMatrix& rho1,
                                        const DensityMatrix& rho2, const Mat& A,
                                        const Mat& B) {
    const Eigen::Index d1 = rho1.matrix().rows();
    const Eigen::Index d2 = rho2.matrix().rows();
    if (A.rows() != d1 || B.rows() != d1 * d2)
        throw CutoffViolationError("cauchy_schwarz_check: dimension mismatch");

    // Pi^psi_{rho1}(A) needs no eigendecomposition.
    Mat piA = 0.5 * (rho1.matrix() * A + A * rho1.matrix());

    // T = tr_1((piA (x) I) B)
    Mat T = Mat::Zero(d2, d2);
    for (Eigen::Index i2 = 0; i2 < d2; ++i2)
        for (Eigen::Index j2 = 0; j2 < d2; ++j2) {
            cd acc(0.0, 0.0);
            for (Eigen::Index i1 = 0; i1 < d1; ++i1)
                for (Eigen::Index k1 = 0; k1 < d1; ++k1)
                    acc += piA(i1, k1) * B(k1 * d2 + i2, i1 * d2 + j2);
            T(i2, j2) = acc;
        }

    DensityMatrix joint = tensor(rho1, rho2);
    CauchySchwarzCheck out;
    out.lhs = std::sqrt(sld_norm_sq(rho2, T));
    out.rhs = std::sqrt(sld_norm_sq(rho1, A)) * std::sqrt(sld_norm_sq(joint, B));
    return out;
}

}  // namespace focklab
