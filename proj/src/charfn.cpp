#include "focklab/charfn.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "focklab/gaussian.hpp"

namespace focklab {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

}  // namespace

PhaseGrid::PhaseGrid(int modes, double radius, int points_per_axis, QuadScheme scheme)
    : modes_(modes), points_(points_per_axis), radius_(radius), scheme_(scheme) {
    if (modes < 1 || points_per_axis < 2 || !(radius > 0.0))
        throw DegenerateInputError("PhaseGrid: bad parameters");
    if (scheme_ == QuadScheme::gauss_legendre) {
        gauss_legendre(points_, axis_nodes_, axis_weights_);
        for (double& x : axis_nodes_) x *= radius_;
        for (double& w : axis_weights_) w *= radius_;
    } else {
        axis_nodes_.resize(points_);
        axis_weights_.resize(points_);
        double h = 2.0 * radius_ / (points_ - 1);
        for (int i = 0; i < points_; ++i) {
            axis_nodes_[i] = -radius_ + h * i;
            axis_weights_[i] = (i == 0 || i == points_ - 1) ? 0.5 * h : h;
        }
    }
    size_ = 1;
    for (int ax = 0; ax < 2 * modes_; ++ax) {
        size_ *= static_cast<std::size_t>(points_);
        if (size_ > (std::size_t{1} << 26))
            throw DimensionCeilingError("PhaseGrid: too many nodes");
    }
}

std::vector<cd> PhaseGrid::node(std::size_t index) const {
    std::vector<cd> z(modes_);
    // axis order: (re z_m, im z_m) fastest ... consistent with weight().
    for (int j = modes_ - 1; j >= 0; --j) {
        std::size_t iy = index % points_;
        index /= points_;
        std::size_t ix = index % points_;
        index /= points_;
        z[j] = cd(axis_nodes_[ix], axis_nodes_[iy]);
    }
    return z;
}

double PhaseGrid::weight(std::size_t index) const {
    double w = 1.0;
    for (int ax = 0; ax < 2 * modes_; ++ax) {
        w *= axis_weights_[index % points_];
        index /= points_;
    }
    return w;
}

bool PhaseGrid::is_boundary(std::size_t index) const {
    for (int ax = 0; ax < 2 * modes_; ++ax) {
        std::size_t i = index % points_;
        if (i == 0 || i == static_cast<std::size_t>(points_) - 1) return true;
        index /= points_;
    }
    return false;
}

cd char_fn(const Mat& T, const FockCutoff& cutoff, std::span<const cd> z) {
    if (static_cast<int>(z.size()) != cutoff.modes())
        throw CutoffViolationError("char_fn: z has wrong mode count");
    Mat D = Mat::Identity(1, 1);
    for (int j = 0; j < cutoff.modes(); ++j) {
        Mat dj = displacement_matrix(z[j], cutoff.max_photons(j));
        Mat out(D.rows() * dj.rows(), D.cols() * dj.cols());
        for (Eigen::Index r = 0; r < D.rows(); ++r)
            for (Eigen::Index c = 0; c < D.cols(); ++c)
                out.block(r * dj.rows(), c * dj.cols(), dj.rows(), dj.cols()) = D(r, c) * dj;
        D = std::move(out);
    }
    return trace_of_product(T, D);
}

cd char_fn(const DensityMatrix& rho, std::span<const cd> z) {
    return char_fn(rho.matrix(), rho.cutoff(), z);
}

cd char_fn(const DensityMatrix& rho, cd z) {
    std::vector<cd> zz{z};
    return char_fn(rho.matrix(), rho.cutoff(), zz);
}

CharSample sample_char(const Mat& T, const FockCutoff& cutoff,
                       const PhaseGrid& grid, std::string source) {
    CharSample s{grid, {}, std::move(source)};
    s.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<cd> z = grid.node(i);
        s.values[i] = char_fn(T, cutoff, z);
    }
    return s;
}

void write_char_csv(const CharSample& sample, std::ostream& os) {
    for (int j = 0; j < sample.grid.modes(); ++j)
        os << "re_z" << j + 1 << ",im_z" << j + 1 << ",";
    os << "re_chi,im_chi\n";
    char buf[64];
    for (std::size_t i = 0; i < sample.grid.size(); ++i) {
        std::vector<cd> z = sample.grid.node(i);
        for (const cd& zj : z) {
            std::snprintf(buf, sizeof buf, "%.12e,%.12e,", zj.real(), zj.imag());
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", sample.values[i].real(),
                      sample.values[i].imag());
        os << buf;
    }
}

double boundary_max_abs_char(const Mat& T, const FockCutoff& cutoff,
                             const PhaseGrid& grid) {
    // Probe the outermost axis layers along a ring; full boundary scans are
    // wasteful for 2m > 2 and add nothing at Gaussian decay.
    double worst = 0.0;
    int m = cutoff.modes();
    const int directions = 16;
    for (int k = 0; k < directions; ++k) {
        double phi = 2.0 * std::numbers::pi * k / directions;
        for (int j = 0; j < m; ++j) {
            std::vector<cd> z(m, cd(0.0, 0.0));
            z[j] = std::polar(grid.radius(), phi);
            worst = std::max(worst, std::abs(char_fn(T, cutoff, z)));
        }
    }
    return worst;
}

double choose_radius(const Mat& T, const FockCutoff& cutoff, double target,
                     double start) {
    double R = start;
    for (int iter = 0; iter < 24; ++iter) {
        PhaseGrid probe(cutoff.modes(), R, 2);
        if (boundary_max_abs_char(T, cutoff, probe) < target) return R;
        R *= 1.4142135623730951;
    }
    throw GridError("choose_radius: characteristic function does not decay below target");
}

cd wigner(const Mat& T, const FockCutoff& cutoff, std::span<const cd> z,
          const PhaseGrid& grid) {
    if (boundary_max_abs_char(T, cutoff, grid) > 1e-6)
        throw GridError("wigner: |chi| at grid boundary exceeds 1e-6");
    int m = cutoff.modes();
    cd acc(0.0, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<cd> w = grid.node(i);
        cd phase(0.0, 0.0);
        for (int j = 0; j < m; ++j)
            phase += z[j] * std::conj(w[j]) - std::conj(z[j]) * w[j];
        acc += grid.weight(i) * char_fn(T, cutoff, w) * std::exp(phase);
    }
    return acc / std::pow(std::numbers::pi, 2 * m);
}

cd wigner(const DensityMatrix& rho, cd z, const PhaseGrid& grid) {
    std::vector<cd> zz{z};
    return wigner(rho.matrix(), rho.cutoff(), zz, grid);
}

double plancherel_hs_norm(const Mat& T, const FockCutoff& cutoff,
                          const PhaseGrid& grid) {
    if (boundary_max_abs_char(T, cutoff, grid) > 1e-6)
        throw GridError("plancherel_hs_norm: |chi| at grid boundary exceeds 1e-6");
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<cd> w = grid.node(i);
        acc += grid.weight(i) * std::norm(char_fn(T, cutoff, w));
    }
    return acc / std::pow(std::numbers::pi, cutoff.modes());
}

double moment(const DensityMatrix& rho, double kappa) {
    if (!(kappa > 0.0)) throw DegenerateInputError("moment: kappa must be > 0");
    const FockCutoff& cut = rho.cutoff();
    double m = static_cast<double>(cut.modes());
    double acc = 0.0;
    for (std::size_t i = 0; i < cut.dim(); ++i)
        acc += rho.matrix()(i, i).real() *
               std::pow(cut.total_photons(i) + m, 0.5 * kappa);
    return acc;
}

CovarianceData covariance(const DensityMatrix& rho) {
    int m = rho.modes();
    const FockCutoff& cut = rho.cutoff();

    std::vector<Mat> a(m);
    for (int j = 0; j < m; ++j) a[j] = annihilation(cut, j).matrix;

    Eigen::VectorXcd mean_a(m);
    for (int j = 0; j < m; ++j) mean_a(j) = trace_of_product(rho.matrix(), a[j]);

    // Second moments of ladder operators. Products of truncated matrices are
    // exact for a_j a_k and a_j^dag a_k (the intermediate state stays inside
    // the cutoff); aa^dag on the same mode comes from the CCR instead.
    Mat Maa(m, m), Mad(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            Maa(j, k) = trace_of_product(rho.matrix(), (a[j] * a[k]).eval());
            Mad(j, k) = trace_of_product(rho.matrix(), (a[j].adjoint() * a[k]).eval());
        }

    CovarianceData out;
    out.d = Eigen::VectorXd(2 * m);
    for (int j = 0; j < m; ++j) {
        // x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2)
        out.d(2 * j) = std::sqrt(2.0) * mean_a(j).real();
        out.d(2 * j + 1) = std::sqrt(2.0) * mean_a(j).imag();
    }

    // In terms of A_jk = <a_j a_k> and B_jk = <a_j^dag a_k>:
    //   <{x_j, x_k}> =  2 Re A_jk + 2 Re B_jk + delta_jk
    //   <{p_j, p_k}> = -2 Re A_jk + 2 Re B_jk + delta_jk
    //   <{x_j, p_k}> =  2 Im A_jk + 2 Im B_jk
    //   <{p_j, x_k}> =  2 Im A_jk - 2 Im B_jk
    out.gamma = Eigen::MatrixXd(2 * m, 2 * m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            double del = (j == k) ? 1.0 : 0.0;
            cd A = Maa(j, k), B = Mad(j, k);
            out.gamma(2 * j, 2 * k) =
                2.0 * A.real() + 2.0 * B.real() + del - 2.0 * out.d(2 * j) * out.d(2 * k);
            out.gamma(2 * j + 1, 2 * k + 1) =
                -2.0 * A.real() + 2.0 * B.real() + del -
                2.0 * out.d(2 * j + 1) * out.d(2 * k + 1);
            out.gamma(2 * j, 2 * k + 1) =
                2.0 * A.imag() + 2.0 * B.imag() - 2.0 * out.d(2 * j) * out.d(2 * k + 1);
            out.gamma(2 * j + 1, 2 * k) =
                2.0 * A.imag() - 2.0 * B.imag() - 2.0 * out.d(2 * j + 1) * out.d(2 * k);
        }
    out.gamma = 0.5 * (out.gamma + out.gamma.transpose().eval());

    out.mu = Eigen::VectorXd(m);
    for (int j = 0; j < m; ++j) out.mu(j) = Mad(j, j).real() + 0.5;

    // gamma + i Omega >= 0 up to truncation noise.
    Eigen::MatrixXcd unc = out.gamma.cast<cd>() +
                           cd(0.0, 1.0) * symplectic_form(m).cast<cd>();
    Eigen::SelfAdjointEigenSolver<Mat> es(unc, Eigen::EigenvaluesOnly);
    out.uncertainty_defect = es.eigenvalues().minCoeff();
    if (out.uncertainty_defect < -1e-8)
        throw DegenerateInputError(
            "covariance: gamma + i*Omega indefinite beyond tolerance "
            "(truncation damage)");

    out.nu = williamson(out.gamma).nu;
    return out;
}

}  // namespace focklab
