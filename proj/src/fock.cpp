#include "focklab/fock.hpp"

#include <cmath>
#include <numeric>

namespace focklab {

FockCutoff::FockCutoff(std::vector<int> per_mode, std::size_t ceiling)
    : per_mode_(std::move(per_mode)) {
    if (per_mode_.empty())
        throw DegenerateInputError("FockCutoff: need at least one mode");
    dim_ = 1;
    for (int n : per_mode_) {
        if (n < 1)
            throw DegenerateInputError("FockCutoff: max photon number must be >= 1");
        dim_ *= static_cast<std::size_t>(n) + 1;
        if (dim_ > ceiling)
            throw DimensionCeilingError("FockCutoff: total dimension exceeds ceiling");
    }
}

std::size_t FockCutoff::flatten(std::span<const int> occupation) const {
    if (occupation.size() != per_mode_.size())
        throw CutoffViolationError("flatten: wrong number of modes");
    std::size_t idx = 0;
    for (int j = 0; j < modes(); ++j) {
        int n = occupation[j];
        if (n < 0 || n > per_mode_[j])
            throw CutoffViolationError("flatten: index beyond cutoff");
        idx = idx * (per_mode_[j] + 1) + static_cast<std::size_t>(n);
    }
    return idx;
}

std::vector<int> FockCutoff::unflatten(std::size_t index) const {
    std::vector<int> occ(per_mode_.size());
    for (int j = modes() - 1; j >= 0; --j) {
        std::size_t base = static_cast<std::size_t>(per_mode_[j]) + 1;
        occ[j] = static_cast<int>(index % base);
        index /= base;
    }
    return occ;
}

int FockCutoff::occupation(std::size_t index, int mode) const {
    for (int j = modes() - 1; j > mode; --j)
        index /= static_cast<std::size_t>(per_mode_[j]) + 1;
    return static_cast<int>(index % (static_cast<std::size_t>(per_mode_[mode]) + 1));
}

int FockCutoff::total_photons(std::size_t index) const {
    int total = 0;
    for (int j = modes() - 1; j >= 0; --j) {
        std::size_t base = static_cast<std::size_t>(per_mode_[j]) + 1;
        total += static_cast<int>(index % base);
        index /= base;
    }
    return total;
}

DensityMatrix::DensityMatrix(FockCutoff cutoff, Mat entries, double tail_mass)
    : cutoff_(std::move(cutoff)), rho_(std::move(entries)), tail_mass_(tail_mass) {
    if (rho_.rows() != static_cast<Eigen::Index>(cutoff_.dim()) ||
        rho_.cols() != rho_.rows())
        throw DegenerateInputError("DensityMatrix: entries do not match cutoff dimension");
    // Keep eigensolvers on the symmetric path.
    rho_ = 0.5 * (rho_ + rho_.adjoint().eval());
    double tr = rho_.real().trace();
    if (!(tr > 0.0))
        throw DegenerateInputError("DensityMatrix: nonpositive trace");
    rho_ /= tr;
    if (tail_mass_ < 0.0) tail_mass_ = 0.0;
}

double DensityMatrix::hermiticity_defect() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityMatrix::trace_defect() const {
    return std::abs(rho_.trace() - cd(1.0, 0.0));
}

Mat annihilation_matrix(int nmax) {
    Mat a = Mat::Zero(nmax + 1, nmax + 1);
    for (int n = 1; n <= nmax; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

namespace {

// L_q^{(alpha)}(x) for q = 0..qmax via the three-term recurrence.
std::vector<double> laguerre_column(int alpha, double x, int qmax) {
    std::vector<double> L(qmax + 1);
    L[0] = 1.0;
    if (qmax >= 1) L[1] = 1.0 + alpha - x;
    for (int k = 1; k < qmax; ++k)
        L[k + 1] = ((2.0 * k + 1.0 + alpha - x) * L[k] - (k + alpha) * L[k - 1]) / (k + 1.0);
    return L;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// kron(I, ..., op at `mode`, ..., I) respecting the mode-0-slowest layout.
Mat embed_single_mode(const Mat& op, const FockCutoff& cutoff, int mode) {
    Mat out = Mat::Identity(1, 1);
    for (int j = 0; j < cutoff.modes(); ++j) {
        if (j == mode)
            out = kron(out, op);
        else
            out = kron(out, Mat::Identity(cutoff.max_photons(j) + 1,
                                          cutoff.max_photons(j) + 1));
    }
    return out;
}

}  // namespace

Mat displacement_matrix(cd z, int nmax) {
    int d = nmax + 1;
    if (std::abs(z) == 0.0) return Mat::Identity(d, d);
    double x = std::norm(z);
    double pref = std::exp(-0.5 * x);
    Mat D(d, d);
    // Lower triangle (p >= q): walk the subdiagonals alpha = p - q.
    for (int alpha = 0; alpha < d; ++alpha) {
        std::vector<double> L = laguerre_column(alpha, x, d - 1);
        cd zpow = std::pow(z, alpha);
        for (int q = 0; q + alpha < d; ++q) {
            int p = q + alpha;
            // sqrt(q!/p!) = 1/sqrt((q+1)...(p))
            double fac = 1.0;
            for (int k = q + 1; k <= p; ++k) fac /= std::sqrt(static_cast<double>(k));
            D(p, q) = pref * zpow * fac * L[q];
        }
    }
    // p < q via D_z^dagger = D_{-z}: <p|D_z|q> = conj(<q|D_{-z}|p>).
    for (int alpha = 1; alpha < d; ++alpha) {
        cd zpow = std::pow(-z, alpha);
        std::vector<double> L = laguerre_column(alpha, x, d - 1);
        for (int p = 0; p + alpha < d; ++p) {
            int q = p + alpha;
            double fac = 1.0;
            for (int k = p + 1; k <= q; ++k) fac /= std::sqrt(static_cast<double>(k));
            D(p, q) = std::conj(pref * zpow * fac * L[p]);
        }
    }
    return D;
}

ModeOperator annihilation(const FockCutoff& cutoff, int mode) {
    if (mode < 0 || mode >= cutoff.modes())
        throw CutoffViolationError("annihilation: mode out of range");
    Mat a = embed_single_mode(annihilation_matrix(cutoff.max_photons(mode)), cutoff, mode);
    return {cutoff, std::move(a), OperatorKind::annihilation, mode};
}

ModeOperator creation(const FockCutoff& cutoff, int mode) {
    ModeOperator a = annihilation(cutoff, mode);
    a.matrix = a.matrix.adjoint().eval();
    a.kind = OperatorKind::creation;
    return a;
}

ModeOperator number_operator(const FockCutoff& cutoff, int mode) {
    ModeOperator a = annihilation(cutoff, mode);
    a.matrix = (a.matrix.adjoint() * a.matrix).eval();
    a.kind = OperatorKind::number;
    return a;
}

ModeOperator displacement(std::span<const cd> z, const FockCutoff& cutoff) {
    if (static_cast<int>(z.size()) != cutoff.modes())
        throw CutoffViolationError("displacement: z has wrong mode count");
    Mat D = Mat::Identity(1, 1);
    for (int j = 0; j < cutoff.modes(); ++j)
        D = kron(D, displacement_matrix(z[j], cutoff.max_photons(j))).eval();
    return {cutoff, std::move(D), OperatorKind::displacement, -1};
}

DensityMatrix build_pure_state(const std::map<std::vector<int>, cd>& amplitudes,
                               const FockCutoff& cutoff) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff.dim());
    for (const auto& [occ, amp] : amplitudes)
        v(static_cast<Eigen::Index>(cutoff.flatten(occ))) = amp;
    double norm = v.norm();
    if (norm <= 0.0)
        throw DegenerateInputError("build_pure_state: zero amplitude vector");
    v /= norm;
    return DensityMatrix(cutoff, v * v.adjoint(), 0.0);
}

DensityMatrix build_pure_state(const std::map<int, cd>& amplitudes,
                               const FockCutoff& cutoff) {
    if (cutoff.modes() != 1)
        throw CutoffViolationError("build_pure_state: single-mode overload needs one mode");
    std::map<std::vector<int>, cd> multi;
    for (const auto& [n, amp] : amplitudes) multi[{n}] = amp;
    return build_pure_state(multi, cutoff);
}

DensityMatrix vacuum_state(const FockCutoff& cutoff) {
    Mat rho = Mat::Zero(cutoff.dim(), cutoff.dim());
    rho(0, 0) = 1.0;
    return DensityMatrix(cutoff, std::move(rho), 0.0);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b, std::size_t ceiling) {
    std::vector<int> per_mode = a.cutoff().per_mode();
    per_mode.insert(per_mode.end(), b.cutoff().per_mode().begin(),
                    b.cutoff().per_mode().end());
    FockCutoff joint(per_mode, ceiling);
    return DensityMatrix(joint, kron(a.matrix(), b.matrix()),
                         a.tail_mass() + b.tail_mass());
}

Mat partial_trace_matrix(const Mat& joint, const FockCutoff& cutoff,
                         const std::vector<int>& keep) {
    if (keep.empty()) throw DegenerateInputError("partial_trace: empty keep set");
    std::vector<int> kept_cut;
    std::vector<char> is_kept(cutoff.modes(), 0);
    for (int j : keep) {
        if (j < 0 || j >= cutoff.modes())
            throw CutoffViolationError("partial_trace: mode out of range");
        is_kept[j] = 1;
        kept_cut.push_back(cutoff.max_photons(j));
    }
    FockCutoff out_cut(kept_cut);
    Mat out = Mat::Zero(out_cut.dim(), out_cut.dim());

    std::size_t d = cutoff.dim();
    std::vector<std::size_t> kept_index(d), traced_index(d);
    std::size_t traced_dim = 1;
    for (int j = 0; j < cutoff.modes(); ++j)
        if (!is_kept[j]) traced_dim *= static_cast<std::size_t>(cutoff.max_photons(j)) + 1;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<int> occ = cutoff.unflatten(i);
        std::size_t ik = 0, it = 0;
        for (int j = 0; j < cutoff.modes(); ++j) {
            if (is_kept[j])
                ik = ik * (cutoff.max_photons(j) + 1) + static_cast<std::size_t>(occ[j]);
            else
                it = it * (cutoff.max_photons(j) + 1) + static_cast<std::size_t>(occ[j]);
        }
        kept_index[i] = ik;
        traced_index[i] = it;
    }
    (void)traced_dim;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (traced_index[i] == traced_index[j])
                out(kept_index[i], kept_index[j]) += joint(i, j);
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    std::vector<int> kept_cut;
    for (int j : keep) kept_cut.push_back(rho.cutoff().max_photons(j));
    Mat out = partial_trace_matrix(rho.matrix(), rho.cutoff(), keep);
    return DensityMatrix(FockCutoff(kept_cut), std::move(out), rho.tail_mass());
}

cd expectation(const DensityMatrix& rho, const ModeOperator& X) {
    if (rho.cutoff() != X.cutoff)
        throw CutoffViolationError("expectation: cutoff mismatch");
    return trace_of_product(rho.matrix(), X.matrix);
}

cd trace_of_product(const Mat& a, const Mat& b) {
    return (a.transpose().cwiseProduct(b)).sum();
}

DensityMatrix pad_to(const DensityMatrix& rho, const FockCutoff& target) {
    if (target.modes() != rho.modes())
        throw CutoffViolationError("pad_to: mode count mismatch");
    for (int j = 0; j < target.modes(); ++j)
        if (target.max_photons(j) < rho.cutoff().max_photons(j))
            throw CutoffViolationError("pad_to: target cutoff smaller than source");
    Mat out = Mat::Zero(target.dim(), target.dim());
    std::size_t d = rho.dim();
    std::vector<std::size_t> map(d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<int> occ = rho.cutoff().unflatten(i);
        map[i] = target.flatten(occ);
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out(map[i], map[j]) = rho.matrix()(i, j);
    return DensityMatrix(target, std::move(out), rho.tail_mass());
}

DensityMatrix truncate_to(const DensityMatrix& rho, const FockCutoff& target,
                          double* discarded) {
    if (target.modes() != rho.modes())
        throw CutoffViolationError("truncate_to: mode count mismatch");
    Mat out = Mat::Zero(target.dim(), target.dim());
    std::size_t d = rho.dim();
    std::vector<std::ptrdiff_t> map(d, -1);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<int> occ = rho.cutoff().unflatten(i);
        bool inside = true;
        for (int j = 0; j < target.modes(); ++j)
            if (occ[j] > target.max_photons(j)) inside = false;
        if (inside) map[i] = static_cast<std::ptrdiff_t>(target.flatten(occ));
    }
    double dropped = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        if (map[i] < 0) {
            dropped += rho.matrix()(i, i).real();
            continue;
        }
        for (std::size_t j = 0; j < d; ++j)
            if (map[j] >= 0) out(map[i], map[j]) = rho.matrix()(i, j);
    }
    if (discarded) *discarded = dropped;
    return DensityMatrix(target, std::move(out), rho.tail_mass() + dropped);
}

FockCutoff common_cutoff(const FockCutoff& a, const FockCutoff& b) {
    if (a.modes() != b.modes())
        throw CutoffViolationError("common_cutoff: mode count mismatch");
    std::vector<int> per_mode(a.modes());
    for (int j = 0; j < a.modes(); ++j)
        per_mode[j] = std::max(a.max_photons(j), b.max_photons(j));
    return FockCutoff(per_mode);
}

}  // namespace focklab
