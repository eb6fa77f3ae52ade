#include "focklab/convolve.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>

#include <Eigen/SVD>

namespace focklab {

Mat beam_splitter_block(double theta, int n_total) {
    const int d = n_total + 1;
    // Generator G = theta (a^dag b - a b^dag) on span{|k, N-k>}: real
    // antisymmetric tridiagonal. Exponentiate through the Hermitian iG.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k + 1 <= n_total; ++k) {
        double t = theta * std::sqrt(static_cast<double>((k + 1) * (n_total - k)));
        G(k + 1, k) = t;   // a^dag b : |k, N-k> -> |k+1, N-k-1>
        G(k, k + 1) = -t;  // -a b^dag
    }
    Mat iG = cd(0.0, 1.0) * G.cast<cd>();
    Eigen::SelfAdjointEigenSolver<Mat> es(iG);
    Mat U = es.eigenvectors() *
            (cd(0.0, -1.0) * es.eigenvalues().cast<cd>().array()).exp().matrix().asDiagonal() *
            es.eigenvectors().adjoint();
    return U;
}

const BeamSplitterBlocks& beam_splitter(double eta, int n_total) {
    if (eta < 0.0 || eta > 1.0)
        throw DegenerateInputError("beam_splitter: eta must be in [0, 1]");
    struct Key {
        std::uint64_t eta_bits;
        int n;
        bool operator<(const Key& o) const {
            return eta_bits != o.eta_bits ? eta_bits < o.eta_bits : n < o.n;
        }
    };
    static std::mutex mu;
    static std::map<Key, BeamSplitterBlocks> cache;

    std::uint64_t bits;
    std::memcpy(&bits, &eta, sizeof bits);
    Key key{bits, n_total};

    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    BeamSplitterBlocks blocks{eta, n_total, {}};
    double theta = std::acos(std::min(1.0, std::sqrt(eta)));
    blocks.blocks.reserve(n_total + 1);
    for (int N = 0; N <= n_total; ++N)
        blocks.blocks.push_back(beam_splitter_block(theta, N));
    return cache.emplace(key, std::move(blocks)).first->second;
}

namespace {

// Single mode pair, exact: out(k, k') = sum_{N, N'} [U_N B U_N'^dag](k, k')
// restricted to equal second-mode occupation. B is supported on the at most
// (N2+1) x (N2+1) window set by sigma's cutoff, which keeps this cheap even
// when T is large.
Mat convolve_pair(const Mat& T, int n1, const Mat& sigma, int n2, double eta) {
    const int n_out = n1 + n2;
    const BeamSplitterBlocks& bs = beam_splitter(eta, n_out);
    Mat out = Mat::Zero(n_out + 1, n_out + 1);
    for (int N = 0; N <= n_out; ++N) {
        int ka_lo = std::max(0, N - n2), ka_hi = std::min(n1, N);
        if (ka_lo > ka_hi) continue;
        const Mat& UN = bs.blocks[N];
        for (int Np = 0; Np <= n_out; ++Np) {
            int kb_lo = std::max(0, Np - n2), kb_hi = std::min(n1, Np);
            if (kb_lo > kb_hi) continue;
            const Mat& UNp = bs.blocks[Np];
            Mat B(ka_hi - ka_lo + 1, kb_hi - kb_lo + 1);
            for (int ka = ka_lo; ka <= ka_hi; ++ka)
                for (int kb = kb_lo; kb <= kb_hi; ++kb)
                    B(ka - ka_lo, kb - kb_lo) = T(ka, kb) * sigma(N - ka, Np - kb);
            Mat Y = UN.middleCols(ka_lo, B.rows()) * B *
                    UNp.middleCols(kb_lo, B.cols()).adjoint();
            // keep entries with equal residual photon number l = N-k = Np-k'
            int delta = Np - N;  // k' - k
            for (int k = 0; k <= N; ++k) {
                int kp = k + delta;
                if (kp < 0 || kp > Np) continue;
                out(k, kp) += Y(k, kp);
            }
        }
    }
    return out;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Multimode path: pad each pair mode to the joint total so every occupied
// block is complete, build the dense product of per-pair unitaries.
Mat convolve_multimode(const Mat& T, const FockCutoff& cutoff_T,
                       const DensityMatrix& sigma, double eta) {
    const int m = cutoff_T.modes();
    std::vector<int> joint_cut;  // subsystem 1 modes then subsystem 2 modes
    std::vector<int> totals(m);
    for (int j = 0; j < m; ++j)
        totals[j] = cutoff_T.max_photons(j) + sigma.cutoff().max_photons(j);
    for (int j = 0; j < m; ++j) joint_cut.push_back(totals[j]);
    for (int j = 0; j < m; ++j) joint_cut.push_back(totals[j]);
    FockCutoff joint(joint_cut);

    // Embed T (x) sigma into the padded joint space.
    FockCutoff plain_joint([&] {
        std::vector<int> c = cutoff_T.per_mode();
        for (int j = 0; j < m; ++j) c.push_back(sigma.cutoff().max_photons(j));
        return c;
    }());
    Mat X_small = kron(T, sigma.matrix());
    Mat X = Mat::Zero(joint.dim(), joint.dim());
    std::vector<std::size_t> map(plain_joint.dim());
    for (std::size_t i = 0; i < plain_joint.dim(); ++i)
        map[i] = joint.flatten(plain_joint.unflatten(i));
    for (std::size_t i = 0; i < plain_joint.dim(); ++i)
        for (std::size_t j = 0; j < plain_joint.dim(); ++j)
            X(map[i], map[j]) = X_small(i, j);

    // U = prod_j U_pair(j, m+j); assemble dense. Both pair modes are padded
    // to totals[j], so per-pair totals reach 2 totals[j] in the joint basis.
    Mat U = Mat::Identity(joint.dim(), joint.dim());
    for (int j = 0; j < m; ++j) {
        const BeamSplitterBlocks& bs = beam_splitter(eta, 2 * totals[j]);
        Mat Uj = Mat::Zero(joint.dim(), joint.dim());
        for (std::size_t r = 0; r < joint.dim(); ++r) {
            std::vector<int> ro = joint.unflatten(r);
            for (std::size_t c = 0; c < joint.dim(); ++c) {
                std::vector<int> co = joint.unflatten(c);
                bool match = true;
                for (int jj = 0; jj < 2 * m && match; ++jj)
                    if (jj != j && jj != m + j && ro[jj] != co[jj]) match = false;
                if (!match) continue;
                int N = ro[j] + ro[m + j];
                if (co[j] + co[m + j] != N) continue;
                Uj(r, c) = bs.blocks[N](ro[j], co[j]);
            }
        }
        U = (Uj * U).eval();
    }
    Mat Y = U * X * U.adjoint();
    std::vector<int> keep(m);
    for (int j = 0; j < m; ++j) keep[j] = j;
    return partial_trace_matrix(Y, joint, keep);
}

}  // namespace

Mat convolve_operator(const Mat& T, const FockCutoff& cutoff_T,
                      const DensityMatrix& sigma, double eta) {
    if (cutoff_T.modes() != sigma.modes())
        throw CutoffViolationError("convolve: mode count mismatch");
    if (eta < 0.0 || eta > 1.0)
        throw DegenerateInputError("convolve: eta must be in [0, 1]");
    if (cutoff_T.modes() == 1)
        return convolve_pair(T, cutoff_T.max_photons(0), sigma.matrix(),
                             sigma.cutoff().max_photons(0), eta);
    return convolve_multimode(T, cutoff_T, sigma, eta);
}

ConvolutionReport convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                           double eta) {
    Mat out = convolve_operator(rho.matrix(), rho.cutoff(), sigma, eta);
    std::vector<int> out_cut(rho.modes());
    for (int j = 0; j < rho.modes(); ++j)
        out_cut[j] = rho.cutoff().max_photons(j) + sigma.cutoff().max_photons(j);
    DensityMatrix state(FockCutoff(out_cut), std::move(out),
                        rho.tail_mass() + sigma.tail_mass());
    ConvolutionReport report{std::move(state), 0.0, {{eta, out_cut, 0.0}}};
    return report;
}

ConvolutionReport convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                           double eta, const CutoffPolicy& policy) {
    ConvolutionReport report = convolve(rho, sigma, eta);
    std::vector<int> capped(rho.modes());
    bool needs_cap = false;
    for (int j = 0; j < rho.modes(); ++j) {
        capped[j] = std::min(report.output.cutoff().max_photons(j), policy.n_max);
        if (capped[j] != report.output.cutoff().max_photons(j)) needs_cap = true;
    }
    if (needs_cap) {
        double discarded = 0.0;
        report.output = truncate_to(report.output, FockCutoff(capped), &discarded);
        report.discarded_mass += discarded;
        report.steps.back().discarded = discarded;
        report.steps.back().joint_cutoff = capped;
        if (report.discarded_mass > policy.tail_budget)
            throw TailBudgetError("convolve: discarded mass exceeds tail budget", 1);
    }
    return report;
}

ConvolutionReport self_convolve(const DensityMatrix& rho, int n,
                                const CutoffPolicy& policy) {
    if (n < 1) throw DegenerateInputError("self_convolve: n must be >= 1");
    CutoffPolicy uncapped{policy.n_max,
                          std::numeric_limits<double>::infinity()};
    ConvolutionReport report{rho, 0.0, {}};
    for (int k = 2; k <= n; ++k) {
        double eta = 1.0 - 1.0 / static_cast<double>(k);
        ConvolutionReport step = convolve(report.output, rho, eta, uncapped);
        report.output = std::move(step.output);
        report.discarded_mass += step.discarded_mass;
        ConvolveStep s = step.steps.back();
        s.eta = eta;
        report.steps.push_back(std::move(s));
        if (report.discarded_mass > policy.tail_budget)
            throw TailBudgetError("self_convolve: tail budget exceeded", k);
    }
    return report;
}

double commutator_compat_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                               double eta) {
    const int m = rho.modes();
    // One level of padding makes [a_j, rho] exact for the truncated rho.
    std::vector<int> padded = rho.cutoff().per_mode();
    for (int& c : padded) ++c;
    FockCutoff pad_cut(padded);
    DensityMatrix rho_pad = pad_to(rho, pad_cut);

    ConvolutionReport conv = convolve(rho, sigma, eta);
    std::vector<int> out_padded = conv.output.cutoff().per_mode();
    for (int& c : out_padded) ++c;
    FockCutoff out_pad_cut(out_padded);
    DensityMatrix out_pad = pad_to(conv.output, out_pad_cut);

    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
        Mat a_in = annihilation(pad_cut, j).matrix;
        Mat comm_rho = a_in * rho_pad.matrix() - rho_pad.matrix() * a_in;
        Mat lhs_inner = convolve_operator(comm_rho, pad_cut, sigma, eta);

        Mat a_out = annihilation(out_pad_cut, j).matrix;
        Mat rhs = std::sqrt(eta) *
                  (a_out * out_pad.matrix() - out_pad.matrix() * a_out);

        // lhs lives on cutoff (N_rho+1) + N_sigma = rhs cutoff; same space.
        Mat diff = rhs - lhs_inner;
        Eigen::BDCSVD<Mat> svd(diff);
        worst = std::max(worst, svd.singularValues().sum());
    }
    return worst;
}

}  // namespace focklab
