#include "focklab/lab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "focklab/charfn.hpp"
#include "focklab/fisher.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/metrics.hpp"
#include "focklab/poincare.hpp"

namespace focklab {

double Rng::gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

DensityMatrix random_density(Rng& rng, int nmax, double decay) {
    const int d = nmax + 1;
    Mat G(d, d);
    for (int r = 0; r < d; ++r) {
        double damp = std::exp(-decay * r);
        for (int c = 0; c < d; ++c) G(r, c) = damp * rng.cgauss();
    }
    Mat rho = G * G.adjoint();
    return DensityMatrix(FockCutoff({nmax}), std::move(rho), 0.0);
}

DensityMatrix random_z3_density(Rng& rng, int nmax, double decay) {
    DensityMatrix rho = random_density(rng, nmax, decay);
    const int d = nmax + 1;
    Mat avg = Mat::Zero(d, d);
    for (int k = 0; k < 3; ++k) {
        double theta = 2.0 * std::numbers::pi * k / 3.0;
        Eigen::VectorXcd phase(d);
        for (int n = 0; n < d; ++n) phase(n) = std::polar(1.0, theta * n);
        avg += phase.asDiagonal() * rho.matrix() * phase.conjugate().asDiagonal();
    }
    return DensityMatrix(rho.cutoff(), avg / 3.0, 0.0);
}

DensityMatrix random_centered_pure(Rng& rng, int nmax) {
    std::map<int, cd> amp;
    for (int n = 0; n <= nmax; n += 3) amp[n] = rng.cgauss();
    return build_pure_state(amp, FockCutoff({nmax}));
}

Mat random_hermitian(Rng& rng, int dim) {
    Mat M(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) M(r, c) = rng.cgauss();
    return 0.5 * (M + M.adjoint().eval());
}

Mat random_complex(Rng& rng, int rows, int cols) {
    Mat M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) M(r, c) = rng.cgauss();
    return M;
}

// ---------------------------------------------------------------------------

namespace {

DensityMatrix build_base(const std::variant<PureSpec, ThermalSpec>& spec) {
    if (std::holds_alternative<PureSpec>(spec)) {
        const auto& p = std::get<PureSpec>(spec);
        return build_pure_state(p.amplitudes, FockCutoff(p.cutoff));
    }
    const auto& t = std::get<ThermalSpec>(spec);
    return thermal_product(t.nu, FockCutoff(t.cutoff));
}

}  // namespace

DensityMatrix build_state(const StateSpec& spec) {
    if (std::holds_alternative<MixtureSpec>(spec)) {
        const auto& mix = std::get<MixtureSpec>(spec);
        if (mix.components.empty() || mix.weights.size() != mix.components.size())
            throw ConfigError("mixture: weights and components must match");
        DensityMatrix first = build_base(mix.components[0]);
        Mat acc = mix.weights[0] * first.matrix();
        double tail = mix.weights[0] * first.tail_mass();
        for (std::size_t i = 1; i < mix.components.size(); ++i) {
            DensityMatrix c = build_base(mix.components[i]);
            if (c.cutoff() != first.cutoff())
                throw ConfigError("mixture: components must share a cutoff");
            acc += mix.weights[i] * c.matrix();
            tail += mix.weights[i] * c.tail_mass();
        }
        return DensityMatrix(first.cutoff(), std::move(acc), tail);
    }
    if (std::holds_alternative<PureSpec>(spec))
        return build_base(std::get<PureSpec>(spec));
    return build_base(std::get<ThermalSpec>(spec));
}

std::vector<ConvergenceRecord> run_sweep(const ExperimentConfig& config) {
    DensityMatrix rho = build_state(config.state);
    if (config.n_list.empty()) throw ConfigError("run_sweep: empty n list");
    for (std::size_t i = 1; i < config.n_list.size(); ++i)
        if (config.n_list[i] <= config.n_list[i - 1])
            throw ConfigError("run_sweep: n_list must be strictly ascending");

    CutoffPolicy policy{config.cutoff, config.tail_budget};
    auto selected = [&](const std::string& name) {
        for (const auto& metric : config.metrics)
            if (metric == name) return true;
        return false;
    };

    // Gaussification once, synthesized at the sweep cutoff.
    std::vector<int> gauss_cut(rho.modes(), config.cutoff);
    DensityMatrix rho_g = gaussify_fock(rho, FockCutoff(gauss_cut));

    std::vector<ConvergenceRecord> records;
    for (int n : config.n_list) {
        ConvergenceRecord rec;
        rec.n = n;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ConvolutionReport conv = self_convolve(rho, n, policy);
            rec.tail = conv.discarded_mass;
            const DensityMatrix& sigma = conv.output;
            if (selected("trace")) rec.trace = trace_distance(sigma, rho_g);
            if (selected("hs")) rec.hs = hs_distance(sigma, rho_g);
            if (selected("relent")) rec.relent = relative_entropy(sigma, rho_g);
            if (selected("J")) rec.J = fisher_distance(sigma).total;
            if (selected("lambda")) {
                std::vector<int> gap_cut(rho.modes(),
                                         std::min(config.gap_cutoff, config.cutoff));
                rec.lambda = estimate_gap(sigma, gap_cut).lambda_hat;
            }
        } catch (const TailBudgetError&) {
            rec.tail_aborted = true;
            records.push_back(rec);
            break;
        }
        auto t1 = std::chrono::steady_clock::now();
        rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        records.push_back(rec);
    }
    return records;
}

void write_csv(const std::vector<ConvergenceRecord>& records, std::ostream& os) {
    os << "n,trace,hs,relent,J,tail,ms\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%.12e,%.12e,%.12e,%.12e,%.12e,%.3f\n",
                      r.n, r.trace, r.hs, r.relent, r.J, r.tail, r.ms);
        os << buf;
    }
}

namespace {

double metric_value(const ConvergenceRecord& r, const std::string& metric) {
    if (metric == "trace") return r.trace;
    if (metric == "hs") return r.hs;
    if (metric == "relent") return r.relent;
    if (metric == "J") return r.J;
    if (metric == "lambda") return r.lambda.value_or(0.0);
    throw ConfigError("unknown metric: " + metric);
}

}  // namespace

SlopeFit fit_slope(const std::vector<ConvergenceRecord>& records,
                   const std::string& metric) {
    std::vector<double> xs, ys;
    for (const auto& r : records) {
        if (r.n < 4 || r.tail_aborted) continue;
        double v = metric_value(r, metric);
        if (!(v > 0.0)) continue;
        xs.push_back(std::log(static_cast<double>(r.n)));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 4)
        throw DegenerateInputError("fit_slope: fewer than 4 usable records");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    SlopeFit fit;
    fit.points_used = static_cast<int>(xs.size());
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean_y = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double pred = fit.slope * xs[i] + fit.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::string render_svg(const std::vector<ConvergenceRecord>& records,
                       const std::string& metric) {
    // log-log scatter with slope -1/2 and -1 reference lines.
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records) {
        double v = metric_value(r, metric);
        if (r.n > 0 && v > 0.0) pts.push_back({std::log10(double(r.n)), std::log10(v)});
    }
    std::ostringstream svg;
    const int w = 480, h = 360, margin = 48;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\">\n";
    if (pts.empty()) {
        svg << "<text x=\"20\" y=\"20\">no positive data</text>\n</svg>\n";
        return svg.str();
    }
    double x0 = pts.front().first, x1 = pts.back().first;
    double y0 = 1e300, y1 = -1e300;
    for (auto& p : pts) {
        y0 = std::min(y0, p.second);
        y1 = std::max(y1, p.second);
    }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    auto X = [&](double x) { return margin + (x - x0) / (x1 - x0) * (w - 2 * margin); };
    auto Y = [&](double y) { return h - margin - (y - y0) / (y1 - y0) * (h - 2 * margin); };
    svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
        << w - 2 * margin << "\" height=\"" << h - 2 * margin
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double slope : {-0.5, -1.0}) {
        double ya = pts.front().second, xa = pts.front().first;
        svg << "<line x1=\"" << X(xa) << "\" y1=\"" << Y(ya) << "\" x2=\"" << X(x1)
            << "\" y2=\"" << Y(ya + slope * (x1 - xa))
            << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (auto& p : pts)
        svg << "<circle cx=\"" << X(p.first) << "\" cy=\"" << Y(p.second)
            << "\" r=\"3\" fill=\"#1f6fb2\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << margin - 10 << "\">log10 "
        << metric << " vs log10 n</text>\n</svg>\n";
    return svg.str();
}

std::vector<double> chi_rate_probe(const DensityMatrix& rho,
                                   const std::vector<int>& n_list, cd z) {
    if (rho.modes() != 1)
        throw CutoffViolationError("chi_rate_probe: single mode only");
    GaussianSpec spec = gaussify(rho);
    cd chi_g = gaussian_char_fn(spec, z);
    std::vector<double> out;
    out.reserve(n_list.size());
    for (int n : n_list) {
        double sq = std::sqrt(static_cast<double>(n));
        cd chi_n = std::pow(char_fn(rho, z / sq), n);
        out.push_back(sq * std::abs(chi_n - chi_g));
    }
    return out;
}

// ---------------------------------------------------------------------------
// invariant suite

namespace {

struct Suite {
    std::vector<InvariantEntry> entries;
    void check(const std::string& name, double violation, double threshold) {
        entries.push_back({name, violation, threshold, violation <= threshold});
    }
};

double ccr_interior_defect(int nmax) {
    Mat a = annihilation_matrix(nmax);
    Mat comm = a * a.adjoint() - a.adjoint() * a;
    return (comm.topLeftCorner(nmax, nmax) - Mat::Identity(nmax, nmax))
        .cwiseAbs()
        .maxCoeff();
}

}  // namespace

InvariantReport run_invariant_suite(std::uint64_t seed, int cutoff) {
    Suite s;
    Rng rng(seed);
    const double decay = 0.35;  // keeps seeded states off the cutoff boundary

    // --- Fock core -----------------------------------------------------
    s.check("fock.ccr_interior_block", ccr_interior_defect(12), 1e-12);
    {
        double worst_eig = 0.0, worst_tr = 0.0;
        for (int i = 0; i < 8; ++i) {
            DensityMatrix rho = random_density(rng, cutoff, decay);
            DensityMatrix sig = random_density(rng, cutoff, decay);
            DensityMatrix joint = tensor(rho, sig);
            DensityMatrix back = partial_trace(joint, {0});
            worst_eig = std::max(worst_eig, std::max(0.0, -back.min_eigenvalue()));
            worst_tr = std::max(worst_tr, back.trace_defect());
        }
        s.check("fock.state_psd", worst_eig, 1e-10);
        s.check("fock.state_trace", worst_tr, 1e-10);
    }
    {
        DensityMatrix rho = random_density(rng, cutoff, decay);
        DensityMatrix sig = random_density(rng, cutoff, decay);
        DensityMatrix back = partial_trace(tensor(rho, sig), {0});
        s.check("fock.partial_trace_of_tensor",
                (back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-13);
    }
    {
        // displacement unitarity defect on a fixed window must shrink as the
        // cutoff grows (the boundary column itself never converges)
        cd z(0.7, 0.3);
        const int window = 7;
        double prev = 1e300;
        bool monotone = true;
        for (int N : {10, 16, 28}) {
            Mat D = displacement_matrix(z, N);
            double defect = (D.adjoint() * D - Mat::Identity(N + 1, N + 1))
                                .topLeftCorner(window, window)
                                .cwiseAbs()
                                .maxCoeff();
            if (defect > prev) monotone = false;
            prev = defect;
        }
        s.check("fock.displacement_unitarity_monotone",
                monotone && prev < 1e-10 ? 0.0 : 1.0, 0.5);
    }

    // --- characteristic functions ---------------------------------------
    {
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            DensityMatrix rho = random_density(rng, cutoff, decay);
            for (int j = 0; j < 12; ++j) {
                cd z(2.5 * (rng.uniform() - 0.5), 2.5 * (rng.uniform() - 0.5));
                worst = std::max(worst, std::abs(char_fn(rho, z)) - 1.0);
            }
        }
        s.check("charfn.abs_chi_le_1", worst, 1e-9);
    }
    {
        double worst = 0.0;
        DensityMatrix rho = random_density(rng, cutoff, decay);
        for (int j = 0; j < 12; ++j) {
            cd z(1.5 * (rng.uniform() - 0.5), 1.5 * (rng.uniform() - 0.5));
            worst = std::max(worst,
                             std::abs(char_fn(rho, -z) - std::conj(char_fn(rho, z))));
        }
        s.check("charfn.conjugate_symmetry", worst, 1e-12);
    }
    {
        double worst = 0.0;
        PhaseGrid grid(1, 9.0, 72);
        for (int i = 0; i < 5; ++i) {
            Mat T = random_hermitian(rng, cutoff + 1);
            double direct = (T.adjoint() * T).trace().real();
            double quad = plancherel_hs_norm(T, FockCutoff({cutoff}), grid);
            worst = std::max(worst, std::abs(quad - direct) / std::abs(direct));
        }
        s.check("charfn.plancherel_vs_direct", worst, 1e-3);
    }
    {
        // sup of |chi| outside a ball stays away from 1 for the 0-3 state
        DensityMatrix rho = build_pure_state(
            std::map<int, cd>{{0, 1.0}, {3, 1.0}}, FockCutoff({6}));
        double sup = 0.0;
        for (int i = 0; i < 400; ++i) {
            double r = 0.5 + 5.5 * rng.uniform();
            double phi = 2.0 * std::numbers::pi * rng.uniform();
            sup = std::max(sup, std::abs(char_fn(rho, std::polar(r, phi))));
        }
        s.check("charfn.sup_char_gap", sup, 1.0 - 1e-3);
    }

    // --- gaussian --------------------------------------------------------
    {
        double worst_symp = 0.0, worst_diag = 0.0, worst_nu = 0.0;
        for (int i = 0; i < 6; ++i) {
            int m = 1 + static_cast<int>(rng.uniform() * 2.999);
            Eigen::MatrixXd M(2 * m, 2 * m);
            for (int r = 0; r < 2 * m; ++r)
                for (int c = 0; c < 2 * m; ++c) M(r, c) = rng.gauss();
            Eigen::MatrixXd gamma = M * M.transpose() +
                                    1.2 * Eigen::MatrixXd::Identity(2 * m, 2 * m);
            WilliamsonResult w = williamson(gamma);
            Eigen::MatrixXd omega = symplectic_form(m);
            worst_symp = std::max(
                worst_symp,
                (w.S * omega * w.S.transpose() - omega).cwiseAbs().maxCoeff());
            Eigen::MatrixXd D = w.S * gamma * w.S.transpose();
            for (int j = 0; j < m; ++j) {
                D(2 * j, 2 * j) -= w.nu(j);
                D(2 * j + 1, 2 * j + 1) -= w.nu(j);
            }
            worst_diag = std::max(worst_diag, D.cwiseAbs().maxCoeff());
            // independent oracle: |eigenvalues of i Omega gamma|
            Eigen::MatrixXcd iog =
                cd(0, 1) * (omega * gamma).cast<cd>();
            Eigen::ComplexEigenSolver<Mat> es(iog);
            Eigen::VectorXd abs_eigs = es.eigenvalues().cwiseAbs();
            std::sort(abs_eigs.data(), abs_eigs.data() + abs_eigs.size());
            for (int j = 0; j < m; ++j) {
                double nu_oracle = abs_eigs(2 * j);  // pairs, ascending
                double nu_got = w.nu(m - 1 - j);     // descending order
                worst_nu = std::max(worst_nu, std::abs(nu_oracle - nu_got));
            }
        }
        s.check("gaussian.williamson_symplectic", worst_symp, 1e-8);
        s.check("gaussian.williamson_diagonalizes", worst_diag, 1e-8);
        s.check("gaussian.nu_matches_iOmegaGamma", worst_nu, 1e-8);
    }
    {
        DensityMatrix tau = thermal_state(2.0, 24);
        CovarianceData cov = covariance(tau);
        double worst = (cov.gamma - 2.0 * Eigen::MatrixXd::Identity(2, 2))
                           .cwiseAbs()
                           .maxCoeff();
        s.check("gaussian.thermal_covariance", worst, 1e-8);
    }
    {
        DensityMatrix tau = thermal_state(2.0, 20);
        ConvolutionReport rep = self_convolve(tau, 16, CutoffPolicy{20, 1e-6});
        s.check("gaussian.fixed_point_selfconv",
                trace_distance(rep.output, tau), 10.0 * 1e-6);
    }

    // --- convolution -----------------------------------------------------
    {
        DensityMatrix rho = random_z3_density(rng, cutoff, decay);
        DensityMatrix sig = random_density(rng, cutoff, decay);
        double eta = 0.35;
        ConvolutionReport rep = convolve(rho, sig, eta);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            cd z(2.0 * (rng.uniform() - 0.5), 2.0 * (rng.uniform() - 0.5));
            cd lhs = char_fn(rep.output, z);
            cd rhs = char_fn(rho, std::sqrt(eta) * z) *
                     char_fn(sig, std::sqrt(1.0 - eta) * z);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        s.check("convolve.chi_factorization", worst, 1e-8);

        CovarianceData c_out = covariance(rep.output);
        CovarianceData c_rho = covariance(rho);
        CovarianceData c_sig = covariance(sig);
        double gflow = (c_out.gamma - eta * c_rho.gamma - (1 - eta) * c_sig.gamma)
                           .cwiseAbs()
                           .maxCoeff();
        double dflow = (c_out.d - std::sqrt(eta) * c_rho.d -
                        std::sqrt(1 - eta) * c_sig.d)
                           .cwiseAbs()
                           .maxCoeff();
        s.check("convolve.gamma_flow", gflow, 1e-8);
        s.check("convolve.d_flow", dflow, 1e-8);

        double n_in = moment(rho, 2.0) - 1.0, n_sig = moment(sig, 2.0) - 1.0;
        double n_out = moment(rep.output, 2.0) - 1.0;
        s.check("convolve.photon_number_flow",
                std::abs(n_out - eta * n_in - (1 - eta) * n_sig), 1e-10);

        s.check("convolve.commutation_identity",
                commutator_compat_check(rho, sig, eta), 1e-8);
    }
    {
        DensityMatrix a = random_density(rng, cutoff, decay);
        DensityMatrix b = random_density(rng, cutoff, decay);
        ConvolutionReport ab = convolve(a, b, 0.5);
        ConvolutionReport ba = convolve(b, a, 0.5);
        s.check("convolve.half_symmetric",
                (ab.output.matrix() - ba.output.matrix()).cwiseAbs().maxCoeff(),
                1e-10);
    }
    {
        // phase rotations commute with convolution at the chi level
        DensityMatrix rho = random_density(rng, cutoff, decay);
        DensityMatrix sig = random_density(rng, cutoff, decay);
        double theta = 2.0 * std::numbers::pi * rng.uniform();
        auto rotate = [&](const DensityMatrix& x) {
            const Eigen::Index d = x.matrix().rows();
            Eigen::VectorXcd ph(d);
            for (Eigen::Index n = 0; n < d; ++n)
                ph(n) = std::polar(1.0, theta * static_cast<double>(n));
            Mat r = ph.asDiagonal() * x.matrix() * ph.conjugate().asDiagonal();
            return DensityMatrix(x.cutoff(), std::move(r), x.tail_mass());
        };
        DensityMatrix lhs = rotate(convolve(rho, sig, 0.3).output);
        DensityMatrix rhs = convolve(rotate(rho), rotate(sig), 0.3).output;
        s.check("convolve.passive_commutation",
                (lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    }

    // --- metrics -----------------------------------------------------------
    {
        double worst_pinsker = -1e300, worst_tri = 0.0, worst_order = 0.0;
        double worst_nonneg = 0.0;
        for (int i = 0; i < 6; ++i) {
            DensityMatrix r1 = random_density(rng, cutoff, decay);
            DensityMatrix r2 = random_density(rng, cutoff, decay);
            DensityMatrix r3 = random_density(rng, cutoff, decay);
            double t12 = trace_distance(r1, r2), t13 = trace_distance(r1, r3),
                   t23 = trace_distance(r2, r3);
            worst_tri = std::max(worst_tri, t12 - t13 - t23);
            worst_order = std::max(worst_order, hs_distance(r1, r2) - t12);
            double rel = relative_entropy(r1, r2);
            worst_nonneg = std::max(worst_nonneg, -rel);
            if (std::isfinite(rel))
                worst_pinsker = std::max(worst_pinsker, 0.5 * t12 * t12 - rel);
        }
        s.check("metrics.pinsker", worst_pinsker, 1e-9);
        s.check("metrics.triangle", worst_tri, 1e-9);
        s.check("metrics.hs_le_trace", worst_order, 1e-12);
        s.check("metrics.relent_nonneg", worst_nonneg, 1e-9);
    }

    // --- fisher ------------------------------------------------------------
    {
        double worst_lo = 0.0, worst_hi = 0.0, worst_sa = 0.0, worst_jgap = 0.0;
        double worst_pure = 0.0, worst_jneg = 0.0;
        for (int i = 0; i < 10; ++i) {
            DensityMatrix rho = random_z3_density(rng, cutoff, decay);
            FisherResult I = sld_fisher(rho);
            CovarianceData cov = covariance(rho);
            for (int j = 0; j < rho.modes(); ++j) {
                worst_lo = std::max(worst_lo, 1.0 / cov.mu(j) - I.per_mode(j));
                worst_hi = std::max(worst_hi,
                                    I.per_mode(j) - 4.0 * cov.mu(j) * (1 + 1e-8));
            }
            FisherDistanceResult J = fisher_distance(rho);
            worst_jneg = std::max(worst_jneg, -J.total);
            if (J.norm_form_checked) worst_jgap = std::max(worst_jgap, J.max_form_gap);

            Mat X = random_complex(rng, cutoff + 1, cutoff + 1);
            Mat Y = random_complex(rng, cutoff + 1, cutoff + 1);
            KernelFn zeta = kernels::zeta();
            cd lhs = trace_of_product(X.adjoint().eval(), pi_apply(rho, zeta, Y));
            cd rhs = trace_of_product(pi_apply(rho, zeta, X).adjoint().eval(), Y);
            worst_sa = std::max(worst_sa, std::abs(lhs - rhs));
        }
        for (int i = 0; i < 4; ++i) {
            DensityMatrix v = random_centered_pure(rng, cutoff);
            FisherResult I = sld_fisher(v);
            CovarianceData cov = covariance(v);
            worst_pure = std::max(worst_pure, std::abs(I.total - 4.0 * cov.mu(0)));
        }
        s.check("fisher.sandwich_lower", worst_lo, 1e-8);
        s.check("fisher.sandwich_upper", worst_hi, 1e-8);
        s.check("fisher.pi_self_adjoint", worst_sa, 1e-10);
        s.check("fisher.j_two_forms", worst_jgap, 1e-6);
        s.check("fisher.j_nonneg", worst_jneg, 1e-9);
        s.check("fisher.pure_saturation", worst_pure, 1e-8);
    }
    {
        // Pi kernel monotonicity: zeta <= 2(x+y) pointwise
        double worst = 0.0;
        for (int i = 0; i < 6; ++i) {
            DensityMatrix rho = random_density(rng, cutoff, decay);
            Mat X = random_complex(rng, cutoff + 1, cutoff + 1);
            KernelFn z = kernels::zeta();
            KernelFn big{[](double x, double y) { return 2.0 * (x + y); }, "2(x+y)"};
            double lo = trace_of_product(X.adjoint().eval(), pi_apply(rho, z, X)).real();
            double hi = trace_of_product(X.adjoint().eval(), pi_apply(rho, big, X)).real();
            worst = std::max(worst, lo - hi);
        }
        s.check("fisher.kernel_monotonicity", worst, 1e-9);
    }
    {
        // kernel comparison on a common footing: kmb and the zeta sum are
        // both evaluated on the truncated space itself
        auto zeta_sum = [](const DensityMatrix& rho) {
            Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
            Mat at = es.eigenvectors().adjoint() *
                     annihilation(rho.cutoff(), 0).matrix * es.eigenvectors();
            double acc = 0.0;
            for (Eigen::Index k = 0; k < at.rows(); ++k)
                for (Eigen::Index l = 0; l < at.cols(); ++l) {
                    double x = std::max(0.0, es.eigenvalues()(k));
                    double y = std::max(0.0, es.eigenvalues()(l));
                    if (x + y <= kKernelMaskTol) continue;
                    acc += 2.0 * (x - y) * (x - y) / (x + y) * std::norm(at(k, l));
                }
            return acc;
        };
        double worst = 0.0;
        for (int i = 0; i < 6; ++i) {
            DensityMatrix z3 = random_z3_density(rng, cutoff, decay);
            worst = std::max(worst, zeta_sum(z3) - kmb_fisher(z3));
        }
        s.check("fisher.kmb_dominates_sld", worst, 1e-9);
    }

    // --- poincare ------------------------------------------------------------
    {
        DensityMatrix tau = thermal_state(2.0, 12);
        GapEstimate g1 = estimate_gap(tau);
        s.check("poincare.lambda_nonneg", std::max(0.0, -g1.lambda_hat), 1e-9);
        s.check("poincare.thermal_value", std::abs(g1.lambda_hat - 1.0), 0.02);
        GapEstimate g2 = estimate_gap(thermal_state(2.0, 24));
        s.check("poincare.cutoff_stability",
                std::abs(g2.lambda_hat - g1.lambda_hat) /
                    std::max(g1.lambda_hat, 1e-12),
                0.05);
        double ray = std::abs(g1.lambda_hat * sld_norm_sq(tau, g1.gap_operator) -
                              gradient_norm(tau, g1.gap_operator));
        s.check("poincare.rayleigh_consistency", ray, 1e-8);
        s.check("poincare.deflation_residual", g1.deflation_residual, 1e-8);
    }

    // --- J contraction (reported with the smoothed-lambda caveat) -----------
    {
        DensityMatrix rho = build_pure_state(
            std::map<int, cd>{{0, 1.0}, {3, 1.0}}, FockCutoff({3}));
        GapEstimate gap = estimate_gap(rho, std::vector<int>{14});
        double lam = gap.lambda_hat;
        double J1 = 7.5, I1 = 8.0;
        CutoffPolicy policy{40, 1e-8};
        double worst = -1e300, prev = J1 + 1e-12;
        double worst_mono = 0.0;
        for (int n : {2, 4, 8, 16}) {
            ConvolutionReport conv = self_convolve(rho, n, policy);
            double Jn = fisher_distance(conv.output).total;
            double bound = J1 / (1.0 + lam * (n - 1) / (4.0 * I1));
            worst = std::max(worst, Jn - bound);
            worst_mono = std::max(worst_mono, Jn - prev);
            prev = Jn;
        }
        s.check("lab.j_contraction_smoothed_lambda", worst, 0.0);
        s.check("lab.j_series_monotone", worst_mono, 1e-10);
    }

    InvariantReport report;
    report.entries = s.entries;
    std::ostringstream os;
    char buf[160];
    for (const auto& e : report.entries) {
        if (!e.pass) report.all_pass = false;
        std::snprintf(buf, sizeof buf, "[%s] %-42s violation %.3e (tol %.3e)\n",
                      e.pass ? "PASS" : "FAIL", e.name.c_str(), e.violation,
                      e.threshold);
        os << buf;
    }
    os << (report.all_pass ? "all invariants pass\n" : "INVARIANT FAILURES\n");
    report.text = os.str();
    return report;
}

}  // namespace focklab
