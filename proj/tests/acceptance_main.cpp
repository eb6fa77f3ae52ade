// Acceptance suite: every criterion runs at its stated tolerance and prints
// one PASS/FAIL line. The process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <vector>

#include "focklab/charfn.hpp"
#include "focklab/convolve.hpp"
#include "focklab/fisher.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/lab.hpp"
#include "focklab/metrics.hpp"
#include "focklab/poincare.hpp"

using namespace focklab;

namespace {

int g_failures = 0;

void report(int criterion, const char* label, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", criterion,
                label, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    va_list args;
    va_start(args, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

DensityMatrix example_state() {
    return build_pure_state(std::map<int, cd>{{0, 1.0}, {3, 1.0}}, FockCutoff({3}));
}

// ---------------------------------------------------------------------------

void criterion_1_and_3() {
    // trace-distance rate (slope -0.5 +- 0.1, R2 >= 0.99) and entropic rate
    // (slope -1.0 +- 0.15, R2 >= 0.98) on the same sweep:
    // cutoff 48, tail budget 1e-8, n in {4, 8, 16, 32, 64}.
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    PureSpec p;
    p.cutoff = {3};
    p.amplitudes[{0}] = 1.0;
    p.amplitudes[{3}] = 1.0;
    cfg.state = p;
    cfg.n_list = {4, 8, 16, 32, 64};
    cfg.cutoff = 48;
    cfg.tail_budget = 1e-8;
    std::vector<ConvergenceRecord> recs = run_sweep(cfg);
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();

    bool aborted = false;
    for (const auto& r : recs) aborted = aborted || r.tail_aborted;

    SlopeFit ft = fit_slope(recs, "trace");
    bool ok1 = !aborted && std::abs(ft.slope + 0.5) <= 0.1 && ft.r2 >= 0.99 &&
               secs < 300.0;
    report(1, "trace-distance rate",
           ok1, fmt("slope %.4f (want -0.5 +- 0.1), R2 %.5f, %.1fs", ft.slope,
                    ft.r2, secs));

    SlopeFit fe = fit_slope(recs, "relent");
    bool ok3 = !aborted && std::abs(fe.slope + 1.0) <= 0.15 && fe.r2 >= 0.98;
    report(3, "relative-entropy rate",
           ok3, fmt("slope %.4f (want -1.0 +- 0.15), R2 %.5f", fe.slope, fe.r2));

    if (!ok1 || !ok3) {
        // Diagnostic only: the n = 4 and n = 8 points are pre-asymptotic for
        // this state (the convolution output is still far from Gaussian
        // there), which is what drags the stated window off the rate. The
        // same sweep restricted to its asymptotic regime recovers the rates;
        // the criterion above is still scored on the stated window.
        ExperimentConfig deep = cfg;
        deep.n_list = {16, 32, 64, 128, 256};
        deep.cutoff = 64;
        deep.tail_budget = 1e-7;
        std::vector<ConvergenceRecord> recs2 = run_sweep(deep);
        SlopeFit ft2 = fit_slope(recs2, "trace");
        SlopeFit fe2 = fit_slope(recs2, "relent");
        std::printf(
            "       info: asymptotic window n in {16..256}: trace slope %.4f "
            "(R2 %.5f), relent slope %.4f (R2 %.5f)\n",
            ft2.slope, ft2.r2, fe2.slope, fe2.r2);
    }
}

void criterion_2() {
    // chi-level optimality at z = i, analytic chi only.
    DensityMatrix ex = example_state();
    double target = std::exp(-2.0) / std::sqrt(6.0);
    std::vector<double> at256 = chi_rate_probe(ex, {256}, cd(0.0, 1.0));
    bool ok = std::abs(at256[0] - target) <= 0.1 * target;

    double min_scaled = 1e300;
    for (int n : {64, 96, 128, 192, 256, 384, 512, 1024, 2048, 4096}) {
        std::vector<double> v = chi_rate_probe(ex, {n}, cd(0.0, 1.0));
        min_scaled = std::min(min_scaled, v[0]);
    }
    ok = ok && min_scaled >= 0.02;
    report(2, "chi-level optimality", ok,
           fmt("sqrt(n)|dchi(i)| at n=256: %.6f (target %.6f +-10%%), min over "
               "n>=64: %.4f (floor 0.02)",
               at256[0], target, min_scaled));
}

void criterion_4() {
    // Fisher sandwich and exact values.
    bool ok = true;
    std::string note;

    Rng rng(424242);
    double worst_lo = -1e300, worst_hi = -1e300;
    for (int i = 0; i < 100; ++i) {
        DensityMatrix rho = random_z3_density(rng, 6, 0.25);
        FisherResult I = sld_fisher(rho);
        CovarianceData cov = covariance(rho);
        worst_lo = std::max(worst_lo, 1.0 / cov.mu(0) - I.total);
        worst_hi = std::max(worst_hi, I.total - 4.0 * cov.mu(0) * (1.0 + 1e-8));
    }
    ok = ok && worst_lo <= 0.0 && worst_hi <= 0.0;

    DensityMatrix vac = vacuum_state(FockCutoff({6}));
    DensityMatrix tau2 = thermal_state(2.0, 48);
    DensityMatrix tau4 = thermal_state(4.0, 48);
    DensityMatrix ex = example_state();
    double e1 = std::abs(sld_fisher(vac).total - 2.0);
    double e2 = std::abs(sld_fisher(tau2).total - 1.0);
    double e3 = std::abs(sld_fisher(tau4).total - 0.5);
    double e4 = std::abs(sld_fisher(ex).total - 8.0);
    double e5 = std::abs(fisher_distance(ex).total - 7.5);
    double emax = std::max({e1, e2, e3, e4, e5});
    // the sandwich also holds on the named states
    for (const DensityMatrix* s : {&vac, &tau2, &tau4, &ex}) {
        FisherResult I = sld_fisher(*s);
        CovarianceData cov = covariance(*s);
        worst_lo = std::max(worst_lo, 1.0 / cov.mu(0) - I.total);
        worst_hi = std::max(worst_hi, I.total - 4.0 * cov.mu(0) * (1.0 + 1e-8));
    }
    ok = ok && emax <= 1e-6 && worst_lo <= 1e-8 && worst_hi <= 0.0;
    report(4, "Fisher sandwich + values", ok,
           fmt("max lower-bound gap %.2e, upper %.2e, exact-value error %.2e",
               worst_lo, worst_hi, emax));
}

void criterion_5() {
    // J contraction with the smoothed-state gap, plus monotonicity.
    DensityMatrix ex = example_state();
    GapEstimate gap = estimate_gap(ex, std::vector<int>{14});
    double lam = gap.lambda_hat;
    CutoffPolicy policy{48, 1e-8};
    bool ok = lam > 0.0;
    double prev = 7.5 + 1e-12;
    std::string detail = fmt("lambda_hat(smoothed) %.4f;", lam);
    for (int n : {2, 4, 8, 16}) {
        ConvolutionReport conv = self_convolve(ex, n, policy);
        double Jn = fisher_distance(conv.output).total;
        double bound = 7.5 / (1.0 + lam * (n - 1) / (4.0 * 8.0));
        ok = ok && Jn <= bound && Jn <= prev + 1e-10;
        detail += fmt(" J(%d)=%.4f<=%.4f", n, Jn, bound);
        prev = Jn;
    }
    report(5, "J contraction rate bound", ok, detail);
}

void criterion_6() {
    // LSI and the Dirichlet-form vs J comparison on seeded faithful states,
    // each against the thermal state of matching nu; computed on a padded
    // space so the reference tail is negligible.
    Rng rng(777);
    double worst_lsi = -1e300, worst_cj = -1e300;
    int used = 0;
    for (int i = 0; i < 100; ++i) {
        DensityMatrix rho = random_z3_density(rng, 6, 0.25);
        CovarianceData cov = covariance(rho);
        double nu = 2.0 * cov.mu(0);
        if (nu <= 1.0 + 1e-9) continue;
        ++used;
        double beta = nu_to_beta(nu);

        DensityMatrix rho_pad = pad_to(rho, FockCutoff({40}));
        DensityMatrix tau = thermal_state(nu, 40);
        double alpha = lsi_alpha(std::vector<double>{beta}, 1);
        double dirichlet = lsi_dirichlet(rho_pad, std::vector<double>{beta});
        double rel = relative_entropy(rho_pad, tau);
        worst_lsi = std::max(worst_lsi, alpha * rel - dirichlet);

        double q = std::exp(-beta);
        double C = 8.0 * std::exp(-1.5 * beta) / ((1.0 + q) * (1.0 + q));
        double J = fisher_distance(rho).total;
        worst_cj = std::max(worst_cj, C * dirichlet - J);
    }
    bool ok = used == 100 && worst_lsi <= 1e-9 && worst_cj <= 1e-9;
    report(6, "log-Sobolev + Dirichlet vs J", ok,
           fmt("states %d, worst alpha*D - E = %.2e, worst C*E - J = %.2e", used,
               worst_lsi, worst_cj));
}

void criterion_7() {
    bool ok = true;
    std::string detail;
    for (double nu : {1.5, 2.0, 4.0}) {
        GapEstimate g = estimate_gap(thermal_state(nu, 14));
        double lo = 2.0 / (nu + 1.0) - 1e-3;
        double rel = std::abs(g.lambda_hat - 2.0 / nu) / (2.0 / nu);
        ok = ok && g.lambda_hat >= lo && rel <= 0.02;
        detail += fmt("nu=%.1f: %.4f (2/nu %.4f); ", nu, g.lambda_hat, 2.0 / nu);
    }
    auto [before, after] =
        passive_invariance_check(thermal_state(2.0, 12), std::numbers::pi / 5.0);
    ok = ok && std::abs(before - after) <= 1e-6;
    detail += fmt("phase drift %.1e; ", std::abs(before - after));

    Rng rng(99);
    int mono_ok = 0;
    for (int i = 0; i < 10; ++i) {
        DensityMatrix a = random_density(rng, 5, 0.45);
        DensityMatrix b = random_density(rng, 5, 0.45);
        GapEstimate ga = estimate_gap(a);
        GapEstimate gb = estimate_gap(b);
        GapEstimate gc = estimate_gap(convolve(a, b, 0.5).output);
        if (gc.lambda_hat >= std::min(ga.lambda_hat, gb.lambda_hat) * 0.98)
            ++mono_ok;
    }
    ok = ok && mono_ok == 10;
    detail += fmt("convolution monotone %d/10", mono_ok);
    report(7, "Poincare thermal references", ok, detail);
}

void criterion_8() {
    PhaseGrid grid(1, 9.5, 80);
    Rng rng(4096);
    double worst_rel = 0.0;
    for (int i = 0; i < 20; ++i) {
        Mat T = random_hermitian(rng, 7);
        double direct = (T.adjoint() * T).trace().real();
        double quad = plancherel_hs_norm(T, FockCutoff({6}), grid);
        worst_rel = std::max(worst_rel, std::abs(quad - direct) / direct);
    }

    PhaseGrid bgrid(1, 10.0, 88);
    int violations = 0;
    double worst_ratio = 0.0;
    for (int i = 0; i < 20; ++i) {
        Mat T = random_hermitian(rng, 7);
        TraceNormBound b = trace_norm_charfn_bound(T, FockCutoff({6}), bgrid);
        if (b.lhs > b.rhs * (1.0 + 1e-3)) ++violations;
        worst_ratio = std::max(worst_ratio, b.lhs / b.rhs);
    }
    DensityMatrix ex30 = pad_to(example_state(), FockCutoff({30}));
    DensityMatrix tau30 = thermal_state(4.0, 30);
    Mat diff = ex30.matrix() - tau30.matrix();
    TraceNormBound b = trace_norm_charfn_bound(diff, ex30.cutoff(), bgrid);
    if (b.lhs > b.rhs * (1.0 + 1e-3)) ++violations;

    bool ok = worst_rel <= 1e-3 && violations == 0;
    report(8, "Plancherel + trace-norm bound", ok,
           fmt("plancherel worst rel err %.2e, bound violations %d, worst "
               "lhs/rhs %.3f",
               worst_rel, violations, worst_ratio));
}

void criterion_9() {
    Rng rng(31337);
    bool ok = true;
    std::string detail;

    DensityMatrix rho = random_z3_density(rng, 6, 0.3);
    DensityMatrix sig = random_z3_density(rng, 6, 0.3);
    double eta = 0.42;
    ConvolutionReport rep = convolve(rho, sig, eta);
    double worst_chi = 0.0;
    for (int i = 0; i < 50; ++i) {
        cd z(2.2 * (rng.uniform() - 0.5), 2.2 * (rng.uniform() - 0.5));
        cd lhs = char_fn(rep.output, z);
        cd rhs = char_fn(rho, std::sqrt(eta) * z) *
                 char_fn(sig, std::sqrt(1.0 - eta) * z);
        worst_chi = std::max(worst_chi, std::abs(lhs - rhs));
    }
    ok = ok && worst_chi <= 1e-8;
    detail += fmt("chi factorization %.1e; ", worst_chi);

    CovarianceData c_out = covariance(rep.output);
    CovarianceData c_rho = covariance(rho);
    CovarianceData c_sig = covariance(sig);
    double flow =
        std::max((c_out.gamma - eta * c_rho.gamma - (1 - eta) * c_sig.gamma)
                     .cwiseAbs()
                     .maxCoeff(),
                 (c_out.d - std::sqrt(eta) * c_rho.d - std::sqrt(1 - eta) * c_sig.d)
                     .cwiseAbs()
                     .maxCoeff());
    ok = ok && flow <= 1e-8;
    detail += fmt("moment flow %.1e; ", flow);

    double comm = commutator_compat_check(rho, sig, eta);
    ok = ok && comm <= 1e-8;
    detail += fmt("commutation %.1e; ", comm);

    DensityMatrix tau = thermal_state(2.0, 24);
    ConvolutionReport fp = self_convolve(tau, 16, CutoffPolicy{24, 1e-6});
    double fp_dist = trace_distance(fp.output, tau);
    ok = ok && fp_dist <= 10.0 * 1e-6;
    detail += fmt("fixed point %.1e", fp_dist);

    report(9, "convolution algebra", ok, detail);
}

void criterion_10() {
    double worst = -1e300;
    for (double beta : {0.3, 1.0, 3.0})
        worst = std::max(worst, scalar_gh_check(beta, 8.0, 1000));
    bool ok_scalar = worst <= 1e-9;

    Rng rng(515151);
    int cs_violations = 0;
    double worst_cs = 0.0;
    for (int i = 0; i < 50; ++i) {
        DensityMatrix r1 = random_density(rng, 3, 0.0);
        DensityMatrix r2 = random_density(rng, 3, 0.0);
        Mat A = random_complex(rng, 4, 4);
        Mat B = random_complex(rng, 16, 16);
        CauchySchwarzCheck c = cauchy_schwarz_check(r1, r2, A, B);
        if (c.lhs > c.rhs * (1.0 + 1e-9)) ++cs_violations;
        worst_cs = std::max(worst_cs, c.lhs / c.rhs);
    }
    bool ok = ok_scalar && cs_violations == 0;
    report(10, "scalar + Cauchy-Schwarz", ok,
           fmt("grid max C*g - h = %.2e (3 betas x 1e6 pts), CS violations %d, "
               "worst lhs/rhs %.3f",
               worst, cs_violations, worst_cs));
}

}  // namespace

int main() {
    criterion_1_and_3();
    criterion_2();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures == 0)
        std::printf("acceptance: all criteria pass\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
