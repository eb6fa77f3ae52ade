#include <doctest.h>

#include <numbers>

#include "focklab/charfn.hpp"
#include "focklab/convolve.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/lab.hpp"
#include "focklab/metrics.hpp"
#include "test_helpers.hpp"

using namespace focklab;
namespace ft = focklab::testing;

TEST_CASE("beam splitter blocks") {
    SUBCASE("eta = 1 gives identity blocks") {
        const BeamSplitterBlocks& bs = beam_splitter(1.0, 5);
        for (int N = 0; N <= 5; ++N)
            CHECK((bs.blocks[N] - Mat::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff() <
                  1e-14);
    }
    SUBCASE("blocks are unitary") {
        const BeamSplitterBlocks& bs = beam_splitter(0.37, 9);
        for (int N = 0; N <= 9; ++N)
            CHECK((bs.blocks[N] * bs.blocks[N].adjoint() -
                   Mat::Identity(N + 1, N + 1))
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
    }
    SUBCASE("N = 1 block pins the generator convention") {
        // basis |k, N-k| = {|0,1>, |1,0>}; |1,0> -> (|1,0> - |0,1>)/sqrt2
        const BeamSplitterBlocks& bs = beam_splitter(0.5, 1);
        const Mat& U = bs.blocks[1];
        double s = 1.0 / std::sqrt(2.0);
        CHECK(ft::close(U(1, 1), cd(s), 1e-12));
        CHECK(ft::close(U(0, 1), cd(-s), 1e-12));
        CHECK(ft::close(U(1, 0), cd(s), 1e-12));
        CHECK(ft::close(U(0, 0), cd(s), 1e-12));
    }
    SUBCASE("conjugation recovers the annihilation mixing on interior blocks") {
        // dense pair-space U on (N, N) from the blocks; compare
        // U a1 U^dag with sqrt(eta) a1 - sqrt(1-eta) a2 away from the boundary
        int N = 10;
        double eta = 0.31;
        FockCutoff pair({N, N});
        const BeamSplitterBlocks& bs = beam_splitter(eta, 2 * N);
        Mat U = Mat::Zero(pair.dim(), pair.dim());
        for (std::size_t r = 0; r < pair.dim(); ++r) {
            auto ro = pair.unflatten(r);
            for (std::size_t c = 0; c < pair.dim(); ++c) {
                auto co = pair.unflatten(c);
                if (ro[0] + ro[1] != co[0] + co[1]) continue;
                U(r, c) = bs.blocks[ro[0] + ro[1]](ro[0], co[0]);
            }
        }
        Mat a1 = annihilation(pair, 0).matrix;
        Mat a2 = annihilation(pair, 1).matrix;
        Mat lhs = U * a1 * U.adjoint();
        Mat rhs = std::sqrt(eta) * a1 - std::sqrt(1.0 - eta) * a2;
        // restrict to matrix elements between total photon number <= N-1
        double worst = 0.0;
        for (std::size_t r = 0; r < pair.dim(); ++r)
            for (std::size_t c = 0; c < pair.dim(); ++c) {
                if (pair.total_photons(r) > N - 1 || pair.total_photons(c) > N - 1)
                    continue;
                worst = std::max(worst, std::abs(lhs(r, c) - rhs(r, c)));
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("binary convolution") {
    DensityMatrix vac = vacuum_state(FockCutoff({3}));
    ConvolutionReport vv = convolve(vac, vac, 0.7);
    CHECK(ft::close(vv.output.matrix()(0, 0), cd(1.0), 1e-14));

    // |1><1| boxplus_{1/2} |0><0| = (|0><0| + |1><1|)/2
    DensityMatrix one =
        build_pure_state(std::map<int, cd>{{1, 1.0}}, FockCutoff({2}));
    ConvolutionReport mix = convolve(one, vacuum_state(FockCutoff({2})), 0.5);
    CHECK(ft::close(mix.output.matrix()(0, 0), cd(0.5), 1e-13));
    CHECK(ft::close(mix.output.matrix()(1, 1), cd(0.5), 1e-13));
    CHECK(std::abs(mix.output.matrix()(2, 2)) < 1e-13);

    SUBCASE("chi factorization at sampled points") {
        Rng rng(31);
        DensityMatrix rho = random_density(rng, 5, 0.2);
        DensityMatrix sig = random_density(rng, 4, 0.2);
        double eta = 0.63;
        ConvolutionReport rep = convolve(rho, sig, eta);
        for (int i = 0; i < 50; ++i) {
            cd z(2.4 * (rng.uniform() - 0.5), 2.4 * (rng.uniform() - 0.5));
            cd lhs = char_fn(rep.output, z);
            cd rhs = char_fn(rho, std::sqrt(eta) * z) *
                     char_fn(sig, std::sqrt(1 - eta) * z);
            CHECK(std::abs(lhs - rhs) < 1e-8);
        }
    }

    SUBCASE("two-mode states convolve exactly as well") {
        Rng rng(37);
        DensityMatrix a1 = random_density(rng, 2, 0.0);
        DensityMatrix a2 = random_density(rng, 2, 0.0);
        DensityMatrix b1 = random_density(rng, 2, 0.0);
        DensityMatrix b2 = random_density(rng, 2, 0.0);
        DensityMatrix rho = tensor(a1, a2), sig = tensor(b1, b2);
        double eta = 0.41;
        ConvolutionReport rep = convolve(rho, sig, eta);
        CHECK(rep.output.modes() == 2);
        for (int i = 0; i < 12; ++i) {
            std::vector<cd> z{
                cd(1.4 * (rng.uniform() - 0.5), 1.4 * (rng.uniform() - 0.5)),
                cd(1.4 * (rng.uniform() - 0.5), 1.4 * (rng.uniform() - 0.5))};
            cd lhs = char_fn(rep.output, z);
            std::vector<cd> ze{std::sqrt(eta) * z[0], std::sqrt(eta) * z[1]};
            std::vector<cd> zo{std::sqrt(1 - eta) * z[0], std::sqrt(1 - eta) * z[1]};
            cd rhs = char_fn(rho, ze) * char_fn(sig, zo);
            CHECK(std::abs(lhs - rhs) < 1e-8);
        }
    }
}

TEST_CASE("self convolution") {
    DensityMatrix ex = ft::example_state();
    ConvolutionReport one = self_convolve(ex, 1);
    CHECK((one.output.matrix() - ex.matrix()).cwiseAbs().maxCoeff() == 0.0);

    SUBCASE("thermal fixed point") {
        DensityMatrix tau = thermal_state(3.0, 24);
        ConvolutionReport rep = self_convolve(tau, 12, CutoffPolicy{24, 1e-5});
        CHECK(trace_distance(rep.output, tau) < 10.0 * 1e-5);
    }

    SUBCASE("chi power law") {
        DensityMatrix ex48 = ft::example_state();
        for (int n : {2, 3, 5}) {
            ConvolutionReport rep = self_convolve(ex48, n, CutoffPolicy{48, 1e-8});
            Rng rng(41);
            for (int i = 0; i < 12; ++i) {
                cd z(2.0 * (rng.uniform() - 0.5), 2.0 * (rng.uniform() - 0.5));
                cd lhs = char_fn(rep.output, z);
                cd rhs = std::pow(char_fn(ex48, z / std::sqrt(double(n))), n);
                CHECK(std::abs(lhs - rhs) < 1e-6);
            }
        }
    }

    SUBCASE("tail budget abort carries the step") {
        DensityMatrix tau = thermal_state(6.0, 12);
        try {
            self_convolve(tau, 24, CutoffPolicy{12, 1e-12});
            FAIL("expected TailBudgetError");
        } catch (const TailBudgetError& e) {
            CHECK(e.step >= 1);
        }
    }
}

TEST_CASE("argument validation") {
    DensityMatrix vac1 = vacuum_state(FockCutoff({3}));
    DensityMatrix vac2 = vacuum_state(FockCutoff({3, 3}));
    CHECK_THROWS_AS(convolve(vac1, vac2, 0.5), CutoffViolationError);
    CHECK_THROWS_AS(convolve(vac1, vac1, 1.5), DegenerateInputError);
    CHECK_THROWS_AS(beam_splitter(-0.1, 4), DegenerateInputError);
    CHECK_THROWS_AS(self_convolve(vac1, 0), DegenerateInputError);
}

TEST_CASE("commutation identity residual") {
    DensityMatrix vac = vacuum_state(FockCutoff({3}));
    CHECK(commutator_compat_check(vac, vac, 0.5) < 1e-12);

    DensityMatrix ex = ft::example_state();
    CHECK(commutator_compat_check(ex, vac, 0.5) < 1e-8);

    DensityMatrix t2 = thermal_state(2.0, 14);
    DensityMatrix t4 = thermal_state(4.0, 14);
    CHECK(commutator_compat_check(t2, t4, 0.3) < 1e-8 + 10 * (t2.tail_mass() +
                                                              t4.tail_mass()));
}

TEST_CASE("moment flow and symmetry") {
    Rng rng(43);
    DensityMatrix rho = random_z3_density(rng, 6, 0.3);
    DensityMatrix sig = random_z3_density(rng, 6, 0.3);
    double eta = 0.23;
    ConvolutionReport rep = convolve(rho, sig, eta);

    CovarianceData c_out = covariance(rep.output);
    CovarianceData c_rho = covariance(rho);
    CovarianceData c_sig = covariance(sig);
    CHECK((c_out.gamma - eta * c_rho.gamma - (1 - eta) * c_sig.gamma)
              .cwiseAbs()
              .maxCoeff() < 1e-8);
    CHECK((c_out.d - std::sqrt(eta) * c_rho.d - std::sqrt(1 - eta) * c_sig.d)
              .cwiseAbs()
              .maxCoeff() < 1e-8);

    SUBCASE("displaced states carry the d flow") {
        // displace the vacuum by conjugating with the closed-form D matrix
        cd alpha(0.35, -0.2);
        FockCutoff cut({14});
        Mat D = displacement_matrix(alpha, 14);
        Mat disp = D * vacuum_state(cut).matrix() * D.adjoint();
        DensityMatrix coherent(cut, std::move(disp), 0.0);
        CovarianceData cv = covariance(coherent);
        CHECK(ft::close(cv.d(0), std::sqrt(2.0) * alpha.real(), 1e-9));
        CHECK(ft::close(cv.d(1), std::sqrt(2.0) * alpha.imag(), 1e-9));

        ConvolutionReport rep2 = convolve(coherent, vacuum_state(cut), 0.4);
        CovarianceData c2 = covariance(rep2.output);
        CHECK((c2.d - std::sqrt(0.4) * cv.d).cwiseAbs().maxCoeff() < 1e-8);
    }

    ConvolutionReport ab = convolve(rho, sig, 0.5);
    ConvolutionReport ba = convolve(sig, rho, 0.5);
    CHECK((ab.output.matrix() - ba.output.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("photon number conservation through the splitter") {
    Rng rng(47);
    DensityMatrix rho = random_z3_density(rng, 5, 0.2);
    DensityMatrix sig = random_z3_density(rng, 5, 0.2);
    double eta = 0.77;
    ConvolutionReport rep = convolve(rho, sig, eta);
    double n_out = moment(rep.output, 2.0) - 1.0;
    double n_in_rho = moment(rho, 2.0) - 1.0;
    double n_in_sig = moment(sig, 2.0) - 1.0;
    CHECK(ft::close(n_out, eta * n_in_rho + (1 - eta) * n_in_sig, 1e-12));
}
