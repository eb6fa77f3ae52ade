#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "focklab/charfn.hpp"
#include "focklab/convolve.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/lab.hpp"
#include "focklab/metrics.hpp"
#include "test_helpers.hpp"

using namespace focklab;
namespace ft = focklab::testing;

TEST_CASE("williamson normal form") {
    SUBCASE("already diagonal") {
        Eigen::MatrixXd gamma = 3.0 * Eigen::MatrixXd::Identity(2, 2);
        WilliamsonResult w = williamson(gamma);
        CHECK(ft::close(w.nu(0), 3.0, 1e-12));
        Eigen::MatrixXd D = w.S * gamma * w.S.transpose();
        CHECK((D - 3.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
              1e-10);
    }
    SUBCASE("squeezed diagonal gamma = diag(4, 1)") {
        Eigen::MatrixXd gamma(2, 2);
        gamma << 4.0, 0.0, 0.0, 1.0;
        WilliamsonResult w = williamson(gamma);
        CHECK(ft::close(w.nu(0), 2.0, 1e-12));
        Eigen::MatrixXd D = w.S * gamma * w.S.transpose();
        CHECK((D - 2.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
              1e-10);
        CHECK(ft::close(w.S.determinant(), 1.0, 1e-12));
    }
    SUBCASE("random two-mode round trip") {
        Rng rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            // build gamma = S0 diag(nu) S0^T from a random symplectic S0
            // (exponential of a Hamiltonian matrix Omega * symmetric)
            int m = 2;
            Eigen::MatrixXd sym(2 * m, 2 * m);
            for (int r = 0; r < 2 * m; ++r)
                for (int c = 0; c < 2 * m; ++c) sym(r, c) = 0.3 * rng.gauss();
            sym = (0.5 * (sym + sym.transpose())).eval();
            Eigen::MatrixXd gen = symplectic_form(m) * sym;
            Eigen::MatrixXd S0 = gen.exp();
            Eigen::VectorXd nu_in(m);
            nu_in << 1.0 + 2.5 * rng.uniform(), 1.0 + 2.5 * rng.uniform();
            std::sort(nu_in.data(), nu_in.data() + m,
                      [](double a, double b) { return a > b; });
            Eigen::VectorXd diag(2 * m);
            for (int j = 0; j < m; ++j) diag(2 * j) = diag(2 * j + 1) = nu_in(j);
            Eigen::MatrixXd gamma = S0 * diag.asDiagonal() * S0.transpose();

            WilliamsonResult w = williamson(gamma);
            for (int j = 0; j < m; ++j)
                CHECK(ft::close(w.nu(j), nu_in(j), 1e-8));
            Eigen::MatrixXd omega = symplectic_form(m);
            CHECK((w.S * omega * w.S.transpose() - omega).cwiseAbs().maxCoeff() <
                  1e-8);
            Eigen::MatrixXd D = w.S * gamma * w.S.transpose();
            for (int j = 0; j < m; ++j) {
                D(2 * j, 2 * j) -= w.nu(j);
                D(2 * j + 1, 2 * j + 1) -= w.nu(j);
            }
            CHECK(D.cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("rejects indefinite input") {
        Eigen::MatrixXd bad(2, 2);
        bad << 1.0, 0.0, 0.0, -0.5;
        CHECK_THROWS_AS(williamson(bad), DegenerateInputError);
    }
}

TEST_CASE("thermal states") {
    DensityMatrix vac = thermal_state(1.0, 5);
    CHECK(vac.matrix()(0, 0) == cd(1.0));
    CHECK(vac.tail_mass() == 0.0);

    DensityMatrix tau3 = thermal_state(3.0, 30);
    for (int n = 0; n <= 5; ++n)
        CHECK(ft::close(tau3.matrix()(n, n).real(), ft::thermal_weight(3.0, n), 1e-9));

    DensityMatrix tau = thermal_state(2.5, 50);
    CHECK(ft::close(expectation(tau, number_operator(tau.cutoff(), 0)).real(),
                    (2.5 - 1.0) / 2.0, 1e-9));

    CHECK_THROWS_AS(thermal_state(0.5, 5), DegenerateInputError);
}

TEST_CASE("gaussify") {
    DensityMatrix ex = ft::example_state();
    GaussianSpec spec = gaussify(ex);
    CHECK(spec.d.cwiseAbs().maxCoeff() < 1e-13);
    CHECK((spec.gamma - 4.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK(ft::close(spec.nu(0), 4.0, 1e-10));
    CHECK(ft::close(spec.beta(0), std::log(5.0 / 3.0), 1e-10));

    DensityMatrix synth = gaussify_fock(ex, FockCutoff({40}));
    DensityMatrix tau4 = thermal_state(4.0, 40);
    CHECK((synth.matrix() - tau4.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    // Gaussification of a Gaussian is itself
    DensityMatrix tau = thermal_state(2.0, 40);
    DensityMatrix again = gaussify_fock(tau, tau.cutoff());
    CHECK(trace_distance(tau, again) < 1e-8);

    // mixed diagonal state: tr(rho a^dag a) = 1/2 so nu = 2
    FockCutoff cut({6});
    Mat mix = Mat::Zero(7, 7);
    mix(0, 0) = 0.5;
    mix(1, 1) = 0.5;
    DensityMatrix half(cut, std::move(mix), 0.0);
    DensityMatrix synth2 = gaussify_fock(half, FockCutoff({30}));
    DensityMatrix tau2 = thermal_state(2.0, 30);
    CHECK(trace_distance(synth2, tau2) < 1e-12);

    // displaced or rotated frames are refused for synthesis
    std::map<int, cd> amp{{0, 1.0}, {1, 0.7}};
    DensityMatrix displaced = build_pure_state(amp, cut);
    CHECK_THROWS_AS(gaussify_fock(displaced), UnsupportedFrameError);
}

TEST_CASE("gaussian characteristic function") {
    DensityMatrix vac = vacuum_state(FockCutoff({3}));
    GaussianSpec sv = gaussify(vac);
    for (cd z : {cd(0.5, 0.1), cd(-0.4, 0.9)})
        CHECK(ft::close(gaussian_char_fn(sv, z), cd(std::exp(-0.5 * std::norm(z))),
                        1e-12));

    GaussianSpec se = gaussify(ft::example_state());
    for (cd z : {cd(0.5, 0.1), cd(0.2, -0.6)})
        CHECK(ft::close(gaussian_char_fn(se, z), cd(std::exp(-2.0 * std::norm(z))),
                        1e-10));

    // Fock-side oracle across nu
    for (double nu : {1.0, 2.0, 4.0}) {
        DensityMatrix tau = thermal_state(nu, 80);
        GaussianSpec st = gaussify(tau);
        Rng rng(17);
        for (int i = 0; i < 10; ++i) {
            cd z(2.0 * (rng.uniform() - 0.5), 2.0 * (rng.uniform() - 0.5));
            CHECK(ft::close(gaussian_char_fn(st, z), char_fn(tau, z), 1e-8));
        }
    }
}

TEST_CASE("thermal self convolution is a fixed point") {
    DensityMatrix tau = thermal_state(2.0, 24);
    CutoffPolicy policy{24, 1e-6};
    ConvolutionReport rep = self_convolve(tau, 16, policy);
    CHECK(trace_distance(rep.output, tau) <= 10.0 * 1e-6);
}
