#include <doctest.h>

#include "focklab/fock.hpp"
#include "test_helpers.hpp"

using namespace focklab;
namespace ft = focklab::testing;

TEST_CASE("pure state construction") {
    FockCutoff cut({3});

    DensityMatrix vac = build_pure_state(std::map<int, cd>{{0, 1.0}}, cut);
    CHECK(std::abs(vac.matrix()(0, 0) - cd(1.0)) < 1e-15);
    CHECK(vac.tail_mass() == 0.0);

    DensityMatrix ex = ft::example_state();
    CHECK(ft::close(ex.matrix()(0, 0), cd(0.5), 1e-15));
    CHECK(ft::close(ex.matrix()(0, 3), cd(0.5), 1e-15));
    CHECK(ft::close(ex.matrix()(3, 0), cd(0.5), 1e-15));
    CHECK(ft::close(ex.matrix()(3, 3), cd(0.5), 1e-15));
    CHECK(ft::close(ex.matrix()(1, 1), cd(0.0), 1e-15));

    // normalization is scale invariant
    DensityMatrix scaled =
        build_pure_state(std::map<int, cd>{{0, 2.0}, {3, 2.0}}, cut);
    CHECK((scaled.matrix() - ex.matrix()).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(build_pure_state(std::map<int, cd>{{7, 1.0}}, cut),
                    CutoffViolationError);
    CHECK_THROWS_AS(build_pure_state(std::map<int, cd>{{0, 0.0}}, cut),
                    DegenerateInputError);
}

TEST_CASE("annihilation operator matrix elements") {
    FockCutoff cut({2});
    ModeOperator a = annihilation(cut, 0);
    CHECK(a.matrix(0, 1) == cd(1.0));
    CHECK(ft::close(a.matrix(1, 2), cd(std::sqrt(2.0)), 1e-15));
    CHECK(a.matrix.cwiseAbs().sum() ==
          doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));

    // CCR on the interior block
    Mat comm = a.matrix * a.matrix.adjoint() - a.matrix.adjoint() * a.matrix;
    CHECK((comm.topLeftCorner(2, 2) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-14);

    // a kills the vacuum
    CHECK(a.matrix.col(0).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(annihilation(cut, 2), CutoffViolationError);
}

TEST_CASE("displacement matrix closed form") {
    SUBCASE("z = 0 is the identity") {
        Mat D = displacement_matrix(cd(0.0, 0.0), 5);
        CHECK((D - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("vacuum matrix elements") {
        cd z(0.37, -0.21);
        Mat D = displacement_matrix(z, 12);
        CHECK(ft::close(D(0, 0), std::exp(-0.5 * std::norm(z)), 1e-14));
        CHECK(ft::close(D(1, 0), z * std::exp(-0.5 * std::norm(z)), 1e-14));
    }
    SUBCASE("unitarity improves with the cutoff") {
        // Monitored on a fixed window: the last column of a truncated D
        // always spills past the cutoff (a displaced |N> has weight above
        // N for every N), so convergence is entrywise, not in norm.
        cd z(0.7, 0.3);
        const int window = 7;
        double prev = 1e9;
        for (int N : {10, 16, 28}) {
            Mat D = displacement_matrix(z, N);
            Mat defect_mat = D.adjoint() * D - Mat::Identity(N + 1, N + 1);
            double defect =
                defect_mat.topLeftCorner(window, window).cwiseAbs().maxCoeff();
            CHECK(defect < prev);
            prev = defect;
        }
        CHECK(prev < 1e-10);
    }
    SUBCASE("matches the truncated exponential on a padded space") {
        // independent oracle: exponentiate z a^dag - conj(z) a at a much
        // larger cutoff and compare the top-left corner
        cd z(0.4, 0.25);
        int big = 40, small = 6;
        Mat a = annihilation_matrix(big);
        Mat gen = z * a.adjoint() - std::conj(z) * a;
        Eigen::SelfAdjointEigenSolver<Mat> es(cd(0, 1) * gen);
        Mat expgen = es.eigenvectors() *
                     (cd(0, -1) * es.eigenvalues().cast<cd>().array())
                         .exp()
                         .matrix()
                         .asDiagonal() *
                     es.eigenvectors().adjoint();
        Mat D = displacement_matrix(z, small);
        CHECK((expgen.topLeftCorner(small + 1, small + 1) -
               D.topLeftCorner(small + 1, small + 1))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("tensor and partial trace") {
    FockCutoff cut({2});
    DensityMatrix vac = vacuum_state(cut);
    DensityMatrix two = tensor(vac, vac);
    CHECK(two.modes() == 2);
    CHECK(two.matrix()(0, 0) == cd(1.0));
    CHECK(std::abs(two.matrix().trace() - cd(1.0)) < 1e-15);

    DensityMatrix tau = thermal_state(2.0, 4);
    DensityMatrix prod = tensor(tau, tau);
    for (int n1 = 0; n1 <= 4; ++n1)
        for (int n2 = 0; n2 <= 4; ++n2) {
            std::size_t i = prod.cutoff().flatten(std::vector<int>{n1, n2});
            double direct = tau.matrix()(n1, n1).real() * tau.matrix()(n2, n2).real();
            CHECK(ft::close(prod.matrix()(i, i).real(), direct, 1e-14));
        }

    DensityMatrix back = partial_trace(prod, {0});
    CHECK((back.matrix() - tau.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(back.matrix().trace() - cd(1.0)) < 1e-13);

    // reduced state of (|1,0> - |0,1>)/sqrt2 is maximally mixed on {|0>,|1>}
    DensityMatrix bell = build_pure_state(
        std::map<std::vector<int>, cd>{{{1, 0}, 1.0}, {{0, 1}, -1.0}},
        FockCutoff({1, 1}));
    DensityMatrix red = partial_trace(bell, {0});
    CHECK(ft::close(red.matrix()(0, 0), cd(0.5), 1e-15));
    CHECK(ft::close(red.matrix()(1, 1), cd(0.5), 1e-15));
    CHECK(std::abs(red.matrix()(0, 1)) < 1e-15);

    CHECK_THROWS_AS(partial_trace(prod, {}), DegenerateInputError);
}

TEST_CASE("expectation values") {
    DensityMatrix ex = ft::example_state();
    FockCutoff cut = ex.cutoff();
    CHECK(ft::close(expectation(ex, number_operator(cut, 0)), cd(1.5), 1e-14));
    CHECK(std::abs(expectation(ex, annihilation(cut, 0))) < 1e-15);

    DensityMatrix tau = thermal_state(3.0, 40);
    CHECK(ft::close(expectation(tau, number_operator(tau.cutoff(), 0)),
                    cd((3.0 - 1.0) / 2.0), 1e-10));

    DensityMatrix other = vacuum_state(FockCutoff({5}));
    CHECK_THROWS_AS(expectation(other, number_operator(cut, 0)),
                    CutoffViolationError);
}

TEST_CASE("dimension ceiling guards") {
    DensityMatrix tau = thermal_state(2.0, 40);
    // 41^2 = 1681 fits, but a tiny explicit ceiling must refuse
    CHECK_THROWS_AS(tensor(tau, tau, /*ceiling=*/1000), DimensionCeilingError);
    CHECK_THROWS_AS(FockCutoff({100, 100, 100}, 10000), DimensionCeilingError);
}

TEST_CASE("pad and truncate bookkeeping") {
    DensityMatrix tau = thermal_state(2.0, 12);
    DensityMatrix padded = pad_to(tau, FockCutoff({20}));
    CHECK(padded.tail_mass() == tau.tail_mass());
    CHECK(ft::close(padded.matrix()(3, 3).real(), tau.matrix()(3, 3).real(), 1e-14));

    double discarded = 0.0;
    DensityMatrix cut = truncate_to(tau, FockCutoff({4}), &discarded);
    CHECK(discarded > 0.0);
    CHECK(cut.tail_mass() >= tau.tail_mass() + discarded - 1e-15);
    CHECK(std::abs(cut.matrix().trace() - cd(1.0)) < 1e-13);
}
