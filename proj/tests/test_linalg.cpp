#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lfdd/errors.hpp"
#include "lfdd/linalg.hpp"
#include "support.hpp"

using namespace lfdd;

TEST_SUITE("linalg") {

Eigen::MatrixXd random_symmetric(test::Rng& rng, int n) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
    return a;
}

TEST_CASE("symmetric_eigen agrees with Eigen's self-adjoint solver") {
    test::Rng rng(11);
    for (int n : {1, 2, 3, 7, 40, 120}) {
        const Eigen::MatrixXd a = random_symmetric(rng, n);
        const SymmetricEigen ours = symmetric_eigen(a);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        CHECK((ours.values - ref.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12 * scale * n);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        CHECK((ours.vectors.transpose() * ours.vectors - id).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((a * ours.vectors - ours.vectors * ours.values.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-11 * scale * n);
        for (int i = 0; i + 1 < n; ++i) CHECK(ours.values(i) <= ours.values(i + 1));
    }
}

TEST_CASE("symmetric_eigen handles repeated and zero eigenvalues") {
    const Eigen::MatrixXd d = Eigen::Vector4d(2.0, 0.0, 2.0, -1.0).asDiagonal();
    const SymmetricEigen e = symmetric_eigen(d);
    CHECK(e.values(0) == doctest::Approx(-1.0));
    CHECK(e.values(1) == doctest::Approx(0.0));
    CHECK(e.values(2) == doctest::Approx(2.0));
    CHECK(e.values(3) == doctest::Approx(2.0));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    CHECK((e.vectors.transpose() * e.vectors - id).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("banded Cholesky matches a dense solve") {
    test::Rng rng(12);
    const int n = 60, bw = 8;
    BandedMatrix band(n, bw);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - bw); j < i; ++j) {
            const double x = rng.normal();
            band.add(i, j, x);
            band.add(j, i, x);
            dense(i, j) = dense(j, i) = x;
        }
        band.add(i, i, 40.0);
        dense(i, i) = 40.0;
    }
    CHECK(band.max_asymmetry() == 0.0);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = rng.normal();
    const Eigen::VectorXd x = band.solve_spd(b);
    const Eigen::VectorXd ref = dense.llt().solve(b);
    CHECK((x - ref).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((band.multiply(x) - b).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("banded matrix errors") {
    BandedMatrix band(5, 1);
    CHECK_THROWS_AS(band.add(0, 3, 1.0), InputError);
    band.add(0, 0, -1.0);
    for (int i = 1; i < 5; ++i) band.add(i, i, 1.0);
    CHECK_THROWS_AS(band.solve_spd(Eigen::VectorXd::Ones(5)), NumericalError);
}

}  // TEST_SUITE
