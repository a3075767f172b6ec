#include <doctest.h>

#include "hma/geometry.hpp"

using namespace hma;

TEST_CASE("unit ball volumes and sphere areas") {
    CHECK(unit_ball_volume(0) == doctest::Approx(1.0));
    CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
    CHECK(unit_ball_volume(4) == doctest::Approx(M_PI * M_PI / 2.0));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * M_PI));
    CHECK(sphere_area(4) == doctest::Approx(2.0 * M_PI * M_PI));
    CHECK(sphere_area(1) == doctest::Approx(2.0));
    // recursion omega_m = (2 pi / m) omega_{m-2}
    for (int m = 2; m <= 12; ++m)
        CHECK(unit_ball_volume(m) ==
              doctest::Approx(2.0 * M_PI / m * unit_ball_volume(m - 2)).epsilon(1e-14));
}

TEST_CASE("index coefficients") {
    CHECK(coefficient_c(1, 1, 0) == doctest::Approx(1.0));
    CHECK(multinomial(1, 1, 0) == doctest::Approx(1.0));
    CHECK(coefficient_c(2, 2, 1) == doctest::Approx(1.0));
    CHECK(multinomial(2, 2, 1) == doctest::Approx(2.0));
    CHECK(coefficient_c(2, 3, 1) == doctest::Approx(1.0));
    CHECK(multinomial(2, 3, 1) == doctest::Approx(2.0));
    CHECK_THROWS_AS(coefficient_c(2, 3, 0), IndexDomainError);
}

TEST_CASE("q ranges") {
    CHECK(valid_q_range(2, 2) == std::vector<int>{0, 1});
    CHECK(valid_q_range(1, 2) == std::vector<int>{1});
    CHECK(valid_q_range(2, 3) == std::vector<int>{1});
    CHECK_THROWS_AS(valid_q_range(2, 5), IndexDomainError);
    for (int n = 1; n <= 3; ++n)
        for (int k = 0; k <= 2 * n; ++k) {
            const auto qs = valid_q_range(n, k);
            CHECK(!qs.empty());
            const bool has_zero = std::find(qs.begin(), qs.end(), 0) != qs.end();
            CHECK(has_zero == (k <= n));
        }
}

TEST_CASE("model subspaces") {
    const ModelSubspace E21 = model_subspace(2, 2, 1);
    CHECK(E21.basis.col(0)(0) == 1.0);  // x_1
    CHECK(E21.basis.col(1)(1) == 1.0);  // y_1
    const ModelSubspace E20 = model_subspace(2, 2, 0);
    CHECK(E20.basis.col(0)(0) == 1.0);  // x_1
    CHECK(E20.basis.col(1)(2) == 1.0);  // x_2
    const ModelSubspace E31 = model_subspace(2, 3, 1);
    CHECK(E31.basis.col(2)(2) == 1.0);  // x_2
    // J-structure: first 2q columns closed under J, rest orthogonal to J-image
    const Eigen::MatrixXd J = complex_structure(2);
    const Eigen::MatrixXd twist = J * E21.basis.col(0);
    CHECK((twist - E21.basis.col(1)).norm() == doctest::Approx(0.0));
}

TEST_CASE("complex structure") {
    for (int n : {1, 2, 3}) {
        const Eigen::MatrixXd J = complex_structure(n);
        CHECK((J * J + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((J.transpose() * J - Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() <
              1e-15);
    }
}

TEST_CASE("haar unitaries") {
    for (int n : {1, 2, 3}) {
        const Eigen::MatrixXd J = complex_structure(n);
        for (std::uint64_t seed : {1ull, 7ull, 41ull}) {
            const Eigen::MatrixXd M = haar_unitary(n, seed);
            CHECK((M.transpose() * M - Eigen::MatrixXd::Identity(2 * n, 2 * n))
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
            CHECK((M * J - J * M).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(M.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        }
        // determinism
        CHECK((haar_unitary(n, 5) - haar_unitary(n, 5)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((haar_unitary(n, 5) - haar_unitary(n, 6)).cwiseAbs().maxCoeff() > 1e-3);
    }
}
