#include <doctest.h>

#include <random>

#include "hma/convex.hpp"

using namespace hma;

namespace {

// central finite differences
Eigen::VectorXd fd_gradient(const ConvexFunctionSpec& f, const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (int d = 0; d < x.size(); ++d) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
        e(d) = h;
        g(d) = (f.evaluate(x + e) - f.evaluate(x - e)) / (2 * h);
    }
    return g;
}

Eigen::MatrixXd fd_hessian(const ConvexFunctionSpec& f, const Eigen::VectorXd& x, double h) {
    Eigen::MatrixXd H(x.size(), x.size());
    for (int d = 0; d < x.size(); ++d) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
        e(d) = h;
        H.col(d) = (fd_gradient(f, x + e, h) - fd_gradient(f, x - e, h)) / (2 * h);
    }
    return H;
}

}  // namespace

TEST_CASE("quadratic evaluators") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
    auto f = ConvexFunctionSpec::quadratic(A, Eigen::VectorXd::Zero(4), 0.0);
    Eigen::VectorXd x(4);
    x << 1, -2, 0.5, 3;
    CHECK(f.evaluate(x) == doctest::Approx(x.squaredNorm()));
    CHECK((f.gradient(x) - 2 * x).norm() == doctest::Approx(0.0));
    CHECK((f.hessian(x) - 2 * A).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("radial profile chain rule") {
    // h(s) = s + s^2 at |z|^2 = 1: hessian 6I + 8 z z^T
    auto f = ConvexFunctionSpec::radial(4, polynomial_profile({0.0, 1.0, 1.0}));
    Eigen::VectorXd z(4);
    z << 0.5, 0.5, 0.5, 0.5;
    REQUIRE(z.squaredNorm() == doctest::Approx(1.0));
    const Eigen::MatrixXd H = f.hessian(z);
    const Eigen::MatrixXd expect =
        6.0 * Eigen::MatrixXd::Identity(4, 4) + 8.0 * z * z.transpose();
    CHECK((H - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("derivatives match finite differences on smooth families") {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<ConvexFunctionSpec> specs;
    specs.push_back(ConvexFunctionSpec::radial(4, polynomial_profile({0.0, 1.0, 0.25})));
    specs.push_back(ConvexFunctionSpec::smoothed_cone(4, 0.5, 0.3));
    {
        Eigen::MatrixXd M(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) M(r, c) = U(eng);
        specs.push_back(ConvexFunctionSpec::quadratic(M * M.transpose() * 0.5,
                                                      Eigen::VectorXd::Zero(4), 0.3));
    }
    specs.push_back(ConvexFunctionSpec::sum({specs[0], specs[1]}));
    specs.push_back(ConvexFunctionSpec::scale(1.7, specs[0]));
    {
        Eigen::VectorXd v(4);
        v << 0.1, -0.2, 0.3, 0.4;
        specs.push_back(ConvexFunctionSpec::affine_shift(v, 2.0, specs[1]));
    }
    for (const auto& f : specs) {
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd x(4);
            for (int d = 0; d < 4; ++d) x(d) = U(eng);
            const double scale = std::max(1.0, f.gradient(x).norm());
            CHECK((f.gradient(x) - fd_gradient(f, x, 1e-5)).norm() / scale < 1e-6);
            const double hscale = std::max(1.0, f.hessian(x).cwiseAbs().maxCoeff());
            CHECK((f.hessian(x) - fd_hessian(f, x, 1e-4)).cwiseAbs().maxCoeff() / hscale < 1e-6);
        }
    }
}

TEST_CASE("distance cone kinks") {
    auto u1 = ConvexFunctionSpec::distance_cone(4, 1.0);
    Eigen::VectorXd z(4);
    z << 1, 0, 0, 0;
    CHECK(u1.evaluate(z) == doctest::Approx(0.0));
    CHECK_THROWS_AS(u1.gradient(z), NonSmoothPointError);
    z << 2, 0, 0, 0;
    CHECK(u1.evaluate(z) == doctest::Approx(1.0));
    CHECK((u1.gradient(z) - z / 2).norm() < 1e-14);
    z << 0.3, 0, 0, 0;
    CHECK(u1.gradient(z).norm() == 0.0);
}

TEST_CASE("smoothed cone profile") {
    // value at t = 1, eps = 1, s = 0: 0.5 * (sqrt((1-1)^2 + 1) + 1 - 1) = 0.5
    const ProfileSpec p = smoothed_cone_profile(1.0, 1.0);
    CHECK(p.h(0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(smoothed_cone_profile(1.0, 0.0), ParameterError);
    // pointwise limit max(0, sqrt(s) - t) as eps -> 0
    const ProfileSpec tiny = smoothed_cone_profile(0.7, 1e-6);
    for (double s : {0.0, 0.3, 0.49, 0.6, 1.0, 2.5})
        CHECK(tiny.h(s) ==
              doctest::Approx(std::max(0.0, std::sqrt(s) - 0.7)).epsilon(1e-4));
    // monotone profile
    for (double s : {0.0, 0.2, 1.0, 3.0}) CHECK(smoothed_cone_profile(0.5, 0.2).dh(s) >= 0.0);
    // derivative formulas match finite differences
    const ProfileSpec q = smoothed_cone_profile(0.8, 0.25);
    for (double s : {0.1, 0.5, 1.3}) {
        const double fd1 = (q.h(s + 1e-6) - q.h(s - 1e-6)) / 2e-6;
        CHECK(q.dh(s) == doctest::Approx(fd1).epsilon(1e-6));
        const double fd2 = (q.dh(s + 1e-6) - q.dh(s - 1e-6)) / 2e-6;
        CHECK(q.d2h(s) == doctest::Approx(fd2).epsilon(1e-5));
    }
    // uniform convergence on the radial grid, monotone in eps
    double prev = 1e9;
    for (double eps : {0.1, 0.05, 0.025}) {
        const ProfileSpec he = smoothed_cone_profile(0.5, eps);
        double sup = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double r = 2.0 * i / 100;
            sup = std::max(sup, std::abs(he.h(r * r) - std::max(0.0, r - 0.5)));
        }
        CHECK(sup < prev);
        prev = sup;
    }
}

TEST_CASE("legendre transforms") {
    // f = |x|^2 / 2 is self dual
    auto f = ConvexFunctionSpec::quadratic(0.5 * Eigen::MatrixXd::Identity(2, 2),
                                           Eigen::VectorXd::Zero(2), 0.0);
    Eigen::VectorXd y(2);
    y << 0.7, -1.2;
    CHECK(legendre(f, y) == doctest::Approx(0.5 * y.squaredNorm()));

    // f = <Ax, x> with A = diag(1, 2) at y = (2, 4): value 3
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1;
    A(1, 1) = 2;
    auto g = ConvexFunctionSpec::quadratic(A, Eigen::VectorXd::Zero(2), 0.0);
    y << 2, 4;
    CHECK(legendre(g, y) == doctest::Approx(3.0));

    // biconjugation: L(Lf) = f for positive definite quadratics
    Eigen::MatrixXd B(2, 2);
    B << 2.0, 0.3, 0.3, 1.0;
    Eigen::VectorXd b(2);
    b << 0.5, -0.2;
    auto h = ConvexFunctionSpec::quadratic(B, b, 0.7);
    const Eigen::MatrixXd Binv = B.inverse();
    auto dual = ConvexFunctionSpec::quadratic(0.25 * Binv, -0.5 * Binv * b,
                                              0.25 * b.dot(Binv * b) - 0.7);
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 10; ++i) {
        Eigen::VectorXd x(2);
        x << U(eng), U(eng);
        CHECK(legendre(h, x) == doctest::Approx(dual.evaluate(x)).epsilon(1e-10));
        CHECK(legendre(dual, x) == doctest::Approx(h.evaluate(x)).epsilon(1e-10));
    }

    // radial route agrees with the quadratic closed form for h(s) = s
    auto rad = ConvexFunctionSpec::radial(2, polynomial_profile({0.0, 1.0}));
    y << 1.1, 0.3;
    CHECK(legendre(rad, y) == doctest::Approx(0.25 * y.squaredNorm()).epsilon(1e-9));
    CHECK_THROWS_AS(legendre(ConvexFunctionSpec::distance_cone(2, 1.0), y),
                    UnsupportedConjugateError);
}

TEST_CASE("lattice operations") {
    Eigen::VectorXd u(4);
    u << 1, 0, 0, 0;
    auto [f, g] = certified_disjoint_pair(u, 1.0);
    auto mx = lattice_max(f, g);
    auto mn = lattice_min(f, g);
    CHECK(mn.min_certified());
    std::mt19937_64 eng(13);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd x(4);
        for (int d = 0; d < 4; ++d) x(d) = U(eng);
        CHECK(mn.evaluate(x) == doctest::Approx(0.0));  // disjoint active regions
        CHECK(mx.evaluate(x) ==
              doctest::Approx(std::max(0.0, std::abs(x(0)) - 1.0)).epsilon(1e-12));
        CHECK(lattice_max(f, f).evaluate(x) == doctest::Approx(f.evaluate(x)));
    }
    // an uncertified min of crossing cones fails the convexity check
    Eigen::VectorXd v(4);
    v << 0, 1, 0, 0;
    auto h1 = ConvexFunctionSpec::halfspace_cone(u, 0.5, +1);
    auto h2 = ConvexFunctionSpec::halfspace_cone(v, 0.5, +1);
    CHECK_THROWS_AS(lattice_min(h1, h2), ConvexityCertificateError);
}

TEST_CASE("cylinder lifts") {
    Eigen::MatrixXd bx = Eigen::MatrixXd::Zero(4, 2), by = Eigen::MatrixXd::Zero(4, 2);
    bx(0, 0) = 1;
    bx(1, 1) = 1;  // first complex line
    by(2, 0) = 1;
    by(3, 1) = 1;  // second complex line
    auto fx = ConvexFunctionSpec::quadratic(Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::VectorXd::Zero(2), 0.0);
    auto fy = ConvexFunctionSpec::quadratic(Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::VectorXd::Zero(2), 0.0);
    auto lift = cylinder_lift(bx, fx, by, fy);
    Eigen::VectorXd z(4);
    z << 1, 2, 3, 4;
    CHECK(lift.evaluate(z) == doctest::Approx(z.squaredNorm()));
    // gradient concatenates factor gradients
    CHECK((lift.gradient(z) - 2 * z).norm() < 1e-14);
    // constant extension: zero second factor
    auto only_x = cylinder_lift_basis(bx, fx);
    Eigen::VectorXd z2 = z;
    z2(2) = -7;
    CHECK(only_x.evaluate(z) == doctest::Approx(only_x.evaluate(z2)));
    // a totally real factor is rejected as a complex split
    Eigen::MatrixXd breal = Eigen::MatrixXd::Zero(4, 1);
    breal(0, 0) = 1;
    CHECK_THROWS_AS(cylinder_lift(breal, ConvexFunctionSpec::zero(1), by, fy), SplitError);
}

TEST_CASE("convexity spot checks and scale-shift commutation") {
    auto base = ConvexFunctionSpec::radial(4, polynomial_profile({0.0, 1.0, 0.1}));
    CHECK(convexity_spot_check(base, 2.0, 1000, 1));
    CHECK(convexity_spot_check(ConvexFunctionSpec::distance_cone(4, 0.7), 2.0, 1000, 2));
    Eigen::VectorXd v(4);
    v << 0.2, 0.1, -0.3, 0.0;
    auto a = ConvexFunctionSpec::scale(2.0, ConvexFunctionSpec::affine_shift(v, 1.0, base));
    auto b = ConvexFunctionSpec::affine_shift(2.0 * v, 2.0, ConvexFunctionSpec::scale(2.0, base));
    std::mt19937_64 eng(21);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd x(4);
        for (int d = 0; d < 4; ++d) x(d) = U(eng);
        CHECK(a.evaluate(x) == doctest::Approx(b.evaluate(x)).epsilon(1e-12));
    }
}

TEST_CASE("json round trip") {
    auto f = ConvexFunctionSpec::sum(
        {ConvexFunctionSpec::distance_cone(4, 0.5),
         ConvexFunctionSpec::scale(2.0, ConvexFunctionSpec::radial(
                                             4, polynomial_profile({0.0, 1.0, 0.3})))});
    const nlohmann::json j = to_json(f);
    auto g = convex_from_json(j);
    Eigen::VectorXd x(4);
    x << 0.3, -0.4, 0.8, 0.1;
    CHECK(f.evaluate(x) == doctest::Approx(g.evaluate(x)));
    CHECK_THROWS(convex_from_json(nlohmann::json{{"variant", "nope"}}));
}
