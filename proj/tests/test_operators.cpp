#include <doctest.h>

#include <random>

#include "hma/operators.hpp"
#include "hma/quadrature.hpp"

using namespace hma;

namespace {

ProfileSpec test_profile() { return polynomial_profile({0.0, 1.0, 0.3, 0.05}); }

ConvexFunctionSpec radial_spec(int n) { return ConvexFunctionSpec::radial(2 * n, test_profile()); }

}  // namespace

TEST_CASE("hessian density") {
    auto f = ConvexFunctionSpec::quadratic(0.5 * Eigen::MatrixXd::Identity(4, 4),
                                           Eigen::VectorXd::Zero(4), 0.0);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
    CHECK(hessian_density(f, 2, x) == doctest::Approx(6.0));  // e_2(1,1,1,1)
    CHECK(hessian_density(f, 0, x) == doctest::Approx(1.0));
    auto lin = ConvexFunctionSpec::affine_shift(Eigen::VectorXd::Ones(4), 0.0,
                                                ConvexFunctionSpec::zero(4));
    CHECK(hessian_density(lin, 1, x) == doctest::Approx(0.0));
    CHECK(hessian_density(lin, 3, x) == doctest::Approx(0.0));
}

TEST_CASE("radial closed forms match the exterior kernel everywhere") {
    // the oracle that pins every radial formula in this library
    std::mt19937_64 eng(2);
    std::uniform_real_distribution<double> U(-1, 1);
    const ProfileSpec h = test_profile();
    for (int n : {1, 2, 3}) {
        auto f = radial_spec(n);
        for (int k = 1; k <= 2 * n; ++k) {
            for (int q = std::max(0, k - n); q <= k / 2; ++q) {
                Eigen::VectorXd x(2 * n);
                for (int d = 0; d < 2 * n; ++d) x(d) = U(eng);
                x *= 0.9 / x.norm();
                const HermitianIndex idx(n, k, q);
                const double kern = operator_density(OperatorTag::Theta, idx, f, x);
                const double closed = radial_operator_density(OperatorTag::Theta, idx, h, x.norm());
                CHECK(kern == doctest::Approx(closed).epsilon(1e-10));
                if (tag_index_valid(OperatorTag::B, n, k, q)) {
                    CHECK(operator_density(OperatorTag::B, idx, f, x) ==
                          doctest::Approx(radial_operator_density(OperatorTag::B, idx, h, x.norm()))
                              .epsilon(1e-10));
                }
                if (tag_index_valid(OperatorTag::C, n, k, q)) {
                    CHECK(operator_density(OperatorTag::C, idx, f, x) ==
                          doctest::Approx(radial_operator_density(OperatorTag::C, idx, h, x.norm()))
                              .epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("upsilon annihilates rotation invariant functions pointwise") {
    std::mt19937_64 eng(4);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int n : {2, 3}) {
        auto f = radial_spec(n);
        for (int k = 2; k < 2 * n; ++k)
            for (int q = std::max(1, k - n); q <= (k - 1) / 2; ++q) {
                Eigen::VectorXd x(2 * n);
                for (int d = 0; d < 2 * n; ++d) x(d) = U(eng);
                const double u =
                    operator_density(OperatorTag::Upsilon, HermitianIndex(n, k, q), f, x);
                CHECK(std::abs(u) < 1e-10);
            }
        // generically nonzero on anisotropic inputs
        Eigen::MatrixXd M(2 * n, 2 * n);
        for (int r = 0; r < 2 * n; ++r)
            for (int c = 0; c < 2 * n; ++c) M(r, c) = U(eng);
        auto g = ConvexFunctionSpec::quadratic(M * M.transpose(), Eigen::VectorXd::Zero(2 * n),
                                               0.0);
        Eigen::VectorXd x(2 * n);
        for (int d = 0; d < 2 * n; ++d) x(d) = U(eng);
        CHECK(std::abs(operator_density(OperatorTag::Upsilon, HermitianIndex(n, 3, 1), g, x)) >
              1e-8);
    }
}

TEST_CASE("theta density positivity and homogeneity") {
    std::mt19937_64 eng(6);
    std::uniform_real_distribution<double> U(-1, 1);
    const int n = 2;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd M(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) M(r, c) = U(eng);
        auto f = ConvexFunctionSpec::quadratic(M * M.transpose(), Eigen::VectorXd::Zero(4), 0.0);
        Eigen::VectorXd x(4);
        for (int d = 0; d < 4; ++d) x(d) = U(eng);
        for (auto [k, q] : std::vector<std::pair<int, int>>{{1, 0}, {2, 1}, {3, 1}, {4, 2}}) {
            const HermitianIndex idx(n, k, q);
            const double base = operator_density(OperatorTag::Theta, idx, f, x);
            CHECK(base >= -1e-12 * std::max(1.0, std::abs(base)));
            for (double lam : {0.5, 2.0, 3.0}) {
                auto scaled = ConvexFunctionSpec::scale(lam, f);
                CHECK(operator_density(OperatorTag::Theta, idx, scaled, x) ==
                      doctest::Approx(std::pow(lam, k) * base).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("unitary equivariance of densities") {
    std::mt19937_64 eng(8);
    std::uniform_real_distribution<double> U(-1, 1);
    const int n = 2;
    Eigen::MatrixXd M(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) M(r, c) = U(eng);
    auto f = ConvexFunctionSpec::quadratic(M * M.transpose(), Eigen::VectorXd::Zero(4), 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Eigen::MatrixXd R = haar_unitary(n, seed);
        auto fU = ConvexFunctionSpec::quadratic(R.transpose() * f.quadratic_A() * R,
                                                Eigen::VectorXd::Zero(4), 0.0);
        Eigen::VectorXd x(4);
        for (int d = 0; d < 4; ++d) x(d) = U(eng);
        for (auto [k, q] : std::vector<std::pair<int, int>>{{2, 0}, {2, 1}, {3, 1}}) {
            const HermitianIndex idx(n, k, q);
            CHECK(operator_density(OperatorTag::Theta, idx, fU, x) ==
                  doctest::Approx(operator_density(OperatorTag::Theta, idx, f, R * x))
                      .epsilon(1e-10));
            if (tag_index_valid(OperatorTag::Upsilon, n, k, q))
                CHECK(operator_density(OperatorTag::Upsilon, idx, fU, x) ==
                      doctest::Approx(operator_density(OperatorTag::Upsilon, idx, f, R * x))
                          .epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("radial operator integrals") {
    // Theta (1,1,0) with h(s)=s against the indicator: 4 pi
    const ProfileSpec lin = polynomial_profile({0.0, 1.0});
    const HermitianIndex idx(1, 1, 0);
    const double v = radial_operator_integral(OperatorTag::Theta, idx, lin,
                                              WeightFunction::indicator(1.0));
    CHECK(v == doctest::Approx(4.0 * M_PI).epsilon(1e-10));
    // k = 0 reduces to the Lebesgue pairing
    const HermitianIndex idx0(2, 0, 0);
    const double lebesgue = radial_operator_integral(OperatorTag::Theta, idx0, test_profile(),
                                                     WeightFunction::indicator(1.0));
    CHECK(lebesgue == doctest::Approx(unit_ball_volume(4)).epsilon(1e-10));
    // B equals C on radial inputs
    const HermitianIndex idx231(2, 3, 1);
    const WeightFunction w = WeightFunction::indicator(1.0);
    CHECK(radial_operator_integral(OperatorTag::B, idx231, test_profile(), w) ==
          doctest::Approx(radial_operator_integral(OperatorTag::C, idx231, test_profile(), w)));
}

TEST_CASE("full-dimension quadrature agrees with the radial closed form") {
    // n = 1 cheap version of the oracle equivalence, with a weight that
    // vanishes at the ends of its support so the integrand stays continuous
    const HermitianIndex idx(1, 1, 0);
    const ProfileSpec h = test_profile();
    auto f = radial_spec(1);
    std::vector<double> nodes, vals;
    for (int i = 0; i <= 12; ++i) {
        const double r = 0.2 + 0.8 * i / 12.0;
        nodes.push_back(r);
        vals.push_back(std::sin(M_PI * (r - 0.2) / 0.8));
    }
    const WeightFunction w = WeightFunction::piecewise_linear(nodes, vals);
    Eigen::VectorXd lo(2), hi(2);
    lo << -1, -1;
    hi << 1, 1;
    const double quad = tensor_integrate(
        [&](const Eigen::VectorXd& x) {
            return w(x.norm()) * operator_density(OperatorTag::Theta, idx, f, x);
        },
        lo, hi, 160, false);
    const double closed = radial_operator_integral(OperatorTag::Theta, idx, h, w);
    CHECK(quad == doctest::Approx(closed).epsilon(1e-4));
}

TEST_CASE("cone measures") {
    // n=1, k=1, Theta(u_1) paired with 1_{(0,2]}: surface + a.c. parts
    const RadialSignedMeasure m = ut_measure(OperatorTag::Theta, HermitianIndex(1, 1, 0), 1.0);
    const double v = m.pair_radial(WeightFunction::indicator(2.0));
    CHECK(v == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
    // the same value from the smoothing limit
    double prev_err = 1e18;
    for (double eps : {0.1, 0.05, 0.025}) {
        const ProfileSpec he = smoothed_cone_profile(1.0, eps);
        const double sm = radial_operator_integral(OperatorTag::Theta, HermitianIndex(1, 1, 0),
                                                   he, WeightFunction::indicator(2.0));
        CHECK(std::abs(sm - v) < prev_err);
        prev_err = std::abs(sm - v);
    }
    // Upsilon of the cone vanishes
    const RadialSignedMeasure u =
        ut_measure(OperatorTag::Upsilon, HermitianIndex(2, 3, 1), 0.7);
    CHECK(u.atoms.empty());
    CHECK(!u.has_ac());
    // u_0 pairing with the indicator: tail integral only
    const HermitianIndex idx22(2, 2, 1);
    const double u0 = ut_measure(OperatorTag::Theta, idx22, 0.0)
                          .pair_radial(WeightFunction::indicator(1.0));
    const double expect = std::pow(2.0, idx22.k - 2 * idx22.q) * multinomial(idx22) *
                          unit_ball_volume(2 * idx22.n);
    CHECK(u0 == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("cone measure matches the smoothing limit for B") {
    const HermitianIndex idx(2, 2, 1);
    const double t = 0.5;
    const WeightFunction w = WeightFunction::indicator(2.0);
    const double closed = ut_measure(OperatorTag::B, idx, t).pair_radial(w);
    // the smoothing error carries an eps log eps term; fit v* + c1 eps + c2 eps log eps
    std::vector<double> eps = {0.004, 0.002, 0.001}, vals;
    for (double e : eps)
        vals.push_back(
            radial_operator_integral(OperatorTag::B, idx, smoothed_cone_profile(t, e), w));
    Eigen::Matrix3d M;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        M(i, 0) = 1.0;
        M(i, 1) = eps[i];
        M(i, 2) = eps[i] * std::log(eps[i]);
        rhs(i) = vals[i];
    }
    const double extrap = M.fullPivLu().solve(rhs)(0);
    CHECK(extrap == doctest::Approx(closed).epsilon(1e-3));
}

TEST_CASE("limit identities") {
    const WeightFunction w = WeightFunction::indicator(2.0);
    // zeta = 1_{(0,2]}, t = 1, a = k = 1: rhs = (1/2) int_1^2 dr = 1/2
    const LimitCheck lc = limit_identities_check(1, 1, 1.0, w);
    CHECK(lc.rhs1 == doctest::Approx(0.5));
    CHECK(lc.lhs1 == doctest::Approx(lc.rhs1).epsilon(2e-3));
    CHECK(lc.lhs2 == doctest::Approx(lc.rhs2).epsilon(5e-3).scale(0.25));
    const LimitCheck lc2 = limit_identities_check(2, 3, 0.5, w);
    CHECK(lc2.lhs1 == doctest::Approx(lc2.rhs1).epsilon(5e-3).scale(0.1));
    CHECK(lc2.lhs2 == doctest::Approx(lc2.rhs2).epsilon(1e-2).scale(0.1));
}

TEST_CASE("binomial integral identity") {
    for (int k = 1; k <= 6; ++k)
        CHECK(binomial_integral_value(k) == doctest::Approx(std::pow(2.0, k) / k).epsilon(1e-10));
}

TEST_CASE("product decomposition at the density level") {
    // block quadratics on C^2 = C^1 + C^1: the operator of the sum splits
    std::mt19937_64 eng(12);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd MX(2, 2), MY(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                MX(r, c) = U(eng);
                MY(r, c) = U(eng);
            }
        const Eigen::MatrixXd HX = MX * MX.transpose(), HY = MY * MY.transpose();
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
        A.topLeftCorner(2, 2) = HX;
        A.bottomRightCorner(2, 2) = HY;
        auto f = ConvexFunctionSpec::quadratic(A, Eigen::VectorXd::Zero(4), 0.0);
        auto fx = ConvexFunctionSpec::quadratic(HX, Eigen::VectorXd::Zero(2), 0.0);
        auto fy = ConvexFunctionSpec::quadratic(HY, Eigen::VectorXd::Zero(2), 0.0);
        Eigen::VectorXd x(4), xX(2), xY(2);
        for (int d = 0; d < 4; ++d) x(d) = U(eng);
        xX = x.head(2);
        xY = x.tail(2);
        const HermitianIndex idx(2, 2, 1);
        double total = 0.0;
        for (int m1 = 0; m1 <= 2; ++m1)
            for (int p1 = 0; p1 <= 1; ++p1) {
                const int m2 = idx.k - m1, p2 = idx.q - p1;
                if (!HermitianIndex::valid(1, m1, p1) && m1 != 0) continue;
                if (!HermitianIndex::valid(1, m2, p2) && m2 != 0) continue;
                if (p1 < 0 || p2 < 0 || p1 > m1 / 2 || p2 > m2 / 2) continue;
                auto dens = [&](int m, int p, const ConvexFunctionSpec& g,
                                const Eigen::VectorXd& pt) {
                    if (m == 0) return 1.0;
                    return operator_density(OperatorTag::Theta, HermitianIndex(1, m, p), g, pt);
                };
                total += dens(m1, p1, fx, xX) * dens(m2, p2, fy, xY);
            }
        CHECK(operator_density(OperatorTag::Theta, idx, f, x) ==
              doctest::Approx(total).epsilon(1e-11));
    }
}

TEST_CASE("product decomposition measures against direct closed forms") {
    // f_Y = 0 on C^1 factor: only the (k, q) x (0, 0) term survives and the
    // pairing reduces to the lower-dimensional cone measure times Lebesgue
    const HermitianIndex idx(2, 2, 1);
    auto fx = ConvexFunctionSpec::distance_cone(2, 0.5);
    auto fy = ConvexFunctionSpec::zero(2);
    const auto terms = product_decomposition(OperatorTag::Theta, idx, fx, 1, fy, 1);
    // nonzero terms: (m1,p1) = (2,1) with Lebesgue second factor
    double total = 0.0;
    const WeightFunction w = WeightFunction::indicator(1.0);
    for (const auto& t : terms) total += t.coeff * tensor_pair(w, t.mx, t.my);
    // direct: int over C^2 of w(|z|) against Theta^{C^1}_{2,1}(u_{1/2}) x vol
    // = atom at 0.5 integrated over the complementary disc radius sqrt(1-r^2)
    const RadialSignedMeasure mX = ut_measure(OperatorTag::Theta, HermitianIndex(1, 2, 1), 0.5);
    REQUIRE(mX.atoms.size() == 1);
    const double direct = mX.atoms[0].sphere_mass * M_PI * (1.0 - 0.25);
    CHECK(total == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("subspace vanishing") {
    // (2,2,0) operator on a function living on E_{2,1}, and vice versa
    auto fC = ConvexFunctionSpec::quadratic(Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::VectorXd::Zero(2), 0.0);
    CHECK(subspace_vanishing_check(OperatorTag::Theta, HermitianIndex(2, 2, 0), 1, fC, 50, 3) <
          1e-12);
    CHECK(subspace_vanishing_check(OperatorTag::Theta, HermitianIndex(2, 2, 1), 0, fC, 50, 4) <
          1e-12);
    // sanity: p = q is generically nonzero
    CHECK(subspace_vanishing_check(OperatorTag::Theta, HermitianIndex(2, 2, 1), 1, fC, 50, 5) >
          1e-6);
}

TEST_CASE("comparability against the Hessian measure") {
    // |Upsilon density| / (|x|^2 Phi_k density) stays finite over random
    // nondegenerate samples
    std::mt19937_64 eng(14);
    std::uniform_real_distribution<double> U(-1, 1);
    const HermitianIndex idx(2, 3, 1);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Eigen::MatrixXd M(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) M(r, c) = U(eng);
        auto f = ConvexFunctionSpec::quadratic(M * M.transpose() +
                                                   0.1 * Eigen::MatrixXd::Identity(4, 4),
                                               Eigen::VectorXd::Zero(4), 0.0);
        Eigen::VectorXd x(4);
        for (int d = 0; d < 4; ++d) x(d) = U(eng);
        if (x.norm() < 0.1) continue;
        const double ups = std::abs(operator_density(OperatorTag::Upsilon, idx, f, x));
        const double phik = hessian_density(f, idx.k, x) * x.squaredNorm();
        worst = std::max(worst, ups / phik);
    }
    CHECK(std::isfinite(worst));
    CHECK(worst > 0.0);
}
