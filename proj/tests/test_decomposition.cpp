#include <doctest.h>

#include <random>

#include "hma/decomposition.hpp"
#include "corpus.hpp"

using namespace hma;

namespace {

WeightFunction random_weight(std::uint64_t seed, WeightClass tag = WeightClass::Da) {
    return corpus::random_smooth_weight(seed, tag);
}

double sup_diff(const WeightFunction& a, const WeightFunction& b, double lo, double hi) {
    double s = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double t = lo + (hi - lo) * i / 64.0;
        s = std::max(s, std::abs(a(t) - b(t)));
    }
    return s;
}

ConvexFunctionSpec lift_cone(int n, int lx, bool first, double t) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const Eigen::MatrixXd B = first ? I.leftCols(2 * lx) : I.rightCols(2 * lx);
    return cylinder_lift_basis(B, ConvexFunctionSpec::distance_cone(2 * lx, t));
}

}  // namespace

TEST_CASE("component vanishing pattern") {
    // for a pure (k, q) span valuation the components with q1 + q2 != q vanish
    const int n = 2, k = 3, q = 1;
    auto mu = span_sum(make_T(n, k, q, random_weight(1)),
                       make_Y(n, k, q, random_weight(2, WeightClass::DaTilde)));
    for (int i = 0; i <= k; ++i)
        for (int q1 = 0; q1 <= 1; ++q1)
            for (int q2 = 0; q2 <= 1; ++q2) {
                const double v = component_eval(mu, 1, i, q1, q2, 0.4, 0.7);
                if (q1 + q2 != q) CHECK(std::abs(v) < 1e-12);
            }
}

TEST_CASE("component sum recovers the polarization") {
    const int n = 2, k = 3, q = 1;
    auto mu = make_T(n, k, q, random_weight(7));
    const double s = 0.5, t = 0.8;
    for (int i = 1; i < k; ++i) {
        double total = 0.0;
        for (int q1 = 0; q1 <= k / 2; ++q1)
            for (int q2 = 0; q2 <= k / 2; ++q2) total += component_eval(mu, 1, i, q1, q2, s, t);
        const double pol =
            polarized_eval(mu, lift_cone(n, 1, true, s), lift_cone(n, 1, false, t), i);
        CHECK(total == doctest::Approx(pol).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("template maps on pure span valuations") {
    // U0 of a pure q = 0 valuation samples the bivariate transform of zeta_0
    const int n = 2, k = 2;
    const WeightFunction z0 = random_weight(11);
    auto mu = make_T(n, k, 0, z0);
    TemplateMaps maps = template_maps(mu, 17);
    REQUIRE(maps.U0.has_value());
    BivariateFn rab = transform_Rab(z0, 1, 2 * n - k - 1);
    const int gn = static_cast<int>(maps.tgrid.size());
    for (int i = 0; i < gn; i += 4)
        for (int j = 0; j < gn; j += 4) {
            const double expect = rab.eval(maps.sgrid[i], maps.tgrid[j]);
            CHECK((*maps.U0)[i * gn + j] == doctest::Approx(expect).epsilon(1e-7).scale(1.0));
        }
}

TEST_CASE("Vtilde identities at (2,3,1)") {
    const int n = 2, k = 3, q = 1;
    const WeightFunction zeta = random_weight(13);
    const WeightFunction zt = random_weight(14, WeightClass::DaTilde);
    auto mu = span_sum(make_T(n, k, q, zeta), make_Y(n, k, q, zt));
    TemplateMaps maps = template_maps(mu, 17);
    REQUIRE(maps.Vtilde.count(q));
    const WeightFunction Ra = transform_Ra(zeta, 2 * n - k);
    const WeightFunction P = transform_Pa(zt, 2 * n - k);
    for (std::size_t i = 0; i < maps.tgrid.size(); i += 3) {
        const double t = maps.tgrid[i];
        const double expect = Ra(t) - P(t) / (q * (k - 2.0));
        CHECK(maps.Vtilde[q][i] == doctest::Approx(expect).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("Wtilde identities at (3,5,2)") {
    const int n = 3, k = 5, q = 2;
    const WeightFunction zeta = random_weight(15);
    const WeightFunction zt = random_weight(16, WeightClass::DaTilde);
    auto mu = span_sum(make_T(n, k, q, zeta), make_Y(n, k, q, zt));
    TemplateMaps maps = template_maps(mu, 9);
    REQUIRE(maps.Vtilde.count(q));
    REQUIRE(maps.Wtilde.count(q));
    const WeightFunction Ra = transform_Ra(zeta, 2 * n - k);
    const WeightFunction P = transform_Pa(zt, 2 * n - k);
    for (std::size_t i = 0; i < maps.tgrid.size(); i += 2) {
        const double t = maps.tgrid[i];
        CHECK(maps.Vtilde[q][i] ==
              doctest::Approx(Ra(t) - P(t) / (q * (k - 2.0))).epsilon(1e-7).scale(1.0));
        CHECK(maps.Wtilde[q][i] ==
              doctest::Approx(Ra(t) - 2.0 * P(t) / (q * (k - 4.0))).epsilon(1e-7).scale(1.0));
    }
    auto [V, W] = combine_VW(maps.Vtilde[q], maps.Wtilde[q], k, q);
    for (std::size_t i = 0; i < maps.tgrid.size(); i += 2) {
        const double t = maps.tgrid[i];
        CHECK(V[i] == doctest::Approx(Ra(t)).epsilon(1e-6).scale(1.0));
        CHECK(W[i] == doctest::Approx(P(t)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("combine_VW degenerates correctly") {
    const int k = 5, q = 2;
    std::vector<double> R(5), P(5);
    for (int i = 0; i < 5; ++i) {
        R[i] = 0.3 * i + 0.1;
        P[i] = -0.2 * i + 0.9;
    }
    std::vector<double> VtT(5), WtT(5), VtY(5), WtY(5);
    for (int i = 0; i < 5; ++i) {
        VtT[i] = R[i];
        WtT[i] = R[i];
        VtY[i] = -P[i] / (q * (k - 2.0));
        WtY[i] = -2.0 * P[i] / (q * (k - 4.0));
    }
    auto [Vt, Wt] = combine_VW(VtT, WtT, k, q);
    auto [Vy, Wy] = combine_VW(VtY, WtY, k, q);
    for (int i = 0; i < 5; ++i) {
        CHECK(Vt[i] == doctest::Approx(R[i]));
        CHECK(Wt[i] == doctest::Approx(0.0).scale(1.0));
        CHECK(Vy[i] == doctest::Approx(0.0).scale(1.0));
        CHECK(Wy[i] == doctest::Approx(P[i]));
    }
    CHECK_THROWS_AS(combine_VW(VtT, std::vector<double>(3), k, q), GridError);
}

TEST_CASE("density recovery round trip, single weight") {
    for (auto [n, k, q] : std::vector<std::array<int, 3>>{{2, 2, 0}, {2, 2, 1}}) {
        const WeightFunction z = random_weight(31 + q);
        auto mu = make_T(n, k, q, z);
        RecoveredDensities rec = recover_densities_kq(mu, q, 513);
        CHECK(!rec.zeta_tilde.has_value());
        CHECK(sup_diff(rec.zeta, z, 0.05, 1.0) < 1e-3);
    }
}

TEST_CASE("density recovery round trip, two weights") {
    const int n = 2, k = 3, q = 1;
    const WeightFunction z = random_weight(41);
    const WeightFunction zt = random_weight(42, WeightClass::DaTilde);
    auto mu = span_sum(make_T(n, k, q, z), make_Y(n, k, q, zt));
    RecoveredDensities rec = recover_densities_kq(mu, q, 513);
    CHECK(sup_diff(rec.zeta, z, 0.05, 1.0) < 1e-3);
    REQUIRE(rec.zeta_tilde.has_value());
    CHECK(sup_diff(*rec.zeta_tilde, zt, 0.1, 1.0) < 1e-3);
    auto back = span_sum(make_T(n, k, q, rec.zeta), make_Y(n, k, q, *rec.zeta_tilde));
    for (double t : {0.3, 0.6, 0.9})
        CHECK(evaluate(back, ConvexFunctionSpec::distance_cone(4, t)) ==
              doctest::Approx(evaluate(mu, ConvexFunctionSpec::distance_cone(4, t)))
                  .epsilon(5e-3).scale(1.0));
}

TEST_CASE("reconstruction operator") {
    const int n = 2, k = 2;
    const WeightFunction z0 = random_weight(51);
    auto mu = make_T(n, k, 0, z0);
    ValuationSpec A = reconstruct_A(mu, 129);
    REQUIRE(A.terms.size() == 1);
    CHECK(A.terms[0].q == 0);
    CHECK(sup_diff(A.terms[0].weight, z0, 0.15, 1.0) < 2e-3);
    auto mu1 = make_T(n, k, 1, random_weight(52));
    ValuationSpec A1 = reconstruct_A(mu1, 129);
    double worst = 0.0;
    for (const auto& term : A1.terms)
        for (double t : {0.2, 0.5, 0.8, 1.0}) worst = std::max(worst, std::abs(term.weight(t)));
    CHECK(worst < 1e-7);
    // the (3,4) case goes through the half-degree branch
    auto mu34 = make_T(3, 4, 2, random_weight(53));
    ValuationSpec A34 = reconstruct_A(mu34, 129);
    bool found = false;
    for (const auto& term : A34.terms)
        if (term.q == 2 && term.tag == 'T') {
            found = true;
            CHECK(sup_diff(term.weight, random_weight(53), 0.1, 1.0) < 2e-3);
        }
    CHECK(found);
}

TEST_CASE("full decomposition round trip at (2,2)") {
    const int n = 2, k = 2;
    const WeightFunction z0 = random_weight(61);
    const WeightFunction z1 = random_weight(62);
    auto mu = span_sum(make_T(n, k, 0, z0), make_T(n, k, 1, z1));
    ValuationSpec A = reconstruct_A(mu, 257);
    REQUIRE(!A.terms.empty());
    CHECK(sup_diff(A.terms[0].weight, z0, 0.15, 1.0) < 1e-3);
    ValuationSpec remainder = span_axpy(mu, -1.0, A);
    for (double s : {0.4, 0.8})
        CHECK(std::abs(component_eval(remainder, 1, 1, 0, 0, s, 0.5)) < 2e-3);
    RecoveredDensities rec = recover_densities_kq(remainder, 1, 513);
    CHECK(sup_diff(rec.zeta, z1, 0.1, 1.0) < 1e-3);
}
