#include "hma/valuations.hpp"

#include <cmath>
#include <random>

#include "hma/quadrature.hpp"

namespace hma {

void ValuationSpec::validate() const {
    for (const auto& term : terms) {
        if (term.tag == 'T') {
            if (!HermitianIndex::valid(n, k, term.q))
                throw IndexDomainError("ValuationSpec: invalid T index");
        } else if (term.tag == 'Y') {
            if (!tag_index_valid(OperatorTag::Upsilon, n, k, term.q))
                throw IndexDomainError("ValuationSpec: Y term outside the admissible range");
            if (term.weight.tag() != WeightClass::DaTilde)
                throw NotInClassError("ValuationSpec: Y weight must carry class D~");
        } else {
            throw IndexDomainError("ValuationSpec: unknown tag");
        }
    }
}

ValuationSpec make_T(int n, int k, int q, WeightFunction zeta) {
    ValuationSpec v;
    v.n = n;
    v.k = k;
    v.terms.push_back({'T', q, std::move(zeta)});
    v.validate();
    return v;
}

ValuationSpec make_Y(int n, int k, int q, WeightFunction zeta_tilde) {
    ValuationSpec v;
    v.n = n;
    v.k = k;
    ValuationTerm t;
    t.tag = 'Y';
    t.q = q;
    t.weight = std::move(zeta_tilde);
    v.terms.push_back(std::move(t));
    v.validate();
    return v;
}

ValuationSpec span_sum(ValuationSpec a, const ValuationSpec& b) {
    if (a.n != b.n || a.k != b.k)
        throw IndexDomainError("span_sum: mismatched (n, k)");
    for (const auto& t : b.terms) a.terms.push_back(t);
    return a;
}

// ---------------------------------------------------------------------------
// routing
// ---------------------------------------------------------------------------

namespace {

using K = ConvexFunctionSpec::Kind;

bool smooth_everywhere(const ConvexFunctionSpec& f) {
    switch (f.kind()) {
        case K::Quadratic:
        case K::RadialProfile:
        case K::SmoothedCone:
        case K::Zero:
            return true;
        case K::Sum: {
            for (const auto& ch : f.children())
                if (!smooth_everywhere(ch)) return false;
            return true;
        }
        case K::Scale:
        case K::AffineShift:
        case K::CylinderLift:
            return smooth_everywhere(f.children()[0]);
        default:
            return false;
    }
}

// push scalings into cylinder lifts, strip affine shifts
ConvexFunctionSpec normalize_spec(const ConvexFunctionSpec& f, double& lambda_out);

ConvexFunctionSpec normalize_children_sum(const ConvexFunctionSpec& f) {
    std::vector<ConvexFunctionSpec> out;
    for (const auto& ch : f.children()) {
        double lam = 1.0;
        ConvexFunctionSpec n = normalize_spec(ch, lam);
        if (lam != 1.0) {
            // scaling commutes with the constant extension
            if (n.kind() == K::CylinderLift)
                n = cylinder_lift_basis(n.lift_basis(),
                                        ConvexFunctionSpec::scale(lam, n.children()[0]));
            else
                n = ConvexFunctionSpec::scale(lam, std::move(n));
        }
        if (n.kind() == K::Zero) continue;
        out.push_back(std::move(n));
    }
    if (out.empty()) return ConvexFunctionSpec::zero(f.dim());
    if (out.size() == 1) return out[0];
    return ConvexFunctionSpec::sum(std::move(out));
}

ConvexFunctionSpec normalize_spec(const ConvexFunctionSpec& f, double& lambda_out) {
    lambda_out = 1.0;
    switch (f.kind()) {
        case K::AffineShift: {
            double lam = 1.0;
            ConvexFunctionSpec inner = normalize_spec(f.children()[0], lam);
            lambda_out = lam;
            return inner;
        }
        case K::Scale: {
            double lam = 1.0;
            ConvexFunctionSpec inner = normalize_spec(f.children()[0], lam);
            lambda_out = lam * f.scale_factor();
            if (f.scale_factor() == 0.0) {
                lambda_out = 1.0;
                return ConvexFunctionSpec::zero(f.dim());
            }
            return inner;
        }
        case K::LatticeMin:
        case K::LatticeMax: {
            const auto& a = f.children()[0];
            const auto& b = f.children()[1];
            if (f.kind() == K::LatticeMin && f.min_certified())
                return ConvexFunctionSpec::zero(f.dim());
            if (f.kind() == K::LatticeMax && a.kind() == K::HalfspaceCone &&
                b.kind() == K::HalfspaceCone && a.halfspace_sign() != b.halfspace_sign() &&
                std::abs(a.offset() - b.offset()) < 1e-12 &&
                (a.direction() - b.direction()).norm() < 1e-12)
                return ConvexFunctionSpec::abs_cylinder_cone(a.direction(), a.offset());
            // comparable pairs: max/min collapses to one of the children
            std::mt19937_64 eng(99);
            std::uniform_real_distribution<double> U(-2.0, 2.0);
            bool a_le_b = true, b_le_a = true;
            Eigen::VectorXd x(f.dim());
            for (int i = 0; i < 400 && (a_le_b || b_le_a); ++i) {
                for (int d = 0; d < f.dim(); ++d) x(d) = U(eng);
                const double va = a.evaluate(x), vb = b.evaluate(x);
                if (va > vb + 1e-12) a_le_b = false;
                if (vb > va + 1e-12) b_le_a = false;
            }
            const bool want_larger = f.kind() == K::LatticeMax;
            if (a_le_b) return normalize_spec(want_larger ? b : a, lambda_out);
            if (b_le_a) return normalize_spec(want_larger ? a : b, lambda_out);
            return f;
        }
        case K::Sum:
            return normalize_children_sum(f);
        default:
            return f;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

struct TermContext {
    OperatorTag tag;
    HermitianIndex idx;
    const WeightFunction* weight;
};

double quadrature_route(const TermContext& tc, const ConvexFunctionSpec& f, EvalReport& rep) {
    const int n = tc.idx.n;
    const double R = tc.weight->support_radius();
    const SphereRule rule = sphere_rule(2 * n, n <= 2 ? 10 : 6);
    auto shell = [&](double lo, double hi) {
        auto g = [&](double r) {
            double acc = 0.0, c = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const Eigen::VectorXd x = r * rule.nodes[i];
                const double y = rule.weights[i] * operator_density(tc.tag, tc.idx, f, x) - c;
                const double t = acc + y;
                c = (t - acc) - y;
                acc = t;
            }
            return acc * (*tc.weight)(r)*std::pow(r, 2 * n - 1);
        };
        return integrate_1d(g, lo, hi, 1e-9, 10);
    };
    PvReport pv = pv_shell_driver(shell, R, 1e-8, 24);
    if (!pv.converged)
        throw PvDivergenceError("principal value did not stabilize", pv);
    rep.pv = pv;
    return pv.value;
}

// split a sum of cylinder lifts into exactly two complementary factors
struct SplitView {
    Eigen::MatrixXd bx, by;
    ConvexFunctionSpec fx, fy;
    bool ok = false;
};

SplitView try_split(const ConvexFunctionSpec& f) {
    SplitView sv;
    std::vector<const ConvexFunctionSpec*> lifts;
    if (f.kind() == K::CylinderLift) {
        lifts = {&f};
    } else if (f.kind() == K::Sum) {
        for (const auto& ch : f.children()) {
            if (ch.kind() != K::CylinderLift) return sv;
            lifts.push_back(&ch);
        }
    } else {
        return sv;
    }
    if (lifts.empty() || lifts.size() > 2) return sv;
    const int m = f.dim();
    const Eigen::MatrixXd& B0 = lifts[0]->lift_basis();
    sv.bx = B0;
    sv.fx = lifts[0]->children()[0];
    if (lifts.size() == 2) {
        sv.by = lifts[1]->lift_basis();
        sv.fy = lifts[1]->children()[0];
        if (static_cast<int>(sv.bx.cols() + sv.by.cols()) != m) return sv;
        if ((sv.bx.transpose() * sv.by).cwiseAbs().maxCoeff() > 1e-10) return sv;
    } else {
        // complete with the orthogonal complement carrying the zero function
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B0.transpose());
        sv.by = lu.kernel();
        // orthonormalize
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(sv.by);
        sv.by = Eigen::MatrixXd(qr.householderQ()) .leftCols(m - B0.cols());
        sv.fy = ConvexFunctionSpec::zero(m - static_cast<int>(B0.cols()));
    }
    // J-invariance of both factors
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j + 1 < m; j += 2) {
        J(j + 1, j) = 1.0;
        J(j, j + 1) = -1.0;
    }
    for (const Eigen::MatrixXd* B : {&sv.bx, &sv.by}) {
        const Eigen::MatrixXd JB = J * (*B);
        if ((JB - (*B) * (B->transpose() * JB)).cwiseAbs().maxCoeff() > 1e-10) return sv;
    }
    sv.ok = true;
    return sv;
}

bool u_family(const ConvexFunctionSpec& f) {
    switch (f.kind()) {
        case K::DistanceCone:
        case K::Zero:
        case K::RadialProfile:
        case K::SmoothedCone:
            return true;
        case K::Scale:
        case K::AffineShift:
            return u_family(f.children()[0]);
        case K::Quadratic:
            return f.quadratic_A().cwiseAbs().maxCoeff() == 0.0;
        default:
            return false;
    }
}

// hyperplane kinks (|offset|, slope jump) of the real-cylinder piecewise
// linear family
std::vector<std::pair<double, double>> hyperplane_kinks(const ConvexFunctionSpec& f) {
    switch (f.kind()) {
        case K::HalfspaceCone:
            return {{f.offset(), 1.0}};
        case K::AbsCylinderCone:
            return {{f.offset(), 1.0}, {f.offset(), 1.0}};  // two parallel hyperplanes
        default:
            throw UnsupportedFunctionError("not a real-cylinder piecewise-linear function");
    }
}

double eval_term(const TermContext& tc, const ConvexFunctionSpec& f0, EvalReport& rep) {
    double lambda = 1.0;
    const ConvexFunctionSpec f = normalize_spec(f0, lambda);
    const double hom = std::pow(lambda, tc.idx.k);
    const int n = tc.idx.n, k = tc.idx.k;

    switch (f.kind()) {
        case K::Zero:
            rep.route = EvalRoute::ZeroFunction;
            return k == 0 ? hom * ut_measure(tc.tag, tc.idx, 0.0).pair_radial(*tc.weight) : 0.0;
        case K::DistanceCone: {
            rep.route = EvalRoute::ClosedFormCone;
            return hom * ut_measure(tc.tag, tc.idx, f.cone_t()).pair_radial(*tc.weight);
        }
        case K::RadialProfile:
        case K::SmoothedCone: {
            rep.route = EvalRoute::RadialSmooth;
            if (tc.tag == OperatorTag::Upsilon) return 0.0;
            return hom * radial_operator_integral(tc.tag, tc.idx, f.profile(), *tc.weight);
        }
        case K::Quadratic: {
            if (tc.tag == OperatorTag::Theta) {
                rep.route = EvalRoute::ConstantDensity;
                Eigen::VectorXd origin = Eigen::VectorXd::Zero(2 * n);
                const double dens = operator_density(tc.tag, tc.idx, f, origin);
                return hom * dens * sphere_area(2 * n) * tc.weight->tail_moment(0.0, 2 * n);
            }
            rep.route = EvalRoute::PvQuadrature;
            return hom * quadrature_route(tc, f, rep);
        }
        case K::HalfspaceCone:
        case K::AbsCylinderCone: {
            rep.route = EvalRoute::HyperplaneSurface;
            if (k >= 2 || tc.tag != OperatorTag::Theta) return 0.0;
            // k = 1: the measure is the slope jump times surface measure on
            // the kink hyperplanes
            double total = 0.0;
            for (const auto& [off, jump] : hyperplane_kinks(f))
                total += jump * sphere_area(2 * n - 1) *
                         tc.weight->slice_moment(0.0, off, 2 * n - 2);
            return hom * total;
        }
        default:
            break;
    }

    if (SplitView sv = try_split(f); sv.ok) {
        const int lx = static_cast<int>(sv.bx.cols()) / 2, ly = static_cast<int>(sv.by.cols()) / 2;
        if (u_family(sv.fx) && u_family(sv.fy)) {
            rep.route = EvalRoute::ProductSplit;
            if (tc.tag == OperatorTag::B || tc.tag == OperatorTag::C)
                throw UnsupportedFunctionError("product route only splits Theta and Upsilon");
            double total = 0.0;
            for (const auto& term :
                 product_decomposition(tc.tag, tc.idx, sv.fx, lx, sv.fy, ly))
                total += term.coeff * tensor_pair(*tc.weight, term.mx, term.my);
            return hom * total;
        }
    }

    if (smooth_everywhere(f)) {
        rep.route = EvalRoute::PvQuadrature;
        return hom * quadrature_route(tc, f, rep);
    }
    throw UnsupportedFunctionError("evaluate: no computable route for this function");
}

}  // namespace

EvalReport evaluate_report(const ValuationSpec& mu, const ConvexFunctionSpec& f) {
    mu.validate();
    if (f.dim() != 2 * mu.n)
        throw UnsupportedFunctionError("evaluate: function dimension does not match C^n");
    EvalReport rep;
    std::vector<double> vals;
    for (const auto& term : mu.terms) {
        TermContext tc{term.tag == 'T' ? OperatorTag::Theta : OperatorTag::Upsilon,
                       HermitianIndex(mu.n, mu.k, term.q), &term.weight};
        const double v = eval_term(tc, f, rep);
        rep.scale = std::max(rep.scale, std::abs(v));
        vals.push_back(v);
    }
    rep.value = kahan_sum(vals);
    return rep;
}

double evaluate(const ValuationSpec& mu, const ConvexFunctionSpec& f) {
    return evaluate_report(mu, f).value;
}

double polarized_eval(const ValuationSpec& mu, const ConvexFunctionSpec& f,
                      const ConvexFunctionSpec& g, int j) {
    const int k = mu.k;
    if (j < 0 || j > k) throw IndexDomainError("polarized_eval: j out of [0, k]");
    const int m = k + 1;
    Eigen::MatrixXd M(m, m);
    for (int i = 0; i < m; ++i)
        for (int l = 0; l < m; ++l) {
            ConvexFunctionSpec sum = ConvexFunctionSpec::sum(
                {ConvexFunctionSpec::scale(static_cast<double>(i), f),
                 ConvexFunctionSpec::scale(static_cast<double>(l), g)});
            M(i, l) = evaluate(mu, sum);
        }
    Eigen::MatrixXd V(m, m);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < m; ++a) V(i, a) = std::pow(static_cast<double>(i), a);
    // coefficients C = V^{-1} M V^{-T}
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);
    Eigen::MatrixXd C = lu.solve(M);
    C = lu.solve(C.transpose()).transpose();
    // degree-k homogeneity sanity: off-degree coefficients must vanish
    double scale = 1e-30;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) scale = std::max(scale, std::abs(C(a, b)));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a + b != k && std::abs(C(a, b)) > 1e-6 * scale)
                throw PolynomialDegreeError(
                    "polarized_eval: interpolation residual exceeds tolerance (degree " +
                    std::to_string(a) + "," + std::to_string(b) + ")");
    return C(j, k - j);
}

double intrinsic_volume_ball(const HermitianIndex& idx) {
    if (idx.k < 1 || idx.k > 2 * idx.n - 1)
        throw IndexDomainError("intrinsic_volume_ball: requires 1 <= k <= 2n-1");
    const WeightFunction ind = WeightFunction::indicator(1.0);
    return ut_measure(OperatorTag::Theta, idx, 0.0).pair_radial(ind) /
           unit_ball_volume(2 * idx.n - idx.k);
}

double valuation_identity_check(const ValuationSpec& mu, const ConvexFunctionSpec& f,
                                const ConvexFunctionSpec& g) {
    const double vf = evaluate(mu, f);
    const double vg = evaluate(mu, g);
    const double vmax = evaluate(mu, lattice_max(f, g));
    const double vmin = evaluate(mu, lattice_min(f, g));
    return std::abs(vf + vg - vmax - vmin);
}

ConvexFunctionSpec compose_linear(const ConvexFunctionSpec& f, const Eigen::MatrixXd& M) {
    switch (f.kind()) {
        case K::Quadratic:
            return ConvexFunctionSpec::quadratic(M.transpose() * f.quadratic_A() * M,
                                                 M.transpose() * f.linear_b(), f.constant_c());
        case K::RadialProfile:
        case K::SmoothedCone:
        case K::DistanceCone:
        case K::Zero:
            return f;  // rotation invariant families
        case K::CylinderLift:
            return cylinder_lift_basis(M.transpose() * f.lift_basis(), f.children()[0]);
        case K::HalfspaceCone:
            return ConvexFunctionSpec::halfspace_cone(M.transpose() * f.direction(), f.offset(),
                                                      f.halfspace_sign());
        case K::AbsCylinderCone:
            return ConvexFunctionSpec::abs_cylinder_cone(M.transpose() * f.direction(),
                                                         f.offset());
        case K::Sum: {
            std::vector<ConvexFunctionSpec> ch;
            for (const auto& c : f.children()) ch.push_back(compose_linear(c, M));
            return ConvexFunctionSpec::sum(std::move(ch));
        }
        case K::Scale:
            return ConvexFunctionSpec::scale(f.scale_factor(), compose_linear(f.children()[0], M));
        case K::AffineShift:
            return ConvexFunctionSpec::affine_shift(M.transpose() * f.linear_b(), f.constant_c(),
                                                    compose_linear(f.children()[0], M));
        case K::LatticeMax:
            return lattice_max(compose_linear(f.children()[0], M),
                               compose_linear(f.children()[1], M));
        case K::LatticeMin:
            return lattice_min(compose_linear(f.children()[0], M),
                               compose_linear(f.children()[1], M));
    }
    throw std::logic_error("unreachable");
}

double invariance_check(const ValuationSpec& mu, const ConvexFunctionSpec& f, InvarianceMode mode,
                        std::uint64_t seed) {
    switch (mode) {
        case InvarianceMode::Affine: {
            Eigen::VectorXd v(f.dim());
            std::mt19937_64 eng(seed);
            std::uniform_real_distribution<double> U(-0.5, 0.5);
            for (int d = 0; d < f.dim(); ++d) v(d) = U(eng);
            const double base = evaluate(mu, f);
            const double shifted = evaluate(mu, ConvexFunctionSpec::affine_shift(v, 3.0, f));
            return std::abs(shifted - base);
        }
        case InvarianceMode::Unitary: {
            const Eigen::MatrixXd U = haar_unitary(mu.n, seed);
            const double base = evaluate(mu, f);
            const double rotated = evaluate(mu, compose_linear(f, U));
            return std::abs(rotated - base);
        }
        case InvarianceMode::Homogeneity: {
            const double t = 2.0;
            const double lhs = evaluate(mu, ConvexFunctionSpec::scale(t, f));
            const double rhs = std::pow(t, mu.k) * evaluate(mu, f);
            return std::abs(lhs - rhs);
        }
    }
    throw std::logic_error("unreachable");
}

nlohmann::json to_json(const ValuationSpec& v) {
    nlohmann::json j;
    j["n"] = v.n;
    j["k"] = v.k;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : v.terms) {
        nlohmann::json tj;
        tj["tag"] = std::string(1, t.tag);
        tj["q"] = t.q;
        tj["weight"] = to_json(t.weight.impl() == WeightFunction::Impl::Custom
                                   ? t.weight.sampled()
                                   : t.weight);
        terms.push_back(tj);
    }
    j["terms"] = terms;
    return j;
}

ValuationSpec valuation_from_json(const nlohmann::json& j) {
    ValuationSpec v;
    v.n = j.at("n").get<int>();
    v.k = j.at("k").get<int>();
    for (const auto& tj : j.at("terms")) {
        ValuationTerm t;
        t.tag = tj.at("tag").get<std::string>().at(0);
        t.q = tj.at("q").get<int>();
        t.weight = weight_from_json(tj.at("weight"));
        v.terms.push_back(std::move(t));
    }
    v.validate();
    return v;
}

}  // namespace hma
