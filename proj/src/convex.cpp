#include "hma/convex.hpp"

#include <cmath>
#include <random>

namespace hma {

namespace {

constexpr double kKinkTol = 1e-11;

double poly_eval(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
    return v;
}

}  // namespace

ProfileSpec affine_profile(double value_at_zero, double slope) {
    ProfileSpec p;
    p.kind = "affine";
    p.params = {value_at_zero, slope};
    p.h = [=](double s) { return value_at_zero + slope * s; };
    p.dh = [=](double) { return slope; };
    p.d2h = [](double) { return 0.0; };
    if (slope < 0) throw ConvexityCertificateError("affine profile: slope must be >= 0");
    return p;
}

ProfileSpec polynomial_profile(std::vector<double> coeffs) {
    ProfileSpec p;
    p.kind = "polynomial";
    p.params = coeffs;
    std::vector<double> d1(coeffs.size() > 1 ? coeffs.size() - 1 : 0);
    for (std::size_t i = 1; i < coeffs.size(); ++i) d1[i - 1] = i * coeffs[i];
    std::vector<double> d2(d1.size() > 1 ? d1.size() - 1 : 0);
    for (std::size_t i = 1; i < d1.size(); ++i) d2[i - 1] = i * d1[i];
    p.h = [coeffs](double s) { return poly_eval(coeffs, s); };
    p.dh = [d1](double s) { return poly_eval(d1, s); };
    p.d2h = [d2](double s) { return poly_eval(d2, s); };
    check_profile_convexity(p, 4.0);
    return p;
}

ProfileSpec smoothed_cone_profile(double t, double eps) {
    if (!(eps > 0.0)) throw ParameterError("smoothed_cone_profile: eps must be > 0");
    if (t < 0.0) throw ParameterError("smoothed_cone_profile: t must be >= 0");
    ProfileSpec p;
    p.kind = "smoothed-cone";
    p.params = {t, eps};
    p.h = [t, eps](double s) {
        const double u = std::sqrt(s + eps * eps);
        return 0.5 * (std::sqrt((u - t) * (u - t) + eps * eps) + u - t);
    };
    p.dh = [t, eps](double s) {
        const double u = std::sqrt(s + eps * eps);
        const double w = std::sqrt((u - t) * (u - t) + eps * eps);
        return 0.25 * (w + u - t) / (u * w);
    };
    p.d2h = [t, eps](double s) {
        const double u = std::sqrt(s + eps * eps);
        const double w = std::sqrt((u - t) * (u - t) + eps * eps);
        const double num = std::pow(u - t, 3) + w * w * w - (t - u) * eps * eps - u * eps * eps;
        return -0.125 * num / (u * u * u * w * w * w);
    };
    return p;
}

void check_profile_convexity(const ProfileSpec& p, double radius) {
    for (int i = 0; i <= 64; ++i) {
        const double s = radius * radius * i / 64.0 + 1e-9;
        if (p.dh(s) < -1e-9)
            throw ConvexityCertificateError("profile not monotone at s=" + std::to_string(s));
        if (p.dh(s) + 2.0 * s * p.d2h(s) < -1e-9)
            throw ConvexityCertificateError("profile not convex at s=" + std::to_string(s));
    }
}

const ProfileSpec& ConvexFunctionSpec::profile() const {
    if (!profile_) throw ParameterError("spec has no radial profile");
    return *profile_;
}

ConvexFunctionSpec ConvexFunctionSpec::quadratic(const Eigen::MatrixXd& A,
                                                 const Eigen::VectorXd& b, double c) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw ParameterError("quadratic: dimension mismatch");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ParameterError("quadratic: A must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw ConvexityCertificateError("quadratic: A must be positive semi-definite");
    ConvexFunctionSpec f;
    f.kind_ = Kind::Quadratic;
    f.dim_ = static_cast<int>(A.rows());
    f.A_ = A;
    f.b_ = b;
    f.c_ = c;
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::radial(int dim, ProfileSpec profile) {
    check_profile_convexity(profile, 4.0);
    ConvexFunctionSpec f;
    f.kind_ = Kind::RadialProfile;
    f.dim_ = dim;
    f.profile_ = std::make_shared<ProfileSpec>(std::move(profile));
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::distance_cone(int dim, double t) {
    if (t < 0) throw ParameterError("distance_cone: t must be >= 0");
    ConvexFunctionSpec f;
    f.kind_ = Kind::DistanceCone;
    f.dim_ = dim;
    f.t_ = t;
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::smoothed_cone(int dim, double t, double eps) {
    ConvexFunctionSpec f;
    f.kind_ = Kind::SmoothedCone;
    f.dim_ = dim;
    f.t_ = t;
    f.eps_ = eps;
    f.profile_ = std::make_shared<ProfileSpec>(smoothed_cone_profile(t, eps));
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::halfspace_cone(const Eigen::VectorXd& direction, double a0,
                                                      int sign) {
    if (a0 <= 0) throw ParameterError("halfspace_cone: offset must be > 0");
    ConvexFunctionSpec f;
    f.kind_ = Kind::HalfspaceCone;
    f.dim_ = static_cast<int>(direction.size());
    f.dir_ = direction.normalized();
    f.t_ = a0;
    f.sign_ = sign >= 0 ? 1 : -1;
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::abs_cylinder_cone(const Eigen::VectorXd& direction,
                                                         double a0) {
    if (a0 <= 0) throw ParameterError("abs_cylinder_cone: offset must be > 0");
    ConvexFunctionSpec f;
    f.kind_ = Kind::AbsCylinderCone;
    f.dim_ = static_cast<int>(direction.size());
    f.dir_ = direction.normalized();
    f.t_ = a0;
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::zero(int dim) {
    ConvexFunctionSpec f;
    f.kind_ = Kind::Zero;
    f.dim_ = dim;
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::sum(std::vector<ConvexFunctionSpec> children) {
    if (children.empty()) throw ParameterError("sum: needs at least one term");
    ConvexFunctionSpec f;
    f.kind_ = Kind::Sum;
    f.dim_ = children.front().dim();
    for (const auto& ch : children)
        if (ch.dim() != f.dim_) throw ParameterError("sum: dimension mismatch");
    f.children_ = std::move(children);
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::scale(double lambda, ConvexFunctionSpec inner) {
    if (lambda < 0) throw ParameterError("scale: lambda must be >= 0");
    ConvexFunctionSpec f;
    f.kind_ = Kind::Scale;
    f.dim_ = inner.dim();
    f.lambda_ = lambda;
    f.children_ = {std::move(inner)};
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::affine_shift(const Eigen::VectorXd& v, double c,
                                                    ConvexFunctionSpec inner) {
    if (v.size() != inner.dim()) throw ParameterError("affine_shift: dimension mismatch");
    ConvexFunctionSpec f;
    f.kind_ = Kind::AffineShift;
    f.dim_ = inner.dim();
    f.b_ = v;
    f.c_ = c;
    f.children_ = {std::move(inner)};
    return f;
}

ConvexFunctionSpec cylinder_lift_basis(const Eigen::MatrixXd& basis, ConvexFunctionSpec inner) {
    if (basis.cols() != inner.dim())
        throw SplitError("cylinder_lift: basis columns must match inner dimension");
    if ((basis.transpose() * basis - Eigen::MatrixXd::Identity(basis.cols(), basis.cols()))
            .cwiseAbs()
            .maxCoeff() > 1e-10)
        throw SplitError("cylinder_lift: basis must be orthonormal");
    ConvexFunctionSpec f;
    f.kind_ = ConvexFunctionSpec::Kind::CylinderLift;
    f.dim_ = static_cast<int>(basis.rows());
    f.basis_ = basis;
    f.children_ = {std::move(inner)};
    return f;
}

namespace {

bool j_invariant(const Eigen::MatrixXd& basis) {
    const int m = static_cast<int>(basis.rows());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j + 1 < m; j += 2) {
        J(j + 1, j) = 1.0;
        J(j, j + 1) = -1.0;
    }
    // column space closed under J: J*B = B * (B^T J B) up to tolerance
    const Eigen::MatrixXd JB = J * basis;
    const Eigen::MatrixXd proj = basis * (basis.transpose() * JB);
    return (JB - proj).cwiseAbs().maxCoeff() < 1e-10;
}

}  // namespace

ConvexFunctionSpec cylinder_lift(const Eigen::MatrixXd& basis_x, ConvexFunctionSpec fx,
                                 const Eigen::MatrixXd& basis_y, ConvexFunctionSpec fy) {
    if (basis_x.rows() != basis_y.rows()) throw SplitError("cylinder_lift: ambient mismatch");
    if (!j_invariant(basis_x) || !j_invariant(basis_y))
        throw SplitError("cylinder_lift: factors must be J-invariant");
    if ((basis_x.transpose() * basis_y).cwiseAbs().maxCoeff() > 1e-10)
        throw SplitError("cylinder_lift: factors must be orthogonal");
    return ConvexFunctionSpec::sum(
        {cylinder_lift_basis(basis_x, std::move(fx)), cylinder_lift_basis(basis_y, std::move(fy))});
}

ConvexFunctionSpec lattice_max(const ConvexFunctionSpec& a, const ConvexFunctionSpec& b) {
    if (a.dim() != b.dim()) throw ParameterError("lattice_max: dimension mismatch");
    ConvexFunctionSpec f;
    f.kind_ = ConvexFunctionSpec::Kind::LatticeMax;
    f.dim_ = a.dim();
    f.children_ = {a, b};
    return f;
}

namespace {

bool is_certified_pair(const ConvexFunctionSpec& a, const ConvexFunctionSpec& b) {
    using K = ConvexFunctionSpec::Kind;
    if (a.kind() != K::HalfspaceCone || b.kind() != K::HalfspaceCone) return false;
    if (a.halfspace_sign() == b.halfspace_sign()) return false;
    if (std::abs(a.offset() - b.offset()) > 1e-12) return false;
    return (a.direction() - b.direction()).norm() < 1e-12;
}

}  // namespace

ConvexFunctionSpec lattice_min(const ConvexFunctionSpec& a, const ConvexFunctionSpec& b) {
    if (a.dim() != b.dim()) throw ParameterError("lattice_min: dimension mismatch");
    ConvexFunctionSpec f;
    f.kind_ = ConvexFunctionSpec::Kind::LatticeMin;
    f.dim_ = a.dim();
    f.children_ = {a, b};
    f.certified_ = is_certified_pair(a, b);
    if (!f.certified_) {
        // fall back to a numeric midpoint check before accepting
        if (!convexity_spot_check(f, 2.0, 500, 20240601ull))
            throw ConvexityCertificateError("lattice_min: pointwise minimum fails convexity check");
        f.certified_ = false;
    }
    return f;
}

std::pair<ConvexFunctionSpec, ConvexFunctionSpec> certified_disjoint_pair(
    const Eigen::VectorXd& direction, double a0) {
    return {ConvexFunctionSpec::halfspace_cone(direction, a0, +1),
            ConvexFunctionSpec::halfspace_cone(direction, a0, -1)};
}

double ConvexFunctionSpec::evaluate(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::Quadratic:
            return x.dot(A_ * x) + b_.dot(x) + c_;
        case Kind::RadialProfile:
        case Kind::SmoothedCone:
            return profile_->h(x.squaredNorm());
        case Kind::DistanceCone:
            return std::max(0.0, x.norm() - t_);
        case Kind::CylinderLift:
            return children_[0].evaluate(basis_.transpose() * x);
        case Kind::HalfspaceCone:
            return std::max(0.0, sign_ * dir_.dot(x) - t_);
        case Kind::AbsCylinderCone:
            return std::max(0.0, std::abs(dir_.dot(x)) - t_);
        case Kind::Zero:
            return 0.0;
        case Kind::Sum: {
            double s = 0.0;
            for (const auto& ch : children_) s += ch.evaluate(x);
            return s;
        }
        case Kind::Scale:
            return lambda_ * children_[0].evaluate(x);
        case Kind::AffineShift:
            return children_[0].evaluate(x) + b_.dot(x) + c_;
        case Kind::LatticeMax:
            return std::max(children_[0].evaluate(x), children_[1].evaluate(x));
        case Kind::LatticeMin:
            return std::min(children_[0].evaluate(x), children_[1].evaluate(x));
    }
    throw std::logic_error("unreachable");
}

bool ConvexFunctionSpec::smooth_at(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::Quadratic:
        case Kind::RadialProfile:
        case Kind::SmoothedCone:
        case Kind::Zero:
            return true;
        case Kind::DistanceCone: {
            const double r = x.norm();
            return std::abs(r - t_) > kKinkTol && r > kKinkTol;
        }
        case Kind::CylinderLift:
            return children_[0].smooth_at(basis_.transpose() * x);
        case Kind::HalfspaceCone:
            return std::abs(sign_ * dir_.dot(x) - t_) > kKinkTol;
        case Kind::AbsCylinderCone:
            return std::abs(std::abs(dir_.dot(x)) - t_) > kKinkTol;
        case Kind::Sum: {
            for (const auto& ch : children_)
                if (!ch.smooth_at(x)) return false;
            return true;
        }
        case Kind::Scale:
        case Kind::AffineShift:
            return children_[0].smooth_at(x);
        case Kind::LatticeMax:
        case Kind::LatticeMin: {
            const double fa = children_[0].evaluate(x), fb = children_[1].evaluate(x);
            if (std::abs(fa - fb) <= kKinkTol) return false;
            const bool first = (kind_ == Kind::LatticeMax) ? fa > fb : fa < fb;
            return children_[first ? 0 : 1].smooth_at(x);
        }
    }
    return false;
}

Eigen::VectorXd ConvexFunctionSpec::gradient(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::Quadratic:
            return 2.0 * A_ * x + b_;
        case Kind::RadialProfile:
        case Kind::SmoothedCone:
            return 2.0 * profile_->dh(x.squaredNorm()) * x;
        case Kind::DistanceCone: {
            const double r = x.norm();
            if (std::abs(r - t_) <= kKinkTol || r <= kKinkTol)
                throw NonSmoothPointError("distance cone kink at |z| in {0, t}", x);
            if (r < t_) return Eigen::VectorXd::Zero(dim_);
            return x / r;
        }
        case Kind::CylinderLift:
            return basis_ * children_[0].gradient(basis_.transpose() * x);
        case Kind::HalfspaceCone: {
            const double v = sign_ * dir_.dot(x) - t_;
            if (std::abs(v) <= kKinkTol)
                throw NonSmoothPointError("halfspace cone kink", x);
            if (v < 0) return Eigen::VectorXd::Zero(dim_);
            return sign_ * dir_;
        }
        case Kind::AbsCylinderCone: {
            const double u = dir_.dot(x);
            if (std::abs(std::abs(u) - t_) <= kKinkTol)
                throw NonSmoothPointError("cylinder cone kink", x);
            if (std::abs(u) < t_) return Eigen::VectorXd::Zero(dim_);
            return (u > 0 ? 1.0 : -1.0) * dir_;
        }
        case Kind::Zero:
            return Eigen::VectorXd::Zero(dim_);
        case Kind::Sum: {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
            for (const auto& ch : children_) g += ch.gradient(x);
            return g;
        }
        case Kind::Scale:
            return lambda_ * children_[0].gradient(x);
        case Kind::AffineShift:
            return children_[0].gradient(x) + b_;
        case Kind::LatticeMax:
        case Kind::LatticeMin: {
            const double fa = children_[0].evaluate(x), fb = children_[1].evaluate(x);
            if (std::abs(fa - fb) <= kKinkTol)
                throw NonSmoothPointError("lattice switching set", x);
            const bool first = (kind_ == Kind::LatticeMax) ? fa > fb : fa < fb;
            return children_[first ? 0 : 1].gradient(x);
        }
    }
    throw std::logic_error("unreachable");
}

Eigen::MatrixXd ConvexFunctionSpec::hessian(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::Quadratic:
            return 2.0 * A_;
        case Kind::RadialProfile:
        case Kind::SmoothedCone: {
            const double s = x.squaredNorm();
            return 2.0 * profile_->dh(s) * Eigen::MatrixXd::Identity(dim_, dim_) +
                   4.0 * profile_->d2h(s) * x * x.transpose();
        }
        case Kind::DistanceCone: {
            const double r = x.norm();
            if (std::abs(r - t_) <= kKinkTol || r <= kKinkTol)
                throw NonSmoothPointError("distance cone kink at |z| in {0, t}", x);
            if (r < t_) return Eigen::MatrixXd::Zero(dim_, dim_);
            const Eigen::VectorXd u = x / r;
            return (Eigen::MatrixXd::Identity(dim_, dim_) - u * u.transpose()) / r;
        }
        case Kind::CylinderLift:
            return basis_ * children_[0].hessian(basis_.transpose() * x) * basis_.transpose();
        case Kind::HalfspaceCone:
        case Kind::AbsCylinderCone: {
            gradient(x);  // throws on the kink set
            return Eigen::MatrixXd::Zero(dim_, dim_);
        }
        case Kind::Zero:
            return Eigen::MatrixXd::Zero(dim_, dim_);
        case Kind::Sum: {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
            for (const auto& ch : children_) h += ch.hessian(x);
            return h;
        }
        case Kind::Scale:
            return lambda_ * children_[0].hessian(x);
        case Kind::AffineShift:
            return children_[0].hessian(x);
        case Kind::LatticeMax:
        case Kind::LatticeMin: {
            const double fa = children_[0].evaluate(x), fb = children_[1].evaluate(x);
            if (std::abs(fa - fb) <= kKinkTol)
                throw NonSmoothPointError("lattice switching set", x);
            const bool first = (kind_ == Kind::LatticeMax) ? fa > fb : fa < fb;
            return children_[first ? 0 : 1].hessian(x);
        }
    }
    throw std::logic_error("unreachable");
}

double legendre(const ConvexFunctionSpec& f, const Eigen::VectorXd& y) {
    using K = ConvexFunctionSpec::Kind;
    if (f.kind() == K::Quadratic) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.quadratic_A());
        if (es.eigenvalues().minCoeff() < 1e-12)
            throw UnsupportedConjugateError("legendre: quadratic must be positive definite");
        const Eigen::VectorXd d = y - f.linear_b();
        return 0.25 * d.dot(f.quadratic_A().ldlt().solve(d)) - f.constant_c();
    }
    if (f.kind() == K::RadialProfile || f.kind() == K::SmoothedCone) {
        // solve 2 r h'(r^2) = |y| by bisection; requires strictly increasing map
        const auto& p = f.profile();
        const double ynorm = y.norm();
        const auto g = [&](double r) { return 2.0 * r * p.dh(r * r); };
        if (ynorm == 0.0) return -p.h(0.0);
        double lo = 0.0, hi = 1.0;
        int guard = 0;
        while (g(hi) < ynorm) {
            hi *= 2.0;
            if (++guard > 200)
                throw UnsupportedConjugateError("legendre: gradient map does not reach |y|");
        }
        if (g(hi * 0.5 + 1e-9) <= g(1e-9))
            throw UnsupportedConjugateError("legendre: profile not strongly convex");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < ynorm ? lo : hi) = mid;
        }
        const double r = 0.5 * (lo + hi);
        return r * ynorm - p.h(r * r);
    }
    throw UnsupportedConjugateError("legendre: unsupported family");
}

bool convexity_spot_check(const ConvexFunctionSpec& f, double radius, int samples,
                          std::uint64_t seed, double tol) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> U(-radius, radius);
    std::uniform_real_distribution<double> L(0.0, 1.0);
    Eigen::VectorXd x(f.dim()), y(f.dim());
    double scale = 1.0;
    for (int i = 0; i < samples; ++i) {
        for (int d = 0; d < f.dim(); ++d) {
            x(d) = U(eng);
            y(d) = U(eng);
        }
        const double lam = L(eng);
        const double lhs = f.evaluate(lam * x + (1.0 - lam) * y);
        const double rhs = lam * f.evaluate(x) + (1.0 - lam) * f.evaluate(y);
        scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        if (lhs > rhs + tol * scale) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
    return v;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json j = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows ? static_cast<int>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    return m;
}

nlohmann::json profile_to_json(const ProfileSpec& p) {
    nlohmann::json j;
    j["kind"] = p.kind;
    j["params"] = p.params;
    return j;
}

ProfileSpec profile_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const std::vector<double> params = j.at("params").get<std::vector<double>>();
    if (kind == "affine") return affine_profile(params.at(0), params.at(1));
    if (kind == "polynomial") return polynomial_profile(params);
    if (kind == "smoothed-cone") return smoothed_cone_profile(params.at(0), params.at(1));
    throw ParameterError("profile_from_json: unknown kind " + kind);
}

}  // namespace

nlohmann::json to_json(const ConvexFunctionSpec& f) {
    using K = ConvexFunctionSpec::Kind;
    nlohmann::json j;
    switch (f.kind()) {
        case K::Quadratic:
            j["variant"] = "quadratic";
            j["A"] = mat_to_json(f.quadratic_A());
            j["b"] = vec_to_json(f.linear_b());
            j["c"] = f.constant_c();
            break;
        case K::RadialProfile:
            j["variant"] = "radial_profile";
            j["dim"] = f.dim();
            j["profile"] = profile_to_json(f.profile());
            break;
        case K::DistanceCone:
            j["variant"] = "distance_cone";
            j["dim"] = f.dim();
            j["t"] = f.cone_t();
            break;
        case K::SmoothedCone:
            j["variant"] = "smoothed_cone";
            j["dim"] = f.dim();
            j["t"] = f.cone_t();
            j["eps"] = f.cone_eps();
            break;
        case K::CylinderLift:
            j["variant"] = "cylinder";
            j["basis"] = mat_to_json(f.lift_basis());
            j["inner"] = to_json(f.children()[0]);
            break;
        case K::HalfspaceCone:
            j["variant"] = "halfspace_cone";
            j["direction"] = vec_to_json(f.direction());
            j["a0"] = f.offset();
            j["sign"] = f.halfspace_sign();
            break;
        case K::AbsCylinderCone:
            j["variant"] = "abs_cylinder_cone";
            j["direction"] = vec_to_json(f.direction());
            j["a0"] = f.offset();
            break;
        case K::Zero:
            j["variant"] = "zero";
            j["dim"] = f.dim();
            break;
        case K::Sum: {
            j["variant"] = "sum";
            nlohmann::json terms = nlohmann::json::array();
            for (const auto& ch : f.children()) terms.push_back(to_json(ch));
            j["terms"] = terms;
            break;
        }
        case K::Scale:
            j["variant"] = "scale";
            j["lambda"] = f.scale_factor();
            j["inner"] = to_json(f.children()[0]);
            break;
        case K::AffineShift:
            j["variant"] = "affine_shift";
            j["linear"] = vec_to_json(f.linear_b());
            j["constant"] = f.constant_c();
            j["inner"] = to_json(f.children()[0]);
            break;
        case K::LatticeMax:
            j["variant"] = "lattice_max";
            j["a"] = to_json(f.children()[0]);
            j["b"] = to_json(f.children()[1]);
            break;
        case K::LatticeMin:
            j["variant"] = "lattice_min";
            j["a"] = to_json(f.children()[0]);
            j["b"] = to_json(f.children()[1]);
            break;
    }
    return j;
}

ConvexFunctionSpec convex_from_json(const nlohmann::json& j) {
    const std::string v = j.at("variant").get<std::string>();
    if (v == "quadratic")
        return ConvexFunctionSpec::quadratic(mat_from_json(j.at("A")), vec_from_json(j.at("b")),
                                             j.at("c").get<double>());
    if (v == "radial_profile")
        return ConvexFunctionSpec::radial(j.at("dim").get<int>(), profile_from_json(j.at("profile")));
    if (v == "distance_cone")
        return ConvexFunctionSpec::distance_cone(j.at("dim").get<int>(), j.at("t").get<double>());
    if (v == "smoothed_cone")
        return ConvexFunctionSpec::smoothed_cone(j.at("dim").get<int>(), j.at("t").get<double>(),
                                                 j.at("eps").get<double>());
    if (v == "cylinder")
        return cylinder_lift_basis(mat_from_json(j.at("basis")), convex_from_json(j.at("inner")));
    if (v == "halfspace_cone")
        return ConvexFunctionSpec::halfspace_cone(vec_from_json(j.at("direction")),
                                                  j.at("a0").get<double>(), j.at("sign").get<int>());
    if (v == "abs_cylinder_cone")
        return ConvexFunctionSpec::abs_cylinder_cone(vec_from_json(j.at("direction")),
                                                     j.at("a0").get<double>());
    if (v == "zero") return ConvexFunctionSpec::zero(j.at("dim").get<int>());
    if (v == "sum") {
        std::vector<ConvexFunctionSpec> terms;
        for (const auto& tj : j.at("terms")) terms.push_back(convex_from_json(tj));
        return ConvexFunctionSpec::sum(std::move(terms));
    }
    if (v == "scale")
        return ConvexFunctionSpec::scale(j.at("lambda").get<double>(),
                                         convex_from_json(j.at("inner")));
    if (v == "affine_shift")
        return ConvexFunctionSpec::affine_shift(vec_from_json(j.at("linear")),
                                                j.at("constant").get<double>(),
                                                convex_from_json(j.at("inner")));
    if (v == "lattice_max")
        return lattice_max(convex_from_json(j.at("a")), convex_from_json(j.at("b")));
    if (v == "lattice_min")
        return lattice_min(convex_from_json(j.at("a")), convex_from_json(j.at("b")));
    throw ParameterError("convex_from_json: unknown variant " + v);
}

}  // namespace hma
