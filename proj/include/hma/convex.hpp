#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vendor_json_fwd.hpp"

// Structured convex functions on R^{2n} ~ C^n with exact value / gradient /
// Hessian, Legendre conjugates for the tractable families, lattice
// operations, and the radial test families used throughout. Specs are
// immutable after construction; all evaluation is pure.

namespace hma {

class NonSmoothPointError : public std::runtime_error {
public:
    NonSmoothPointError(const std::string& what, Eigen::VectorXd locus_)
        : std::runtime_error(what), locus(std::move(locus_)) {}
    Eigen::VectorXd locus;
};

class ConvexityCertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedConjugateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SplitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Scalar profile h with derivatives; f(z) = h(|z|^2).
struct ProfileSpec {
    std::string kind = "custom";  // affine | polynomial | smoothed-cone | custom
    std::vector<double> params;   // polynomial coefficients, or (t, eps)
    std::function<double(double)> h, dh, d2h;

    double operator()(double s) const { return h(s); }
};

ProfileSpec affine_profile(double value_at_zero, double slope);
ProfileSpec polynomial_profile(std::vector<double> coeffs);  // h(s) = sum c_i s^i
// The smoothing family of the cone distance u_t; eps > 0.
ProfileSpec smoothed_cone_profile(double t, double eps);
// Convexity of s -> h(|z|^2): dh >= 0 and dh + 2 s d2h >= 0 on samples.
void check_profile_convexity(const ProfileSpec& p, double radius);

class ConvexFunctionSpec {
public:
    ConvexFunctionSpec() = default;  // the zero function on R^0

    enum class Kind {
        Quadratic,     // <Ax,x> + <b,x> + c
        RadialProfile, // h(|z|^2)
        DistanceCone,  // max(0, |z| - t)
        SmoothedCone,  // h_eps profile, kept distinct for routing
        CylinderLift,  // inner(B^T z)
        HalfspaceCone, // max(0, s<u,z> - a0)
        AbsCylinderCone, // max(0, |<u,z>| - a0)
        Zero,
        Sum,
        Scale,
        AffineShift,   // inner + <v,z> + c
        LatticeMax,
        LatticeMin,
    };

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    double evaluate(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
    bool smooth_at(const Eigen::VectorXd& x) const;

    // accessors used by routing and tests
    const ProfileSpec& profile() const;
    double cone_t() const { return t_; }
    double cone_eps() const { return eps_; }
    double scale_factor() const { return lambda_; }
    const Eigen::MatrixXd& quadratic_A() const { return A_; }
    const Eigen::VectorXd& linear_b() const { return b_; }
    double constant_c() const { return c_; }
    const Eigen::MatrixXd& lift_basis() const { return basis_; }
    const Eigen::VectorXd& direction() const { return dir_; }
    double offset() const { return t_; }
    int halfspace_sign() const { return sign_; }
    const std::vector<ConvexFunctionSpec>& children() const { return children_; }
    bool min_certified() const { return certified_; }

    // factories
    static ConvexFunctionSpec quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                        double c);
    static ConvexFunctionSpec radial(int dim, ProfileSpec profile);
    static ConvexFunctionSpec distance_cone(int dim, double t);
    static ConvexFunctionSpec smoothed_cone(int dim, double t, double eps);
    static ConvexFunctionSpec halfspace_cone(const Eigen::VectorXd& direction, double a0,
                                             int sign);
    static ConvexFunctionSpec abs_cylinder_cone(const Eigen::VectorXd& direction, double a0);
    static ConvexFunctionSpec zero(int dim);
    static ConvexFunctionSpec sum(std::vector<ConvexFunctionSpec> children);
    static ConvexFunctionSpec scale(double lambda, ConvexFunctionSpec inner);
    static ConvexFunctionSpec affine_shift(const Eigen::VectorXd& v, double c,
                                           ConvexFunctionSpec inner);

private:
    friend ConvexFunctionSpec cylinder_lift_basis(const Eigen::MatrixXd&, ConvexFunctionSpec);
    friend ConvexFunctionSpec lattice_max(const ConvexFunctionSpec&, const ConvexFunctionSpec&);
    friend ConvexFunctionSpec lattice_min(const ConvexFunctionSpec&, const ConvexFunctionSpec&);

    Kind kind_ = Kind::Zero;
    int dim_ = 0;
    Eigen::MatrixXd A_, basis_;
    Eigen::VectorXd b_, dir_;
    double c_ = 0.0, t_ = 0.0, eps_ = 0.0, lambda_ = 1.0;
    int sign_ = 1;
    std::shared_ptr<const ProfileSpec> profile_;
    std::vector<ConvexFunctionSpec> children_;
    bool certified_ = false;
};

// Constant extension along the orthogonal complement of the column space of
// `basis` (orthonormal columns): z -> inner(basis^T z).
ConvexFunctionSpec cylinder_lift_basis(const Eigen::MatrixXd& basis, ConvexFunctionSpec inner);

// Lift of f_X, f_Y along a complex-orthogonal split given by two orthonormal
// J-invariant bases; throws SplitError if a factor is not J-invariant.
ConvexFunctionSpec cylinder_lift(const Eigen::MatrixXd& basis_x, ConvexFunctionSpec fx,
                                 const Eigen::MatrixXd& basis_y, ConvexFunctionSpec fy);

ConvexFunctionSpec lattice_max(const ConvexFunctionSpec& a, const ConvexFunctionSpec& b);
// Only certified-convex minima are accepted; the canonical certified family
// is the disjoint-active-region pair below.
ConvexFunctionSpec lattice_min(const ConvexFunctionSpec& a, const ConvexFunctionSpec& b);

// f = max(0, <u,z> - a0), g = max(0, -<u,z> - a0) with a0 > 0: the active
// half-spaces are disjoint, so f ^ g = 0 and f v g = max(0, |<u,z>| - a0).
std::pair<ConvexFunctionSpec, ConvexFunctionSpec> certified_disjoint_pair(
    const Eigen::VectorXd& direction, double a0);

// Legendre transform at a point; restricted to strongly convex families.
double legendre(const ConvexFunctionSpec& f, const Eigen::VectorXd& y);

// Midpoint-inequality spot check over sampled triples.
bool convexity_spot_check(const ConvexFunctionSpec& f, double radius, int samples,
                          std::uint64_t seed, double tol = 1e-10);

// JSON schema (documented in docs/schema.md)
nlohmann::json to_json(const ConvexFunctionSpec& f);
ConvexFunctionSpec convex_from_json(const nlohmann::json& j);

}  // namespace hma
