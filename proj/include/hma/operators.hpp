#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "hma/convex.hpp"
#include "hma/forms.hpp"
#include "hma/geometry.hpp"
#include "hma/weights.hpp"

// Densities and closed-form measures of the Monge-Ampere-type operators:
// pointwise densities through the exterior kernel, the radial closed forms,
// the cone-distance measures, the product decomposition under complex
// orthogonal splits, and the subspace vanishing property.
//
// Normalization: the B and C operators carry the prefactors c_{n,k,q}/2 and
// c_{n,k,q} respectively, pinned by the requirement that B and C agree on
// rotation-invariant functions (so their difference annihilates them).

namespace hma {

enum class OperatorTag { Theta, B, C, Upsilon };

std::string to_string(OperatorTag tag);
OperatorTag operator_tag_from_string(const std::string& s);

// Tag-specific admissible index ranges.
bool tag_index_valid(OperatorTag tag, int n, int k, int q);

// Rotation-invariant signed measure on C^n: sphere atoms plus an absolutely
// continuous radial part integrating phi as
//   int_0^inf ( int_{S^{2n-1}} phi(r v) dv ) rho(r) dr.
struct RadialSignedMeasure {
    int n = 1;
    struct Atom {
        double radius = 0.0;
        double sphere_mass = 0.0;  // total mass carried uniformly on the sphere
    };
    std::vector<Atom> atoms;
    std::function<double(double)> ac_density;  // rho(r); null when purely atomic

    // power-law form rho(r) = ac_coeff * r^{ac_power} * 1_{r > ac_lower}
    bool ac_power_law = false;
    double ac_coeff = 0.0;
    double ac_lower = 0.0;
    int ac_power = 0;
    std::vector<double> ac_kinks;  // for quadrature of general densities

    bool has_ac() const { return ac_power_law || static_cast<bool>(ac_density); }
    double ac_at(double r) const;
    // integral of zeta(|z|) against the measure (exact atoms, per-piece
    // quadrature or exact moments for the a.c. part)
    double pair_radial(const WeightFunction& zeta) const;
};

// int zeta(sqrt(|z_X|^2 + |z_Y|^2)) d(mx x my), reduced to 1D radial
// integrals when both a.c. parts are power laws.
double tensor_pair(const WeightFunction& zeta, const RadialSignedMeasure& mx,
                   const RadialSignedMeasure& my);

// e_k of the Hessian eigenvalues (sum of principal k x k minors).
double hessian_density(const ConvexFunctionSpec& f, int k, const Eigen::VectorXd& x);
double elementary_symmetric(const Eigen::MatrixXd& H, int k);

GraphFrame graph_frame(const ConvexFunctionSpec& f, const Eigen::VectorXd& x);

// c-weighted density of the tagged operator at x (f smooth at x).
double operator_density(OperatorTag tag, const HermitianIndex& idx, const ConvexFunctionSpec& f,
                        const Eigen::VectorXd& x);

// The generator bundle of the tagged operator, for direct kernel access.
std::vector<std::pair<Generator, int>> operator_form(OperatorTag tag, const HermitianIndex& idx);
double operator_prefactor(OperatorTag tag, const HermitianIndex& idx);

// Radial closed form: integral of zeta(|z|) against the operator measure of
// f(z) = h(|z|^2), as a 1D integral over [0, R].
double radial_operator_integral(OperatorTag tag, const HermitianIndex& idx, const ProfileSpec& h,
                                const WeightFunction& zeta);
double radial_operator_integral(OperatorTag tag, const HermitianIndex& idx, const ProfileSpec& h,
                                const std::function<double(double)>& zeta, double R,
                                const std::vector<double>& kinks = {});

// Pointwise radial density (with respect to Lebesgue) of the operator on
// f = h(|z|^2) at radius r.
double radial_operator_density(OperatorTag tag, const HermitianIndex& idx, const ProfileSpec& h,
                               double r);

// Closed-form measure of the cone distance u_t.
RadialSignedMeasure ut_measure(OperatorTag tag, const HermitianIndex& idx, double t);

// Factor measure of the tagged operator for a factor function on C^l. Only
// the radially-routable families are supported (cones, zero, radial smooth).
RadialSignedMeasure factor_measure(OperatorTag tag, int l, int m, int p,
                                   const ConvexFunctionSpec& f);

struct ProductTerm {
    double coeff = 1.0;
    int m1 = 0, p1 = 0, m2 = 0, p2 = 0;
    RadialSignedMeasure mx, my;
};

// Lemma-level decomposition of the operator measure of f_X + f_Y over a
// complex orthogonal split; factor indices out of range are omitted.
std::vector<ProductTerm> product_decomposition(OperatorTag tag, const HermitianIndex& idx,
                                               const ConvexFunctionSpec& fx, int lx,
                                               const ConvexFunctionSpec& fy, int ly);

// Both sides of the two epsilon -> 0 limit identities used by the cone
// measures; returns (extrapolated lhs, closed-form rhs) for each.
struct LimitCheck {
    double lhs1 = 0, rhs1 = 0;  // int zeta r^a h_eps'^k dr
    double lhs2 = 0, rhs2 = 0;  // int zeta r^{a+2} h_eps'' h_eps'^{k-1} dr
};
LimitCheck limit_identities_check(int k, int a, double t, const WeightFunction& zeta);

// Numerical value of the one-line binomial integral (equals 2^k / k).
double binomial_integral_value(int k);

// max |density| of the cylinder lift of f over E_{k,p} for the (k, q) operator.
double subspace_vanishing_check(OperatorTag tag, const HermitianIndex& idx, int p,
                                const ConvexFunctionSpec& f_on_subspace, int samples,
                                std::uint64_t seed);

}  // namespace hma
