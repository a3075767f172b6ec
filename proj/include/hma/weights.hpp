#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vendor_json_fwd.hpp"

// Weight functions on (0, R], the classes D^a / D~^{a+2} with their norms,
// and the integral transforms R^a, P^a, R^{a,b} with inverses.
//
// Representation: closed-form families (indicator, zigzag) carry analytic
// tail integrals; sampled weights are piecewise linear on a log-spaced grid
// t_j = R 2^{-j/4} with exact per-piece moment integration. Every radial
// moment and slice integral used elsewhere in the library funnels through
// this module so that the transforms and the measure pairings share one
// integration path.

namespace hma {

class NotInClassError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class WeightClass { Da, DaTilde, Cc, C0 };

std::string to_string(WeightClass c);

class WeightFunction {
public:
    enum class Impl { PiecewiseLinear, Indicator, Zigzag, Custom };

    WeightFunction() = default;

    static WeightFunction indicator(double upper, WeightClass tag = WeightClass::Da);
    // nodes strictly increasing in (0, R]; value is continued constantly
    // below the first node and is zero above R = nodes.back().
    static WeightFunction piecewise_linear(std::vector<double> nodes, std::vector<double> values,
                                           WeightClass tag = WeightClass::Da);
    static WeightFunction custom(std::function<double(double)> eval, double support_radius,
                                 std::vector<double> kinks, WeightClass tag);
    // The alternating triangular weight transplanted to zeta(t) = phi(1/t)/t^{a+1};
    // in D^a while |zeta| has divergent moment integral.
    static WeightFunction zigzag(int a);

    double operator()(double t) const;
    double support_radius() const { return R_; }
    WeightClass tag() const { return tag_; }
    Impl impl() const { return impl_; }
    int zigzag_a() const { return zig_a_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }

    // kink positions (discontinuities of zeta or its slope) inside (0, R]
    std::vector<double> kink_radii() const;

    // int_t^R zeta(s) s^{a-1} ds, exact for the structured impls
    double tail_moment(double t, int a) const;
    // same with |zeta|
    double abs_tail_moment(double t, int a) const;
    // int_s^inf zeta(sqrt(u^2 + t^2)) u^gamma du  (vanishes when u^2+t^2 > R^2)
    double slice_moment(double s, double t, int gamma) const;

    // Resample onto the standard log grid as a piecewise-linear weight.
    WeightFunction sampled(int per_octave = 4, int octaves = 40) const;

private:
    Impl impl_ = Impl::Indicator;
    WeightClass tag_ = WeightClass::Da;
    double R_ = 1.0;
    double upper_ = 1.0;  // indicator
    int zig_a_ = 1;
    std::vector<double> nodes_, values_;
    std::function<double(double)> eval_;
    std::vector<double> custom_kinks_;
};

// norms
double norm_Da(const WeightFunction& z, int a);
double norm_Dtilde(const WeightFunction& z, int a);  // sup t^{a+2} |zeta|

struct MembershipReport {
    bool member = false;
    std::vector<double> decay_sequence;  // t^a zeta(t) on the dyadic grid
    std::vector<double> tail_sequence;   // tail integrals on the dyadic grid
    std::string diagnostic;
};

MembershipReport class_membership(const WeightFunction& z, WeightClass tag, int a,
                                  double tol = 1e-6);

// R^a (zeta)[t] = zeta(t) t^a + a * int_t^inf zeta s^{a-1} ds
WeightFunction transform_Ra(const WeightFunction& z, int a);
// inverse: phi(t)/t^a - a int_t^inf phi(s) / s^{a+1} ds
WeightFunction inverse_Ra(const WeightFunction& phi, int a);

// P^{a+2}: pointwise multiplication by t^{a+2}; inverse divides.
WeightFunction transform_Pa(const WeightFunction& z, int a);
WeightFunction inverse_Pa(const WeightFunction& phi, int a);

// Bivariate functions on [0,R]^2 with optional radial kink hints. Transform
// images remember their backing weight, which lets the S-transform integrate
// the inner double term by exact Fubini swaps instead of nested quadrature.
struct BivariateFn {
    std::function<double(double, double)> eval;
    double R = 1.0;
    std::vector<double> radial_kinks;  // kinks along circles u^2+v^2 = rho^2
    std::shared_ptr<const WeightFunction> backing;  // set for R^{a,b} images
    int backing_a = 0, backing_b = 0;
};

// R^{a,b}(zeta)[s,t]: four-term sum, continuous up to the boundary.
// With cache = true the double-integral term is tabulated once on a grid and
// interpolated (Catmull-Rom), which makes repeated evaluation cheap enough
// for the S-transform round trips.
BivariateFn transform_Rab(const WeightFunction& z, int a, int b, bool cache = false);

// S~^{a,b}(phi)[s,t]: single-point evaluation (nested adaptive quadrature).
double transform_Stilde(const BivariateFn& phi, int a, int b, double s, double t);

// S^{a,b}(phi)[t] = S~^{a,b}(phi)[t/sqrt2, t/sqrt2], sampled on a grid of
// `grid_n` descending diagonal nodes over [t_min, R]; returns a
// piecewise-linear weight. phi is treated as a black box; the double term is
// accumulated along the diagonal (one derivative trick, no extrapolation).
// Evaluations below ~0.1 R amplify roundoff like (R/t)^{a+b} through the
// cancellation of the four terms, so t_min defaults to a conditioning floor.
WeightFunction transform_Sab(const BivariateFn& phi, int a, int b, int grid_n = 65,
                             double t_min = -1.0);

// int int_{u>=sx, v>=sy} zeta(sqrt(u^2+v^2)) u^gx v^gy du dv, reduced to a
// 1D radial integral against the angular table.
double radial_double_moment(const WeightFunction& z, int gx, double sx, int gy, double sy);

// int_{t1}^{t2} cos^p sin^q dtheta, exact recursion
double angular_moment(int p, int q, double theta1, double theta2);

nlohmann::json to_json(const WeightFunction& w);
WeightFunction weight_from_json(const nlohmann::json& j);

}  // namespace hma
