#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hma/operators.hpp"
#include "hma/quadrature.hpp"
#include "vendor_json_fwd.hpp"

// The singular valuations T^n_{k,q}(zeta) and Y^n_{k,q}(zeta~): evaluation
// with closed-form, radial, product and principal-value routes, exact
// polarization by polynomial interpolation, unit-ball normalization, and the
// valuation/invariance checkers.

namespace hma {

class UnsupportedFunctionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PvDivergenceError : public std::runtime_error {
public:
    PvDivergenceError(const std::string& what, PvReport rep)
        : std::runtime_error(what), report(std::move(rep)) {}
    PvReport report;
};

class PolynomialDegreeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValuationTerm {
    char tag = 'T';  // 'T' or 'Y'
    int q = 0;
    WeightFunction weight;
};

struct ValuationSpec {
    int n = 1;
    int k = 1;
    std::vector<ValuationTerm> terms;

    void validate() const;  // index ranges and weight classes
};

ValuationSpec make_T(int n, int k, int q, WeightFunction zeta);
ValuationSpec make_Y(int n, int k, int q, WeightFunction zeta_tilde);
ValuationSpec span_sum(ValuationSpec a, const ValuationSpec& b);

// Which computational route evaluate() takes for a given function.
enum class EvalRoute { ClosedFormCone, RadialSmooth, ConstantDensity, PvQuadrature,
                       ProductSplit, HyperplaneSurface, ZeroFunction };

struct EvalReport {
    double value = 0.0;
    EvalRoute route = EvalRoute::ZeroFunction;
    std::optional<PvReport> pv;
    double scale = 0.0;  // max |term| magnitude encountered
};

EvalReport evaluate_report(const ValuationSpec& mu, const ConvexFunctionSpec& f);
double evaluate(const ValuationSpec& mu, const ConvexFunctionSpec& f);

// Coefficient of lambda^j delta^{k-j} in mu(lambda f + delta g), extracted by
// bivariate polynomial interpolation on the grid {0..k}^2.
double polarized_eval(const ValuationSpec& mu, const ConvexFunctionSpec& f,
                      const ConvexFunctionSpec& g, int j);

// Hermitian intrinsic volume of the unit ball, computed from the cone
// measure at t = 0 normalized by omega_{2n-k}.
double intrinsic_volume_ball(const HermitianIndex& idx);

// |mu(f) + mu(g) - mu(f v g) - mu(f ^ g)| for a certified lattice pair.
double valuation_identity_check(const ValuationSpec& mu, const ConvexFunctionSpec& f,
                                const ConvexFunctionSpec& g);

enum class InvarianceMode { Affine, Unitary, Homogeneity };

double invariance_check(const ValuationSpec& mu, const ConvexFunctionSpec& f, InvarianceMode mode,
                        std::uint64_t seed = 7);

// f composed with the real representation of a unitary map (supported for
// the families the checks use).
ConvexFunctionSpec compose_linear(const ConvexFunctionSpec& f, const Eigen::MatrixXd& M);

nlohmann::json to_json(const ValuationSpec& v);
ValuationSpec valuation_from_json(const nlohmann::json& j);

}  // namespace hma
