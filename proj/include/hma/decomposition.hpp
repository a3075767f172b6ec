#pragma once

#include <map>
#include <optional>

#include "hma/valuations.hpp"

// The template method for span valuations: component functionals of the
// polarization under complex orthogonal splits, the normalized U/V/W maps,
// density recovery for pure-type valuations, and the reconstruction operator
// that assembles every component except q = 1 (which is always recovered as
// the remainder).
//
// All normalizing constants below are derived from the cone closed forms of
// this library (they make U_0(T(zeta_0)) = R^{1,2n-k-1}(zeta_0) etc. exact).

namespace hma {

class ClassificationViolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Component mu^l_{(i,q1),(k-i,q2)}(u_s^X, u_t^Y) of a span valuation over the
// split C^n = C^lx + C^{n-lx}.
double component_eval(const ValuationSpec& mu, int lx, int i, int q1, int q2, double s, double t);

struct ComponentTable {
    int lx = 1;
    // key: (i, q1, q2); bivariate values on the (s, t) grid
    std::map<std::tuple<int, int, int>, std::vector<double>> entries;
    std::vector<double> sgrid, tgrid;
};

ComponentTable component_table(const ValuationSpec& mu, int lx, int grid_n);

// Normalizers (valid whenever the respective factor index exists).
double normalizer_U(int n, int k, int q);
double normalizer_V(int n, int k, int q);
double normalizer_W(int n, int k, int q);

struct TemplateMaps {
    std::vector<double> tgrid;
    // U0 on the (s, t) grid, row-major with s the slow index
    std::optional<std::vector<double>> U0;
    std::vector<double> sgrid;
    std::map<int, std::vector<double>> Vtilde;  // q >= 1
    std::map<int, std::vector<double>> Wtilde;  // q >= 2 (needs n >= 3, k >= 5)
};

TemplateMaps template_maps(const ValuationSpec& mu, int grid_n = 33);

// V_q = [2(k-2) Vt - (k-4) Wt] / k  and  W_q = q(k-2)(k-4)(Vt - Wt)/k,
// the inversion of Vt = R - P/(q(k-2)), Wt = R - 2P/(q(k-4)).
std::pair<std::vector<double>, std::vector<double>> combine_VW(const std::vector<double>& Vt,
                                                               const std::vector<double>& Wt,
                                                               int k, int q);

struct RecoveredDensities {
    WeightFunction zeta;                  // D^{2n-k}
    std::optional<WeightFunction> zeta_tilde;  // D~^{2n-k+2}, two-density range only
};

// Density recovery for a span valuation known to be pure type (k, q).
RecoveredDensities recover_densities_kq(const ValuationSpec& mu, int q, int grid_n = 513);

// The reconstruction operator: assembles every admissible component except
// q = 1; mu - A(mu) evaluates as a pure (k, 1) valuation.
ValuationSpec reconstruct_A(const ValuationSpec& mu, int grid_n = 33);

// helper: mu + c * nu as a span valuation
ValuationSpec span_axpy(const ValuationSpec& mu, double c, const ValuationSpec& nu);
WeightFunction scale_weight(const WeightFunction& w, double c);

}  // namespace hma
