#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Deterministic integration driver shared by every measure-integrating
// operation: Gauss-Legendre in 1D/2D, product rules on spheres, tensor grids
// for full-dimensional integrals (OpenMP across nodes, fixed reduction
// order), seeded stratified Monte Carlo for 6D, and the principal-value
// shell driver. All deterministic schemes are bitwise reproducible: node
// tables are fixed, node values are accumulated in index order with
// compensated summation, and thread count never changes the result.

namespace hma {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate)
        : std::runtime_error(what), error_estimate(estimate) {}
    double error_estimate = 0.0;
};

struct QuadratureSpec {
    std::string scheme = "tensor";  // gauss-legendre-radial | product-sphere | tensor | monte-carlo
    double tolerance = 1e-8;
    int max_refinement = 12;
    std::uint64_t seed = 0;  // MC only
};

double kahan_sum(std::span<const double> xs);

// Nodes/weights of the N-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

// Adaptive 1D Gauss-Legendre on [a, b].
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-10, int max_depth = 24);

// Same, but splits first at the given interior breakpoints (kink positions).
double integrate_segments(const std::function<double(double)>& f, double a, double b,
                          std::vector<double> breakpoints, double tol = 1e-10);

// Fixed-order GL on [a, b] (no refinement): building block for cumulative passes.
double integrate_fixed(const std::function<double(double)>& f, double a, double b, int order);

// Integral over S^{m-1} (surface measure) of g(v), v a unit vector in R^m.
// Product-angle rule; `level` controls the base resolution, refined until
// two consecutive levels agree within tol.
double sphere_integrate(int m, const std::function<double(const Eigen::VectorXd&)>& g,
                        double tol = 1e-9, int level = 16);

// Fixed-level sphere rule (nodes and weights), for callers that iterate radially.
struct SphereRule {
    std::vector<Eigen::VectorXd> nodes;
    std::vector<double> weights;  // sum = sphere_area(m)
};
SphereRule sphere_rule(int m, int level);

// Tensor-product GL integral of f over the box [lo, hi]^dims.
// parallel=true runs node evaluation under OpenMP; the reduction is ordered
// and compensated either way, so both paths give bit-identical results.
double tensor_integrate(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                        int nodes_per_dim, bool parallel = true);

// Serial reference implementation kept for testing and benchmarking.
double tensor_integrate_serial(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                               int nodes_per_dim);

// Stratified Monte Carlo over a box; strata are the 2^dims dyadic sub-boxes
// recursively split `splits` times. Fully determined by the seed.
double mc_integrate(const std::function<double(const Eigen::VectorXd&)>& f,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                    std::size_t samples, std::uint64_t seed, bool parallel = true);

struct PvReport {
    double value = 0.0;
    bool converged = false;
    std::vector<double> partials;  // partial integrals at eps_j = R 2^{-j}
    std::string diagnostic;
};

// Principal-value limit of eps -> 0 of F(eps), evaluated through ring
// integrals: ring(lo, hi) integrates over the shell lo <= |z| <= hi.
// Partial values are accumulated at eps_j = R 2^{-j}. Divergence is reported,
// never extrapolated away.
PvReport pv_shell_driver(const std::function<double(double, double)>& ring, double R,
                         double tol, int max_shells = 30);

}  // namespace hma
