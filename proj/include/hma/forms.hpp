#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Alternating-form arithmetic and the pullback of the invariant generator
// forms along the gradient graph map x -> (x, df(x)). Forms are stored
// sparsely over sorted index tuples encoded as bitmasks; the ambient
// dimensions here are tiny (<= 12), so no performance heroics.

namespace hma {

class DegreeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class FrameError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct AlternatingForm {
    int dim = 0;
    int degree = 0;
    // sorted by mask; masks have popcount == degree
    std::vector<std::pair<std::uint32_t, double>> coeffs;

    double coeff(std::uint32_t mask) const;
    AlternatingForm& scale(double s);
    // Multilinear evaluation on column vectors (degree many of them).
    double evaluate(const Eigen::MatrixXd& vectors) const;
};

AlternatingForm wedge(const AlternatingForm& a, const AlternatingForm& b);

// Base point, gradient and Hessian of a convex function at a point.
struct GraphFrame {
    Eigen::VectorXd x;     // base point in R^{2n}
    Eigen::VectorXd grad;  // gradient
    Eigen::MatrixXd hess;  // symmetric 2n x 2n
};

enum class Generator { Theta0, Theta1, Theta2, Beta1, Beta2, Gamma1, Gamma2 };

Generator generator_from_name(const std::string& name);

// The generator as a form on the cotangent space R^{4n} with coefficient
// functions frozen at the given base point. Index order: base coordinates
// (x_1, y_1, ..) occupy indices 0..2n-1, fiber coordinates 2n..4n-1.
AlternatingForm generator_form(Generator g, int n, const Eigen::VectorXd& base_point);

// Pullback of the generator along the graph map of the frame: a form on R^{2n}.
AlternatingForm pullback_generator(Generator g, const GraphFrame& frame);

// Pullback of an arbitrary cotangent-space form (coefficients already frozen).
AlternatingForm pullback(const AlternatingForm& form, const GraphFrame& frame);

// Top coefficient (relative to dx_1^dy_1^...^dx_n^dy_n) of the wedge of the
// pulled-back generators given as (generator, multiplicity) pairs.
double density_of_product(const std::vector<std::pair<Generator, int>>& generators,
                          const GraphFrame& frame);

// Wedge of generator forms upstairs (on R^{4n}); used by the positivity check.
AlternatingForm generator_product(const std::vector<std::pair<Generator, int>>& generators, int n,
                                  const Eigen::VectorXd& base_point);

// Evaluation of a 2n-form on the frame adapted to a k-dimensional subspace:
// base slots get the complementary vectors, fiber slots get the subspace
// frame. Matches the sign convention pinned by the Lebesgue anchor
// (theta_0^n evaluates to n! on the standard frame).
double positivity_frame_value(const AlternatingForm& form, const Eigen::MatrixXd& subspace_frame,
                              const Eigen::MatrixXd& complement_frame);

// Orthonormal complement chosen so that [complement | subspace] is a
// positively oriented frame.
Eigen::MatrixXd oriented_complement(const Eigen::MatrixXd& subspace_frame);

// The degree-(2m choose ...) Hessian-measure generator on T*R^m: pulled back
// it reproduces the k-th elementary symmetric function of the Hessian.
AlternatingForm hessian_generator(int m, int k);

}  // namespace hma
