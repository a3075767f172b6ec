#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Shared index bookkeeping, dimensional constants, model subspaces and the
// complex structure on R^{2n} ~ C^n. Coordinate order is interleaved
// (x_1, y_1, ..., x_n, y_n) throughout the library, so the complex structure
// J is block diagonal.

namespace hma {

class IndexDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// omega_m: volume of the unit ball in R^m.
double unit_ball_volume(int m);

// Surface area of the unit sphere S^{m-1} in R^m (= m * omega_m).
double sphere_area(int m);

// Validated triple (n, k, q): 0 <= k <= 2n and max(0, k-n) <= q <= floor(k/2).
struct HermitianIndex {
    int n = 1;
    int k = 0;
    int q = 0;

    HermitianIndex() = default;
    HermitianIndex(int n_, int k_, int q_);

    static bool valid(int n, int k, int q);
};

std::vector<int> valid_q_range(int n, int k);

// c_{n,k,q} = 1 / ((n-k+q)! (k-2q)! q!)
double coefficient_c(const HermitianIndex& idx);
double coefficient_c(int n, int k, int q);

// n! * c_{n,k,q}
double multinomial(const HermitianIndex& idx);
double multinomial(int n, int k, int q);

// The block rotation x_j -> y_j, y_j -> -x_j in interleaved coordinates.
Eigen::MatrixXd complex_structure(int n);

// E_{k,q}: span of (x_1, y_1, ..., x_q, y_q, x_{q+1}, ..., x_{k-q}).
struct ModelSubspace {
    int k = 0;               // real dimension
    int q = 0;               // complex rank
    Eigen::MatrixXd basis;   // 2n x k, orthonormal columns
};

ModelSubspace model_subspace(int n, int k, int q);

// Real 2n x 2n representation of a Haar-random element of U(n).
// Deterministic per seed (hand-rolled Gaussian sampling, so the output is
// identical across platforms and standard library implementations).
Eigen::MatrixXd haar_unitary(int n, std::uint64_t seed);

}  // namespace hma
