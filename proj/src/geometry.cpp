#include "hma/geometry.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace hma {

double unit_ball_volume(int m) {
    if (m < 0) throw IndexDomainError("unit_ball_volume: m must be >= 0");
    return std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double sphere_area(int m) {
    if (m < 1) throw IndexDomainError("sphere_area: m must be >= 1");
    return m * unit_ball_volume(m);
}

bool HermitianIndex::valid(int n, int k, int q) {
    return n >= 1 && k >= 0 && k <= 2 * n && q >= std::max(0, k - n) && q <= k / 2;
}

HermitianIndex::HermitianIndex(int n_, int k_, int q_) : n(n_), k(k_), q(q_) {
    if (!valid(n, k, q))
        throw IndexDomainError("invalid hermitian index (n=" + std::to_string(n) +
                               ", k=" + std::to_string(k) + ", q=" + std::to_string(q) + ")");
}

std::vector<int> valid_q_range(int n, int k) {
    if (n < 1 || k < 0 || k > 2 * n)
        throw IndexDomainError("valid_q_range: k out of [0, 2n]");
    std::vector<int> out;
    for (int q = std::max(0, k - n); q <= k / 2; ++q) out.push_back(q);
    return out;
}

double coefficient_c(int n, int k, int q) {
    if (!HermitianIndex::valid(n, k, q))
        throw IndexDomainError("coefficient_c: invalid index");
    return 1.0 / (std::tgamma(n - k + q + 1.0) * std::tgamma(k - 2 * q + 1.0) * std::tgamma(q + 1.0));
}

double coefficient_c(const HermitianIndex& idx) { return coefficient_c(idx.n, idx.k, idx.q); }

double multinomial(int n, int k, int q) { return std::tgamma(n + 1.0) * coefficient_c(n, k, q); }

double multinomial(const HermitianIndex& idx) { return multinomial(idx.n, idx.k, idx.q); }

Eigen::MatrixXd complex_structure(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        J(2 * j + 1, 2 * j) = 1.0;   // x_j -> y_j
        J(2 * j, 2 * j + 1) = -1.0;  // y_j -> -x_j
    }
    return J;
}

ModelSubspace model_subspace(int n, int k, int q) {
    if (!HermitianIndex::valid(n, k, q) || k > 2 * n)
        throw IndexDomainError("model_subspace: invalid index");
    if (k - q > n)
        throw IndexDomainError("model_subspace: k-q exceeds n");
    ModelSubspace E;
    E.k = k;
    E.q = q;
    E.basis = Eigen::MatrixXd::Zero(2 * n, k);
    int col = 0;
    for (int j = 0; j < q; ++j) {
        E.basis(2 * j, col++) = 1.0;      // x_{j+1}
        E.basis(2 * j + 1, col++) = 1.0;  // y_{j+1}
    }
    for (int j = q; col < k; ++j) E.basis(2 * j, col++) = 1.0;  // x_{j+1}, totally real block
    return E;
}

namespace {

// Deterministic standard normals: explicit Box-Muller over mt19937_64 draws.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : eng_(seed) {}
    double operator()() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = unit();
        while (u1 <= 1e-300) u1 = unit();
        const double u2 = unit();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return rad * std::cos(2.0 * M_PI * u2);
    }

private:
    double unit() {
        return (eng_() >> 11) * 0x1.0p-53;  // uniform in [0,1)
    }
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_ = false;
};

}  // namespace

Eigen::MatrixXd haar_unitary(int n, std::uint64_t seed) {
    using Cd = std::complex<double>;
    NormalSource g(seed);
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = Cd(g(), g());

    // Modified Gram-Schmidt. Normalizing with positive real diagonal of R
    // gives Haar measure on U(n) for a complex Gaussian input matrix.
    Eigen::MatrixXcd Q(n, n);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd v = A.col(j);
        for (int i = 0; i < j; ++i) v -= Q.col(i).dot(v) * Q.col(i);
        v.normalize();
        Q.col(j) = v;
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = Q(i, j).real(), b = Q(i, j).imag();
            M(2 * i, 2 * j) = a;
            M(2 * i, 2 * j + 1) = -b;
            M(2 * i + 1, 2 * j) = b;
            M(2 * i + 1, 2 * j + 1) = a;
        }
    return M;
}

}  // namespace hma
