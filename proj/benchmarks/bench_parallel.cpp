// Benchmark comparing the OpenMP node-parallel quadrature kernels against the
// serial reference implementation on a representative density integral.
// Both paths share node tables and the ordered compensated reduction, so the
// results must agree bitwise; the table reports timings and the speedup.

#include <chrono>
#include <cstdio>

#include "hma/operators.hpp"
#include "hma/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int nodes = argc > 1 ? std::atoi(argv[1]) : 28;
    const std::size_t mc_samples = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 200000;

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; parallel path falls back to serial\n");
#endif

    // 4D tensor quadrature of a weighted operator density at n = 2
    const int n = 2;
    const hma::HermitianIndex idx(n, 2, 1);
    const hma::ProfileSpec h = hma::polynomial_profile({0.0, 1.0, 0.25});
    auto f = hma::ConvexFunctionSpec::radial(2 * n, h);
    std::vector<double> wn, wv;
    for (int i = 0; i <= 32; ++i) {
        wn.push_back(0.2 + 0.8 * i / 32.0);
        wv.push_back(std::sin(M_PI * i / 32.0));
    }
    const hma::WeightFunction zeta = hma::WeightFunction::piecewise_linear(wn, wv);
    auto integrand = [&](const Eigen::VectorXd& x) {
        const double w = zeta(x.norm());
        if (w == 0.0) return 0.0;
        return w * hma::operator_density(hma::OperatorTag::Theta, idx, f, x);
    };
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(4, -1.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(4, 1.0);

    std::printf("\n4D tensor quadrature, %d^4 nodes\n", nodes);
    auto t0 = Clock::now();
    const double serial = hma::tensor_integrate_serial(integrand, lo, hi, nodes);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const double parallel = hma::tensor_integrate(integrand, lo, hi, nodes, true);
    const double tp = seconds_since(t0);
    std::printf("  serial    %10.3f s   value %.15g\n", ts, serial);
    std::printf("  parallel  %10.3f s   value %.15g\n", tp, parallel);
    std::printf("  speedup   %10.2fx   bitwise equal: %s\n", ts / tp,
                serial == parallel ? "yes" : "NO");

    // 6D stratified Monte Carlo at n = 3
    const hma::HermitianIndex idx3(3, 3, 1);
    auto f3 = hma::ConvexFunctionSpec::radial(6, h);
    auto integrand6 = [&](const Eigen::VectorXd& x) {
        const double w = zeta(x.norm());
        if (w == 0.0) return 0.0;
        return w * hma::operator_density(hma::OperatorTag::Theta, idx3, f3, x);
    };
    Eigen::VectorXd lo6 = Eigen::VectorXd::Constant(6, -1.0);
    Eigen::VectorXd hi6 = Eigen::VectorXd::Constant(6, 1.0);
    std::printf("\n6D stratified Monte Carlo, %zu samples\n", mc_samples);
    t0 = Clock::now();
    const double mcs = hma::mc_integrate(integrand6, lo6, hi6, mc_samples, 42, false);
    const double tms = seconds_since(t0);
    t0 = Clock::now();
    const double mcp = hma::mc_integrate(integrand6, lo6, hi6, mc_samples, 42, true);
    const double tmp = seconds_since(t0);
    std::printf("  serial    %10.3f s   value %.15g\n", tms, mcs);
    std::printf("  parallel  %10.3f s   value %.15g\n", tmp, mcp);
    std::printf("  speedup   %10.2fx   bitwise equal: %s\n", tms / tmp,
                mcs == mcp ? "yes" : "NO");
    return (serial == parallel && mcs == mcp) ? 0 : 1;
}
