#pragma once

#include <random>

#include "hma/weights.hpp"

// Shared random-weight corpus for the tests and the verification battery.

namespace hma::corpus {

// rough piecewise-linear weight on [0.2, 1] (transform round trips)
inline WeightFunction random_pl_weight(std::uint64_t seed,
                                       WeightClass tag = WeightClass::Da) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> nodes, vals;
    for (int i = 0; i <= 8; ++i) {
        nodes.push_back(0.2 + 0.8 * i / 8.0);
        vals.push_back(U(eng));
    }
    vals.front() = vals.back() = 0.0;
    return WeightFunction::piecewise_linear(nodes, vals, tag);
}

// smooth (C^1) random bump combination supported in [0.2, 1]; the density
// recovery pipeline divides by t^{a+2}, so its 1e-3 round-trip tolerance
// presumes inputs the sampling grids can resolve
inline WeightFunction random_smooth_weight(std::uint64_t seed,
                                           WeightClass tag = WeightClass::Da) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> C(-1, 1), A(0.35, 0.85), W(0.1, 0.25);
    std::vector<std::array<double, 3>> bumps;
    for (int b = 0; b < 3; ++b) bumps.push_back({C(eng), A(eng), W(eng)});
    auto smooth = [bumps](double t) {
        double v = 0.0;
        for (const auto& [c, a, w] : bumps) {
            const double x = (t - a) / w;
            if (std::abs(x) < 1.0 && t > 0.2 && t < 1.0) {
                const double edge = std::min((t - 0.2) / 0.05, (1.0 - t) / 0.05);
                const double taper = edge >= 1.0 ? 1.0 : edge * edge * (3 - 2 * edge);
                v += c * std::cos(0.5 * M_PI * x) * std::cos(0.5 * M_PI * x) * taper;
            }
        }
        return v;
    };
    std::vector<double> nodes, vals;
    for (int i = 0; i <= 384; ++i) {
        nodes.push_back(0.15 + 0.85 * i / 384.0);
        vals.push_back(smooth(nodes.back()));
    }
    return WeightFunction::piecewise_linear(nodes, vals, tag);
}

}  // namespace hma::corpus
