#include "hma/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hma {

double kahan_sum(std::span<const double> xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-like initial guess.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b, int order) {
    const auto& [xs, ws] = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0, c = 0.0;
    for (int i = 0; i < order; ++i) {
        const double y = ws[i] * f(mid + half * xs[i]) - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s * half;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = integrate_fixed(f, a, mid, 15);
    const double right = integrate_fixed(f, mid, b, 15);
    const double err = std::abs(left + right - whole);
    // mixed criterion: absolute floor plus relative to the local magnitude
    if (err < tol * std::max(1.0, std::abs(left) + std::abs(right)) || depth <= 0)
        return left + right;
    return adaptive_rec(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive_rec(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol,
                    int max_depth) {
    if (!(b > a)) return 0.0;
    return adaptive_rec(f, a, b, integrate_fixed(f, a, b, 15), tol, max_depth);
}

double integrate_segments(const std::function<double(double)>& f, double a, double b,
                          std::vector<double> breakpoints, double tol) {
    if (!(b > a)) return 0.0;
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> acc;
    double prev = a;
    for (double p : breakpoints) {
        if (p <= prev || p > b) continue;
        if (p > b) break;
        acc.push_back(integrate_1d(f, prev, p, tol / breakpoints.size()));
        prev = p;
    }
    if (prev < b) acc.push_back(integrate_1d(f, prev, b, tol / breakpoints.size()));
    return kahan_sum(acc);
}

SphereRule sphere_rule(int m, int level) {
    SphereRule rule;
    if (m == 1) {
        Eigen::VectorXd p(1), q(1);
        p << 1.0;
        q << -1.0;
        rule.nodes = {p, q};
        rule.weights = {1.0, 1.0};
        return rule;
    }
    if (m == 2) {
        const int nt = std::max(8, 2 * level);
        for (int i = 0; i < nt; ++i) {
            const double th = 2.0 * M_PI * i / nt;
            Eigen::VectorXd v(2);
            v << std::cos(th), std::sin(th);
            rule.nodes.push_back(v);
            rule.weights.push_back(2.0 * M_PI / nt);
        }
        return rule;
    }
    // v = (cos th, sin th * u), u on S^{m-2}, dS = sin^{m-2} th dth dS_{m-2}
    const auto& [xs, ws] = gauss_legendre(level);
    SphereRule inner = sphere_rule(m - 1, level);
    for (int i = 0; i < level; ++i) {
        const double th = 0.5 * M_PI * (xs[i] + 1.0);
        const double wth = ws[i] * 0.5 * M_PI * std::pow(std::sin(th), m - 2);
        for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
            Eigen::VectorXd v(m);
            v(0) = std::cos(th);
            v.tail(m - 1) = std::sin(th) * inner.nodes[j];
            rule.nodes.push_back(v);
            rule.weights.push_back(wth * inner.weights[j]);
        }
    }
    return rule;
}

namespace {

// lazy recursive traversal of the product rule, no node storage
void sphere_walk(int m, int level, Eigen::VectorXd& v, int pos, double weight,
                 const std::function<double(const Eigen::VectorXd&)>& g, double sin_prod,
                 double& acc, double& comp) {
    if (m == 2) {
        const int nt = std::max(8, 2 * level);
        for (int i = 0; i < nt; ++i) {
            const double th = 2.0 * M_PI * i / nt;
            v(pos) = sin_prod * std::cos(th);
            v(pos + 1) = sin_prod * std::sin(th);
            const double y = weight * (2.0 * M_PI / nt) * g(v) - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        return;
    }
    const auto& [xs, ws] = gauss_legendre(level);
    for (int i = 0; i < level; ++i) {
        const double th = 0.5 * M_PI * (xs[i] + 1.0);
        v(pos) = sin_prod * std::cos(th);
        sphere_walk(m - 1, level, v, pos + 1,
                    weight * ws[i] * 0.5 * M_PI * std::pow(std::sin(th), m - 2), g,
                    sin_prod * std::sin(th), acc, comp);
    }
}

double sphere_pass(int m, int level, const std::function<double(const Eigen::VectorXd&)>& g) {
    if (m == 1) {
        Eigen::VectorXd p(1);
        p << 1.0;
        const double a = g(p);
        p << -1.0;
        return a + g(p);
    }
    Eigen::VectorXd v(m);
    double acc = 0.0, comp = 0.0;
    sphere_walk(m, level, v, 0, 1.0, g, 1.0, acc, comp);
    return acc;
}

}  // namespace

double sphere_integrate(int m, const std::function<double(const Eigen::VectorXd&)>& g, double tol,
                        int level) {
    const int cap = m <= 2 ? 512 : (m <= 4 ? 72 : 18);
    int lvl = std::min(level, cap);
    double prev = sphere_pass(m, lvl, g);
    while (true) {
        const int next = std::min(cap, lvl + std::max(4, lvl / 2));
        if (next == lvl) break;
        lvl = next;
        const double v = sphere_pass(m, lvl, g);
        if (std::abs(v - prev) <= tol * std::max(1.0, std::abs(v))) return v;
        prev = v;
    }
    throw QuadratureError("sphere_integrate: tolerance not reached", std::abs(prev));
}

namespace {

double tensor_impl(const std::function<double(const Eigen::VectorXd&)>& f,
                   const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int npd, bool parallel) {
    const int dims = static_cast<int>(lo.size());
    const auto& [xs, ws] = gauss_legendre(npd);
    std::int64_t total = 1;
    for (int d = 0; d < dims; ++d) total *= npd;

    std::vector<double> node_vals(static_cast<std::size_t>(total));
    const auto eval_node = [&](std::int64_t idx) {
        Eigen::VectorXd x(dims);
        double w = 1.0;
        std::int64_t rem = idx;
        for (int d = 0; d < dims; ++d) {
            const int i = static_cast<int>(rem % npd);
            rem /= npd;
            const double mid = 0.5 * (lo(d) + hi(d)), half = 0.5 * (hi(d) - lo(d));
            x(d) = mid + half * xs[i];
            w *= ws[i] * half;
        }
        return w * f(x);
    };

#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t idx = 0; idx < total; ++idx)
            node_vals[static_cast<std::size_t>(idx)] = eval_node(idx);
    } else
#endif
    {
        (void)parallel;
        for (std::int64_t idx = 0; idx < total; ++idx)
            node_vals[static_cast<std::size_t>(idx)] = eval_node(idx);
    }
    return kahan_sum(node_vals);
}

}  // namespace

double tensor_integrate(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int nodes_per_dim,
                        bool parallel) {
    return tensor_impl(f, lo, hi, nodes_per_dim, parallel);
}

double tensor_integrate_serial(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                               int nodes_per_dim) {
    return tensor_impl(f, lo, hi, nodes_per_dim, false);
}

namespace {

inline double splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return (z >> 11) * 0x1.0p-53;
}

}  // namespace

double mc_integrate(const std::function<double(const Eigen::VectorXd&)>& f,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, std::size_t samples,
                    std::uint64_t seed, bool parallel) {
    const int dims = static_cast<int>(lo.size());
    const int strata_per_dim = 2;
    std::int64_t n_strata = 1;
    for (int d = 0; d < dims; ++d) n_strata *= strata_per_dim;
    const std::size_t per_stratum = std::max<std::size_t>(1, samples / n_strata);

    double cell_vol = 1.0;
    for (int d = 0; d < dims; ++d) cell_vol *= (hi(d) - lo(d)) / strata_per_dim;

    std::vector<double> stratum_means(static_cast<std::size_t>(n_strata));
    const auto eval_stratum = [&](std::int64_t s) {
        std::uint64_t state = seed ^ (0xabcdef1234567890ULL + 0x9e3779b97f4a7c15ULL * s);
        Eigen::VectorXd x(dims);
        double acc = 0.0, c = 0.0;
        for (std::size_t i = 0; i < per_stratum; ++i) {
            std::int64_t rem = s;
            for (int d = 0; d < dims; ++d) {
                const int cell = static_cast<int>(rem % strata_per_dim);
                rem /= strata_per_dim;
                const double w = (hi(d) - lo(d)) / strata_per_dim;
                x(d) = lo(d) + (cell + splitmix64(state)) * w;
            }
            const double y = f(x) - c;
            const double t = acc + y;
            c = (t - acc) - y;
            acc = t;
        }
        return acc / static_cast<double>(per_stratum);
    };

#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t s = 0; s < n_strata; ++s)
            stratum_means[static_cast<std::size_t>(s)] = eval_stratum(s);
    } else
#endif
    {
        (void)parallel;
        for (std::int64_t s = 0; s < n_strata; ++s)
            stratum_means[static_cast<std::size_t>(s)] = eval_stratum(s);
    }
    for (auto& v : stratum_means) v *= cell_vol;
    return kahan_sum(stratum_means);
}

PvReport pv_shell_driver(const std::function<double(double, double)>& ring, double R, double tol,
                         int max_shells) {
    PvReport rep;
    double acc = 0.0;
    double eps_hi = R;
    for (int j = 1; j <= max_shells; ++j) {
        const double eps_lo = R * std::pow(2.0, -j);
        acc += ring(eps_lo, eps_hi);
        rep.partials.push_back(acc);
        eps_hi = eps_lo;
        if (rep.partials.size() >= 4) {
            const std::size_t m = rep.partials.size();
            const double scale =
                std::max({1e-300, std::abs(rep.partials[m - 1]), std::abs(rep.partials[m - 2])});
            const double d1 = std::abs(rep.partials[m - 1] - rep.partials[m - 2]);
            const double d2 = std::abs(rep.partials[m - 2] - rep.partials[m - 3]);
            const double d3 = std::abs(rep.partials[m - 3] - rep.partials[m - 4]);
            if (d1 <= tol * scale && d2 <= tol * scale && d3 <= tol * scale) {
                rep.value = rep.partials.back();
                rep.converged = true;
                rep.diagnostic = "stabilized after " + std::to_string(j) + " shells";
                return rep;
            }
        }
    }
    rep.value = rep.partials.empty() ? 0.0 : rep.partials.back();
    // Two further convergence patterns are recognized without extrapolation:
    // geometrically shrinking increments (tail bounded by a geometric series)
    // and alternating increments with shrinking magnitude (Leibniz).
    if (rep.partials.size() >= 8) {
        const std::size_t m = rep.partials.size();
        std::vector<double> deltas;
        for (std::size_t i = m - 7; i + 1 < m; ++i)
            deltas.push_back(rep.partials[i + 1] - rep.partials[i]);
        bool alternating = true, shrinking = true, geometric = true;
        for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
            if (deltas[i] * deltas[i + 1] >= 0.0) alternating = false;
            if (std::abs(deltas[i + 1]) > std::abs(deltas[i]) * (1.0 + 1e-9)) shrinking = false;
            if (std::abs(deltas[i + 1]) > 0.95 * std::abs(deltas[i]) + 1e-300) geometric = false;
        }
        if (alternating && shrinking) {
            rep.converged = true;
            rep.diagnostic = "alternating shell sums with shrinking increments; value accurate "
                             "to the last increment";
            return rep;
        }
        if (geometric) {
            rep.converged = true;
            rep.diagnostic = "geometrically shrinking shell increments; value accurate to the "
                             "geometric tail bound";
            return rep;
        }
    }
    rep.converged = false;
    rep.diagnostic = "no stabilization within " + std::to_string(max_shells) + " shells";
    return rep;
}

}  // namespace hma
