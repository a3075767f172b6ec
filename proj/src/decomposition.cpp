#include "hma/decomposition.hpp"

#include <cmath>

namespace hma {

namespace {

RadialSignedMeasure theta_factor_u(int l, int m, int p, double t) {
    return factor_measure(OperatorTag::Theta, l, m, p,
                          ConvexFunctionSpec::distance_cone(2 * l, t));
}

RadialSignedMeasure bc_factor_u(int l, int m, int p, double t) {
    return factor_measure(OperatorTag::B, l, m, p, ConvexFunctionSpec::distance_cone(2 * l, t));
}

bool theta_factor_valid(int l, int m, int p) {
    if (m == 0) return p == 0;
    return HermitianIndex::valid(l, m, p);
}

}  // namespace

double component_eval(const ValuationSpec& mu, int lx, int i, int q1, int q2, double s,
                      double t) {
    mu.validate();
    const int n = mu.n, k = mu.k;
    const int ly = n - lx;
    if (lx < 1 || ly < 1) throw SplitError("component_eval: split must be proper");
    if (i < 0 || i > k) throw IndexDomainError("component_eval: i out of range");
    const int m2 = k - i;
    if (!theta_factor_valid(lx, i, q1) || !theta_factor_valid(ly, m2, q2)) return 0.0;
    double total = 0.0;
    for (const auto& term : mu.terms) {
        const int q = term.q;
        if (q1 + q2 != q) continue;
        if (term.tag == 'T') {
            total += tensor_pair(term.weight, theta_factor_u(lx, i, q1, s),
                                 theta_factor_u(ly, m2, q2, t));
        } else {
            // the two Upsilon expansion pieces with the stated weights
            const double cb1 = (q1 > 0 && tag_index_valid(OperatorTag::B, lx, i, q1))
                                   ? static_cast<double>(q1) / q : 0.0;
            const double cc1 = ((i - 2 * q1) > 0 && tag_index_valid(OperatorTag::C, lx, i, q1))
                                   ? static_cast<double>(i - 2 * q1) / (k - 2 * q) : 0.0;
            if (cb1 != cc1)
                total += (cb1 - cc1) * tensor_pair(term.weight, bc_factor_u(lx, i, q1, s),
                                                   theta_factor_u(ly, m2, q2, t));
            const double cb2 = (q2 > 0 && tag_index_valid(OperatorTag::B, ly, m2, q2))
                                   ? static_cast<double>(q2) / q : 0.0;
            const double cc2 = ((m2 - 2 * q2) > 0 && tag_index_valid(OperatorTag::C, ly, m2, q2))
                                   ? static_cast<double>(m2 - 2 * q2) / (k - 2 * q) : 0.0;
            if (cb2 != cc2)
                total += (cb2 - cc2) * tensor_pair(term.weight, theta_factor_u(lx, i, q1, s),
                                                   bc_factor_u(ly, m2, q2, t));
        }
    }
    return total;
}

ComponentTable component_table(const ValuationSpec& mu, int lx, int grid_n) {
    ComponentTable tab;
    tab.lx = lx;
    double R = 1.0;
    for (const auto& t : mu.terms) R = std::max(R, t.weight.support_radius());
    for (int i = 0; i < grid_n; ++i) {
        tab.sgrid.push_back(R * (i + 1) / grid_n);
        tab.tgrid.push_back(R * (i + 1) / grid_n);
    }
    const int k = mu.k;
    for (int i = 0; i <= k; ++i)
        for (int q1 = 0; q1 <= k / 2; ++q1)
            for (int q2 = 0; q2 <= k / 2; ++q2) {
                if (!theta_factor_valid(lx, i, q1) || !theta_factor_valid(mu.n - lx, k - i, q2))
                    continue;
                std::vector<double> vals;
                vals.reserve(tab.sgrid.size() * tab.tgrid.size());
                for (double s : tab.sgrid)
                    for (double t : tab.tgrid)
                        vals.push_back(component_eval(mu, lx, i, q1, q2, s, t));
                tab.entries[{i, q1, q2}] = std::move(vals);
            }
    return tab;
}

double normalizer_U(int n, int k, int q) {
    if (n < 2 || !theta_factor_valid(n - 1, k - 1, q))
        throw IndexDomainError("normalizer_U: factor index out of range");
    return 2.0 * unit_ball_volume(2) * (2 * n - 2) * unit_ball_volume(2 * n - 2) *
           std::pow(2.0, k - 2 * q - 2) / (n - 1) * multinomial(n - 1, k - 1, q);
}

double normalizer_V(int n, int k, int q) {
    if (n < 2 || k < 3 || q < 1 || !theta_factor_valid(n - 1, k - 2, q - 1))
        throw IndexDomainError("normalizer_V: factor index out of range");
    return unit_ball_volume(2) * (2 * n - 2) * unit_ball_volume(2 * n - 2) *
           std::pow(2.0, k - 2 * q - 1) / (n - 1) * multinomial(n - 1, k - 2, q - 1);
}

double normalizer_W(int n, int k, int q) {
    if (n < 3 || k < 5 || q < 2 || !theta_factor_valid(n - 2, k - 4, q - 2))
        throw IndexDomainError("normalizer_W: factor index out of range");
    return unit_ball_volume(4) * (2 * n - 4) * unit_ball_volume(2 * n - 4) *
           std::pow(2.0, k - 2 * q - 1) / (n - 2) * multinomial(n - 2, k - 4, q - 2);
}

TemplateMaps template_maps(const ValuationSpec& mu, int grid_n) {
    mu.validate();
    const int n = mu.n, k = mu.k;
    TemplateMaps out;
    double R = 1.0;
    for (const auto& t : mu.terms) R = std::max(R, t.weight.support_radius());
    for (int i = 0; i < grid_n; ++i) out.tgrid.push_back(R * (i + 1) / grid_n);
    out.sgrid = out.tgrid;
    if (k <= n && k >= 1 && theta_factor_valid(n - 1, k - 1, 0)) {
        const double N = normalizer_U(n, k, 0);
        std::vector<double> vals;
        vals.reserve(out.sgrid.size() * out.tgrid.size());
        for (double s : out.sgrid)
            for (double t : out.tgrid)
                vals.push_back(component_eval(mu, 1, 1, 0, 0, s, t) / N);
        out.U0 = std::move(vals);
    }
    if (n >= 2 && k >= 3) {
        for (int q = std::max(1, k - n); q <= k / 2; ++q) {
            if (!theta_factor_valid(n - 1, k - 2, q - 1)) continue;
            const double N = normalizer_V(n, k, q);
            std::vector<double> vals;
            for (double t : out.tgrid)
                vals.push_back(component_eval(mu, 1, 2, 1, q - 1, 0.0, t) / N);
            out.Vtilde[q] = std::move(vals);
        }
    }
    if (n >= 3 && k >= 5) {
        for (int q = std::max(2, k - n); q <= k / 2; ++q) {
            if (!theta_factor_valid(n - 2, k - 4, q - 2)) continue;
            const double N = normalizer_W(n, k, q);
            std::vector<double> vals;
            for (double t : out.tgrid)
                vals.push_back(component_eval(mu, 2, 4, 2, q - 2, 0.0, t) / N);
            out.Wtilde[q] = std::move(vals);
        }
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> combine_VW(const std::vector<double>& Vt,
                                                               const std::vector<double>& Wt,
                                                               int k, int q) {
    if (Vt.size() != Wt.size()) throw GridError("combine_VW: grid mismatch");
    std::vector<double> V(Vt.size()), W(Vt.size());
    for (std::size_t i = 0; i < Vt.size(); ++i) {
        V[i] = (2.0 * (k - 2) * Vt[i] - (k - 4) * Wt[i]) / k;
        W[i] = q * static_cast<double>(k - 2) * (k - 4) * (Vt[i] - Wt[i]) / k;
    }
    return {std::move(V), std::move(W)};
}

WeightFunction scale_weight(const WeightFunction& w, double c) {
    auto base = std::make_shared<WeightFunction>(w);
    return WeightFunction::custom([base, c](double t) { return c * (*base)(t); },
                                  w.support_radius(), w.kink_radii(), w.tag());
}

ValuationSpec span_axpy(const ValuationSpec& mu, double c, const ValuationSpec& nu) {
    ValuationSpec out = mu;
    for (const auto& t : nu.terms) {
        ValuationTerm nt = t;
        nt.weight = scale_weight(t.weight, c);
        out.terms.push_back(std::move(nt));
    }
    return out;
}

RecoveredDensities recover_densities_kq(const ValuationSpec& mu, int q, int grid_n) {
    if (grid_n < 3) throw GridError("recover_densities_kq: grid too small");
    mu.validate();
    const int n = mu.n, k = mu.k;
    double R = 1.0;
    for (const auto& t : mu.terms) R = std::max(R, t.weight.support_radius());

    // U(mu)[t] = mu(u_t) / (omega_2n * multinomial * 2^{k-2q})
    const double NU = unit_ball_volume(2 * n) * multinomial(n, k, q) * std::pow(2.0, k - 2 * q);
    std::vector<double> tg, uvals;
    for (int i = 0; i < grid_n; ++i) {
        const double t = R * (i + 1) / grid_n;
        tg.push_back(t);
        uvals.push_back(evaluate(mu, ConvexFunctionSpec::distance_cone(2 * n, t)) / NU);
    }
    WeightFunction U = WeightFunction::piecewise_linear(tg, uvals, WeightClass::Cc);
    RecoveredDensities out;
    out.zeta = inverse_Ra(U, 2 * n - k).sampled(192, 12);

    const bool two_density = q >= std::max(1, k - n) && q <= (k - 1) / 2;
    if (!two_density) return out;

    // V(mu - T(zeta)): second-order cylinder component normalized so that
    // V(Y(zt)) = P^{2n-k+2}(zt)
    ValuationSpec remainder = span_axpy(mu, -1.0, make_T(n, k, q, out.zeta));
    const double NV = normalizer_V(n, k, q);
    std::vector<double> vvals;
    for (double t : tg)
        vvals.push_back(-q * (k - 2.0) * component_eval(remainder, 1, 2, 1, q - 1, 0.0, t) / NV);
    // classification check: the V-image must vanish at 0 to define a D~ weight
    const double v0 = vvals.front();
    double vscale = 1e-30;
    for (double v : vvals) vscale = std::max(vscale, std::abs(v));
    if (std::abs(v0) > 1e-2 * std::max(1.0, vscale) && vscale > 1e-10)
        throw ClassificationViolationError(
            "recover_densities_kq: V-image fails the C_0 boundary condition");
    WeightFunction V = WeightFunction::piecewise_linear(tg, vvals, WeightClass::C0);
    out.zeta_tilde = inverse_Pa(V, 2 * n - k).sampled(192, 12);
    return out;
}

ValuationSpec reconstruct_A(const ValuationSpec& mu, int grid_n) {
    mu.validate();
    const int n = mu.n, k = mu.k;
    if (n < 2 || k < 2 || k > 2 * n - 2)
        throw IndexDomainError("reconstruct_A: requires n >= 2 and 2 <= k <= 2n-2");
    double R = 1.0;
    for (const auto& t : mu.terms) R = std::max(R, t.weight.support_radius());

    ValuationSpec A;
    A.n = n;
    A.k = k;
    TemplateMaps maps = template_maps(mu, grid_n);

    // q = 0 component via the bivariate map and S^{1,2n-k-1}
    if (maps.U0) {
        const auto& vals = *maps.U0;
        const auto& sg = maps.sgrid;
        const auto& tg = maps.tgrid;
        BivariateFn phi;
        phi.R = R;
        const int gn = static_cast<int>(tg.size());
        // Catmull-Rom surface through the sampled map (clamped at the edges)
        phi.eval = [vals, sg, tg, gn](double s, double t) -> double {
            const double h = sg[1] - sg[0];
            auto idx = [&](const std::vector<double>& g, double x, int& i, double& f) {
                const double u = (x - g.front()) / h;
                i = std::clamp(static_cast<int>(std::floor(u)), 0, gn - 2);
                f = std::clamp(u - i, 0.0, 1.0);
            };
            auto at = [&](int r, int c) {
                r = std::clamp(r, 0, gn - 1);
                c = std::clamp(c, 0, gn - 1);
                return vals[r * gn + c];
            };
            auto cr = [](double p0, double p1, double p2, double p3, double x) {
                return p1 + 0.5 * x * (p2 - p0 +
                       x * (2 * p0 - 5 * p1 + 4 * p2 - p3 + x * (3 * (p1 - p2) + p3 - p0)));
            };
            int i, j;
            double fs, ft;
            idx(sg, s, i, fs);
            idx(tg, t, j, ft);
            double rows[4];
            for (int r = 0; r < 4; ++r)
                rows[r] = cr(at(i - 1 + r, j - 1), at(i - 1 + r, j), at(i - 1 + r, j + 1),
                             at(i - 1 + r, j + 2), ft);
            return cr(rows[0], rows[1], rows[2], rows[3], fs);
        };
        WeightFunction zeta0 = transform_Sab(phi, 1, 2 * n - k - 1, grid_n);
        A.terms.push_back({'T', 0, std::move(zeta0)});
    }

    // q = k/2 component (pure T) via Vtilde
    if (k >= 4 && k % 2 == 0 && maps.Vtilde.count(k / 2)) {
        WeightFunction Vhalf = WeightFunction::piecewise_linear(maps.tgrid, maps.Vtilde[k / 2],
                                                                WeightClass::Cc);
        A.terms.push_back({'T', k / 2, inverse_Ra(Vhalf, 2 * n - k).sampled(192, 12)});
    }

    // middle components q >= 2 need both maps (n >= 3, k >= 5)
    for (int q = std::max(2, k - n); q <= (k - 1) / 2; ++q) {
        if (!maps.Vtilde.count(q) || !maps.Wtilde.count(q)) continue;
        auto [V, W] = combine_VW(maps.Vtilde[q], maps.Wtilde[q], k, q);
        WeightFunction Vw = WeightFunction::piecewise_linear(maps.tgrid, V, WeightClass::Cc);
        WeightFunction Ww = WeightFunction::piecewise_linear(maps.tgrid, W, WeightClass::C0);
        A.terms.push_back({'T', q, inverse_Ra(Vw, 2 * n - k).sampled(192, 12)});
        ValuationTerm yt;
        yt.tag = 'Y';
        yt.q = q;
        yt.weight = inverse_Pa(Ww, 2 * n - k).sampled(192, 12);
        A.terms.push_back(std::move(yt));
    }
    return A;
}

}  // namespace hma
