#include "hma/operators.hpp"

#include <cmath>
#include <random>

#include "hma/quadrature.hpp"

namespace hma {

std::string to_string(OperatorTag tag) {
    switch (tag) {
        case OperatorTag::Theta: return "Theta";
        case OperatorTag::B: return "B";
        case OperatorTag::C: return "C";
        case OperatorTag::Upsilon: return "Upsilon";
    }
    return "?";
}

OperatorTag operator_tag_from_string(const std::string& s) {
    if (s == "Theta" || s == "theta") return OperatorTag::Theta;
    if (s == "B") return OperatorTag::B;
    if (s == "C") return OperatorTag::C;
    if (s == "Upsilon" || s == "upsilon") return OperatorTag::Upsilon;
    throw IndexDomainError("unknown operator tag: " + s);
}

bool tag_index_valid(OperatorTag tag, int n, int k, int q) {
    if (!HermitianIndex::valid(n, k, q)) return false;
    switch (tag) {
        case OperatorTag::Theta:
            return true;
        case OperatorTag::B:
            return k >= 2 && q >= std::max(1, k - n);
        case OperatorTag::C:
            return k >= 1 && q <= (k - 1) / 2;
        case OperatorTag::Upsilon:
            return k >= 2 && q >= std::max(1, k - n) && q <= (k - 1) / 2;
    }
    return false;
}

double RadialSignedMeasure::ac_at(double r) const {
    if (ac_power_law) return r > ac_lower ? ac_coeff * std::pow(r, ac_power) : 0.0;
    if (ac_density) return ac_density(r);
    return 0.0;
}

double RadialSignedMeasure::pair_radial(const WeightFunction& zeta) const {
    double total = 0.0;
    for (const auto& a : atoms) total += a.sphere_mass * zeta(a.radius);
    if (!has_ac()) return total;
    const double s_area = sphere_area(2 * n);
    const double R = zeta.support_radius();
    if (ac_power_law) {
        // exact moment: coeff * s_area * int_{lower}^{R} zeta(r) r^{power} dr
        total += ac_coeff * s_area * zeta.tail_moment(ac_lower, ac_power + 1);
    } else {
        auto f = [&](double r) { return zeta(r) * ac_at(r) * s_area; };
        std::vector<double> ks = zeta.kink_radii();
        for (double k : ac_kinks) ks.push_back(k);
        total += integrate_segments(f, 0.0, R, ks, 1e-11);
    }
    return total;
}

double tensor_pair(const WeightFunction& zeta, const RadialSignedMeasure& mx,
                   const RadialSignedMeasure& my) {
    double total = 0.0;
    // atom x atom
    for (const auto& ax : mx.atoms)
        for (const auto& ay : my.atoms)
            total += ax.sphere_mass * ay.sphere_mass * zeta(std::hypot(ax.radius, ay.radius));
    const double sx = sphere_area(2 * mx.n), sy = sphere_area(2 * my.n);
    // atom x ac and ac x atom: slice moments
    if (my.has_ac())
        for (const auto& ax : mx.atoms) {
            if (my.ac_power_law) {
                total += ax.sphere_mass * sy * my.ac_coeff *
                         zeta.slice_moment(my.ac_lower, ax.radius, my.ac_power);
            } else {
                auto f = [&](double v) {
                    return zeta(std::hypot(ax.radius, v)) * my.ac_at(v) * sy;
                };
                total += ax.sphere_mass *
                         integrate_segments(f, 0.0, zeta.support_radius(), my.ac_kinks, 1e-10);
            }
        }
    if (mx.has_ac())
        for (const auto& ay : my.atoms) {
            if (mx.ac_power_law) {
                total += ay.sphere_mass * sx * mx.ac_coeff *
                         zeta.slice_moment(mx.ac_lower, ay.radius, mx.ac_power);
            } else {
                auto f = [&](double u) {
                    return zeta(std::hypot(u, ay.radius)) * mx.ac_at(u) * sx;
                };
                total += ay.sphere_mass *
                         integrate_segments(f, 0.0, zeta.support_radius(), mx.ac_kinks, 1e-10);
            }
        }
    // ac x ac
    if (mx.has_ac() && my.has_ac()) {
        if (mx.ac_power_law && my.ac_power_law) {
            total += sx * sy * mx.ac_coeff * my.ac_coeff *
                     radial_double_moment(zeta, mx.ac_power, mx.ac_lower, my.ac_power,
                                          my.ac_lower);
        } else {
            const double R = zeta.support_radius();
            auto f = [&](const Eigen::VectorXd& uv) {
                const double u = uv(0), v = uv(1);
                return zeta(std::hypot(u, v)) * mx.ac_at(u) * sx * my.ac_at(v) * sy;
            };
            Eigen::VectorXd lo(2), hi(2);
            lo << 0.0, 0.0;
            hi << R, R;
            total += tensor_integrate(f, lo, hi, 96, false);
        }
    }
    return total;
}

double elementary_symmetric(const Eigen::MatrixXd& H, int k) {
    const int m = static_cast<int>(H.rows());
    if (k == 0) return 1.0;
    if (k < 0 || k > m) throw IndexDomainError("elementary_symmetric: k out of range");
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    double total = 0.0;
    Eigen::MatrixXd sub(k, k);
    while (true) {
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) sub(r, c) = H(comb[r], comb[c]);
        total += k == 1 ? sub(0, 0) : sub.determinant();
        int i = k - 1;
        while (i >= 0 && comb[i] == m - k + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
    return total;
}

GraphFrame graph_frame(const ConvexFunctionSpec& f, const Eigen::VectorXd& x) {
    GraphFrame fr;
    fr.x = x;
    fr.grad = f.gradient(x);
    fr.hess = f.hessian(x);
    return fr;
}

double hessian_density(const ConvexFunctionSpec& f, int k, const Eigen::VectorXd& x) {
    if (k < 0 || k > f.dim()) throw IndexDomainError("hessian_density: k out of [0, 2n]");
    return elementary_symmetric(f.hessian(x), k);
}

std::vector<std::pair<Generator, int>> operator_form(OperatorTag tag, const HermitianIndex& idx) {
    const int n = idx.n, k = idx.k, q = idx.q;
    if (!tag_index_valid(tag, n, k, q))
        throw IndexDomainError("operator_form: index out of range for " + to_string(tag));
    switch (tag) {
        case OperatorTag::Theta:
            return {{Generator::Theta0, n - k + q}, {Generator::Theta1, k - 2 * q},
                    {Generator::Theta2, q}};
        case OperatorTag::B:
            return {{Generator::Beta1, 1},
                    {Generator::Beta2, 1},
                    {Generator::Theta0, n - k + q},
                    {Generator::Theta1, k - 2 * q},
                    {Generator::Theta2, q - 1}};
        case OperatorTag::C:
            return {{Generator::Beta1, 1},
                    {Generator::Gamma2, 1},
                    {Generator::Theta0, n - k + q},
                    {Generator::Theta1, k - 1 - 2 * q},
                    {Generator::Theta2, q}};
        default:
            throw IndexDomainError("operator_form: Upsilon is B - C");
    }
}

double operator_prefactor(OperatorTag tag, const HermitianIndex& idx) {
    const double c = coefficient_c(idx);
    // B carries c/2 and C carries c: pinned by B = C on rotation-invariant
    // functions (their difference must annihilate them).
    switch (tag) {
        case OperatorTag::Theta: return c;
        case OperatorTag::B: return 0.5 * c;
        case OperatorTag::C: return c;
        default: throw IndexDomainError("operator_prefactor: Upsilon is B - C");
    }
}

double operator_density(OperatorTag tag, const HermitianIndex& idx, const ConvexFunctionSpec& f,
                        const Eigen::VectorXd& x) {
    if (tag == OperatorTag::Upsilon) {
        return operator_density(OperatorTag::B, idx, f, x) -
               operator_density(OperatorTag::C, idx, f, x);
    }
    if (!tag_index_valid(tag, idx.n, idx.k, idx.q))
        throw IndexDomainError("operator_density: index out of range for " + to_string(tag));
    const GraphFrame fr = graph_frame(f, x);
    return operator_prefactor(tag, idx) * density_of_product(operator_form(tag, idx), fr);
}

double radial_operator_density(OperatorTag tag, const HermitianIndex& idx, const ProfileSpec& h,
                               double r) {
    const int n = idx.n, k = idx.k, q = idx.q;
    const double s = r * r;
    const double hp = h.dh(s), hpp = h.d2h(s);
    if (tag == OperatorTag::Upsilon) return 0.0;
    if (tag == OperatorTag::Theta) {
        if (k == 0) return 1.0;
        return std::pow(4.0, k - q) * multinomial(idx) *
               ((static_cast<double>(k) / n) * s * hpp * std::pow(hp, k - 1) + std::pow(hp, k));
    }
    // B and C coincide on rotation-invariant functions
    return (std::pow(2.0, 2 * k - 2 * q - 1) / n) * multinomial(idx) * s *
           (2.0 * s * hpp * std::pow(hp, k - 1) + std::pow(hp, k));
}

double radial_operator_integral(OperatorTag tag, const HermitianIndex& idx, const ProfileSpec& h,
                                const std::function<double(double)>& zeta, double R,
                                const std::vector<double>& kinks) {
    const double s_area = sphere_area(2 * idx.n);
    auto f = [&](double r) {
        return s_area * zeta(r) * radial_operator_density(tag, idx, h, r) *
               std::pow(r, 2 * idx.n - 1);
    };
    return integrate_segments(f, 0.0, R, kinks, 1e-11);
}

double radial_operator_integral(OperatorTag tag, const HermitianIndex& idx, const ProfileSpec& h,
                                const WeightFunction& zeta) {
    auto z = [&](double r) { return zeta(r); };
    return radial_operator_integral(tag, idx, h, z, zeta.support_radius(), zeta.kink_radii());
}

namespace {

RadialSignedMeasure theta_ut(int l, int m, int p, double t) {
    RadialSignedMeasure out;
    out.n = l;
    if (m == 0) {
        // Lebesgue measure, for any input function
        out.ac_power_law = true;
        out.ac_coeff = 1.0;
        out.ac_power = 2 * l - 1;
        out.ac_lower = 0.0;
        return out;
    }
    const double P = std::pow(2.0, m - 2 * p - 1) / l * multinomial(l, m, p);
    if (m < 2 * l) {
        out.ac_power_law = true;
        out.ac_coeff = P * (2 * l - m);
        out.ac_power = 2 * l - m - 1;
        out.ac_lower = t;
    }
    const double mass = P * sphere_area(2 * l) * std::pow(t, 2 * l - m);
    if (m == 2 * l) {
        // complex Monge-Ampere of the cone: atom of mass P * s_{2l-1} at t
        out.atoms.push_back({t, P * sphere_area(2 * l)});
    } else if (t > 0.0 && mass != 0.0) {
        out.atoms.push_back({t, mass});
    }
    return out;
}

RadialSignedMeasure bc_ut(int l, int m, int p, double t) {
    RadialSignedMeasure out;
    out.n = l;
    const double mass = std::pow(2.0, m - 2 * p - 1) / (static_cast<double>(m) * l) *
                        multinomial(l, m, p) * sphere_area(2 * l) * std::pow(t, 2 * l - m + 2);
    if (t > 0.0 && mass != 0.0) out.atoms.push_back({t, mass});
    return out;
}

}  // namespace

RadialSignedMeasure ut_measure(OperatorTag tag, const HermitianIndex& idx, double t) {
    if (!tag_index_valid(tag, idx.n, idx.k, idx.q) && tag != OperatorTag::Theta)
        throw IndexDomainError("ut_measure: index out of range for " + to_string(tag));
    switch (tag) {
        case OperatorTag::Theta:
            return theta_ut(idx.n, idx.k, idx.q, t);
        case OperatorTag::B:
        case OperatorTag::C:
            return bc_ut(idx.n, idx.k, idx.q, t);
        case OperatorTag::Upsilon: {
            RadialSignedMeasure zero;
            zero.n = idx.n;
            return zero;
        }
    }
    throw std::logic_error("unreachable");
}

RadialSignedMeasure factor_measure(OperatorTag tag, int l, int m, int p,
                                   const ConvexFunctionSpec& f) {
    using K = ConvexFunctionSpec::Kind;
    if (f.kind() == K::Scale)
        // degree-m homogeneity of the operator measures in the function
        {
            RadialSignedMeasure inner = factor_measure(tag, l, m, p, f.children()[0]);
            const double lam = std::pow(f.scale_factor(), m);
            for (auto& a : inner.atoms) a.sphere_mass *= lam;
            if (inner.ac_power_law) inner.ac_coeff *= lam;
            else if (inner.ac_density) {
                auto base = inner.ac_density;
                inner.ac_density = [base, lam](double r) { return lam * base(r); };
            }
            return inner;
        }
    if (f.kind() == K::AffineShift) return factor_measure(tag, l, m, p, f.children()[0]);
    if (f.kind() == K::Zero || f.kind() == K::Quadratic) {
        if (f.kind() == K::Zero || f.quadratic_A().cwiseAbs().maxCoeff() == 0.0) {
            // measure of the zero function: Lebesgue for m = 0, zero otherwise
            RadialSignedMeasure out;
            out.n = l;
            if (m == 0 && tag == OperatorTag::Theta) {
                out.ac_power_law = true;
                out.ac_coeff = 1.0;
                out.ac_power = 2 * l - 1;
            }
            return out;
        }
    }
    if (f.kind() == K::DistanceCone) {
        const double t = f.cone_t();
        if (m == 0) return theta_ut(l, 0, 0, t);
        if (tag == OperatorTag::Theta) return theta_ut(l, m, p, t);
        return bc_ut(l, m, p, t);
    }
    if (f.kind() == K::RadialProfile || f.kind() == K::SmoothedCone) {
        const ProfileSpec h = f.profile();
        RadialSignedMeasure out;
        out.n = l;
        const HermitianIndex idx(l, m, p);
        out.ac_density = [h, tag, idx](double r) {
            return radial_operator_density(tag, idx, h, r) * std::pow(r, 2 * idx.n - 1);
        };
        return out;
    }
    throw ParameterError("factor_measure: unsupported factor function");
}

std::vector<ProductTerm> product_decomposition(OperatorTag tag, const HermitianIndex& idx,
                                               const ConvexFunctionSpec& fx, int lx,
                                               const ConvexFunctionSpec& fy, int ly) {
    if (lx + ly != idx.n) throw SplitError("product_decomposition: split must partition C^n");
    const int k = idx.k, q = idx.q;
    std::vector<ProductTerm> terms;
    for (int m1 = 0; m1 <= k; ++m1) {
        const int m2 = k - m1;
        if (m1 > 2 * lx || m2 > 2 * ly) continue;
        for (int p1 = std::max(0, m1 - lx); p1 <= m1 / 2; ++p1) {
            const int p2 = q - p1;
            if (p2 < std::max(0, m2 - ly) || p2 > m2 / 2) continue;
            if (tag == OperatorTag::Theta) {
                ProductTerm t;
                t.coeff = 1.0;
                t.m1 = m1; t.p1 = p1; t.m2 = m2; t.p2 = p2;
                t.mx = factor_measure(OperatorTag::Theta, lx, m1, p1, fx);
                t.my = factor_measure(OperatorTag::Theta, ly, m2, p2, fy);
                terms.push_back(std::move(t));
            } else if (tag == OperatorTag::Upsilon) {
                // [(p1/q) B^X - ((m1-2p1)/(k-2q)) C^X] x Theta^Y  +  Theta^X x [...]
                const double cb1 = p1 > 0 && tag_index_valid(OperatorTag::B, lx, m1, p1)
                                       ? static_cast<double>(p1) / q : 0.0;
                const double cc1 = (m1 - 2 * p1) > 0 && tag_index_valid(OperatorTag::C, lx, m1, p1)
                                       ? static_cast<double>(m1 - 2 * p1) / (k - 2 * q) : 0.0;
                if (cb1 != 0.0 || cc1 != 0.0) {
                    ProductTerm t;
                    t.coeff = cb1 - cc1;  // B = C closed forms on the u-family
                    t.m1 = m1; t.p1 = p1; t.m2 = m2; t.p2 = p2;
                    t.mx = factor_measure(OperatorTag::B, lx, m1, p1, fx);
                    t.my = factor_measure(OperatorTag::Theta, ly, m2, p2, fy);
                    if (t.coeff != 0.0) terms.push_back(std::move(t));
                }
                const double cb2 = p2 > 0 && tag_index_valid(OperatorTag::B, ly, m2, p2)
                                       ? static_cast<double>(p2) / q : 0.0;
                const double cc2 = (m2 - 2 * p2) > 0 && tag_index_valid(OperatorTag::C, ly, m2, p2)
                                       ? static_cast<double>(m2 - 2 * p2) / (k - 2 * q) : 0.0;
                if (cb2 != 0.0 || cc2 != 0.0) {
                    ProductTerm t;
                    t.coeff = cb2 - cc2;
                    t.m1 = m1; t.p1 = p1; t.m2 = m2; t.p2 = p2;
                    t.mx = factor_measure(OperatorTag::Theta, lx, m1, p1, fx);
                    t.my = factor_measure(OperatorTag::B, ly, m2, p2, fy);
                    if (t.coeff != 0.0) terms.push_back(std::move(t));
                }
            } else {
                throw IndexDomainError("product_decomposition: only Theta and Upsilon split");
            }
        }
    }
    return terms;
}

LimitCheck limit_identities_check(int k, int a, double t, const WeightFunction& zeta) {
    if (a < k) throw ParameterError("limit_identities_check: requires a >= k");
    LimitCheck out;
    const double R = zeta.support_radius();
    const auto kinks = zeta.kink_radii();
    std::vector<double> l1, l2;
    for (double eps : {0.1, 0.05, 0.025}) {
        const ProfileSpec he = smoothed_cone_profile(t, eps);
        l1.push_back(integrate_segments(
            [&](double r) { return zeta(r) * std::pow(r, a) * std::pow(he.dh(r * r), k); }, 0.0, R,
            kinks, 1e-11));
        l2.push_back(integrate_segments(
            [&](double r) {
                return zeta(r) * std::pow(r, a + 2) * he.d2h(r * r) *
                       std::pow(he.dh(r * r), k - 1);
            },
            0.0, R, kinks, 1e-11));
    }
    // Richardson in eps (error ~ eps): value ~ v + c eps with eps halving
    out.lhs1 = 2.0 * l1[2] - l1[1];
    out.lhs2 = 2.0 * l2[2] - l2[1];
    const double tail = zeta.tail_moment(t, a - k + 1);  // int_t zeta r^{a-k} dr
    out.rhs1 = std::pow(2.0, -k) * tail;
    out.rhs2 = -std::pow(2.0, -(k + 1)) * tail +
               (std::pow(2.0, -(k + 1)) / k) * zeta(t) * std::pow(t, a + 1 - k);
    return out;
}

double binomial_integral_value(int k) {
    auto f = [&](double x) {
        return std::pow(1.0 + x / std::sqrt(x * x + 1.0), k - 1) /
               std::pow(x * x + 1.0, 1.5);
    };
    // substitution x = tan(u) maps R to (-pi/2, pi/2) with finite integrand
    auto g = [&](double u) {
        const double x = std::tan(u);
        const double dx = 1.0 / (std::cos(u) * std::cos(u));
        return f(x) * dx;
    };
    return integrate_1d(g, -0.5 * M_PI + 1e-12, 0.5 * M_PI - 1e-12, 1e-12);
}

double subspace_vanishing_check(OperatorTag tag, const HermitianIndex& idx, int p,
                                const ConvexFunctionSpec& f_on_subspace, int samples,
                                std::uint64_t seed) {
    const ModelSubspace E = model_subspace(idx.n, idx.k, p);
    ConvexFunctionSpec lift = cylinder_lift_basis(E.basis, f_on_subspace);
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        Eigen::VectorXd x(2 * idx.n);
        for (int d = 0; d < 2 * idx.n; ++d) x(d) = U(eng);
        if (!lift.smooth_at(x)) continue;
        worst = std::max(worst, std::abs(operator_density(tag, idx, lift, x)));
    }
    return worst;
}

}  // namespace hma
