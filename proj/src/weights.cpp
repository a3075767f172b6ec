#include "hma/weights.hpp"

#include <algorithm>
#include <cmath>

#include "hma/quadrature.hpp"

namespace hma {

std::string to_string(WeightClass c) {
    switch (c) {
        case WeightClass::Da: return "D^a";
        case WeightClass::DaTilde: return "D~^{a+2}";
        case WeightClass::Cc: return "C_c";
        case WeightClass::C0: return "C_0";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// exact antiderivatives
// ---------------------------------------------------------------------------

namespace {

// int r (r^2-t^2)^{p/2} dr
double F1(int p, double r, double t) {
    const double w2 = std::max(r * r - t * t, 0.0);
    if (p == -2) return 0.5 * std::log(std::max(w2, 1e-300));
    return std::pow(w2, 0.5 * (p + 2)) / (p + 2);
}

// int r^2 (r^2-t^2)^{p/2} dr
double F2(int p, double r, double t) {
    const double w = std::sqrt(std::max(r * r - t * t, 0.0));
    switch (p) {
        case -2: {
            double log_term = 0.0;
            if (t > 0.0) log_term = 0.5 * t * std::log(std::max((r - t) / (r + t), 1e-300));
            return r + log_term;
        }
        case -1: {
            if (t == 0.0) return 0.5 * r * r;
            return 0.5 * r * w + 0.5 * t * t * std::log(r + w);
        }
        case 0:
            return r * r * r / 3.0;
        case 1: {
            if (t == 0.0) return 0.25 * r * r * r * r;
            return r * w * (2.0 * r * r - t * t) / 8.0 - std::pow(t, 4) / 8.0 * std::log(r + w);
        }
        case 2:
            return std::pow(r, 5) / 5.0 - t * t * std::pow(r, 3) / 3.0;
        case 3: {
            if (t == 0.0) return std::pow(r, 6) / 6.0;
            return std::pow(r, 5) * w / 6.0 - 7.0 * std::pow(r, 3) * t * t * w / 24.0 +
                   r * std::pow(t, 4) * w / 16.0 + std::pow(t, 6) / 16.0 * std::log(r + w);
        }
        case 4:
            return (15.0 * std::pow(r, 7) - 42.0 * std::pow(r, 5) * t * t +
                    35.0 * std::pow(r, 3) * std::pow(t, 4)) /
                   105.0;
    }
    throw std::domain_error("slice antiderivative: unsupported power p=" + std::to_string(p));
}

// int (alpha + beta r) r (r^2-t^2)^{p/2} dr over [x1, x2]
double piece_slice(double alpha, double beta, int p, double t, double x1, double x2) {
    return alpha * (F1(p, x2, t) - F1(p, x1, t)) + beta * (F2(p, x2, t) - F2(p, x1, t));
}

// int (alpha + beta s) s^{a-1} ds over [x1, x2], a >= 1
double piece_tail(double alpha, double beta, int a, double x1, double x2) {
    return alpha * (std::pow(x2, a) - std::pow(x1, a)) / a +
           beta * (std::pow(x2, a + 1) - std::pow(x1, a + 1)) / (a + 1);
}

// int (c0 + c1 x) x^m dx over [x1, x2], integer m (zigzag helper)
double piece_poly(double c0, double c1, int m, double x1, double x2) {
    auto mom = [&](int e) -> double {
        if (e == -1) return std::log(x2 / x1);
        return (std::pow(x2, e + 1) - std::pow(x1, e + 1)) / (e + 1);
    };
    return c0 * mom(m) + c1 * mom(m + 1);
}

}  // namespace

namespace {

double ang_anti(int pp, int qq, double th, double c, double s) {
    if (qq == -1) {
        if (pp == -1) return std::log(std::abs(s / c));
        if (pp == 0) return std::log(std::abs(s / (1.0 + c)));
        if (pp == 1) return std::log(std::abs(s));
        return ang_anti(pp - 2, -1, th, c, s) + std::pow(c, pp - 1) / (pp - 1);
    }
    if (pp >= 2)
        return (std::pow(c, pp - 1) * std::pow(s, qq + 1) +
                (pp - 1) * ang_anti(pp - 2, qq, th, c, s)) /
               (pp + qq);
    if (pp == 1) return std::pow(s, qq + 1) / (qq + 1);
    if (pp == 0) {
        if (qq == 0) return th;
        if (qq == 1) return -c;
        return (-c * std::pow(s, qq - 1) + (qq - 1) * ang_anti(0, qq - 2, th, c, s)) / qq;
    }
    if (pp == -1) {
        if (qq == 0) return std::log(std::abs((1.0 + s) / c));
        if (qq == 1) return -std::log(std::abs(c));
        return ang_anti(-1, qq - 2, th, c, s) - std::pow(s, qq - 1) / (qq - 1);
    }
    throw std::domain_error("angular_moment: p < -1 or q < -1 unsupported");
}

}  // namespace

double angular_moment(int p, int q, double theta1, double theta2) {
    return ang_anti(p, q, theta2, std::cos(theta2), std::sin(theta2)) -
           ang_anti(p, q, theta1, std::cos(theta1), std::sin(theta1));
}

// ---------------------------------------------------------------------------
// WeightFunction
// ---------------------------------------------------------------------------

WeightFunction WeightFunction::indicator(double upper, WeightClass tag) {
    if (!(upper > 0)) throw std::invalid_argument("indicator: upper must be > 0");
    WeightFunction w;
    w.impl_ = Impl::Indicator;
    w.tag_ = tag;
    w.R_ = upper;
    w.upper_ = upper;
    return w;
}

WeightFunction WeightFunction::piecewise_linear(std::vector<double> nodes,
                                                std::vector<double> values, WeightClass tag) {
    if (nodes.size() != values.size() || nodes.size() < 2)
        throw std::invalid_argument("piecewise_linear: need matching nodes/values, >= 2");
    if (!std::is_sorted(nodes.begin(), nodes.end()))
        throw std::invalid_argument("piecewise_linear: nodes must be ascending");
    if (nodes.front() <= 0) throw std::invalid_argument("piecewise_linear: nodes must be > 0");
    WeightFunction w;
    w.impl_ = Impl::PiecewiseLinear;
    w.tag_ = tag;
    w.nodes_ = std::move(nodes);
    w.values_ = std::move(values);
    w.R_ = w.nodes_.back();
    return w;
}

WeightFunction WeightFunction::custom(std::function<double(double)> eval, double support_radius,
                                      std::vector<double> kinks, WeightClass tag) {
    WeightFunction w;
    w.impl_ = Impl::Custom;
    w.tag_ = tag;
    w.R_ = support_radius;
    w.eval_ = std::move(eval);
    w.custom_kinks_ = std::move(kinks);
    std::sort(w.custom_kinks_.begin(), w.custom_kinks_.end());
    return w;
}

WeightFunction WeightFunction::zigzag(int a) {
    if (a < 1) throw std::invalid_argument("zigzag: a must be >= 1");
    WeightFunction w;
    w.impl_ = Impl::Zigzag;
    w.tag_ = WeightClass::Da;
    w.zig_a_ = a;
    w.R_ = 0.5;
    return w;
}

namespace {

constexpr int kZigzagMaxLevel = 60;

// Triangular bump profile: zero on [0,2); on [2^m, 2^{m+1}) a triangle of
// height (+-) 2^{1-m}/m peaking at 1.5 * 2^m. Signed area of triangle m is
// (-1)^m / m.
double zig_phi(double x) {
    if (x < 2.0) return 0.0;
    const int m = static_cast<int>(std::floor(std::log2(x)));
    const double lo = std::pow(2.0, m), mid = 1.5 * lo, hi = 2.0 * lo;
    const double height = ((m % 2) ? -1.0 : 1.0) * std::pow(2.0, 1 - m) / m;
    if (x < mid) return height * (x - lo) / (mid - lo);
    return height * (hi - x) / (hi - mid);
}

// linear pieces of phi between x=2 and x=X: list of (x1, x2, c0, c1) with
// phi(x) = c0 + c1 x on [x1, x2]
std::vector<std::array<double, 4>> zig_pieces(double X) {
    std::vector<std::array<double, 4>> out;
    for (int m = 1; m <= kZigzagMaxLevel; ++m) {
        const double lo = std::pow(2.0, m);
        if (lo >= X) break;
        const double mid = 1.5 * lo, hi = 2.0 * lo;
        const double h = ((m % 2) ? -1.0 : 1.0) * std::pow(2.0, 1 - m) / m;
        const double up_slope = h / (mid - lo);
        out.push_back({lo, std::min(mid, X), -up_slope * lo, up_slope});
        if (X > mid) {
            const double dn_slope = -h / (hi - mid);
            out.push_back({mid, std::min(hi, X), h - dn_slope * mid, dn_slope});
        }
    }
    return out;
}

}  // namespace

double WeightFunction::operator()(double t) const {
    if (!(t > 0) || t > R_ * (1.0 + 1e-15)) return 0.0;
    switch (impl_) {
        case Impl::Indicator:
            return t <= upper_ ? 1.0 : 0.0;
        case Impl::PiecewiseLinear: {
            if (t <= nodes_.front()) return values_.front();
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
            if (i >= nodes_.size()) return values_.back();
            const double x1 = nodes_[i - 1], x2 = nodes_[i];
            const double lam = (t - x1) / (x2 - x1);
            return (1 - lam) * values_[i - 1] + lam * values_[i];
        }
        case Impl::Zigzag:
            return zig_phi(1.0 / t) * std::pow(t, -(zig_a_ + 1));
        case Impl::Custom:
            return eval_(t);
    }
    return 0.0;
}

std::vector<double> WeightFunction::kink_radii() const {
    switch (impl_) {
        case Impl::Indicator:
            return {upper_};
        case Impl::PiecewiseLinear:
            return nodes_;
        case Impl::Zigzag: {
            std::vector<double> ks;
            for (int m = 1; m <= 24; ++m) {
                ks.push_back(1.0 / std::pow(2.0, m + 1));
                ks.push_back(1.0 / (1.5 * std::pow(2.0, m)));
                ks.push_back(1.0 / std::pow(2.0, m));
            }
            std::sort(ks.begin(), ks.end());
            return ks;
        }
        case Impl::Custom:
            return custom_kinks_;
    }
    return {};
}

double WeightFunction::tail_moment(double t, int a) const {
    if (t >= R_) return 0.0;
    const double lo = std::max(t, 0.0);
    switch (impl_) {
        case Impl::Indicator:
            return piece_tail(1.0, 0.0, a, lo, upper_);
        case Impl::PiecewiseLinear: {
            double acc = 0.0;
            // constant extension below the first node
            if (lo < nodes_.front())
                acc += piece_tail(values_.front(), 0.0, a, lo, nodes_.front());
            for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
                const double x1 = std::max(lo, nodes_[i]), x2 = nodes_[i + 1];
                if (x2 <= x1) continue;
                const double slope = (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]);
                const double alpha = values_[i] - slope * nodes_[i];
                acc += piece_tail(alpha, slope, a, x1, x2);
            }
            return acc;
        }
        case Impl::Zigzag: {
            // substitute x = 1/s: integral of phi(x) x^{zig_a - a} dx from 2 to 1/t
            if (lo < std::pow(2.0, -kZigzagMaxLevel)) {
                // analytic limits: the signed triangle areas sum to -log 2 at
                // the native exponent; above it the tail converges geometrically
                if (a == zig_a_) return -M_LN2;
                if (a < zig_a_)
                    throw NotInClassError("zigzag tail moment diverges for a < native exponent");
            }
            const double X = 1.0 / std::max(lo, std::pow(2.0, -kZigzagMaxLevel));
            double acc = 0.0;
            for (const auto& [x1, x2, c0, c1] : zig_pieces(X))
                acc += piece_poly(c0, c1, zig_a_ - a, x1, x2);
            return acc;
        }
        case Impl::Custom: {
            auto f = [&](double s) { return eval_(s) * std::pow(s, a - 1); };
            return integrate_segments(f, lo, R_, custom_kinks_, 1e-12);
        }
    }
    return 0.0;
}

double WeightFunction::abs_tail_moment(double t, int a) const {
    if (t >= R_) return 0.0;
    switch (impl_) {
        case Impl::Indicator:
            return tail_moment(t, a);
        case Impl::Zigzag: {
            const double X = 1.0 / std::max(t, 1.0 / std::pow(2.0, kZigzagMaxLevel));
            double acc = 0.0;
            for (const auto& [x1, x2, c0, c1] : zig_pieces(X)) {
                const double v = piece_poly(c0, c1, zig_a_ - a, x1, x2);
                acc += std::abs(v);  // sign constant per half-triangle
            }
            return acc;
        }
        default: {
            auto f = [&](double s) { return std::abs((*this)(s)) * std::pow(s, a - 1); };
            return integrate_segments(f, t, R_, kink_radii(), 1e-10);
        }
    }
}

double WeightFunction::slice_moment(double s, double t, int gamma) const {
    const double lo = std::sqrt(s * s + t * t);
    if (lo >= R_) return 0.0;
    const int p = gamma - 1;
    switch (impl_) {
        case Impl::Indicator:
            return piece_slice(1.0, 0.0, p, t, lo, upper_);
        case Impl::PiecewiseLinear: {
            double acc = 0.0;
            if (lo < nodes_.front())
                acc += piece_slice(values_.front(), 0.0, p, t, lo, nodes_.front());
            for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
                const double x1 = std::max(lo, nodes_[i]), x2 = nodes_[i + 1];
                if (x2 <= x1) continue;
                const double slope = (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]);
                const double alpha = values_[i] - slope * nodes_[i];
                acc += piece_slice(alpha, slope, p, t, x1, x2);
            }
            return acc;
        }
        default: {
            // zigzag / custom: per-segment quadrature in the radial variable
            auto f = [&](double r) {
                return (*this)(r)*r * std::pow(std::max(r * r - t * t, 1e-300), 0.5 * p);
            };
            return integrate_segments(f, lo, R_, kink_radii(), 1e-11);
        }
    }
}

WeightFunction WeightFunction::sampled(int per_octave, int octaves) const {
    std::vector<double> ns, vs;
    for (int j = per_octave * octaves; j >= 0; --j)
        ns.push_back(R_ * std::pow(2.0, -static_cast<double>(j) / per_octave));
    for (double t : ns) vs.push_back((*this)(t));
    return piecewise_linear(std::move(ns), std::move(vs), tag_);
}

// ---------------------------------------------------------------------------
// norms and membership
// ---------------------------------------------------------------------------

namespace {

std::vector<double> probe_grid(const WeightFunction& z) {
    std::vector<double> g = z.kink_radii();
    const double R = z.support_radius();
    for (int j = 0; j <= 400; ++j) g.push_back(R * std::pow(2.0, -j / 10.0));
    for (int i = 1; i <= 64; ++i) g.push_back(R * i / 64.0);
    std::sort(g.begin(), g.end());
    g.erase(std::remove_if(g.begin(), g.end(), [&](double t) { return t <= 0 || t > R; }), g.end());
    return g;
}

}  // namespace

double norm_Da(const WeightFunction& z, int a) {
    double sup_decay = 0.0, sup_tail = 0.0;
    for (double t : probe_grid(z)) {
        sup_decay = std::max(sup_decay, std::pow(t, a) * std::abs(z(t)));
        sup_tail = std::max(sup_tail, std::abs(z.tail_moment(t, a)));
    }
    return sup_decay + sup_tail;
}

double norm_Dtilde(const WeightFunction& z, int a) {
    double sup = 0.0;
    for (double t : probe_grid(z)) sup = std::max(sup, std::pow(t, a + 2) * std::abs(z(t)));
    return sup;
}

MembershipReport class_membership(const WeightFunction& z, WeightClass tag, int a, double tol) {
    MembershipReport rep;
    const double R = z.support_radius();
    const int J = 40;
    for (int j = 0; j <= J; ++j) {
        const double t = R * std::pow(2.0, -j);
        rep.decay_sequence.push_back(std::pow(t, tag == WeightClass::DaTilde ? a + 2 : a) * z(t));
        if (tag == WeightClass::Da) rep.tail_sequence.push_back(z.tail_moment(t, a));
    }
    // analytic certificates for the structured families
    if (z.impl() == WeightFunction::Impl::Indicator && tag == WeightClass::Da && a >= 1) {
        rep.member = true;
        rep.diagnostic = "indicator: analytic certificate";
        return rep;
    }
    if (z.impl() == WeightFunction::Impl::Zigzag && tag == WeightClass::Da && a == z.zigzag_a()) {
        rep.member = true;
        rep.diagnostic = "zigzag: analytic certificate (alternating tail sums converge)";
        return rep;
    }
    double scale = 1e-30;
    for (double d : rep.decay_sequence) scale = std::max(scale, std::abs(d));
    // decay limit must go to zero
    bool decay_ok = std::abs(rep.decay_sequence.back()) <= tol * std::max(1.0, scale);
    bool tail_ok = true;
    if (tag == WeightClass::Da) {
        const std::size_t m = rep.tail_sequence.size();
        const std::size_t start = m > 10 ? m - 10 : 0;
        for (std::size_t i = start; i + 1 < m; ++i)
            if (std::abs(rep.tail_sequence[i + 1] - rep.tail_sequence[i]) >
                tol * std::max(1.0, std::abs(rep.tail_sequence.back())))
                tail_ok = false;
    }
    rep.member = decay_ok && tail_ok;
    rep.diagnostic = std::string("numeric: decay ") + (decay_ok ? "ok" : "fails") +
                     (tag == WeightClass::Da ? std::string(", tail Cauchy ") + (tail_ok ? "ok" : "fails")
                                             : std::string());
    return rep;
}

// ---------------------------------------------------------------------------
// transforms
// ---------------------------------------------------------------------------

WeightFunction transform_Ra(const WeightFunction& z, int a) {
    auto zz = std::make_shared<WeightFunction>(z);
    auto eval = [zz, a](double t) {
        if (t > zz->support_radius()) return 0.0;
        return (*zz)(t)*std::pow(t, a) + a * zz->tail_moment(t, a);
    };
    return WeightFunction::custom(eval, z.support_radius(), z.kink_radii(), WeightClass::Cc);
}

WeightFunction inverse_Ra(const WeightFunction& phi, int a) {
    auto pp = std::make_shared<WeightFunction>(phi);
    const double R = phi.support_radius();
    auto kinks = phi.kink_radii();
    auto eval = [pp, a, R, kinks](double t) {
        if (t > R) return 0.0;
        auto f = [&](double s) { return (*pp)(s)*std::pow(s, -a - 1); };
        const double tail = integrate_segments(f, t, R, kinks, 1e-12);
        return (*pp)(t)*std::pow(t, -a) - a * tail;
    };
    return WeightFunction::custom(eval, R, kinks, WeightClass::Da);
}

WeightFunction transform_Pa(const WeightFunction& z, int a) {
    auto zz = std::make_shared<WeightFunction>(z);
    auto eval = [zz, a](double t) {
        if (t <= 0.0) return 0.0;
        return std::pow(t, a + 2) * (*zz)(t);
    };
    return WeightFunction::custom(eval, z.support_radius(), z.kink_radii(), WeightClass::C0);
}

WeightFunction inverse_Pa(const WeightFunction& phi, int a) {
    // class check: phi must vanish at 0 for the inverse to land in D~^{a+2};
    // the threshold is relative to the overall size of phi
    double scale = 1e-12;
    for (int i = 1; i <= 32; ++i)
        scale = std::max(scale, std::abs(phi(phi.support_radius() * i / 32.0)));
    const double at0 = phi(std::min(1e-9, 0.5 * phi.support_radius()));
    if (std::abs(at0) > 1e-3 * scale)
        throw NotInClassError("inverse_Pa: input does not vanish at 0 (value " +
                              std::to_string(at0) + ")");
    auto pp = std::make_shared<WeightFunction>(phi);
    auto eval = [pp, a](double t) {
        if (t <= 0.0) return 0.0;
        return (*pp)(t)*std::pow(t, -(a + 2));
    };
    return WeightFunction::custom(eval, phi.support_radius(), phi.kink_radii(),
                                  WeightClass::DaTilde);
}

namespace {

// fixed-order composite rule with splits at the listed kinks; segments are
// further subdivided geometrically so that steep power-law factors stay well
// resolved near the left end
double composite(const std::function<double(double)>& f, double a, double b,
                 std::vector<double> kinks, int order) {
    if (!(b > a)) return 0.0;
    kinks.push_back(b);
    std::sort(kinks.begin(), kinks.end());
    std::vector<double> cuts;
    double prev = a;
    for (double p : kinks) {
        if (p <= prev || p > b) continue;
        double lo = prev;
        while (p / lo > 1.12 && lo > 0.0) {
            lo *= 1.12;
            if (lo < p) cuts.push_back(lo);
        }
        cuts.push_back(p);
        prev = p;
    }
    double acc = 0.0;
    prev = a;
    for (double p : cuts) {
        if (p <= prev) continue;
        acc += integrate_fixed(f, prev, p, order);
        prev = p;
    }
    return acc;
}

}  // namespace

double radial_double_moment(const WeightFunction& z, int gx, double sx, int gy, double sy) {
    const double R = z.support_radius();
    const double rho0 = std::sqrt(sx * sx + sy * sy);
    if (rho0 >= R) return 0.0;
    auto integrand = [&](double rho) {
        const double th_hi = sx > 0 ? std::acos(std::min(1.0, sx / rho)) : 0.5 * M_PI;
        const double th_lo = sy > 0 ? std::asin(std::min(1.0, sy / rho)) : 0.0;
        if (th_hi <= th_lo) return 0.0;
        return z(rho) * std::pow(rho, gx + gy + 1) * angular_moment(gx, gy, th_lo, th_hi);
    };
    auto kinks = z.kink_radii();
    kinks.push_back(std::max(sx, sy));
    return composite(integrand, rho0, R, std::move(kinks), 12);
}

BivariateFn transform_Rab(const WeightFunction& z, int a, int b, bool /*cache*/) {
    auto zz = std::make_shared<const WeightFunction>(z);
    BivariateFn out;
    out.R = z.support_radius();
    out.radial_kinks = z.kink_radii();
    out.backing = zz;
    out.backing_a = a;
    out.backing_b = b;
    out.eval = [zz, a, b](double s, double t) {
        const double rho = std::hypot(s, t);
        if (rho >= zz->support_radius()) return 0.0;
        double v = std::pow(t, b) * std::pow(s, a) * (*zz)(rho);
        if (a > 0) v += a * std::pow(t, b) * zz->slice_moment(s, t, a - 1);
        if (b > 0) v += b * std::pow(s, a) * zz->slice_moment(t, s, b - 1);
        if (a > 0 && b > 0) v += a * b * radial_double_moment(*zz, a - 1, s, b - 1, t);
        return v;
    };
    return out;
}

double transform_Stilde(const BivariateFn& phi, int a, int b, double s, double t) {
    const double R = phi.R;
    const double T1 = phi.eval(s, t) / (std::pow(s, a) * std::pow(t, b));
    auto row_kinks = [&](double v) {
        std::vector<double> ks;
        for (double rho : phi.radial_kinks)
            if (rho > v) ks.push_back(std::sqrt(rho * rho - v * v));
        return ks;
    };
    const double umax = t < R ? std::sqrt(R * R - t * t) : 0.0;
    const double vmax = s < R ? std::sqrt(R * R - s * s) : 0.0;
    const double T2 =
        umax > s ? integrate_segments([&](double u) { return phi.eval(u, t) * std::pow(u, -a - 1); },
                                      s, umax, row_kinks(t), 1e-11)
                 : 0.0;
    const double T3 =
        vmax > t ? integrate_segments([&](double v) { return phi.eval(s, v) * std::pow(v, -b - 1); },
                                      t, vmax, row_kinks(s), 1e-11)
                 : 0.0;
    double T4 = 0.0;
    if (umax > s) {
        auto outer = [&](double u) {
            const double vm = std::sqrt(std::max(R * R - u * u, 0.0));
            if (vm <= t) return 0.0;
            return std::pow(u, -a - 1) *
                   integrate_segments([&](double v) { return phi.eval(u, v) * std::pow(v, -b - 1); },
                                      t, vm, row_kinks(u), 1e-9);
        };
        T4 = integrate_segments(outer, s, umax, row_kinks(t), 1e-8);
    }
    return T1 - (a / std::pow(t, b)) * T2 - (b / std::pow(s, a)) * T3 + a * b * T4;
}

WeightFunction transform_Sab(const BivariateFn& phi, int a, int b, int grid_n, double t_min) {
    const double R = phi.R;
    // Cancellation of the four terms amplifies roundoff like (R/tau)^{a+b};
    // keep the sampled grid above the conditioning floor.
    if (t_min <= 0.0) t_min = R * std::max(0.02, std::pow(10.0, -9.5 / (a + b + 1)));
    std::vector<double> taus(grid_n);
    for (int i = 0; i < grid_n; ++i) taus[i] = t_min + (R - t_min) * i / (grid_n - 1);
    auto row_kinks = [&](double v) {
        std::vector<double> ks;
        for (double rho : phi.radial_kinks)
            if (rho > v) ks.push_back(std::sqrt(rho * rho - v * v));
        return ks;
    };

    // When phi is an R^{a,b} image, the contribution of its double-integral
    // term to the row/column integrals is swapped by Fubini into single
    // radial moments; everything else stays numeric.
    const WeightFunction* zb = phi.backing ? phi.backing.get() : nullptr;
    const bool structured = zb && phi.backing_a == a && phi.backing_b == b;

    auto phi_first3 = [&](double u, double v) {
        const double rho = std::hypot(u, v);
        if (rho >= zb->support_radius()) return 0.0;
        double val = std::pow(v, b) * std::pow(u, a) * (*zb)(rho);
        val += a * std::pow(v, b) * zb->slice_moment(u, v, a - 1);
        val += b * std::pow(u, a) * zb->slice_moment(v, u, b - 1);
        return val;
    };

    auto rowint = [&](double w) {  // int_w phi(u, w) u^{-a-1} du
        const double umax = w < R ? std::sqrt(R * R - w * w) : 0.0;
        if (umax <= w) return 0.0;
        if (!structured)
            return composite([&](double u) { return phi.eval(u, w) * std::pow(u, -a - 1); }, w,
                             umax, row_kinks(w), 20);
        const double numeric =
            composite([&](double u) { return phi_first3(u, w) * std::pow(u, -a - 1); }, w, umax,
                      row_kinks(w), 20);
        const double r2 = radial_double_moment(*zb, a - 1, w, b - 1, w);
        const double r1 = radial_double_moment(*zb, -1, w, b - 1, w);
        return numeric + b * (std::pow(w, -a) * r2 - r1);
    };
    auto colint = [&](double w) {  // int_w phi(w, v) v^{-b-1} dv
        const double vmax = w < R ? std::sqrt(R * R - w * w) : 0.0;
        if (vmax <= w) return 0.0;
        if (!structured)
            return composite([&](double v) { return phi.eval(w, v) * std::pow(v, -b - 1); }, w,
                             vmax, row_kinks(w), 20);
        const double numeric =
            composite([&](double v) { return phi_first3(w, v) * std::pow(v, -b - 1); }, w, vmax,
                      row_kinks(w), 20);
        const double r2 = radial_double_moment(*zb, a - 1, w, b - 1, w);
        const double r1 = radial_double_moment(*zb, -1, w, a - 1, w);  // powers swapped
        return numeric + a * (std::pow(w, -b) * r2 - r1);
    };

    // F(w) = int int_{u,v >= w} phi / (u^{a+1} v^{b+1}); accumulated downward
    // along the diagonal via dF/dw = -[colint(w)/w^{a+1} + rowint(w)/w^{b+1}]
    std::vector<double> values(grid_n, 0.0);
    double F = 0.0;
    double w_prev = R;  // F(R) = 0
    for (int i = grid_n - 1; i >= 0; --i) {
        const double w = taus[i] / std::sqrt(2.0);
        auto G = [&](double x) {
            return colint(x) / std::pow(x, a + 1) + rowint(x) / std::pow(x, b + 1);
        };
        if (w < w_prev) {
            std::vector<double> splits;
            for (double rho : phi.radial_kinks) {
                const double xc = rho / std::sqrt(2.0);
                if (xc > w && xc < w_prev) splits.push_back(xc);
            }
            F += composite(G, w, w_prev, splits, 12);
        }
        w_prev = w;
        const double T1 = phi.eval(w, w) / std::pow(w, a + b);
        values[i] =
            T1 - (a / std::pow(w, b)) * rowint(w) - (b / std::pow(w, a)) * colint(w) + a * b * F;
    }
    return WeightFunction::piecewise_linear(std::move(taus), std::move(values), WeightClass::Da);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

nlohmann::json to_json(const WeightFunction& w) {
    nlohmann::json j;
    switch (w.impl()) {
        case WeightFunction::Impl::Indicator:
            j["kind"] = "indicator";
            j["upper"] = w.support_radius();
            break;
        case WeightFunction::Impl::PiecewiseLinear:
            j["kind"] = "samples";
            j["nodes"] = w.nodes();
            j["values"] = w.values();
            break;
        case WeightFunction::Impl::Zigzag:
            j["kind"] = "zigzag";
            j["a"] = w.zigzag_a();
            break;
        case WeightFunction::Impl::Custom:
            throw std::invalid_argument("to_json: custom weights must be sampled first");
    }
    j["class"] = to_string(w.tag());
    return j;
}

WeightFunction weight_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    WeightClass tag = WeightClass::Da;
    if (j.contains("class")) {
        const std::string c = j["class"].get<std::string>();
        if (c == "D~^{a+2}") tag = WeightClass::DaTilde;
        else if (c == "C_c") tag = WeightClass::Cc;
        else if (c == "C_0") tag = WeightClass::C0;
    }
    if (kind == "indicator") return WeightFunction::indicator(j.at("upper").get<double>(), tag);
    if (kind == "samples")
        return WeightFunction::piecewise_linear(j.at("nodes").get<std::vector<double>>(),
                                                j.at("values").get<std::vector<double>>(), tag);
    if (kind == "zigzag") return WeightFunction::zigzag(j.at("a").get<int>());
    throw std::invalid_argument("weight_from_json: unknown kind " + kind);
}

}  // namespace hma
