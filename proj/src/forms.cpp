#include "hma/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace hma {

namespace {

// Sign of merging two disjoint sorted index sets: (-1)^{#inversions}.
inline int merge_sign(std::uint32_t a, std::uint32_t b) {
    int inv = 0;
    while (b) {
        const int bit = std::countr_zero(b);
        inv += std::popcount(a >> (bit + 1));
        b &= b - 1;
    }
    return (inv & 1) ? -1 : 1;
}

void normalize(std::vector<std::pair<std::uint32_t, double>>& v) {
    std::sort(v.begin(), v.end(), [](auto& p, auto& q) { return p.first < q.first; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::uint32_t m = v[i].first;
        double s = 0.0;
        while (i < v.size() && v[i].first == m) s += v[i++].second;
        if (std::abs(s) > 1e-300) v[out++] = {m, s};
    }
    v.resize(out);
}

}  // namespace

double AlternatingForm::coeff(std::uint32_t mask) const {
    auto it = std::lower_bound(coeffs.begin(), coeffs.end(), mask,
                               [](const auto& p, std::uint32_t m) { return p.first < m; });
    return (it != coeffs.end() && it->first == mask) ? it->second : 0.0;
}

AlternatingForm& AlternatingForm::scale(double s) {
    for (auto& [m, c] : coeffs) c *= s;
    return *this;
}

double AlternatingForm::evaluate(const Eigen::MatrixXd& vectors) const {
    if (static_cast<int>(vectors.cols()) != degree)
        throw DegreeError("evaluate: need exactly `degree` vectors");
    double total = 0.0;
    Eigen::MatrixXd sub(degree, degree);
    for (const auto& [mask, c] : coeffs) {
        int r = 0;
        for (std::uint32_t m = mask; m; m &= m - 1) {
            const int i = std::countr_zero(m);
            sub.row(r++) = vectors.row(i);
        }
        total += c * (degree == 0 ? 1.0 : sub.determinant());
    }
    return total;
}

AlternatingForm wedge(const AlternatingForm& a, const AlternatingForm& b) {
    if (a.dim != b.dim) throw DegreeError("wedge: ambient dimension mismatch");
    if (a.degree + b.degree > a.dim) throw DegreeError("wedge: degree overflow");
    AlternatingForm out;
    out.dim = a.dim;
    out.degree = a.degree + b.degree;
    out.coeffs.reserve(a.coeffs.size() * b.coeffs.size());
    for (const auto& [ma, ca] : a.coeffs)
        for (const auto& [mb, cb] : b.coeffs) {
            if (ma & mb) continue;
            out.coeffs.emplace_back(ma | mb, ca * cb * merge_sign(ma, mb));
        }
    normalize(out.coeffs);
    return out;
}

Generator generator_from_name(const std::string& name) {
    if (name == "theta0" || name == "th0") return Generator::Theta0;
    if (name == "theta1" || name == "th1") return Generator::Theta1;
    if (name == "theta2" || name == "th2") return Generator::Theta2;
    if (name == "beta1" || name == "b1") return Generator::Beta1;
    if (name == "beta2" || name == "b2") return Generator::Beta2;
    if (name == "gamma1" || name == "g1") return Generator::Gamma1;
    if (name == "gamma2" || name == "g2") return Generator::Gamma2;
    throw std::domain_error("unknown generator name: " + name);
}

AlternatingForm generator_form(Generator g, int n, const Eigen::VectorXd& p) {
    if (p.size() != 2 * n) throw FrameError("generator_form: base point has wrong dimension");
    AlternatingForm f;
    f.dim = 4 * n;
    const auto one = [](int i) { return std::uint32_t{1} << i; };
    auto add = [&](int i, int j, double c) { f.coeffs.emplace_back(one(i) | one(j), c); };
    auto add1 = [&](int i, double c) { f.coeffs.emplace_back(one(i), c); };
    for (int j = 0; j < n; ++j) {
        const int xj = 2 * j, yj = 2 * j + 1;
        const int fx = 2 * n + 2 * j, fy = 2 * n + 2 * j + 1;
        switch (g) {
            case Generator::Theta0:
                f.degree = 2;
                add(xj, yj, 1.0);
                break;
            case Generator::Theta1:
                f.degree = 2;
                add(xj, fy, 1.0);
                add(yj, fx, -1.0);
                break;
            case Generator::Theta2:
                f.degree = 2;
                add(fx, fy, 1.0);
                break;
            case Generator::Beta1:
                f.degree = 1;
                add1(fx, p(xj));
                add1(fy, p(yj));
                break;
            case Generator::Beta2:
                f.degree = 1;
                add1(fy, p(xj));
                add1(fx, -p(yj));
                break;
            case Generator::Gamma1:
                f.degree = 1;
                add1(xj, p(xj));
                add1(yj, p(yj));
                break;
            case Generator::Gamma2:
                f.degree = 1;
                add1(yj, p(xj));
                add1(xj, -p(yj));
                break;
        }
    }
    normalize(f.coeffs);
    return f;
}

AlternatingForm pullback(const AlternatingForm& form, const GraphFrame& frame) {
    const int m = static_cast<int>(frame.x.size());
    if (form.dim != 2 * m) throw FrameError("pullback: form does not live on T*R^m");
    // one-form images: e_i^* -> e_i^* for i < m, e_{m+j}^* -> row j of H
    const Eigen::MatrixXd& H = frame.hess;
    AlternatingForm out;
    out.dim = m;
    out.degree = form.degree;
    std::map<std::uint32_t, double> acc;

    Eigen::MatrixXd rows(form.degree, m);
    std::vector<int> idx(form.degree);
    for (const auto& [mask, c] : form.coeffs) {
        int r = 0;
        bool base_only = true;
        for (std::uint32_t mm = mask; mm; mm &= mm - 1) {
            const int i = std::countr_zero(mm);
            idx[r] = i;
            if (i < m) {
                rows.row(r).setZero();
                rows(r, i) = 1.0;
            } else {
                rows.row(r) = H.row(i - m);
                base_only = false;
            }
            ++r;
        }
        if (base_only) {
            acc[mask] += c;
            continue;
        }
        // expand over sorted target tuples via minors
        std::vector<int> comb(form.degree);
        for (int i = 0; i < form.degree; ++i) comb[i] = i;
        Eigen::MatrixXd sub(form.degree, form.degree);
        while (true) {
            std::uint32_t tmask = 0;
            for (int i = 0; i < form.degree; ++i) {
                tmask |= std::uint32_t{1} << comb[i];
                for (int r2 = 0; r2 < form.degree; ++r2) sub(r2, i) = rows(r2, comb[i]);
            }
            const double det = form.degree == 1 ? sub(0, 0) : sub.determinant();
            if (std::abs(det) > 1e-300) acc[tmask] += c * det;
            // next combination
            int i = form.degree - 1;
            while (i >= 0 && comb[i] == m - form.degree + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j2 = i + 1; j2 < form.degree; ++j2) comb[j2] = comb[j2 - 1] + 1;
        }
    }
    for (const auto& [mask, c] : acc)
        if (std::abs(c) > 1e-300) out.coeffs.emplace_back(mask, c);
    return out;
}

AlternatingForm pullback_generator(Generator g, const GraphFrame& frame) {
    const int n = static_cast<int>(frame.x.size()) / 2;
    return pullback(generator_form(g, n, frame.x), frame);
}

double density_of_product(const std::vector<std::pair<Generator, int>>& generators,
                          const GraphFrame& frame) {
    const int m = static_cast<int>(frame.x.size());
    int total_degree = 0;
    AlternatingForm acc;
    acc.dim = m;
    acc.degree = 0;
    acc.coeffs = {{0u, 1.0}};
    for (const auto& [g, mult] : generators) {
        if (mult < 0) throw DegreeError("density_of_product: negative multiplicity");
        for (int i = 0; i < mult; ++i) {
            AlternatingForm pg = pullback_generator(g, frame);
            total_degree += pg.degree;
            if (total_degree > m) throw DegreeError("density_of_product: degree exceeds 2n");
            acc = wedge(acc, pg);
            if (acc.coeffs.empty()) return 0.0;
        }
    }
    if (total_degree != m) throw DegreeError("density_of_product: total degree must equal 2n");
    return acc.coeff((std::uint32_t{1} << m) - 1);
}

AlternatingForm generator_product(const std::vector<std::pair<Generator, int>>& generators, int n,
                                  const Eigen::VectorXd& base_point) {
    AlternatingForm acc;
    acc.dim = 4 * n;
    acc.degree = 0;
    acc.coeffs = {{0u, 1.0}};
    for (const auto& [g, mult] : generators)
        for (int i = 0; i < mult; ++i) acc = wedge(acc, generator_form(g, n, base_point));
    return acc;
}

double positivity_frame_value(const AlternatingForm& form, const Eigen::MatrixXd& subspace_frame,
                              const Eigen::MatrixXd& complement_frame) {
    const int m = static_cast<int>(subspace_frame.rows());
    if (form.dim != 2 * m) throw FrameError("positivity_frame_value: dimension mismatch");
    const int k = static_cast<int>(subspace_frame.cols());
    if (k + static_cast<int>(complement_frame.cols()) != m)
        throw FrameError("positivity_frame_value: frames do not span R^{2n}");
    // orthonormality and orientation checks
    Eigen::MatrixXd full(m, m);
    full.leftCols(complement_frame.cols()) = complement_frame;
    full.rightCols(k) = subspace_frame;
    if ((full.transpose() * full - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
        throw FrameError("positivity_frame_value: frame not orthonormal");
    if (full.determinant() < 0.0)
        throw FrameError("positivity_frame_value: frame must be positively oriented");

    // base slots: complement vectors (bar e), fiber slots: subspace vectors (epsilon)
    Eigen::MatrixXd vecs = Eigen::MatrixXd::Zero(2 * m, m);
    for (int j = 0; j < m - k; ++j) vecs.block(0, j, m, 1) = complement_frame.col(j);
    for (int j = 0; j < k; ++j) vecs.block(m, m - k + j, m, 1) = subspace_frame.col(j);
    return form.evaluate(vecs);
}

Eigen::MatrixXd oriented_complement(const Eigen::MatrixXd& subspace_frame) {
    const int m = static_cast<int>(subspace_frame.rows());
    const int k = static_cast<int>(subspace_frame.cols());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(subspace_frame.transpose());
    Eigen::MatrixXd ker = lu.kernel();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ker);
    Eigen::MatrixXd comp = Eigen::MatrixXd(qr.householderQ()).leftCols(m - k);
    Eigen::MatrixXd full(m, m);
    full.leftCols(m - k) = comp;
    full.rightCols(k) = subspace_frame;
    if (full.determinant() < 0.0) comp.col(0) = -comp.col(0);
    return comp;
}

AlternatingForm hessian_generator(int m, int k) {
    if (k < 0 || k > m) throw DegreeError("hessian_generator: k out of range");
    // sum over k-subsets S: sign(S^c, S) dx_{S^c} ^ dy_S, which pulls back to
    // the sum of principal k x k minors of the Hessian.
    AlternatingForm f;
    f.dim = 2 * m;
    f.degree = m;
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    const auto push = [&]() {
        std::uint32_t smask = 0, cmask = 0;
        for (int i = 0; i < k; ++i) smask |= std::uint32_t{1} << comb[i];
        for (int i = 0; i < m; ++i)
            if (!(smask & (std::uint32_t{1} << i))) cmask |= std::uint32_t{1} << i;
        // order of slots: dx_{S^c} then dy_S ; compute sign to sorted (base < fiber always)
        std::uint32_t fiber = 0;
        for (int i = 0; i < k; ++i) fiber |= std::uint32_t{1} << (m + comb[i]);
        f.coeffs.emplace_back(cmask | fiber, merge_sign(cmask, smask));
    };
    if (k == 0) {
        std::uint32_t all = (std::uint32_t{1} << m) - 1;
        f.coeffs = {{all, 1.0}};
        return f;
    }
    while (true) {
        push();
        int i = k - 1;
        while (i >= 0 && comb[i] == m - k + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
    std::sort(f.coeffs.begin(), f.coeffs.end(),
              [](auto& p, auto& q) { return p.first < q.first; });
    return f;
}

}  // namespace hma
