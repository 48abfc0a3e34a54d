#pragma once

// Dimension-keeping semi-tensor product (DK-STP).
//
// Every DK-STP is fixed by a family of bridge matrices Psi_{n x p}:
//     A (m x n)  |x|  B (p x q)  :=  A Psi_{n x p} B      (m x q)
// The family must satisfy rank(Psi_{n,p}) = min(n, p) and Psi_{n,n} = I.
// Products, powers and analytic functions of non-square matrices live in the
// extended ring {r I_{m x n} + A}, where I_{m x n} is an artificial identity
// acting on R^inf through Psi_{m x p}.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "matrix.hpp"
#include "xspace.hpp"

namespace orkit {

// A weight family {xi_k in R^k}: xi_1 = 1, xi_k nonzero and nonnegative.
class WeightRule {
public:
    enum class Kind { ones, mean, custom };

    static WeightRule ones() { return WeightRule(Kind::ones, {}); }
    static WeightRule mean() { return WeightRule(Kind::mean, {}); }
    static WeightRule custom(std::function<VecD(std::int64_t)> gen) {
        return WeightRule(Kind::custom, std::move(gen));
    }

    Kind kind() const { return kind_; }

    VecD operator()(std::int64_t k) const {
        if (k < 1) throw ShapeError("weight dimension must be >= 1");
        VecD w;
        switch (kind_) {
        case Kind::ones: w = VecD::Ones(k); break;
        case Kind::mean: w = VecD::Constant(k, 1.0 / static_cast<double>(k)); break;
        case Kind::custom: w = gen_(k); break;
        }
        if (w.size() != k) throw InvalidBridge("weight generator returned wrong length");
        if (k == 1 && w(0) != 1.0) throw InvalidBridge("weight xi_1 must equal 1");
        if ((w.array() < 0.0).any()) throw InvalidBridge("weights must be nonnegative");
        if (w.isZero(0.0)) throw InvalidBridge("weights must be nonzero");
        return w;
    }

private:
    WeightRule(Kind k, std::function<VecD(std::int64_t)> g) : kind_(k), gen_(std::move(g)) {}
    Kind kind_;
    std::function<VecD(std::int64_t)> gen_;
};

// Checks the two bridge axioms on a single matrix.
inline bool satisfies_bridge_axioms(const MatD& psi, double rel_tol = 1e-9) {
    const auto n = psi.rows(), p = psi.cols();
    if (n == p && !psi.isApprox(MatD::Identity(n, n), 1e-12) && !(psi - MatD::Identity(n, n)).isZero(1e-12))
        return false;
    return numerical_rank(psi, rel_tol) == std::min(n, p);
}

class Bridge {
public:
    enum class Kind { standard, projecting, weighted, pseudo_inverse, custom };
    using Table = std::map<std::pair<std::int64_t, std::int64_t>, MatD>;

    // (I_n (x) 1^T_{t/n})(I_p (x) 1_{t/p}): the unweighted DK-STP bridge.
    static Bridge standard() { return Bridge(Kind::standard); }
    // Pi^p_n; the library default.
    static Bridge projecting() { return Bridge(Kind::projecting); }
    static Bridge weighted(WeightRule xi, WeightRule eta) {
        Bridge b(Kind::weighted);
        b.xi_ = std::make_shared<WeightRule>(std::move(xi));
        b.eta_ = std::make_shared<WeightRule>(std::move(eta));
        return b;
    }
    // Psi_{n x p} = H^+ for an observer matrix H (p x n).
    static Bridge pseudo_inverse(const MatD& h) {
        Bridge b(Kind::pseudo_inverse);
        b.pinv_ = std::make_shared<MatD>(orkit::pseudo_inverse(h));
        return b;
    }
    // Explicit table; validated eagerly so every later lookup is total
    // for the listed shapes.
    static Bridge custom(Table table) {
        for (const auto& [shape, psi] : table) {
            if (psi.rows() != shape.first || psi.cols() != shape.second)
                throw InvalidBridge("custom bridge entry has wrong shape");
            if (!satisfies_bridge_axioms(psi))
                throw InvalidBridge("custom bridge (" + std::to_string(shape.first) + "," +
                                    std::to_string(shape.second) + ") violates rank/identity axioms");
        }
        Bridge b(Kind::custom);
        b.table_ = std::make_shared<const Table>(std::move(table));
        return b;
    }

    Kind kind() const { return kind_; }

    std::string name() const {
        switch (kind_) {
        case Kind::standard: return "default";
        case Kind::projecting: return "projecting";
        case Kind::weighted: return "weighted";
        case Kind::pseudo_inverse: return "pseudoinverse";
        case Kind::custom: return "custom";
        }
        return "?";
    }

    // Psi_{n x p}.
    MatD matrix(std::int64_t n, std::int64_t p) const {
        if (n < 1 || p < 1) throw ShapeError("bridge dimensions must be >= 1");
        if (n == p) return MatD::Identity(n, n);
        switch (kind_) {
        case Kind::standard: return standard_matrix(n, p);
        case Kind::projecting: return projection_matrix(p, n);
        case Kind::weighted: return weighted_matrix(n, p);
        case Kind::pseudo_inverse:
            if (pinv_->rows() != n || pinv_->cols() != p)
                throw ShapeError("pseudo-inverse bridge is " + std::to_string(pinv_->rows()) + "x" +
                                 std::to_string(pinv_->cols()) + ", requested " + std::to_string(n) + "x" +
                                 std::to_string(p));
            return *pinv_;
        case Kind::custom: {
            auto it = table_->find({n, p});
            if (it == table_->end())
                throw MissingBridge("custom bridge has no entry for (" + std::to_string(n) + "," +
                                    std::to_string(p) + ")");
            return it->second;
        }
        }
        throw Error("unknown bridge kind");
    }

private:
    explicit Bridge(Kind k) : kind_(k) {}

    static MatD standard_matrix(std::int64_t n, std::int64_t p) {
        const std::int64_t t = checked_lcm(n, p);
        const std::int64_t a = t / n, b = t / p;
        MatD out(n, p);
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = 0; j < p; ++j)
                out(i, j) = static_cast<double>(detail::block_overlap(i, a, j, b));
        return out;
    }

    // (I_n (x) xi^T_{t/n})(I_p (x) eta_{t/p})
    MatD weighted_matrix(std::int64_t n, std::int64_t p) const {
        const std::int64_t t = checked_lcm(n, p);
        const std::int64_t a = t / n, b = t / p;
        const VecD xi = (*xi_)(a), eta = (*eta_)(b);
        MatD out = MatD::Zero(n, p);
        for (std::int64_t s = 0; s < t; ++s) out(s / a, s / b) += xi(s % a) * eta(s % b);
        return out;
    }

    Kind kind_;
    std::shared_ptr<WeightRule> xi_, eta_;
    std::shared_ptr<MatD> pinv_;
    std::shared_ptr<const Table> table_;
};

inline MatD bridge_matrix(const Bridge& b, std::int64_t n, std::int64_t p) { return b.matrix(n, p); }

// Exact bridge matrices for the two parameter-free families.
template <class T>
Mat<T> standard_bridge_matrix(std::int64_t n, std::int64_t p) {
    const std::int64_t t = checked_lcm(n, p);
    const std::int64_t a = t / n, b = t / p;
    Mat<T> out(n, p);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < p; ++j) out(i, j) = T(detail::block_overlap(i, a, j, b));
    return out;
}

template <class T>
Mat<T> exact_bridge_matrix(Bridge::Kind kind, std::int64_t n, std::int64_t p) {
    switch (kind) {
    case Bridge::Kind::standard: return standard_bridge_matrix<T>(n, p);
    case Bridge::Kind::projecting: return projection_matrix<T>(p, n);
    default: throw Error("exact bridge matrices exist only for the default and projecting bridges");
    }
}

// A |x| B = A Psi_{n x p} B.
inline MatD dk_mul(const MatD& a, const MatD& b, const Bridge& br = Bridge::projecting()) {
    return a * br.matrix(a.cols(), b.rows()) * b;
}

inline DimVector dk_action(const MatD& a, const DimVector& x, const Bridge& br = Bridge::projecting()) {
    return DimVector(a * (br.matrix(a.cols(), x.dim()) * x.entries()));
}

// Pi_A = A Psi_{n x m}: the square matrix through which A acts on R^m.
inline MatD pi_A(const MatD& a, const Bridge& br = Bridge::projecting()) {
    return a * br.matrix(a.cols(), a.rows());
}

inline MatD lie_bracket_dk(const MatD& a, const MatD& b, const Bridge& br = Bridge::projecting()) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("lie_bracket_dk: shapes differ");
    return dk_mul(a, b, br) - dk_mul(b, a, br);
}

// r I_{m x n} + A.
struct ExtElem {
    double r = 0.0;
    MatD a;

    static ExtElem identity(Eigen::Index m, Eigen::Index n) { return {1.0, MatD::Zero(m, n)}; }
    static ExtElem pure(MatD a) { return {0.0, std::move(a)}; }

    Eigen::Index rows() const { return a.rows(); }
    Eigen::Index cols() const { return a.cols(); }
    bool is_pure() const { return r == 0.0; }
    double norm() const { return std::sqrt(r * r + a.squaredNorm()); }
};

inline ExtElem ext_add(const ExtElem& x, const ExtElem& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw ShapeError("ext_add: shapes differ");
    return {x.r + y.r, x.a + y.a};
}

inline ExtElem ext_scale(const ExtElem& x, double s) { return {x.r * s, x.a * s}; }

// (r1 I + A)(r2 I + B) = r1 r2 I + (r1 B + r2 A + A |x| B)
inline ExtElem ext_mul(const ExtElem& x, const ExtElem& y, const Bridge& br = Bridge::projecting()) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw ShapeError("ext_mul: shapes differ");
    return {x.r * y.r, x.r * y.a + y.r * x.a + dk_mul(x.a, y.a, br)};
}

// (r I_{m x n} + A) |x| x = r Psi_{m x p} x + A Psi_{n x p} x
inline DimVector ext_action(const ExtElem& e, const DimVector& x, const Bridge& br = Bridge::projecting()) {
    VecD out = e.a * (br.matrix(e.cols(), x.dim()) * x.entries());
    if (e.r != 0.0) out += e.r * (br.matrix(e.rows(), x.dim()) * x.entries());
    return DimVector(std::move(out));
}

// A^<k>: identity for k = 0, otherwise A (Psi_{n x m} A)^{k-1}.
inline ExtElem dk_power(const MatD& a, int k, const Bridge& br = Bridge::projecting()) {
    if (k < 0) throw ShapeError("dk_power: negative exponent");
    if (k == 0) return ExtElem::identity(a.rows(), a.cols());
    const MatD pa = br.matrix(a.cols(), a.rows()) * a;
    MatD p = a;
    for (int i = 1; i < k; ++i) p = p * pa;
    return ExtElem::pure(std::move(p));
}

// sqrt(lambda_max(Psi^T A^T A Psi)), Psi = Psi_{n x m}.
inline double dk_norm(const MatD& a, const Bridge& br = Bridge::projecting()) {
    const MatD pa = pi_A(a, br);
    if (pa.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<MatD> es(pa.transpose() * pa, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

struct SeriesOptions {
    double rel_tol = 1e-14;
    int max_terms = 200;
};

struct AnalyticFn {
    enum class Kind { exp, sin, cos, ln1p, pow, cosh, sinh };
    Kind kind = Kind::exp;
    double alpha = 0.0; // exponent for pow: (I + A)^<alpha>

    static AnalyticFn exp() { return {Kind::exp}; }
    static AnalyticFn sin() { return {Kind::sin}; }
    static AnalyticFn cos() { return {Kind::cos}; }
    static AnalyticFn ln1p() { return {Kind::ln1p}; }
    static AnalyticFn pow(double a) { return {Kind::pow, a}; }
    static AnalyticFn cosh() { return {Kind::cosh}; }
    static AnalyticFn sinh() { return {Kind::sinh}; }

    // True when the Taylor series only converges for ||A|| < 1.
    bool finite_radius() const {
        if (kind == Kind::ln1p) return true;
        if (kind == Kind::pow) return !(alpha >= 0.0 && std::floor(alpha) == alpha);
        return false;
    }
};

namespace detail {

// Taylor coefficients c_k, generated incrementally.
class TaylorCoefficients {
public:
    explicit TaylorCoefficients(AnalyticFn f) : f_(f) {}

    double operator()(int k) {
        while (static_cast<int>(inv_fact_.size()) <= k)
            inv_fact_.push_back(inv_fact_.back() / static_cast<double>(inv_fact_.size()));
        const double ifk = inv_fact_[static_cast<std::size_t>(k)];
        switch (f_.kind) {
        case AnalyticFn::Kind::exp: return ifk;
        case AnalyticFn::Kind::sin: return k % 2 == 1 ? ((k / 2) % 2 == 0 ? ifk : -ifk) : 0.0;
        case AnalyticFn::Kind::cos: return k % 2 == 0 ? ((k / 2) % 2 == 0 ? ifk : -ifk) : 0.0;
        case AnalyticFn::Kind::cosh: return k % 2 == 0 ? ifk : 0.0;
        case AnalyticFn::Kind::sinh: return k % 2 == 1 ? ifk : 0.0;
        case AnalyticFn::Kind::ln1p:
            if (k == 0) return 0.0;
            return (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
        case AnalyticFn::Kind::pow: {
            // binom(alpha, k)
            double c = 1.0;
            for (int i = 0; i < k; ++i) c *= (f_.alpha - i) / static_cast<double>(i + 1);
            return c;
        }
        }
        return 0.0;
    }

private:
    AnalyticFn f_;
    std::vector<double> inv_fact_{1.0};
};

} // namespace detail

// Truncated Taylor series f<A> = c_0 I_{m x n} + sum_k c_k A^<k>.
inline ExtElem dk_analytic(AnalyticFn f, const MatD& a, const Bridge& br = Bridge::projecting(),
                           SeriesOptions opt = {}) {
    if (f.finite_radius()) {
        const double nrm = dk_norm(a, br);
        if (nrm >= 1.0)
            throw ConvergenceError("series diverges: DK-norm " + std::to_string(nrm) + " >= 1");
    }
    detail::TaylorCoefficients coef(f);
    ExtElem acc{coef(0), MatD::Zero(a.rows(), a.cols())};
    const MatD pa = br.matrix(a.cols(), a.rows()) * a;
    MatD power = a; // A^<k>
    for (int k = 1; k <= opt.max_terms; ++k) {
        if (k > 1) power = power * pa;
        if (power.isZero(0.0)) return acc;
        // (I + A)^<alpha> with integer alpha >= 0 is a finite sum.
        if (f.kind == AnalyticFn::Kind::pow && !f.finite_radius() && k > f.alpha) return acc;
        const double c = coef(k);
        if (c == 0.0) continue;
        const MatD term = c * power;
        acc.a += term;
        if (term.norm() <= opt.rel_tol * acc.norm()) return acc;
    }
    throw NonConvergence("series did not converge within " + std::to_string(opt.max_terms) + " terms");
}

// Monic characteristic polynomial coefficients c_0..c_{m-1} of a square
// matrix (p(x) = x^m + c_{m-1} x^{m-1} + ... + c_0) by Faddeev-LeVerrier.
// Exact for rational input.
template <class T>
std::vector<T> char_poly_faddeev(const Mat<T>& m) {
    if (m.rows() != m.cols()) throw ShapeError("char_poly: matrix is not square");
    const Eigen::Index n = m.rows();
    std::vector<T> c(static_cast<std::size_t>(n), T(0));
    Mat<T> mk = Mat<T>::Zero(n, n);
    T ck(1);
    for (Eigen::Index k = 1; k <= n; ++k) {
        Mat<T> next = m * mk;
        for (Eigen::Index i = 0; i < n; ++i) next(i, i) += ck;
        mk = next;
        Mat<T> amk = m * mk;
        T tr(0);
        for (Eigen::Index i = 0; i < n; ++i) tr += amk(i, i);
        ck = -tr / T(static_cast<int>(k));
        c[static_cast<std::size_t>(n - k)] = ck;
    }
    return c;
}

// Same coefficients from the eigenvalues (floating route).
inline std::vector<double> char_poly_eigen(const MatD& m) {
    if (m.rows() != m.cols()) throw ShapeError("char_poly: matrix is not square");
    const Eigen::Index n = m.rows();
    Eigen::EigenSolver<MatD> es(m, false);
    std::vector<std::complex<double>> poly{1.0}; // highest degree first
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t j = 0; j < poly.size(); ++j) {
            next[j] += poly[j];
            next[j + 1] -= lam * poly[j];
        }
        poly = std::move(next);
    }
    std::vector<double> c(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = poly[static_cast<std::size_t>(n - k)].real();
    return c;
}

enum class CayleyVariant {
    standard,  // characteristic polynomial of Pi_A (degree m)
    transposed // characteristic polynomial of Psi_{n x m} A (degree n); shorter when n < m
};

namespace detail {

// || A^<d+1> + c_{d-1} A^<d> + ... + c_0 A ||_F with Horner's scheme on the
// right factor Q = Psi_{n x m} A, using A^<k+1> = A Q^k.
template <class T>
Mat<T> cayley_residual_matrix(const Mat<T>& a, const Mat<T>& q, const std::vector<T>& c) {
    const Eigen::Index n = q.rows();
    Mat<T> acc = Mat<T>::Identity(n, n); // Horner over Q
    for (std::size_t k = c.size(); k-- > 0;) {
        acc = acc * q;
        for (Eigen::Index i = 0; i < n; ++i) acc(i, i) += c[k];
    }
    return a * acc;
}

} // namespace detail

inline double cayley_hamilton_residual(const MatD& a, const Bridge& br = Bridge::projecting(),
                                       CayleyVariant variant = CayleyVariant::standard) {
    const MatD psi = br.matrix(a.cols(), a.rows());
    const MatD q = psi * a;
    const std::vector<double> c =
        variant == CayleyVariant::standard ? char_poly_eigen(a * psi) : char_poly_eigen(q);
    // A^<d+1> + sum c_k A^<k+1> = A * p(Q) when the coefficients come from
    // Pi_A (same nonzero spectrum as Q), so a degree-m poly in Q is used.
    return detail::cayley_residual_matrix<double>(a, q, c).norm();
}

// Exact variant for rational input and the default/projecting bridges.
inline MatQ cayley_hamilton_residual_exact(const MatQ& a, Bridge::Kind kind = Bridge::Kind::projecting,
                                           CayleyVariant variant = CayleyVariant::standard) {
    const MatQ psi = exact_bridge_matrix<Rational>(kind, a.cols(), a.rows());
    const MatQ q = psi * a;
    const std::vector<Rational> c =
        variant == CayleyVariant::standard ? char_poly_faddeev<Rational>(a * psi) : char_poly_faddeev<Rational>(q);
    return detail::cayley_residual_matrix<Rational>(a, q, c);
}

} // namespace orkit
