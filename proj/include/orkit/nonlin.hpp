#pragma once

// Polynomial-affine systems x' = f(x) + sum_i g_i(x) u_i, y = h(x):
// Lie derivatives, exact codistributions and their closures, and exact
// (feedback) OR-systems in observer coordinates.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "poly.hpp"
#include "xspace.hpp"

namespace orkit {

using PolyVecField = std::vector<Poly>; // components f_1..f_n
using PolyCovField = std::vector<Poly>; // row (omega_1..omega_n)
using PolyMatrix = std::vector<std::vector<Poly>>;

// A closure step would create a function beyond the degree bound, or the
// iteration cap was hit. Carries the generators found so far.
class BoundExceeded : public Error {
public:
    BoundExceeded(const std::string& what, std::vector<Poly> partial)
        : Error(what), partial_(std::move(partial)) {}
    const std::vector<Poly>& partial() const { return partial_; }

private:
    std::vector<Poly> partial_;
};

// No polynomial Xi within the degree bound certifies invariance.
class NoCertificate : public Error {
public:
    using Error::Error;
};

struct NonlinOptions {
    int d_max = 8;
    int k_max = 20;
    int sample_points = 50;
    std::uint64_t seed = 20240611;
};

inline Poly lie_derivative(const PolyVecField& f, const Poly& h) {
    if (static_cast<int>(f.size()) != h.nvars()) throw ShapeError("lie_derivative: dimension mismatch");
    Poly acc(h.nvars());
    for (int i = 0; i < h.nvars(); ++i) acc += h.derivative(i) * f[static_cast<std::size_t>(i)];
    return acc;
}

inline PolyCovField differential(const Poly& h) {
    PolyCovField d;
    for (int i = 0; i < h.nvars(); ++i) d.push_back(h.derivative(i));
    return d;
}

// (L_f w)_j = sum_i f_i d(w_j)/dx_i + sum_i w_i d(f_i)/dx_j
inline PolyCovField lie_derivative_cov(const PolyVecField& f, const PolyCovField& w) {
    const std::size_t n = f.size();
    if (w.size() != n) throw ShapeError("lie_derivative_cov: dimension mismatch");
    PolyCovField out;
    for (std::size_t j = 0; j < n; ++j) {
        Poly acc = lie_derivative(f, w[j]);
        for (std::size_t i = 0; i < n; ++i) acc += w[i] * f[i].derivative(static_cast<int>(j));
        out.push_back(std::move(acc));
    }
    return out;
}

// [f, g] = Dg f - Df g
inline PolyVecField lie_bracket(const PolyVecField& f, const PolyVecField& g) {
    if (f.size() != g.size()) throw ShapeError("lie_bracket: dimension mismatch");
    PolyVecField out;
    for (std::size_t k = 0; k < f.size(); ++k) out.push_back(lie_derivative(f, g[k]) - lie_derivative(g, f[k]));
    return out;
}

struct PolyAffineSystem {
    int nvars = 0;
    PolyVecField f;
    std::vector<PolyVecField> g;
    std::vector<Poly> h;

    void validate() const {
        if (nvars < 1) throw ShapeError("system needs at least one state variable");
        if (static_cast<int>(f.size()) != nvars) throw ShapeError("drift has wrong length");
        for (const auto& gi : g)
            if (static_cast<int>(gi.size()) != nvars) throw ShapeError("input field has wrong length");
        if (h.empty()) throw ShapeError("system needs at least one observer");
        for (const auto& hj : h) {
            if (hj.nvars() != nvars) throw ShapeError("observer over wrong variable count");
            if (!hj.constant_term().is_zero()) throw Error("observers must vanish at the origin (h(0) = 0)");
        }
    }

    // f + sum_i g_i alpha_i
    PolyAffineSystem with_feedback(const std::vector<Poly>& alpha) const {
        if (alpha.size() != g.size()) throw ShapeError("feedback needs one function per input");
        PolyAffineSystem out = *this;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (int k = 0; k < nvars; ++k)
                out.f[static_cast<std::size_t>(k)] += g[i][static_cast<std::size_t>(k)] * alpha[i];
        return out;
    }
};

struct NlSOSystem {
    std::vector<Poly> drift; // L_f h_j
    PolyMatrix input;        // input[j][i] = L_{g_i} h_j
};

inline NlSOSystem so_system_nl(const PolyAffineSystem& sys) {
    sys.validate();
    NlSOSystem so;
    for (const Poly& hj : sys.h) {
        so.drift.push_back(lie_derivative(sys.f, hj));
        std::vector<Poly> row;
        for (const auto& gi : sys.g) row.push_back(lie_derivative(gi, hj));
        so.input.push_back(std::move(row));
    }
    return so;
}

// Right-hand side of y' = L_f h(psi(y)) + sum_i L_{g_i} h(psi(y)) u_i with
// psi(y) = Pi^p_n y.
using NlRhs = std::function<VecD(const VecD& y, const VecD& u)>;

inline NlRhs or_approx_nl(const PolyAffineSystem& sys) {
    const NlSOSystem so = so_system_nl(sys);
    const MatD psi = projection_matrix(static_cast<std::int64_t>(sys.h.size()), sys.nvars);
    return [so, psi](const VecD& y, const VecD& u) {
        const VecD x = psi * y;
        VecD out(static_cast<Eigen::Index>(so.drift.size()));
        for (std::size_t j = 0; j < so.drift.size(); ++j) {
            double v = so.drift[j].eval_double(x);
            for (std::size_t i = 0; i < so.input[j].size(); ++i)
                v += so.input[j][i].eval_double(x) * u(static_cast<Eigen::Index>(i));
            out(static_cast<Eigen::Index>(j)) = v;
        }
        return out;
    };
}

namespace detail {

inline std::vector<std::vector<Rational>> sample_points(int nvars, const NonlinOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> num(-20, 20), den(1, 7);
    std::vector<std::vector<Rational>> pts;
    for (int k = 0; k < opt.sample_points; ++k) {
        std::vector<Rational> p;
        for (int i = 0; i < nvars; ++i) p.emplace_back(num(rng), den(rng));
        pts.push_back(std::move(p));
    }
    return pts;
}

inline MatQ eval_rows(const std::vector<PolyCovField>& rows, const std::vector<Rational>& x) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    MatQ m(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (Eigen::Index j = 0; j < n; ++j) m(static_cast<Eigen::Index>(r), j) = rows[r][static_cast<std::size_t>(j)].eval(x);
    return m;
}

// Rank of the polynomial row set at a generic point: the maximum over the
// sample of exact pointwise ranks.
inline int generic_rank(const std::vector<PolyCovField>& rows, const std::vector<std::vector<Rational>>& pts) {
    if (rows.empty()) return 0;
    int best = 0;
    for (const auto& x : pts) {
        best = std::max(best, rank(eval_rows(rows, x)));
        if (best == static_cast<int>(std::min<std::size_t>(rows.size(), x.size()))) break;
    }
    return best;
}

inline Poly determinant(const PolyMatrix& m) {
    const std::size_t k = m.size();
    if (k == 0) throw ShapeError("determinant of an empty matrix");
    const int nv = m[0][0].nvars();
    if (k == 1) return m[0][0];
    Poly acc(nv);
    for (std::size_t c = 0; c < k; ++c) {
        if (m[0][c].is_zero()) continue;
        PolyMatrix minor;
        for (std::size_t r = 1; r < k; ++r) {
            std::vector<Poly> row;
            for (std::size_t j = 0; j < k; ++j)
                if (j != c) row.push_back(m[r][j]);
            minor.push_back(std::move(row));
        }
        Poly t = m[0][c] * determinant(minor);
        if (c % 2) acc -= t;
        else acc += t;
    }
    return acc;
}

// Polynomial vectors spanning the kernel of M (rows x cols) at generic
// points, by Cramer's rule on a generically nonsingular minor.
inline std::vector<std::vector<Poly>> generic_kernel(const PolyMatrix& m, int cols, int nvars,
                                                     const std::vector<std::vector<Rational>>& pts) {
    std::vector<std::vector<Poly>> out;
    const std::size_t rows = m.size();
    if (rows == 0) {
        for (int j = 0; j < cols; ++j) {
            std::vector<Poly> v(static_cast<std::size_t>(cols), Poly(nvars));
            v[static_cast<std::size_t>(j)] = Poly::constant(nvars, 1);
            out.push_back(std::move(v));
        }
        return out;
    }
    // Pick a point of maximal rank and read off pivot rows/columns there.
    int best = -1;
    std::vector<Rational> at;
    for (const auto& x : pts) {
        MatQ v(static_cast<Eigen::Index>(rows), cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (int j = 0; j < cols; ++j) v(static_cast<Eigen::Index>(r), j) = m[r][static_cast<std::size_t>(j)].eval(x);
        const int rk = rank(v);
        if (rk > best) {
            best = rk;
            at = x;
        }
    }
    MatQ v(static_cast<Eigen::Index>(rows), cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (int j = 0; j < cols; ++j) v(static_cast<Eigen::Index>(r), j) = m[r][static_cast<std::size_t>(j)].eval(at);
    const std::vector<int> pcols = rref(v).pivots;
    const std::vector<int> prows = rref(MatQ(v.transpose())).pivots;
    const std::size_t rk = pcols.size();
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (int c : pcols) is_pivot[static_cast<std::size_t>(c)] = true;

    auto sub = [&](const std::vector<int>& use_cols) {
        PolyMatrix s;
        for (int r : prows) {
            std::vector<Poly> row;
            for (int c : use_cols) row.push_back(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
            s.push_back(std::move(row));
        }
        return s;
    };
    const Poly det = rk ? determinant(sub(pcols)) : Poly::constant(nvars, 1);
    for (int j = 0; j < cols; ++j) {
        if (is_pivot[static_cast<std::size_t>(j)]) continue;
        std::vector<Poly> vec(static_cast<std::size_t>(cols), Poly(nvars));
        vec[static_cast<std::size_t>(j)] = det;
        // M_P v_P = -det * M_j  =>  v_P(k) = -det(M_P with column k replaced by M_j)
        for (std::size_t k = 0; k < rk; ++k) {
            std::vector<int> repl = pcols;
            repl[k] = j;
            vec[static_cast<std::size_t>(pcols[k])] = -determinant(sub(repl));
        }
        out.push_back(std::move(vec));
    }
    return out;
}

} // namespace detail

// Codistribution spanned (over polynomial functions, pointwise at generic
// points) by covector fields; potentials are kept when it is exact.
struct CoDistribution {
    int nvars = 0;
    std::vector<PolyCovField> generators;
    std::vector<Poly> potentials; // d(potentials[k]) = generators[k] when exact

    bool is_exact() const { return !generators.empty() && potentials.size() == generators.size(); }

    int generic_rank(const NonlinOptions& opt = {}) const {
        return detail::generic_rank(generators, detail::sample_points(nvars, opt));
    }

    bool contains(const PolyCovField& w, const NonlinOptions& opt = {}) const {
        std::vector<PolyCovField> ext = generators;
        ext.push_back(w);
        const auto pts = detail::sample_points(nvars, opt);
        return detail::generic_rank(ext, pts) == detail::generic_rank(generators, pts);
    }

    // Same pointwise span at generic points.
    bool same_span(const CoDistribution& o, const NonlinOptions& opt = {}) const {
        const auto pts = detail::sample_points(nvars, opt);
        std::vector<PolyCovField> both = generators;
        both.insert(both.end(), o.generators.begin(), o.generators.end());
        const int r = detail::generic_rank(both, pts);
        return r == detail::generic_rank(generators, pts) && r == detail::generic_rank(o.generators, pts);
    }

    // Canonical rational basis when every generator is constant.
    std::optional<MatQ> constant_basis() const {
        MatQ m(static_cast<Eigen::Index>(generators.size()), nvars);
        for (std::size_t r = 0; r < generators.size(); ++r)
            for (int j = 0; j < nvars; ++j) {
                const Poly& p = generators[r][static_cast<std::size_t>(j)];
                if (!p.is_constant()) return std::nullopt;
                m(static_cast<Eigen::Index>(r), j) = p.constant_term();
            }
        return canonical_rows(m);
    }
};

// Exact closure H^{k+1} = H^k + L_f H^k + sum_i L_{g_i} H^k, tracked on
// potentials; the first generators are dh_j.
inline CoDistribution closure_fg(const PolyAffineSystem& sys, const NonlinOptions& opt = {}) {
    sys.validate();
    const auto pts = detail::sample_points(sys.nvars, opt);
    CoDistribution cd;
    cd.nvars = sys.nvars;
    auto try_add = [&](const Poly& phi) {
        if (phi.is_constant()) return false;
        PolyCovField d = differential(phi);
        std::vector<PolyCovField> ext = cd.generators;
        ext.push_back(d);
        if (detail::generic_rank(ext, pts) == detail::generic_rank(cd.generators, pts)) return false;
        if (phi.degree() > opt.d_max)
            throw BoundExceeded("closure generator exceeds degree bound " + std::to_string(opt.d_max), cd.potentials);
        cd.generators.push_back(std::move(d));
        cd.potentials.push_back(phi);
        return true;
    };
    std::vector<Poly> frontier;
    for (const Poly& hj : sys.h)
        if (try_add(hj)) frontier.push_back(hj);
    for (int k = 0; !frontier.empty(); ++k) {
        if (k >= opt.k_max)
            throw BoundExceeded("closure did not stabilize within " + std::to_string(opt.k_max) + " iterations",
                                cd.potentials);
        std::vector<Poly> next;
        for (const Poly& phi : frontier) {
            const Poly lf = lie_derivative(sys.f, phi);
            if (try_add(lf)) next.push_back(lf);
            for (const auto& gi : sys.g) {
                const Poly lg = lie_derivative(gi, phi);
                if (try_add(lg)) next.push_back(lg);
            }
        }
        frontier = std::move(next);
    }
    return cd;
}

struct OmegaIteration {
    CoDistribution g_perp;              // annihilator of span{g_i}
    std::vector<CoDistribution> omegas; // Omega_0, Omega_1, ..., stationary last
    const CoDistribution& result() const { return omegas.back(); }
};

// Omega_{k+1} = Omega_k + L_f(Omega_k cap G^perp) + sum_i L_{g_i}(Omega_k cap G^perp)
inline OmegaIteration invariant_codistribution_iteration(const PolyAffineSystem& sys, const NonlinOptions& opt = {}) {
    sys.validate();
    const int n = sys.nvars;
    const auto pts = detail::sample_points(n, opt);
    OmegaIteration it;

    // G^perp: covectors w with w . g_i = 0, the kernel of G^T.
    PolyMatrix gt;
    for (const auto& gi : sys.g) gt.push_back(gi);
    it.g_perp.nvars = n;
    it.g_perp.generators = detail::generic_kernel(gt, n, n, pts);

    CoDistribution omega;
    omega.nvars = n;
    for (const Poly& hj : sys.h) {
        PolyCovField d = differential(hj);
        std::vector<PolyCovField> ext = omega.generators;
        ext.push_back(d);
        if (detail::generic_rank(ext, pts) > detail::generic_rank(omega.generators, pts)) {
            omega.generators.push_back(std::move(d));
            omega.potentials.push_back(hj);
        }
    }
    it.omegas.push_back(omega);

    for (int k = 0; k < opt.k_max; ++k) {
        // Omega cap G^perp = { sum a_r w_r : sum_r a_r (w_r . g_i) = 0 for all i }
        const std::size_t r = omega.generators.size();
        PolyMatrix m;
        for (const auto& gi : sys.g) {
            std::vector<Poly> row;
            for (std::size_t c = 0; c < r; ++c) {
                Poly dot(n);
                for (int j = 0; j < n; ++j) dot += omega.generators[c][static_cast<std::size_t>(j)] * gi[static_cast<std::size_t>(j)];
                row.push_back(std::move(dot));
            }
            m.push_back(std::move(row));
        }
        std::vector<PolyCovField> inter;
        for (const auto& a : detail::generic_kernel(m, static_cast<int>(r), n, pts)) {
            PolyCovField w(static_cast<std::size_t>(n), Poly(n));
            for (std::size_t c = 0; c < r; ++c)
                for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] += a[c] * omega.generators[c][static_cast<std::size_t>(j)];
            inter.push_back(std::move(w));
        }

        CoDistribution next = omega;
        next.potentials.clear();
        auto add = [&](PolyCovField w) {
            std::vector<PolyCovField> ext = next.generators;
            ext.push_back(w);
            if (detail::generic_rank(ext, pts) > detail::generic_rank(next.generators, pts))
                next.generators.push_back(std::move(w));
        };
        for (const auto& w : inter) {
            add(lie_derivative_cov(sys.f, w));
            for (const auto& gi : sys.g) add(lie_derivative_cov(gi, w));
        }
        if (next.generators.size() == omega.generators.size()) return it;
        omega = std::move(next);
        it.omegas.push_back(omega);
    }
    throw BoundExceeded("codistribution iteration did not stabilize within " + std::to_string(opt.k_max) +
                            " iterations",
                        {});
}

// L_v H = c_v + Xi_v H for the drift and for each input field.
struct NlCertificate {
    PolyMatrix xi0;
    std::vector<Rational> c0;
    std::vector<PolyMatrix> xi_g;
    std::vector<std::vector<Rational>> c_g;

    static bool is_constant(const PolyMatrix& m) {
        for (const auto& row : m)
            for (const auto& p : row)
                if (!p.is_constant()) return false;
        return true;
    }
    bool constant() const {
        if (!is_constant(xi0)) return false;
        for (const auto& x : xi_g)
            if (!is_constant(x)) return false;
        return true;
    }
};

namespace detail {

// Solves target = sum_j Xi_j h_j for polynomial Xi_j with
// deg Xi_j <= max(0, d_max - deg h_j); lower-degree unknowns come first so
// the particular solution prefers them.
inline std::optional<std::vector<Poly>> solve_combination(const Poly& target, const std::vector<Poly>& hs, int d_max) {
    const int nv = target.nvars();
    struct Unknown {
        std::size_t j;
        Exponents mono;
        int deg;
    };
    std::vector<Unknown> unknowns;
    for (std::size_t j = 0; j < hs.size(); ++j) {
        const int bound = std::max(0, d_max - std::max(0, hs[j].degree()));
        for (const auto& e : monomials_up_to(nv, bound))
            unknowns.push_back({j, e, std::accumulate(e.begin(), e.end(), 0)});
    }
    std::stable_sort(unknowns.begin(), unknowns.end(), [](const Unknown& a, const Unknown& b) { return a.deg < b.deg; });

    std::map<Exponents, Eigen::Index> row_of;
    auto row_index = [&](const Exponents& e) {
        auto [it, ins] = row_of.emplace(e, static_cast<Eigen::Index>(row_of.size()));
        return it->second;
    };
    std::vector<std::vector<std::pair<Eigen::Index, Rational>>> cols(unknowns.size());
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
        const Poly prod = Poly::monomial(nv, unknowns[u].mono, Rational(1)) * hs[unknowns[u].j];
        for (const auto& [e, c] : prod.terms()) cols[u].emplace_back(row_index(e), c);
    }
    std::vector<std::pair<Eigen::Index, Rational>> rhs;
    for (const auto& [e, c] : target.terms()) rhs.emplace_back(row_index(e), c);

    MatQ a = MatQ::Zero(static_cast<Eigen::Index>(row_of.size()), static_cast<Eigen::Index>(unknowns.size()));
    for (std::size_t u = 0; u < unknowns.size(); ++u)
        for (const auto& [r, c] : cols[u]) a(r, static_cast<Eigen::Index>(u)) = c;
    MatQ b = MatQ::Zero(a.rows(), 1);
    for (const auto& [r, c] : rhs) b(r, 0) = c;
    auto x = solve(a, b);
    if (!x) return std::nullopt;

    std::vector<Poly> xi(hs.size(), Poly(nv));
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
        const Rational& c = (*x)(static_cast<Eigen::Index>(u), 0);
        if (!c.is_zero()) xi[unknowns[u].j] += Poly::monomial(nv, unknowns[u].mono, c);
    }
    return xi;
}

inline std::optional<std::pair<PolyMatrix, std::vector<Rational>>> certify_field(const PolyVecField& v,
                                                                                 const std::vector<Poly>& hs,
                                                                                 int d_max) {
    PolyMatrix xi;
    std::vector<Rational> c;
    for (const Poly& hk : hs) {
        const Poly lv = lie_derivative(v, hk);
        const Rational c0 = lv.constant_term();
        const Poly target = lv - Poly::constant(hk.nvars(), c0);
        auto row = solve_combination(target, hs, d_max);
        if (!row) return std::nullopt;
        // Re-verify by direct expansion.
        Poly check = Poly::constant(hk.nvars(), c0);
        for (std::size_t j = 0; j < hs.size(); ++j) check += (*row)[j] * hs[j];
        if (!(check == lv)) throw Error("certificate failed re-verification");
        xi.push_back(std::move(*row));
        c.push_back(c0);
    }
    return std::make_pair(std::move(xi), std::move(c));
}

} // namespace detail

// Certificate that span{dH} is invariant under f~ = f + sum g_i alpha_i and
// every g_i, with polynomial Xi of degree within the bound.
inline std::optional<NlCertificate> is_invariant_exact_codistribution(const PolyAffineSystem& sys,
                                                                      const std::vector<Poly>& candidate,
                                                                      const std::optional<std::vector<Poly>>& alpha = {},
                                                                      const NonlinOptions& opt = {}) {
    sys.validate();
    for (const Poly& hk : candidate) {
        if (hk.nvars() != sys.nvars) throw ShapeError("candidate over wrong variable count");
        if (!hk.constant_term().is_zero()) throw Error("candidate functions must vanish at the origin");
    }
    const PolyAffineSystem closed = alpha ? sys.with_feedback(*alpha) : sys;
    NlCertificate cert;
    auto drift = detail::certify_field(closed.f, candidate, opt.d_max);
    if (!drift) return std::nullopt;
    cert.xi0 = std::move(drift->first);
    cert.c0 = std::move(drift->second);
    for (const auto& gi : closed.g) {
        auto gc = detail::certify_field(gi, candidate, opt.d_max);
        if (!gc) return std::nullopt;
        cert.xi_g.push_back(std::move(gc->first));
        cert.c_g.push_back(std::move(gc->second));
    }
    return cert;
}

// z = (state functions)(x); when every Xi is constant the dynamics are
// z' = Xi0 z + c0 + sum_i (Xi_i z + c_i) u_i.
struct NlORSystem {
    std::vector<Poly> state_functions;
    NlCertificate certificate;
    MatQ selector; // y = S z
    std::optional<std::vector<Poly>> feedback;

    bool linear() const {
        if (!certificate.constant()) return false;
        for (const auto& c : certificate.c0)
            if (!c.is_zero()) return false;
        for (const auto& x : certificate.xi_g)
            for (const auto& row : x)
                for (const auto& p : row)
                    if (!p.is_zero()) return false;
        return true;
    }

    // L and N of z' = L z + N u (valid when linear()).
    MatQ l() const {
        const auto p = static_cast<Eigen::Index>(state_functions.size());
        MatQ out(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                out(i, j) = certificate.xi0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].constant_term();
        return out;
    }
    MatQ n() const {
        const auto p = static_cast<Eigen::Index>(state_functions.size());
        const auto m = static_cast<Eigen::Index>(certificate.c_g.size());
        MatQ out(p, m);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index k = 0; k < m; ++k)
                out(i, k) = certificate.c_g[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        return out;
    }
};

inline NlORSystem or_extended_nl(const PolyAffineSystem& sys, const std::optional<std::vector<Poly>>& alpha = {},
                                 const NonlinOptions& opt = {}) {
    const PolyAffineSystem closed = alpha ? sys.with_feedback(*alpha) : sys;
    const CoDistribution cd = closure_fg(closed, opt);
    auto cert = is_invariant_exact_codistribution(closed, cd.potentials, std::nullopt, opt);
    if (!cert) throw NoCertificate("no polynomial certificate within degree bound " + std::to_string(opt.d_max));
    NlORSystem o;
    o.state_functions = cd.potentials;
    o.certificate = std::move(*cert);
    o.feedback = alpha;
    const auto p = static_cast<Eigen::Index>(sys.h.size());
    o.selector = MatQ::Zero(p, static_cast<Eigen::Index>(cd.potentials.size()));
    // The first closure generators are the observers that were independent.
    for (Eigen::Index j = 0, k = 0; j < p; ++j) {
        if (k < static_cast<Eigen::Index>(cd.potentials.size()) && cd.potentials[static_cast<std::size_t>(k)] == sys.h[static_cast<std::size_t>(j)]) {
            o.selector(j, k) = 1;
            ++k;
        } else {
            throw Error("dependent observers are not supported in the extended nonlinear OR-system");
        }
    }
    return o;
}

} // namespace orkit
