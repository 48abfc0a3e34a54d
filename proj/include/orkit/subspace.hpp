#pragma once

// Exact subspace calculus over the rationals.
//
// A DualSubspace is a set of linear functionals (row vectors) on R^n, a
// Subspace a set of column vectors. Both keep a canonical basis derived from
// the reduced row-echelon form, so equality is plain data comparison.

#include <optional>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace orkit {

class DualSubspace {
public:
    explicit DualSubspace(Eigen::Index ambient = 0) : n_(ambient), basis_(0, ambient) {}

    static DualSubspace from_rows(const MatQ& rows) {
        DualSubspace s(rows.cols());
        s.basis_ = canonical_rows(rows);
        return s;
    }
    static DualSubspace whole(Eigen::Index n) { return from_rows(MatQ::Identity(n, n)); }

    Eigen::Index ambient() const { return n_; }
    Eigen::Index dim() const { return basis_.rows(); }
    const MatQ& basis() const { return basis_; }

    bool contains(const MatQ& rows) const {
        if (rows.cols() != n_) throw ShapeError("DualSubspace::contains: ambient mismatch");
        return rank(vstack(basis_, rows)) == dim();
    }
    bool contains(const DualSubspace& o) const { return contains(o.basis_); }

    friend bool operator==(const DualSubspace& a, const DualSubspace& b) {
        return a.n_ == b.n_ && a.dim() == b.dim() && (a.dim() == 0 || a.basis_ == b.basis_);
    }

private:
    Eigen::Index n_;
    MatQ basis_;
};

class Subspace {
public:
    explicit Subspace(Eigen::Index ambient = 0) : n_(ambient), basis_(ambient, 0) {}

    // Canonical basis: transpose of the RREF of V^T.
    static Subspace from_cols(const MatQ& cols) {
        Subspace s(cols.rows());
        s.basis_ = canonical_rows(cols.transpose()).transpose();
        return s;
    }
    static Subspace whole(Eigen::Index n) { return from_cols(MatQ::Identity(n, n)); }
    static Subspace zero(Eigen::Index n) { return Subspace(n); }

    Eigen::Index ambient() const { return n_; }
    Eigen::Index dim() const { return basis_.cols(); }
    const MatQ& basis() const { return basis_; }

    bool contains(const MatQ& cols) const {
        if (cols.rows() != n_) throw ShapeError("Subspace::contains: ambient mismatch");
        return rank(hstack(basis_, cols).transpose()) == dim();
    }
    bool contains(const Subspace& o) const { return contains(o.basis_); }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.n_ == b.n_ && a.dim() == b.dim() && (a.dim() == 0 || a.basis_ == b.basis_);
    }

private:
    Eigen::Index n_;
    MatQ basis_;
};

inline DualSubspace row_space(const MatQ& h) { return DualSubspace::from_rows(h); }
inline Subspace col_space(const MatQ& v) { return Subspace::from_cols(v); }

inline Subspace perp(const DualSubspace& s) {
    if (s.dim() == 0) return Subspace::whole(s.ambient());
    return Subspace::from_cols(nullspace(s.basis()));
}

inline DualSubspace perp(const Subspace& s) {
    if (s.dim() == 0) return DualSubspace::whole(s.ambient());
    return DualSubspace::from_rows(nullspace(s.basis().transpose()).transpose());
}

inline Subspace operator+(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient()) throw ShapeError("subspace sum: ambient mismatch");
    return Subspace::from_cols(hstack(a.basis(), b.basis()));
}

inline DualSubspace operator+(const DualSubspace& a, const DualSubspace& b) {
    if (a.ambient() != b.ambient()) throw ShapeError("dual subspace sum: ambient mismatch");
    return DualSubspace::from_rows(vstack(a.basis(), b.basis()));
}

inline Subspace intersect(const Subspace& a, const Subspace& b) { return perp(perp(a) + perp(b)); }

// A S = {A s | s in S}
inline Subspace image(const MatQ& a, const Subspace& s) {
    if (a.cols() != s.ambient()) throw ShapeError("image: shape mismatch");
    return Subspace::from_cols(a * s.basis());
}

// {x | A x in S} = (A^T S^perp)^perp
inline Subspace preimage(const MatQ& a, const Subspace& s) {
    if (a.rows() != a.cols() || a.rows() != s.ambient()) throw ShapeError("preimage: shape mismatch");
    const MatQ y = perp(s).basis().transpose(); // columns spanning S^perp
    if (y.cols() == 0) return Subspace::whole(a.cols());
    const MatQ aty = a.transpose() * y;
    return perp(DualSubspace::from_rows(aty.transpose()));
}

struct InvarianceCertificate {
    MatQ xi;               // H A_closed = Xi H
    std::optional<MatQ> f; // feedback, when (A,B)-invariance was tested
    double residual = 0.0; // ||H A_closed - Xi H||_F
};

// Xi with Xi H = H A, when Row(H) is A-invariant.
inline std::optional<InvarianceCertificate> is_A_invariant(const MatQ& h, const MatQ& a) {
    if (a.rows() != a.cols() || a.cols() != h.cols()) throw ShapeError("is_A_invariant: shape mismatch");
    const MatQ ha = h * a;
    auto xi = solve_left(h, ha);
    if (!xi) return std::nullopt;
    return InvarianceCertificate{*xi, std::nullopt, frobenius(MatQ(ha - (*xi) * h))};
}

inline std::optional<InvarianceCertificate> is_A_invariant(const DualSubspace& h, const MatQ& a) {
    return is_A_invariant(h.basis(), a);
}

// Rows H, HA, HA^2, ... keeping only rows that raise the rank; the first
// rows are an independent subset of H itself (all of H when H has full row
// rank). The span is the A-invariant closure of Row(H).
inline MatQ krylov_rows(const MatQ& h, const MatQ& a) {
    if (a.rows() != a.cols() || a.cols() != h.cols()) throw ShapeError("krylov_rows: shape mismatch");
    MatQ acc(0, h.cols());
    MatQ frontier = h;
    while (frontier.rows() > 0) {
        MatQ added(0, h.cols());
        for (Eigen::Index i = 0; i < frontier.rows(); ++i) {
            MatQ cand = vstack(acc, MatQ(frontier.row(i)));
            if (rank(cand) > acc.rows()) {
                acc = cand;
                added = vstack(added, MatQ(frontier.row(i)));
            }
        }
        if (added.rows() == 0) break;
        frontier = added * a;
    }
    return acc;
}

// Row(H) + Row(H)A + Row(H)A^2 + ... until stationary.
inline DualSubspace a_invariant_closure(const DualSubspace& h, const MatQ& a) {
    if (a.rows() != a.cols() || a.cols() != h.ambient()) throw ShapeError("a_invariant_closure: shape mismatch");
    DualSubspace v = h;
    for (Eigen::Index k = 0; k <= a.rows(); ++k) {
        DualSubspace next = DualSubspace::from_rows(vstack(v.basis(), MatQ(v.basis() * a)));
        if (next == v) break;
        v = std::move(next);
    }
    return v;
}

// One pass of V_k = X cap A^-1(B + V_{k-1}), with the intermediate objects
// kept for reporting.
struct AbInvariantStep {
    Subspace s;        // B + V_{k-1}
    Subspace s_perp;   // S^perp as column vectors
    Subspace at_s_perp;// A^T S^perp
    Subspace preimage; // (A^T S^perp)^perp
    Subspace v;        // V_k
};

struct AbInvariantTrace {
    Subspace v0;
    std::vector<AbInvariantStep> steps;
    Subspace result;
};

inline AbInvariantTrace largest_ab_invariant_trace(const MatQ& a, const MatQ& b, const Subspace& x) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.rows() != n || x.ambient() != n) throw ShapeError("largest_ab_invariant_in: shape mismatch");
    const Subspace im_b = col_space(b);
    AbInvariantTrace tr{x, {}, x};
    Subspace v = x;
    for (Eigen::Index k = 0; k <= n; ++k) {
        AbInvariantStep st;
        st.s = im_b + v;
        const DualSubspace sp = perp(st.s);
        st.s_perp = col_space(sp.basis().transpose());
        st.at_s_perp = sp.dim() ? col_space(a.transpose() * sp.basis().transpose()) : Subspace::zero(n);
        st.preimage = preimage(a, st.s);
        st.v = intersect(x, st.preimage);
        const bool done = st.v == v;
        v = st.v;
        tr.steps.push_back(std::move(st));
        if (done) break;
    }
    tr.result = v;
    return tr;
}

inline Subspace largest_ab_invariant_in(const MatQ& a, const MatQ& b, const Subspace& x) {
    return largest_ab_invariant_trace(a, b, x).result;
}

// F with (A + B F) V in V. For each canonical basis vector v_i solve
// A v_i = V w_i - B u_i; F v_i = u_i and F vanishes on the coordinate
// directions that are not pivots of V's basis.
inline std::optional<MatQ> friend_feedback(const MatQ& a, const MatQ& b, const Subspace& v) {
    const Eigen::Index n = a.rows(), m = b.cols();
    if (a.cols() != n || b.rows() != n || v.ambient() != n) throw ShapeError("friend: shape mismatch");
    const Eigen::Index r = v.dim();
    if (r == 0) return MatQ(MatQ::Zero(m, n));
    const MatQ& vb = v.basis();
    auto sol = solve(hstack(vb, MatQ(-b)), a * vb);
    if (!sol) return std::nullopt;
    const MatQ u = sol->bottomRows(m);

    // Complement directions: coordinates that are not pivots of V^T's RREF.
    Echelon e = rref(vb.transpose());
    std::vector<bool> pivot(static_cast<std::size_t>(n), false);
    for (int p : e.pivots) pivot[static_cast<std::size_t>(p)] = true;
    MatQ t(n, n);
    t.leftCols(r) = vb;
    Eigen::Index c = r;
    for (Eigen::Index j = 0; j < n; ++j)
        if (!pivot[static_cast<std::size_t>(j)]) {
            t.col(c).setZero();
            t(j, c) = 1;
            ++c;
        }
    auto t_inv = inverse(t);
    if (!t_inv) throw Error("friend: basis completion is singular");
    MatQ fu = MatQ::Zero(m, n);
    fu.leftCols(r) = u;
    return MatQ(fu * (*t_inv));
}

// (A,B)-invariance of Row(H): perp(H) is (A,B)-invariant. On success the
// certificate carries a friend F and Xi with H (A + B F) = Xi H.
inline std::optional<InvarianceCertificate> is_ab_invariant(const MatQ& h, const MatQ& a, const MatQ& b) {
    const Subspace w = perp(row_space(h));
    auto f = friend_feedback(a, b, w);
    if (!f) return std::nullopt;
    const MatQ hac = h * (a + b * (*f));
    auto xi = solve_left(h, hac);
    if (!xi) throw Error("is_ab_invariant: friend does not render Row(H) invariant");
    return InvarianceCertificate{*xi, *f, frobenius(MatQ(hac - (*xi) * h))};
}

struct AbClosure {
    DualSubspace closure; // perp of the largest (A,B)-invariant subspace in ker H
    MatQ f;               // a friend of that subspace
};

inline AbClosure ab_invariant_closure(const DualSubspace& h, const MatQ& a, const MatQ& b) {
    const Subspace w = largest_ab_invariant_in(a, b, perp(h));
    auto f = friend_feedback(a, b, w);
    if (!f) throw Error("ab_invariant_closure: largest (A,B)-invariant subspace has no friend");
    return {perp(w), *f};
}

} // namespace orkit
