#pragma once

// Observer-based realizations (OR-systems) of linear and singular systems.
//
// An OR-system is a self-contained system in observer coordinates z = W x:
//     z' = L z + N u,   y = S z
// W is the observer map, S the selector that recovers the original outputs.

#include <optional>
#include <string>
#include <vector>

#include "dkstp.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "subspace.hpp"

namespace orkit {

enum class TimeKind { continuous, discrete };

struct LinearSystem {
    MatQ a; // n x n
    MatQ b; // n x m
    MatQ h; // p x n
    TimeKind time = TimeKind::continuous;

    Eigen::Index n() const { return a.rows(); }
    Eigen::Index m() const { return b.cols(); }
    Eigen::Index p() const { return h.rows(); }

    void validate() const {
        if (a.rows() < 1 || a.rows() != a.cols()) throw ShapeError("A must be square and nonempty");
        if (b.rows() != a.rows()) throw ShapeError("B must have as many rows as A");
        if (h.cols() != a.cols()) throw ShapeError("H must have as many columns as A");
        if (b.cols() < 1 || h.rows() < 1) throw ShapeError("B and H need at least one column/row");
    }
};

// E x' = A x + B u,  F x + D u = 0
struct SingularSystem {
    MatQ e;                // r x n
    MatQ f;                // (n - r) x n
    MatQ a;                // r x n
    MatQ b;                // r x m
    std::optional<MatQ> d; // (n - r) x m

    MatQ theta() const { return vstack(e, f); }

    void validate() const {
        const Eigen::Index n = e.cols();
        if (e.rows() < 1 || f.cols() != n || e.rows() + f.rows() != n)
            throw ShapeError("stack(E, F) must be square");
        if (a.rows() != e.rows() || a.cols() != n) throw ShapeError("A must be r x n");
        if (b.rows() != e.rows()) throw ShapeError("B must have r rows");
        if (d && (d->rows() != f.rows() || d->cols() != b.cols())) throw ShapeError("D must be (n - r) x m");
    }
};

// y' = M x + N u
struct SOSystem {
    MatQ m;
    MatQ n;
};

inline SOSystem so_system(const LinearSystem& sys) { return {sys.h * sys.a, sys.h * sys.b}; }

enum class ORKind { approx_projection, approx_pseudoinverse, exact, extended, feedback, singular };

inline std::string to_string(ORKind k) {
    switch (k) {
    case ORKind::approx_projection: return "approx_projection";
    case ORKind::approx_pseudoinverse: return "approx_pseudoinverse";
    case ORKind::exact: return "exact";
    case ORKind::extended: return "extended";
    case ORKind::feedback: return "feedback";
    case ORKind::singular: return "singular";
    }
    return "?";
}

inline ORKind or_kind_from_string(const std::string& s) {
    for (ORKind k : {ORKind::approx_projection, ORKind::approx_pseudoinverse, ORKind::exact, ORKind::extended,
                     ORKind::feedback, ORKind::singular})
        if (to_string(k) == s) return k;
    throw ParseError("unknown OR kind '" + s + "'");
}

// How the OR state starts: projecting an arbitrary-dimension output y0, or
// observing the original state x0 through the observer map.
enum class InitRule { project_output, observe_state };

struct ORSystem {
    ORKind kind = ORKind::exact;
    MatQ l;                          // p' x p'
    MatQ n;                          // p' x m
    std::optional<MatQ> observer;    // p' x n_orig; absent when built from an SO-system alone
    MatQ selector;                   // p x p'
    std::optional<MatQ> feedback;    // m x n_orig
    InitRule init = InitRule::observe_state;
    bool exact = false;

    Eigen::Index dim() const { return l.rows(); }
};

// Residuals of the exactness identities W (A + B F) = L W and W B = N.
struct ExactnessResidual {
    double dynamics = 0.0;
    double input = 0.0;
    bool zero() const { return dynamics == 0.0 && input == 0.0; }
};

inline ExactnessResidual exactness_residual(const LinearSystem& sys, const ORSystem& o) {
    if (!o.observer) throw Error("exactness_residual: OR-system has no observer map");
    const MatQ& w = *o.observer;
    MatQ ac = sys.a;
    if (o.feedback) ac += sys.b * (*o.feedback);
    return {frobenius(MatQ(w * ac - o.l * w)), frobenius(MatQ(w * sys.b - o.n))};
}

// L = M Psi_{n x p}; the projecting bridge gives M Pi^p_n.
inline ORSystem or_projection(const SOSystem& so, Bridge::Kind bridge = Bridge::Kind::projecting) {
    const Eigen::Index p = so.m.rows(), n = so.m.cols();
    ORSystem o;
    o.kind = ORKind::approx_projection;
    o.l = so.m * exact_bridge_matrix<Rational>(bridge, n, p);
    o.n = so.n;
    o.selector = MatQ::Identity(p, p);
    o.init = InitRule::project_output;
    return o;
}

// L = H A H^+, N = H B.
inline ORSystem or_pseudoinverse(const LinearSystem& sys) {
    sys.validate();
    ORSystem o;
    o.kind = ORKind::approx_pseudoinverse;
    o.l = sys.h * sys.a * pseudo_inverse(sys.h);
    o.n = sys.h * sys.b;
    o.observer = sys.h;
    o.selector = MatQ::Identity(sys.p(), sys.p());
    o.exact = is_A_invariant(sys.h, sys.a).has_value();
    return o;
}

// Exact OR-system on Row(H); present iff Row(H) is A-invariant.
inline std::optional<ORSystem> or_exact(const LinearSystem& sys) {
    sys.validate();
    if (!is_A_invariant(sys.h, sys.a)) return std::nullopt;
    ORSystem o;
    o.kind = ORKind::exact;
    o.l = sys.h * sys.a * pseudo_inverse(sys.h);
    o.n = sys.h * sys.b;
    o.observer = sys.h;
    o.selector = MatQ::Identity(sys.p(), sys.p());
    o.exact = true;
    return o;
}

// OR-system on the rows of a given observer map W, which must be
// (A + B F)-invariant.
inline ORSystem or_from_observers(const LinearSystem& sys, const MatQ& w, const std::optional<MatQ>& f,
                                  ORKind kind) {
    sys.validate();
    MatQ ac = sys.a;
    if (f) ac += sys.b * (*f);
    auto l = solve_left(w, MatQ(w * ac));
    if (!l) throw Error("observer rows are not invariant under the closed-loop matrix");
    auto sel = solve_left(w, sys.h);
    if (!sel) throw Error("observer rows do not contain the outputs");
    ORSystem o;
    o.kind = kind;
    o.l = *l;
    o.n = w * sys.b;
    o.observer = w;
    o.selector = *sel;
    o.feedback = f;
    o.exact = true;
    return o;
}

// Krylov basis H, HA, HA^2, ... of the A-invariant closure.
inline ORSystem or_extended(const LinearSystem& sys) {
    sys.validate();
    return or_from_observers(sys, krylov_rows(sys.h, sys.a), std::nullopt, ORKind::extended);
}

// Closure of Row(H) under A + B F with F a friend of the largest
// (A,B)-invariant subspace in ker H; the span equals that subspace's perp.
inline ORSystem or_feedback(const LinearSystem& sys) {
    sys.validate();
    const AbClosure cl = ab_invariant_closure(row_space(sys.h), sys.a, sys.b);
    const MatQ ac = sys.a + sys.b * cl.f;
    const MatQ w = krylov_rows(sys.h, ac);
    if (!(row_space(w) == cl.closure)) throw Error("or_feedback: closed-loop closure differs from the (A,B)-closure");
    return or_from_observers(sys, w, cl.f, ORKind::feedback);
}

// Psi_+ = first r columns of Theta^+ and the input correction
// D~ = -Theta^+[:, r:] D.
struct SingularBridge {
    MatQ theta_pinv;
    MatQ psi;
    std::optional<MatQ> d_tilde;
    bool invertible = false;
};

inline SingularBridge singular_bridge(const MatQ& e, const MatQ& f, const std::optional<MatQ>& d = std::nullopt) {
    const MatQ theta = vstack(e, f);
    if (theta.rows() != theta.cols()) throw ShapeError("stack(E, F) must be square");
    SingularBridge sb;
    sb.theta_pinv = pseudo_inverse(theta);
    sb.psi = sb.theta_pinv.leftCols(e.rows());
    if (d) sb.d_tilde = MatQ(-sb.theta_pinv.rightCols(f.rows()) * (*d));
    sb.invertible = rank(theta) == theta.rows();
    return sb;
}

inline ORSystem or_singular(const SingularSystem& sys) {
    sys.validate();
    const SingularBridge sb = singular_bridge(sys.e, sys.f, sys.d);
    ORSystem o;
    o.kind = ORKind::singular;
    o.l = sys.a * sb.psi;
    o.n = sys.b;
    if (sb.d_tilde) o.n += sys.a * (*sb.d_tilde);
    o.observer = sys.e;
    o.selector = MatQ::Identity(sys.e.rows(), sys.e.rows());
    o.exact = sb.invertible;
    return o;
}

// Controllable-and-observable part (A11, B1, C1) of the Kalman form.
inline LinearSystem kalman_minimal(const LinearSystem& sys) {
    sys.validate();
    // Controllable subspace: columns B, AB, A^2 B, ...
    const MatQ ctrl = krylov_rows(sys.b.transpose(), sys.a.transpose()).transpose();
    if (ctrl.cols() == 0) {
        // Nothing reachable: a one-state zero system keeps the record well-formed.
        LinearSystem z{MatQ::Zero(1, 1), MatQ::Zero(1, sys.m()), MatQ::Zero(sys.p(), 1), sys.time};
        return z;
    }
    const MatQ t = col_space(ctrl).basis();
    const MatQ t_pinv = pseudo_inverse(t);
    const MatQ ac = t_pinv * sys.a * t, bc = t_pinv * sys.b, cc = sys.h * t;
    // Observable row space of the controllable part.
    const MatQ w = row_space(krylov_rows(cc, ac)).basis();
    if (w.rows() == 0) {
        LinearSystem z{MatQ::Zero(1, 1), MatQ::Zero(1, sys.m()), MatQ::Zero(sys.p(), 1), sys.time};
        return z;
    }
    auto am = solve_left(w, MatQ(w * ac));
    auto cm = solve_left(w, cc);
    if (!am || !cm) throw Error("kalman_minimal: observable space is not invariant");
    return LinearSystem{*am, w * bc, *cm, sys.time};
}

// H A^k B for k = 0..count-1.
inline std::vector<MatQ> markov_parameters(const LinearSystem& sys, int count) {
    std::vector<MatQ> out;
    MatQ ak_b = sys.b;
    for (int k = 0; k < count; ++k) {
        out.push_back(sys.h * ak_b);
        ak_b = sys.a * ak_b;
    }
    return out;
}

// Disturbance decoupling: every xi lies in the largest (A,B)-invariant
// subspace inside ker H. When solvable, the feedback OR observer map also
// annihilates each disturbance.
inline bool ddp_check(const LinearSystem& sys, const std::vector<VecQ>& disturbances) {
    sys.validate();
    const Subspace v = largest_ab_invariant_in(sys.a, sys.b, perp(row_space(sys.h)));
    for (const VecQ& xi : disturbances) {
        if (xi.size() != sys.n()) throw ShapeError("disturbance has wrong dimension");
        if (!v.contains(MatQ(xi))) return false;
    }
    if (disturbances.empty()) return true;
    const ORSystem fb = or_feedback(sys);
    for (const VecQ& xi : disturbances)
        if (!is_zero_matrix(MatQ(*fb.observer * xi)))
            throw Error("ddp_check: feedback OR observer map does not annihilate a decoupled disturbance");
    return true;
}

} // namespace orkit
