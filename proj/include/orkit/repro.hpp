#pragma once

// Reproduction of the bundled worked examples (data/examples/*.json).
//
// Each printed value is compared with the value computed from its
// definition: PASS on exact agreement, ERRATUM when the printed value
// differs but the computed one satisfies the defining identity, FAIL
// otherwise.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "io.hpp"
#include "nonlin.hpp"
#include "orsys.hpp"
#include "subspace.hpp"
#include "xspace.hpp"

#ifndef ORKIT_DATA_DIR
#define ORKIT_DATA_DIR "data/examples"
#endif

namespace orkit {

enum class Verdict { pass, erratum, fail };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::erratum: return "ERRATUM";
    case Verdict::fail: return "FAIL";
    }
    return "?";
}

struct ReproLine {
    Verdict verdict;
    std::string example;
    std::string item;
    std::string detail;
};

struct ReproReport {
    std::vector<ReproLine> lines;

    int count(Verdict v) const {
        int c = 0;
        for (const auto& l : lines) c += l.verdict == v;
        return c;
    }
    // strict: errata count as failures.
    bool ok(bool strict = false) const { return count(Verdict::fail) == 0 && (!strict || count(Verdict::erratum) == 0); }

    void print(std::ostream& os) const {
        for (const auto& l : lines)
            os << to_string(l.verdict) << " " << l.example << " " << l.item << (l.detail.empty() ? "" : ": ") << l.detail
               << "\n";
        os << "summary: " << count(Verdict::pass) << " PASS, " << count(Verdict::erratum) << " ERRATUM, "
           << count(Verdict::fail) << " FAIL\n";
    }
};

namespace detail {

class ReproContext {
public:
    ReproContext(ReproReport& rep, std::string example) : rep_(rep), ex_(std::move(example)) {}

    void line(Verdict v, const std::string& item, const std::string& detail = "") {
        rep_.lines.push_back({v, ex_, item, detail});
    }
    void check(const std::string& item, bool ok, const std::string& detail = "") {
        line(ok ? Verdict::pass : Verdict::fail, item, detail);
    }
    void equal(const std::string& item, const MatQ& computed, const MatQ& printed) {
        if (same_matrix(computed, printed))
            line(Verdict::pass, item, to_string(printed));
        else
            line(Verdict::fail, item, "printed " + to_string(printed) + ", computed " + to_string(computed));
    }
    // Printed value vs computed value whose defining identity was verified.
    void printed_value(const std::string& item, const MatQ& computed, const MatQ& printed, bool identity_holds,
                       const std::string& note = "") {
        if (same_matrix(computed, printed)) {
            line(Verdict::pass, item, to_string(printed));
            return;
        }
        std::string where = differing_entries(printed, computed);
        if (!note.empty()) where += (where.empty() ? "" : "; ") + note;
        const std::string both =
            "printed " + to_string(printed) + ", derived " + to_string(computed) + (where.empty() ? "" : " (" + where + ")");
        line(identity_holds ? Verdict::erratum : Verdict::fail, item, both);
    }
    void same_subspace(const std::string& item, const Subspace& computed, const MatQ& printed_cols) {
        const Subspace p = col_space(printed_cols);
        if (computed == p)
            line(Verdict::pass, item, "span of printed basis " + to_string(printed_cols));
        else
            line(Verdict::fail, item,
                 "printed span " + to_string(p.basis()) + ", computed span " + to_string(computed.basis()));
    }
    void same_dual(const std::string& item, const DualSubspace& computed, const MatQ& printed_rows) {
        const DualSubspace p = row_space(printed_rows);
        if (computed == p)
            line(Verdict::pass, item, "row span of " + to_string(printed_rows));
        else
            line(Verdict::fail, item,
                 "printed span " + to_string(p.basis()) + ", computed span " + to_string(computed.basis()));
    }

private:
    static std::string differing_entries(const MatQ& printed, const MatQ& computed) {
        if (printed.rows() != computed.rows() || printed.cols() != computed.cols()) return "shape differs";
        std::vector<std::string> at;
        for (Eigen::Index i = 0; i < printed.rows(); ++i)
            for (Eigen::Index j = 0; j < printed.cols(); ++j)
                if (!(printed(i, j) == computed(i, j)))
                    at.push_back("(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        if (at.size() > 3) return std::to_string(at.size()) + " entries differ";
        std::string out = at.size() == 1 ? "entry " : "entries ";
        for (std::size_t k = 0; k < at.size(); ++k) out += (k ? " " : "") + at[k];
        return out;
    }

    ReproReport& rep_;
    std::string ex_;
};

// c with printed = c * computed, when one exists.
inline std::optional<Rational> scale_factor(const MatQ& printed, const MatQ& computed) {
    if (printed.rows() != computed.rows() || printed.cols() != computed.cols()) return std::nullopt;
    std::optional<Rational> c;
    for (Eigen::Index i = 0; i < printed.rows(); ++i)
        for (Eigen::Index j = 0; j < printed.cols(); ++j) {
            if (computed(i, j).is_zero()) {
                if (!printed(i, j).is_zero()) return std::nullopt;
                continue;
            }
            const Rational r = printed(i, j) / computed(i, j);
            if (c && !(*c == r)) return std::nullopt;
            c = r;
        }
    return c;
}

// <project(xi), xi (-) project(xi)> = 0 for every basis vector xi of R^m.
inline bool projection_orthogonal(const MatQ& pi) {
    const MatD p = to_double(pi);
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        VecD e = VecD::Zero(p.cols());
        e(j) = 1;
        const DimVector xi(e), x0(VecD(p * e));
        if (std::fabs(inner(x0, stp_sub(xi, x0))) > 1e-12) return false;
    }
    return true;
}

inline MatQ col(const VecQ& v) { return MatQ(v); }

inline void example_5_1_3(const json& d, ReproReport& rep) {
    ReproContext cx(rep, "5.1.3");
    const json& pr = d.at("printed");
    const MatQ m = matrix_from_json(d.at("M"), "M"), n = matrix_from_json(d.at("N"), "N");
    const VecQ y0 = vector_from_json(d.at("y0"), "y0");
    const auto p = m.rows(), nn = m.cols();

    const MatQ pi_pn = projection_matrix<Rational>(p, nn);
    const MatQ pi_pn_printed = matrix_from_json(pr.at("Pi_2_5"), "Pi_2_5");
    auto c1 = scale_factor(pi_pn_printed, pi_pn);
    cx.printed_value("projection Pi^2_5", pi_pn, pi_pn_printed, projection_orthogonal(pi_pn),
                     c1 ? "printed = " + c1->str() + " x derived" : "");

    const ORSystem o = or_projection(SOSystem{m, n});
    const MatQ l_printed = matrix_from_json(pr.at("L"), "L");
    auto c2 = scale_factor(o.l, l_printed);
    cx.printed_value("L = M Pi^2_5", o.l, l_printed, same_matrix(o.l, MatQ(m * pi_pn)) && c2 && *c2 == Rational(5, 2),
                     c2 ? "derived = " + c2->str() + " x printed" : "");
    cx.equal("N", o.n, matrix_from_json(pr.at("N"), "N"));

    const MatQ pi_62 = projection_matrix<Rational>(y0.size(), p);
    const MatQ pi_62_printed = matrix_from_json(pr.at("Pi_6_2"), "Pi_6_2");
    auto c3 = scale_factor(pi_62_printed, pi_62);
    cx.printed_value("projection Pi^6_2", pi_62, pi_62_printed, projection_orthogonal(pi_62),
                     c3 ? "printed = " + c3->str() + " x derived" : "");

    const VecQ y_plus = pi_62 * y0;
    const VecQ y_plus_printed = vector_from_json(pr.at("y0_plus"), "y0_plus");
    const DimVector yp(to_double(y_plus)), yy(to_double(y0));
    const bool orth = std::fabs(inner(yp, stp_sub(yy, yp))) <= 1e-12;
    const VecQ from_printed_matrix = pi_62_printed * y0;
    cx.printed_value("y(0+) = Pi^6_2 y0", col(y_plus), col(y_plus_printed), orth,
                     "printed matrix gives " + to_string(col(from_printed_matrix)));
}

inline void example_5_1_5(const json& d, ReproReport& rep) {
    ReproContext cx(rep, "5.1.5");
    const json& pr = d.at("printed");
    const MatQ e = matrix_from_json(d.at("E"), "E"), f1 = matrix_from_json(d.at("F"), "F"),
               f2 = matrix_from_json(d.at("F_exact"), "F_exact");
    const MatQ theta = vstack(e, f1);
    const MatQ bf = matrix_from_json(pr.at("B_factor"), "B_factor"), cf = matrix_from_json(pr.at("C_factor"), "C_factor");
    cx.check("rank factorization Theta = B C", same_matrix(theta, MatQ(bf * cf)));
    const SingularBridge sb = singular_bridge(e, f1);
    const MatQ& x = sb.theta_pinv;
    const bool penrose = same_matrix(MatQ(theta * x * theta), theta) && same_matrix(MatQ(x * theta * x), x) &&
                         same_matrix(MatQ((theta * x).transpose()), MatQ(theta * x)) &&
                         same_matrix(MatQ((x * theta).transpose()), MatQ(x * theta));
    cx.check("Penrose identities for computed Theta^+", penrose);
    auto core = inverse(MatQ(bf.transpose() * theta * cf.transpose()));
    cx.check("C^T (B^T Theta C^T)^-1 B^T with printed factors equals computed Theta^+",
             core && same_matrix(MatQ(cf.transpose() * (*core) * bf.transpose()), x));
    cx.printed_value("Theta^+", x, matrix_from_json(pr.at("Theta_pinv"), "Theta_pinv"), penrose);
    cx.printed_value("Psi_+ (first two columns of Theta^+)", sb.psi, matrix_from_json(pr.at("Psi_plus"), "Psi_plus"),
                     penrose && same_matrix(sb.psi, MatQ(x.leftCols(e.rows()))));
    cx.check("first case is approximate (Theta singular)", !sb.invertible);

    const SingularBridge sb2 = singular_bridge(e, f2);
    const MatQ psi_printed = matrix_from_json(pr.at("Psi_exact"), "Psi_exact");
    cx.check("second case Theta invertible", sb2.invertible);
    MatQ target = MatQ::Zero(4, 2);
    target.topRows(2) = MatQ::Identity(2, 2);
    cx.check("Theta Psi = [I2; 0] with printed Psi", same_matrix(MatQ(vstack(e, f2) * psi_printed), target));
    cx.equal("Psi (exact case)", sb2.psi, psi_printed);
}

inline LinearSystem linear_from(const json& d) {
    LinearSystem s{matrix_from_json(d.at("A"), "A"), matrix_from_json(d.at("B"), "B"), matrix_from_json(d.at("C"), "C")};
    s.validate();
    return s;
}

inline void example_5_2_5(const json& d, ReproReport& rep) {
    ReproContext cx(rep, "5.2.5");
    const json& pr = d.at("printed");
    const LinearSystem sys = linear_from(d);
    const MatQ xi = sys.h * sys.a * sys.h.transpose() * *inverse(MatQ(sys.h * sys.h.transpose()));
    cx.equal("Xi = C A C^T (C C^T)^-1", xi, matrix_from_json(pr.at("Xi"), "Xi"));
    cx.check("C A = Xi C", same_matrix(MatQ(sys.h * sys.a), MatQ(xi * sys.h)));
    auto cert = is_A_invariant(sys.h, sys.a);
    cx.check("Row(C) is A-invariant", cert && cert->residual == 0.0);
    auto o = or_exact(sys);
    cx.check("exact OR exists", o.has_value());
    if (!o) return;
    cx.equal("exact OR L", o->l, matrix_from_json(pr.at("Xi"), "Xi"));
    cx.equal("exact OR N = C B", o->n, matrix_from_json(pr.at("CB"), "CB"));
    cx.check("exactness residual zero", exactness_residual(sys, *o).zero());
}

inline void example_6_1_4(const json& d, ReproReport& rep) {
    ReproContext cx(rep, "6.1.4");
    const json& pr = d.at("printed");
    const LinearSystem sys = linear_from(d);
    cx.check("exact OR absent (Row(C) not A-invariant)", !or_exact(sys).has_value());
    const MatQ h_printed = matrix_from_json(pr.at("H"), "H");
    cx.same_dual("A-invariant closure", a_invariant_closure(row_space(sys.h), sys.a), h_printed);
    const ORSystem o = or_extended(sys);
    cx.equal("closure basis H", *o.observer, h_printed);
    cx.equal("A~", o.l, matrix_from_json(pr.at("A_tilde"), "A_tilde"));
    cx.equal("B~", o.n, matrix_from_json(pr.at("B_tilde"), "B_tilde"));
    cx.check("H A = A~ H and H B = B~", exactness_residual(sys, o).zero());
    cx.equal("y = z1", o.selector, matrix_from_json(pr.at("selector"), "selector"));
}

inline void example_6_2_11(const json& d, ReproReport& rep) {
    ReproContext cx(rep, "6.2.11");
    const json& pr = d.at("printed");
    const LinearSystem sys = linear_from(d);
    const MatQ v_printed = matrix_from_json(pr.at("V"), "V");
    const MatQ f = matrix_from_json(pr.at("F"), "F");
    const Subspace v = largest_ab_invariant_in(sys.a, sys.b, perp(row_space(sys.h)));
    cx.same_subspace("largest (A,B)-invariant subspace in ker C", v, v_printed);
    const MatQ ac = sys.a + sys.b * f;
    cx.check("(A + B F) V in V with printed F", col_space(v_printed).contains(MatQ(ac * v_printed)));

    const MatQ vp = matrix_from_json(pr.at("V_perp"), "V_perp");
    cx.same_dual("(A,B)-invariant closure", ab_invariant_closure(row_space(sys.h), sys.a, sys.b).closure, vp);
    cx.same_dual("V^perp spans perp(V)", perp(col_space(v_printed)), vp);
    cx.equal("V^perp (A + B F)", MatQ(vp * ac), matrix_from_json(pr.at("V_perp_Ac"), "V_perp_Ac"));

    const ORSystem o = or_from_observers(sys, vp, f, ORKind::feedback);
    const ExactnessResidual res = exactness_residual(sys, o);
    cx.printed_value("Xi with Xi V^perp = V^perp (A + B F)", o.l, matrix_from_json(pr.at("Xi"), "Xi"),
                     res.dynamics == 0.0);
    cx.printed_value("input matrix V^perp B", o.n, matrix_from_json(pr.at("N"), "N"), res.input == 0.0);
    cx.equal("y = w1", o.selector, matrix_from_json(pr.at("selector"), "selector"));

    const ORSystem fb = or_feedback(sys);
    cx.check("feedback OR dimension 3 < extended OR dimension 5",
             fb.dim() == 3 && or_extended(sys).dim() == 5 && exactness_residual(sys, fb).zero());

    const LinearSystem km = kalman_minimal(sys);
    const json& kp = pr.at("minimal");
    cx.equal("minimal realization A", km.a, matrix_from_json(kp.at("A"), "minimal.A"));
    cx.equal("minimal realization B", km.b, matrix_from_json(kp.at("B"), "minimal.B"));
    cx.equal("minimal realization C", km.h, matrix_from_json(kp.at("C"), "minimal.C"));
}

inline void example_appendix(const json& d, ReproReport& rep) {
    ReproContext cx(rep, "appendix");
    const json& pr = d.at("printed");
    const LinearSystem sys = linear_from(d);
    const AbInvariantTrace tr = largest_ab_invariant_trace(sys.a, sys.b, perp(row_space(sys.h)));
    auto m = [&](const char* k) { return matrix_from_json(pr.at(k), k); };
    cx.same_subspace("V0 = C^perp", tr.v0, m("V0"));
    cx.check("S0 = B + V0 = V0", tr.steps.size() > 0 && tr.steps[0].s == tr.v0);
    if (tr.steps.size() < 3) {
        cx.check("iteration length", false, "expected 3 passes, got " + std::to_string(tr.steps.size()));
        return;
    }
    cx.same_subspace("S0^perp", tr.steps[0].s_perp, m("S0_perp"));
    cx.same_subspace("A^T S0^perp", tr.steps[0].at_s_perp, m("AT_S0_perp"));
    cx.same_subspace("A^-1(S0)", tr.steps[0].preimage, m("preimage0"));
    cx.same_subspace("V1", tr.steps[0].v, m("V1"));
    cx.check("S1 = B + V1 = V1", tr.steps[1].s == tr.steps[0].v);
    cx.same_subspace("S1^perp", tr.steps[1].s_perp, m("S1_perp"));
    cx.same_subspace("A^T S1^perp", tr.steps[1].at_s_perp, m("AT_S1_perp"));
    cx.same_subspace("A^-1(S1)", tr.steps[1].preimage, m("preimage1"));
    cx.same_subspace("V2", tr.steps[1].v, m("V2"));
    cx.check("S2 = S1", tr.steps[2].s == tr.steps[1].s);
    cx.check("V3 = V2", tr.steps[2].v == tr.steps[1].v && tr.result == tr.steps[1].v);
    const MatQ f = m("F");
    const MatQ v2 = m("V2");
    cx.check("V2 is (A + B F)-invariant with the printed F", col_space(v2).contains(MatQ((sys.a + sys.b * f) * v2)));
}

inline void example_7_11(const json& d, ReproReport& rep) {
    ReproContext cx(rep, "7.11");
    const json& pr = d.at("printed");
    const SystemFile sf = system_from_json(d.at("system"));
    const PolyAffineSystem& sys = sf.poly;
    const int n = sys.nvars;
    const std::vector<Poly> alpha = detail::polys_from_json(d.at("alpha"), n, "alpha");
    auto m = [&](const char* k) { return matrix_from_json(pr.at(k), k); };

    const NlSOSystem so = so_system_nl(sys);
    cx.check("L_f h = x2", so.drift[0] == parse_poly(pr.at("Lf_h").get<std::string>(), n));
    cx.check("L_g h = 0", so.input[0][0] == parse_poly(pr.at("Lg_h").get<std::string>(), n));
    cx.check("h alone is not invariant (no certificate)", !is_invariant_exact_codistribution(sys, sys.h).has_value());

    const OmegaIteration it = invariant_codistribution_iteration(sys);
    auto g_perp = it.g_perp.constant_basis();
    cx.check("G^perp", g_perp && same_matrix(*g_perp, canonical_rows(m("G_perp"))),
             g_perp ? to_string(*g_perp) : "non-constant");
    auto om0 = it.omegas.front().constant_basis();
    cx.check("Omega_0", om0 && same_matrix(*om0, canonical_rows(m("Omega_0"))), om0 ? to_string(*om0) : "non-constant");
    auto omk = it.result().constant_basis();
    cx.check("Omega_k, k >= 1", it.omegas.size() == 2 && omk && same_matrix(*omk, canonical_rows(m("Omega_k"))),
             omk ? to_string(*omk) : "non-constant");

    const PolyAffineSystem closed = sys.with_feedback(alpha);
    cx.check("closed-loop L_f~ h = x2", lie_derivative(closed.f, sys.h[0]) == parse_poly(pr.at("Lf_h").get<std::string>(), n));
    const NlORSystem o = or_extended_nl(sys, alpha);
    CoDistribution delta;
    delta.nvars = n;
    for (const Poly& phi : o.state_functions) delta.generators.push_back(differential(phi));
    auto dm = delta.constant_basis();
    cx.check("Delta_m = Span{dy, dx2}", dm && same_matrix(*dm, canonical_rows(m("Delta_m"))) &&
                                            o.state_functions.size() == 2 &&
                                            o.state_functions[1] == Poly::var(n, 1),
             dm ? to_string(*dm) : "non-constant");
    cx.check("emitted OR is linear", o.linear());
    const json& sys712 = pr.at("reduced_system");
    cx.equal("reduced system dynamics", o.l(), matrix_from_json(sys712.at("L"), "L"));
    cx.equal("reduced system input", o.n(), matrix_from_json(sys712.at("N"), "N"));
}

struct ExampleEntry {
    const char* name;
    const char* file;
    void (*run)(const json&, ReproReport&);
};

inline const std::vector<ExampleEntry>& examples() {
    static const std::vector<ExampleEntry> list = {
        {"5.1.3", "example_5_1_3.json", example_5_1_3},   {"5.1.5", "example_5_1_5.json", example_5_1_5},
        {"5.2.5", "example_5_2_5.json", example_5_2_5},   {"6.1.4", "example_6_1_4.json", example_6_1_4},
        {"6.2.11", "example_6_2_11.json", example_6_2_11}, {"7.11", "example_7_11.json", example_7_11},
        {"appendix", "appendix.json", example_appendix},
    };
    return list;
}

} // namespace detail

inline std::vector<std::string> repro_example_names() {
    std::vector<std::string> out;
    for (const auto& e : detail::examples()) out.emplace_back(e.name);
    return out;
}

// filter: run examples whose name contains it; nullopt runs all.
inline ReproReport run_repro(const std::string& data_dir = ORKIT_DATA_DIR,
                             const std::optional<std::string>& filter = std::nullopt) {
    ReproReport rep;
    for (const auto& e : detail::examples()) {
        if (filter && (filter->empty() || std::string(e.name).find(*filter) == std::string::npos)) continue;
        try {
            e.run(read_json_file(data_dir + "/" + e.file), rep);
        } catch (const std::exception& ex) {
            rep.lines.push_back({Verdict::fail, e.name, "run", ex.what()});
        }
    }
    return rep;
}

} // namespace orkit
