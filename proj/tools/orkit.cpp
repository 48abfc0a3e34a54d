// orkit: build, simulate and verify observer-based realizations.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <orkit/orkit.hpp>

namespace {

using namespace orkit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAbsent = 2;

struct Config {
    std::string input;
    std::string output;
    std::string bridge = "projecting";
    bool strict_paper = false;
    bool json_out = false;
    double eps_num = 1e-8;
    int d_max = 8;
    int k_max = 20;
    std::string u_spec = "zero";
    double t_end = 1.0;
    double dt = 1e-3;
    int steps = 10;
    std::string or_path;
    std::optional<std::string> filter;
    std::string data_dir = ORKIT_DATA_DIR;
};

NonlinOptions nonlin_options(const Config& c) {
    NonlinOptions o;
    o.d_max = c.d_max;
    o.k_max = c.k_max;
    return o;
}

Bridge::Kind bridge_kind(const std::string& s) {
    if (s == "projecting") return Bridge::Kind::projecting;
    if (s == "default") return Bridge::Kind::standard;
    if (s == "pseudoinverse") return Bridge::Kind::pseudo_inverse;
    throw ParseError("--bridge: expected projecting, default or pseudoinverse");
}

Bridge bridge_for(const std::string& s) {
    if (s == "projecting") return Bridge::projecting();
    if (s == "default") return Bridge::standard();
    throw ParseError("--bridge: expected projecting or default here");
}

SystemFile load(const Config& c) {
    ReadLog log;
    SystemFile sf = read_system_file(c.input, &log);
    for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
    return sf;
}

void require_type(const SystemFile& sf, SystemType t, const char* cmd) {
    if (sf.type != t) throw ParseError(std::string(cmd) + ": unsupported system type for this subcommand");
}

void print_matrix(std::ostream& os, const char* name, const MatQ& m) { os << name << " = " << to_string(m) << "\n"; }

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

ORSystem nl_to_linear(const NlORSystem& o, ORKind kind) {
    ORSystem out;
    out.kind = kind;
    out.l = o.l();
    out.n = o.n();
    out.selector = o.selector;
    out.exact = true;
    return out;
}

int cmd_build(const std::string& kind, const Config& c) {
    const SystemFile sf = load(c);
    std::optional<ORSystem> o;
    std::vector<std::string> notes;

    if (kind == "singular") {
        require_type(sf, SystemType::singular, "build singular");
        o = or_singular(sf.singular);
        if (!o->exact) notes.push_back("stack(E, F) is singular; the OR-system uses the pseudo-inverse bridge and is approximate");
    } else if (sf.type == SystemType::poly_affine) {
        if (kind != "extended" && kind != "feedback")
            throw ParseError("build " + kind + ": polynomial systems support extended and feedback only");
        if (kind == "feedback" && !sf.alpha) throw ParseError("build feedback: polynomial system needs field 'alpha'");
        const std::optional<std::vector<Poly>> alpha = kind == "feedback" ? sf.alpha : std::nullopt;
        NlORSystem nl;
        try {
            nl = or_extended_nl(sf.poly, alpha, nonlin_options(c));
        } catch (const BoundExceeded& e) {
            std::cerr << e.what() << "\npartial closure:";
            for (const Poly& p : e.partial()) std::cerr << " [" << p << "]";
            std::cerr << "\n";
            return kExitAbsent;
        } catch (const NoCertificate& e) {
            std::cerr << e.what() << "\n";
            return kExitAbsent;
        }
        std::cout << "state functions:";
        for (const Poly& p : nl.state_functions) std::cout << " [" << p << "]";
        std::cout << "\n";
        if (nl.feedback) {
            std::cout << "feedback alpha:";
            for (const Poly& p : *nl.feedback) std::cout << " [" << p << "]";
            std::cout << "\n";
        }
        if (!nl.linear()) {
            std::cerr << "the OR-system is not linear in the state functions; only linear OR-systems are written\n";
            return kExitAbsent;
        }
        o = nl_to_linear(nl, kind == "feedback" ? ORKind::feedback : ORKind::extended);
    } else {
        require_type(sf, SystemType::linear, ("build " + kind).c_str());
        const LinearSystem& sys = sf.linear;
        if (kind == "projection") {
            const Bridge::Kind bk = bridge_kind(c.bridge);
            o = bk == Bridge::Kind::pseudo_inverse ? or_pseudoinverse(sys) : or_projection(so_system(sys), bk);
        } else if (kind == "pseudoinverse") {
            o = or_pseudoinverse(sys);
        } else if (kind == "exact") {
            o = or_exact(sys);
            if (!o) {
                std::cerr << "ℋ* is not A-invariant; try `build extended`\n";
                return kExitAbsent;
            }
        } else if (kind == "extended") {
            o = or_extended(sys);
        } else if (kind == "feedback") {
            o = or_feedback(sys);
        } else {
            throw ParseError("unknown build kind '" + kind + "'");
        }
        if (o->observer) {
            const ExactnessResidual r = exactness_residual(sys, *o);
            std::cout << "residual: dynamics " << r.dynamics << ", input " << r.input << "\n";
            if (!r.zero() && o->exact) notes.push_back("nonzero residual on a construction marked exact");
        }
        if (!o->exact) notes.push_back("approximate construction; observer trajectories are not reproduced exactly");
    }

    std::cout << "kind: " << to_string(o->kind) << "\n"
              << "dimension: " << o->dim() << "\n"
              << "exact: " << (o->exact ? "yes" : "no") << "\n";
    print_matrix(std::cout, "L", o->l);
    print_matrix(std::cout, "N", o->n);
    print_matrix(std::cout, "selector", o->selector);
    if (o->observer) print_matrix(std::cout, "observer", *o->observer);
    if (o->feedback) print_matrix(std::cout, "F", *o->feedback);
    for (const auto& n : notes) std::cout << "note: " << n << "\n";

    const TimeKind time = sf.type == SystemType::linear ? sf.linear.time : TimeKind::continuous;
    if (!c.output.empty()) write_system_file(c.output, or_to_system_file(*o, time));
    if (c.strict_paper && !o->exact) {
        std::cerr << "--strict-paper: OR-system is not exact\n";
        return kExitAbsent;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sim / compare
// ---------------------------------------------------------------------------

InputSignal input_signal(const std::string& spec, Eigen::Index m) {
    if (spec == "zero") return zero_input(m);
    if (spec == "step") return [m](double) { return VecD::Ones(m); };
    if (spec == "sine") return [m](double t) { return VecD::Constant(m, std::sin(t)); };
    if (spec.rfind("csv:", 0) == 0) return read_input_csv(spec.substr(4), m);
    throw ParseError("--u: expected zero, step, sine or csv:<path>");
}

void write_csv(const Config& c, const Trajectory& tr) {
    if (c.output.empty()) {
        write_trajectory_csv(std::cout, tr);
        return;
    }
    std::ofstream out(c.output);
    if (!out) throw Error("cannot write '" + c.output + "'");
    write_trajectory_csv(out, tr);
}

void print_summary(const Trajectory& tr) {
    double mx = 0.0;
    for (const auto& s : tr.states) mx = std::max(mx, s.norm());
    std::cerr << "samples: " << tr.size() << "\nfinal state: [";
    for (Eigen::Index i = 0; i < tr.back().size(); ++i) std::cerr << (i ? ", " : "") << format_double(tr.back()(i));
    std::cerr << "]\nmax norm: " << format_double(mx) << "\n";
}

// Files whose A is not square describe DK-STP quasi systems y' = A |x| y + B u.
bool is_quasi(const json& doc) {
    return doc.value("type", std::string()) == "linear" && doc.contains("A") && doc.at("A").is_array() &&
           !doc.at("A").empty() && doc.at("A").at(0).is_array() && doc.at("A").size() != doc.at("A").at(0).size();
}

int cmd_sim(const Config& c) {
    const json doc = read_json_file(c.input);
    Trajectory tr;
    if (is_quasi(doc)) {
        ReadLog log;
        const MatD a = to_double(matrix_from_json(doc.at("A"), "field 'A'", &log));
        if (!doc.contains("y0")) throw ParseError("field 'y0': required for a non-square A");
        const DimVector y0(to_double(vector_from_json(doc.at("y0"), "field 'y0'", &log)));
        const bool discrete = doc.value("time", std::string("continuous")) == "discrete";
        const Bridge br = bridge_for(c.bridge);
        if (doc.contains("B")) {
            const MatD b = to_double(matrix_from_json(doc.at("B"), "field 'B'", &log));
            if (b.rows() != a.rows()) throw ParseError("shape: B must have as many rows as A");
            const InputSignal u = input_signal(c.u_spec, b.cols());
            if (discrete) {
                tr = sim_discrete_controlled(a, b, y0, u, c.steps, br);
            } else {
                const VecD jumped = br.matrix(a.rows(), y0.dim()) * y0.entries();
                tr = sim_continuous_controlled(pi_A(a, br), b, jumped, u, c.t_end, c.dt);
                tr.jump = std::make_pair(y0.entries(), jumped);
            }
        } else {
            tr = discrete ? sim_discrete(a, y0, c.steps, br) : sim_continuous(a, y0, c.t_end, c.dt, br);
        }
        for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
    } else {
        ReadLog log;
        const SystemFile sf = system_from_json(doc, &log);
        for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
        require_type(sf, SystemType::linear, "sim");
        const LinearSystem& sys = sf.linear;
        const MatD a = to_double(sys.a), b = to_double(sys.b);
        VecD x0 = VecD::Zero(sys.n());
        if (sf.x0) {
            if (sf.x0->size() != sys.n()) throw ParseError("field 'x0': wrong dimension");
            x0 = to_double(*sf.x0);
        } else if (sf.y0) {
            x0 = project(DimVector(to_double(*sf.y0)), sys.n()).entries();
        }
        const InputSignal u = input_signal(c.u_spec, sys.m());
        tr = sys.time == TimeKind::discrete ? sim_discrete_classical(a, b, x0, u, c.steps)
                                            : sim_continuous_controlled(a, b, x0, u, c.t_end, c.dt);
    }
    write_csv(c, tr);
    print_summary(tr);
    return kExitOk;
}

int cmd_compare(const Config& c) {
    const SystemFile sf = load(c);
    require_type(sf, SystemType::linear, "compare");
    ReadLog log;
    const SystemFile of = read_system_file(c.or_path, &log);
    require_type(of, SystemType::linear, "compare --or");
    ORSystem o;
    if (of.or_meta) {
        o = *of.or_meta;
    } else {
        o.kind = ORKind::approx_projection;
        o.l = of.linear.a;
        o.n = of.linear.b;
        o.selector = of.linear.h;
        o.init = InitRule::project_output;
    }
    if (o.n.cols() != sf.linear.m()) throw ParseError("OR input dimension differs from the system's");
    if (o.selector.rows() != sf.linear.p()) throw ParseError("OR output dimension differs from the system's");
    VecD x0 = VecD::Zero(sf.linear.n());
    if (sf.x0) x0 = to_double(*sf.x0);
    SimGrid grid{c.t_end, c.dt, c.steps};
    const CompareReport rep = compare(sf.linear, o, x0, input_signal(c.u_spec, sf.linear.m()), grid);
    if (c.json_out) {
        json j;
        j["max_err"] = rep.max_err;
        j["max_err_per_output"] = rep.max_err_per_output;
        j["rms_err_per_output"] = rep.rms_err_per_output;
        std::cout << dump_json(j) << "\n";
    } else {
        std::cout << "max_err: " << format_double(rep.max_err) << "\n";
        for (std::size_t i = 0; i < rep.max_err_per_output.size(); ++i)
            std::cout << "y" << (i + 1) << ": max " << format_double(rep.max_err_per_output[i]) << ", rms "
                      << format_double(rep.rms_err_per_output[i]) << "\n";
    }
    if (!c.output.empty()) {
        Trajectory both;
        both.times = rep.original_outputs.times;
        for (std::size_t k = 0; k < rep.original_outputs.size(); ++k) {
            const VecD& y = rep.original_outputs.states[k];
            const VecD& z = rep.or_outputs.states[k];
            VecD row(y.size() + z.size());
            row << y, z;
            both.states.push_back(row);
        }
        write_csv(c, both);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

json subspace_json(const Subspace& s) { return matrix_to_json(s.basis()); }
json dual_json(const DualSubspace& s) { return matrix_to_json(s.basis()); }

int emit(const Config& c, const json& report, bool holds) {
    if (c.json_out) {
        std::cout << dump_json(report) << "\n";
    } else {
        for (const auto& [k, v] : report.items()) std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    return holds ? kExitOk : kExitAbsent;
}

int cmd_check(const std::string& what, const Config& c) {
    json r;
    r["check"] = what;
    if (what == "cayley") {
        const json doc = read_json_file(c.input);
        if (!doc.contains("A")) throw ParseError("missing field 'A'");
        ReadLog log;
        const MatD a = to_double(matrix_from_json(doc.at("A"), "field 'A'", &log));
        const Bridge br = bridge_for(c.bridge);
        const double res = cayley_hamilton_residual(a, br);
        r["bridge"] = br.name();
        r["residual"] = res;
        r["tolerance"] = c.eps_num;
        r["holds"] = res < c.eps_num;
        return emit(c, r, res < c.eps_num);
    }

    const SystemFile sf = load(c);
    if (what == "nl-invariant") {
        require_type(sf, SystemType::poly_affine, "check nl-invariant");
        const NonlinOptions opt = nonlin_options(c);
        auto cert = is_invariant_exact_codistribution(sf.poly, sf.poly.h, sf.alpha, opt);
        r["holds"] = cert.has_value();
        if (cert) {
            json xi = json::array();
            for (const auto& row : cert->xi0) xi.push_back(detail::polys_to_json(row));
            r["xi_drift"] = xi;
        }
        try {
            const OmegaIteration it = invariant_codistribution_iteration(sf.poly, opt);
            json om = json::array();
            for (const auto& o : it.omegas) {
                auto cb = o.constant_basis();
                om.push_back(cb ? matrix_to_json(*cb) : json("non-constant"));
            }
            r["omega_iteration"] = om;
        } catch (const BoundExceeded& e) {
            r["omega_iteration"] = std::string(e.what());
        }
        return emit(c, r, cert.has_value());
    }

    require_type(sf, SystemType::linear, ("check " + what).c_str());
    const LinearSystem& sys = sf.linear;
    if (what == "a-invariant") {
        auto cert = is_A_invariant(sys.h, sys.a);
        r["holds"] = cert.has_value();
        if (cert) {
            r["xi"] = matrix_to_json(cert->xi);
            r["residual"] = cert->residual;
        }
        return emit(c, r, cert.has_value());
    }
    if (what == "ab-invariant") {
        const AbInvariantTrace tr = largest_ab_invariant_trace(sys.a, sys.b, perp(row_space(sys.h)));
        json chain = json::array();
        chain.push_back(subspace_json(tr.v0));
        for (const auto& s : tr.steps) chain.push_back(subspace_json(s.v));
        r["chain"] = chain;
        r["V"] = subspace_json(tr.result);
        auto f = friend_feedback(sys.a, sys.b, tr.result);
        if (f) r["F"] = matrix_to_json(*f);
        auto cert = is_ab_invariant(sys.h, sys.a, sys.b);
        r["holds"] = cert.has_value();
        return emit(c, r, true);
    }
    if (what == "closure") {
        r["a_closure"] = dual_json(a_invariant_closure(row_space(sys.h), sys.a));
        const AbClosure ab = ab_invariant_closure(row_space(sys.h), sys.a, sys.b);
        r["ab_closure"] = dual_json(ab.closure);
        r["F"] = matrix_to_json(ab.f);
        return emit(c, r, true);
    }
    if (what == "ddp") {
        if (sf.disturbances.empty()) throw ParseError("check ddp: field 'disturbances' is required");
        const bool ok = ddp_check(sys, sf.disturbances);
        r["holds"] = ok;
        r["V"] = subspace_json(largest_ab_invariant_in(sys.a, sys.b, perp(row_space(sys.h))));
        return emit(c, r, ok);
    }
    throw ParseError("unknown check '" + what + "'");
}

// ---------------------------------------------------------------------------
// repro
// ---------------------------------------------------------------------------

int cmd_repro(const Config& c) {
    const ReproReport rep = run_repro(c.data_dir, c.filter);
    rep.print(std::cout);
    return rep.ok(c.strict_paper) ? kExitOk : kExitUsage;
}

double env_tolerance(double fallback) {
    const char* s = std::getenv("ORKIT_TOL");
    if (!s || !*s) return fallback;
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || !(v > 0.0)) throw ParseError("ORKIT_TOL must be a positive number");
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"orkit: observer-based realizations of control systems"};
    app.require_subcommand(1);
    Config c;

    auto positive = CLI::PositiveNumber;

    std::string build_kind;
    auto* build = app.add_subcommand("build", "construct an OR-system");
    build->add_option("kind", build_kind, "projection|pseudoinverse|exact|extended|feedback|singular")
        ->required()
        ->check(CLI::IsMember({"projection", "pseudoinverse", "exact", "extended", "feedback", "singular"}));
    build->add_option("-i,--input", c.input, "system file")->required();
    build->add_option("-o,--output", c.output, "OR-system file");
    build->add_option("--bridge", c.bridge, "projecting|default|pseudoinverse")
        ->check(CLI::IsMember({"projecting", "default", "pseudoinverse"}));
    build->add_flag("--strict-paper", c.strict_paper, "exit 2 unless the OR-system is exact");
    build->add_option("--d-max", c.d_max, "polynomial degree bound")->check(positive);
    build->add_option("--k-max", c.k_max, "iteration bound")->check(positive);

    auto* sim = app.add_subcommand("sim", "simulate a system or OR file");
    sim->add_option("-i,--input", c.input, "system file")->required();
    sim->add_option("-o,--output", c.output, "CSV output (stdout when omitted)");
    sim->add_option("--u", c.u_spec, "zero|step|sine|csv:<path>");
    sim->add_option("--T", c.t_end, "final time")->check(positive);
    sim->add_option("--dt", c.dt, "time step")->check(positive);
    sim->add_option("--steps", c.steps, "steps for discrete time")->check(CLI::NonNegativeNumber);
    sim->add_option("--bridge", c.bridge, "projecting|default")->check(CLI::IsMember({"projecting", "default"}));

    auto* cmp = app.add_subcommand("compare", "compare original outputs with an OR-system");
    cmp->add_option("-i,--input", c.input, "system file")->required();
    cmp->add_option("--or", c.or_path, "OR-system file")->required();
    cmp->add_option("-o,--output", c.output, "CSV of original and OR outputs");
    cmp->add_option("--u", c.u_spec, "zero|step|sine|csv:<path>");
    cmp->add_option("--T", c.t_end, "final time")->check(positive);
    cmp->add_option("--dt", c.dt, "time step")->check(positive);
    cmp->add_option("--steps", c.steps, "steps for discrete time")->check(CLI::NonNegativeNumber);
    cmp->add_flag("--json", c.json_out, "JSON report");

    std::string check_what;
    auto* check = app.add_subcommand("check", "verify invariance properties");
    check->add_option("what", check_what, "a-invariant|ab-invariant|closure|cayley|ddp|nl-invariant")
        ->required()
        ->check(CLI::IsMember({"a-invariant", "ab-invariant", "closure", "cayley", "ddp", "nl-invariant"}));
    check->add_option("-i,--input", c.input, "system file")->required();
    check->add_option("--bridge", c.bridge, "projecting|default")->check(CLI::IsMember({"projecting", "default"}));
    check->add_flag("--json", c.json_out, "JSON report");
    check->add_option("--d-max", c.d_max, "polynomial degree bound")->check(positive);
    check->add_option("--k-max", c.k_max, "iteration bound")->check(positive);

    auto* repro = app.add_subcommand("repro", "check the bundled worked examples");
    repro->add_option("--filter", c.filter, "run examples whose name contains this");
    repro->add_option("--data", c.data_dir, "example data directory");
    repro->add_flag("--strict-paper", c.strict_paper, "count errata as failures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        c.eps_num = env_tolerance(c.eps_num);
        if (*build) return cmd_build(build_kind, c);
        if (*sim) return cmd_sim(c);
        if (*cmp) return cmd_compare(c);
        if (*check) return cmd_check(check_what, c);
        if (*repro) return cmd_repro(c);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ShapeError& e) {
        std::cerr << "error: shape: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
