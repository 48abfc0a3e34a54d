#pragma once

// System files (JSON) and trajectory CSV.
//
// Matrices are arrays of rows; entries are integers, decimals, or rational
// strings "p/q". Polynomials are strings such as "x2 + 3/2*x1^2*x3".

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "matrix.hpp"
#include "nonlin.hpp"
#include "orsys.hpp"
#include "poly.hpp"
#include "sim.hpp"

namespace orkit {

using json = nlohmann::json;

// Non-fatal notes produced while reading (e.g. lossy rationalization).
struct ReadLog {
    std::vector<std::string> warnings;
};

inline Rational rational_from_json(const json& v, const std::string& where, ReadLog* log = nullptr) {
    if (v.is_number_integer()) {
        if (v.is_number_unsigned()) return Rational(Rational::Integer(v.get<std::uint64_t>()), Rational::Integer(1));
        return Rational(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ParseError(where + ": non-finite number");
        Rational r = rationalize(d);
        if (r.to_double() != d && log)
            log->warnings.push_back(where + ": " + std::to_string(d) + " rationalized to " + r.str());
        return r;
    }
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    throw ParseError(where + ": expected a number or a rational string");
}

inline json rational_to_json(const Rational& r) {
    if (r.is_integer()) {
        const Rational::Integer& num = r.numerator();
        if (num >= std::numeric_limits<std::int64_t>::min() && num <= std::numeric_limits<std::int64_t>::max())
            return json(num.convert_to<std::int64_t>());
    }
    return json(r.str());
}

inline MatQ matrix_from_json(const json& v, const std::string& where, ReadLog* log = nullptr) {
    if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    if (!v[0].is_array() || v[0].empty()) throw ParseError(where + " row 1: expected a nonempty array");
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    MatQ m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        const std::string rw = where + " row " + std::to_string(i + 1);
        if (!row.is_array()) throw ParseError(rw + ": expected an array");
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(rw + ": has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = rational_from_json(row[static_cast<std::size_t>(j)], rw + " col " + std::to_string(j + 1), log);
    }
    return m;
}

inline VecQ vector_from_json(const json& v, const std::string& where, ReadLog* log = nullptr) {
    if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a nonempty array");
    VecQ out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = rational_from_json(v[i], where + " entry " + std::to_string(i + 1), log);
    return out;
}

inline json matrix_to_json(const MatQ& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(rational_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_to_json(const VecQ& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(rational_to_json(v(i)));
    return out;
}

inline bool same_matrix(const MatQ& a, const MatQ& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

inline bool same_matrix(const std::optional<MatQ>& a, const std::optional<MatQ>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_matrix(*a, *b);
}

enum class SystemType { linear, singular, poly_affine };

struct SystemFile {
    SystemType type = SystemType::linear;
    LinearSystem linear;
    SingularSystem singular;
    PolyAffineSystem poly;
    std::optional<std::vector<Poly>> alpha; // candidate feedback for poly_affine
    std::vector<VecQ> disturbances;
    std::optional<VecQ> x0;
    std::optional<VecQ> y0;
    std::optional<ORSystem> or_meta; // present when the file holds an OR-system

    friend bool operator==(const SystemFile& a, const SystemFile& b) {
        if (a.type != b.type) return false;
        switch (a.type) {
        case SystemType::linear:
            if (!same_matrix(a.linear.a, b.linear.a) || !same_matrix(a.linear.b, b.linear.b) ||
                !same_matrix(a.linear.h, b.linear.h) || a.linear.time != b.linear.time)
                return false;
            break;
        case SystemType::singular:
            if (!same_matrix(a.singular.e, b.singular.e) || !same_matrix(a.singular.f, b.singular.f) ||
                !same_matrix(a.singular.a, b.singular.a) || !same_matrix(a.singular.b, b.singular.b) ||
                !same_matrix(a.singular.d, b.singular.d))
                return false;
            break;
        case SystemType::poly_affine:
            if (a.poly.nvars != b.poly.nvars || a.poly.f != b.poly.f || a.poly.g != b.poly.g || a.poly.h != b.poly.h ||
                a.alpha != b.alpha)
                return false;
            break;
        }
        if (a.disturbances.size() != b.disturbances.size()) return false;
        for (std::size_t k = 0; k < a.disturbances.size(); ++k)
            if (!same_matrix(MatQ(a.disturbances[k]), MatQ(b.disturbances[k]))) return false;
        auto same_vec = [](const std::optional<VecQ>& x, const std::optional<VecQ>& y) {
            if (x.has_value() != y.has_value()) return false;
            return !x || same_matrix(MatQ(*x), MatQ(*y));
        };
        if (!same_vec(a.x0, b.x0) || !same_vec(a.y0, b.y0)) return false;
        if (a.or_meta.has_value() != b.or_meta.has_value()) return false;
        if (a.or_meta) {
            const ORSystem &p = *a.or_meta, &q = *b.or_meta;
            if (p.kind != q.kind || p.exact != q.exact || p.init != q.init || !same_matrix(p.l, q.l) ||
                !same_matrix(p.n, q.n) || !same_matrix(p.selector, q.selector) ||
                !same_matrix(p.observer, q.observer) || !same_matrix(p.feedback, q.feedback))
                return false;
        }
        return true;
    }
};

namespace detail {

inline const json& require(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return doc.at(key);
}

inline std::vector<Poly> polys_from_json(const json& v, int nvars, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array of polynomial strings");
    std::vector<Poly> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string w = where + " entry " + std::to_string(i + 1);
        if (v[i].is_string()) {
            try {
                out.push_back(parse_poly(v[i].get<std::string>(), nvars));
            } catch (const ParseError& e) {
                throw ParseError(w + ": " + e.what());
            }
        } else if (v[i].is_number()) {
            out.push_back(Poly::constant(nvars, rational_from_json(v[i], w)));
        } else {
            throw ParseError(w + ": expected a polynomial string");
        }
    }
    return out;
}

inline json polys_to_json(const std::vector<Poly>& ps) {
    json out = json::array();
    for (const Poly& p : ps) out.push_back(p.str());
    return out;
}

} // namespace detail

inline SystemFile system_from_json(const json& doc, ReadLog* log = nullptr) {
    using detail::require;
    if (!doc.is_object()) throw ParseError("system file must be a JSON object");
    SystemFile sf;
    const std::string type = require(doc, "type").get<std::string>();
    if (type == "linear") {
        sf.type = SystemType::linear;
        sf.linear.a = matrix_from_json(require(doc, "A"), "field 'A'", log);
        sf.linear.b = matrix_from_json(require(doc, "B"), "field 'B'", log);
        const char* hk = doc.contains("H") ? "H" : "C";
        sf.linear.h = matrix_from_json(require(doc, hk), std::string("field '") + hk + "'", log);
        if (doc.contains("time")) {
            const std::string t = doc.at("time").get<std::string>();
            if (t == "continuous") sf.linear.time = TimeKind::continuous;
            else if (t == "discrete") sf.linear.time = TimeKind::discrete;
            else throw ParseError("field 'time': expected 'continuous' or 'discrete'");
        }
        try {
            sf.linear.validate();
        } catch (const ShapeError& e) {
            throw ParseError(std::string("shape: ") + e.what());
        }
    } else if (type == "singular") {
        sf.type = SystemType::singular;
        sf.singular.e = matrix_from_json(require(doc, "E"), "field 'E'", log);
        sf.singular.f = matrix_from_json(require(doc, "F"), "field 'F'", log);
        sf.singular.a = matrix_from_json(require(doc, "A"), "field 'A'", log);
        sf.singular.b = matrix_from_json(require(doc, "B"), "field 'B'", log);
        if (doc.contains("D")) sf.singular.d = matrix_from_json(doc.at("D"), "field 'D'", log);
        try {
            sf.singular.validate();
        } catch (const ShapeError& e) {
            throw ParseError(std::string("shape: ") + e.what());
        }
    } else if (type == "poly_affine") {
        sf.type = SystemType::poly_affine;
        const json& nv = require(doc, "nvars");
        if (!nv.is_number_integer() || nv.get<int>() < 1) throw ParseError("field 'nvars': expected a positive integer");
        const int n = nv.get<int>();
        sf.poly.nvars = n;
        sf.poly.f = detail::polys_from_json(require(doc, "f"), n, "field 'f'");
        const json& g = require(doc, "g");
        if (!g.is_array()) throw ParseError("field 'g': expected an array of vector fields");
        for (std::size_t i = 0; i < g.size(); ++i)
            sf.poly.g.push_back(detail::polys_from_json(g[i], n, "field 'g' field " + std::to_string(i + 1)));
        sf.poly.h = detail::polys_from_json(require(doc, "h"), n, "field 'h'");
        if (doc.contains("alpha")) sf.alpha = detail::polys_from_json(doc.at("alpha"), n, "field 'alpha'");
        try {
            sf.poly.validate();
            if (sf.alpha && sf.alpha->size() != sf.poly.g.size())
                throw ShapeError("'alpha' needs one function per input field");
        } catch (const Error& e) {
            throw ParseError(std::string("shape: ") + e.what());
        }
    } else {
        throw ParseError("field 'type': expected linear, singular or poly_affine, got '" + type + "'");
    }

    if (doc.contains("disturbances")) {
        const json& d = doc.at("disturbances");
        if (!d.is_array()) throw ParseError("field 'disturbances': expected an array of vectors");
        for (std::size_t k = 0; k < d.size(); ++k)
            sf.disturbances.push_back(vector_from_json(d[k], "field 'disturbances' vector " + std::to_string(k + 1), log));
    }
    if (doc.contains("x0")) sf.x0 = vector_from_json(doc.at("x0"), "field 'x0'", log);
    if (doc.contains("y0")) sf.y0 = vector_from_json(doc.at("y0"), "field 'y0'", log);

    if (doc.contains("or")) {
        if (sf.type != SystemType::linear) throw ParseError("field 'or': only linear OR-systems are stored");
        const json& o = doc.at("or");
        ORSystem os;
        os.kind = or_kind_from_string(require(o, "kind").get<std::string>());
        os.l = sf.linear.a;
        os.n = sf.linear.b;
        os.selector = sf.linear.h;
        os.exact = o.value("exact", false);
        const std::string init = o.value("init", std::string("observe_state"));
        if (init == "observe_state") os.init = InitRule::observe_state;
        else if (init == "project_output") os.init = InitRule::project_output;
        else throw ParseError("field 'or.init': expected observe_state or project_output");
        if (o.contains("observer")) os.observer = matrix_from_json(o.at("observer"), "field 'or.observer'", log);
        if (o.contains("feedback")) os.feedback = matrix_from_json(o.at("feedback"), "field 'or.feedback'", log);
        sf.or_meta = os;
    }
    return sf;
}

inline json system_to_json(const SystemFile& sf) {
    json doc;
    switch (sf.type) {
    case SystemType::linear:
        doc["type"] = "linear";
        doc["A"] = matrix_to_json(sf.linear.a);
        doc["B"] = matrix_to_json(sf.linear.b);
        doc["H"] = matrix_to_json(sf.linear.h);
        doc["time"] = sf.linear.time == TimeKind::discrete ? "discrete" : "continuous";
        break;
    case SystemType::singular:
        doc["type"] = "singular";
        doc["E"] = matrix_to_json(sf.singular.e);
        doc["F"] = matrix_to_json(sf.singular.f);
        doc["A"] = matrix_to_json(sf.singular.a);
        doc["B"] = matrix_to_json(sf.singular.b);
        if (sf.singular.d) doc["D"] = matrix_to_json(*sf.singular.d);
        break;
    case SystemType::poly_affine: {
        doc["type"] = "poly_affine";
        doc["nvars"] = sf.poly.nvars;
        doc["f"] = detail::polys_to_json(sf.poly.f);
        json g = json::array();
        for (const auto& gi : sf.poly.g) g.push_back(detail::polys_to_json(gi));
        doc["g"] = g;
        doc["h"] = detail::polys_to_json(sf.poly.h);
        if (sf.alpha) doc["alpha"] = detail::polys_to_json(*sf.alpha);
        break;
    }
    }
    if (!sf.disturbances.empty()) {
        json d = json::array();
        for (const auto& v : sf.disturbances) d.push_back(vector_to_json(v));
        doc["disturbances"] = d;
    }
    if (sf.x0) doc["x0"] = vector_to_json(*sf.x0);
    if (sf.y0) doc["y0"] = vector_to_json(*sf.y0);
    if (sf.or_meta) {
        const ORSystem& o = *sf.or_meta;
        json meta;
        meta["kind"] = to_string(o.kind);
        meta["exact"] = o.exact;
        meta["init"] = o.init == InitRule::observe_state ? "observe_state" : "project_output";
        if (o.observer) meta["observer"] = matrix_to_json(*o.observer);
        if (o.feedback) meta["feedback"] = matrix_to_json(*o.feedback);
        doc["or"] = meta;
    }
    return doc;
}

// An OR-system as a linear system file: A = L, B = N, H = selector.
inline SystemFile or_to_system_file(const ORSystem& o, TimeKind time = TimeKind::continuous) {
    SystemFile sf;
    sf.type = SystemType::linear;
    sf.linear = LinearSystem{o.l, o.n, o.selector, time};
    sf.or_meta = o;
    return sf;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline SystemFile read_system_file(const std::string& path, ReadLog* log = nullptr) {
    const json doc = read_json_file(path);
    try {
        return system_from_json(doc, log);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace detail {

inline void dump_compact(std::ostream& os, const json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    auto scalars = [](const json& a) {
        for (const auto& e : a)
            if (e.is_structured()) return false;
        return true;
    };
    if (v.is_object()) {
        if (v.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& [k, e] : v.items()) {
            os << (first ? "" : ",\n") << pad << json(k).dump() << ": ";
            dump_compact(os, e, indent + 2);
            first = false;
        }
        os << "\n" << std::string(static_cast<std::size_t>(indent), ' ') << "}";
    } else if (v.is_array() && !scalars(v)) {
        os << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << (i ? ",\n" : "") << pad;
            dump_compact(os, v[i], indent + 2);
        }
        os << "\n" << std::string(static_cast<std::size_t>(indent), ' ') << "]";
    } else {
        os << v.dump();
    }
}

} // namespace detail

// Pretty JSON with each matrix row on one line.
inline std::string dump_json(const json& v) {
    std::ostringstream os;
    detail::dump_compact(os, v, 0);
    return os.str();
}

inline void write_system_file(const std::string& path, const SystemFile& sf) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << dump_json(system_to_json(sf)) << "\n";
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Header t,y1..yk,jump with k the largest state dimension; cells past a
// row's dimension stay empty. jump is 0 for ordinary rows and 1 / 2 for the
// pre / post rows of an initial jump.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    Eigen::Index k = 0;
    for (const auto& s : tr.states) k = std::max(k, s.size());
    if (tr.jump) k = std::max(k, tr.jump->first.size());
    os << "t";
    for (Eigen::Index i = 0; i < k; ++i) os << ",y" << (i + 1);
    os << ",jump\n";
    auto row = [&](double t, const VecD& y, int flag) {
        os << format_double(t);
        for (Eigen::Index i = 0; i < k; ++i) {
            os << ",";
            if (i < y.size()) os << format_double(y(i));
        }
        os << "," << flag << "\n";
    };
    for (std::size_t s = 0; s < tr.states.size(); ++s) {
        if (s == 0 && tr.jump) {
            row(tr.times[0], tr.jump->first, 1);
            row(tr.times[0], tr.jump->second, 2);
            continue;
        }
        row(tr.times[s], tr.states[s], 0);
    }
}

// Piecewise-constant input from rows "t,u1,...,um" (header optional).
inline InputSignal read_input_csv(const std::string& path, Eigen::Index m) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input CSV '" + path + "'");
    std::vector<double> ts;
    std::vector<VecD> us;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (lineno == 1 && !cells.empty() && cells[0].find_first_of("0123456789.-+") != 0) continue; // header
        if (static_cast<Eigen::Index>(cells.size()) != m + 1)
            throw ParseError(path + " line " + std::to_string(lineno) + ": expected " + std::to_string(m + 1) +
                             " columns, got " + std::to_string(cells.size()));
        VecD u(m);
        double t = 0.0;
        try {
            std::size_t used = 0;
            t = std::stod(cells[0], &used);
            for (Eigen::Index i = 0; i < m; ++i) u(i) = std::stod(cells[static_cast<std::size_t>(i + 1)]);
        } catch (const std::exception&) {
            throw ParseError(path + " line " + std::to_string(lineno) + ": malformed number");
        }
        if (!ts.empty() && t <= ts.back())
            throw ParseError(path + " line " + std::to_string(lineno) + ": times must increase");
        ts.push_back(t);
        us.push_back(u);
    }
    if (ts.empty()) throw ParseError(path + ": no input rows");
    return [ts, us](double t) {
        auto it = std::upper_bound(ts.begin(), ts.end(), t + 1e-12);
        if (it == ts.begin()) return us.front();
        return us[static_cast<std::size_t>(it - ts.begin() - 1)];
    };
}

} // namespace orkit
