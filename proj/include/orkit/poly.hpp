#pragma once

// Sparse multivariate polynomials with rational coefficients.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace orkit {

using Exponents = std::vector<int>;

class Poly {
public:
    using Terms = std::map<Exponents, Rational>;

    explicit Poly(int nvars = 0) : n_(nvars) {}
    Poly(int nvars, const Rational& c) : n_(nvars) {
        if (!c.is_zero()) terms_[Exponents(static_cast<std::size_t>(nvars), 0)] = c;
    }

    static Poly constant(int nvars, const Rational& c) { return Poly(nvars, c); }
    // x_i, zero-based index.
    static Poly var(int nvars, int i) {
        if (i < 0 || i >= nvars) throw ShapeError("variable index out of range");
        Exponents e(static_cast<std::size_t>(nvars), 0);
        e[static_cast<std::size_t>(i)] = 1;
        return monomial(nvars, e, Rational(1));
    }
    static Poly monomial(int nvars, const Exponents& e, const Rational& c) {
        if (static_cast<int>(e.size()) != nvars) throw ShapeError("exponent tuple has wrong length");
        Poly p(nvars);
        if (!c.is_zero()) p.terms_[e] = c;
        return p;
    }

    int nvars() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
        return d;
    }
    bool is_constant() const { return degree() <= 0; }

    Rational constant_term() const {
        auto it = terms_.find(Exponents(static_cast<std::size_t>(n_), 0));
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Poly& operator+=(const Poly& o) {
        check(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Poly operator-() const {
        Poly r(n_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check(b);
        Poly r(a.n_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(ea.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    friend Poly operator*(const Rational& s, const Poly& p) {
        Poly r(p.n_);
        if (s.is_zero()) return r;
        for (const auto& [e, c] : p.terms_) r.terms_[e] = s * c;
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly pow(int k) const {
        if (k < 0) throw Error("negative polynomial power");
        Poly r = constant(n_, 1), base = *this;
        while (k) {
            if (k & 1) r *= base;
            base *= base;
            k >>= 1;
        }
        return r;
    }

    // d/dx_i, zero-based.
    Poly derivative(int i) const {
        Poly r(n_);
        for (const auto& [e, c] : terms_) {
            const int k = e[static_cast<std::size_t>(i)];
            if (k == 0) continue;
            Exponents d = e;
            d[static_cast<std::size_t>(i)] = k - 1;
            r.add_term(d, c * Rational(k));
        }
        return r;
    }

    Rational eval(const std::vector<Rational>& x) const {
        if (static_cast<int>(x.size()) != n_) throw ShapeError("eval: point has wrong dimension");
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            acc += t;
        }
        return acc;
    }

    template <class V>
    double eval_double(const V& x) const {
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c.to_double();
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) t *= std::pow(static_cast<double>(x[static_cast<Eigen::Index>(i)]), e[i]);
            acc += t;
        }
        return acc;
    }

    // "coef*x1^a1*...*xn^an" terms, highest total degree first.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::vector<std::pair<Exponents, Rational>> ts(terms_.begin(), terms_.end());
        std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
            const int da = std::accumulate(a.first.begin(), a.first.end(), 0);
            const int db = std::accumulate(b.first.begin(), b.first.end(), 0);
            if (da != db) return da > db;
            return a.first > b.first;
        });
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : ts) {
            const bool neg = c.sign() < 0;
            const Rational mag = neg ? -c : c;
            if (first)
                os << (neg ? "-" : "");
            else
                os << (neg ? " - " : " + ");
            first = false;
            std::string mono;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += "x" + std::to_string(i + 1);
                if (e[i] > 1) mono += "^" + std::to_string(e[i]);
            }
            if (mono.empty())
                os << mag;
            else if (mag == Rational(1))
                os << mono;
            else
                os << mag << "*" << mono;
        }
        return os.str();
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }
    friend std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

private:
    void check(const Poly& o) const {
        if (o.n_ != n_) throw ShapeError("polynomials over different variable counts");
    }
    void add_term(const Exponents& e, const Rational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    int n_;
    Terms terms_;
};

// All exponent tuples of total degree <= d, ordered by ascending degree.
inline std::vector<Exponents> monomials_up_to(int nvars, int d) {
    std::vector<Exponents> out;
    Exponents cur(static_cast<std::size_t>(nvars), 0);
    for (int deg = 0; deg <= d; ++deg) {
        // Enumerate compositions of deg into nvars parts.
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == nvars - 1) {
                cur[static_cast<std::size_t>(i)] = left;
                out.push_back(cur);
                return;
            }
            for (int k = left; k >= 0; --k) {
                cur[static_cast<std::size_t>(i)] = k;
                rec(i + 1, left - k);
            }
        };
        if (nvars == 0) {
            if (deg == 0) out.emplace_back();
            continue;
        }
        rec(0, deg);
    }
    return out;
}

namespace detail {

// Recursive-descent parser for sums/products/powers of rationals and x1..xn.
class PolyParser {
public:
    PolyParser(std::string_view text, int nvars) : s_(text), n_(nvars) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("polynomial '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + what);
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        Poly acc(n_);
        bool neg = false;
        skip_ws();
        if (eat('-'))
            neg = true;
        else
            eat('+');
        Poly t = term();
        acc = neg ? -t : t;
        for (;;) {
            if (eat('+'))
                acc += term();
            else if (eat('-'))
                acc -= term();
            else
                return acc;
        }
    }

    Poly term() {
        Poly acc = factor();
        for (;;) {
            skip_ws();
            if (eat('*')) {
                acc *= factor();
            } else if (pos_ < s_.size() && s_[pos_] == '/') {
                ++pos_;
                Poly d = factor();
                if (!d.is_constant() || d.is_zero()) fail("division only by nonzero constants");
                acc = (Rational(1) / d.constant_term()) * acc;
            } else {
                return acc;
            }
        }
    }

    Poly factor() {
        Poly base = atom();
        if (eat('^')) {
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected a nonnegative integer exponent");
            base = base.pow(std::stoi(std::string(s_.substr(start, pos_ - start))));
        }
        return base;
    }

    Poly atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        if (c == '-') {
            ++pos_;
            return -factor();
        }
        if (c == 'x') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected a variable index after 'x'");
            const int idx = std::stoi(std::string(s_.substr(start, pos_ - start)));
            if (idx < 1 || idx > n_) fail("variable x" + std::to_string(idx) + " out of range");
            return Poly::var(n_, idx - 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
                ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                std::size_t q = pos_ + 1;
                if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
                if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                    pos_ = q;
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                }
            }
            return Poly::constant(n_, parse_rational(s_.substr(start, pos_ - start)));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    int n_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Poly parse_poly(std::string_view text, int nvars) { return detail::PolyParser(text, nvars).parse(); }

} // namespace orkit
