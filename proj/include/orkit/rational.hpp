#pragma once

#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Core>

#include "errors.hpp"

namespace orkit {

// Arbitrary-precision rational number.
//
// Thin value wrapper around boost's cpp_rational with expression templates
// disabled, so that it can serve as an Eigen scalar type.
class Rational {
public:
    using Integer = boost::multiprecision::cpp_int;
    using Impl = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

    Rational() = default;
    template <std::integral I>
    Rational(I i) : v_(i) {}
    Rational(std::int64_t num, std::int64_t den) : v_(Impl(num) / Impl(den)) {
        if (den == 0) throw Error("rational with zero denominator");
    }
    Rational(const Integer& num, const Integer& den) : v_(num, den) {}
    explicit Rational(Impl v) : v_(std::move(v)) {}

    const Impl& impl() const { return v_; }
    Integer numerator() const { return boost::multiprecision::numerator(v_); }
    Integer denominator() const { return boost::multiprecision::denominator(v_); }

    bool is_zero() const { return v_.is_zero(); }
    bool is_integer() const { return denominator() == 1; }
    int sign() const { return v_.sign(); }
    double to_double() const { return v_.convert_to<double>(); }

    // "p/q" or "p"; always lowest terms.
    std::string str() const {
        if (is_integer()) return numerator().str();
        return numerator().str() + "/" + denominator().str();
    }

    Rational operator-() const { return Rational(-v_); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw Error("rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (a.v_ < b.v_) return std::strong_ordering::less;
        if (b.v_ < a.v_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    Impl v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

// Parses "p", "p/q", decimals ("0.225", "-1.5e-3"). Decimals are converted
// exactly, so "0.1" is 1/10 rather than the nearest double.
inline Rational parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    std::string_view s = trim(text);
    if (s.empty()) throw ParseError("empty rational literal");

    auto parse_decimal = [&](std::string_view d) -> Rational {
        bool neg = false;
        if (!d.empty() && (d.front() == '+' || d.front() == '-')) {
            neg = d.front() == '-';
            d.remove_prefix(1);
        }
        std::int64_t exponent = 0;
        if (auto e = d.find_first_of("eE"); e != std::string_view::npos) {
            std::string exp_text(d.substr(e + 1));
            if (exp_text.empty()) throw ParseError("bad exponent in '" + std::string(text) + "'");
            std::size_t used = 0;
            try {
                exponent = std::stoll(exp_text, &used);
            } catch (const std::exception&) {
                throw ParseError("bad exponent in '" + std::string(text) + "'");
            }
            if (used != exp_text.size() || std::llabs(exponent) > 400)
                throw ParseError("bad exponent in '" + std::string(text) + "'");
            d = d.substr(0, e);
        }
        std::string digits;
        bool seen_point = false;
        for (char c : d) {
            if (c == '.') {
                if (seen_point) throw ParseError("bad number '" + std::string(text) + "'");
                seen_point = true;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                digits.push_back(c);
                if (seen_point) --exponent;
            } else {
                throw ParseError("bad number '" + std::string(text) + "'");
            }
        }
        if (digits.empty()) throw ParseError("bad number '" + std::string(text) + "'");
        // A leading zero would select octal in the string constructor.
        digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
        Rational::Integer mantissa(digits);
        Rational::Integer scale = boost::multiprecision::pow(Rational::Integer(10),
                                                             static_cast<unsigned>(std::llabs(exponent)));
        Rational r = exponent >= 0 ? Rational(mantissa * scale, 1) : Rational(mantissa, scale);
        return neg ? -r : r;
    };

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(trim(s.substr(0, slash)));
        Rational den = parse_decimal(trim(s.substr(slash + 1)));
        if (den.is_zero()) throw ParseError("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    return parse_decimal(s);
}

// Best rational approximation with denominator <= max_den (continued
// fractions). Exact for doubles that already are such fractions.
inline Rational rationalize(double x, std::int64_t max_den = 1000000) {
    if (!std::isfinite(x)) throw Error("cannot rationalize a non-finite value");
    const bool neg = x < 0;
    double rem = std::fabs(x);
    Rational::Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(rem);
        Rational::Integer ai(static_cast<long long>(a));
        Rational::Integer p2 = ai * p1 + p0;
        Rational::Integer q2 = ai * q1 + q0;
        if (q2 > max_den) {
            // Semiconvergent check: the largest admissible partial quotient.
            Rational::Integer k = (Rational::Integer(max_den) - q0) / q1;
            Rational::Integer ps = k * p1 + p0, qs = k * q1 + q0;
            Rational cand_a(p1, q1), cand_b(ps, qs);
            const double ax = std::fabs(x);
            Rational best = std::fabs(cand_b.to_double() - ax) < std::fabs(cand_a.to_double() - ax)
                                ? cand_b
                                : cand_a;
            return neg ? -best : best;
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double frac = rem - a;
        if (frac < 1e-15 * std::max(1.0, rem)) break;
        rem = 1.0 / frac;
    }
    Rational r(p1, q1);
    return neg ? -r : r;
}

// True when rationalize() reproduces x exactly (no information lost).
inline bool rationalizes_exactly(double x, std::int64_t max_den = 1000000) {
    return rationalize(x, max_den).to_double() == x;
}

} // namespace orkit

namespace Eigen {
template <>
struct NumTraits<orkit::Rational> : GenericNumTraits<orkit::Rational> {
    using Real = orkit::Rational;
    using NonInteger = orkit::Rational;
    using Literal = orkit::Rational;
    using Nested = orkit::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 10,
        AddCost = 50,
        MulCost = 100
    };
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }
};
} // namespace Eigen
