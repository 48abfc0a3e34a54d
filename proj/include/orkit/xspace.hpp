#pragma once

// The mixed-dimensional space R^inf = union of all R^n: semi-tensor
// addition, the normalized inner product, and cross-dimensional projection.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>

#include "errors.hpp"
#include "matrix.hpp"

namespace orkit {

inline constexpr double kEpsEquivalence = 1e-9;

// lcm on 64-bit integers; throws DimensionOverflow instead of wrapping.
inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    if (a <= 0 || b <= 0) throw ShapeError("dimensions must be positive");
    const std::int64_t g = std::gcd(a, b);
    const std::int64_t q = a / g;
    if (q > std::numeric_limits<std::int64_t>::max() / b)
        throw DimensionOverflow("lcm(" + std::to_string(a) + ", " + std::to_string(b) +
                                ") exceeds the 64-bit range");
    return q * b;
}

namespace detail {

// Length of the intersection of [i*a, (i+1)*a) and [j*b, (j+1)*b).
inline std::int64_t block_overlap(std::int64_t i, std::int64_t a, std::int64_t j, std::int64_t b) {
    const std::int64_t lo = std::max(i * a, j * b);
    const std::int64_t hi = std::min((i + 1) * a, (j + 1) * b);
    return hi > lo ? hi - lo : 0;
}

} // namespace detail

// A real vector together with its dimension, i.e. an element of R^inf.
class DimVector {
public:
    DimVector() : v_(VecD::Zero(1)) {}
    explicit DimVector(VecD v) : v_(std::move(v)) {
        if (v_.size() < 1) throw ShapeError("DimVector needs dimension >= 1");
    }
    DimVector(std::initializer_list<double> xs) : v_(static_cast<Eigen::Index>(xs.size())) {
        if (xs.size() < 1) throw ShapeError("DimVector needs dimension >= 1");
        Eigen::Index i = 0;
        for (double x : xs) v_(i++) = x;
    }

    static DimVector zeros(std::int64_t n) { return DimVector(VecD::Zero(n)); }

    std::int64_t dim() const { return v_.size(); }
    const VecD& entries() const { return v_; }
    double operator[](Eigen::Index i) const { return v_(i); }

    // x (x) 1_k
    DimVector blow_up(std::int64_t k) const {
        VecD out(v_.size() * k);
        for (Eigen::Index i = 0; i < v_.size(); ++i) out.segment(i * k, k).setConstant(v_(i));
        return DimVector(std::move(out));
    }

    DimVector scaled(double s) const { return DimVector(v_ * s); }

private:
    VecD v_;
};

// x (+) y = x (x) 1_{t/p} + y (x) 1_{t/q}, t = lcm(p, q).
inline DimVector stp_add(const DimVector& x, const DimVector& y) {
    const std::int64_t t = checked_lcm(x.dim(), y.dim());
    return DimVector(x.blow_up(t / x.dim()).entries() + y.blow_up(t / y.dim()).entries());
}

inline DimVector stp_sub(const DimVector& x, const DimVector& y) { return stp_add(x, y.scaled(-1.0)); }

inline double inner(const DimVector& x, const DimVector& y) {
    const std::int64_t t = checked_lcm(x.dim(), y.dim());
    const std::int64_t kx = t / x.dim(), ky = t / y.dim();
    // Sum over the common refinement without materializing the blow-ups.
    double acc = 0.0;
    for (std::int64_t s = 0; s < t; ++s) acc += x[s / kx] * y[s / ky];
    return acc / static_cast<double>(t);
}

inline double norm(const DimVector& x) { return std::sqrt(std::max(0.0, inner(x, x))); }

inline double distance(const DimVector& x, const DimVector& y) { return norm(stp_sub(x, y)); }

inline bool equivalent(const DimVector& x, const DimVector& y, double eps = kEpsEquivalence) {
    return distance(x, y) <= eps;
}

// Pi^m_n = (n/t)(I_n (x) 1^T_{t/n})(I_m (x) 1_{t/m}): the n x m matrix mapping
// xi in R^m to its closest point in R^n under the R^inf distance.
template <class T = double>
Mat<T> projection_matrix(std::int64_t m, std::int64_t n) {
    if (m < 1 || n < 1) throw ShapeError("projection_matrix: dimensions must be >= 1");
    const std::int64_t t = checked_lcm(m, n);
    const std::int64_t a = t / n, b = t / m;
    Mat<T> out(n, m);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < m; ++j) {
            const std::int64_t ov = detail::block_overlap(i, a, j, b);
            if constexpr (std::is_same_v<T, Rational>)
                out(i, j) = Rational(n * ov, t);
            else
                out(i, j) = static_cast<T>(n * ov) / static_cast<T>(t);
        }
    return out;
}

inline DimVector project(const DimVector& xi, std::int64_t n) {
    return DimVector(projection_matrix(xi.dim(), n) * xi.entries());
}

} // namespace orkit
