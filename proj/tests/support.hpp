#pragma once

#include <random>

#include <gtest/gtest.h>

#include <orkit/orkit.hpp>

namespace orkit::testing {

inline MatD random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    MatD m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

inline VecD random_vector(std::mt19937_64& rng, Eigen::Index n) { return random_matrix(rng, n, 1).col(0); }

// Small-integer rational matrix; density controls the share of nonzeros.
inline MatQ random_rational(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, int bound = 3, double density = 1.0) {
    std::uniform_int_distribution<int> d(-bound, bound);
    std::bernoulli_distribution keep(density);
    MatQ m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = keep(rng) ? Rational(d(rng)) : Rational(0);
    return m;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline MatQ q(std::initializer_list<std::initializer_list<long>> rows) {
    MatQ m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (long v : r) m(i, j++) = Rational(v);
        ++i;
    }
    return m;
}

inline LinearSystem system_612() {
    return LinearSystem{q({{0, 1, 0, 0, 0, 0},
                           {0, 0, 1, 0, 0, 0},
                           {1, 0, -1, 1, -2, 1},
                           {0, 0, 0, 0, 0, 0},
                           {0, 0, 0, 0, 1, 0},
                           {0, 0, 0, 0, 0, 0}}),
                        q({{0}, {0}, {1}, {0}, {0}, {0}}), q({{1, 0, 0, 0, 1, 0}})};
}

inline LinearSystem system_525() {
    return LinearSystem{q({{0, -2, 1, -6, -9},
                           {-1, -3, 4, -11, -13},
                           {4, 1, -1, 10, 12},
                           {2, 1, -2, 7, 7},
                           {-1, 0, 1, -2, 0}}),
                        q({{2}, {0}, {1}, {1}, {-1}}), q({{1, -1, 1, -2, 0}, {-1, 0, 0, -1, -2}})};
}

inline PolyAffineSystem system_710() {
    PolyAffineSystem s;
    s.nvars = 3;
    s.f = {parse_poly("x2 + x3 + x2^2", 3), parse_poly("x1 - x3 + x3^2", 3), parse_poly("x3 + x2^2", 3)};
    s.g = {{Poly(3), Poly::constant(3, 1), Poly(3)}};
    s.h = {parse_poly("x1 - x3", 3)};
    return s;
}

} // namespace orkit::testing
