#include "support.hpp"

#include <cmath>
#include <numbers>

namespace orkit {
namespace {

using testing::q;
using testing::random_matrix;
using testing::random_rational;

TEST(Rational, ParsesIntegersDecimalsAndFractions) {
    EXPECT_EQ(parse_rational("3"), Rational(3));
    EXPECT_EQ(parse_rational("-0.225"), Rational(-9, 40));
    EXPECT_EQ(parse_rational("6/8"), Rational(3, 4));
    EXPECT_EQ(parse_rational(" -1/3 "), Rational(-1, 3));
    EXPECT_EQ(parse_rational("1.5e-2"), Rational(3, 200));
    EXPECT_EQ(parse_rational("2E3"), Rational(2000));
}

TEST(Rational, RejectsMalformedLiterals) {
    for (const char* bad : {"", "abc", "1/0", "1..2", "1e", "--1", "3/x"})
        EXPECT_THROW(parse_rational(bad), ParseError) << bad;
}

TEST(Rational, StringFormIsIntegerOrFraction) {
    EXPECT_EQ(Rational(4).str(), "4");
    EXPECT_EQ(Rational(-6, 4).str(), "-3/2");
}

TEST(Rational, RationalizeRecoversShortFractions) {
    EXPECT_EQ(rationalize(0.1), Rational(1, 10));
    EXPECT_EQ(rationalize(-0.375), Rational(-3, 8));
    EXPECT_EQ(rationalize(1.0 / 3.0), Rational(1, 3));
    EXPECT_TRUE(rationalizes_exactly(0.25));
    EXPECT_FALSE(rationalizes_exactly(std::numbers::pi));
    const Rational r = rationalize(std::numbers::pi);
    EXPECT_LE(r.denominator(), 1000000);
    EXPECT_NEAR(r.to_double(), std::numbers::pi, 1e-11);
    EXPECT_THROW(rationalize(std::nan("")), Error);
}

TEST(ExactLinearAlgebra, RrefOfKnownMatrix) {
    const Echelon e = rref(q({{1, 2, 3}, {2, 4, 7}, {1, 2, 4}}));
    EXPECT_EQ(e.rank(), 2);
    EXPECT_EQ(e.pivots, (std::vector<int>{0, 2}));
    EXPECT_TRUE(e.reduced == q({{1, 2, 0}, {0, 0, 1}, {0, 0, 0}}));
}

TEST(ExactLinearAlgebra, RankAgreesWithSvdOnConstructedMatrices) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int r = testing::uniform_int(rng, 0, 4), m = testing::uniform_int(rng, 1, 6),
                  n = testing::uniform_int(rng, 1, 6);
        const MatQ a = random_rational(rng, m, r) * random_rational(rng, r, n);
        EXPECT_EQ(rank(a), numerical_rank(to_double(a)));
        EXPECT_LE(rank(a), std::min({r, m, n}));
    }
}

TEST(ExactLinearAlgebra, NullspaceIsAnnihilatedAndComplementary) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = testing::uniform_int(rng, 1, 5), n = testing::uniform_int(rng, 1, 7);
        const MatQ a = random_rational(rng, m, n, 2, 0.6);
        const MatQ z = nullspace(a);
        EXPECT_EQ(z.cols(), n - rank(a));
        EXPECT_TRUE(is_zero_matrix(MatQ(a * z)));
        EXPECT_EQ(rank(z), z.cols());
    }
}

TEST(ExactLinearAlgebra, SolveDetectsInconsistency) {
    const MatQ a = q({{1, 1}, {2, 2}});
    EXPECT_FALSE(solve(a, q({{1}, {3}})).has_value());
    auto x = solve(a, q({{2}, {4}}));
    ASSERT_TRUE(x.has_value());
    EXPECT_TRUE(MatQ(a * *x) == q({{2}, {4}}));
    EXPECT_FALSE(inverse(a).has_value());
    EXPECT_THROW(solve(a, q({{1}})), ShapeError);
}

TEST(ExactLinearAlgebra, PseudoInverseSatisfiesPenroseAndMatchesSvd) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        const int r = testing::uniform_int(rng, 1, 3), m = testing::uniform_int(rng, 1, 5),
                  n = testing::uniform_int(rng, 1, 5);
        const MatQ a = random_rational(rng, m, r) * random_rational(rng, r, n);
        const MatQ x = pseudo_inverse(a);
        EXPECT_TRUE(MatQ(a * x * a) == a);
        EXPECT_TRUE(MatQ(x * a * x) == x);
        EXPECT_TRUE(MatQ((a * x).transpose()) == MatQ(a * x));
        EXPECT_TRUE(MatQ((x * a).transpose()) == MatQ(x * a));
        if (x.size()) {
            const MatD svd = pseudo_inverse(to_double(a));
            EXPECT_LT((svd - to_double(x)).norm(), 1e-10);
        }
    }
}

TEST(ExactLinearAlgebra, RankFactorizationReproducesMatrix) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const MatQ a = random_rational(rng, 4, 6, 2, 0.5);
        const RankFactorization f = rank_factorization(a);
        EXPECT_TRUE(MatQ(f.left * f.right) == a);
        EXPECT_EQ(f.left.cols(), rank(a));
    }
}

TEST(ExactLinearAlgebra, RationalizeMatrixReportsLoss) {
    MatD m(1, 2);
    m << 0.5, std::numbers::e;
    const RationalizeResult r = rationalize(m);
    EXPECT_EQ(r.value(0, 0), Rational(1, 2));
    EXPECT_TRUE(r.lossy);
}

// --- mixed-dimensional vectors ---

TEST(XSpace, LcmOverflowIsReported) {
    EXPECT_EQ(checked_lcm(4, 6), 12);
    EXPECT_THROW(checked_lcm(std::int64_t{1} << 40, (std::int64_t{1} << 40) - 1), DimensionOverflow);
}

TEST(XSpace, InnerProductMatchesKroneckerExpansion) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = testing::uniform_int(rng, 1, 7), r = testing::uniform_int(rng, 1, 7);
        const DimVector x(testing::random_vector(rng, p)), y(testing::random_vector(rng, r));
        const std::int64_t t = std::lcm(p, r);
        const double oracle = x.blow_up(t / p).entries().dot(y.blow_up(t / r).entries()) / static_cast<double>(t);
        EXPECT_NEAR(inner(x, y), oracle, 1e-13);
        EXPECT_EQ(stp_add(x, y).dim(), t);
    }
}

TEST(XSpace, BlowUpIsEquivalent) {
    const DimVector x{1.0, -2.0, 0.5};
    EXPECT_TRUE(equivalent(x, x.blow_up(4)));
    EXPECT_NEAR(distance(x, x.blow_up(3)), 0.0, 1e-15);
    EXPECT_FALSE(equivalent(x, DimVector{1.0, -2.0, 0.6}));
    EXPECT_NEAR(norm(DimVector{3.0, 4.0}), std::sqrt(12.5), 1e-15);
}

// Least-squares oracle: min over x in R^n of |(I_n (x) 1_{t/n}) x - xi (x) 1_{t/m}|.
TEST(XSpace, ProjectionIsLeastSquaresMinimizer) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = testing::uniform_int(rng, 1, 9), n = testing::uniform_int(rng, 1, 9);
        const DimVector xi(testing::random_vector(rng, m));
        const std::int64_t t = std::lcm(m, n);
        MatD e = MatD::Zero(t, n);
        for (std::int64_t s = 0; s < t; ++s) e(s, s / (t / n)) = 1.0;
        const VecD oracle = e.colPivHouseholderQr().solve(xi.blow_up(t / m).entries());
        const DimVector x0 = project(xi, n);
        EXPECT_LT((x0.entries() - oracle).norm(), 1e-12);
        // No random competitor gets closer.
        const DimVector other(VecD(oracle + 1e-3 * testing::random_vector(rng, n)));
        EXPECT_LE(distance(xi, x0), distance(xi, other) + 1e-15);
    }
}

TEST(XSpace, ProjectionResidualIsOrthogonal) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = testing::uniform_int(rng, 1, 12), n = testing::uniform_int(rng, 1, 12);
        const DimVector xi(testing::random_vector(rng, m));
        const DimVector x0 = project(xi, n);
        EXPECT_LT(std::fabs(inner(x0, stp_sub(xi, x0))), 1e-10);
        // Orthogonal to every y in R^n, not only to x0.
        const DimVector y(testing::random_vector(rng, n));
        EXPECT_LT(std::fabs(inner(y, stp_sub(xi, x0))), 1e-10);
    }
}

TEST(XSpace, ProjectionMatrixExactEntries) {
    const MatQ p = projection_matrix<Rational>(2, 5);
    MatQ expected = q({{1, 0}, {1, 0}, {0, 0}, {0, 1}, {0, 1}});
    expected(2, 0) = expected(2, 1) = Rational(1, 2);
    EXPECT_TRUE(p == expected);
    EXPECT_TRUE(MatQ(projection_matrix<Rational>(3, 3)) == MatQ(MatQ::Identity(3, 3)));
    EXPECT_THROW(projection_matrix(0, 2), ShapeError);
}

} // namespace
} // namespace orkit
