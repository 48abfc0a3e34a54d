#include "support.hpp"

namespace orkit {
namespace {

using testing::q;
using testing::random_rational;
using testing::uniform_int;

TEST(ORSystem, ExactOnInvariantObservers) {
    const LinearSystem sys = testing::system_525();
    auto o = or_exact(sys);
    ASSERT_TRUE(o.has_value());
    EXPECT_TRUE(o->l == q({{0, -1}, {-1, -1}}));
    EXPECT_TRUE(o->n == q({{1}, {-1}}));
    EXPECT_TRUE(exactness_residual(sys, *o).zero());
    const ORSystem pinv = or_pseudoinverse(sys);
    EXPECT_TRUE(pinv.exact);
    EXPECT_TRUE(pinv.l == o->l);
}

TEST(ORSystem, ExtendedOnSixStateExample) {
    const LinearSystem sys = testing::system_612();
    EXPECT_FALSE(or_exact(sys).has_value());
    EXPECT_FALSE(or_pseudoinverse(sys).exact);
    const ORSystem o = or_extended(sys);
    EXPECT_EQ(o.dim(), 5);
    EXPECT_TRUE(exactness_residual(sys, o).zero());
    EXPECT_TRUE(MatQ(o.selector * (*o.observer)) == sys.h);
    EXPECT_TRUE(o.selector == q({{1, 0, 0, 0, 0}}));
}

TEST(ORSystem, FeedbackIsSmallerThanExtended) {
    const LinearSystem sys = testing::system_612();
    const ORSystem fb = or_feedback(sys);
    EXPECT_EQ(fb.dim(), 3);
    ASSERT_TRUE(fb.feedback.has_value());
    EXPECT_TRUE(exactness_residual(sys, fb).zero());
    EXPECT_TRUE(MatQ(fb.selector * (*fb.observer)) == sys.h);
}

TEST(ORSystem, ProjectionUsesBridge) {
    const SOSystem so{q({{1, 0, 2, 0, 1}, {0, 1, 0, 1, 0}}), q({{1}, {0}})};
    const ORSystem o = or_projection(so);
    EXPECT_EQ(o.dim(), 2);
    EXPECT_TRUE(o.l == MatQ(so.m * projection_matrix<Rational>(2, 5)));
    const ORSystem d = or_projection(so, Bridge::Kind::standard);
    EXPECT_TRUE(d.l == MatQ(so.m * standard_bridge_matrix<Rational>(5, 2)));
    EXPECT_EQ(o.init, InitRule::project_output);
}

TEST(ORSystem, SingularBridgeInvertibleAndSingularCases) {
    const MatQ e = q({{1, 0, 0}, {0, 1, 0}});
    const SingularBridge inv = singular_bridge(e, q({{0, 1, 1}}), q({{2}}));
    ASSERT_TRUE(inv.invertible);
    const MatQ theta = vstack(e, q({{0, 1, 1}}));
    EXPECT_TRUE(MatQ(theta * inv.theta_pinv) == MatQ(MatQ::Identity(3, 3)));
    EXPECT_TRUE(inv.psi == MatQ(inv.theta_pinv.leftCols(2)));
    ASSERT_TRUE(inv.d_tilde.has_value());
    EXPECT_TRUE(*inv.d_tilde == MatQ(-inv.theta_pinv.rightCols(1) * q({{2}})));
    const SingularBridge sing = singular_bridge(e, q({{1, 1, 0}}));
    EXPECT_FALSE(sing.invertible);

    SingularSystem ss{e, q({{0, 1, 1}}), q({{1, 2, 3}, {0, 1, 0}}), q({{1}, {0}}), std::nullopt};
    const ORSystem o = or_singular(ss);
    EXPECT_TRUE(o.exact);
    EXPECT_TRUE(o.l == MatQ(ss.a * inv.psi));
    EXPECT_THROW(singular_bridge(e, q({{1, 0, 0}, {0, 0, 1}})), ShapeError);
}

// Minimal dimension equals the rank of the block Hankel matrix, and the
// Markov parameters are preserved.
TEST(ORSystem, KalmanMinimalPreservesMarkovParameters) {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = uniform_int(rng, 1, 6), m = uniform_int(rng, 1, 2), p = uniform_int(rng, 1, 2);
        const LinearSystem sys{random_rational(rng, n, n, 2, 0.4), random_rational(rng, n, m, 1, 0.4),
                               random_rational(rng, p, n, 1, 0.4)};
        const LinearSystem km = kalman_minimal(sys);
        const auto mk = markov_parameters(sys, 2 * n + 2);
        const auto mm = markov_parameters(km, 2 * n + 2);
        for (std::size_t k = 0; k < mk.size(); ++k) ASSERT_TRUE(mk[k] == mm[k]) << "k = " << k;
        MatQ hankel(p * n, m * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) hankel.block(p * i, m * j, p, m) = mk[static_cast<std::size_t>(i + j)];
        const Eigen::Index r = rank(hankel);
        EXPECT_EQ(r == 0 ? 1 : r, km.n());
    }
}

TEST(ORSystem, KalmanMinimalOfSixStateExample) {
    const LinearSystem km = kalman_minimal(testing::system_612());
    EXPECT_EQ(km.n(), 3);
}

TEST(ORSystem, DisturbanceDecoupling) {
    const LinearSystem sys = testing::system_612();
    VecQ e4 = VecQ::Zero(6);
    e4(3) = 1;
    EXPECT_TRUE(ddp_check(sys, {e4}));
    VecQ e1 = VecQ::Zero(6);
    e1(0) = 1;
    EXPECT_FALSE(ddp_check(sys, {e1}));
    EXPECT_FALSE(ddp_check(sys, {e4, e1}));
    EXPECT_THROW(ddp_check(sys, {VecQ(VecQ::Zero(3))}), ShapeError);
}

TEST(ORSystem, DimensionOrderingOnRandomSystems) {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = uniform_int(rng, 1, 8), m = uniform_int(rng, 1, 2), p = uniform_int(rng, 1, 3);
        LinearSystem sys{random_rational(rng, n, n, 2, 0.35), random_rational(rng, n, m, 1, 0.5),
                         random_rational(rng, p, n, 1, 0.5)};
        if (is_zero_matrix(sys.h)) sys.h(0, 0) = 1;
        const ORSystem ext = or_extended(sys);
        const ORSystem fb = or_feedback(sys);
        ASSERT_LE(fb.dim(), ext.dim());
        ASSERT_LE(ext.dim(), n);
        ASSERT_TRUE(exactness_residual(sys, ext).zero());
        ASSERT_TRUE(exactness_residual(sys, fb).zero());
        ASSERT_TRUE(MatQ(fb.selector * (*fb.observer)) == sys.h);
    }
}

TEST(ORSystem, ValidationRejectsBadShapes) {
    EXPECT_THROW(LinearSystem(q({{1, 2}}), q({{1}}), q({{1, 0}})).validate(), ShapeError);
    EXPECT_THROW(or_kind_from_string("bogus"), ParseError);
    EXPECT_EQ(or_kind_from_string("extended"), ORKind::extended);
}

} // namespace
} // namespace orkit
