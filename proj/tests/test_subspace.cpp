#include "support.hpp"

namespace orkit {
namespace {

using testing::q;
using testing::random_rational;
using testing::uniform_int;

TEST(Subspace, PerpAndSumDimensions) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = uniform_int(rng, 1, 7);
        const Subspace s = col_space(random_rational(rng, n, uniform_int(rng, 0, n), 2, 0.5));
        const DualSubspace sp = perp(s);
        EXPECT_EQ(s.dim() + sp.dim(), n);
        EXPECT_TRUE(is_zero_matrix(MatQ(sp.basis() * s.basis())));
        EXPECT_TRUE(perp(sp) == s);
        const Subspace t = col_space(random_rational(rng, n, uniform_int(rng, 0, n), 2, 0.5));
        // dim(S + T) + dim(S cap T) = dim S + dim T
        EXPECT_EQ((s + t).dim() + intersect(s, t).dim(), s.dim() + t.dim());
        EXPECT_TRUE(s.contains(intersect(s, t).basis()));
    }
}

TEST(Subspace, EqualityIgnoresBasisChoice) {
    const Subspace a = col_space(q({{1, 1}, {0, 1}, {0, 0}}));
    const Subspace b = col_space(q({{2, 0}, {1, 3}, {0, 0}}));
    EXPECT_TRUE(a == b);
    EXPECT_FALSE(a == col_space(q({{1}, {0}, {0}})));
    EXPECT_FALSE(a == Subspace::whole(3));
}

// dim A^-1(S) = dim ker A + dim(S cap Im A), and every basis vector maps into S.
TEST(Subspace, PreimageMatchesDimensionFormula) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = uniform_int(rng, 1, 6);
        const MatQ a = random_rational(rng, n, n, 1, 0.4);
        const Subspace s = col_space(random_rational(rng, n, uniform_int(rng, 0, n), 1, 0.6));
        const Subspace pre = preimage(a, s);
        const Subspace im = col_space(a);
        EXPECT_EQ(pre.dim(), (n - rank(a)) + intersect(s, im).dim());
        if (pre.dim()) EXPECT_TRUE(s.contains(MatQ(a * pre.basis())));
    }
}

TEST(Subspace, AInvarianceCertificates) {
    const LinearSystem s5 = testing::system_525();
    auto cert = is_A_invariant(s5.h, s5.a);
    ASSERT_TRUE(cert.has_value());
    EXPECT_TRUE(cert->xi == q({{0, -1}, {-1, -1}}));
    EXPECT_EQ(cert->residual, 0.0);
    const LinearSystem s6 = testing::system_612();
    EXPECT_FALSE(is_A_invariant(s6.h, s6.a).has_value());
}

TEST(Subspace, KrylovRowsSpanTheClosure) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = uniform_int(rng, 1, 6);
        const MatQ a = random_rational(rng, n, n, 2, 0.4);
        const MatQ h = random_rational(rng, uniform_int(rng, 1, 3), n, 2, 0.6);
        const MatQ k = krylov_rows(h, a);
        const DualSubspace cl = a_invariant_closure(row_space(h), a);
        EXPECT_TRUE(row_space(k) == cl);
        EXPECT_EQ(k.rows(), cl.dim());
        EXPECT_TRUE(cl.dim() == 0 || is_A_invariant(cl, a).has_value());
    }
}

TEST(Subspace, WonhamTraceOnSixStateExample) {
    const LinearSystem sys = testing::system_612();
    const AbInvariantTrace tr = largest_ab_invariant_trace(sys.a, sys.b, perp(row_space(sys.h)));
    EXPECT_EQ(tr.v0.dim(), 5);
    ASSERT_EQ(tr.steps.size(), 3U);
    EXPECT_EQ(tr.steps[0].v.dim(), 4);
    EXPECT_EQ(tr.steps[1].v.dim(), 3);
    const MatQ v2 = q({{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {1, 0, 0}, {0, 0, -1}, {0, 1, 0}});
    EXPECT_TRUE(tr.result == col_space(v2));
    const MatQ f = q({{-1, 0, 2, -1, 2, -1}});
    EXPECT_TRUE(tr.result.contains(MatQ((sys.a + sys.b * f) * v2)));
    auto own = friend_feedback(sys.a, sys.b, tr.result);
    ASSERT_TRUE(own.has_value());
    EXPECT_TRUE(tr.result.contains(MatQ((sys.a + sys.b * (*own)) * tr.result.basis())));
}

// Plants a known (A,B)-invariant subspace W inside ker H: the largest one
// must contain W, be (A,B)-invariant itself and lie in ker H.
TEST(Subspace, LargestAbInvariantContainsPlantedSubspace) {
    std::mt19937_64 rng(44);
    int checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const int n = uniform_int(rng, 2, 6), m = uniform_int(rng, 1, 2), k = uniform_int(rng, 1, n - 1);
        const MatQ t = random_rational(rng, n, n, 2);
        auto t_inv = inverse(t);
        if (!t_inv) continue;
        MatQ acl = random_rational(rng, n, n, 2, 0.6);
        acl.bottomLeftCorner(n - k, k).setZero();
        const MatQ b = random_rational(rng, n, m, 2, 0.7);
        const MatQ f = random_rational(rng, m, n, 2, 0.5);
        const MatQ a = t * acl * (*t_inv) - b * f;
        const MatQ w = t.leftCols(k);
        const DualSubspace wp = perp(col_space(w));
        const MatQ h = wp.dim() ? MatQ(random_rational(rng, uniform_int(rng, 1, 2), wp.dim(), 2) * wp.basis())
                                : MatQ(MatQ::Zero(1, n));
        const Subspace v = largest_ab_invariant_in(a, b, perp(row_space(h)));
        EXPECT_TRUE(v.contains(w));
        EXPECT_TRUE(is_zero_matrix(MatQ(h * v.basis())) || v.dim() == 0);
        auto fr = friend_feedback(a, b, v);
        ASSERT_TRUE(fr.has_value());
        if (v.dim()) EXPECT_TRUE(v.contains(MatQ((a + b * (*fr)) * v.basis())));
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(Subspace, AbInvariantClosureAndCertificate) {
    const LinearSystem sys = testing::system_612();
    const AbClosure cl = ab_invariant_closure(row_space(sys.h), sys.a, sys.b);
    EXPECT_EQ(cl.closure.dim(), 3);
    EXPECT_TRUE(cl.closure.contains(sys.h));
    auto cert = is_ab_invariant(cl.closure.basis(), sys.a, sys.b);
    ASSERT_TRUE(cert.has_value());
    EXPECT_EQ(cert->residual, 0.0);
    EXPECT_FALSE(is_ab_invariant(sys.h, sys.a, sys.b).has_value());
}

TEST(Subspace, ShapeErrorsAreReported) {
    EXPECT_THROW(preimage(q({{1, 2}}), Subspace::whole(1)), ShapeError);
    EXPECT_THROW(is_A_invariant(q({{1, 0, 0}}), q({{1, 0}, {0, 1}})), ShapeError);
}

} // namespace
} // namespace orkit
