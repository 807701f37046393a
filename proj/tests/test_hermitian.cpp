#include "heis/hermitian.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace heis;

namespace {
// Over Z[i] (D = 4): t = sqrt(-4) h, so h = 1/2 is t = i = 2 + omega.
SemiIntegralHermitian d4(long long a, long long b, long long x, long long y)
{
    return {4, {a, b}, {{x, y}}};
}
} // namespace

TEST(IntegerRing, Arithmetic)
{
    for (long long D : {3, 4, 7, 8, 11, 20}) {
        IntegerRing O(D);
        const auto s = O.sqrt_minus_d();
        EXPECT_EQ(O.mul(s, s), (AlgebraicInteger{-D, 0})) << D;
        EXPECT_EQ(O.norm(s), D);
        EXPECT_EQ(O.conj(O.conj(AlgebraicInteger{5, -3})), (AlgebraicInteger{5, -3}));
    }
}

TEST(IntegerRing, NormMultiplicative)
{
    std::mt19937 rng(7);
    std::uniform_int_distribution<long long> dist(-40, 40);
    for (long long D : {3, 4, 7, 8, 15}) {
        IntegerRing O(D);
        for (int i = 0; i < 200; ++i) {
            AlgebraicInteger s{dist(rng), dist(rng)}, t{dist(rng), dist(rng)};
            EXPECT_EQ(O.norm(O.mul(s, t)), O.norm(s) * O.norm(t));
            EXPECT_GE(O.norm(s), 0);
            EXPECT_EQ(O.norm(s) == 0, s.is_zero());
            EXPECT_EQ(O.mul(s, O.conj(s)), (AlgebraicInteger{O.norm(s), 0}));
        }
    }
}

TEST(Hermitian, Determinant)
{
    EXPECT_EQ(det_h(SemiIntegralHermitian::diagonal(4, {1, 1})), Rational(1));
    EXPECT_EQ(det_h(d4(1, 2, 2, 1)), Rational(7, 4));
    EXPECT_EQ(det_h(d4(1, 1, 3, 1)), Rational(1, 2)); // h = (1 - i)/2
    EXPECT_EQ(det_h(d4(1, 1, 4, 2)), Rational(0));    // h = 1
    EXPECT_EQ(det_h(SemiIntegralHermitian::zero(4, 0)), Rational(1));
}

TEST(Hermitian, Gamma)
{
    EXPECT_EQ(gamma(SemiIntegralHermitian::diagonal(4, {1, 1})), -4);
    EXPECT_EQ(gamma(d4(1, 2, 2, 1)), -7);
    EXPECT_EQ(gamma(SemiIntegralHermitian::diagonal(7, {6})), 6);
    EXPECT_THROW(gamma(d4(1, 1, 4, 2)), std::exception);
}

TEST(Hermitian, Positivity)
{
    EXPECT_TRUE(is_positive_definite(SemiIntegralHermitian::diagonal(4, {1, 1})));
    EXPECT_FALSE(is_positive_definite(SemiIntegralHermitian::diagonal(4, {1, -1})));
    EXPECT_FALSE(is_positive_definite(d4(1, 1, 4, 2)));
}

TEST(Hermitian, Rank)
{
    EXPECT_EQ(rank_h(SemiIntegralHermitian::zero(4, 3)), 0);
    EXPECT_EQ(rank_h(SemiIntegralHermitian::diagonal(4, {5, 0})), 1);
    EXPECT_EQ(rank_h(d4(1, 1, 4, 2)), 1);
    EXPECT_EQ(rank_h(d4(1, 2, 2, 1)), 2);
}

TEST(Hermitian, ZeroBlock)
{
    EXPECT_EQ(embed_zero_block(SemiIntegralHermitian::diagonal(4, {3})), SemiIntegralHermitian::diagonal(4, {3, 0}));
    EXPECT_EQ(embed_zero_block(SemiIntegralHermitian::zero(4, 1)), SemiIntegralHermitian::zero(4, 2));
    EXPECT_EQ(canonical_key(embed_zero_block(SemiIntegralHermitian::diagonal(4, {1, 1}))), "3;1,1,0;0,0;0,0;0,0");
    for (const auto &H : enumerate_positive(4, 2, 2)) {
        const auto P = embed_zero_block(H);
        EXPECT_TRUE(det_h(P).is_zero());
        EXPECT_EQ(rank_h(P), rank_h(H));
        EXPECT_EQ(padded_block_size(P), 2);
        EXPECT_EQ(P.leading_block(2), H);
    }
}

TEST(Hermitian, EnumerationDegreeOne)
{
    const auto hs = enumerate_positive(4, 1, 3);
    ASSERT_EQ(hs.size(), 3u);
    for (long long h = 1; h <= 3; ++h)
        EXPECT_EQ(hs[h - 1], SemiIntegralHermitian::diagonal(4, {h}));
    EXPECT_THROW(enumerate_positive(4, 3, 1), std::invalid_argument);
}

TEST(Hermitian, EnumerationDegreeTwo)
{
    const auto small = enumerate_positive(4, 2, 1);
    EXPECT_EQ(small.size(), 9u);
    IntegerRing O(4);
    for (const auto &H : small)
        EXPECT_LT(O.norm(H.t(0, 1)), 4);

    for (long long D : {3, 4, 7, 8}) {
        IntegerRing OD(D);
        const auto all = enumerate_positive(D, 2, 4);
        std::set<std::string> keys;
        for (const auto &H : all) {
            EXPECT_TRUE(is_positive_definite(H));
            EXPECT_LE(H.diag()[0], H.diag()[1]);
            EXPECT_TRUE(keys.insert(canonical_key(H)).second) << canonical_key(H);
            // -gamma = D h11 h22 - N(t); for D = 4 this is 4 h11 h22 - N(t).
            EXPECT_EQ(-gamma(H), D * H.diag()[0] * H.diag()[1] - OD.norm(H.t(0, 1)));
            EXPECT_TRUE((Rational(-D) * det_h(H)).is_integer());
        }
        EXPECT_TRUE(std::is_sorted(all.begin(), all.end(), [](const auto &a, const auto &b) {
            auto tup = [](const SemiIntegralHermitian &h) {
                return std::make_tuple(h.diag()[0], h.diag()[1], h.t(0, 1).x, h.t(0, 1).y);
            };
            return tup(a) < tup(b);
        }));
    }
    EXPECT_EQ(enumerate_positive(4, 2, 4).size(), 770u);
}

TEST(Hermitian, CanonicalKey)
{
    EXPECT_EQ(canonical_key(SemiIntegralHermitian::diagonal(4, {1, 1})), "2;1,1;0,0");
    EXPECT_EQ(canonical_key(d4(1, 2, -2, 1)), "2;1,2;-2,1");
    EXPECT_EQ(canonical_key(SemiIntegralHermitian::diagonal(4, {5})), "1;5");
    EXPECT_EQ(canonical_key(SemiIntegralHermitian::zero(4, 0)), "0");
    for (const auto &H : enumerate_positive(7, 2, 3))
        EXPECT_EQ(parse_key(7, canonical_key(H)), H);
    EXPECT_THROW(parse_key(4, "2;1,1"), std::invalid_argument);
    EXPECT_THROW(parse_key(4, "2;1,x;0,0"), std::invalid_argument);
}

TEST(Hermitian, EntriesAreHermitian)
{
    FieldArith F(4);
    const auto H = d4(1, 2, 2, 1);
    EXPECT_EQ(H.entry(0, 1), F.conj(H.entry(1, 0)));
    EXPECT_EQ(F.norm(H.entry(0, 1)), Rational(1, 4));
}
