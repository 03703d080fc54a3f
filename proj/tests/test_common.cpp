#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "flowae/common.hpp"
#include "flowae/csv.hpp"

using namespace flowae;

TEST(Rng, EngineMatchesStandardSequence)
{
    // The standard pins mt19937_64's 10000th output for the default seed.
    Rng r(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) {
        v = r.next();
    }
    EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, SameSeedSameStream)
{
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.uniform(), b.uniform());
        EXPECT_EQ(a.below(17), b.below(17));
    }
}

TEST(Rng, UniformStaysInUnitInterval)
{
    Rng r(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, BelowAndBetweenCoverTheirRange)
{
    Rng r(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = r.below(10);
        ASSERT_LT(v, 10u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 10u);
    for (int i = 0; i < 2000; ++i) {
        const auto v = r.between(-3, 3);
        ASSERT_GE(v, -3);
        ASSERT_LE(v, 3);
    }
    EXPECT_EQ(r.between(5, 5), 5);
    EXPECT_THROW(r.below(0), InvalidArgument);
    EXPECT_THROW(r.between(2, 1), InvalidArgument);
}

TEST(Rng, ShuffleIsAPermutation)
{
    Rng r(3);
    std::vector<int> v(257);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    r.shuffle(w.begin(), w.end());
    EXPECT_NE(v, w);
    std::sort(w.begin(), w.end());
    EXPECT_EQ(v, w);
}

TEST(DeriveSeed, NamesAndRootsSeparateStreams)
{
    EXPECT_NE(derive_seed(1, "init"), derive_seed(1, "shuffle"));
    EXPECT_NE(derive_seed(1, "init"), derive_seed(2, "init"));
    EXPECT_EQ(derive_seed(9, "dropout"), derive_seed(9, "dropout"));
}

TEST(Csv, SplitKeepsEmptyCells)
{
    const auto c = csv::split("a,,b,");
    ASSERT_EQ(c.size(), 4u);
    EXPECT_EQ(c[0], "a");
    EXPECT_EQ(c[1], "");
    EXPECT_EQ(c[2], "b");
    EXPECT_EQ(c[3], "");
}

TEST(Csv, NumbersRoundTripThroughText)
{
    Rng r(11);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(r.uniform() - 0.5, static_cast<int>(r.between(-60, 60)));
        EXPECT_EQ(csv::parse_double(csv::format_double(v), {1, "x"}), v);
    }
}

TEST(Csv, ParseErrorsNameRowAndColumn)
{
    try {
        csv::parse_int<int>("12x", {7, "ttl"}, 0, 255);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("row 7"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("ttl"), std::string::npos);
    }
    EXPECT_THROW(csv::parse_int<int>("300", {1, "ttl"}, 0, 255), ParseError);
    EXPECT_THROW(csv::parse_double("", {1, "ts"}), ParseError);
}
