#include "oracles.hpp"

#include <rerw/moments.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <tuple>

using namespace rerw;
using namespace rerw::moments;

namespace {

// Twelve (p, c, q) triples covering all three regimes, c = 0, p at both ends
// and asymmetric starts.
const std::vector<std::tuple<double, double, double>> kGrid = {
    {0.35, 1.0, 0.5}, {0.9, 1.0, 1.0},  {0.25, 2.0, 0.5}, {0.6, 0.0, 0.3},
    {0.75, 0.0, 0.5}, {0.6, 0.5, 0.8},  {1.0, 0.5, 0.2},  {0.0, 2.5, 0.9},
    {0.1, 0.3, 0.0},  {0.5, 1.7, 1.0},  {0.8, 3.5, 0.6},  {0.45, 0.25, 0.35}};

} // namespace

TEST(JointMoments, MatchExhaustiveEnumeration)
{
    for (auto [p, c, q] : kGrid) {
        const WalkParams w(p, c, q);
        MomentRecursion rec(w);
        for (int n = 1; n <= 6; ++n) {
            const auto exact = oracle::moments_of(oracle::enumerate(p, c, q, n));
            ASSERT_NEAR(exact.total, 1.0, 1e-12);
            const auto t = rec.table();
            ASSERT_EQ(t.n, static_cast<std::uint64_t>(n));
            EXPECT_NEAR(t.eS, exact.eS, 1e-12) << p << " " << c << " " << q << " n=" << n;
            EXPECT_NEAR(t.eY, exact.eY, 1e-12);
            EXPECT_NEAR(t.eS2, exact.eS2, 1e-12);
            EXPECT_NEAR(t.eSY, exact.eSY, 1e-12);
            EXPECT_NEAR(t.eY2, exact.eY2, 1e-12);
            const auto j = joint_moments(w, n);
            EXPECT_EQ(j.eS2, t.eS2);
            rec.advance();
        }
    }
}

TEST(MeanY, ClosedFormMatchesRecursion)
{
    for (auto [p, c, q] : kGrid) {
        if (p == 0.0 && c == 0.0) continue;
        const WalkParams w(p, c, q);
        const auto t = joint_moments(w, 777);
        EXPECT_NEAR(mean_Y(w, 777), t.eY, 1e-10 * std::max(1.0, std::abs(t.eY)));
    }
}

TEST(SecondMomentY, ClosedMatchesRecursiveAwayFromCriticality)
{
    int checked = 0;
    for (auto [p, c, q] : kGrid) {
        const WalkParams w(p, c, q);
        if (classify_regime(w) == Regime::Critical) {
            EXPECT_THROW(second_moment_Y_closed(w, 1000), RegimeError);
            continue;
        }
        const double r = second_moment_Y_recursive(w, 1000);
        EXPECT_NEAR(second_moment_Y_closed(w, 1000), r, 1e-9 * r) << p << " " << c;
        for (std::uint64_t n : {1u, 2u, 5u})
            EXPECT_NEAR(second_moment_Y_closed(w, n), second_moment_Y_recursive(w, n), 1e-9 * second_moment_Y_recursive(w, n));
        ++checked;
    }
    EXPECT_GE(checked, 9);
}

TEST(SecondMomentY, RecursiveAgreesWithTable)
{
    const WalkParams w(0.6, 0.5, 0.8);
    EXPECT_DOUBLE_EQ(second_moment_Y_recursive(w, 300), joint_moments(w, 300).eY2);
}

TEST(JointMoments, MomentInequalities)
{
    for (auto [p, c, q] : kGrid) {
        MomentRecursion rec({p, c, q});
        for (int n = 1; n <= 5000; ++n) {
            const auto t = rec.table();
            ASSERT_GE(t.eY2 * (1 + 1e-12), t.eY * t.eY);
            ASSERT_GE(t.eS2 * (1 + 1e-12), t.eS * t.eS);
            ASSERT_LE(t.eSY * t.eSY, t.eS2 * t.eY2 * (1 + 1e-12));
            ASSERT_LE(t.eS2, static_cast<double>(n) * n * (1 + 1e-12));
            rec.advance();
        }
    }
}

TEST(JointMoments, NoReinforcementMakesYEqualS)
{
    const auto t = joint_moments({0.6, 0.0, 0.3}, 2000);
    EXPECT_NEAR(t.eS, t.eY, 1e-12);
    EXPECT_NEAR(t.eS2, t.eY2, 1e-9 * t.eS2);
    EXPECT_NEAR(t.eSY, t.eY2, 1e-9 * t.eS2);
}

TEST(MomentSeries, MatchesPointEvaluations)
{
    const WalkParams w(0.35, 1.0, 0.5);
    const auto ns = log_spaced(10'000);
    const auto series = moment_series(w, ns);
    ASSERT_EQ(series.size(), ns.size());
    for (std::size_t i = 0; i < ns.size(); i += 7) EXPECT_EQ(series[i].eS2, joint_moments(w, ns[i]).eS2);
    EXPECT_THROW(moment_series(w, {5, 3}), std::invalid_argument);
    EXPECT_THROW(moment_series(w, {0}), std::invalid_argument);
}

TEST(LogSpaced, IncludesEndsAndIsStrictlyIncreasing)
{
    for (std::uint64_t n : {1u, 2u, 10u, 99u, 100'000u}) {
        const auto v = log_spaced(n);
        EXPECT_EQ(v.front(), 1u);
        EXPECT_EQ(v.back(), n);
        for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v[i - 1], v[i]);
    }
    EXPECT_GT(log_spaced(100'000).size(), 30u);
    EXPECT_THROW(log_spaced(0), std::invalid_argument);
}
