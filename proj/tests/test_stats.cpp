#include <rerw/rng.hpp>
#include <rerw/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rerw;
using namespace rerw::stats;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0)
{
    rng::Xoshiro256ss g(seed);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> xs(n);
    for (double& x : xs) x = dist(g);
    return xs;
}

} // namespace

TEST(Summarize, KnownSample)
{
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto s = summarize(xs);
    EXPECT_EQ(s.count, 4u);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.second_moment, 7.5);
    EXPECT_DOUBLE_EQ(s.se_mean, std::sqrt(5.0 / 3.0 / 4.0));
}

TEST(Summarize, StandardErrorOfVarianceForNormals)
{
    // For N(0,1), sd of the sample variance is about sqrt(2/n).
    const auto s = summarize(normals(100'000, 3));
    EXPECT_NEAR(s.se_variance, std::sqrt(2.0 / 100'000), 0.1 * std::sqrt(2.0 / 100'000));
    EXPECT_NEAR(s.variance, 1.0, 4.0 * s.se_variance);
}

TEST(Covariance, SymmetricPsdMatrix)
{
    const auto x = normals(5000, 1), z = normals(5000, 2);
    std::vector<double> y(x.size()), sum(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = 0.5 * x[i] + z[i];
        sum[i] = x[i] + y[i];
    }
    const auto m = covariance_matrix({x, y, sum});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(m[i][j], m[j][i]);
    EXPECT_TRUE(is_psd(m)); // rank deficient: sum = x + y
    EXPECT_FALSE(is_psd({{1.0, 2.0}, {2.0, 1.0}}));
    EXPECT_NEAR(covariance(x, y).value, 0.5, 4.0 * covariance(x, y).se);
    EXPECT_THROW(covariance(x, std::vector<double>(3)), std::invalid_argument);
}

TEST(Kolmogorov, SurvivalFunctionValues)
{
    EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(0.8276), 0.5, 1e-3);
    EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
    // Both series agree where they meet.
    EXPECT_NEAR(kolmogorov_survival(1.1799999), kolmogorov_survival(1.18), 1e-6);
}

TEST(KsNormality, NormalSamplesPassMostOfTheTime)
{
    int passes = 0;
    const int repeats = 100;
    for (int r = 0; r < repeats; ++r) passes += ks_normality(normals(10'000, 1000 + r), 1.0).p_value > 0.01;
    EXPECT_GE(passes, 98);
}

TEST(KsNormality, ConstantSamplesFail)
{
    const std::vector<double> xs(1000, 0.3);
    EXPECT_LT(ks_normality(xs, 1.0).p_value, 1e-10);
}

TEST(KsNormality, WrongVarianceIsDetected)
{
    EXPECT_LT(ks_normality(normals(10'000, 7), 4.0).p_value, 0.01);
}

TEST(KsNormality, RejectsBadArguments)
{
    EXPECT_THROW(ks_normality(normals(10, 1), 0.0), std::invalid_argument);
    EXPECT_THROW(ks_normality(std::vector<double>{}, 1.0), std::invalid_argument);
}

TEST(ChiSquare, KnownValue)
{
    const auto r = chi_square_gof(std::vector<double>{40.0, 20.0, 40.0}, std::vector<double>{0.4, 0.2, 0.4});
    EXPECT_EQ(r.dof, 2);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
    // statistic 4 with 2 dof: p = exp(-2).
    const auto s = chi_square_gof(std::vector<double>{60.0, 20.0, 20.0}, std::vector<double>{0.5, 0.25, 0.25});
    EXPECT_DOUBLE_EQ(s.statistic, 2.0 + 1.0 + 1.0);
    EXPECT_NEAR(s.p_value, std::exp(-2.0), 1e-14);
}

TEST(ChiSquare, ImpossibleCellGivesZero)
{
    const auto r = chi_square_gof(std::vector<double>{5.0, 1.0}, std::vector<double>{1.0, 0.0});
    EXPECT_EQ(r.p_value, 0.0);
    EXPECT_THROW(chi_square_gof(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}
