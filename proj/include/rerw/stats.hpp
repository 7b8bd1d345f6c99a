#pragma once

#include "special.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace rerw::stats {

/// Sample summary with standard errors of the mean, the variance and the raw
/// second moment.
struct Summary
{
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;      // unbiased
    double second_moment = 0.0; // mean of x^2
    double se_mean = 0.0;
    double se_variance = 0.0;
    double se_second_moment = 0.0;
};

inline Summary summarize(std::span<const double> xs)
{
    Summary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    const double n = static_cast<double>(xs.size());
    CompensatedSum sum, sum2;
    for (double x : xs) {
        sum += x;
        sum2 += x * x;
    }
    s.mean = sum.value() / n;
    s.second_moment = sum2.value() / n;
    CompensatedSum m2, m4, r4;
    for (double x : xs) {
        const double d = x - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
        const double e = x * x - s.second_moment;
        r4 += e * e;
    }
    if (xs.size() < 2) return s;
    s.variance = m2.value() / (n - 1.0);
    s.se_mean = std::sqrt(s.variance / n);
    // Var(s^2) ~ (mu4 - sigma^4) / n
    const double mu4 = m4.value() / n;
    const double sig2 = m2.value() / n;
    s.se_variance = std::sqrt(std::max(0.0, mu4 - sig2 * sig2) / n);
    s.se_second_moment = std::sqrt(r4.value() / (n - 1.0) / n);
    return s;
}

/// Sample covariance of two equally long series with the standard error of
/// the estimate (from the spread of centered products).
struct Covariance
{
    double value = 0.0;
    double se = 0.0;
};

inline Covariance covariance(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw std::invalid_argument("covariance: series lengths differ");
    if (x.size() < 2) throw std::invalid_argument("covariance: need at least two samples");
    const double n = static_cast<double>(x.size());
    const double mx = summarize(x).mean, my = summarize(y).mean;
    std::vector<double> prod(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
    const Summary p = summarize(prod);
    return {p.mean * n / (n - 1.0), p.se_mean};
}

using Matrix = std::vector<std::vector<double>>;

/// Covariance matrix of the columns, symmetrized.
inline Matrix covariance_matrix(const std::vector<std::vector<double>>& columns)
{
    const std::size_t k = columns.size();
    Matrix m(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) m[i][j] = m[j][i] = covariance(columns[i], columns[j]).value;
    return m;
}

/// True when m + tol*I admits a Cholesky factorization.
inline bool is_psd(const Matrix& m, double tol = 1e-8)
{
    const std::size_t k = m.size();
    Matrix l(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m[i][j] + (i == j ? tol : 0.0);
            for (std::size_t r = 0; r < j; ++r) s -= l[i][r] * l[j][r];
            if (i == j) {
                if (s < 0.0) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = l[j][j] > 0.0 ? s / l[j][j] : 0.0;
            }
        }
    }
    return true;
}

/// P(K > x) for the Kolmogorov distribution.
inline double kolmogorov_survival(double x)
{
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        const double pi = std::numbers::pi;
        const double w = pi * pi / (8.0 * x * x);
        double cdf = 0.0;
        for (int k = 1; k <= 7; ++k) cdf += std::exp(-(2 * k - 1) * (2 * k - 1) * w);
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * cdf, 0.0, 1.0);
    }
    double q = 0.0;
    for (int k = 1; k <= 20; ++k) q += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * x * x);
    return std::clamp(q, 0.0, 1.0);
}

struct KsResult
{
    double statistic = 0.0; // sup |F_n - F|
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, sigma2), asymptotic p-value
/// with the small-sample correction sqrt(n) + 0.12 + 0.11/sqrt(n).
inline KsResult ks_normality(std::span<const double> samples, double sigma2)
{
    if (!(sigma2 > 0.0)) throw std::invalid_argument("ks_normality: sigma2 must be positive");
    if (samples.empty()) throw std::invalid_argument("ks_normality: samples must be non-empty");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    const double sd = std::sqrt(sigma2);
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i] / sd);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double rn = std::sqrt(n);
    return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

struct ChiSquareResult
{
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit of counts against probabilities. Cells with zero
/// probability must be empty.
inline ChiSquareResult chi_square_gof(std::span<const double> counts, std::span<const double> probs)
{
    if (counts.size() != probs.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
    double total = 0.0;
    for (double c : counts) total += c;
    if (!(total > 0.0)) throw std::invalid_argument("chi_square_gof: no observations");
    ChiSquareResult r;
    int cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (probs[i] <= 0.0) {
            if (counts[i] > 0.0) return {std::numeric_limits<double>::infinity(), 0, 0.0};
            continue;
        }
        const double e = total * probs[i];
        r.statistic += (counts[i] - e) * (counts[i] - e) / e;
        ++cells;
    }
    r.dof = cells - 1;
    r.p_value = r.dof > 0 ? boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
    return r;
}

} // namespace rerw::stats
