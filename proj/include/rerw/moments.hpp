#pragma once

#include "analytic.hpp"
#include "params.hpp"
#include "special.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rerw::moments {

// Exact finite-n moments. With D_n = (c+1)n - c and K = 1 + 2ac + c^2, the
// conditional laws of one step give
//   E[S_{n+1}]        = E[S_n] + (a/D_n) E[Y_n]
//   E[Y_{n+1}]        = gamma_n E[Y_n]
//   E[Y_{n+1}^2]      = K + (2 gamma_n - 1) E[Y_n^2]
//   E[S_{n+1}Y_{n+1}] = gamma_n E[S_n Y_n] + (a/D_n) E[Y_n^2] + 1 + ca
//   E[S_{n+1}^2]      = E[S_n^2] + (2a/D_n) E[S_n Y_n] + 1
// from E[X_{n+1}|F_n] = aY_n/D_n, E[(alpha+c)X_beta|F_n] = (a+c)Y_n/D_n,
// X_{n+1}(alpha+c)X_beta = 1 + c alpha and (alpha+c)^2 = 1 + 2c alpha + c^2.

struct MomentTable
{
    std::uint64_t n = 1;
    double eY = 0.0;
    double eY2 = 1.0;
    double eS = 0.0;
    double eSY = 1.0;
    double eS2 = 1.0;
};

/// Streams MomentTable for n = 1, 2, ...
class MomentRecursion
{
public:
    explicit MomentRecursion(const WalkParams& params)
        : params_(params), eS_(2.0 * params.q() - 1.0), eS2_(1.0)
    {
        table_.eY = 2.0 * params.q() - 1.0;
        table_.eS = table_.eY;
    }

    MomentTable table() const
    {
        MomentTable t = table_;
        t.eS = eS_.value();
        t.eS2 = eS2_.value();
        return t;
    }

    void advance()
    {
        const double a = params_.a(), c = params_.c();
        const double D = analytic::total_weight(params_, table_.n);
        const double g = 1.0 + (a + c) / D;
        const double eY = table_.eY, eY2 = table_.eY2, eSY = table_.eSY;

        eS_ += a / D * eY;
        eS2_ += 2.0 * a / D * eSY;
        eS2_ += 1.0;
        table_.eSY = g * eSY + a / D * eY2 + 1.0 + c * a;
        table_.eY2 = params_.kappa() + (2.0 * g - 1.0) * eY2;
        table_.eY = g * eY;
        ++table_.n;
    }

private:
    WalkParams params_;
    MomentTable table_;
    CompensatedSum eS_;
    CompensatedSum eS2_;
};

/// E[Y_n] = (2q - 1) / a_n.
inline double mean_Y(const WalkParams& params, std::uint64_t n)
{
    if (n < 1) throw std::invalid_argument("mean_Y: n must be at least 1");
    return (2.0 * params.q() - 1.0) * std::exp(-analytic::log_a_n(params, n));
}

/// E[Y_n^2] by the exact O(n) recursion. Valid in every regime.
inline double second_moment_Y_recursive(const WalkParams& params, std::uint64_t n)
{
    if (n < 1) throw std::invalid_argument("second_moment_Y_recursive: n must be at least 1");
    double y = 1.0;
    const double K = params.kappa();
    for (std::uint64_t k = 1; k < n; ++k) y = K + (2.0 * analytic::gamma_n(params, k) - 1.0) * y;
    return y;
}

/// E[Y_n^2] in closed form. With b = 2a + c, K = 1 + 2ac + c^2 and
/// P_n = Gamma(n + b lam) Gamma(lam) / (Gamma(n - c lam) Gamma(1 + b lam)):
///   E[Y_n^2] = K Gamma(n+b lam)/(lam (b-1) Gamma(n-c lam))
///                * (Gamma(lam)/Gamma(b lam) - Gamma(n+lam)/Gamma(n+b lam))
///              - (K - 1) P_n.
/// The last term accounts for E[Y_1^2] = 1 rather than K. Undefined at b = 1
/// (critical parameters); use the recursion there.
inline double second_moment_Y_closed(const WalkParams& params, std::uint64_t n)
{
    if (n < 1) throw std::invalid_argument("second_moment_Y_closed: n must be at least 1");
    if (classify_regime(params) == Regime::Critical)
        throw RegimeError("second_moment_Y_closed is undefined at criticality (2a + c = 1); "
                          "use second_moment_Y_recursive");
    const double lam = params.lambda();
    const double b = 2.0 * params.a() + params.c();
    const double K = params.kappa();
    const double x = static_cast<double>(n);

    const auto g_lam = log_gamma(lam, "lambda");
    const auto growth_lead = [&](double shift, std::uint64_t m) {
        // Gamma(n + b lam) Gamma(lam) / (Gamma(n - c lam) Gamma(b lam + shift)), shift in {0, 1}
        if (!detail::is_pole(b * lam) && !detail::is_pole(b * lam + shift)) {
            const auto growth = signed_gamma_ratio(x, b * lam, -params.c() * lam);
            const auto g = log_gamma(b * lam + shift);
            return growth.sign * g.sign * std::exp(growth.log_abs + g_lam.log_abs - g.log_abs);
        }
        const auto ph = pochhammer(b * lam + shift, m);
        if (ph.sign == 0) return 0.0;
        return ph.sign * std::exp(ph.log_abs + g_lam.log_abs - log_gamma(x - params.c() * lam).log_abs);
    };
    const double front = growth_lead(0.0, n);
    const double tail = std::exp(log_gamma_ratio(x, lam, -params.c() * lam)); // G(n+lam)/G(n-c lam)
    const double main = K / (lam * (b - 1.0)) * (front - tail);
    const double p_n = growth_lead(1.0, n - 1);
    return main - (K - 1.0) * p_n;
}

/// Full moment table at n in O(n).
inline MomentTable joint_moments(const WalkParams& params, std::uint64_t n)
{
    if (n < 1) throw std::invalid_argument("joint_moments: n must be at least 1");
    MomentRecursion rec(params);
    while (rec.table().n < n) rec.advance();
    return rec.table();
}

/// Tables at each requested n (ascending), in one pass.
inline std::vector<MomentTable> moment_series(const WalkParams& params, const std::vector<std::uint64_t>& ns)
{
    std::vector<MomentTable> out;
    out.reserve(ns.size());
    MomentRecursion rec(params);
    for (auto n : ns) {
        if (n < 1) throw std::invalid_argument("moment_series: n must be at least 1");
        if (n < rec.table().n) throw std::invalid_argument("moment_series: n must be ascending");
        while (rec.table().n < n) rec.advance();
        out.push_back(rec.table());
    }
    return out;
}

/// About `per_decade` logarithmically spaced integers in [1, n_max], including both ends.
inline std::vector<std::uint64_t> log_spaced(std::uint64_t n_max, int per_decade = 10)
{
    if (n_max < 1) throw std::invalid_argument("log_spaced: n_max must be at least 1");
    std::vector<std::uint64_t> out{1};
    const double top = std::log10(static_cast<double>(n_max));
    for (int i = 1; i <= static_cast<int>(std::ceil(top * per_decade)); ++i) {
        const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, i / static_cast<double>(per_decade))));
        if (n > out.back() && n < n_max) out.push_back(n);
    }
    if (out.back() != n_max) out.push_back(n_max);
    return out;
}

} // namespace rerw::moments
