#pragma once

#include "params.hpp"
#include "special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace rerw::analytic {

using Matrix2 = std::array<std::array<double, 2>, 2>;

namespace detail {

inline void require_regime(const WalkParams& params, Regime wanted, const char* op)
{
    const Regime actual = classify_regime(params);
    if (actual != wanted)
        throw RegimeError(std::string(op) + " requires the " + std::string(to_string(wanted)) +
                          " regime; parameters are " + std::string(to_string(actual)));
}

inline void require_index(std::uint64_t n, const char* op)
{
    if (n < 1) throw std::invalid_argument(std::string(op) + ": n must be at least 1");
}

} // namespace detail

/// D_n = (c+1)n - c, the total memory weight after n steps.
inline double total_weight(const WalkParams& params, std::uint64_t n)
{
    return (params.c() + 1.0) * static_cast<double>(n) - params.c();
}

/// gamma_n = 1 + (a+c) / D_n.
inline double gamma_n(const WalkParams& params, std::uint64_t n)
{
    detail::require_index(n, "gamma_n");
    return 1.0 + (params.a() + params.c()) / total_weight(params, n);
}

/// The same quantity written as (n + a lambda) / (n - c lambda).
inline double gamma_n_ratio_form(const WalkParams& params, std::uint64_t n)
{
    detail::require_index(n, "gamma_n");
    const double lam = params.lambda();
    const double x = static_cast<double>(n);
    return (x + params.a() * lam) / (x - params.c() * lam);
}

/// log a_n with a_n = Gamma(n - c lam) Gamma(1 + a lam) / (Gamma(n + a lam) Gamma(lam)).
inline double log_a_n(const WalkParams& params, std::uint64_t n)
{
    detail::require_index(n, "a_n");
    const double lam = params.lambda();
    const double a_lam = params.a() * lam;
    if (!(1.0 + a_lam > 0.0))
        throw GammaPoleError("a_n: Gamma(1 + a*lambda) has a pole at 1 + a*lambda = 0 (p = 0, c = 0)");
    const double x = static_cast<double>(n);
    return log_gamma_ratio(x, -params.c() * lam, a_lam) + log_gamma(1.0 + a_lam, "1 + a*lambda").log_abs -
           log_gamma(lam, "lambda").log_abs;
}

inline double a_n(const WalkParams& params, std::uint64_t n)
{
    return std::exp(log_a_n(params, n));
}

/// lim n^{(a+c) lam} a_n = Gamma(1 + a lam) / Gamma(lam).
inline double a_n_scale(const WalkParams& params)
{
    const double lam = params.lambda();
    return std::exp(log_gamma(1.0 + params.a() * lam).log_abs - log_gamma(lam).log_abs);
}

/// Streams a_1, a_2, ... via a_{n+1} = a_n / gamma_n, re-anchored to the
/// log-gamma value every 2^16 steps so rounding drift stays bounded.
class ANSequence
{
public:
    static constexpr std::uint64_t kAnchorPeriod = std::uint64_t{1} << 16;

    explicit ANSequence(const WalkParams& params) : params_(params)
    {
        (void)log_a_n(params, 1); // validates the Gamma arguments
    }

    std::uint64_t index() const noexcept { return n_; }
    double value() const noexcept { return value_; }

    double advance()
    {
        value_ /= 1.0 + (params_.a() + params_.c()) / total_weight(params_, n_);
        ++n_;
        if (n_ % kAnchorPeriod == 0) value_ = a_n(params_, n_);
        return value_;
    }

private:
    WalkParams params_;
    std::uint64_t n_ = 1;
    double value_ = 1.0;
};

struct VnWn
{
    double v = 0.0; // sum a_k^2
    double w = 0.0; // sum a_k
};

inline VnWn vn_wn(const WalkParams& params, std::uint64_t n)
{
    detail::require_index(n, "vn_wn");
    ANSequence seq(params);
    CompensatedSum v(1.0), w(1.0);
    while (seq.index() < n) {
        const double ak = seq.advance();
        v += ak * ak;
        w += ak;
    }
    return {v.value(), w.value()};
}

/// Growth scale of v_n: n^{1-2(a+c)lam} (diffusive), log n (critical), 1 (superdiffusive).
inline double vn_scale(const WalkParams& params, std::uint64_t n)
{
    const double x = static_cast<double>(n);
    switch (classify_regime(params)) {
    case Regime::Diffusive: return std::pow(x, 1.0 - 2.0 * params.exponent());
    case Regime::Critical: return std::log(x);
    case Regime::Superdiffusive: return 1.0;
    }
    return 1.0;
}

/// lim v_n / vn_scale(n). Superdiffusive: the full series, summed to 2^20
/// terms with an integral tail estimate.
inline double vn_limit(const WalkParams& params)
{
    const double scale = a_n_scale(params);
    switch (classify_regime(params)) {
    case Regime::Diffusive: return scale * scale / (1.0 - 2.0 * params.exponent());
    case Regime::Critical: {
        const double c = params.c();
        const double r = std::exp(log_gamma((c + 3.0) / (2.0 * (c + 1.0))).log_abs -
                                  log_gamma(1.0 / (c + 1.0)).log_abs);
        return r * r;
    }
    case Regime::Superdiffusive: {
        constexpr std::uint64_t terms = std::uint64_t{1} << 20;
        const double e2 = 2.0 * params.exponent();
        const double tail = scale * scale * std::pow(static_cast<double>(terms) + 0.5, 1.0 - e2) / (e2 - 1.0);
        return vn_wn(params, terms).v + tail;
    }
    }
    return 0.0;
}

// Limit constants --------------------------------------------------------------

// The ungated forms evaluate a formula whatever the parameters' regime; they
// back the regime-forced experiments. The gated forms below are the public API.
namespace ungated {

inline double diffusive_variance(const WalkParams& params)
{
    const double a = params.a(), c = params.c();
    return (2.0 * a * c + c - 1.0) / (2.0 * a + c - 1.0);
}

inline double diffusive_kernel(const WalkParams& params, double s, double t)
{
    if (!(s > 0.0)) throw std::invalid_argument("diffusive_kernel: s must be positive");
    if (s > t) throw std::invalid_argument("diffusive_kernel: arguments must satisfy s <= t");
    const double a = params.a(), c = params.c();
    const double first = a * (1.0 - c * c) / ((a + c) * (1.0 - 2.0 * a - c));
    const double second = c * (a + 1.0) / (a + c);
    return first * s * std::pow(t / s, params.exponent()) + second * s;
}

inline double com_variance(const WalkParams& params)
{
    const double a = params.a(), c = params.c();
    return (2.0 - c * (c + 1.0 + 3.0 * c * a + 3.0 * a - 2.0 * a * a)) /
           (3.0 * (2.0 + c - a) * (1.0 - 2.0 * a - c));
}

inline double critical_variance(const WalkParams& params)
{
    const double c = params.c();
    return (c - 1.0) * (c - 1.0) / (c + 1.0);
}

} // namespace ungated

/// Limit variance of S_n / sqrt(n): (2ac + c - 1) / (2a + c - 1).
inline double diffusive_variance(const WalkParams& params)
{
    detail::require_regime(params, Regime::Diffusive, "diffusive_variance");
    warn_if_symmetric(params);
    return ungated::diffusive_variance(params);
}

/// Covariance E[W_s W_t] of the diffusive Gaussian limit, 0 < s <= t.
inline double diffusive_kernel(const WalkParams& params, double s, double t)
{
    detail::require_regime(params, Regime::Diffusive, "diffusive_kernel");
    warn_if_symmetric(params);
    return ungated::diffusive_kernel(params, s, t);
}

/// Limit variance of G_n / sqrt(n), G_n the center of mass.
inline double com_variance(const WalkParams& params)
{
    detail::require_regime(params, Regime::Diffusive, "com_variance");
    warn_if_symmetric(params);
    return ungated::com_variance(params);
}

struct CriticalConstants
{
    double variance = 0.0;
    double lil = 0.0;
};

/// Both constants equal (c-1)^2 / (c+1).
inline CriticalConstants critical_constants(const WalkParams& params)
{
    detail::require_regime(params, Regime::Critical, "critical_constants");
    warn_if_symmetric(params);
    const double k = ungated::critical_variance(params);
    return {k, k};
}

/// min(s, t) (c-1)^2/(c+1): covariance of the scaled Brownian limit.
inline double critical_kernel(const WalkParams& params, double s, double t)
{
    if (s < 0.0 || t < 0.0) throw std::invalid_argument("critical_kernel: times must be non-negative");
    return std::min(s, t) * critical_constants(params).variance;
}

struct LcMoments
{
    double mean = 0.0;
    double second_moment = 0.0;

    double variance() const { return second_moment - mean * mean; }
};

/// Limit of E[Y_n^2] / n^{2(a+c)lam} (superdiffusive), from the exact solution of
/// E[Y_{n+1}^2] = K + (2 gamma_n - 1) E[Y_n^2] with E[Y_1^2] = 1.
inline double y_second_moment_limit(const WalkParams& params)
{
    const double lam = params.lambda();
    const double b = 2.0 * params.a() + params.c();
    const double K = params.kappa();
    const double log_g_lam = log_gamma(lam, "lambda").log_abs;
    const auto g_b = log_gamma(b * lam, "(2a+c)*lambda");
    const auto g_1b = log_gamma(1.0 + b * lam, "1+(2a+c)*lambda");
    const double main = K / (lam * (b - 1.0)) * g_b.sign * std::exp(log_g_lam - g_b.log_abs);
    const double start = (K - 1.0) * g_1b.sign * std::exp(log_g_lam - g_1b.log_abs);
    return main - start;
}

namespace ungated {

inline LcMoments lc_moments(const WalkParams& params)
{
    const double ratio = params.a() / (params.a() + params.c());
    LcMoments m;
    m.mean = ratio * (2.0 * params.q() - 1.0) / a_n_scale(params);
    m.second_moment = ratio * ratio * y_second_moment_limit(params);
    return m;
}

} // namespace ungated

inline LcMoments lc_moments(const WalkParams& params)
{
    detail::require_regime(params, Regime::Superdiffusive, "lc_moments");
    warn_if_symmetric(params);
    return ungated::lc_moments(params);
}

/// Closed form of E[L_c^2] obtained by solving the E[Y_n^2] recursion from
/// E[Y_1^2] = 1 + 2ac + c^2 instead of 1. Kept for comparison only; it agrees with
/// lc_moments only when c = 0.
inline double lc_second_moment_uncorrected(const WalkParams& params)
{
    detail::require_regime(params, Regime::Superdiffusive, "lc_second_moment_uncorrected");
    const double a = params.a(), c = params.c();
    const double lam = params.lambda();
    const double b = 2.0 * a + c;
    return a * a * params.kappa() / ((a + c) * (a + c) * lam * (b - 1.0)) *
           std::exp(log_gamma(lam).log_abs - log_gamma(b * lam).log_abs);
}

/// Limit of V_n <M>_n V_n^T in the diffusive regime.
inline Matrix2 diffusive_limit_matrix(const WalkParams& params)
{
    detail::require_regime(params, Regime::Diffusive, "diffusive_limit_matrix");
    const double a = params.a(), c = params.c();
    const double s = 1.0 / ((a + c) * (a + c));
    const double off = s * a * c * (c + 1.0) * (1.0 + a);
    return {{{s * c * c * (1.0 - a * a), off},
             {off, s * a * a * params.kappa() * (c + 1.0) / (1.0 - c - 2.0 * a)}}};
}

/// Limit of W_n <M>_n W_n^T in the critical regime.
inline Matrix2 critical_limit_matrix(const WalkParams& params)
{
    const double k = critical_constants(params).variance;
    return {{{0.0, 0.0}, {0.0, k}}};
}

struct LimitMatrices
{
    std::optional<Matrix2> V; // diffusive
    std::optional<Matrix2> W; // critical
};

inline LimitMatrices limit_matrices(const WalkParams& params)
{
    switch (classify_regime(params)) {
    case Regime::Diffusive: return {diffusive_limit_matrix(params), std::nullopt};
    case Regime::Critical: return {std::nullopt, critical_limit_matrix(params)};
    case Regime::Superdiffusive:
        throw RegimeError("limit_matrices: no matrix normalization in the superdiffusive regime");
    }
    return {};
}

/// Every closed-form limit constant that applies to the parameters' regime.
struct RegimeLimits
{
    Regime regime = Regime::Diffusive;
    std::optional<double> clt_variance;
    std::optional<double> qsl_constant;
    std::optional<double> lil_constant;
    std::optional<double> com_variance;
    std::optional<double> lc_mean;
    std::optional<double> lc_second_moment;
};

inline RegimeLimits regime_limits(const WalkParams& params)
{
    RegimeLimits out;
    out.regime = classify_regime(params);
    switch (out.regime) {
    case Regime::Diffusive:
        out.clt_variance = diffusive_variance(params);
        out.qsl_constant = out.clt_variance;
        out.com_variance = analytic::com_variance(params);
        break;
    case Regime::Critical: {
        const auto k = critical_constants(params);
        out.clt_variance = k.variance;
        out.qsl_constant = k.variance;
        out.lil_constant = k.lil;
        break;
    }
    case Regime::Superdiffusive: {
        const auto m = lc_moments(params);
        out.lc_mean = m.mean;
        out.lc_second_moment = m.second_moment;
        break;
    }
    }
    return out;
}

} // namespace rerw::analytic
