#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rerw {

/// Invalid walk parameters. The message names the violated bound.
class ParamError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// An analytic quantity was requested outside the regime where it is defined.
class RegimeError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

enum class Regime { Diffusive, Critical, Superdiffusive };

inline std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::Diffusive: return "diffusive";
    case Regime::Critical: return "critical";
    case Regime::Superdiffusive: return "superdiffusive";
    }
    return "unknown";
}

inline Regime regime_from_string(std::string_view s)
{
    if (s == "diffusive") return Regime::Diffusive;
    if (s == "critical") return Regime::Critical;
    if (s == "superdiffusive") return Regime::Superdiffusive;
    throw std::invalid_argument("unknown regime '" + std::string(s) + "'");
}

/// Tolerance on |a - (1-c)/2| under which parameters count as critical.
inline constexpr double kCriticalTolerance = 1e-12;

/// Memory parameter p, reinforcement c and first-step bias q, validated.
class WalkParams
{
public:
    WalkParams(double p, double c, double q) : p_(p), c_(c), q_(q)
    {
        require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "p", p, "must lie in [0, 1]");
        require(std::isfinite(q) && q >= 0.0 && q <= 1.0, "q", q, "must lie in [0, 1]");
        require(std::isfinite(c) && c >= 0.0, "c", c, "must be a finite non-negative real");
        if (std::abs(a() + c_) <= kCriticalTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "a + c = (2p - 1) + c must be non-zero (p = " << p << ", c = " << c << ")";
            throw ParamError(os.str());
        }
    }

    double p() const noexcept { return p_; }
    double c() const noexcept { return c_; }
    double q() const noexcept { return q_; }
    double a() const noexcept { return 2.0 * p_ - 1.0; }
    double lambda() const noexcept { return 1.0 / (c_ + 1.0); }
    /// Growth exponent (a + c) lambda.
    double exponent() const noexcept { return (a() + c_) * lambda(); }
    /// 1 + 2ac + c^2, the conditional second moment of (alpha + c) X_beta.
    double kappa() const noexcept { return 1.0 + 2.0 * a() * c_ + c_ * c_; }

    friend bool operator==(const WalkParams&, const WalkParams&) = default;

private:
    static void require(bool ok, const char* name, double value, const char* bound)
    {
        if (ok) return;
        std::ostringstream os;
        os.precision(17);
        os << "parameter " << name << " = " << value << " " << bound;
        throw ParamError(os.str());
    }

    double p_;
    double c_;
    double q_;
};

inline Regime classify_regime(const WalkParams& params)
{
    const double boundary = (1.0 - params.c()) / 2.0;
    const double gap = params.a() - boundary;
    if (std::abs(gap) <= kCriticalTolerance) return Regime::Critical;
    return gap < 0.0 ? Regime::Diffusive : Regime::Superdiffusive;
}

// Warnings ------------------------------------------------------------------

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {

inline WarningHandler& warning_handler()
{
    static WarningHandler handler = [](std::string_view msg) {
        static std::once_flag once;
        std::call_once(once, [&] { std::cerr << "warning: " << msg << '\n'; });
    };
    return handler;
}

} // namespace detail

/// Replaces the process-wide warning sink. Not synchronized; set it before
/// starting worker threads.
inline void set_warning_handler(WarningHandler handler)
{
    detail::warning_handler() = std::move(handler);
}

inline void warn(std::string_view msg)
{
    if (auto& h = detail::warning_handler()) h(msg);
}

/// Analytic results assume p != 1/2; the walk itself is fine there.
inline void warn_if_symmetric(const WalkParams& params)
{
    if (params.p() == 0.5)
        warn("p = 1/2 reduces to a simple random walk; limit constants assume p != 1/2");
}

} // namespace rerw
