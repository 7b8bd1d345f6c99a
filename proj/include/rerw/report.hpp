#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace rerw {

/// One pass/fail comparison. `tolerance` is the absolute half-width of the
/// acceptance band around `target`.
struct CheckResult
{
    std::string name;
    double target = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Pass when |estimate - target| <= rel * |target|.
inline CheckResult relative_check(std::string name, double target, double estimate, double se, double rel)
{
    const double tol = rel * std::abs(target);
    return {std::move(name), target, estimate, se, tol, std::abs(estimate - target) <= tol};
}

/// Pass when |estimate - target| <= k * se.
inline CheckResult se_check(std::string name, double target, double estimate, double se, double k = 4.0)
{
    const double tol = k * se;
    return {std::move(name), target, estimate, se, tol, std::abs(estimate - target) <= tol};
}

/// Pass when estimate <= bound.
inline CheckResult upper_bound_check(std::string name, double bound, double estimate)
{
    return {std::move(name), bound, estimate, 0.0, 0.0, estimate <= bound};
}

/// Report-only quantity; never affects the exit status.
struct Diagnostic
{
    std::string name;
    double estimate = 0.0;
    std::optional<double> target;
    std::optional<double> se;
};

struct Report
{
    nlohmann::ordered_json spec = nlohmann::ordered_json::object();
    std::string regime;
    std::vector<CheckResult> checks;
    std::vector<Diagnostic> diagnostics;

    bool all_pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }

    void append(const std::vector<CheckResult>& more) { checks.insert(checks.end(), more.begin(), more.end()); }
};

inline nlohmann::ordered_json to_json(const CheckResult& c)
{
    return {{"name", c.name},   {"target", c.target},       {"estimate", c.estimate},
            {"stderr", c.se},   {"tolerance", c.tolerance}, {"pass", c.pass}};
}

inline nlohmann::ordered_json to_json(const Diagnostic& d)
{
    nlohmann::ordered_json j{{"name", d.name}, {"estimate", d.estimate}};
    j["target"] = d.target ? nlohmann::ordered_json(*d.target) : nlohmann::ordered_json(nullptr);
    j["stderr"] = d.se ? nlohmann::ordered_json(*d.se) : nlohmann::ordered_json(nullptr);
    return j;
}

inline nlohmann::ordered_json to_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["spec"] = r.spec;
    j["regime"] = r.regime;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    j["diagnostics"] = nlohmann::ordered_json::array();
    for (const auto& d : r.diagnostics) j["diagnostics"].push_back(to_json(d));
    j["all_pass"] = r.all_pass();
    return j;
}

} // namespace rerw
