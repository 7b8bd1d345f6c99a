// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include "oracles.hpp"

#include <rerw/analytic.hpp>
#include <rerw/martingale.hpp>
#include <rerw/moments.hpp>
#include <rerw/montecarlo.hpp>
#include <rerw/sampler.hpp>
#include <rerw/stats.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

using namespace rerw;
using namespace rerw::montecarlo;

namespace {

constexpr std::uint64_t kSeed = 2024;

// Tolerances, fixed here.
constexpr double kTolDiffusive = 0.05;
constexpr double kTolSecondDiffusive = 0.07;
constexpr double kTolCritical = 0.15;
constexpr double kTolCovariance = 0.10;
constexpr double kTolLcMean = 0.05;
constexpr double kTolLcSecond = 0.10;
constexpr double kTolExact = 1e-12;
constexpr double kTolClosed = 1e-9;
constexpr double kChiAlpha = 0.01;
constexpr double kKsAlpha = 0.01;
constexpr int kKsAttempts = 3;
constexpr double kSeMultiplier = 4.0;
constexpr double kTolQslMean = 0.10;
constexpr double kTolQslSingle = 0.20;
constexpr double kTolCom = 0.07;

struct Outcome
{
    bool pass = true;
    std::vector<std::string> details;

    void add(const CheckResult& c)
    {
        pass = pass && c.pass;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-4s %-28s estimate %.6g  target %.6g  tol %.3g  se %.3g", c.pass ? "ok" : "BAD",
                      c.name.c_str(), c.estimate, c.target, c.tolerance, c.se);
        details.emplace_back(buf);
    }

    void add(const std::vector<CheckResult>& cs)
    {
        for (const auto& c : cs) add(c);
    }

    void note(const std::string& s) { details.push_back(s); }

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "BAD  ") + what);
    }
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::uint64_t seed_for(int criterion) { return rng::derive(kSeed, static_cast<std::uint64_t>(criterion)); }

EnsembleSpec spec_of(double p, double c, double q, std::uint64_t n, std::uint64_t reps, std::uint64_t seed)
{
    EnsembleSpec s;
    s.params = WalkParams(p, c, q);
    s.n_steps = n;
    s.replicates = reps;
    s.master_seed = seed;
    return s;
}

Tolerances tolerances(double diffusive)
{
    Tolerances t;
    t.diffusive_variance = diffusive;
    t.ks_alpha = kKsAlpha;
    t.ks_attempts = kKsAttempts;
    t.se_multiplier = kSeMultiplier;
    return t;
}

/// Variance check plus KS with up to kKsAttempts seeds.
Outcome diffusive_clt(const EnsembleSpec& spec, double rel)
{
    Outcome o;
    const auto tol = tolerances(rel);
    const auto e = run_ensemble(spec);
    auto checks = clt_check_diffusive(e, tol);
    o.add(checks[0]);
    int attempt = 0;
    CheckResult ks = checks[1];
    while (!ks.pass && attempt + 1 < kKsAttempts) {
        ++attempt;
        auto retry = spec;
        retry.master_seed = retry_seed(spec.master_seed, attempt);
        ks = clt_check_diffusive(run_ensemble(retry), tol)[1];
    }
    o.add(ks);
    o.note("KS attempts used: " + std::to_string(attempt + 1));
    return o;
}

Outcome criterion1()
{
    return diffusive_clt(spec_of(0.35, 1.0, 0.5, 10'000, 5000, seed_for(1)), kTolDiffusive);
}

Outcome criterion2()
{
    auto o = diffusive_clt(spec_of(0.6, 0.5, 0.5, 10'000, 5000, seed_for(2)), kTolSecondDiffusive);
    // Exact finite-n value for comparison: Var(S_n)/n from the moment recursion.
    const WalkParams w(0.6, 0.5, 0.5);
    const auto t = moments::joint_moments(w, 10'000);
    o.note("exact Var(S_n)/n at n = 1e4: " + fmt("%.6f", (t.eS2 - t.eS * t.eS) / 1e4) + " (limit 3)");
    return o;
}

Outcome criterion3()
{
    auto o = diffusive_clt(spec_of(0.6, 0.0, 0.5, 10'000, 5000, seed_for(3)), kTolDiffusive);
    o.note("target 1/(1 - 2a) with a = 0.2: " + fmt("%.6f", 1.0 / 0.6));
    return o;
}

EnsembleSummary critical_ensemble()
{
    return run_ensemble(spec_of(0.25, 2.0, 0.5, 100'000, 5000, seed_for(4)));
}

Outcome criterion4(const EnsembleSummary& e)
{
    Outcome o;
    Tolerances t;
    t.critical_variance = kTolCritical;
    o.add(clt_check_critical(e, t));
    return o;
}

Outcome criterion5()
{
    Outcome o;
    auto spec = spec_of(0.35, 1.0, 0.5, 10'000, 5000, seed_for(5));
    spec.time_grid = {0.25, 0.5, 1.0};
    Tolerances t;
    t.covariance = kTolCovariance;
    const auto e = run_ensemble(spec);
    const auto checks = functional_covariance_check(e, t);
    o.add(checks);
    for (const auto& c : checks) {
        // here the kernel is min(s, t)
        const auto us = c.name.substr(std::string("covariance_").size());
        const double s = std::stod(us.substr(0, us.find('_'))), u = std::stod(us.substr(us.find('_') + 1));
        o.require(std::abs(c.target - std::min(s, u)) < 1e-12, c.name + " target equals min(s, t)");
    }
    o.require(covariance_psd_check(e).pass, "grid covariance symmetric PSD");
    return o;
}

Outcome criterion6()
{
    Outcome o;
    auto spec = spec_of(0.9, 1.0, 1.0, 100'000, 2000, seed_for(6));
    spec.checkpoints = {1000, 10'000};
    Tolerances t;
    t.lc_mean = kTolLcMean;
    t.lc_second_moment = kTolLcSecond;
    const auto e = run_ensemble(spec);
    o.add(superdiffusive_check(e, t));
    for (const auto& p : cauchy_differences(e))
        o.note("E|S_" + std::to_string(p.to) + "/" + std::to_string(p.to) + "^0.9 - S_" + std::to_string(p.from) + "/" +
               std::to_string(p.from) + "^0.9|^2 = " + fmt("%.6g", p.mean_square) + " +- " + fmt("%.2g", p.se));
    o.note("uncorrected closed form of the second moment (not a target): " +
           fmt("%.6f", analytic::lc_second_moment_uncorrected(spec.params)));
    return o;
}

Outcome criterion7()
{
    Outcome o;
    const std::vector<std::tuple<double, double, double>> grid = {
        {0.35, 1.0, 0.5}, {0.9, 1.0, 1.0}, {0.25, 2.0, 0.5}, {0.6, 0.0, 0.3},  {0.75, 0.0, 0.5}, {0.6, 0.5, 0.8},
        {1.0, 0.5, 0.2},  {0.0, 2.5, 0.9}, {0.1, 0.3, 0.0},  {0.5, 1.7, 1.0},  {0.8, 3.5, 0.6},  {0.45, 0.25, 0.35}};
    double worst = 0.0;
    for (auto [p, c, q] : grid) {
        const WalkParams w(p, c, q);
        moments::MomentRecursion rec(w);
        for (int n = 1; n <= 6; ++n) {
            const auto exact = oracle::moments_of(oracle::enumerate(p, c, q, n));
            const auto& t = rec.table();
            for (auto [a, b] : {std::pair{t.eS, exact.eS}, {t.eY, exact.eY}, {t.eS2, exact.eS2}, {t.eSY, exact.eSY},
                                {t.eY2, exact.eY2}})
                worst = std::max(worst, std::abs(a - b));
            rec.advance();
        }
    }
    o.require(worst <= kTolExact, "enumeration vs joint moments, 12 triples, n <= 6: max abs error " + fmt("%.3g", worst));

    double worst_rel = 0.0;
    int compared = 0;
    for (auto [p, c, q] : grid) {
        const WalkParams w(p, c, q);
        if (classify_regime(w) == Regime::Critical) continue;
        const double r = moments::second_moment_Y_recursive(w, 1000);
        worst_rel = std::max(worst_rel, std::abs(moments::second_moment_Y_closed(w, 1000) - r) / r);
        ++compared;
    }
    o.require(worst_rel <= kTolClosed, "closed vs recursive E[Y_1000^2] on " + std::to_string(compared) +
                                           " non-critical triples: max rel error " + fmt("%.3g", worst_rel));
    return o;
}

std::vector<double> sampled_law(auto& memory, std::uint64_t draws, std::uint64_t seed)
{
    rng::Xoshiro256ss g(seed);
    std::vector<double> counts(memory.time(), 0.0);
    for (std::uint64_t i = 0; i < draws; ++i) counts[memory.draw(g) - 1] += 1.0;
    return counts;
}

Outcome criterion8()
{
    Outcome o;
    const double cs[] = {0.0, 0.5, 1.0, 1.7, 3.0};
    double min_p = 1.0;
    int fails = 0;
    rng::Xoshiro256ss g(seed_for(8));
    for (int h = 0; h < 20; ++h) {
        const std::uint64_t n = 2 + rng::to_bounded(g(), 9); // 2..10
        std::vector<std::uint64_t> history;
        for (std::uint64_t j = 2; j <= n; ++j) history.push_back(1 + rng::to_bounded(g(), j - 1));
        const double c = cs[h % 5];
        const auto exact = exact_distribution(history, c);
        RecordMemory rec(c, history);
        TreeMemory tree(c, history);
        const double pr = stats::chi_square_gof(sampled_law(rec, 1'000'000, rng::derive(seed_for(8), 2 * h)), exact).p_value;
        const double pt = stats::chi_square_gof(sampled_law(tree, 1'000'000, rng::derive(seed_for(8), 2 * h + 1)), exact).p_value;
        min_p = std::min({min_p, pr, pt});
        fails += (pr <= kChiAlpha) + (pt <= kChiAlpha);
        if (pr <= kChiAlpha || pt <= kChiAlpha)
            o.note("history " + std::to_string(h) + " (n=" + std::to_string(n) + ", c=" + fmt("%g", c) +
                   "): record p=" + fmt("%.4g", pr) + " tree p=" + fmt("%.4g", pt));
    }
    o.require(fails == 0, "chi-square p > 0.01 for 20 histories x 2 backends, 1e6 draws each; smallest p " +
                              fmt("%.4g", min_p));

    const oracle::BetaLaw record_law = [](std::span<const std::uint64_t> h, double c) { return RecordMemory(c, h).law(); };
    const oracle::BetaLaw tree_law = [](std::span<const std::uint64_t> h, double c) { return TreeMemory(c, h).law(); };
    double worst = 0.0;
    bool same_support = true;
    for (auto [p, c, q] : {std::tuple{0.35, 1.0, 0.5}, {0.9, 2.5, 0.8}, {0.2, 0.4, 0.1}, {0.75, 0.0, 0.5}}) {
        const auto rec = oracle::joint_law(oracle::enumerate(p, c, q, 4, record_law));
        const auto tree = oracle::joint_law(oracle::enumerate(p, c, q, 4, tree_law));
        same_support = same_support && rec.size() == tree.size();
        for (const auto& [key, prob] : rec) {
            const auto it = tree.find(key);
            if (it == tree.end()) {
                same_support = false;
                continue;
            }
            worst = std::max(worst, std::abs(it->second - prob));
        }
    }
    o.require(same_support && worst <= kTolExact,
              "n = 4 walk law, record vs tree by enumeration: max abs difference " + fmt("%.3g", worst));
    return o;
}

Outcome criterion9()
{
    Outcome o;
    for (auto [p, c] : {std::pair{0.35, 1.0}, {0.9, 1.0}}) {
        const auto checks = martingale::martingale_increment_check(WalkParams(p, c, 0.5), {10, 100, 1000}, 5000,
                                                                   rng::derive(seed_for(9), 0), 1, SamplerKind::Record,
                                                                   kSeMultiplier);
        bool ok = true;
        for (const auto& ch : checks) ok = ok && ch.pass;
        o.require(ok, "mean increments of M and N within 4 SE of 0 at n = 10, 100, 1000, R = 5000 (p=" + fmt("%g", p) +
                          ", c=" + fmt("%g", c) + ")");
        for (const auto& ch : checks)
            if (!ch.pass) o.add(ch);
    }

    int paths = 0;
    bool qvN_exact = true, bracket = true, recon = true;
    double worst_recon = 0.0;
    for (auto [p, c] : {std::pair{0.35, 1.0}, {0.9, 1.0}, {0.25, 2.0}}) {
        const WalkParams w(p, c, 0.5);
        for (std::uint64_t r = 0; r < 100; ++r, ++paths) {
            const auto t = martingale::track(w, 10'000, rng::derive(seed_for(9), 1000 + paths), moments::log_spaced(10'000));
            for (const auto& ch : martingale::path_checks(w, t)) {
                if (ch.name == "qvN_closed_form_rel_error") qvN_exact = qvN_exact && ch.pass;
                if (ch.name == "qvM_minus_K_vn") bracket = bracket && ch.pass;
                if (ch.name == "reconstruction_rel_error") {
                    recon = recon && ch.pass;
                    worst_recon = std::max(worst_recon, ch.estimate);
                }
            }
        }
    }
    o.require(qvN_exact, "<N>_n equals (c/(a+c))^2 (1 - a^2) n on " + std::to_string(paths) + " paths");
    o.require(bracket, "<M>_n <= K v_n at every checkpoint of " + std::to_string(paths) + " paths");
    o.require(recon, "S_n = N_n + (a/(a+c)) M_n / a_n, max rel error " + fmt("%.3g", worst_recon));

    for (auto [p, c] : {std::pair{0.75, 1.0}, {0.35, 1.0}, {0.9, 1.0}}) {
        Walk<> walk(WalkParams(p, c, 0.5), rng::derive(seed_for(9), 7));
        for (int i = 0; i < 1000; ++i) walk.step();
        const auto checks =
            martingale::conditional_moment_diagnostics(walk, 1'000'000, rng::derive(seed_for(9), 8), kSeMultiplier);
        o.note("conditional moments at n = 1000, p=" + fmt("%g", p) + ", c=" + fmt("%g", c) + ":");
        o.add(checks);
    }
    return o;
}

Outcome criterion10()
{
    Outcome o;
    auto spec = spec_of(0.35, 1.0, 0.5, 1'000'000, 100, seed_for(10));
    spec.time_grid = {1.0};
    Tolerances t;
    t.qsl_mean = kTolQslMean;
    t.qsl_single = kTolQslSingle;
    const auto e = run_ensemble(spec);
    o.add(qsl_check(e, t));
    int within = 0;
    for (double x : e.qsl) within += std::abs(x - 1.0) <= kTolQslSingle;
    o.note("paths within 20% of 1.0: " + std::to_string(within) + " of " + std::to_string(e.qsl.size()));
    return o;
}

Outcome criterion11()
{
    Outcome o;
    Tolerances t;
    t.com_variance = kTolCom;
    const auto e = run_ensemble(spec_of(0.6, 0.0, 0.5, 10'000, 5000, seed_for(11)));
    const auto checks = com_check(e, t);
    o.add(checks);
    const double a = 0.2;
    o.require(std::abs(checks[0].target - 2.0 / (3.0 * (1.0 - 2.0 * a) * (2.0 - a))) < 1e-12,
              "target equals 2/(3(1-2a)(2-a)) = " + fmt("%.6f", checks[0].target));
    return o;
}

Outcome criterion12(const EnsembleSummary& e)
{
    Outcome o;
    const auto rep = lil_diagnostic(e);
    o.require(rep.monotone, "running maxima nondecreasing on every path");
    o.require(rep.finite_positive, "running maxima finite and positive");
    o.require(std::abs(rep.constant - 1.0 / 3.0) < 1e-15, "theoretical constant (c-1)^2/(c+1) = " + fmt("%.6f", rep.constant));
    o.note("mean running max at n = 1e5 (report only): " + fmt("%.4f", rep.mean_running_max) + " +- " +
           fmt("%.2g", rep.se));
    return o;
}

Outcome criterion13()
{
    Outcome o;
    auto spec = spec_of(0.35, 1.0, 0.5, 10'000, 1000, seed_for(13));
    spec.threads = 1;
    const auto one = to_json(verify(spec)).dump();
    spec.threads = 8;
    const auto eight = to_json(verify(spec)).dump();
    o.require(one == eight, "verify JSON identical for 1 and 8 threads (" + std::to_string(one.size()) + " bytes)");
    auto super = spec_of(0.9, 1.0, 1.0, 10'000, 500, seed_for(13));
    super.threads = 1;
    const auto s1 = to_json(verify(super)).dump();
    super.threads = 8;
    o.require(s1 == to_json(verify(super)).dump(), "same for a superdiffusive spec");
    return o;
}

} // namespace

int main()
{
    int failed = 0;
    const auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.note(std::string("exception: ") + ex.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, secs);
        for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    };

    report(1, "Diffusive CLT variance and KS: p=0.35, c=1, n=1e4, R=5000, +-5%", criterion1);
    report(2, "Second diffusive point: p=0.6, c=0.5, target 3, +-7%", criterion2);
    report(3, "No-reinforcement reduction: p=0.6, c=0, target 1/(1-2a), +-5%", criterion3);
    std::optional<EnsembleSummary> critical;
    const auto get_critical = [&]() -> const EnsembleSummary& {
        if (!critical) critical = critical_ensemble();
        return *critical;
    };
    report(4, "Critical CLT: p=0.25, c=2, n=1e5, R=5000, target 1/3, +-15%", [&] { return criterion4(get_critical()); });
    report(5, "Functional covariance, grid {0.25, 0.5, 1}, +-10%", criterion5);
    report(6, "Superdiffusive limit moments: p=0.9, c=1, q=1, n=1e5, R=2000", criterion6);
    report(7, "Exact-oracle agreement", criterion7);
    report(8, "Sampler equivalence", criterion8);
    report(9, "Martingale suite", criterion9);
    report(10, "Quadratic strong law: p=0.35, c=1, n=1e6, 100 paths", criterion10);
    report(11, "Center of mass: p=0.6, c=0, +-7%", criterion11);
    report(12, "LIL diagnostic (report only)", [&] { return criterion12(get_critical()); });
    report(13, "Determinism across thread counts", criterion13);

    std::printf("%d of 13 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
