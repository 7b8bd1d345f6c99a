#pragma once

#include "analytic.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "stats.hpp"
#include "walk.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rerw::martingale {

// M_n = a_n Y_n and N_n = S_n - (a/(a+c)) Y_n, so S_n = N_n + (a/(a+c)) M_n / a_n.
// Increments: dM_{n+1} = a_{n+1} eps_{n+1} with eps_{n+1} = Y_{n+1} - gamma_n Y_n,
// dN_{n+1} = (c/(a+c)) xi_{n+1} with xi_{n+1} = (alpha_{n+1} - a) X_{beta_{n+1}}.

struct MartingaleSeries
{
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::int64_t> S;
    std::vector<double> Y;
    std::vector<double> a;   // a_n
    std::vector<double> M;
    std::vector<double> N;
    std::vector<double> qvM; // K v_n - R_n
    std::vector<double> qvN; // (c/(a+c))^2 (1 - a^2) n
    std::vector<double> qvMN; // c (1 - a^2) / (a+c) * w_n
    std::vector<double> v;   // sum a_k^2
    std::vector<double> w;   // sum a_k

    /// N_n + (a/(a+c)) M_n / a_n at checkpoint i.
    double reconstruct(const WalkParams& params, std::size_t i) const
    {
        return N[i] + params.a() / (params.a() + params.c()) * M[i] / a[i];
    }
};

struct IncrementDiagnostics
{
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> eps; // eps_n at each checkpoint (0 at n = 1)
    std::vector<double> xi;
    // Running means over k = 2..n; their conditional expectations are
    // 1 - a^2, 1 - a^2 and 1 + 2ac + c^2 at every step.
    std::vector<double> mean_xi2;
    std::vector<double> mean_eps_xi;
    std::vector<double> mean_eps2_corrected; // eps^2 + (gamma - 1)^2 Y^2
    double max_abs_eps = 0.0;
    double max_abs_xi = 0.0;
    double max_identity_error = 0.0; // |eps - [(1-gamma)Y + (alpha+c)X_beta]|
    double eps_bound = 0.0;          // |a+c| + 1 + c
    double naive_eps_bound = 0.0; // c + 2
};

/// Streams StepRecords (n = 1, 2, ... in order) and accumulates the
/// decomposition, quadratic variations and increment diagnostics. Bound
/// violations throw std::logic_error: they can only come from a dynamics bug.
class Tracker
{
public:
    Tracker(const WalkParams& params, std::vector<std::uint64_t> checkpoints)
        : params_(params), seq_(params), checkpoints_(std::move(checkpoints))
    {
        std::sort(checkpoints_.begin(), checkpoints_.end());
        checkpoints_.erase(std::unique(checkpoints_.begin(), checkpoints_.end()), checkpoints_.end());
        if (!checkpoints_.empty() && checkpoints_.front() < 1) throw std::out_of_range("checkpoint 0 is invalid");
        const double a = params.a(), c = params.c();
        ratio_ = a / (a + c);
        qvN_step_ = (c / (a + c)) * (c / (a + c)) * (1.0 - a * a);
        qvMN_step_ = c * (1.0 - a * a) / (a + c);
        inc_.eps_bound = std::abs(a + c) + 1.0 + c;
        inc_.naive_eps_bound = c + 2.0;
        series_.checkpoints = checkpoints_;
        inc_.checkpoints = checkpoints_;
    }

    void operator()(const StepRecord& r)
    {
        if (r.n != n_ + 1) throw std::logic_error("martingale tracker: steps must arrive in order");
        n_ = r.n;
        double eps = 0.0, xi = 0.0;
        if (r.n == 1) {
            // First terms of the predictable brackets follow the generic
            // conditional moments: K a_1^2 and (c/(a+c))^2 (1 - a^2).
            v_ += 1.0;
            w_ += 1.0;
            qvN_ += qvN_step_;
        } else {
            const double a = params_.a(), c = params_.c();
            const double g = analytic::gamma_n(params_, r.n - 1);
            const double an = seq_.advance();
            eps = r.Y - g * r.Y_prev;
            xi = (r.alpha - a) * r.x_beta;
            const double alt = (1.0 - g) * r.Y_prev + (r.alpha + c) * r.x_beta;
            inc_.max_identity_error = std::max(inc_.max_identity_error, std::abs(eps - alt));
            if (std::abs(xi) > 1.0 + std::abs(a) + 1e-12)
                throw std::logic_error("|xi_" + std::to_string(r.n) + "| exceeds 1 + |a|");
            if (std::abs(eps) > inc_.eps_bound * (1.0 + 1e-12) + 1e-9)
                throw std::logic_error("|eps_" + std::to_string(r.n) + "| exceeds |a+c| + 1 + c");
            inc_.max_abs_eps = std::max(inc_.max_abs_eps, std::abs(eps));
            inc_.max_abs_xi = std::max(inc_.max_abs_xi, std::abs(xi));
            const double drift = (g - 1.0) * r.Y_prev;
            R_ += an * an * drift * drift;
            v_ += an * an;
            w_ += an;
            qvN_ += qvN_step_ * r.x_beta * r.x_beta;
            xi2_ += xi * xi;
            eps_xi_ += eps * xi;
            eps2_ += eps * eps + drift * drift;
        }
        if (next_ < checkpoints_.size() && checkpoints_[next_] == r.n) {
            record(r, eps, xi);
            ++next_;
        }
    }

    std::uint64_t time() const noexcept { return n_; }
    const MartingaleSeries& series() const noexcept { return series_; }
    const IncrementDiagnostics& increments() const noexcept { return inc_; }

private:
    void record(const StepRecord& r, double eps, double xi)
    {
        const double an = seq_.value();
        const double K = params_.kappa();
        series_.S.push_back(r.S);
        series_.Y.push_back(r.Y);
        series_.a.push_back(an);
        series_.M.push_back(an * r.Y);
        series_.N.push_back(static_cast<double>(r.S) - ratio_ * r.Y);
        series_.qvM.push_back(K * v_.value() - R_.value());
        series_.qvN.push_back(qvN_.value());
        series_.qvMN.push_back(qvMN_step_ * w_.value());
        series_.v.push_back(v_.value());
        series_.w.push_back(w_.value());

        const double steps = r.n > 1 ? static_cast<double>(r.n - 1) : 1.0;
        inc_.eps.push_back(eps);
        inc_.xi.push_back(xi);
        inc_.mean_xi2.push_back(xi2_.value() / steps);
        inc_.mean_eps_xi.push_back(eps_xi_.value() / steps);
        inc_.mean_eps2_corrected.push_back(eps2_.value() / steps);
    }

    WalkParams params_;
    analytic::ANSequence seq_;
    std::vector<std::uint64_t> checkpoints_;
    std::size_t next_ = 0;
    std::uint64_t n_ = 0;
    double ratio_ = 0.0, qvN_step_ = 0.0, qvMN_step_ = 0.0;
    CompensatedSum v_, w_, R_, qvN_, xi2_, eps_xi_, eps2_;
    MartingaleSeries series_;
    IncrementDiagnostics inc_;
};

/// Runs a walk and feeds every step to a Tracker.
inline Tracker track(const WalkParams& params, std::uint64_t n_steps, std::uint64_t seed,
                     std::vector<std::uint64_t> checkpoints, SamplerKind kind = SamplerKind::Record)
{
    checkpoints = normalize_checkpoints(std::move(checkpoints), n_steps);
    Tracker t(params, checkpoints);
    simulate(params, n_steps, seed, kind, [&](const StepRecord& r) { t(r); });
    return t;
}

/// Decomposition at the trajectory's checkpoints. The brackets need every
/// step, so the walk is replayed from the trajectory's seed and backend; a
/// replay that disagrees with the stored points is an error.
inline MartingaleSeries decompose(const Trajectory& trajectory, const WalkParams& params)
{
    if (!(trajectory.params == params)) throw std::invalid_argument("decompose: parameters differ from the trajectory's");
    if (trajectory.records.empty()) throw std::invalid_argument("decompose: empty trajectory");
    std::vector<std::uint64_t> cps;
    for (const auto& p : trajectory.records) cps.push_back(p.step);
    const auto t = track(params, cps.back(), trajectory.seed, cps, trajectory.sampler);
    const auto& s = t.series();
    for (std::size_t i = 0; i < trajectory.records.size(); ++i)
        if (s.S[i] != trajectory.records[i].S || s.Y[i] != trajectory.records[i].Y)
            throw std::logic_error("decompose: replay does not reproduce the trajectory");
    return s;
}

inline IncrementDiagnostics increments(const WalkParams& params, std::uint64_t n_steps, std::uint64_t seed,
                                       std::vector<std::uint64_t> checkpoints, SamplerKind kind = SamplerKind::Record)
{
    return track(params, n_steps, seed, std::move(checkpoints), kind).increments();
}

struct QuadraticVariations
{
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> qvM;
    std::vector<double> qvN;
    std::vector<double> bound; // K v_n
};

inline QuadraticVariations quadratic_variations(const WalkParams& params, std::uint64_t n_steps, std::uint64_t seed,
                                                std::vector<std::uint64_t> checkpoints,
                                                SamplerKind kind = SamplerKind::Record)
{
    const auto s = track(params, n_steps, seed, std::move(checkpoints), kind).series();
    QuadraticVariations q{s.checkpoints, s.qvM, s.qvN, {}};
    for (double v : s.v) q.bound.push_back(params.kappa() * v);
    return q;
}

/// V_n <(N, M)>_n V_n^T with V_n = diag(1, (a/(a+c)) / a_n) / sqrt(n)
/// (diffusive) or the same with sqrt(n log n) (critical).
inline analytic::Matrix2 normalized_bracket(const WalkParams& params, const MartingaleSeries& s, std::size_t i)
{
    const double n = static_cast<double>(s.checkpoints.at(i));
    double scale = n;
    switch (classify_regime(params)) {
    case Regime::Diffusive: break;
    case Regime::Critical: scale = n * std::log(n); break;
    case Regime::Superdiffusive: throw RegimeError("normalized_bracket: not defined in the superdiffusive regime");
    }
    const double m = params.a() / (params.a() + params.c()) / s.a[i];
    const double off = s.qvMN[i] * m / scale;
    return {{{s.qvN[i] / scale, off}, {off, s.qvM[i] * m * m / scale}}};
}

/// Conditional moments at the walk's current state from `draws` independent
/// one-step proposals. Targets: E[xi^2] = E[eps xi] = 1 - a^2 and
/// E[eps^2] + (gamma_n - 1)^2 Y_n^2 = 1 + 2ac + c^2.
template <class Memory>
std::vector<CheckResult> conditional_moment_diagnostics(const Walk<Memory>& walk, std::uint64_t draws,
                                                        std::uint64_t seed, double k_se = 4.0)
{
    if (draws < 2) throw std::invalid_argument("conditional_moment_diagnostics: need at least 2 draws");
    const auto& params = walk.params();
    const double a = params.a(), c = params.c();
    const double g = analytic::gamma_n(params, walk.time());
    const double Y = walk.weighted_sum();
    const double drift2 = (g - 1.0) * (g - 1.0) * Y * Y;
    rng::Xoshiro256ss gen(seed);
    std::vector<double> xi2(draws), exi(draws), e2(draws);
    for (std::uint64_t i = 0; i < draws; ++i) {
        const auto s = walk.propose(gen);
        const double xi = (s.alpha - a) * s.x_beta;
        const double eps = (1.0 - g) * Y + (s.alpha + c) * s.x_beta;
        xi2[i] = xi * xi;
        exi[i] = eps * xi;
        e2[i] = eps * eps + drift2;
    }
    const auto sx = stats::summarize(xi2), se = stats::summarize(exi), s2 = stats::summarize(e2);
    // Zero spread (e.g. p = 1) makes the band degenerate; allow rounding.
    const auto band = [](double x) { return std::max(x, 1e-12); };
    return {se_check("cond_xi2", 1.0 - a * a, sx.mean, band(sx.se_mean), k_se),
            se_check("cond_eps_xi", 1.0 - a * a, se.mean, band(se.se_mean), k_se),
            se_check("cond_eps2", params.kappa(), s2.mean, band(s2.se_mean), k_se)};
}

/// Mean of M_{k+1} - M_k and N_{k+1} - N_k over replicates at each
/// checkpoint k, each compared with 0 at k_se standard errors.
inline std::vector<CheckResult> martingale_increment_check(const WalkParams& params,
                                                           const std::vector<std::uint64_t>& checkpoints,
                                                           std::uint64_t replicates, std::uint64_t seed,
                                                           unsigned threads = 1, SamplerKind kind = SamplerKind::Record,
                                                           double k_se = 4.0)
{
    if (replicates < 2) throw std::invalid_argument("martingale_increment_check: need at least 2 replicates");
    if (checkpoints.empty()) throw std::invalid_argument("martingale_increment_check: no checkpoints");
    std::vector<std::uint64_t> pts;
    for (auto k : checkpoints) {
        if (k < 1) throw std::out_of_range("checkpoint 0 is invalid");
        pts.push_back(k);
        pts.push_back(k + 1);
    }
    const std::uint64_t horizon = *std::max_element(pts.begin(), pts.end());
    const std::size_t m = checkpoints.size();
    std::vector<std::vector<double>> dM(m, std::vector<double>(replicates)), dN = dM;

    parallel_for(replicates, threads, [&](std::size_t r) {
        const auto t = track(params, horizon, rng::derive(seed, r), pts, kind);
        const auto& s = t.series();
        for (std::size_t j = 0; j < m; ++j) {
            const auto idx = [&](std::uint64_t n) {
                return static_cast<std::size_t>(std::lower_bound(s.checkpoints.begin(), s.checkpoints.end(), n) -
                                                s.checkpoints.begin());
            };
            const std::size_t i0 = idx(checkpoints[j]), i1 = idx(checkpoints[j] + 1);
            dM[j][r] = s.M[i1] - s.M[i0];
            dN[j][r] = s.N[i1] - s.N[i0];
        }
    });

    std::vector<CheckResult> out;
    for (std::size_t j = 0; j < m; ++j) {
        const auto sm = stats::summarize(dM[j]), sn = stats::summarize(dN[j]);
        const std::string k = std::to_string(checkpoints[j]);
        out.push_back(se_check("mean_dM_" + k, 0.0, sm.mean, std::max(sm.se_mean, 1e-15), k_se));
        out.push_back(se_check("mean_dN_" + k, 0.0, sn.mean, std::max(sn.se_mean, 1e-15), k_se));
    }
    return out;
}

/// Pathwise checks on one tracked walk: reconstruction, the <N> closed form,
/// the <M> bound and the increment bounds.
inline std::vector<CheckResult> path_checks(const WalkParams& params, const Tracker& t)
{
    const auto& s = t.series();
    const auto& inc = t.increments();
    double recon = 0.0, qvn = 0.0, qvm_excess = -std::numeric_limits<double>::infinity();
    const double step = (params.c() / (params.a() + params.c())) * (params.c() / (params.a() + params.c())) *
                        (1.0 - params.a() * params.a());
    for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
        const double S = static_cast<double>(s.S[i]);
        recon = std::max(recon, std::abs(s.reconstruct(params, i) - S) / std::max(1.0, std::abs(S)));
        const double closed = step * static_cast<double>(s.checkpoints[i]);
        qvn = std::max(qvn, std::abs(s.qvN[i] - closed) / std::max(1.0, closed));
        qvm_excess = std::max(qvm_excess, s.qvM[i] - params.kappa() * s.v[i]);
    }
    return {upper_bound_check("reconstruction_rel_error", 1e-9, recon),
            upper_bound_check("qvN_closed_form_rel_error", 1e-12, qvn),
            upper_bound_check("qvM_minus_K_vn", 0.0, qvm_excess),
            upper_bound_check("max_abs_xi", 1.0 + std::abs(params.a()), inc.max_abs_xi),
            upper_bound_check("max_abs_eps", inc.eps_bound, inc.max_abs_eps)};
}

} // namespace rerw::martingale
