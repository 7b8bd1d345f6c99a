#pragma once

#include "params.hpp"
#include "rng.hpp"
#include "sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rerw {

/// Signs X_1..X_n packed one bit per step (set = +1).
class SignHistory
{
public:
    void push_back(int sign)
    {
        const std::uint64_t i = size_;
        if ((i & 63) == 0) words_.push_back(0);
        if (sign > 0) words_.back() |= std::uint64_t{1} << (i & 63);
        ++size_;
    }

    /// X_k for 1 <= k <= size().
    int operator[](std::uint64_t k) const
    {
        const std::uint64_t i = k - 1;
        return ((words_[i >> 6] >> (i & 63)) & 1) ? 1 : -1;
    }

    std::uint64_t size() const noexcept { return size_; }
    std::size_t memory_bytes() const noexcept { return words_.capacity() * sizeof(std::uint64_t); }

private:
    std::vector<std::uint64_t> words_;
    std::uint64_t size_ = 0;
};

/// The random ingredients of one step: X_{n+1} = alpha * X_beta.
struct StepProposal
{
    int alpha = 1;
    std::uint64_t beta = 1;
    int x_beta = 1;
};

/// Everything observable about the step that produced time n.
struct StepRecord
{
    std::uint64_t n = 1;
    int alpha = 0;          // 0 at n = 1 (no memory step)
    std::uint64_t beta = 0; // 0 at n = 1
    int x_beta = 0;
    int x = 0;
    std::int64_t S = 0;
    double Y = 0.0;
    double Y_prev = 0.0;
};

/// A single reinforced elephant random walk. `Memory` is RecordMemory or
/// TreeMemory; both produce the same law for beta.
template <class Memory = RecordMemory>
class Walk
{
public:
    Walk(const WalkParams& params, std::uint64_t seed)
        : params_(params), rng_(seed), memory_(params.c())
    {
        const int x1 = rng::uniform(rng_) < params_.q() ? 1 : -1;
        signs_.push_back(x1);
        S_ = x1;
        Y_ = x1;
    }

    const WalkParams& params() const noexcept { return params_; }
    std::uint64_t time() const noexcept { return signs_.size(); }
    std::int64_t position() const noexcept { return S_; }
    double weighted_sum() const noexcept { return Y_; }
    int sign(std::uint64_t k) const { return signs_[k]; }
    const Memory& memory() const noexcept { return memory_; }
    rng::Xoshiro256ss& engine() noexcept { return rng_; }

    StepRecord initial() const
    {
        StepRecord r;
        r.n = 1;
        r.x = signs_[1];
        r.S = S_;
        r.Y = Y_;
        return r;
    }

    /// Draws (beta_{n+1}, alpha_{n+1}) without changing the walk.
    template <class Gen>
    StepProposal propose(Gen& gen) const
    {
        StepProposal s;
        s.beta = memory_.draw(gen);
        s.alpha = rng::uniform(gen) < params_.p() ? 1 : -1;
        s.x_beta = signs_[s.beta];
        return s;
    }

    StepRecord commit(const StepProposal& s)
    {
        StepRecord r;
        r.alpha = s.alpha;
        r.beta = s.beta;
        r.x_beta = s.x_beta;
        r.x = s.alpha * s.x_beta;
        r.Y_prev = Y_;

        S_ += r.x;
        Y_ += (s.alpha + params_.c()) * s.x_beta;
        memory_.advance(s.beta);
        signs_.push_back(r.x);

        r.n = time();
        r.S = S_;
        r.Y = Y_;
        return r;
    }

    StepRecord step() { return commit(propose(rng_)); }

    std::size_t memory_bytes() const noexcept { return memory_.memory_bytes() + signs_.memory_bytes(); }

private:
    WalkParams params_;
    rng::Xoshiro256ss rng_;
    Memory memory_;
    SignHistory signs_;
    std::int64_t S_ = 0;
    double Y_ = 0.0;
};

/// Calls `fn(walk)` with a freshly seeded walk on the chosen backend.
template <class Fn>
decltype(auto) with_walk(SamplerKind kind, const WalkParams& params, std::uint64_t seed, Fn&& fn)
{
    if (kind == SamplerKind::Tree) {
        Walk<TreeMemory> w(params, seed);
        return std::forward<Fn>(fn)(w);
    }
    Walk<RecordMemory> w(params, seed);
    return std::forward<Fn>(fn)(w);
}

/// Runs n_steps steps and hands every StepRecord (including n = 1) to `observer`.
template <class Observer>
void simulate(const WalkParams& params, std::uint64_t n_steps, std::uint64_t seed,
              SamplerKind kind, Observer&& observer)
{
    if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
    with_walk(kind, params, seed, [&](auto& walk) {
        observer(walk.initial());
        for (std::uint64_t k = 2; k <= n_steps; ++k) observer(walk.step());
    });
}

// Trajectories ---------------------------------------------------------------

struct TrajectoryPoint
{
    std::uint64_t step = 0;
    std::int64_t S = 0;
    double Y = 0.0;

    friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct Trajectory
{
    WalkParams params;
    std::uint64_t seed = 0;
    SamplerKind sampler = SamplerKind::Record;
    std::vector<TrajectoryPoint> records;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Sorted, de-duplicated checkpoints within [1, n_steps], always starting at 1.
inline std::vector<std::uint64_t> normalize_checkpoints(std::vector<std::uint64_t> checkpoints,
                                                        std::uint64_t n_steps)
{
    for (auto k : checkpoints)
        if (k < 1 || k > n_steps)
            throw std::out_of_range("checkpoint " + std::to_string(k) + " is outside [1, " +
                                    std::to_string(n_steps) + "]");
    checkpoints.push_back(1);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    return checkpoints;
}

inline Trajectory run(const WalkParams& params, std::uint64_t n_steps, std::uint64_t seed,
                      std::vector<std::uint64_t> checkpoints, SamplerKind kind = SamplerKind::Record)
{
    if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
    checkpoints = normalize_checkpoints(std::move(checkpoints), n_steps);
    Trajectory t{params, seed, kind, {}};
    t.records.reserve(checkpoints.size());
    std::size_t next = 0;
    simulate(params, checkpoints.back(), seed, kind, [&](const StepRecord& r) {
        if (next < checkpoints.size() && r.n == checkpoints[next]) {
            t.records.push_back({r.n, r.S, r.Y});
            ++next;
        }
    });
    return t;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double x)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, end);
}

inline void write_csv(const Trajectory& t, std::ostream& out)
{
    out << "step,S,Y\n";
    for (const auto& r : t.records) out << r.step << ',' << r.S << ',' << format_double(r.Y) << '\n';
}

inline std::vector<TrajectoryPoint> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "step,S,Y")
        throw std::runtime_error("trajectory CSV: expected header 'step,S,Y'");
    std::vector<TrajectoryPoint> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TrajectoryPoint p;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
            throw std::runtime_error("trajectory CSV: malformed row '" + line + "'");
        p.step = std::stoull(a);
        p.S = std::stoll(b);
        p.Y = std::stod(c);
        out.push_back(p);
    }
    return out;
}

} // namespace rerw
