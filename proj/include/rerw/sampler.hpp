#pragma once

#include "rng.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rerw {

// Memory index sampling.
//
// After n steps the instant k <= n carries weight
//     rho_n(k) = 1 + c * #{ j <= n : beta_j = k },
// so the total is (c+1)n - c and beta_{n+1} is drawn proportionally to rho_n.
// Indices are 1-based throughout, as in the model.

enum class SamplerKind { Record, Tree };

inline std::string_view to_string(SamplerKind k)
{
    return k == SamplerKind::Record ? "record" : "tree";
}

inline SamplerKind sampler_from_string(std::string_view s)
{
    if (s == "record") return SamplerKind::Record;
    if (s == "tree") return SamplerKind::Tree;
    throw std::invalid_argument("unknown sampler '" + std::string(s) + "' (expected record|tree)");
}

/// Throws unless history[i] (= beta_{i+2}) lies in [1, i+1].
inline void validate_history(std::span<const std::uint64_t> history)
{
    for (std::size_t i = 0; i < history.size(); ++i) {
        const std::uint64_t j = i + 2;
        if (history[i] < 1 || history[i] > j - 1)
            throw std::invalid_argument("invalid history: beta_" + std::to_string(j) + " = " +
                                        std::to_string(history[i]) + " is outside [1, " +
                                        std::to_string(j - 1) + "]");
    }
}

/// Exact law of beta_{n+1} given beta_2..beta_n, n = history.size() + 1.
/// Entry k-1 is rho_n(k) / ((c+1)n - c).
inline std::vector<double> exact_distribution(std::span<const std::uint64_t> history, double c)
{
    if (!(c >= 0.0)) throw std::invalid_argument("exact_distribution: c must be non-negative");
    validate_history(history);
    const std::size_t n = history.size() + 1;
    std::vector<double> weight(n, 1.0);
    for (auto beta : history) weight[beta - 1] += c;
    const double total = (c + 1.0) * static_cast<double>(n) - c;
    for (auto& w : weight) w /= total;
    return weight;
}

// ---------------------------------------------------------------------------

/// O(1) sampler built on the mixture
///     rho_n / D_n = (n / D_n) * Uniform{1..n} + (c(n-1) / D_n) * Uniform(history),
/// which is exact because every past draw beta_j contributes mass c to one
/// index and the base mass is 1 per index. Each draw consumes two words.
class RecordMemory
{
public:
    explicit RecordMemory(double c) : c_(c) {}

    RecordMemory(double c, std::span<const std::uint64_t> history) : c_(c)
    {
        validate_history(history);
        for (auto b : history) advance(b);
    }

    std::uint64_t time() const noexcept { return n_; }
    double c() const noexcept { return c_; }
    double total_weight() const noexcept { return (c_ + 1.0) * static_cast<double>(n_) - c_; }

    template <class Gen>
    std::uint64_t draw(Gen& gen) const
    {
        const double branch = rng::uniform(gen);
        const std::uint64_t word = gen();
        const double n = static_cast<double>(n_);
        if (branch * total_weight() < n) return 1 + rng::to_bounded(word, n_);
        return history_at(rng::to_bounded(word, n_ - 1));
    }

    /// Records beta_{n+1} = beta and moves to time n+1.
    void advance(std::uint64_t beta)
    {
        if (!wide_mode_ && n_ + 1 < kNarrowLimit) {
            narrow_.push_back(static_cast<std::uint32_t>(beta));
        } else {
            widen();
            wide_.push_back(beta);
        }
        ++n_;
    }

    std::uint64_t history_size() const noexcept { return n_ - 1; }

    /// beta_{i+2}.
    std::uint64_t history_at(std::uint64_t i) const
    {
        return wide_mode_ ? wide_[i] : narrow_[i];
    }

    /// Weight of index k, by counting. O(n); for diagnostics.
    double weight(std::uint64_t k) const
    {
        if (k < 1 || k > n_) return 0.0;
        double w = 1.0;
        for (std::uint64_t i = 0; i < history_size(); ++i)
            if (history_at(i) == k) w += c_;
        return w;
    }

    /// Law induced by the two-branch mixture, assembled branch by branch.
    std::vector<double> law() const
    {
        const double n = static_cast<double>(n_);
        const double base = n / total_weight();
        std::vector<double> out(n_, base / n);
        if (n_ > 1) {
            const double per_record = (1.0 - base) / static_cast<double>(n_ - 1);
            for (std::uint64_t i = 0; i < history_size(); ++i) out[history_at(i) - 1] += per_record;
        }
        return out;
    }

    std::size_t memory_bytes() const noexcept
    {
        return narrow_.capacity() * sizeof(std::uint32_t) + wide_.capacity() * sizeof(std::uint64_t);
    }

    bool is_wide() const noexcept { return wide_mode_; }

    /// For tests: lowers the switch-over point to 64-bit storage.
    void force_wide() { widen(); }

private:
    static constexpr std::uint64_t kNarrowLimit = std::uint64_t{1} << 31;

    void widen()
    {
        if (wide_mode_) return;
        wide_.assign(narrow_.begin(), narrow_.end());
        narrow_.clear();
        narrow_.shrink_to_fit();
        wide_mode_ = true;
    }

    double c_;
    std::uint64_t n_ = 1;
    std::vector<std::uint32_t> narrow_;
    std::vector<std::uint64_t> wide_;
    bool wide_mode_ = false;
};

// ---------------------------------------------------------------------------

/// Growable Fenwick tree over double weights, 1-based.
class FenwickTree
{
public:
    std::uint64_t size() const noexcept { return tree_.size() - 1; }
    double total() const noexcept { return total_; }

    void push_back(double w)
    {
        const std::uint64_t i = size() + 1;
        const std::uint64_t lo = i - (i & (~i + 1));
        // Node i covers (lo, i]: its own weight plus the already-present (lo, i-1].
        tree_.push_back(w + prefix(i - 1) - prefix(lo));
        total_ += w;
    }

    void add(std::uint64_t i, double delta)
    {
        total_ += delta;
        for (; i <= size(); i += i & (~i + 1)) tree_[i] += delta;
    }

    double prefix(std::uint64_t i) const
    {
        double s = 0.0;
        for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

    double at(std::uint64_t i) const { return prefix(i) - prefix(i - 1); }

    /// Smallest k with prefix(k) > target, clamped to [1, size()].
    std::uint64_t lower_search(double target) const
    {
        std::uint64_t pos = 0;
        std::uint64_t step = 1;
        while (step * 2 <= size()) step *= 2;
        for (; step > 0; step >>= 1) {
            const std::uint64_t next = pos + step;
            if (next <= size() && tree_[next] <= target) {
                pos = next;
                target -= tree_[next];
            }
        }
        return std::min<std::uint64_t>(pos + 1, size());
    }

private:
    std::vector<double> tree_ = {0.0};
    double total_ = 0.0;
};

/// O(log n) inverse-prefix-sum sampler over the explicit weights rho_n(k).
/// Consumes two words per draw (the second is reserved) to stay
/// count-compatible with RecordMemory.
class TreeMemory
{
public:
    explicit TreeMemory(double c) : c_(c) { tree_.push_back(1.0); }

    TreeMemory(double c, std::span<const std::uint64_t> history) : TreeMemory(c)
    {
        validate_history(history);
        for (auto b : history) advance(b);
    }

    std::uint64_t time() const noexcept { return tree_.size(); }
    double c() const noexcept { return c_; }
    double total_weight() const noexcept { return tree_.total(); }

    template <class Gen>
    std::uint64_t draw(Gen& gen) const
    {
        const double u = rng::uniform(gen);
        (void)gen();
        return tree_.lower_search(u * tree_.total());
    }

    void advance(std::uint64_t beta)
    {
        tree_.add(beta, c_);
        tree_.push_back(1.0);
    }

    double weight(std::uint64_t k) const { return k >= 1 && k <= time() ? tree_.at(k) : 0.0; }

    std::vector<double> law() const
    {
        std::vector<double> out(time());
        for (std::uint64_t k = 1; k <= time(); ++k) out[k - 1] = tree_.at(k) / tree_.total();
        return out;
    }

    std::size_t memory_bytes() const noexcept { return time() * sizeof(double); }

private:
    double c_;
    FenwickTree tree_;
};

} // namespace rerw
