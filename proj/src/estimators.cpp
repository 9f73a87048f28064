#include "kbmom/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "kbmom/parallel.hpp"

namespace kbmom {

double lower_median(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("lower_median: empty input");
    std::vector<double> tmp(values.begin(), values.end());
    std::size_t k = (tmp.size() - 1) / 2;  // 0-based rank of ceil(n/2)
    std::nth_element(tmp.begin(), tmp.begin() + k, tmp.end());
    return tmp[k];
}

double mom_of_blocks(std::span<const double> sample,
                     const std::vector<std::vector<std::size_t>>& blocks) {
    if (blocks.empty())
        throw std::invalid_argument("mom_of_blocks: no blocks");
    std::vector<double> means;
    means.reserve(blocks.size());
    for (const auto& blk : blocks) {
        if (blk.empty())
            throw std::invalid_argument("mom_of_blocks: empty block");
        double s = 0.0;
        for (std::size_t idx : blk) {
            if (idx >= sample.size())
                throw std::invalid_argument("mom_of_blocks: index out of range");
            s += sample[idx];
        }
        means.push_back(s / static_cast<double>(blk.size()));
    }
    return lower_median(means);
}

double mom(std::span<const double> sample, const BlockPlan& plan, RngStream& rng) {
    if (plan.n_blocks == 0 || plan.block_size == 0)
        throw std::invalid_argument("mom: blocks and block size must be positive");
    std::size_t need = plan.n_blocks * plan.block_size;
    if (need > sample.size())
        throw std::invalid_argument("mom: plan needs more points than the sample has");
    std::vector<std::size_t> idx = rng.sample_without_replacement(sample.size(), need);
    std::vector<double> means(plan.n_blocks);
    for (std::size_t b = 0; b < plan.n_blocks; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < plan.block_size; ++j)
            s += sample[idx[b * plan.block_size + j]];
        means[b] = s / static_cast<double>(plan.block_size);
    }
    return lower_median(means);
}

double bmom(std::span<const double> sample, const BlockPlan& plan, RngStream& rng) {
    if (sample.empty())
        throw std::invalid_argument("bmom: empty sample");
    if (plan.n_blocks == 0 || plan.block_size == 0)
        throw std::invalid_argument("bmom: blocks and block size must be positive");
    std::vector<double> means(plan.n_blocks);
    for (std::size_t b = 0; b < plan.n_blocks; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < plan.block_size; ++j)
            s += sample[rng.next_below(sample.size())];
        means[b] = s / static_cast<double>(plan.block_size);
    }
    return lower_median(means);
}

std::vector<double> bmom_vector(const Matrix& sample, const BlockPlan& plan,
                                RngStream& rng) {
    if (sample.empty())
        throw std::invalid_argument("bmom_vector: empty sample");
    if (plan.n_blocks == 0 || plan.block_size == 0)
        throw std::invalid_argument("bmom_vector: blocks and block size must be positive");
    std::size_t p = sample.cols();
    Matrix block_means(plan.n_blocks, p, 0.0);
    for (std::size_t b = 0; b < plan.n_blocks; ++b) {
        auto mean = block_means.row(b);
        for (std::size_t j = 0; j < plan.block_size; ++j) {
            auto x = sample.row(rng.next_below(sample.rows()));
            for (std::size_t d = 0; d < p; ++d) mean[d] += x[d];
        }
        for (std::size_t d = 0; d < p; ++d)
            mean[d] /= static_cast<double>(plan.block_size);
    }
    std::vector<double> out(p);
    std::vector<double> col(plan.n_blocks);
    for (std::size_t d = 0; d < p; ++d) {
        for (std::size_t b = 0; b < plan.n_blocks; ++b) col[b] = block_means(b, d);
        out[d] = lower_median(col);
    }
    return out;
}

double mom_breakdown(const BlockPlan& plan, std::size_t n) {
    if (n == 0)
        throw std::invalid_argument("mom_breakdown: n must be positive");
    return static_cast<double>(plan.n_blocks / 2) / static_cast<double>(n);
}

double bmom_breakdown_limit(std::size_t block_size) {
    if (block_size == 0)
        throw std::invalid_argument("bmom_breakdown_limit: block size must be positive");
    return 1.0 - std::exp2(-1.0 / static_cast<double>(block_size));
}

ProbBound prob_breakdown_bound(std::size_t n, std::size_t m, std::size_t block_size,
                               std::size_t n_blocks) {
    if (n == 0 || block_size == 0 || n_blocks == 0)
        throw std::invalid_argument("prob_breakdown_bound: n, block size and blocks must be positive");
    if (m > n)
        throw std::invalid_argument("prob_breakdown_bound: m exceeds n");
    double clean = std::pow(1.0 - static_cast<double>(m) / static_cast<double>(n),
                            static_cast<double>(block_size));
    double margin = clean - 0.5;
    if (margin <= 0.0) return {0.0, true};
    double value = 1.0 - std::exp(-2.0 * static_cast<double>(n_blocks) * margin * margin);
    return {value, false};
}

PlanBounds plan_bounds(std::size_t n, std::size_t m, double target_risk,
                       std::optional<std::size_t> block_size) {
    if (n == 0)
        throw std::invalid_argument("plan_bounds: n must be positive");
    if (m > n)
        throw std::invalid_argument("plan_bounds: m exceeds n");
    if (!(target_risk > 0.0) || !(target_risk < 1.0))
        throw std::invalid_argument("plan_bounds: target risk must lie in (0, 1)");
    PlanBounds out;
    if (m == 0) {
        out.unbounded = true;
        return out;
    }
    double q = 1.0 - static_cast<double>(m) / static_cast<double>(n);  // clean fraction
    if (q <= 0.5)
        throw std::invalid_argument(
            "plan_bounds: contamination >= 1/2, no block size keeps a clean majority");
    // Largest n_B with q^n_B > 1/2; computed from the log ratio, then nudged to be
    // safe against boundary rounding.
    double raw = std::log(2.0) / std::log(1.0 / q);
    auto clean_prob = [&](std::size_t nb) {
        return std::pow(q, static_cast<double>(nb));
    };
    std::size_t nb = static_cast<std::size_t>(std::max(1.0, std::floor(raw)));
    while (clean_prob(nb) <= 0.5 && nb > 1) --nb;
    while (clean_prob(nb + 1) > 0.5) ++nb;
    if (clean_prob(nb) <= 0.5)
        throw std::invalid_argument("plan_bounds: infeasible, even single-point blocks fail");
    out.block_size_max = nb;

    std::size_t eval_nb = block_size.value_or(nb);
    if (eval_nb == 0)
        throw std::invalid_argument("plan_bounds: block size must be positive");
    double margin = clean_prob(eval_nb) - 0.5;
    if (margin <= 0.0)
        throw std::invalid_argument(
            "plan_bounds: requested block size exceeds the feasible maximum");
    double need = std::log(1.0 / target_risk) / (2.0 * margin * margin);
    out.blocks_min = static_cast<std::size_t>(std::floor(need)) + 1;  // smallest integer > need
    out.blocks_min_at = eval_nb;
    return out;
}

BreakdownReport mc_breakdown(std::size_t n, std::size_t m, std::size_t block_size,
                             std::size_t n_blocks, std::size_t trials,
                             std::uint64_t seed, unsigned workers) {
    if (trials == 0)
        throw std::invalid_argument("mc_breakdown: trials must be positive");
    if (m > n)
        throw std::invalid_argument("mc_breakdown: m exceeds n");
    BreakdownReport report;
    report.deterministic_bdp = mom_breakdown({n_blocks, block_size}, n);
    report.bmom_limit = bmom_breakdown_limit(block_size);
    ProbBound pb = prob_breakdown_bound(n, m, block_size, n_blocks);
    report.prob_lower_bound = pb.value;
    report.bound_degenerate = pb.degenerate;
    report.mc_trials = trials;

    // Corrupted rows are indices [0, m): with uniform draws only the count matters.
    std::vector<std::uint8_t> success(trials, 0);
    parallel_for(trials, workers, [&](std::size_t t) {
        RngStream rng(derive_key(seed, tag::mc_trial, t));
        std::size_t clean_blocks = 0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            bool clean = true;
            for (std::size_t j = 0; j < block_size; ++j)
                if (rng.next_below(n) < m) clean = false;
            if (clean) ++clean_blocks;
        }
        success[t] = 2 * clean_blocks > n_blocks ? 1 : 0;  // strict majority
    });
    std::size_t wins = 0;
    for (auto s : success) wins += s;
    report.mc_estimate = static_cast<double>(wins) / static_cast<double>(trials);
    return report;
}

}  // namespace kbmom
