#pragma once

// Median-of-means estimation and its bootstrap variant, plus breakdown-point
// tooling (closed forms, probabilistic lower bound, Monte-Carlo check).
//
// Median convention everywhere: the lower median, i.e. the value of ascending
// rank ceil(B/2) among B entries. It is always a realized element and satisfies
// the counting definition #{a_k <= med} >= B/2 and #{a_k >= med} >= B/2.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kbmom/matrix.hpp"
#include "kbmom/rng.hpp"

namespace kbmom {

// Lower median of a non-empty list. Throws std::invalid_argument when empty.
double lower_median(std::span<const double> values);

struct BlockPlan {
    std::size_t n_blocks = 1;    // B
    std::size_t block_size = 1;  // points per block
};

// Median of block means over an explicit partition: blocks[b] holds indices into
// sample. Every block must be non-empty.
double mom_of_blocks(std::span<const double> sample,
                     const std::vector<std::vector<std::size_t>>& blocks);

// Median-of-means over B disjoint blocks of size block_size: indices are
// shuffled once with the stream, then cut into consecutive segments (leftover
// points unused). Requires B * block_size <= n.
double mom(std::span<const double> sample, const BlockPlan& plan, RngStream& rng);

// Bootstrap median-of-means: draws B * block_size sample points uniformly with
// replacement, forms consecutive blocks, returns the lower median of the block
// means. Any (B, block_size) with B, block_size >= 1 is valid.
double bmom(std::span<const double> sample, const BlockPlan& plan, RngStream& rng);

// Coordinatewise bootstrap MOM for vector samples: one shared set of row draws,
// block mean vectors, per-coordinate lower median across blocks.
std::vector<double> bmom_vector(const Matrix& sample, const BlockPlan& plan,
                                RngStream& rng);

// Deterministic breakdown point of partition MOM: floor(B/2) / n.
double mom_breakdown(const BlockPlan& plan, std::size_t n);

// Large-B limit of the bootstrap MOM breakdown point: 1 - 2^(-1/block_size).
// Exceeds 1/(2*block_size) for every block size.
double bmom_breakdown_limit(std::size_t block_size);

struct ProbBound {
    double value = 0.0;    // lower bound on P(estimator uncorrupted)
    bool degenerate = false;  // set when (1 - m/n)^block_size <= 1/2 (bound vacuous)
};

// Hoeffding lower bound on the probability that the bootstrap median block is
// outlier-free: 1 - exp(-2B * D^2) with D = (1 - m/n)^block_size - 1/2.
ProbBound prob_breakdown_bound(std::size_t n, std::size_t m, std::size_t block_size,
                               std::size_t n_blocks);

struct PlanBounds {
    bool unbounded = false;        // m == 0: any block size works
    std::size_t block_size_max = 0;  // largest size keeping (1-m/n)^n_B > 1/2
    std::size_t blocks_min = 0;      // B needed for failure probability <= target_risk
    std::size_t blocks_min_at = 0;   // the block size blocks_min was evaluated at
};

// Feasible-plan bounds for contamination m out of n. blocks_min is evaluated at
// the caller-supplied block size when given, else at block_size_max. Throws when
// m >= n/2 (no block size keeps a clean majority).
PlanBounds plan_bounds(std::size_t n, std::size_t m, double target_risk,
                       std::optional<std::size_t> block_size = std::nullopt);

struct BreakdownReport {
    double deterministic_bdp = 0.0;  // partition MOM: floor(B/2)/n
    double bmom_limit = 0.0;         // 1 - 2^(-1/block_size)
    double prob_lower_bound = 0.0;   // Hoeffding bound (0 when degenerate)
    bool bound_degenerate = false;
    double mc_estimate = 0.0;        // fraction of trials with a clean majority
    std::size_t mc_trials = 0;
};

// Monte-Carlo estimate of P(majority of bootstrap blocks avoid the m corrupted
// points) for the given plan, alongside the closed forms. Deterministic in seed,
// independent of worker count.
BreakdownReport mc_breakdown(std::size_t n, std::size_t m, std::size_t block_size,
                             std::size_t n_blocks, std::size_t trials,
                             std::uint64_t seed, unsigned workers = 1);

}  // namespace kbmom
