#pragma once

// Clustering core: nearest-center assignment, bootstrap blocks, per-block risk,
// median-block selection, the robust init + iterative fit, and the one-shot
// block variant. All randomness flows through derived counter streams, so a fit
// is bit-identical for a given seed regardless of worker count.

#include <cstdint>
#include <optional>
#include <vector>

#include "kbmom/dataset.hpp"
#include "kbmom/matrix.hpp"
#include "kbmom/rng.hpp"

namespace kbmom {

struct CentroidSet {
    Matrix centers;                        // K x p
    std::vector<double> within_variances;  // mean squared distance per cluster
    std::size_t k() const { return centers.rows(); }
};

struct ClusteringResult {
    std::vector<int> labels;
    CentroidSet centroids;
    std::vector<double> risk_trace;  // median-block risk per iteration
    bool converged = false;
    std::size_t iterations = 0;
    double objective = 0.0;               // final risk / distortion
    std::vector<std::uint8_t> retained;   // set by trimmed fits only (1 = kept)
};

struct KbmomParams {
    std::size_t k = 0;               // 0 = unset; fits reject it, the experiment
                                     // harness substitutes the scenario's K
    std::size_t n_blocks = 250;      // blocks drawn per round
    std::size_t block_size = 0;      // points per block; must exceed k for fits
                                     // (0 = unset; the harness substitutes 6*k)
    double epsilon = 1e-3;           // stopping threshold on the Aitken criterion
    std::size_t max_iter = 50;
    int seeding_power = 2;           // 2: squared-distance weights, 1: distance weights
    std::size_t max_block_retries = 100;  // full resamples before giving up a round
};

// Nearest center under squared Euclidean distance; ties go to the lowest index.
std::vector<int> assign(const Matrix& points, const Matrix& centers);
int assign_point(std::span<const double> x, const Matrix& centers);

// block_size uniform draws with replacement from [0, n).
std::vector<std::size_t> sample_block(std::size_t n, std::size_t block_size,
                                      RngStream& rng);

// k-means++-style seeding restricted to the rows listed in view (a bootstrap
// multiset): first seed uniform; each later step draws `trials` candidates with
// probability proportional to the distance to the chosen set raised to `power`.
// With trials == 1 the draw is adopted as-is (classic sampling); with more, the
// candidate minimising the remaining potential wins (greedy variant, ties by
// lowest view position). Falls back to uniform over unchosen positions when
// every weight is zero. Returns dataset row indices.
std::vector<std::size_t> seed_plusplus(const Dataset& data,
                                       const std::vector<std::size_t>& view,
                                       std::size_t k, int power, RngStream& rng,
                                       std::size_t trials);

struct BlockFit {
    bool valid = false;  // false when some cluster received no block point
    double risk = 0.0;
    CentroidSet centroids;
};

// Assigns the block's points to the given centers, recomputes per-cluster means,
// and returns the risk (sum of squared distances to the recomputed means) plus
// the means and within variances. Blocks leaving a cluster empty are flagged.
BlockFit block_risk(const Dataset& data, const std::vector<std::size_t>& block,
                    const Matrix& centers);

// Lower-median risk among valid blocks; ties broken by the lowest block id.
// Returns nothing when every block is flagged.
std::optional<std::pair<std::size_t, double>> median_block_select(
    const std::vector<BlockFit>& fits);

struct AitkenResult {
    bool degenerate = false;  // flat or unit-acceleration trace: treat as converged
    double accel = 0.0;       // estimated geometric factor
    double crit = 0.0;        // extrapolated remaining change
};

// Aitken acceleration over the last three risks r_{q-2}, r_{q-1}, r_q:
// accel = (r_q - r_{q-1}) / (r_{q-1} - r_{q-2}), crit = (r_q - r_{q-1}) / (1 - accel).
// Denominators below 1e-12 in magnitude set the degenerate flag.
AitkenResult aitken_step(double r_prev2, double r_prev1, double r_curr);

struct InitSelection {
    CentroidSet centroids;                 // recomputed means of the median block
    double median_risk = 0.0;
    std::vector<std::size_t> median_block; // the winning block's row draws
};

// Robust init: draws n_blocks bootstrap blocks, seeds each with seed_plusplus,
// scores each with block_risk (the seed partition evaluated at its own means,
// no Lloyd pass), and adopts the median-risk block — its returned centers are
// the cluster means induced by the winning block's seed partition. Requires at
// least k distinct rows in the dataset.
InitSelection kbmom_init(const Dataset& data, const KbmomParams& params,
                         std::uint64_t seed, unsigned workers = 1);

// Full iterative fit: after the robust init, each round draws fresh blocks,
// assigns block points to the current centers, recomputes per-block means and
// risks, and adopts the median-risk block. Stops on the Aitken criterion or at
// max_iter. Rounds where every block is flagged are resampled up to
// max_block_retries times before a degenerate-iteration error is raised.
// Final labels assign all points to the last adopted centers.
ClusteringResult kbmom_fit(const Dataset& data, const KbmomParams& params,
                           std::uint64_t seed, unsigned workers = 1);

// One-shot variant: blocks are drawn once, a full k-means (seeded in-block) runs
// inside each, and the median-risk block's converged centers define the final
// partition of the whole dataset.
ClusteringResult block_kmom_fit(const Dataset& data, const KbmomParams& params,
                                std::uint64_t seed, unsigned workers = 1);

// Number of distinct rows (exact comparison), used for feasibility checks.
std::size_t distinct_rows(const Matrix& points);

}  // namespace kbmom
