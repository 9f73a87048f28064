#pragma once

// Non-robust baselines: Lloyd k-means, k-medians (Manhattan assignment,
// coordinatewise lower-median update) and trimmed k-means (hard trimming at the
// update step only). Plus the shared seedings and best-of-restart drivers.

#include <cstdint>

#include "kbmom/clustering.hpp"
#include "kbmom/dataset.hpp"
#include "kbmom/rng.hpp"

namespace kbmom {

struct BaselineParams {
    std::size_t k = 0;        // 0 = unset; fits reject it, the experiment
                              // harness substitutes the scenario's K
    std::size_t max_iter = 300;
    double tol = 1e-6;        // relative change of the objective between rounds
    std::size_t n_init = 10;  // restarts in the *_best_of drivers
    double trim_alpha = 0.0;  // fraction trimmed per update (trimmed k-means only)
};

// K rows chosen uniformly without replacement (distinct indices, not
// necessarily distinct values). Throws when the dataset has fewer than k rows.
Matrix init_random(const Dataset& data, std::size_t k, RngStream& rng);

// Classic (single-draw) k-means++ seeding over the full dataset (power 2) or
// the k-medians++ variant (power 1). Requires at least k distinct rows.
Matrix init_kmpp(const Dataset& data, std::size_t k, RngStream& rng, int power = 2);

// Lloyd iterations from an explicit K x p init. Empty clusters are re-seeded to
// the point farthest from its assigned center. The recorded distortion sequence
// is non-increasing; stops when its relative change drops to tol or at max_iter.
ClusteringResult kmeans_fit(const Dataset& data, const BaselineParams& params,
                            const Matrix& init);

// Same loop under Manhattan distance with coordinatewise lower-median updates.
ClusteringResult kmedians_fit(const Dataset& data, const BaselineParams& params,
                              const Matrix& init);

// k-means whose update step ignores the ceil(alpha * n) points farthest from
// their centers. Final labels still cover every point; `retained` marks the rows
// kept by the last update. alpha = 0 reproduces kmeans_fit bit for bit.
ClusteringResult trimmed_kmeans_fit(const Dataset& data, const BaselineParams& params,
                                    const Matrix& init);

// n_init k-means++ seeded runs; winner by (final objective, restart index).
ClusteringResult kmeans_best_of(const Dataset& data, const BaselineParams& params,
                                std::uint64_t seed);
ClusteringResult kmedians_best_of(const Dataset& data, const BaselineParams& params,
                                  std::uint64_t seed);
ClusteringResult trimmed_kmeans_best_of(const Dataset& data,
                                        const BaselineParams& params,
                                        std::uint64_t seed);

struct SubsetFit {
    bool valid = false;
    double risk = 0.0;
    CentroidSet centroids;
};

// Lloyd k-means restricted to the rows listed in view (a bootstrap multiset),
// used by the one-shot block variant. Flags the fit instead of throwing when
// the subset cannot support k non-empty clusters.
SubsetFit lloyd_fit_subset(const Dataset& data, const std::vector<std::size_t>& view,
                           const Matrix& init, std::size_t max_iter, double tol);

}  // namespace kbmom
