#pragma once

// Evaluation metrics. Everything is computed on clean rows only (mask 1 =
// clean); datasets without contamination pass an all-ones mask.

#include <cstdint>
#include <span>
#include <vector>

#include "kbmom/matrix.hpp"

namespace kbmom {

// Root mean squared error between fitted and true centers under the best
// center-to-center matching: sqrt(min over permutations of
// sum_k ||fitted_{perm(k)} - true_k||^2 / K). Exhaustive for K <= 8, assignment
// solver beyond that (same optimum).
double rmse_matched(const Matrix& fitted, const Matrix& truth);

// Exact-match rate on clean rows, maximized over permutations of predicted
// label values onto true values.
double accuracy_matched(std::span<const int> pred, std::span<const int> truth,
                        std::span<const std::uint8_t> clean_mask);

// Adjusted Rand index on clean rows; returns 1 when the pair index and its
// expectation coincide (e.g. both partitions a single class).
double ari(std::span<const int> pred, std::span<const int> truth,
           std::span<const std::uint8_t> clean_mask);

// Sum of squared distances from clean rows to their assigned centers.
double distortion_clean(const Matrix& points, std::span<const int> labels,
                        const Matrix& centers,
                        std::span<const std::uint8_t> clean_mask);

// Number of distinct labels among clean rows.
std::size_t nb_clusters_clean(std::span<const int> labels,
                              std::span<const std::uint8_t> clean_mask);

// Minimum-cost square assignment (Hungarian, O(K^3)); exposed for the solver
// cross-checks. cost is K x K.
std::vector<std::size_t> min_cost_assignment(const Matrix& cost);

}  // namespace kbmom
