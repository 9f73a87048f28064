#pragma once

// Block-size tuning: sweep candidate block sizes, run the robust init at each,
// and locate the contamination breakpoint in the per-datum median-block risk.

#include <cstdint>
#include <vector>

#include "kbmom/dataset.hpp"

namespace kbmom {

struct SweepPoint {
    std::size_t block_size = 0;
    double median_risk = 0.0;            // risk of the selected (median) block
    std::size_t outliers_in_median_block = 0;  // masked rows drawn, with multiplicity
    double clean_ari = 0.0;              // ARI of the induced partition on clean rows
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::size_t selected_block_size = 0;
    bool breakpoint_found = false;
};

struct BreakpointChoice {
    std::size_t selected = 0;  // index into the grid
    bool found = false;
};

// Normalizes each median risk by its block size (per-datum risk), scans the
// consecutive relative jumps (r[i+1]-r[i]) / max(r[i], 1e-12) in grid order, and
// selects the grid value just before the first jump exceeding tau. Without such
// a jump the largest grid value is returned with found = false. Needs >= 3 grid
// points, sorted ascending.
BreakpointChoice detect_breakpoint(const std::vector<std::size_t>& grid,
                                   const std::vector<double>& median_risks,
                                   double tau = 1.0);

// Runs the robust init (n_blocks blocks, k-means++ seeding) at every grid value
// and applies detect_breakpoint. Grid values must lie in [k, n/k] and ascend.
// clean_ari is NaN when the dataset has no true labels.
SweepResult blocksize_sweep(const Dataset& data, std::size_t k,
                            std::size_t n_blocks,
                            const std::vector<std::size_t>& grid,
                            std::uint64_t seed, unsigned workers = 1,
                            double tau = 1.0);

// Default sweep grid: geometric doubling from max(5, k+2) capped at n/k.
std::vector<std::size_t> default_grid(std::size_t n, std::size_t k);

}  // namespace kbmom
