#include "kbmom/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kbmom/clustering.hpp"
#include "kbmom/metrics.hpp"
#include "kbmom/parallel.hpp"
#include "kbmom/rng.hpp"

namespace kbmom {

BreakpointChoice detect_breakpoint(const std::vector<std::size_t>& grid,
                                   const std::vector<double>& median_risks,
                                   double tau) {
    if (grid.size() < 3)
        throw std::invalid_argument("detect_breakpoint: need at least 3 grid points");
    if (grid.size() != median_risks.size())
        throw std::invalid_argument("detect_breakpoint: grid/risk lengths differ");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == 0)
            throw std::invalid_argument("detect_breakpoint: grid values must be positive");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("detect_breakpoint: grid must ascend strictly");
    }

    std::vector<double> per_datum(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        per_datum[i] = median_risks[i] / static_cast<double>(grid[i]);

    // The contamination breakpoint is the first explosion of the per-datum risk;
    // later jumps only reflect blocks absorbing further outliers.
    for (std::size_t i = 0; i + 1 < per_datum.size(); ++i) {
        double jump = (per_datum[i + 1] - per_datum[i]) / std::max(per_datum[i], 1e-12);
        if (jump > tau) return {i, true};
    }
    return {grid.size() - 1, false};
}

SweepResult blocksize_sweep(const Dataset& data, std::size_t k,
                            std::size_t n_blocks,
                            const std::vector<std::size_t>& grid,
                            std::uint64_t seed, unsigned workers, double tau) {
    if (k == 0) throw std::invalid_argument("blocksize_sweep: k must be positive");
    if (n_blocks == 0)
        throw std::invalid_argument("blocksize_sweep: need at least one block");
    if (grid.size() < 3)
        throw std::invalid_argument("blocksize_sweep: need at least 3 grid points");
    std::size_t cap = std::max(k, data.n() / k);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < k || grid[i] > cap)
            throw std::invalid_argument("blocksize_sweep: grid values must lie in [k, n/k]");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("blocksize_sweep: grid must ascend strictly");
    }

    SweepResult out;
    out.points.resize(grid.size());
    auto clean = data.clean_mask();
    bool have_truth = !data.true_labels.empty();

    parallel_for(grid.size(), workers, [&](std::size_t i) {
        KbmomParams params;
        params.k = k;
        params.n_blocks = n_blocks;
        params.block_size = grid[i];
        InitSelection sel =
            kbmom_init(data, params, derive_key(seed, tag::sweep, i), 1);

        SweepPoint& pt = out.points[i];
        pt.block_size = grid[i];
        pt.median_risk = sel.median_risk;
        if (data.has_mask())
            for (std::size_t row : sel.median_block)
                if (data.outlier_mask[row]) ++pt.outliers_in_median_block;
        if (have_truth) {
            auto labels = assign(data.points, sel.centroids.centers);
            pt.clean_ari = ari(labels, data.true_labels, clean);
        } else {
            pt.clean_ari = std::numeric_limits<double>::quiet_NaN();
        }
    });

    std::vector<double> risks(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) risks[i] = out.points[i].median_risk;
    BreakpointChoice choice = detect_breakpoint(grid, risks, tau);
    out.selected_block_size = grid[choice.selected];
    out.breakpoint_found = choice.found;
    return out;
}

std::vector<std::size_t> default_grid(std::size_t n, std::size_t k) {
    if (k == 0) throw std::invalid_argument("default_grid: k must be positive");
    std::size_t cap = std::max(k, n / k);
    std::size_t start = std::max<std::size_t>(5, k + 2);
    std::vector<std::size_t> grid;
    for (std::size_t v = start; v <= cap; v *= 2) grid.push_back(v);
    if (grid.empty() || grid.back() < cap) grid.push_back(cap);
    return grid;
}

}  // namespace kbmom
