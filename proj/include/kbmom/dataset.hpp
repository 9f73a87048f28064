#pragma once

// A dataset is an n×p point matrix with optional per-row metadata: ground-truth
// component labels and an outlier mask (1 = contaminated row). Metrics evaluate
// on clean rows only, so the mask is the authoritative record of contamination.

#include <cstdint>
#include <vector>

#include "kbmom/matrix.hpp"

namespace kbmom {

struct Dataset {
    Matrix points;
    std::vector<int> true_labels;        // empty when unknown
    std::vector<std::uint8_t> outlier_mask;  // empty means "all clean"

    std::size_t n() const { return points.rows(); }
    std::size_t dim() const { return points.cols(); }
    bool has_labels() const { return !true_labels.empty(); }
    bool has_mask() const { return !outlier_mask.empty(); }

    // 1 = clean. Datasets without a mask are entirely clean.
    std::vector<std::uint8_t> clean_mask() const {
        std::vector<std::uint8_t> m(n(), 1);
        if (has_mask())
            for (std::size_t i = 0; i < n(); ++i) m[i] = outlier_mask[i] ? 0 : 1;
        return m;
    }
};

}  // namespace kbmom
