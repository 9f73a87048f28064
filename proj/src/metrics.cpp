#include "kbmom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace kbmom {

namespace {

void check_rows(std::span<const int> pred, std::span<const int> truth,
                std::span<const std::uint8_t> clean_mask) {
    if (pred.size() != truth.size() || pred.size() != clean_mask.size())
        throw std::invalid_argument("metrics: label/mask lengths differ");
}

// Contingency table over clean rows, with labels densified in sorted order.
struct Contingency {
    Matrix counts;  // rows: pred classes, cols: truth classes
    std::size_t n_clean = 0;
};

Contingency contingency(std::span<const int> pred, std::span<const int> truth,
                        std::span<const std::uint8_t> clean_mask) {
    std::map<int, std::size_t> pmap, tmap;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!clean_mask[i]) continue;
        pmap.emplace(pred[i], 0);
        tmap.emplace(truth[i], 0);
    }
    if (pmap.empty())
        throw std::invalid_argument("metrics: no clean rows");
    std::size_t idx = 0;
    for (auto& kv : pmap) kv.second = idx++;
    idx = 0;
    for (auto& kv : tmap) kv.second = idx++;

    Contingency out;
    out.counts = Matrix(pmap.size(), tmap.size(), 0.0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!clean_mask[i]) continue;
        out.counts(pmap.at(pred[i]), tmap.at(truth[i])) += 1.0;
        ++out.n_clean;
    }
    return out;
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

std::vector<std::size_t> min_cost_assignment(const Matrix& cost) {
    if (cost.rows() != cost.cols() || cost.rows() == 0)
        throw std::invalid_argument("min_cost_assignment: cost must be square and non-empty");
    const std::size_t n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();

    // Shortest-augmenting-path Hungarian with potentials, 1-based with a
    // virtual column 0.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = p[j0], j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
    return assignment;
}

double rmse_matched(const Matrix& fitted, const Matrix& truth) {
    if (fitted.rows() != truth.rows() || fitted.cols() != truth.cols())
        throw std::invalid_argument("rmse_matched: center matrices must share shape");
    if (fitted.rows() == 0)
        throw std::invalid_argument("rmse_matched: no centers");
    const std::size_t k = fitted.rows();

    Matrix cost(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            cost(i, j) = sq_dist(fitted.row(i), truth.row(j));

    double best = std::numeric_limits<double>::infinity();
    if (k <= 8) {
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        do {
            double total = 0.0;
            for (std::size_t j = 0; j < k; ++j) total += cost(perm[j], j);
            best = std::min(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        auto assignment = min_cost_assignment(cost);
        best = 0.0;
        for (std::size_t i = 0; i < k; ++i) best += cost(i, assignment[i]);
    }
    return std::sqrt(best / static_cast<double>(k));
}

double accuracy_matched(std::span<const int> pred, std::span<const int> truth,
                        std::span<const std::uint8_t> clean_mask) {
    check_rows(pred, truth, clean_mask);
    Contingency c = contingency(pred, truth, clean_mask);

    // Pad to square and negate: a min-cost assignment then maximizes matches.
    std::size_t side = std::max(c.counts.rows(), c.counts.cols());
    Matrix cost(side, side, 0.0);
    for (std::size_t i = 0; i < c.counts.rows(); ++i)
        for (std::size_t j = 0; j < c.counts.cols(); ++j)
            cost(i, j) = -c.counts(i, j);
    auto assignment = min_cost_assignment(cost);
    double matched = 0.0;
    for (std::size_t i = 0; i < side; ++i) matched -= cost(i, assignment[i]);
    return matched / static_cast<double>(c.n_clean);
}

double ari(std::span<const int> pred, std::span<const int> truth,
           std::span<const std::uint8_t> clean_mask) {
    check_rows(pred, truth, clean_mask);
    Contingency c = contingency(pred, truth, clean_mask);
    const double n = static_cast<double>(c.n_clean);
    if (c.n_clean < 2) return 1.0;  // single clean row: partitions agree trivially

    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (std::size_t i = 0; i < c.counts.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < c.counts.cols(); ++j) {
            index += comb2(c.counts(i, j));
            row += c.counts(i, j);
        }
        sum_a += comb2(row);
    }
    for (std::size_t j = 0; j < c.counts.cols(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < c.counts.rows(); ++i) col += c.counts(i, j);
        sum_b += comb2(col);
    }
    double total = comb2(n);
    double expected = sum_a * sum_b / total;
    double max_index = 0.5 * (sum_a + sum_b);
    if (std::abs(max_index - expected) <= 1e-9 * std::max(1.0, max_index))
        return 1.0;
    return (index - expected) / (max_index - expected);
}

double distortion_clean(const Matrix& points, std::span<const int> labels,
                        const Matrix& centers,
                        std::span<const std::uint8_t> clean_mask) {
    if (labels.size() != points.rows() || clean_mask.size() != points.rows())
        throw std::invalid_argument("distortion_clean: label/mask lengths differ");
    if (points.cols() != centers.cols())
        throw std::invalid_argument("distortion_clean: dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        if (!clean_mask[i]) continue;
        int lab = labels[i];
        if (lab < 0 || static_cast<std::size_t>(lab) >= centers.rows())
            throw std::invalid_argument("distortion_clean: label out of range");
        total += sq_dist(points.row(i), centers.row(lab));
    }
    return total;
}

std::size_t nb_clusters_clean(std::span<const int> labels,
                              std::span<const std::uint8_t> clean_mask) {
    if (labels.size() != clean_mask.size())
        throw std::invalid_argument("nb_clusters_clean: label/mask lengths differ");
    std::set<int> seen;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (clean_mask[i]) seen.insert(labels[i]);
    return seen.size();
}

}  // namespace kbmom
