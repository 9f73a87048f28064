#include "kbmom/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kbmom/estimators.hpp"

namespace kbmom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective change small enough to stop. The max() guard keeps the relative
// test meaningful when the objective reaches zero.
bool small_change(double prev, double curr, double tol) {
    if (prev == kInf) return false;
    return (prev - curr) <= tol * std::max(prev, 1e-300);
}

// Re-seeds empty clusters to the point farthest from its assigned center,
// next-farthest for the next empty cluster, lowest index on ties. `eligible`
// restricts the candidate pool (trimming); pass nullptr for all points.
void repair_empty(const Matrix& points, const std::vector<double>& d2,
                  const std::vector<std::uint8_t>* eligible,
                  const std::vector<std::size_t>& counts, Matrix& centers) {
    std::vector<std::uint8_t> used(points.rows(), 0);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] != 0) continue;
        std::size_t far = points.rows();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (used[i]) continue;
            if (eligible && !(*eligible)[i]) continue;
            if (d2[i] > far_d) {
                far_d = d2[i];
                far = i;
            }
        }
        if (far == points.rows()) continue;  // nothing left to donate
        used[far] = 1;
        auto src = points.row(far);
        std::copy(src.begin(), src.end(), centers.row(k).begin());
    }
}

// Smallest integer >= alpha * n, guarded against FP noise in the product.
std::size_t trim_count(double alpha, std::size_t n) {
    double v = alpha * static_cast<double>(n);
    return static_cast<std::size_t>(std::llround(std::ceil(v - 1e-9)));
}

void validate_fit(const Dataset& data, const BaselineParams& params,
                  const Matrix& init) {
    if (params.k == 0)
        throw std::invalid_argument("baseline fit: k must be positive");
    if (data.n() == 0)
        throw std::invalid_argument("baseline fit: empty dataset");
    if (init.rows() != params.k || init.cols() != data.dim())
        throw std::invalid_argument("baseline fit: init has wrong shape");
    if (params.max_iter == 0)
        throw std::invalid_argument("baseline fit: max_iter must be positive");
    if (params.tol < 0.0)
        throw std::invalid_argument("baseline fit: tol must be non-negative");
}

void finish_result(const Dataset& data, ClusteringResult& result) {
    std::size_t k = result.centroids.centers.rows();
    std::vector<double> wss(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < data.n(); ++i) {
        int lab = result.labels[i];
        wss[lab] += sq_dist(data.points.row(i), result.centroids.centers.row(lab));
        ++counts[lab];
    }
    result.centroids.within_variances.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] > 0)
            result.centroids.within_variances[c] =
                wss[c] / static_cast<double>(counts[c]);
}

}  // namespace

Matrix init_random(const Dataset& data, std::size_t k, RngStream& rng) {
    if (k == 0)
        throw std::invalid_argument("init_random: k must be positive");
    if (data.n() < k)
        throw std::invalid_argument("init_random: fewer points than clusters");
    auto rows = rng.sample_without_replacement(data.n(), k);
    Matrix centers(k, data.dim());
    for (std::size_t c = 0; c < k; ++c) {
        auto src = data.points.row(rows[c]);
        std::copy(src.begin(), src.end(), centers.row(c).begin());
    }
    return centers;
}

Matrix init_kmpp(const Dataset& data, std::size_t k, RngStream& rng, int power) {
    if (k == 0)
        throw std::invalid_argument("init_kmpp: k must be positive");
    if (distinct_rows(data.points) < k)
        throw std::invalid_argument("init_kmpp: fewer distinct points than clusters");
    std::vector<std::size_t> view(data.n());
    std::iota(view.begin(), view.end(), std::size_t{0});
    auto seeds = seed_plusplus(data, view, k, power, rng, 1);
    Matrix centers(k, data.dim());
    for (std::size_t c = 0; c < k; ++c) {
        auto src = data.points.row(seeds[c]);
        std::copy(src.begin(), src.end(), centers.row(c).begin());
    }
    return centers;
}

ClusteringResult kmeans_fit(const Dataset& data, const BaselineParams& params,
                            const Matrix& init) {
    validate_fit(data, params, init);
    std::size_t n = data.n(), p = data.dim(), k = params.k;

    ClusteringResult result;
    result.centroids.centers = init;
    Matrix& centers = result.centroids.centers;
    std::vector<double> d2(n);
    double prev = kInf;

    for (;;) {
        result.labels = assign(data.points, centers);
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = sq_dist(data.points.row(i), centers.row(result.labels[i]));
            dist += d2[i];
        }
        result.risk_trace.push_back(dist);
        if (small_change(prev, dist, params.tol)) {
            result.converged = true;
            break;
        }
        if (result.iterations >= params.max_iter) break;
        prev = dist;

        std::vector<std::size_t> counts(k, 0);
        Matrix sums(k, p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            int lab = result.labels[i];
            ++counts[lab];
            auto x = data.points.row(i);
            auto s = sums.row(lab);
            for (std::size_t d = 0; d < p; ++d) s[d] += x[d];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                for (std::size_t d = 0; d < p; ++d)
                    centers(c, d) = sums(c, d) / static_cast<double>(counts[c]);
        repair_empty(data.points, d2, nullptr, counts, centers);
        ++result.iterations;
    }
    result.objective = result.risk_trace.back();
    finish_result(data, result);
    return result;
}

ClusteringResult kmedians_fit(const Dataset& data, const BaselineParams& params,
                              const Matrix& init) {
    validate_fit(data, params, init);
    std::size_t n = data.n(), p = data.dim(), k = params.k;

    ClusteringResult result;
    result.centroids.centers = init;
    Matrix& centers = result.centroids.centers;
    std::vector<double> d1(n);
    double prev = kInf;

    auto assign_l1 = [&](std::span<const double> x) {
        int best = 0;
        double best_d = l1_dist(x, centers.row(0));
        for (std::size_t c = 1; c < k; ++c) {
            double d = l1_dist(x, centers.row(c));
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        return best;
    };

    for (;;) {
        result.labels.resize(n);
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            result.labels[i] = assign_l1(data.points.row(i));
            d1[i] = l1_dist(data.points.row(i), centers.row(result.labels[i]));
            dist += d1[i];
        }
        result.risk_trace.push_back(dist);
        if (small_change(prev, dist, params.tol)) {
            result.converged = true;
            break;
        }
        if (result.iterations >= params.max_iter) break;
        prev = dist;

        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t i = 0; i < n; ++i)
            members[result.labels[i]].push_back(i);
        std::vector<double> col;
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c].empty()) continue;
            for (std::size_t d = 0; d < p; ++d) {
                col.clear();
                for (std::size_t i : members[c]) col.push_back(data.points(i, d));
                centers(c, d) = lower_median(col);
            }
        }
        std::vector<std::size_t> counts(k);
        for (std::size_t c = 0; c < k; ++c) counts[c] = members[c].size();
        repair_empty(data.points, d1, nullptr, counts, centers);
        ++result.iterations;
    }
    result.objective = result.risk_trace.back();
    finish_result(data, result);
    return result;
}

ClusteringResult trimmed_kmeans_fit(const Dataset& data, const BaselineParams& params,
                                    const Matrix& init) {
    validate_fit(data, params, init);
    if (params.trim_alpha < 0.0 || params.trim_alpha >= 1.0)
        throw std::invalid_argument("trimmed_kmeans_fit: alpha must lie in [0, 1)");
    std::size_t n = data.n(), p = data.dim(), k = params.k;
    std::size_t t = trim_count(params.trim_alpha, n);
    if (t >= n)
        throw std::invalid_argument("trimmed_kmeans_fit: trimming would drop every point");

    ClusteringResult result;
    result.centroids.centers = init;
    Matrix& centers = result.centroids.centers;
    std::vector<double> d2(n);
    std::vector<std::size_t> order(n);
    double prev = kInf;

    for (;;) {
        result.labels = assign(data.points, centers);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = sq_dist(data.points.row(i), centers.row(result.labels[i]));

        // Drop the t farthest points from the coming update (and the objective).
        result.retained.assign(n, 1);
        if (t > 0) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (d2[a] != d2[b]) return d2[a] > d2[b];
                return a < b;
            });
            for (std::size_t j = 0; j < t; ++j) result.retained[order[j]] = 0;
        }
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (result.retained[i]) dist += d2[i];
        result.risk_trace.push_back(dist);
        if (small_change(prev, dist, params.tol)) {
            result.converged = true;
            break;
        }
        if (result.iterations >= params.max_iter) break;
        prev = dist;

        std::vector<std::size_t> counts(k, 0);
        Matrix sums(k, p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!result.retained[i]) continue;
            int lab = result.labels[i];
            ++counts[lab];
            auto x = data.points.row(i);
            auto s = sums.row(lab);
            for (std::size_t d = 0; d < p; ++d) s[d] += x[d];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                for (std::size_t d = 0; d < p; ++d)
                    centers(c, d) = sums(c, d) / static_cast<double>(counts[c]);
        repair_empty(data.points, d2, &result.retained, counts, centers);
        ++result.iterations;
    }
    result.objective = result.risk_trace.back();
    finish_result(data, result);
    return result;
}

namespace {

template <typename Fit>
ClusteringResult best_of(const Dataset& data, const BaselineParams& params,
                         std::uint64_t seed, Fit fit) {
    if (params.n_init == 0)
        throw std::invalid_argument("best_of: need at least one restart");
    ClusteringResult best;
    bool have = false;
    for (std::size_t r = 0; r < params.n_init; ++r) {
        RngStream rng(derive_key(seed, tag::restart, r));
        Matrix init = init_kmpp(data, params.k, rng, 2);
        ClusteringResult res = fit(data, params, init);
        if (!have || res.objective < best.objective) {  // strict: earliest restart wins ties
            best = std::move(res);
            have = true;
        }
    }
    return best;
}

}  // namespace

ClusteringResult kmeans_best_of(const Dataset& data, const BaselineParams& params,
                                std::uint64_t seed) {
    return best_of(data, params, seed, kmeans_fit);
}

ClusteringResult kmedians_best_of(const Dataset& data, const BaselineParams& params,
                                  std::uint64_t seed) {
    return best_of(data, params, seed, kmedians_fit);
}

ClusteringResult trimmed_kmeans_best_of(const Dataset& data,
                                        const BaselineParams& params,
                                        std::uint64_t seed) {
    return best_of(data, params, seed, trimmed_kmeans_fit);
}

SubsetFit lloyd_fit_subset(const Dataset& data, const std::vector<std::size_t>& view,
                           const Matrix& init, std::size_t max_iter, double tol) {
    SubsetFit out;
    std::size_t m = view.size(), p = data.dim(), k = init.rows();
    if (m == 0 || k == 0 || k > m) return out;

    Matrix centers = init;
    std::vector<int> labels(m);
    std::vector<double> d2(m);
    double prev = kInf;
    std::size_t updates = 0;

    for (;;) {
        double dist = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            auto x = data.points.row(view[j]);
            labels[j] = assign_point(x, centers);
            d2[j] = sq_dist(x, centers.row(labels[j]));
            dist += d2[j];
        }
        if (small_change(prev, dist, tol)) break;
        if (updates >= max_iter) break;
        prev = dist;

        std::vector<std::size_t> counts(k, 0);
        Matrix sums(k, p, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            ++counts[labels[j]];
            auto x = data.points.row(view[j]);
            auto s = sums.row(labels[j]);
            for (std::size_t d = 0; d < p; ++d) s[d] += x[d];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                for (std::size_t d = 0; d < p; ++d)
                    centers(c, d) = sums(c, d) / static_cast<double>(counts[c]);
        // In-subset repair: donate the farthest subset point.
        std::vector<std::uint8_t> used(m, 0);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = m;
            double far_d = -1.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (used[j]) continue;
                if (d2[j] > far_d) {
                    far_d = d2[j];
                    far = j;
                }
            }
            if (far == m) continue;
            used[far] = 1;
            auto src = data.points.row(view[far]);
            std::copy(src.begin(), src.end(), centers.row(c).begin());
        }
        ++updates;
    }

    // Valid only if the converged centers keep every cluster populated.
    std::vector<std::size_t> counts(k, 0);
    std::vector<double> wss(k, 0.0);
    double risk = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        auto x = data.points.row(view[j]);
        int lab = assign_point(x, centers);
        double d = sq_dist(x, centers.row(lab));
        ++counts[lab];
        wss[lab] += d;
        risk += d;
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] == 0) return out;
    out.valid = true;
    out.risk = risk;
    out.centroids.centers = std::move(centers);
    out.centroids.within_variances.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        out.centroids.within_variances[c] = wss[c] / static_cast<double>(counts[c]);
    return out;
}

}  // namespace kbmom
