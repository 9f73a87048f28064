#include "kbmom/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kbmom/baselines.hpp"
#include "kbmom/parallel.hpp"

namespace kbmom {

int assign_point(std::span<const double> x, const Matrix& centers) {
    int best = 0;
    double best_d = sq_dist(x, centers.row(0));
    for (std::size_t k = 1; k < centers.rows(); ++k) {
        double d = sq_dist(x, centers.row(k));
        if (d < best_d) {  // strict: ties stay with the lowest index
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

std::vector<int> assign(const Matrix& points, const Matrix& centers) {
    if (centers.rows() == 0)
        throw std::invalid_argument("assign: no centers");
    if (points.cols() != centers.cols())
        throw std::invalid_argument("assign: dimension mismatch");
    std::vector<int> labels(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i)
        labels[i] = assign_point(points.row(i), centers);
    return labels;
}

std::vector<std::size_t> sample_block(std::size_t n, std::size_t block_size,
                                      RngStream& rng) {
    if (n == 0)
        throw std::invalid_argument("sample_block: empty population");
    std::vector<std::size_t> block(block_size);
    for (std::size_t j = 0; j < block_size; ++j)
        block[j] = static_cast<std::size_t>(rng.next_below(n));
    return block;
}

std::vector<std::size_t> seed_plusplus(const Dataset& data,
                                       const std::vector<std::size_t>& view,
                                       std::size_t k, int power, RngStream& rng,
                                       std::size_t trials) {
    if (view.empty())
        throw std::invalid_argument("seed_plusplus: empty view");
    if (k == 0 || k > view.size())
        throw std::invalid_argument("seed_plusplus: k out of range");
    if (power != 1 && power != 2)
        throw std::invalid_argument("seed_plusplus: power must be 1 or 2");
    if (trials == 0)
        throw std::invalid_argument("seed_plusplus: trials must be positive");

    std::size_t m = view.size();

    std::vector<double> mind(m, std::numeric_limits<double>::infinity());
    std::vector<std::uint8_t> chosen(m, 0);
    std::vector<std::size_t> seeds;
    seeds.reserve(k);

    auto weight = [&](double d2) { return power == 2 ? d2 : std::sqrt(d2); };

    std::size_t first = static_cast<std::size_t>(rng.next_below(m));
    chosen[first] = 1;
    seeds.push_back(view[first]);

    for (std::size_t t = 1; t < k; ++t) {
        auto c = data.points.row(seeds.back());
        for (std::size_t i = 0; i < m; ++i) {
            double d = sq_dist(data.points.row(view[i]), c);
            if (d < mind[i]) mind[i] = d;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (chosen[i]) continue;
            total += weight(mind[i]);
        }
        std::size_t pick = m;  // sentinel
        if (total > 0.0) {
            double best_obj = std::numeric_limits<double>::infinity();
            for (std::size_t trial = 0; trial < trials; ++trial) {
                double r = rng.next_double() * total;
                double cum = 0.0;
                std::size_t cand = m;
                for (std::size_t i = 0; i < m; ++i) {
                    if (chosen[i]) continue;
                    double w = weight(mind[i]);
                    if (w <= 0.0) continue;
                    cum += w;
                    if (r < cum) {
                        cand = i;
                        break;
                    }
                }
                if (cand == m) {  // rounding pushed r past the last weight
                    for (std::size_t i = m; i-- > 0;) {
                        if (!chosen[i] && mind[i] > 0.0) {
                            cand = i;
                            break;
                        }
                    }
                }
                if (cand == m) continue;
                if (trials == 1) {  // plain sampling adopts the draw as-is
                    pick = cand;
                    break;
                }
                auto cx = data.points.row(view[cand]);
                double obj = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    double d = sq_dist(data.points.row(view[i]), cx);
                    obj += weight(std::min(mind[i], d));
                }
                if (obj < best_obj || (obj == best_obj && cand < pick)) {
                    best_obj = obj;
                    pick = cand;
                }
            }
        }
        if (pick == m) {  // every remaining weight is zero: uniform over unchosen
            std::size_t unchosen = m - t;
            std::size_t target = static_cast<std::size_t>(rng.next_below(unchosen));
            for (std::size_t i = 0; i < m; ++i) {
                if (chosen[i]) continue;
                if (target == 0) {
                    pick = i;
                    break;
                }
                --target;
            }
        }
        chosen[pick] = 1;
        seeds.push_back(view[pick]);
    }
    return seeds;
}

BlockFit block_risk(const Dataset& data, const std::vector<std::size_t>& block,
                    const Matrix& centers) {
    if (block.empty())
        throw std::invalid_argument("block_risk: empty block");
    std::size_t k = centers.rows();
    std::size_t p = centers.cols();

    std::vector<int> labels(block.size());
    std::vector<std::size_t> counts(k, 0);
    Matrix sums(k, p, 0.0);
    for (std::size_t j = 0; j < block.size(); ++j) {
        auto x = data.points.row(block[j]);
        int lab = assign_point(x, centers);
        labels[j] = lab;
        ++counts[lab];
        auto s = sums.row(lab);
        for (std::size_t d = 0; d < p; ++d) s[d] += x[d];
    }
    BlockFit fit;
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] == 0) return fit;  // valid stays false

    Matrix means(k, p, 0.0);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < p; ++d)
            means(c, d) = sums(c, d) / static_cast<double>(counts[c]);

    std::vector<double> wss(k, 0.0);
    double risk = 0.0;
    for (std::size_t j = 0; j < block.size(); ++j) {
        double d2 = sq_dist(data.points.row(block[j]), means.row(labels[j]));
        risk += d2;
        wss[labels[j]] += d2;
    }
    fit.valid = true;
    fit.risk = risk;
    fit.centroids.centers = std::move(means);
    fit.centroids.within_variances.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        fit.centroids.within_variances[c] = wss[c] / static_cast<double>(counts[c]);
    return fit;
}

std::optional<std::pair<std::size_t, double>> median_block_select(
    const std::vector<BlockFit>& fits) {
    std::vector<std::pair<double, std::size_t>> order;  // (risk, block id)
    order.reserve(fits.size());
    for (std::size_t b = 0; b < fits.size(); ++b)
        if (fits[b].valid) order.emplace_back(fits[b].risk, b);
    if (order.empty()) return std::nullopt;
    std::sort(order.begin(), order.end());
    const auto& med = order[(order.size() - 1) / 2];  // lower median
    return std::make_pair(med.second, med.first);
}

AitkenResult aitken_step(double r_prev2, double r_prev1, double r_curr) {
    AitkenResult res;
    double d1 = r_prev1 - r_prev2;
    if (std::fabs(d1) < 1e-12) {
        res.degenerate = true;
        return res;
    }
    res.accel = (r_curr - r_prev1) / d1;
    double denom = 1.0 - res.accel;
    if (std::fabs(denom) < 1e-12) {
        res.degenerate = true;
        return res;
    }
    res.crit = (r_curr - r_prev1) / denom;
    return res;
}

std::size_t distinct_rows(const Matrix& points) {
    std::vector<std::size_t> idx(points.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto less = [&](std::size_t a, std::size_t b) {
        auto ra = points.row(a), rb = points.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(idx.begin(), idx.end(), less);
    std::size_t distinct = points.rows() == 0 ? 0 : 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (less(idx[i - 1], idx[i])) ++distinct;
    return distinct;
}

namespace {

void validate_common(const Dataset& data, const KbmomParams& params) {
    if (params.k == 0)
        throw std::invalid_argument("kbmom: k must be positive");
    if (params.n_blocks == 0)
        throw std::invalid_argument("kbmom: need at least one block");
    if (data.n() == 0)
        throw std::invalid_argument("kbmom: empty dataset");
    if (distinct_rows(data.points) < params.k)
        throw std::invalid_argument("kbmom: fewer distinct points than clusters");
}

// One round of seeded blocks; returns the median selection and its fit, or
// nothing when every block was flagged. Each block is scored by the risk of
// the partition its seeds induce, evaluated at that partition's own means
// (the same statistic the iteration rounds use), and the median block hands
// those means onward.
std::optional<std::pair<std::size_t, double>> seeded_round(
    const Dataset& data, const KbmomParams& params, std::uint64_t seed,
    std::uint64_t round_tag, std::size_t retry, unsigned workers,
    std::vector<BlockFit>& fits, std::vector<std::vector<std::size_t>>& blocks) {
    fits.assign(params.n_blocks, BlockFit{});
    blocks.assign(params.n_blocks, {});
    parallel_for(params.n_blocks, workers, [&](std::size_t b) {
        RngStream rng(derive_key(seed, round_tag, retry, b));
        blocks[b] = sample_block(data.n(), params.block_size, rng);
        auto seeds = seed_plusplus(data, blocks[b], params.k, params.seeding_power,
                                   rng, 2 + 2 * params.k);
        Matrix centers(params.k, data.dim());
        for (std::size_t c = 0; c < params.k; ++c) {
            auto src = data.points.row(seeds[c]);
            std::copy(src.begin(), src.end(), centers.row(c).begin());
        }
        fits[b] = block_risk(data, blocks[b], centers);
    });
    return median_block_select(fits);
}

}  // namespace

InitSelection kbmom_init(const Dataset& data, const KbmomParams& params,
                         std::uint64_t seed, unsigned workers) {
    validate_common(data, params);
    if (params.block_size < params.k)
        throw std::invalid_argument("kbmom_init: block size below cluster count (need n_B >= K)");

    std::vector<BlockFit> fits;
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t retry = 0; retry <= params.max_block_retries; ++retry) {
        auto med = seeded_round(data, params, seed, tag::init_block, retry, workers,
                                fits, blocks);
        if (med) {
            InitSelection sel;
            sel.centroids = std::move(fits[med->first].centroids);
            sel.median_risk = med->second;
            sel.median_block = std::move(blocks[med->first]);
            return sel;
        }
    }
    throw std::runtime_error(
        "kbmom_init: every block left a cluster empty after all resamples");
}

ClusteringResult kbmom_fit(const Dataset& data, const KbmomParams& params,
                           std::uint64_t seed, unsigned workers) {
    validate_common(data, params);
    if (params.block_size <= params.k)
        throw std::invalid_argument("kbmom_fit: block size must exceed cluster count (need n_B > K)");
    if (!(params.epsilon > 0.0))
        throw std::invalid_argument("kbmom_fit: epsilon must be positive");
    if (params.max_iter == 0)
        throw std::invalid_argument("kbmom_fit: max_iter must be positive");

    InitSelection sel =
        kbmom_init(data, params, derive_key(seed, tag::init_phase), workers);
    CentroidSet current = std::move(sel.centroids);

    ClusteringResult result;
    std::vector<BlockFit> fits(params.n_blocks);
    std::vector<std::vector<std::size_t>> blocks(params.n_blocks);
    for (std::size_t q = 0; q < params.max_iter; ++q) {
        std::optional<std::pair<std::size_t, double>> med;
        for (std::size_t retry = 0; retry <= params.max_block_retries && !med; ++retry) {
            fits.assign(params.n_blocks, BlockFit{});
            parallel_for(params.n_blocks, workers, [&](std::size_t b) {
                RngStream rng(derive_key(seed, tag::iter_block, q * 1024 + retry, b));
                auto block = sample_block(data.n(), params.block_size, rng);
                fits[b] = block_risk(data, block, current.centers);
            });
            med = median_block_select(fits);
        }
        if (!med)
            throw std::runtime_error(
                "kbmom_fit: every block left a cluster empty after all resamples");
        current = std::move(fits[med->first].centroids);
        result.risk_trace.push_back(med->second);

        std::size_t q_len = result.risk_trace.size();
        if (q_len >= 3) {
            auto step = aitken_step(result.risk_trace[q_len - 3],
                                    result.risk_trace[q_len - 2],
                                    result.risk_trace[q_len - 1]);
            if (step.degenerate || std::fabs(step.crit) < params.epsilon) {
                result.converged = true;
                break;
            }
        }
    }
    result.iterations = result.risk_trace.size();
    result.objective = result.risk_trace.back();
    result.centroids = std::move(current);
    result.labels = assign(data.points, result.centroids.centers);
    return result;
}

ClusteringResult block_kmom_fit(const Dataset& data, const KbmomParams& params,
                                std::uint64_t seed, unsigned workers) {
    validate_common(data, params);
    if (params.block_size <= params.k)
        throw std::invalid_argument("block_kmom_fit: block size must exceed cluster count (need n_B > K)");

    std::vector<SubsetFit> fits(params.n_blocks);
    for (std::size_t retry = 0; retry <= params.max_block_retries; ++retry) {
        parallel_for(params.n_blocks, workers, [&](std::size_t b) {
            RngStream rng(derive_key(seed, tag::block_kmom, retry, b));
            auto block = sample_block(data.n(), params.block_size, rng);
            auto seeds = seed_plusplus(data, block, params.k, 2, rng, 2 + 2 * params.k);
            Matrix init(params.k, data.dim());
            for (std::size_t c = 0; c < params.k; ++c) {
                auto src = data.points.row(seeds[c]);
                std::copy(src.begin(), src.end(), init.row(c).begin());
            }
            fits[b] = lloyd_fit_subset(data, block, init, 300, 1e-6);
        });
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t b = 0; b < fits.size(); ++b)
            if (fits[b].valid) order.emplace_back(fits[b].risk, b);
        if (order.empty()) continue;
        std::sort(order.begin(), order.end());
        const auto& med = order[(order.size() - 1) / 2];

        ClusteringResult result;
        result.centroids = std::move(fits[med.second].centroids);
        result.risk_trace = {med.first};
        result.objective = med.first;
        result.converged = true;
        result.iterations = 1;
        result.labels = assign(data.points, result.centroids.centers);
        return result;
    }
    throw std::runtime_error(
        "block_kmom_fit: every block was degenerate after all resamples");
}

}  // namespace kbmom
