#include "kbmom/datagen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kbmom/parallel.hpp"
#include "kbmom/rng.hpp"

namespace kbmom {

std::size_t MixtureSpec::total() const {
    return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
}

namespace {

void validate_mixture(const MixtureSpec& spec) {
    if (spec.k() == 0 || spec.dim() == 0)
        throw std::invalid_argument("sample_mixture: empty component list");
    if (spec.sigma2.size() != spec.k() || spec.sizes.size() != spec.k())
        throw std::invalid_argument("sample_mixture: sigma2/sizes must have one entry per component");
    for (std::size_t c = 0; c < spec.k(); ++c) {
        if (spec.sizes[c] == 0)
            throw std::invalid_argument("sample_mixture: component sizes must be positive");
        if (!(spec.sigma2[c] > 0.0))
            throw std::invalid_argument("sample_mixture: variances must be positive");
    }
}

}  // namespace

Dataset sample_mixture(const MixtureSpec& spec, std::uint64_t seed) {
    validate_mixture(spec);
    const std::size_t n = spec.total(), p = spec.dim(), k = spec.k();

    std::vector<std::size_t> offset(k + 1, 0);
    for (std::size_t c = 0; c < k; ++c) offset[c + 1] = offset[c] + spec.sizes[c];

    Dataset data;
    data.points = Matrix(n, p);
    data.true_labels.resize(n);
    data.outlier_mask.assign(n, 0);

    parallel_for(k, default_workers(), [&](std::size_t c) {
        RngStream rng(derive_key(seed, tag::mixture, c));
        double sd = std::sqrt(spec.sigma2[c]);
        for (std::size_t i = offset[c]; i < offset[c + 1]; ++i) {
            data.true_labels[i] = static_cast<int>(c);
            auto row = data.points.row(i);
            for (std::size_t d = 0; d < p; ++d)
                row[d] = spec.means(c, d) + sd * rng.next_normal();
        }
    });
    return data;
}

void inject_punctual(Dataset& data, const OutlierSpec& spec, std::uint64_t seed) {
    if (spec.scheme != OutlierScheme::punctual)
        throw std::invalid_argument("inject_punctual: spec is not the punctual scheme");
    if (!std::isfinite(spec.beta))
        throw std::invalid_argument("inject_punctual: beta must be finite");
    if (spec.count > data.n())
        throw std::invalid_argument("inject_punctual: more outliers than rows");
    if (spec.count == 0) return;

    RngStream rng(seed);
    auto rows = rng.sample_without_replacement(data.n(), spec.count);
    for (std::size_t r : rows) {
        data.outlier_mask[r] = 1;
        auto row = data.points.row(r);
        if (spec.per_coordinate_sign) {
            for (std::size_t d = 0; d < data.dim(); ++d) {
                double s = (rng.next_below(2) == 0) ? 1.0 : -1.0;
                row[d] *= s * spec.beta;
            }
        } else {
            double s = 1.0;
            if (spec.random_sign) s = (rng.next_below(2) == 0) ? 1.0 : -1.0;
            for (std::size_t d = 0; d < data.dim(); ++d) row[d] *= s * spec.beta;
        }
    }
}

void inject_cluster(Dataset& data, const OutlierSpec& spec, std::size_t k_components,
                    std::uint64_t seed) {
    if (spec.scheme != OutlierScheme::cluster)
        throw std::invalid_argument("inject_cluster: spec is not the cluster scheme");
    if (!std::isfinite(spec.beta))
        throw std::invalid_argument("inject_cluster: beta must be finite");
    if (!(spec.cluster_sigma2 > 0.0))
        throw std::invalid_argument("inject_cluster: cluster variance must be positive");
    if (spec.count == 0) return;

    const std::size_t n0 = data.n(), p = data.dim();
    Matrix grown(n0 + spec.count, p);
    for (std::size_t i = 0; i < n0; ++i) {
        auto src = data.points.row(i);
        std::copy(src.begin(), src.end(), grown.row(i).begin());
    }
    RngStream rng(seed);
    double sd = std::sqrt(spec.cluster_sigma2);
    for (std::size_t i = n0; i < n0 + spec.count; ++i) {
        auto row = grown.row(i);
        for (std::size_t d = 0; d < p; ++d)
            row[d] = spec.beta + sd * rng.next_normal();
    }
    data.points = std::move(grown);
    data.true_labels.resize(n0 + spec.count, static_cast<int>(k_components));
    data.outlier_mask.resize(n0 + spec.count, 1);
}

namespace {

MixtureSpec three_component(std::initializer_list<double> flat_means) {
    MixtureSpec mix;
    mix.means = Matrix(3, 2);
    std::size_t i = 0;
    for (double v : flat_means) mix.means.data()[i++] = v;
    mix.sigma2 = {0.6, 0.6, 0.6};
    mix.sizes = {300, 300, 300};
    return mix;
}

MixtureSpec bench_mixture() {
    MixtureSpec mix;
    mix.means = Matrix(5, 3);
    const double flat[15] = {0, 1, 4, 2, 1, 0, 0, -2, 3, 0, 5, -5, -1, -2, 0};
    std::copy(std::begin(flat), std::end(flat), mix.means.data().begin());
    mix.sigma2 = {0.6, 0.6, 0.6, 0.6, 0.6};
    mix.sizes = {300, 300, 300, 300, 300};
    return mix;
}

}  // namespace

ScenarioPreset preset(const std::string& name) {
    ScenarioPreset s;
    s.name = name;
    if (name == "sim1" || name == "sim2") {
        s.mixture = three_component({1, 4, 2, 1, -2, 3});
        if (name == "sim1") {
            s.outliers.scheme = OutlierScheme::punctual;
            s.outliers.count = 9;
            s.outliers.beta = 5.0;
        } else {
            s.outliers.scheme = OutlierScheme::cluster;
            s.outliers.count = 27;
            s.outliers.beta = 20.0;
            s.outliers.cluster_sigma2 = 1.0;
        }
        return s;
    }
    if (name == "tuning") {
        s.mixture = three_component({3, 12, 6, 3, -6, 9});
        s.outliers.scheme = OutlierScheme::punctual;
        s.outliers.count = 20;
        s.outliers.beta = 50.0;
        return s;
    }
    if (name == "bench1" || name == "bench2" || name == "bench3") {
        s.mixture = bench_mixture();
        if (name != "bench1") s.mixture.sizes = {300, 100, 400, 600, 100};
        if (name == "bench3") s.mixture.sigma2 = {1.0, 0.4, 0.6, 1.0, 0.5};
        s.outliers.scheme = OutlierScheme::punctual;
        s.outliers.count = 30;
        s.outliers.beta = 10.0;
        s.outliers.random_sign = true;
        return s;
    }
    throw std::invalid_argument("preset: unknown scenario '" + name + "'");
}

Dataset generate(const ScenarioPreset& scenario, std::uint64_t seed) {
    Dataset data = sample_mixture(scenario.mixture, seed);
    std::uint64_t okey = derive_key(seed, tag::outliers);
    switch (scenario.outliers.scheme) {
        case OutlierScheme::none:
            break;
        case OutlierScheme::punctual:
            inject_punctual(data, scenario.outliers, okey);
            break;
        case OutlierScheme::cluster:
            inject_cluster(data, scenario.outliers, scenario.mixture.k(), okey);
            break;
    }
    return data;
}

}  // namespace kbmom
