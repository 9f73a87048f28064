#pragma once

// Synthetic data: isotropic Gaussian mixtures (Box-Muller on the counter
// streams) and the two contamination schemes — punctual (existing rows scaled
// by beta) and cluster (an extra far-away Gaussian appended). Named presets
// reproduce the simulation settings used throughout the experiments.

#include <cstdint>
#include <string>
#include <vector>

#include "kbmom/dataset.hpp"

namespace kbmom {

struct MixtureSpec {
    Matrix means;                  // K x p component means
    std::vector<double> sigma2;    // per-component isotropic variance
    std::vector<std::size_t> sizes;  // points per component
    std::size_t k() const { return means.rows(); }
    std::size_t dim() const { return means.cols(); }
    std::size_t total() const;
};

enum class OutlierScheme { none, punctual, cluster };

struct OutlierSpec {
    OutlierScheme scheme = OutlierScheme::none;
    std::size_t count = 0;
    double beta = 1.0;             // scale factor / cluster mean multiplier
    bool random_sign = false;      // punctual: flip the factor's sign per point
    bool per_coordinate_sign = false;  // punctual: independent sign per coordinate
    double cluster_sigma2 = 1.0;   // cluster scheme: variance of the extra component
};

// Draws the mixture in component order; labels record the generating component.
Dataset sample_mixture(const MixtureSpec& spec, std::uint64_t seed);

// Scales `count` distinct random rows by beta (optionally with random signs) and
// marks them in the outlier mask. True labels keep the original component.
void inject_punctual(Dataset& data, const OutlierSpec& spec, std::uint64_t seed);

// Appends `count` draws from N(beta * (1,...,1), cluster_sigma2 * I); appended
// rows get sentinel label K and are marked in the mask.
void inject_cluster(Dataset& data, const OutlierSpec& spec, std::size_t k_components,
                    std::uint64_t seed);

struct ScenarioPreset {
    std::string name;
    MixtureSpec mixture;
    OutlierSpec outliers;
};

// Named presets: sim1 (3 clusters in 2-D, punctual), sim2 (same mixture, cluster
// scheme), tuning (3 well-separated clusters, 20 rows scaled by 50), bench1/2/3
// (5 clusters in 3-D, 30 rows scaled by +-10; balanced, unbalanced sizes,
// unbalanced sizes + variances). Unknown names throw.
ScenarioPreset preset(const std::string& name);

// Generates a preset instance: mixture draw plus contamination, both derived
// from the seed.
Dataset generate(const ScenarioPreset& scenario, std::uint64_t seed);

}  // namespace kbmom
