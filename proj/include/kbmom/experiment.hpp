#pragma once

// Experiment harness: repeated generate -> fit -> evaluate over a method list,
// with per-repetition and aggregate CSV artifacts. Per-repetition seeds are
// derived from the master seed, repetitions are independent tasks, and files
// are written by a single thread in (repetition, method) order — identical
// config + seed gives byte-identical outputs for any worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kbmom/baselines.hpp"
#include "kbmom/clustering.hpp"
#include "kbmom/datagen.hpp"

namespace kbmom {

// Known method names: random, kmpp, kmedpp (raw seedings: metrics on the
// partition induced by the initial centers, no iterations) and kbmom,
// kbmom_kmpp, kbmom_kmedpp, block_kmom, kmeans, kmedians, trimmed_kmeans
// (full fits; kbmom_kmpp / kbmom_kmedpp run K-bMOM with the in-block seeding
// weight set to squared / plain distances respectively).
bool is_known_method(const std::string& name);

// Unset hyperparameters resolve against the scenario before running: a k of 0
// becomes the scenario's component count, and a kbmom/block_kmom block_size of
// 0 becomes 6*k (comfortably above the k+1 minimum while keeping blocks small).
struct ScenarioConfig {
    ScenarioPreset scenario;
    std::vector<std::string> methods;
    std::size_t repetitions = 1;
    std::uint64_t master_seed = 0;
    KbmomParams kbmom;           // shared by the init studies and kbmom
    KbmomParams block_kmom;      // the one-shot variant may size blocks differently
    BaselineParams baseline;
    std::string output_prefix;   // empty: no files written
};

struct RepOutcome {
    std::size_t rep = 0;
    std::string method;
    bool failed = false;
    std::string error;       // failure reason when failed
    double rmse = 0.0;
    double accuracy = 0.0;
    double ari = 0.0;
    double distortion = 0.0;
    std::size_t nb_clusters = 0;
};

struct AggregateRow {
    std::string method;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    // mean/std (population divisor n_ok) per metric, in fixed column order
    double rmse_mean = 0.0, rmse_std = 0.0;
    double accuracy_mean = 0.0, accuracy_std = 0.0;
    double ari_mean = 0.0, ari_std = 0.0;
    double distortion_mean = 0.0, distortion_std = 0.0;
    double nb_mean = 0.0, nb_std = 0.0;
};

struct ExperimentResult {
    std::vector<RepOutcome> per_rep;       // ordered by (rep, method)
    std::vector<AggregateRow> aggregates;  // ordered as config.methods
};

// Runs one method on one dataset. Exposed so single runs (CLI cluster) share
// the exact registry used by experiments.
struct MethodRun {
    std::vector<int> labels;
    CentroidSet centroids;
    double objective = 0.0;
    std::vector<double> risk_trace;
    bool converged = false;
    std::size_t iterations = 0;
};
MethodRun run_method(const std::string& name, const Dataset& data,
                     const ScenarioConfig& cfg, std::uint64_t seed,
                     unsigned workers = 1);

ExperimentResult run_experiment(const ScenarioConfig& cfg, unsigned workers = 1);

// Aggregates for one method from its per-rep rows (skipping failures); used both
// by run_experiment and by the recomputation checks.
AggregateRow aggregate_rows(const std::string& method,
                            const std::vector<RepOutcome>& rows);

// Loads a JSON config file and overlays it onto cfg (fields present in the file
// replace the defaults; command-line flags are applied by the caller afterwards
// and therefore win). Throws std::invalid_argument on unknown fields or types.
void apply_config_file(const std::string& path, ScenarioConfig& cfg);

}  // namespace kbmom
