#include "kbmom/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "kbmom/csv.hpp"
#include "kbmom/metrics.hpp"
#include "kbmom/parallel.hpp"

namespace kbmom {

namespace {

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> names = {
        "random",     "kmpp",       "kmedpp",  "kbmom_kmpp", "kbmom_kmedpp",
        "kbmom",      "block_kmom", "kmeans",  "kmedians",   "trimmed_kmeans"};
    return names;
}

void fill_within(const Dataset& data, MethodRun& run) {
    std::size_t k = run.centroids.k();
    std::vector<double> wss(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < data.n(); ++i) {
        int lab = run.labels[i];
        wss[lab] += sq_dist(data.points.row(i), run.centroids.centers.row(lab));
        ++counts[lab];
    }
    run.centroids.within_variances.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c]) run.centroids.within_variances[c] = wss[c] / counts[c];
}

// Wraps an initializer's centers as a full run: the partition they induce on
// the whole dataset, scored by its distortion.
MethodRun induced_run(const Dataset& data, Matrix centers) {
    MethodRun run;
    run.labels = assign(data.points, centers);
    run.centroids.centers = std::move(centers);
    run.objective = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i)
        run.objective +=
            sq_dist(data.points.row(i), run.centroids.centers.row(run.labels[i]));
    run.converged = true;
    fill_within(data, run);
    return run;
}

MethodRun from_result(const Dataset&, ClusteringResult res) {
    MethodRun run;
    run.labels = std::move(res.labels);
    run.centroids = std::move(res.centroids);
    run.objective = res.objective;
    run.risk_trace = std::move(res.risk_trace);
    run.converged = res.converged;
    run.iterations = res.iterations;
    return run;
}

std::string sanitize(std::string msg) {
    for (char& c : msg)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return msg;
}

}  // namespace

bool is_known_method(const std::string& name) {
    const auto& names = known_methods();
    return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

// Fills unset hyperparameters from the scenario: k = 0 becomes the mixture's
// component count, an unset kbmom/block_kmom block size becomes 6*k.
ScenarioConfig resolve_config(const ScenarioConfig& cfg) {
    ScenarioConfig out = cfg;
    std::size_t scenario_k = cfg.scenario.mixture.k();
    if (out.kbmom.k == 0) out.kbmom.k = scenario_k;
    if (out.block_kmom.k == 0) out.block_kmom.k = scenario_k;
    if (out.baseline.k == 0) out.baseline.k = scenario_k;
    if (out.kbmom.block_size == 0) out.kbmom.block_size = 6 * out.kbmom.k;
    if (out.block_kmom.block_size == 0)
        out.block_kmom.block_size = 6 * out.block_kmom.k;
    return out;
}

}  // namespace

MethodRun run_method(const std::string& name, const Dataset& data,
                     const ScenarioConfig& raw_cfg, std::uint64_t seed,
                     unsigned workers) {
    ScenarioConfig cfg = resolve_config(raw_cfg);
    if (name == "random") {
        RngStream rng(seed);
        return induced_run(data, init_random(data, cfg.kbmom.k, rng));
    }
    if (name == "kmpp") {
        RngStream rng(seed);
        return induced_run(data, init_kmpp(data, cfg.kbmom.k, rng, 2));
    }
    if (name == "kmedpp") {
        RngStream rng(seed);
        return induced_run(data, init_kmpp(data, cfg.kbmom.k, rng, 1));
    }
    if (name == "kbmom_kmpp" || name == "kbmom_kmedpp") {
        // Full K-bMOM configured by init kind (seeding weight inside blocks).
        KbmomParams params = cfg.kbmom;
        params.seeding_power = (name == "kbmom_kmpp") ? 2 : 1;
        return from_result(data, kbmom_fit(data, params, seed, workers));
    }
    if (name == "kbmom")
        return from_result(data, kbmom_fit(data, cfg.kbmom, seed, workers));
    if (name == "block_kmom")
        return from_result(data, block_kmom_fit(data, cfg.block_kmom, seed, workers));
    if (name == "kmeans")
        return from_result(data, kmeans_best_of(data, cfg.baseline, seed));
    if (name == "kmedians")
        return from_result(data, kmedians_best_of(data, cfg.baseline, seed));
    if (name == "trimmed_kmeans")
        return from_result(data, trimmed_kmeans_best_of(data, cfg.baseline, seed));
    throw std::invalid_argument("unknown method '" + name + "'");
}

AggregateRow aggregate_rows(const std::string& method,
                            const std::vector<RepOutcome>& rows) {
    AggregateRow agg;
    agg.method = method;
    std::vector<const RepOutcome*> ok;
    for (const auto& r : rows) {
        if (r.method != method) continue;
        if (r.failed)
            ++agg.n_failed;
        else
            ok.push_back(&r);
    }
    agg.n_ok = ok.size();
    if (ok.empty()) return agg;

    auto stats = [&](auto get, double& mean, double& sd) {
        double sum = 0.0;
        for (const auto* r : ok) sum += get(*r);
        mean = sum / static_cast<double>(ok.size());
        double ss = 0.0;
        for (const auto* r : ok) {
            double d = get(*r) - mean;
            ss += d * d;
        }
        sd = std::sqrt(ss / static_cast<double>(ok.size()));
    };
    stats([](const RepOutcome& r) { return r.rmse; }, agg.rmse_mean, agg.rmse_std);
    stats([](const RepOutcome& r) { return r.accuracy; }, agg.accuracy_mean,
          agg.accuracy_std);
    stats([](const RepOutcome& r) { return r.ari; }, agg.ari_mean, agg.ari_std);
    stats([](const RepOutcome& r) { return r.distortion; }, agg.distortion_mean,
          agg.distortion_std);
    stats([](const RepOutcome& r) { return static_cast<double>(r.nb_clusters); },
          agg.nb_mean, agg.nb_std);
    return agg;
}

ExperimentResult run_experiment(const ScenarioConfig& raw_cfg, unsigned workers) {
    ScenarioConfig cfg = resolve_config(raw_cfg);
    if (cfg.repetitions == 0)
        throw std::invalid_argument("run_experiment: repetitions must be positive");
    if (cfg.methods.empty())
        throw std::invalid_argument("run_experiment: no methods configured");
    for (const auto& m : cfg.methods)
        if (!is_known_method(m))
            throw std::invalid_argument("run_experiment: unknown method '" + m + "'");

    const std::size_t reps = cfg.repetitions, n_methods = cfg.methods.size();
    ExperimentResult result;
    result.per_rep.resize(reps * n_methods);

    parallel_for(reps, workers, [&](std::size_t r) {
        Dataset data =
            generate(cfg.scenario, derive_key(cfg.master_seed, tag::repetition, r));
        auto clean = data.clean_mask();
        for (std::size_t j = 0; j < n_methods; ++j) {
            RepOutcome& row = result.per_rep[r * n_methods + j];
            row.rep = r;
            row.method = cfg.methods[j];
            std::uint64_t seed = derive_key(cfg.master_seed, tag::method, r, j);
            try {
                MethodRun run = run_method(cfg.methods[j], data, cfg, seed, 1);
                if (run.centroids.centers.rows() == cfg.scenario.mixture.k() &&
                    run.centroids.centers.cols() == cfg.scenario.mixture.dim())
                    row.rmse = rmse_matched(run.centroids.centers,
                                            cfg.scenario.mixture.means);
                else
                    row.rmse = std::numeric_limits<double>::quiet_NaN();
                row.accuracy = accuracy_matched(run.labels, data.true_labels, clean);
                row.ari = ari(run.labels, data.true_labels, clean);
                row.distortion = distortion_clean(data.points, run.labels,
                                                  run.centroids.centers, clean);
                row.nb_clusters = nb_clusters_clean(run.labels, clean);
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = sanitize(e.what());
            }
        }
    });

    result.aggregates.reserve(n_methods);
    for (const auto& m : cfg.methods)
        result.aggregates.push_back(aggregate_rows(m, result.per_rep));

    if (!cfg.output_prefix.empty()) {
        {
            std::vector<std::string> header = {"rep",      "method",     "failed",
                                               "error",    "rmse",       "accuracy",
                                               "ari",      "distortion", "nb_clusters"};
            std::vector<std::vector<std::string>> rows;
            rows.reserve(result.per_rep.size());
            for (const auto& r : result.per_rep) {
                rows.push_back({std::to_string(r.rep), r.method,
                                r.failed ? "1" : "0", r.error, format_full(r.rmse),
                                format_full(r.accuracy), format_full(r.ari),
                                format_full(r.distortion),
                                std::to_string(r.nb_clusters)});
            }
            write_table(cfg.output_prefix + "_reps.csv", header, rows);
        }
        {
            std::vector<std::string> header = {
                "method",        "n_ok",          "n_failed",     "rmse_mean",
                "rmse_std",      "accuracy_mean", "accuracy_std", "ari_mean",
                "ari_std",       "distortion_mean", "distortion_std", "nb_mean",
                "nb_std"};
            std::vector<std::vector<std::string>> rows;
            for (const auto& a : result.aggregates) {
                rows.push_back({a.method, std::to_string(a.n_ok),
                                std::to_string(a.n_failed), format_full(a.rmse_mean),
                                format_full(a.rmse_std), format_full(a.accuracy_mean),
                                format_full(a.accuracy_std), format_full(a.ari_mean),
                                format_full(a.ari_std), format_full(a.distortion_mean),
                                format_full(a.distortion_std), format_full(a.nb_mean),
                                format_full(a.nb_std)});
            }
            write_table(cfg.output_prefix + "_aggregate.csv", header, rows);
        }
    }
    return result;
}

void apply_config_file(const std::string& path, ScenarioConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file '" + path + "': cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file '" + path + "': " + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("config file '" + path + "': top level must be an object");

    auto kbmom_block = [&](const nlohmann::json& obj, KbmomParams& p,
                           const std::string& where) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const std::string& key = it.key();
            if (key == "k") p.k = it.value().get<std::size_t>();
            else if (key == "n_blocks") p.n_blocks = it.value().get<std::size_t>();
            else if (key == "block_size") p.block_size = it.value().get<std::size_t>();
            else if (key == "epsilon") p.epsilon = it.value().get<double>();
            else if (key == "max_iter") p.max_iter = it.value().get<std::size_t>();
            else if (key == "seeding_power") p.seeding_power = it.value().get<int>();
            else if (key == "max_block_retries")
                p.max_block_retries = it.value().get<std::size_t>();
            else
                throw std::invalid_argument("config file: unknown field '" + where +
                                            "." + key + "'");
        }
    };

    try {
        // The scenario preset resets every scenario field, so it must land
        // before field-level overrides regardless of key order in the file.
        if (auto it = j.find("scenario"); it != j.end())
            cfg.scenario = preset(it->get<std::string>());
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            if (key == "scenario") {
                // handled above
            } else if (key == "methods") {
                cfg.methods = it.value().get<std::vector<std::string>>();
            } else if (key == "repetitions") {
                cfg.repetitions = it.value().get<std::size_t>();
            } else if (key == "master_seed") {
                cfg.master_seed = it.value().get<std::uint64_t>();
            } else if (key == "output_prefix") {
                cfg.output_prefix = it.value().get<std::string>();
            } else if (key == "outlier_count") {
                cfg.scenario.outliers.count = it.value().get<std::size_t>();
            } else if (key == "outlier_beta") {
                cfg.scenario.outliers.beta = it.value().get<double>();
            } else if (key == "kbmom") {
                kbmom_block(it.value(), cfg.kbmom, "kbmom");
            } else if (key == "block_kmom") {
                kbmom_block(it.value(), cfg.block_kmom, "block_kmom");
            } else if (key == "baseline") {
                for (auto b = it.value().begin(); b != it.value().end(); ++b) {
                    const std::string& bk = b.key();
                    if (bk == "k") cfg.baseline.k = b.value().get<std::size_t>();
                    else if (bk == "max_iter")
                        cfg.baseline.max_iter = b.value().get<std::size_t>();
                    else if (bk == "tol") cfg.baseline.tol = b.value().get<double>();
                    else if (bk == "n_init")
                        cfg.baseline.n_init = b.value().get<std::size_t>();
                    else if (bk == "trim_alpha")
                        cfg.baseline.trim_alpha = b.value().get<double>();
                    else
                        throw std::invalid_argument(
                            "config file: unknown field 'baseline." + bk + "'");
                }
            } else {
                throw std::invalid_argument("config file: unknown field '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file '" + path + "': " + e.what());
    }
}

}  // namespace kbmom
