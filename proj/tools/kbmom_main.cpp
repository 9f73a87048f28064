// kbmom — robust clustering experiments from the command line.
//
// Subcommands: cluster (fit one dataset), tune (block-size sweep), breakdown
// (block-plan robustness report), simulate (synthetic scenario to CSV),
// estimate (bootstrap median-of-means of one CSV column), experiment (repeated
// scenario runs with aggregation).
//
// Exit codes: 0 success, 2 configuration error, 3 data/file error. Numeric
// output on stdout uses 6 significant digits; CSV artifacts keep full
// precision. KBMOM_THREADS caps the worker count.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kbmom/baselines.hpp"
#include "kbmom/clustering.hpp"
#include "kbmom/csv.hpp"
#include "kbmom/datagen.hpp"
#include "kbmom/estimators.hpp"
#include "kbmom/experiment.hpp"
#include "kbmom/metrics.hpp"
#include "kbmom/parallel.hpp"
#include "kbmom/tuning.hpp"

namespace {

using namespace kbmom;

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
    std::vector<std::string> header = {"row_index", "label"};
    std::vector<std::vector<std::string>> rows;
    rows.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        rows.push_back({std::to_string(i), std::to_string(labels[i])});
    write_table(path, header, rows);
}

void write_centers_csv(const std::string& path, const CentroidSet& centroids) {
    std::vector<std::string> header;
    for (std::size_t d = 0; d < centroids.centers.cols(); ++d)
        header.push_back("x" + std::to_string(d));
    header.push_back("within_variance");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t c = 0; c < centroids.k(); ++c) {
        std::vector<std::string> row;
        for (std::size_t d = 0; d < centroids.centers.cols(); ++d)
            row.push_back(format_full(centroids.centers(c, d)));
        row.push_back(format_full(
            c < centroids.within_variances.size() ? centroids.within_variances[c] : 0.0));
        rows.push_back(std::move(row));
    }
    write_table(path, header, rows);
}

struct ClusterArgs {
    std::string input, method = "kbmom", init = "kmpp", output = "cluster";
    std::size_t k = 0, blocks = 100, block_size = 0, max_iter = 0, n_init = 10;
    double epsilon = 1e-3, alpha = 0.0;
    std::uint64_t seed = 0;
    bool no_header = false;
};

int run_cluster(const ClusterArgs& a) {
    Dataset data = load_csv(a.input, !a.no_header);
    unsigned workers = default_workers();

    ClusteringResult res;
    if (a.method == "kbmom" || a.method == "block-kmom") {
        KbmomParams params;
        params.k = a.k;
        params.n_blocks = a.blocks;
        params.block_size = a.block_size;
        params.epsilon = a.epsilon;
        if (a.max_iter > 0) params.max_iter = a.max_iter;
        res = (a.method == "kbmom") ? kbmom_fit(data, params, a.seed, workers)
                                    : block_kmom_fit(data, params, a.seed, workers);
    } else if (a.method == "kmeans" || a.method == "kmedians" ||
               a.method == "trimmed-kmeans") {
        BaselineParams params;
        params.k = a.k;
        if (a.max_iter > 0) params.max_iter = a.max_iter;
        params.n_init = a.n_init;
        params.trim_alpha = a.alpha;
        auto fit_one = [&](const Matrix& init) {
            if (a.method == "kmeans") return kmeans_fit(data, params, init);
            if (a.method == "kmedians") return kmedians_fit(data, params, init);
            return trimmed_kmeans_fit(data, params, init);
        };
        if (a.init == "random") {
            RngStream rng(a.seed);
            res = fit_one(init_random(data, a.k, rng));
        } else if (a.init == "kmpp") {
            if (a.method == "kmeans") res = kmeans_best_of(data, params, a.seed);
            else if (a.method == "kmedians") res = kmedians_best_of(data, params, a.seed);
            else res = trimmed_kmeans_best_of(data, params, a.seed);
        } else {
            throw std::invalid_argument("cluster: --init must be kmpp or random");
        }
    } else {
        throw std::invalid_argument("cluster: unknown --method '" + a.method + "'");
    }

    write_labels_csv(a.output + "_labels.csv", res.labels);
    write_centers_csv(a.output + "_centers.csv", res.centroids);
    std::cout << "objective " << format_sig6(res.objective) << "\n"
              << "iterations " << res.iterations << "\n"
              << "converged " << (res.converged ? "yes" : "no") << "\n";
    return 0;
}

struct TuneArgs {
    std::string input, grid, output = "sweep.csv";
    std::size_t k = 0, blocks = 100;
    double tau = 1.0;
    std::uint64_t seed = 0;
    bool no_header = false;
};

int run_tune(const TuneArgs& a) {
    Dataset data = load_csv(a.input, !a.no_header);
    std::vector<std::size_t> grid;
    if (a.grid.empty()) {
        grid = default_grid(data.n(), a.k);
    } else {
        std::size_t start = 0;
        while (start <= a.grid.size()) {
            std::size_t comma = a.grid.find(',', start);
            std::string tok = a.grid.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            try {
                grid.push_back(static_cast<std::size_t>(std::stoull(tok)));
            } catch (const std::exception&) {
                throw std::invalid_argument("tune: bad grid entry '" + tok + "'");
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }

    SweepResult sweep =
        blocksize_sweep(data, a.k, a.blocks, grid, a.seed, default_workers(), a.tau);

    std::vector<std::string> header = {"n_B", "median_risk", "outliers_in_median_block",
                                       "clean_ari"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& pt : sweep.points)
        rows.push_back({std::to_string(pt.block_size), format_full(pt.median_risk),
                        std::to_string(pt.outliers_in_median_block),
                        format_full(pt.clean_ari)});
    write_table(a.output, header, rows);

    if (!sweep.breakpoint_found)
        std::cout << "no breakpoint detected; falling back to the largest grid value\n";
    std::cout << "selected_n_B " << sweep.selected_block_size << "\n";
    return 0;
}

struct BreakdownArgs {
    std::size_t n = 0, m = 0, block_size = 0, blocks = 0, trials = 10000;
    double risk = 0.01;
    std::uint64_t seed = 0;
};

int run_breakdown(const BreakdownArgs& a) {
    BreakdownReport rep = mc_breakdown(a.n, a.m, a.block_size, a.blocks, a.trials,
                                       a.seed, default_workers());
    std::cout << "deterministic_bdp " << format_sig6(rep.deterministic_bdp) << "\n"
              << "bmom_limit " << format_sig6(rep.bmom_limit) << "\n";
    if (rep.bound_degenerate)
        std::cout << "prob_lower_bound degenerate (blocks too large for this "
                     "contamination)\n";
    else
        std::cout << "prob_lower_bound " << format_sig6(rep.prob_lower_bound) << "\n";
    std::cout << "mc_estimate " << format_sig6(rep.mc_estimate) << "\n"
              << "mc_trials " << rep.mc_trials << "\n";

    PlanBounds pb = plan_bounds(a.n, a.m, a.risk,
                                a.block_size > 0
                                    ? std::optional<std::size_t>(a.block_size)
                                    : std::nullopt);
    if (pb.unbounded) {
        std::cout << "plan: no contamination, any block size works\n";
    } else {
        std::cout << "plan_n_B_max " << pb.block_size_max << "\n"
                  << "plan_B_min " << pb.blocks_min << " (at n_B=" << pb.blocks_min_at
                  << ", risk " << format_sig6(a.risk) << ")\n";
    }
    return 0;
}

struct SimulateArgs {
    std::string preset_name, output;
    std::uint64_t seed = 0;
    std::int64_t outliers = -1;
    double beta = 0.0;
    bool have_beta = false;
};

int run_simulate(const SimulateArgs& a) {
    ScenarioPreset scenario = preset(a.preset_name);
    if (a.outliers >= 0) scenario.outliers.count = static_cast<std::size_t>(a.outliers);
    if (a.have_beta) scenario.outliers.beta = a.beta;
    Dataset data = generate(scenario, a.seed);
    std::string path = a.output.empty() ? a.preset_name + ".csv" : a.output;
    save_csv(path, data);
    std::size_t n_out = 0;
    for (auto b : data.outlier_mask) n_out += b;
    std::cout << "n " << data.n() << "\n"
              << "p " << data.dim() << "\n"
              << "outliers " << n_out << "\n"
              << "file " << path << "\n";
    return 0;
}

struct EstimateArgs {
    std::string input;
    std::size_t column = 0, block_size = 0, blocks = 0;
    std::uint64_t seed = 0;
    bool no_header = false;
};

int run_estimate(const EstimateArgs& a) {
    Dataset data = load_csv(a.input, !a.no_header);
    if (a.column >= data.dim())
        throw std::invalid_argument("estimate: column index out of range (dataset has " +
                                    std::to_string(data.dim()) + " feature columns)");
    std::vector<double> sample(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) sample[i] = data.points(i, a.column);
    BlockPlan plan{a.blocks, a.block_size};
    RngStream rng(a.seed);
    std::cout << "bmom " << format_sig6(bmom(sample, plan, rng)) << "\n";
    return 0;
}

struct ExperimentArgs {
    std::string config, scenario_name, output_prefix, methods_csv;
    std::size_t repetitions = 0;
    std::uint64_t seed = 0;
    bool have_seed = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    ScenarioConfig cfg;
    cfg.scenario = preset("sim1");
    if (!a.config.empty()) apply_config_file(a.config, cfg);
    if (!a.scenario_name.empty()) cfg.scenario = preset(a.scenario_name);
    if (!a.methods_csv.empty()) {
        cfg.methods.clear();
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = a.methods_csv.find(',', start);
            cfg.methods.push_back(a.methods_csv.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    if (a.repetitions > 0) cfg.repetitions = a.repetitions;
    if (a.have_seed) cfg.master_seed = a.seed;
    if (!a.output_prefix.empty()) cfg.output_prefix = a.output_prefix;
    if (cfg.methods.empty()) cfg.methods = {"kmpp", "kbmom_kmpp"};

    ExperimentResult result = run_experiment(cfg, default_workers());
    std::cout << "method,rmse_mean,accuracy_mean,ari_mean,distortion_mean,nb_mean,"
                 "n_ok,n_failed\n";
    for (const auto& agg : result.aggregates)
        std::cout << agg.method << ',' << format_sig6(agg.rmse_mean) << ','
                  << format_sig6(agg.accuracy_mean) << ',' << format_sig6(agg.ari_mean)
                  << ',' << format_sig6(agg.distortion_mean) << ','
                  << format_sig6(agg.nb_mean) << ',' << agg.n_ok << ',' << agg.n_failed
                  << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kbmom: robust clustering via bootstrap median-of-means"};
    app.require_subcommand(1);

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster", "Fit one clustering method to a CSV");
    cluster->add_option("--input", ca.input, "Input CSV")->required();
    cluster->add_option("--k", ca.k, "Number of clusters")->required();
    cluster->add_option("--method", ca.method,
                        "kbmom | block-kmom | kmeans | kmedians | trimmed-kmeans");
    cluster->add_option("--blocks", ca.blocks, "Blocks per round (kbmom family)");
    cluster->add_option("--block-size", ca.block_size, "Points per block (kbmom family)");
    cluster->add_option("--seed", ca.seed, "Master seed");
    cluster->add_option("--epsilon", ca.epsilon, "Stopping threshold (kbmom)");
    cluster->add_option("--max-iter", ca.max_iter, "Iteration cap");
    cluster->add_option("--init", ca.init, "Baseline initializer: kmpp | random");
    cluster->add_option("--n-init", ca.n_init, "Restarts for --init kmpp");
    cluster->add_option("--alpha", ca.alpha, "Trim fraction (trimmed-kmeans)");
    cluster->add_option("--output", ca.output, "Output file prefix");
    cluster->add_flag("--no-header", ca.no_header, "Input has no header row");

    TuneArgs ta;
    auto* tune = app.add_subcommand("tune", "Block-size sweep with breakpoint detection");
    tune->add_option("--input", ta.input, "Input CSV")->required();
    tune->add_option("--k", ta.k, "Number of clusters")->required();
    tune->add_option("--blocks", ta.blocks, "Blocks per sweep point");
    tune->add_option("--grid", ta.grid, "Comma list of block sizes (default: auto)");
    tune->add_option("--tau", ta.tau, "Relative jump threshold");
    tune->add_option("--seed", ta.seed, "Master seed");
    tune->add_option("--output", ta.output, "Sweep CSV path");
    tune->add_flag("--no-header", ta.no_header, "Input has no header row");

    BreakdownArgs ba;
    auto* breakdown =
        app.add_subcommand("breakdown", "Breakdown-point report for a block plan");
    breakdown->add_option("--n", ba.n, "Sample size")->required();
    breakdown->add_option("--m", ba.m, "Corrupted points")->required();
    breakdown->add_option("--block-size", ba.block_size, "Points per block")->required();
    breakdown->add_option("--blocks", ba.blocks, "Number of blocks")->required();
    breakdown->add_option("--trials", ba.trials, "Monte-Carlo trials");
    breakdown->add_option("--risk", ba.risk, "Target failure probability for the plan");
    breakdown->add_option("--seed", ba.seed, "Master seed");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario CSV");
    simulate
        ->add_option("preset", sa.preset_name,
                     "sim1 | sim2 | tuning | bench1 | bench2 | bench3")
        ->required();
    simulate->add_option("--seed", sa.seed, "Master seed");
    simulate->add_option("--outliers", sa.outliers, "Override outlier count");
    auto* beta_opt = simulate->add_option("--beta", sa.beta, "Override outlier factor");
    simulate->add_option("--output", sa.output, "Output CSV path (default <preset>.csv)");

    EstimateArgs ea;
    auto* estimate =
        app.add_subcommand("estimate", "Bootstrap median-of-means of one CSV column");
    estimate->add_option("--input", ea.input, "Input CSV")->required();
    estimate->add_option("--column", ea.column, "Feature column index");
    estimate->add_option("--block-size", ea.block_size, "Points per block")->required();
    estimate->add_option("--blocks", ea.blocks, "Number of blocks")->required();
    estimate->add_option("--seed", ea.seed, "Master seed");
    estimate->add_flag("--no-header", ea.no_header, "Input has no header row");

    ExperimentArgs xa;
    auto* experiment =
        app.add_subcommand("experiment", "Repeated scenario runs with aggregation");
    experiment->add_option("--config", xa.config, "JSON config file");
    experiment->add_option("--scenario", xa.scenario_name, "Preset name");
    experiment->add_option("--methods", xa.methods_csv, "Comma list of methods");
    experiment->add_option("--repetitions", xa.repetitions, "Repetition count");
    auto* seed_opt = experiment->add_option("--seed", xa.seed, "Master seed");
    experiment->add_option("--output", xa.output_prefix, "Output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    sa.have_beta = beta_opt->count() > 0;
    xa.have_seed = seed_opt->count() > 0;

    try {
        if (cluster->parsed()) return run_cluster(ca);
        if (tune->parsed()) return run_tune(ta);
        if (breakdown->parsed()) return run_breakdown(ba);
        if (simulate->parsed()) return run_simulate(sa);
        if (estimate->parsed()) return run_estimate(ea);
        if (experiment->parsed()) return run_experiment_cmd(xa);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
