#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bass/dsgd.hpp"
#include "bass/graph.hpp"
#include "bass/schedule.hpp"
#include "bass/trace.hpp"

namespace bass {

/// Flat key-value configuration with `[section]` headers.
struct ExperimentConfig {
    // [topology]
    std::string topology;  ///< geometric | erdos_renyi | two_stars | forest | file
    int nodes = 9;
    double topology_param = 0.4;
    std::string graph_file;
    std::string coloring = "degree";  ///< degree | natural

    // [schedule]
    std::string scheduler;  ///< bass_optimized | bass_heuristic | matching | full_comm
    std::string budget = "50%";
    int keep = 0;  ///< candidates kept after pruning, 0 keeps all

    // [optimizer]
    int outer_iterations = 5;
    double tol = 1e-6;
    int max_iters = 5000;
    std::string init = "best";

    // [task]
    std::string task = "least_squares";
    int dim = 10;
    int samples = 50;
    double heterogeneity = 1.0;
    double reg = 1e-2;

    // [train]
    int iterations = -1;
    double lr = 0.5;
    std::vector<int> milestones;
    double lr_factor = 0.1;
    int batch = 0;
    double fail_prob = 0.0;
    int threads = 0;

    // [run]
    std::uint64_t seed = 1;
    std::string out = "run";

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates. Errors (unknown key, malformed value, missing
/// required key, missing graph file) throw std::runtime_error with the line
/// number where one exists. Required: topology.kind, schedule.scheduler,
/// train.iterations.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string write_config(const ExperimentConfig& cfg);

/// "50%" -> round(q/2), at least 1; plain integers must lie in [1, q].
int resolve_budget(const std::string& budget, int q);

/// Topology, partition and budget.
struct Setup {
    Graph graph;
    Partition partition;
    int budget = 0;
};

Setup prepare(const ExperimentConfig& cfg);

/// Scheduler plus its lookup-table JSON.
struct BuiltScheduler {
    std::unique_ptr<Scheduler> scheduler;
    nlohmann::json policy;
    double rho = 0.0;
    int candidates = 0;
};

BuiltScheduler build_scheduler(const ExperimentConfig& cfg, const Setup& setup);

struct ExperimentSummary {
    nlohmann::json summary;
    TrainTrace trace;
};

/// Full pipeline. Writes config.ini, policy.json, trace.csv and summary.json
/// (run metadata included) into cfg.out.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// Reads trace CSVs and puts them on one slot grid; runs are named by their
/// path. Throws std::runtime_error naming the file for malformed input.
Comparison compare_runs(const std::vector<std::filesystem::path>& traces, int points = 101);

Task make_task_from(const ExperimentConfig& cfg);
TrainOptions train_options_from(const ExperimentConfig& cfg);

}  // namespace bass
