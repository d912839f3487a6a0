#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bass/experiment.hpp"
#include "bass/sampler.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Override run.seed");
    cmd->add_option("--out", c.out, "Override run.out (output directory)");
}

bass::ExperimentConfig load(const Common& c) {
    auto cfg = bass::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (c.out) cfg.out = *c.out;
    return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int run_partition(const Common& c) {
    const auto cfg = load(c);
    const auto setup = bass::prepare(cfg);
    nlohmann::json j;
    j["nodes"] = setup.graph.size();
    j["edges"] = setup.graph.edges().size();
    j["density"] = bass::density(setup.graph);
    j["q"] = setup.partition.count();
    j["subsets"] = setup.partition.subsets;
    j["budget"] = setup.budget;
    j["R"] = bass::binomial(setup.partition.count(), setup.budget);

    std::filesystem::create_directories(cfg.out);
    std::ofstream graph(std::filesystem::path(cfg.out) / "graph.txt");
    bass::write_graph(graph, setup.graph);
    write_text(std::filesystem::path(cfg.out) / "partition.json", j.dump(2) + "\n");
    std::printf("n=%d q=%d budget=%d R=%lld\n", setup.graph.size(), setup.partition.count(), setup.budget,
                bass::binomial(setup.partition.count(), setup.budget));
    return 0;
}

int run_optimize(const Common& c) {
    const auto cfg = load(c);
    const auto setup = bass::prepare(cfg);
    const auto built = bass::build_scheduler(cfg, setup);
    std::filesystem::create_directories(cfg.out);
    write_text(std::filesystem::path(cfg.out) / "config.ini", bass::write_config(cfg));
    write_text(std::filesystem::path(cfg.out) / "policy.json", built.policy.dump(2) + "\n");
    std::printf("scheduler=%s q=%d budget=%d rho=%.10g\n", cfg.scheduler.c_str(), setup.partition.count(),
                setup.budget, built.rho);
    return 0;
}

int run_train(const Common& c) {
    const auto cfg = load(c);
    const auto result = bass::run_experiment(cfg);
    const auto& s = result.summary;
    std::printf("scheduler=%s rho=%.10g slots=%lld loss=%.10g grad_norm=%.3e\n", cfg.scheduler.c_str(),
                s["rho"].get<double>(), s["total_slots"].get<long long>(), s["final_loss"].get<double>(),
                s["final_grad_norm"].get<double>());
    return 0;
}

int run_compare(const std::vector<std::string>& traces, const std::optional<std::string>& out, int points) {
    std::vector<std::filesystem::path> paths(traces.begin(), traces.end());
    const auto cmp = bass::compare_runs(paths, points);
    if (out) {
        std::filesystem::create_directories(*out);
        std::ofstream table(std::filesystem::path(*out) / "comparison.csv");
        bass::write_comparison_csv(table, cmp);
        std::ofstream auc(std::filesystem::path(*out) / "auc.csv");
        bass::write_auc_csv(auc, cmp);
    }
    bass::write_auc_csv(std::cout, cmp);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Broadcast subgraph sampling for decentralized SGD"};
    app.require_subcommand(1);

    Common partition_opts, optimize_opts, train_opts;
    auto* partition = app.add_subcommand("partition", "Generate the topology and its collision-free partition");
    add_common(partition, partition_opts);
    auto* optimize = app.add_subcommand("optimize", "Build the scheduling policy (lookup table)");
    add_common(optimize, optimize_opts);
    auto* train = app.add_subcommand("train", "Run the full pipeline and write trace and summary");
    add_common(train, train_opts);

    std::vector<std::string> traces;
    std::optional<std::string> compare_out;
    int points = 101;
    auto* compare = app.add_subcommand("compare", "Compare loss-vs-slots traces");
    compare->add_option("traces", traces, "Trace CSV files")->required()->expected(2, -1);
    compare->add_option("--out", compare_out, "Directory for comparison.csv and auc.csv");
    compare->add_option("--points", points, "Grid points")->check(CLI::Range(2, 100000));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*partition) return run_partition(partition_opts);
        if (*optimize) return run_optimize(optimize_opts);
        if (*train) return run_train(train_opts);
        if (*compare) return run_compare(traces, compare_out, points);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
