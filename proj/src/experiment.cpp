#include "bass/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bass/heuristic.hpp"
#include "bass/optimizer.hpp"
#include "bass/rng.hpp"
#include "bass/sampler.hpp"
#include "bass/task.hpp"
#include "bass/topology.hpp"

namespace bass {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(int line, const std::string& message) {
    if (line > 0) throw std::runtime_error("config line " + std::to_string(line) + ": " + message);
    throw std::runtime_error("config: " + message);
}

template <typename T>
T parse_number(const std::string& text, int line, const std::string& key) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        fail(line, "key '" + key + "' expects a number, got '" + text + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) fail(line, "key '" + key + "' must be finite");
    }
    return value;
}

std::vector<int> parse_int_list(const std::string& text, int line, const std::string& key) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(trim(item), line, key));
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool valid_budget_syntax(const std::string& b) {
    if (b.empty()) return false;
    const bool percent = b.back() == '%';
    const std::string body = percent ? b.substr(0, b.size() - 1) : b;
    if (percent) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        return ec == std::errc() && ptr == body.data() + body.size() && v > 0.0 && v <= 100.0;
    }
    int v = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    return ec == std::errc() && ptr == body.data() + body.size() && v >= 1;
}

const std::set<std::string> kSchedulers = {"bass_optimized", "bass_heuristic", "matching", "full_comm"};

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

std::map<std::string, Setter> setters() {
    std::map<std::string, Setter> s;
    auto str = [](std::string ExperimentConfig::*field) {
        return [field](ExperimentConfig& c, const std::string& v, int) { c.*field = v; };
    };
    auto integer = [](int ExperimentConfig::*field, const std::string& key) {
        return [field, key](ExperimentConfig& c, const std::string& v, int line) {
            c.*field = parse_number<int>(v, line, key);
        };
    };
    auto real = [](double ExperimentConfig::*field, const std::string& key) {
        return [field, key](ExperimentConfig& c, const std::string& v, int line) {
            c.*field = parse_number<double>(v, line, key);
        };
    };
    s["topology.kind"] = str(&ExperimentConfig::topology);
    s["topology.nodes"] = integer(&ExperimentConfig::nodes, "topology.nodes");
    s["topology.param"] = real(&ExperimentConfig::topology_param, "topology.param");
    s["topology.file"] = str(&ExperimentConfig::graph_file);
    s["topology.coloring"] = str(&ExperimentConfig::coloring);
    s["schedule.scheduler"] = str(&ExperimentConfig::scheduler);
    s["schedule.budget"] = str(&ExperimentConfig::budget);
    s["schedule.keep"] = integer(&ExperimentConfig::keep, "schedule.keep");
    s["optimizer.outer_iterations"] = integer(&ExperimentConfig::outer_iterations, "optimizer.outer_iterations");
    s["optimizer.tol"] = real(&ExperimentConfig::tol, "optimizer.tol");
    s["optimizer.max_iters"] = integer(&ExperimentConfig::max_iters, "optimizer.max_iters");
    s["optimizer.init"] = str(&ExperimentConfig::init);
    s["task.kind"] = str(&ExperimentConfig::task);
    s["task.dim"] = integer(&ExperimentConfig::dim, "task.dim");
    s["task.samples"] = integer(&ExperimentConfig::samples, "task.samples");
    s["task.heterogeneity"] = real(&ExperimentConfig::heterogeneity, "task.heterogeneity");
    s["task.reg"] = real(&ExperimentConfig::reg, "task.reg");
    s["train.iterations"] = integer(&ExperimentConfig::iterations, "train.iterations");
    s["train.lr"] = real(&ExperimentConfig::lr, "train.lr");
    s["train.milestones"] = [](ExperimentConfig& c, const std::string& v, int line) {
        c.milestones = parse_int_list(v, line, "train.milestones");
    };
    s["train.lr_factor"] = real(&ExperimentConfig::lr_factor, "train.lr_factor");
    s["train.batch"] = integer(&ExperimentConfig::batch, "train.batch");
    s["train.fail_prob"] = real(&ExperimentConfig::fail_prob, "train.fail_prob");
    s["train.threads"] = integer(&ExperimentConfig::threads, "train.threads");
    s["run.seed"] = [](ExperimentConfig& c, const std::string& v, int line) {
        c.seed = parse_number<std::uint64_t>(v, line, "run.seed");
    };
    s["run.out"] = str(&ExperimentConfig::out);
    return s;
}

void validate(const ExperimentConfig& c, const std::map<std::string, int>& lines) {
    auto at = [&](const std::string& key) {
        const auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    };
    auto check = [&](bool ok, const std::string& key, const std::string& message) {
        if (!ok) fail(at(key), "key '" + key + "' " + message);
    };
    if (c.topology == "file") {
        check(!c.graph_file.empty(), "topology.file", "is required when topology.kind = file");
        check(std::filesystem::is_regular_file(c.graph_file), "topology.file",
              "names a missing file '" + c.graph_file + "'");
    } else {
        try {
            parse_topology_kind(c.topology);
        } catch (const std::exception&) {
            fail(at("topology.kind"), "unknown topology kind '" + c.topology + "'");
        }
        check(c.nodes >= 2, "topology.nodes", "must be at least 2");
    }
    check(c.coloring == "degree" || c.coloring == "natural", "topology.coloring", "must be degree or natural");
    check(kSchedulers.contains(c.scheduler), "schedule.scheduler", "unknown scheduler '" + c.scheduler + "'");
    check(valid_budget_syntax(c.budget), "schedule.budget", "must be a positive integer or a percentage in (0, 100]");
    check(c.keep >= 0, "schedule.keep", "must be nonnegative");
    check(c.outer_iterations >= 0, "optimizer.outer_iterations", "must be nonnegative");
    check(c.tol > 0.0, "optimizer.tol", "must be positive");
    check(c.max_iters > 0, "optimizer.max_iters", "must be positive");
    check(c.init == "a" || c.init == "b" || c.init == "best", "optimizer.init", "must be a, b or best");
    check(c.task == "least_squares" || c.task == "logistic", "task.kind", "must be least_squares or logistic");
    check(c.dim >= 1, "task.dim", "must be positive");
    check(c.samples >= 1, "task.samples", "must be positive");
    check(c.heterogeneity >= 0.0, "task.heterogeneity", "must be nonnegative");
    check(c.reg >= 0.0, "task.reg", "must be nonnegative");
    check(c.iterations >= 0, "train.iterations", "must be nonnegative");
    check(c.lr > 0.0, "train.lr", "must be positive");
    for (int m : c.milestones) check(m >= 0, "train.milestones", "must be nonnegative");
    check(c.lr_factor > 0.0, "train.lr_factor", "must be positive");
    check(c.batch >= 0, "train.batch", "must be nonnegative");
    check(c.fail_prob >= 0.0 && c.fail_prob < 1.0, "train.fail_prob", "must lie in [0, 1)");
    check(c.threads >= 0, "train.threads", "must be nonnegative");
    check(!c.out.empty(), "run.out", "must not be empty");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    static const auto table = setters();
    ExperimentConfig cfg;
    std::map<std::string, int> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) continue;
        if (content.front() == '[') {
            if (content.back() != ']') fail(line, "unterminated section header");
            section = trim(content.substr(1, content.size() - 2));
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        if (section.empty()) fail(line, "key outside of any [section]");
        const std::string key = section + "." + trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        const auto it = table.find(key);
        if (it == table.end()) fail(line, "unknown key '" + key + "'");
        if (seen.contains(key)) fail(line, "duplicate key '" + key + "'");
        seen[key] = line;
        it->second(cfg, value, line);
    }
    for (const char* key : {"topology.kind", "schedule.scheduler", "train.iterations"}) {
        if (!seen.contains(key)) fail(0, std::string("missing required key '") + key + "'");
    }
    validate(cfg, seen);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

std::string write_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[topology]\n"
        << "kind = " << c.topology << "\n"
        << "nodes = " << c.nodes << "\n"
        << "param = " << format_double(c.topology_param) << "\n"
        << "file = " << c.graph_file << "\n"
        << "coloring = " << c.coloring << "\n\n"
        << "[schedule]\n"
        << "scheduler = " << c.scheduler << "\n"
        << "budget = " << c.budget << "\n"
        << "keep = " << c.keep << "\n\n"
        << "[optimizer]\n"
        << "outer_iterations = " << c.outer_iterations << "\n"
        << "tol = " << format_double(c.tol) << "\n"
        << "max_iters = " << c.max_iters << "\n"
        << "init = " << c.init << "\n\n"
        << "[task]\n"
        << "kind = " << c.task << "\n"
        << "dim = " << c.dim << "\n"
        << "samples = " << c.samples << "\n"
        << "heterogeneity = " << format_double(c.heterogeneity) << "\n"
        << "reg = " << format_double(c.reg) << "\n\n"
        << "[train]\n"
        << "iterations = " << c.iterations << "\n"
        << "lr = " << format_double(c.lr) << "\n"
        << "milestones = ";
    for (std::size_t i = 0; i < c.milestones.size(); ++i) out << (i ? "," : "") << c.milestones[i];
    out << "\n"
        << "lr_factor = " << format_double(c.lr_factor) << "\n"
        << "batch = " << c.batch << "\n"
        << "fail_prob = " << format_double(c.fail_prob) << "\n"
        << "threads = " << c.threads << "\n\n"
        << "[run]\n"
        << "seed = " << c.seed << "\n"
        << "out = " << c.out << "\n";
    return out.str();
}

int resolve_budget(const std::string& budget, int q) {
    if (q < 1) throw std::invalid_argument("budget: partition has no subsets");
    if (!valid_budget_syntax(budget)) throw std::invalid_argument("budget: malformed value '" + budget + "'");
    if (budget.back() == '%') {
        const double percent = std::stod(budget.substr(0, budget.size() - 1));
        return std::clamp(static_cast<int>(std::lround(q * percent / 100.0)), 1, q);
    }
    const int b = std::stoi(budget);
    if (b > q) {
        throw std::invalid_argument("budget " + budget + " exceeds the number of subsets q = " + std::to_string(q));
    }
    return b;
}

Setup prepare(const ExperimentConfig& cfg) {
    Setup s;
    if (cfg.topology == "file") {
        std::ifstream in(cfg.graph_file);
        if (!in) throw std::runtime_error("cannot open graph file " + cfg.graph_file);
        try {
            s.graph = read_graph(in);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(cfg.graph_file + ": " + e.what());
        }
        if (!s.graph.connected()) throw std::runtime_error(cfg.graph_file + ": graph is not connected");
    } else {
        s.graph = generate_topology(parse_topology_kind(cfg.topology), cfg.nodes, cfg.topology_param,
                                    derive_seed(cfg.seed, "topology"));
    }
    const auto order = cfg.coloring == "natural" ? ColoringOrder::natural : ColoringOrder::degree_descending;
    s.partition = collision_free_partition(s.graph, order);
    s.budget = resolve_budget(cfg.budget, s.partition.count());
    return s;
}

BuiltScheduler build_scheduler(const ExperimentConfig& cfg, const Setup& setup) {
    BuiltScheduler b;
    const int n = setup.graph.size();
    if (cfg.scheduler == "bass_optimized") {
        CandidateSet cs = enumerate_candidates(setup.graph, setup.partition, setup.budget);
        if (cfg.keep > 0 && cfg.keep < cs.size()) cs = prune_candidates(cs, cfg.keep, derive_seed(cfg.seed, "prune"));
        const SolverOptions options{cfg.tol, cfg.max_iters};
        auto opt = optimize_policy(cs, cfg.outer_iterations, parse_init_choice(cfg.init), options);
        b.policy = policy_to_json(opt.policy);
        b.policy["init_used"] = opt.init_used;
        b.policy["init_rho"] = opt.init_rho;
        b.policy["objective_trace"] = opt.trace;
        b.rho = opt.policy.rho;
        b.candidates = opt.policy.candidates.size();
        b.scheduler = make_policy_scheduler(std::move(opt.policy));
    } else if (cfg.scheduler == "bass_heuristic") {
        auto hp = build_heuristic_policy(setup.graph, setup.partition, setup.budget);
        b.policy = heuristic_to_json(hp);
        b.rho = hp.rho;
        b.scheduler = make_heuristic_scheduler(std::move(hp), setup.graph, setup.partition);
    } else if (cfg.scheduler == "matching") {
        auto mb = build_matching_baseline(setup.graph, setup.budget / 2.0);
        nlohmann::json matchings = nlohmann::json::array();
        for (const auto& m : mb.matchings) {
            nlohmann::json links = nlohmann::json::array();
            for (const auto& e : m) links.push_back({e.u, e.v});
            matchings.push_back(links);
        }
        b.policy = {{"matchings", matchings},
                    {"probs", to_std(mb.probs)},
                    {"epsilon", mb.epsilon},
                    {"rho", mb.rho},
                    {"budget_links", mb.budget_links}};
        b.rho = mb.rho;
        b.candidates = static_cast<int>(mb.matchings.size());
        b.scheduler = make_matching_scheduler(std::move(mb), n);
    } else if (cfg.scheduler == "full_comm") {
        auto full = build_full_communication(setup.graph, setup.partition);
        b.policy = {{"epsilon", full.epsilon}, {"rho", full.rho}, {"subsets", full.subsets}};
        b.rho = full.rho;
        b.candidates = 1;
        b.scheduler = make_full_scheduler(std::move(full));
    } else {
        throw std::invalid_argument("unknown scheduler '" + cfg.scheduler + "'");
    }
    return b;
}

Task make_task_from(const ExperimentConfig& cfg) {
    return make_task(parse_task_kind(cfg.task), cfg.nodes, cfg.dim, cfg.samples, cfg.heterogeneity,
                     derive_seed(cfg.seed, "task"), cfg.reg);
}

TrainOptions train_options_from(const ExperimentConfig& cfg) {
    TrainOptions o;
    o.iterations = cfg.iterations;
    o.lr = LearningRate{cfg.lr, cfg.milestones, cfg.lr_factor};
    o.batch_size = cfg.batch;
    o.fail_prob = cfg.fail_prob;
    o.seed = derive_seed(cfg.seed, "train");
    o.threads = cfg.threads;
    return o;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    const Setup setup = prepare(cfg);
    BuiltScheduler built = build_scheduler(cfg, setup);

    ExperimentConfig effective = cfg;
    effective.nodes = setup.graph.size();
    const Task task = make_task_from(effective);

    ExperimentSummary result;
    result.trace = run_dsgd(task, *built.scheduler, train_options_from(cfg));
    const TraceRecord& last = result.trace.records.back();

    nlohmann::json& s = result.summary;
    s = trace_metadata(result.trace);
    s["seed"] = cfg.seed;
    s["nodes"] = setup.graph.size();
    s["edges"] = setup.graph.edges().size();
    s["q"] = setup.partition.count();
    s["budget"] = setup.budget;
    s["R"] = built.candidates;
    s["rho"] = built.rho;
    if (cfg.scheduler == "bass_optimized" || cfg.scheduler == "bass_heuristic") {
        s["rho_heuristic"] = cfg.scheduler == "bass_heuristic"
                                 ? built.rho
                                 : build_heuristic_policy(setup.graph, setup.partition, setup.budget).rho;
    }
    s["expected_slots_per_iteration"] = built.scheduler->expected_slots();
    s["iterations"] = last.iter;
    s["total_slots"] = last.slots;
    s["final_loss"] = last.loss;
    s["final_grad_norm"] = last.grad_norm;
    s["final_consensus_err"] = last.consensus_err;
    if (task.optimal_value) s["final_suboptimality"] = last.loss - *task.optimal_value;

    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    write_file(dir / "config.ini", write_config(cfg));
    write_file(dir / "policy.json", built.policy.dump(2) + "\n");
    std::ostringstream csv;
    write_trace_csv(csv, result.trace);
    write_file(dir / "trace.csv", csv.str());
    write_file(dir / "summary.json", s.dump(2) + "\n");
    return result;
}

Comparison compare_runs(const std::vector<std::filesystem::path>& traces, int points) {
    std::vector<TrainTrace> loaded;
    std::vector<std::string> names;
    for (const auto& path : traces) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open trace " + path.string());
        try {
            loaded.push_back(read_trace_csv(in));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(path.string() + ": " + e.what());
        }
        names.push_back(path.string());
    }
    return compare_traces(loaded, names, points);
}

}  // namespace bass
