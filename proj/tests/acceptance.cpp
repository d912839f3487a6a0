#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bass/experiment.hpp"
#include "bass/heuristic.hpp"
#include "bass/optimizer.hpp"
#include "bass/topology.hpp"
#include "oracles.hpp"

using namespace bass;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TwoStars {
    Graph g = generate_topology(TopologyKind::two_stars, 9, 0.0, 1);
    Partition p = collision_free_partition(g);
    int budget = resolve_budget("50%", p.count());
};

// Shared D-SGD setting: least squares on a 9-node Erdos-Renyi graph.
ExperimentConfig training_config(const std::string& scheduler, const std::string& out) {
    ExperimentConfig c = parse_config(
        "[topology]\nkind = erdos_renyi\nnodes = 9\nparam = 0.5\n"
        "[schedule]\nscheduler = full_comm\nbudget = 50%\n"
        "[task]\ndim = 10\nsamples = 5000\nheterogeneity = 0.01\nreg = 0.01\n"
        "[train]\niterations = 2000\nlr = 2\nmilestones = 50,100,200,400,800,1600\nlr_factor = 0.5\n"
        "[run]\nseed = 1\n");
    c.scheduler = scheduler;
    c.out = (fs::temp_directory_path() / ("bass_acceptance_" + out)).string();
    return c;
}

// First record with grad_norm below the threshold, or nullptr.
const TraceRecord* first_below(const TrainTrace& t, double threshold) {
    for (const auto& r : t.records)
        if (r.grad_norm < threshold) return &r;
    return nullptr;
}

Outcome partition_validity() {
    Rng rng(101);
    int violations = 0, graphs = 0;
    for (; graphs < 200; ++graphs) {
        const int n = 2 + static_cast<int>(uniform01(rng) * 29);
        const Graph g = oracle::random_graph(rng, n);
        const Partition p = collision_free_partition(g);
        std::vector<int> seen(n, 0);
        for (const auto& s : p.subsets) {
            if (!oracle::collision_free(g, s)) ++violations;
            for (int i : s) ++seen[i];
        }
        for (int c : seen)
            if (c != 1) ++violations;
    }
    return {violations == 0, fmt("%d graphs, %d violations", graphs, violations)};
}

Outcome expectation_oracle() {
    Rng rng(103);
    double worst = 0.0;
    int tested = 0;
    while (tested < 50) {
        const int n = 3 + static_cast<int>(uniform01(rng) * 14);
        const Graph g = oracle::random_graph(rng, n);
        const Partition p = collision_free_partition(g);
        if (p.count() > 10) continue;
        ++tested;
        Vector sp(p.count());
        for (auto& v : sp) v = uniform01(rng);
        const Vector np = node_probabilities(p, sp, n);
        const auto m = oracle::enumerate_moments(g, p, sp);
        worst = std::max(worst, (expected_laplacian(g, p, np) - m.mean).cwiseAbs().maxCoeff());
        worst = std::max(worst, (expected_laplacian_gram(g, p, np) - m.gram).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-10, fmt("%d graphs, max error %.3e", tested, worst)};
}

Outcome closed_form_anchors() {
    const int n = 7;
    const std::vector<Matrix> j{averaging_matrix(n)}, id{Matrix::Identity(n, n)};
    const Vector one = Vector::Ones(1);
    const double rho_j = rho(j, one), rho_i = rho(id, one);

    const Graph k2 = oracle::complete(2);
    const std::vector<Matrix> l{laplacian(k2)};
    const EpsilonSolution a = init_epsilon(l, one);
    const Partition p = oracle::singletons(2);
    const Vector both = Vector::Ones(2);
    const EpsilonSolution b =
        heuristic_epsilon(expected_laplacian(k2, p, both), expected_laplacian_gram(k2, p, both));
    const bool pass = std::abs(rho_j) <= 1e-12 && std::abs(rho_i - 1.0) <= 1e-12 &&
                      std::abs(a.epsilon - 0.5) <= 1e-8 && std::abs(a.objective) <= 1e-8 &&
                      std::abs(b.epsilon - 0.5) <= 1e-8 && std::abs(b.objective) <= 1e-8;
    return {pass, fmt("rho(J)=%.1e rho(I)=%.15f eps_init=%.10f (rho %.1e) eps_heur=%.10f (rho %.1e)", rho_j, rho_i,
                      a.epsilon, a.objective, b.epsilon, b.objective)};
}

Outcome candidate_count() {
    Graph g(8, {});
    const int r = enumerate_candidates(g, oracle::singletons(8), 4).size();
    int mismatches = 0;
    for (int q = 1; q <= 12; ++q) {
        const Graph e(q, {});
        const Partition p = oracle::singletons(q);
        for (int b = 1; b <= q; ++b)
            if (enumerate_candidates(e, p, b).size() != oracle::count_combinations(q, b)) ++mismatches;
    }
    return {r == 70 && mismatches == 0, fmt("q=8 budget=4 gives R=%d; %d mismatches for q<=12", r, mismatches)};
}

Outcome alternating_optimization() {
    const TwoStars ts;
    const CandidateSet cs = enumerate_candidates(ts.g, ts.p, ts.budget);
    const MixingPolicy init = initialize_a(cs);
    const AlternatingResult res = alternating_optimize(init, 5);
    double worst_rise = 0.0;
    for (std::size_t k = 1; k < res.trace.size(); ++k)
        worst_rise = std::max(worst_rise, res.trace[k] - res.trace[k - 1]);
    const double final_rho = res.policy.rho;
    const bool monotone = worst_rise <= 1e-7;
    const bool improved = final_rho <= init.rho - 1e-4;
    return {monotone && improved, fmt("q=%d budget=%d R=%d, rho init A %.6f -> %.6f over %zu sub-steps, max rise %.2e",
                                      ts.p.count(), ts.budget, cs.size(), init.rho, final_rho, res.trace.size(),
                                      worst_rise)};
}

Outcome spectral_dominance() {
    const TwoStars ts;
    const double opt = optimize_policy(enumerate_candidates(ts.g, ts.p, ts.budget), 5).policy.rho;
    const double match = build_matching_baseline(ts.g, ts.budget / 2.0).rho;
    return {opt < match, fmt("budget %d slots: optimized %.6f, matching %.6f", ts.budget, opt, match)};
}

Outcome dsgd_convergence() {
    const ExperimentSummary full = run_experiment(training_config("full_comm", "c7_full"));
    const ExperimentSummary bass = run_experiment(training_config("bass_optimized", "c7_bass"));
    const TraceRecord* full6 = first_below(full.trace, 1e-6);
    const TraceRecord* full4 = first_below(full.trace, 1e-4);
    const TraceRecord* bass4 = first_below(bass.trace, 1e-4);
    const bool pass = full6 && full4 && bass4 && bass4->slots < full4->slots;
    return {pass, fmt("full <1e-6 at iter %d; <1e-4: full %lld slots (iter %d), bass %lld slots (iter %d)",
                      full6 ? full6->iter : -1, full4 ? full4->slots : -1LL, full4 ? full4->iter : -1,
                      bass4 ? bass4->slots : -1LL, bass4 ? bass4->iter : -1)};
}

Outcome budget_accounting() {
    const TwoStars ts;
    Rng rng(107);
    const int draws = 10000;

    auto heur = make_heuristic_scheduler(build_heuristic_policy(ts.g, ts.p, ts.budget), ts.g, ts.p);
    double total = 0.0;
    for (int k = 0; k < draws; ++k) total += heur->next(rng).slots;
    const double mean = total / draws;

    auto pol = make_policy_scheduler(optimize_policy(enumerate_candidates(ts.g, ts.p, ts.budget), 5).policy);
    int off_budget = 0;
    for (int k = 0; k < draws; ++k)
        if (pol->next(rng).slots != ts.budget) ++off_budget;

    auto match = make_matching_scheduler(build_matching_baseline(ts.g, ts.budget / 2.0), ts.g.size());
    int odd = 0;
    for (int k = 0; k < draws; ++k)
        if (match->next(rng).slots % 2 != 0) ++odd;

    const bool pass = std::abs(mean - ts.budget) <= 0.02 * ts.budget && off_budget == 0 && odd == 0;
    return {pass, fmt("budget %d: heuristic mean %.4f, policy off-budget %d, matching odd %d", ts.budget, mean,
                      off_budget, odd)};
}

Outcome link_failures() {
    const TwoStars ts;
    const MixingPolicy pol = optimize_policy(enumerate_candidates(ts.g, ts.p, ts.budget), 5).policy;
    Rng rng(109);
    double asym = 0.0, row = 0.0;
    for (double fp : {0.1, 0.2}) {
        for (int k = 0; k < 10000; ++k) {
            const Matrix w = apply_link_failures(sample_schedule_policy(pol, rng), fp, rng).mixing;
            asym = std::max(asym, (w - w.transpose()).cwiseAbs().maxCoeff());
            row = std::max(row, (w.rowwise().sum().array() - 1.0).abs().maxCoeff());
        }
    }
    std::string reached;
    bool converged = true;
    for (double fp : {0.1, 0.2}) {
        ExperimentConfig c = training_config("bass_optimized", fmt("c9_%g", fp));
        c.fail_prob = fp;
        const ExperimentSummary r = run_experiment(c);
        const TraceRecord* hit = first_below(r.trace, 1e-4);
        converged = converged && hit;
        reached += fmt(" fail %.1f: <1e-4 at iter %d;", fp, hit ? hit->iter : -1);
    }
    const bool pass = asym <= 1e-12 && row <= 1e-12 && converged;
    return {pass, fmt("max asymmetry %.1e, max row-sum error %.1e;", asym, row) + reached};
}

Outcome convexity() {
    const TwoStars ts;
    const MixingPolicy pol = optimize_policy(enumerate_candidates(ts.g, ts.p, ts.budget), 5).policy;
    const ConvexityReport pr = convexity_probe(pol, ConvexityAxis::probabilities, 500, 113);
    const ConvexityReport mr = convexity_probe(pol, ConvexityAxis::matrices, 500, 127);
    return {pr.violations == 0 && mr.violations == 0 && pr.trials == 500 && mr.trials == 500,
            fmt("probabilities: %d/%d violations (worst gap %.2e); matrices: %d/%d violations (worst gap %.2e)",
                pr.violations, pr.trials, pr.worst_gap, mr.violations, mr.trials, mr.worst_gap)};
}

Outcome determinism() {
    std::vector<std::string> traces;
    for (int threads : {1, 4}) {
        for (int rep = 0; rep < 2; ++rep) {
            ExperimentConfig c = training_config("bass_heuristic", fmt("c11_%d_%d", threads, rep));
            c.iterations = 300;
            c.samples = 200;
            c.batch = 16;
            c.fail_prob = 0.1;
            c.threads = threads;
            run_experiment(c);
            traces.push_back(slurp(fs::path(c.out) / "trace.csv"));
        }
    }
    bool same = !traces[0].empty();
    for (const auto& t : traces) same = same && t == traces[0];
    return {same, fmt("%zu runs (threads 1 and 4, two repeats each), %zu bytes, %s", traces.size(), traces[0].size(),
                      same ? "identical" : "differ")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "partition validity", 10, partition_validity},
        {2, "expectation oracle", 60, expectation_oracle},
        {3, "closed-form anchors", 60, closed_form_anchors},
        {4, "candidate count", 60, candidate_count},
        {5, "alternating optimization", 300, alternating_optimization},
        {6, "spectral dominance over matching", 300, spectral_dominance},
        {7, "D-SGD convergence", 120, dsgd_convergence},
        {8, "budget accounting", 300, budget_accounting},
        {9, "link-failure robustness", 300, link_failures},
        {10, "convexity probe", 300, convexity},
        {11, "determinism", 300, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) {
            o.pass = false;
            o.detail += fmt(" [over time limit %.0f s]", c.limit_seconds);
        }
        if (!o.pass) ++failed;
        std::printf("%s [%2d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
