#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bass/graph.hpp"
#include "bass/heuristic.hpp"
#include "bass/optimizer.hpp"
#include "bass/rng.hpp"

namespace bass {

/// How a schedule is charged: one slot per broadcast subset, or two slots per
/// bidirectional link.
enum class SlotModel { broadcast, link };

/// One iteration's scheduling decision and mixing matrix.
struct Schedule {
    SlotModel model = SlotModel::broadcast;
    std::vector<int> activated;  ///< subset indices (broadcast) or matching indices (link)
    int scheduled_links = 0;     ///< links scheduled for exchange (link model)
    Matrix mixing;
    int slots = 0;
};

int slot_cost(const Schedule& s);

/// Draws candidate r with probability p_r.
Schedule sample_schedule_policy(const MixingPolicy& policy, Rng& rng);

/// Activates each subset independently; W = I - eps L̃ on the scheduled nodes.
Schedule sample_schedule_heuristic(const HeuristicPolicy& hp, const Graph& g, const Partition& p, Rng& rng);

/// Each active link fails independently; the lost weight moves to both
/// endpoints' diagonals so W stays symmetric with unit row sums.
Schedule apply_link_failures(Schedule s, double fail_prob, Rng& rng);

/// Greedy edge coloring: edges in sorted order take the first matching that
/// has neither endpoint.
std::vector<std::vector<Edge>> greedy_matchings(const Graph& g);

/// Link-scheduling baseline: matchings activated independently, each with
/// probability min{1, budget_links / |E|}, and one common link weight fitted
/// to the resulting expectations.
struct MatchingBaseline {
    std::vector<std::vector<Edge>> matchings;
    Vector probs;
    double epsilon = 0.0;
    double rho = 0.0;
    double budget_links = 0.0;
};

MatchingBaseline build_matching_baseline(const Graph& g, double budget_links);
Schedule sample_schedule_matching(const MatchingBaseline& mb, int n, Rng& rng);

/// Every subset scheduled every iteration with W = I - eps L.
struct FullCommunication {
    Matrix mixing;
    double epsilon = 0.0;
    double rho = 0.0;
    int subsets = 0;
};

FullCommunication build_full_communication(const Graph& g, const Partition& p);

/// Source of per-iteration schedules for the training loop.
class Scheduler {
  public:
    virtual ~Scheduler() = default;
    virtual Schedule next(Rng& rng) = 0;
    virtual std::string name() const = 0;
    virtual double rho() const = 0;
    virtual double expected_slots() const = 0;
};

std::unique_ptr<Scheduler> make_policy_scheduler(MixingPolicy policy);
std::unique_ptr<Scheduler> make_heuristic_scheduler(HeuristicPolicy hp, Graph g, Partition p);
std::unique_ptr<Scheduler> make_matching_scheduler(MatchingBaseline mb, int n);
std::unique_ptr<Scheduler> make_full_scheduler(FullCommunication full);

}  // namespace bass
