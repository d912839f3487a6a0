#include "bass/schedule.hpp"

#include <algorithm>
#include <stdexcept>

#include "bass/sampler.hpp"

namespace bass {

int slot_cost(const Schedule& s) {
    return s.model == SlotModel::broadcast ? static_cast<int>(s.activated.size()) : 2 * s.scheduled_links;
}

Schedule sample_schedule_policy(const MixingPolicy& policy, Rng& rng) {
    const double u = uniform01(rng);
    const auto r_count = policy.probs.size();
    Eigen::Index r = 0;
    double cumulative = policy.probs(0);
    while (r + 1 < r_count && u >= cumulative) {
        ++r;
        cumulative += policy.probs(r);
    }
    // skip zero-probability tail entries reached through rounding
    while (r > 0 && policy.probs(r) == 0.0) --r;
    const auto& c = policy.candidates.candidates[static_cast<std::size_t>(r)];
    Schedule s;
    s.model = SlotModel::broadcast;
    s.activated = c.subset_indices;
    s.mixing = policy.matrices[static_cast<std::size_t>(r)];
    s.slots = slot_cost(s);
    return s;
}

Schedule sample_schedule_heuristic(const HeuristicPolicy& hp, const Graph& g, const Partition& p, Rng& rng) {
    Schedule s;
    s.model = SlotModel::broadcast;
    std::vector<char> active(static_cast<std::size_t>(g.size()), 0);
    for (int k = 0; k < p.count(); ++k) {
        if (uniform01(rng) < hp.subset_probs(k)) {
            s.activated.push_back(k);
            for (int i : p.subsets[static_cast<std::size_t>(k)]) active[static_cast<std::size_t>(i)] = 1;
        }
    }
    s.mixing = Matrix::Identity(g.size(), g.size());
    for (const Edge& e : g.edges()) {
        if (active[static_cast<std::size_t>(e.u)] && active[static_cast<std::size_t>(e.v)]) {
            s.mixing(e.u, e.v) = hp.epsilon;
            s.mixing(e.v, e.u) = hp.epsilon;
            s.mixing(e.u, e.u) -= hp.epsilon;
            s.mixing(e.v, e.v) -= hp.epsilon;
        }
    }
    s.slots = slot_cost(s);
    return s;
}

Schedule apply_link_failures(Schedule s, double fail_prob, Rng& rng) {
    if (fail_prob < 0.0 || fail_prob >= 1.0) {
        throw std::invalid_argument("apply_link_failures: probability must lie in [0, 1)");
    }
    if (fail_prob == 0.0) return s;
    Matrix& w = s.mixing;
    const auto n = w.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (w(i, j) == 0.0 && w(j, i) == 0.0) continue;
            if (uniform01(rng) < fail_prob) {
                w(i, i) += w(i, j);
                w(j, j) += w(j, i);
                w(i, j) = 0.0;
                w(j, i) = 0.0;
            }
        }
    }
    return s;
}

std::vector<std::vector<Edge>> greedy_matchings(const Graph& g) {
    std::vector<std::vector<Edge>> matchings;
    std::vector<std::vector<char>> used;  // used[k][node]
    for (const Edge& e : g.edges()) {
        std::size_t k = 0;
        while (k < matchings.size() && (used[k][static_cast<std::size_t>(e.u)] || used[k][static_cast<std::size_t>(e.v)])) ++k;
        if (k == matchings.size()) {
            matchings.emplace_back();
            used.emplace_back(static_cast<std::size_t>(g.size()), 0);
        }
        matchings[k].push_back(e);
        used[k][static_cast<std::size_t>(e.u)] = 1;
        used[k][static_cast<std::size_t>(e.v)] = 1;
    }
    return matchings;
}

namespace {

Matrix edge_laplacian(int n, const std::vector<Edge>& edges) {
    Matrix l = Matrix::Zero(n, n);
    for (const Edge& e : edges) {
        l(e.u, e.u) += 1.0;
        l(e.v, e.v) += 1.0;
        l(e.u, e.v) -= 1.0;
        l(e.v, e.u) -= 1.0;
    }
    return l;
}

}  // namespace

MatchingBaseline build_matching_baseline(const Graph& g, double budget_links) {
    if (!(budget_links >= 1.0)) {
        throw std::invalid_argument("matching baseline: link budget must be at least 1");
    }
    if (g.edges().empty()) throw std::invalid_argument("matching baseline: graph has no links");
    MatchingBaseline mb;
    mb.budget_links = budget_links;
    mb.matchings = greedy_matchings(g);
    const double p = std::min(1.0, budget_links / static_cast<double>(g.edges().size()));
    mb.probs = Vector::Constant(static_cast<Eigen::Index>(mb.matchings.size()), p);

    const int n = g.size();
    Matrix first = Matrix::Zero(n, n);
    Matrix second_diag = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < mb.matchings.size(); ++k) {
        const Matrix l = edge_laplacian(n, mb.matchings[k]);
        const double pk = mb.probs(static_cast<Eigen::Index>(k));
        first += pk * l;
        second_diag += (pk - pk * pk) * (l * l);
    }
    // independent activations: E[L̃²] = E[L̃]² + sum_k p_k(1-p_k) L_k²
    const Matrix second = first * first + second_diag;
    const auto sol = minimize_link_weight(first, second);
    mb.epsilon = sol.epsilon;
    mb.rho = symmetric_norm(Matrix::Identity(n, n) - 2.0 * sol.epsilon * first + sol.epsilon * sol.epsilon * second -
                            averaging_matrix(n));
    return mb;
}

Schedule sample_schedule_matching(const MatchingBaseline& mb, int n, Rng& rng) {
    Schedule s;
    s.model = SlotModel::link;
    s.mixing = Matrix::Identity(n, n);
    for (std::size_t k = 0; k < mb.matchings.size(); ++k) {
        if (uniform01(rng) < mb.probs(static_cast<Eigen::Index>(k))) {
            s.activated.push_back(static_cast<int>(k));
            for (const Edge& e : mb.matchings[k]) {
                s.mixing(e.u, e.v) = mb.epsilon;
                s.mixing(e.v, e.u) = mb.epsilon;
                s.mixing(e.u, e.u) -= mb.epsilon;
                s.mixing(e.v, e.v) -= mb.epsilon;
                ++s.scheduled_links;
            }
        }
    }
    s.slots = slot_cost(s);
    return s;
}

FullCommunication build_full_communication(const Graph& g, const Partition& p) {
    FullCommunication full;
    const Matrix l = laplacian(g);
    const auto sol = minimize_link_weight(l, l * l);
    full.epsilon = sol.epsilon;
    full.mixing = Matrix::Identity(g.size(), g.size()) - sol.epsilon * l;
    full.rho = symmetric_norm(full.mixing * full.mixing - averaging_matrix(g.size()));
    full.subsets = p.count();
    return full;
}

namespace {

class PolicyScheduler final : public Scheduler {
  public:
    explicit PolicyScheduler(MixingPolicy policy) : policy_(std::move(policy)) {}
    Schedule next(Rng& rng) override { return sample_schedule_policy(policy_, rng); }
    std::string name() const override { return "bass_optimized"; }
    double rho() const override { return policy_.rho; }
    double expected_slots() const override {
        double s = 0.0;
        for (int r = 0; r < policy_.candidates.size(); ++r) s += policy_.probs(r) * policy_.candidates.candidates[static_cast<std::size_t>(r)].cost();
        return s;
    }

  private:
    MixingPolicy policy_;
};

class HeuristicScheduler final : public Scheduler {
  public:
    HeuristicScheduler(HeuristicPolicy hp, Graph g, Partition p) : hp_(std::move(hp)), g_(std::move(g)), p_(std::move(p)) {}
    Schedule next(Rng& rng) override { return sample_schedule_heuristic(hp_, g_, p_, rng); }
    std::string name() const override { return "bass_heuristic"; }
    double rho() const override { return hp_.rho; }
    double expected_slots() const override { return hp_.subset_probs.sum(); }

  private:
    HeuristicPolicy hp_;
    Graph g_;
    Partition p_;
};

class MatchingScheduler final : public Scheduler {
  public:
    MatchingScheduler(MatchingBaseline mb, int n) : mb_(std::move(mb)), n_(n) {}
    Schedule next(Rng& rng) override { return sample_schedule_matching(mb_, n_, rng); }
    std::string name() const override { return "matching"; }
    double rho() const override { return mb_.rho; }
    double expected_slots() const override {
        double links = 0.0;
        for (std::size_t k = 0; k < mb_.matchings.size(); ++k) links += mb_.probs(static_cast<Eigen::Index>(k)) * static_cast<double>(mb_.matchings[k].size());
        return 2.0 * links;
    }

  private:
    MatchingBaseline mb_;
    int n_;
};

class FullScheduler final : public Scheduler {
  public:
    explicit FullScheduler(FullCommunication full) : full_(std::move(full)) {
        for (int k = 0; k < full_.subsets; ++k) all_.push_back(k);
    }
    Schedule next(Rng&) override {
        Schedule s;
        s.model = SlotModel::broadcast;
        s.activated = all_;
        s.mixing = full_.mixing;
        s.slots = slot_cost(s);
        return s;
    }
    std::string name() const override { return "full_comm"; }
    double rho() const override { return full_.rho; }
    double expected_slots() const override { return full_.subsets; }

  private:
    FullCommunication full_;
    std::vector<int> all_;
};

}  // namespace

std::unique_ptr<Scheduler> make_policy_scheduler(MixingPolicy policy) {
    return std::make_unique<PolicyScheduler>(std::move(policy));
}
std::unique_ptr<Scheduler> make_heuristic_scheduler(HeuristicPolicy hp, Graph g, Partition p) {
    return std::make_unique<HeuristicScheduler>(std::move(hp), std::move(g), std::move(p));
}
std::unique_ptr<Scheduler> make_matching_scheduler(MatchingBaseline mb, int n) {
    return std::make_unique<MatchingScheduler>(std::move(mb), n);
}
std::unique_ptr<Scheduler> make_full_scheduler(FullCommunication full) {
    return std::make_unique<FullScheduler>(std::move(full));
}

}  // namespace bass
