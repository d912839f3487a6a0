#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bass/schedule.hpp"
#include "bass/task.hpp"

namespace bass {

/// Step schedule: `initial`, multiplied by `factor` after each milestone.
struct LearningRate {
    double initial = 0.05;
    std::vector<int> milestones;
    double factor = 0.1;

    double at(int iteration) const;
};

struct TrainOptions {
    int iterations = 250;
    LearningRate lr;
    int batch_size = 0;  ///< 0: full local batch
    double fail_prob = 0.0;
    std::uint64_t seed = 1;
    int threads = 0;  ///< 0: OpenMP default
};

struct TraceRecord {
    int iter = 0;
    long long slots = 0;  ///< cumulative
    double loss = 0.0;
    double grad_norm = 0.0;
    double consensus_err = 0.0;
};

struct TrainTrace {
    std::vector<TraceRecord> records;
    std::uint64_t seed = 0;
    std::string scheduler;
    double budget = 0.0;
};

/// X' = W X, rows computed in parallel. The column means are unchanged
/// whenever 1ᵀW = 1ᵀ. `threads` = 0 uses the OpenMP default.
Matrix mixing_step(const Matrix& x, const Matrix& w, int threads = 0);

/// Decentralized SGD: local gradient step at every node, one sampled
/// schedule (optionally with link failures), then mixing. Records metrics of
/// the network average after every iteration, plus t = 0. One master seed
/// yields a shared schedule stream and one data stream per node, so the trace
/// is bitwise reproducible for any thread count. Throws std::runtime_error if
/// the loss exceeds 1e6.
TrainTrace run_dsgd(const Task& task, Scheduler& scheduler, const TrainOptions& options);

inline constexpr double kDivergenceLoss = 1e6;

namespace reference {

Matrix mixing_step(const Matrix& x, const Matrix& w);

}  // namespace reference

}  // namespace bass
