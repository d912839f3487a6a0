#include "bass/dsgd.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace bass {

double LearningRate::at(int iteration) const {
    double lr = initial;
    for (int m : milestones) {
        if (iteration >= m) lr *= factor;
    }
    return lr;
}

Matrix mixing_step(const Matrix& x, const Matrix& w, int threads) {
    if (w.cols() != x.rows() || w.rows() != w.cols()) {
        throw std::invalid_argument("mixing_step: dimension mismatch");
    }
    const auto n = w.rows();
    const auto d = x.cols();
    Matrix out(n, d);
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(team)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
            double sum = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) sum += w(i, j) * x(j, k);
            out(i, k) = sum;
        }
    }
    return out;
}

namespace reference {

Matrix mixing_step(const Matrix& x, const Matrix& w) {
    if (w.cols() != x.rows() || w.rows() != w.cols()) {
        throw std::invalid_argument("mixing_step: dimension mismatch");
    }
    Matrix out = Matrix::Zero(w.rows(), x.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index k = 0; k < x.cols(); ++k) out(i, k) += w(i, j) * x(j, k);
        }
    }
    return out;
}

}  // namespace reference

namespace {

TraceRecord measure(const Task& task, const Matrix& x, int iter, long long slots) {
    const int n = static_cast<int>(x.rows());
    Vector mean = Vector::Zero(x.cols());
    for (int i = 0; i < n; ++i) mean += x.row(i).transpose();
    mean /= n;
    double spread = 0.0;
    for (int i = 0; i < n; ++i) spread += (x.row(i).transpose() - mean).squaredNorm();
    TraceRecord rec;
    rec.iter = iter;
    rec.slots = slots;
    rec.loss = task.loss(mean);
    rec.grad_norm = task.gradient(mean).norm();
    rec.consensus_err = spread / n;
    return rec;
}

}  // namespace

TrainTrace run_dsgd(const Task& task, Scheduler& scheduler, const TrainOptions& options) {
    if (options.iterations < 0) throw std::invalid_argument("run_dsgd: negative iteration count");
    const int n = task.node_count();
    const int d = task.dim;
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

    TrainTrace trace;
    trace.seed = options.seed;
    trace.scheduler = scheduler.name();
    trace.budget = scheduler.expected_slots();
    trace.records.reserve(static_cast<std::size_t>(options.iterations) + 1);

    Rng schedule_rng(derive_seed(options.seed, "schedule"));
    Rng failure_rng(derive_seed(options.seed, "failures"));
    std::vector<Rng> node_rng;
    node_rng.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) node_rng.emplace_back(derive_seed(options.seed, "node", static_cast<std::uint64_t>(i)));

    Matrix x = Matrix::Zero(n, d);
    long long slots = 0;
    trace.records.push_back(measure(task, x, 0, slots));

    for (int t = 0; t < options.iterations; ++t) {
        const double lr = options.lr.at(t);
#pragma omp parallel for schedule(static) num_threads(threads)
        for (int i = 0; i < n; ++i) {
            const Vector xi = x.row(i).transpose();
            const Vector g = local_gradient(task, i, xi, options.batch_size, node_rng[static_cast<std::size_t>(i)]);
            x.row(i) -= lr * g.transpose();
        }

        Schedule s = scheduler.next(schedule_rng);
        if (options.fail_prob > 0.0) s = apply_link_failures(std::move(s), options.fail_prob, failure_rng);
        slots += s.slots;

        x = mixing_step(x, s.mixing, threads);

        TraceRecord rec = measure(task, x, t + 1, slots);
        if (!std::isfinite(rec.loss) || rec.loss > kDivergenceLoss) {
            throw std::runtime_error("run_dsgd: loss " + std::to_string(rec.loss) + " at iteration " +
                                     std::to_string(t + 1) + " exceeds the divergence threshold");
        }
        trace.records.push_back(rec);
    }
    return trace;
}

}  // namespace bass
