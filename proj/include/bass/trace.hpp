#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bass/dsgd.hpp"

namespace bass {

/// `iter,slots,loss,grad_norm,consensus_err`, floats with 17 significant digits.
void write_trace_csv(std::ostream& out, const TrainTrace& trace);

/// Throws std::runtime_error naming the offending row for malformed input.
TrainTrace read_trace_csv(std::istream& in);

nlohmann::json trace_metadata(const TrainTrace& trace);

/// Losses of several runs on one cumulative-slot grid.
struct Comparison {
    std::vector<std::string> names;
    std::vector<double> grid;
    std::vector<std::vector<double>> losses;  ///< [run][grid point]
    std::vector<double> auc;                  ///< trapezoidal area under loss vs. slots
};

/// Grid of `points` evenly spaced slot counts from 0 to the smallest final slot
/// count among the runs; losses linearly interpolated between records (the
/// last record wins among equal slot counts).
Comparison compare_traces(const std::vector<TrainTrace>& traces, const std::vector<std::string>& names,
                          int points = 101);

void write_comparison_csv(std::ostream& out, const Comparison& c);
void write_auc_csv(std::ostream& out, const Comparison& c);

}  // namespace bass
