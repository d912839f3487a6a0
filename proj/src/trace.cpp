#include "bass/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bass {

namespace {

constexpr const char* kHeader = "iter,slots,loss,grad_norm,consensus_err";

std::string format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
T parse_field(const std::string& text, int row, const char* column) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error("trace row " + std::to_string(row) + ": bad " + column + " value '" + text + "'");
    }
    return value;
}

// from_chars for double is missing on some toolchains
template <>
double parse_field<double>(const std::string& text, int row, const char* column) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size()) {
        throw std::runtime_error("trace row " + std::to_string(row) + ": bad " + column + " value '" + text + "'");
    }
    return value;
}

double interpolate(const TrainTrace& t, double slot) {
    const auto& r = t.records;
    // last record with slots <= slot
    auto hi = std::upper_bound(r.begin(), r.end(), slot,
                               [](double s, const TraceRecord& rec) { return s < static_cast<double>(rec.slots); });
    if (hi == r.begin()) return r.front().loss;
    const auto lo = std::prev(hi);
    if (hi == r.end() || static_cast<double>(lo->slots) == slot) return lo->loss;
    const double x0 = static_cast<double>(lo->slots);
    const double x1 = static_cast<double>(hi->slots);
    const double w = (slot - x0) / (x1 - x0);
    return (1.0 - w) * lo->loss + w * hi->loss;
}

}  // namespace

void write_trace_csv(std::ostream& out, const TrainTrace& trace) {
    out << kHeader << '\n';
    for (const auto& rec : trace.records) {
        out << rec.iter << ',' << rec.slots << ',' << format(rec.loss) << ',' << format(rec.grad_norm) << ','
            << format(rec.consensus_err) << '\n';
    }
}

TrainTrace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw std::runtime_error("trace row 1: expected header '" + std::string(kHeader) + "'");
    }
    TrainTrace trace;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() != 5) {
            throw std::runtime_error("trace row " + std::to_string(row) + ": expected 5 columns, found " +
                                     std::to_string(fields.size()));
        }
        TraceRecord rec;
        rec.iter = parse_field<int>(fields[0], row, "iter");
        rec.slots = parse_field<long long>(fields[1], row, "slots");
        rec.loss = parse_field<double>(fields[2], row, "loss");
        rec.grad_norm = parse_field<double>(fields[3], row, "grad_norm");
        rec.consensus_err = parse_field<double>(fields[4], row, "consensus_err");
        if (!trace.records.empty() && rec.slots < trace.records.back().slots) {
            throw std::runtime_error("trace row " + std::to_string(row) + ": cumulative slots decrease");
        }
        trace.records.push_back(rec);
    }
    if (trace.records.empty()) throw std::runtime_error("trace: no records");
    return trace;
}

nlohmann::json trace_metadata(const TrainTrace& trace) {
    return {{"seed", trace.seed},
            {"scheduler", trace.scheduler},
            {"budget", trace.budget},
            {"records", trace.records.size()}};
}

Comparison compare_traces(const std::vector<TrainTrace>& traces, const std::vector<std::string>& names, int points) {
    if (traces.size() < 2) throw std::invalid_argument("compare: need at least two traces");
    if (names.size() != traces.size()) throw std::invalid_argument("compare: one name per trace required");
    if (points < 2) throw std::invalid_argument("compare: need at least two grid points");
    double horizon = std::numeric_limits<double>::infinity();
    for (const auto& t : traces) {
        if (t.records.empty()) throw std::invalid_argument("compare: empty trace");
        horizon = std::min(horizon, static_cast<double>(t.records.back().slots));
    }
    Comparison c;
    c.names = names;
    for (int k = 0; k < points; ++k) c.grid.push_back(horizon * k / (points - 1));
    for (const auto& t : traces) {
        std::vector<double> row;
        for (double s : c.grid) row.push_back(interpolate(t, s));
        double area = 0.0;
        for (int k = 1; k < points; ++k) {
            area += 0.5 * (row[static_cast<std::size_t>(k)] + row[static_cast<std::size_t>(k - 1)]) *
                    (c.grid[static_cast<std::size_t>(k)] - c.grid[static_cast<std::size_t>(k - 1)]);
        }
        c.losses.push_back(std::move(row));
        c.auc.push_back(area);
    }
    return c;
}

void write_comparison_csv(std::ostream& out, const Comparison& c) {
    out << "slots";
    for (const auto& name : c.names) out << ',' << name;
    out << '\n';
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
        out << format(c.grid[k]);
        for (const auto& row : c.losses) out << ',' << format(row[k]);
        out << '\n';
    }
}

void write_auc_csv(std::ostream& out, const Comparison& c) {
    out << "run,auc\n";
    for (std::size_t r = 0; r < c.names.size(); ++r) out << c.names[r] << ',' << format(c.auc[r]) << '\n';
}

}  // namespace bass
