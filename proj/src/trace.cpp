#include "alphafair/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "alphafair/error.hpp"

namespace alphafair {

const char* algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::kCAdmm:
            return "c-admm";
        case Algorithm::kFdAdmm:
            return "fd-admm";
        case Algorithm::kLagr:
            return "lagr";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "c-admm") return Algorithm::kCAdmm;
    if (name == "fd-admm") return Algorithm::kFdAdmm;
    if (name == "lagr") return Algorithm::kLagr;
    throw InvalidArgument("unknown algorithm '" + name + "' (expected c-admm, fd-admm or lagr)");
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_trace(std::ostream& out, const Trace& trace) {
    out << "iteration,event,algorithm,objective,gap,primal_residual,dual_residual,violation_pct,message_floats,"
           "wall_time\n";
    for (const auto& row : trace.rows) {
        out << row.iteration << ',' << row.event << ',' << algorithm_name(row.algorithm) << ','
            << format_number(row.objective) << ',' << format_number(row.gap) << ',' << format_number(row.primal)
            << ',' << format_number(row.dual) << ',' << format_number(row.violation_pct) << ','
            << format_number(row.message_floats) << ',' << format_number(row.wall_time) << '\n';
    }
}

void write_trace(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    write_trace(out, trace);
}

double relative_gap(double objective, double reference_objective) {
    if (std::isnan(reference_objective)) return NAN;
    if (objective == reference_objective) return 0.0;
    return std::abs(objective - reference_objective) / std::max(1.0, std::abs(reference_objective));
}

}  // namespace alphafair
