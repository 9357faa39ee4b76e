#ifndef ALPHAFAIR_TRACE_HPP_
#define ALPHAFAIR_TRACE_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace alphafair {

enum class Algorithm { kCAdmm, kFdAdmm, kLagr };

const char* algorithm_name(Algorithm algorithm);
// Accepts c-admm, fd-admm and lagr; throws InvalidArgument otherwise.
Algorithm parse_algorithm(const std::string& name);

struct TraceRow {
    long iteration = 0;
    int event = 0;
    Algorithm algorithm = Algorithm::kFdAdmm;
    double objective = 0.0;
    double gap = 0.0;  // NaN when no reference is known
    double primal = 0.0;
    double dual = 0.0;
    double violation_pct = 0.0;
    double message_floats = 0.0;
    double wall_time = 0.0;  // seconds since solve start; 0 unless timing is enabled
};

struct Trace {
    std::vector<TraceRow> rows;
};

// CSV with a fixed header; floats at 12 significant digits.
void write_trace(std::ostream& out, const Trace& trace);
void write_trace(const std::string& path, const Trace& trace);
std::string format_number(double value);

// |f(x) - f(ref)| / max(1, |f(ref)|).
double relative_gap(double objective, double reference_objective);

}  // namespace alphafair

#endif  // ALPHAFAIR_TRACE_HPP_
