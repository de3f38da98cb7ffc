#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynknap/ea_core.hpp"
#include "dynknap/oracle.hpp"

namespace dynknap {

/// One recorded generation: the capacity in effect and what the algorithm
/// could show for it.
struct GenerationRecord {
  std::int64_t capacity = 0;
  bool feasible = false;
  std::int64_t profit = 0;        // best feasible profit, if feasible
  std::int64_t min_violation = 0; // smallest constraint violation otherwise
};

struct RunTrace {
  std::vector<GenerationRecord> records;
};

/// Error charged for one generation: distance to the optimum when a feasible
/// solution exists, optimum plus the smallest violation when none does.
inline std::int64_t generation_error(const GenerationRecord& rec, std::int64_t optimum) {
  if (rec.feasible) return optimum - rec.profit;
  return optimum + rec.min_violation;
}

/// Mean generation error over the whole trace.
inline double total_offline_error(const RunTrace& trace, const OracleTable& oracle) {
  if (trace.records.empty())
    throw std::invalid_argument("total_offline_error: empty trace");
  double sum = 0.0;
  for (const auto& rec : trace.records)
    sum += static_cast<double>(generation_error(rec, oracle.optimal_profit(rec.capacity)));
  return sum / static_cast<double>(trace.records.size());
}

/// Mean generation error sampled at the last generation of each
/// tau-generation window: generations tau, 2*tau, ... within the trace.
inline double partial_offline_error(const RunTrace& trace, const OracleTable& oracle,
                                    std::int64_t tau) {
  if (tau < 1) throw std::invalid_argument("partial_offline_error: tau must be >= 1");
  if (trace.records.size() < static_cast<std::size_t>(tau))
    throw std::invalid_argument("partial_offline_error: trace shorter than one window");
  double sum = 0.0;
  std::size_t samples = 0;
  for (std::size_t g = static_cast<std::size_t>(tau); g <= trace.records.size();
       g += static_cast<std::size_t>(tau)) {
    const auto& rec = trace.records[g - 1];
    sum += static_cast<double>(generation_error(rec, oracle.optimal_profit(rec.capacity)));
    ++samples;
  }
  return sum / static_cast<double>(samples);
}

/// Trace CSV: one row per generation; the profit column is empty when no
/// feasible solution exists, mirrored by an empty violation column when one
/// does.
inline void save_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trace_csv: cannot open " + path);
  out << "generation,capacity,best_feasible_profit,min_violation\n";
  for (std::size_t g = 0; g < trace.records.size(); ++g) {
    const auto& rec = trace.records[g];
    out << (g + 1) << ',' << rec.capacity << ',';
    if (rec.feasible)
      out << rec.profit << ',';
    else
      out << ',' << rec.min_violation;
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_trace_csv: write failed for " + path);
}

}  // namespace dynknap
