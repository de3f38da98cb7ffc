#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynknap/instance.hpp"

namespace dynknap {

/// Exact optimal profit per capacity, filled by one DP sweep up to a
/// capacity limit. Lookups beyond the total weight return the all-items
/// profit, so a single table covers an entire trajectory.
class OracleTable {
 public:
  OracleTable(const Instance& inst, std::int64_t max_capacity) {
    inst.validate();
    if (max_capacity < 0) throw std::invalid_argument("oracle: negative capacity");
    total_profit_ = inst.total_profit();
    covered_ = max_capacity;
    limit_ = std::min(max_capacity, inst.total_weight());
    saturated_ = max_capacity >= inst.total_weight();
    best_.assign(static_cast<std::size_t>(limit_) + 1, 0);
    for (std::size_t i = 0; i < inst.n(); ++i) {
      const std::int64_t w = inst.weights[i];
      const std::int64_t p = inst.profits[i];
      for (std::int64_t c = limit_; c >= w; --c) {
        best_[c] = std::max(best_[c], best_[c - w] + p);
      }
    }
  }

  std::int64_t max_covered() const { return covered_; }

  /// A capacity is covered if it was swept directly or exceeds the total
  /// weight (where the all-items optimum applies regardless).
  bool covers(std::int64_t capacity) const {
    return capacity >= 0 && (capacity <= covered_ || saturated_);
  }

  std::int64_t optimal_profit(std::int64_t capacity) const {
    if (capacity < 0) throw std::invalid_argument("oracle: negative capacity");
    if (capacity >= limit_) {
      if (!covers(capacity))
        throw std::out_of_range("oracle: capacity " + std::to_string(capacity) +
                                " beyond covered range " + std::to_string(covered_));
      return best_[static_cast<std::size_t>(limit_)];
    }
    return best_[static_cast<std::size_t>(capacity)];
  }

  /// Audit dump: one "capacity,optimal_profit" row per stored entry.
  void dump_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("oracle: cannot open " + path);
    out << "capacity,optimal_profit\n";
    for (std::size_t c = 0; c < best_.size(); ++c) out << c << ',' << best_[c] << '\n';
  }

 private:
  std::vector<std::int64_t> best_;
  std::int64_t limit_ = 0;
  std::int64_t covered_ = 0;
  std::int64_t total_profit_ = 0;
  bool saturated_ = false;
};

inline std::int64_t dp_optimal_profit(const Instance& inst, std::int64_t capacity) {
  return OracleTable(inst, capacity).optimal_profit(capacity);
}

inline OracleTable build_table(const Instance& inst,
                               std::span<const std::int64_t> capacities) {
  std::int64_t max_c = 0;
  for (std::int64_t c : capacities) {
    if (c < 0) throw std::invalid_argument("build_table: negative capacity");
    max_c = std::max(max_c, c);
  }
  return OracleTable(inst, max_c);
}

/// Exhaustive test oracle, deliberately independent of the DP path.
inline std::int64_t brute_force_optimal(const Instance& inst, std::int64_t capacity) {
  inst.validate();
  if (capacity < 0) throw std::invalid_argument("brute_force_optimal: negative capacity");
  if (inst.n() > 20) throw std::invalid_argument("brute_force_optimal: n > 20");
  const std::size_t n = inst.n();
  std::int64_t best = 0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::int64_t w = 0, p = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ull << i)) {
        w += inst.weights[i];
        p += inst.profits[i];
      }
    }
    if (w <= capacity) best = std::max(best, p);
  }
  return best;
}

}  // namespace dynknap
