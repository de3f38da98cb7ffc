#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dynknap/dynamics.hpp"
#include "dynknap/ea_core.hpp"

namespace dynknap {

/// MOEA dominance: solutions are comparable only at equal weight, where the
/// penalty fitness decides (which at equal weight reduces to profit).
inline bool dominates_moea(const BitSolution& y, const BitSolution& x,
                           std::int64_t capacity, const Instance& inst) {
  return y.weight() == x.weight() &&
         fitness_1p1(y, capacity, inst) >= fitness_1p1(x, capacity, inst);
}

inline bool strictly_dominates_moea(const BitSolution& y, const BitSolution& x,
                                    std::int64_t capacity, const Instance& inst) {
  return y.weight() == x.weight() &&
         fitness_1p1(y, capacity, inst) > fitness_1p1(x, capacity, inst);
}

/// MOEA_D dominance: weak Pareto dominance on (minimize weight, maximize
/// profit). Callers compare only within the same feasibility side.
inline bool dominates_moea_d(const BitSolution& y, const BitSolution& x) {
  return y.weight() <= x.weight() && y.profit() >= x.profit();
}

inline bool strictly_dominates_moea_d(const BitSolution& y, const BitSolution& x) {
  return dominates_moea_d(y, x) &&
         (y.weight() < x.weight() || y.profit() > x.profit());
}

/// Window half-width: r for uniform changes, 2*sigma for normal changes
/// (covering ~95% of the per-change mass).
inline std::int64_t delta_for(const ChangeModel& model) {
  model.validate();
  return model.kind == ChangeModel::Kind::uniform ? model.magnitude
                                                  : 2 * model.magnitude;
}

/// Deterministic preference order used for the "best previous solution" q
/// and for reporting: feasible beats infeasible; among feasible higher
/// profit, then lower weight, then lexicographically smaller bits; among
/// infeasible lower violation first.
inline bool prefer_solution(const BitSolution& a, const BitSolution& b,
                            std::int64_t capacity) {
  const std::int64_t va = violation(a, capacity);
  const std::int64_t vb = violation(b, capacity);
  if ((va == 0) != (vb == 0)) return va == 0;
  if (va != 0 && va != vb) return va < vb;
  if (a.profit() != b.profit()) return a.profit() > b.profit();
  if (a.weight() != b.weight()) return a.weight() < b.weight();
  return a.bits() < b.bits();
}

/// MOEA (per-weight slots) and MOEA_D (per-side Pareto archives) share the
/// same store mechanics and differ only in the dominance used on insertion.
enum class MoeaVariant { moea, moea_d };

class MoeaBaseline final : public DynAlgorithm {
 public:
  MoeaBaseline(MoeaVariant variant, std::int64_t delta)
      : variant_(variant), delta_(delta) {
    if (delta < 0) throw std::invalid_argument("moea: delta must be >= 0");
  }

  void init(const Instance& inst, std::int64_t capacity, Rng& rng) override {
    inst_ = &inst;
    capacity_ = capacity;
    s_plus_.clear();
    s_minus_.clear();
    best_minus_profit_ = std::numeric_limits<std::int64_t>::min();
    BitSolution q = random_solution(inst, rng);
    best_since_change_ = q;
    if (in_window(q.weight())) {
      insert(std::move(q));
      repairing_ = false;
    } else {
      repair_q_ = std::move(q);
      repairing_ = true;
    }
  }

  void step(std::int64_t capacity, Rng& rng) override {
    capacity_ = capacity;
    if (repairing_) {
      repair_step(rng);
      return;
    }
    const BitSolution& parent = pick_parent(rng);
    BitSolution y = mutate_standard(parent, *inst_, rng);
    observe(y);
    if (in_window(y.weight())) insert(std::move(y));
  }

  void on_change(std::int64_t new_capacity, Rng&) override {
    BitSolution q = *best_since_change_;
    capacity_ = new_capacity;
    repartition();
    if (s_plus_.empty() && s_minus_.empty()) {
      if (in_window(q.weight())) {
        insert(q);
        repairing_ = false;
      } else {
        repair_q_ = q;
        repairing_ = true;
      }
    }
    // Restart the best-of-window tracking against the new capacity.
    best_since_change_.reset();
    observe(q);
    for (const auto& z : s_minus_) observe(z);
    for (const auto& z : s_plus_) observe(z);
  }

  GenerationReport report(std::int64_t capacity) const override {
    if (repairing_) return report_for(repair_q_, capacity);
    if (s_minus_.empty() && s_plus_.empty())
      throw std::logic_error("moea: empty store outside repair");
    // O(1) via the cached best feasible profit; S+ is weight-sorted, so its
    // first member has the smallest violation.
    GenerationReport r;
    if (!s_minus_.empty()) {
      r.feasible = true;
      r.profit = best_minus_profit_;
    } else {
      r.min_violation = s_plus_.front().weight() - capacity;
    }
    return r;
  }

  /// Max-profit member of S- if any, else the min-violation member of S+.
  const BitSolution* best_member(std::int64_t capacity) const {
    const BitSolution* best = nullptr;
    for (const auto& z : s_minus_)
      if (!best || prefer_solution(z, *best, capacity)) best = &z;
    if (best) return best;
    for (const auto& z : s_plus_)
      if (!best || prefer_solution(z, *best, capacity)) best = &z;
    return best;
  }

  bool repairing() const { return repairing_; }
  std::size_t size() const { return s_plus_.size() + s_minus_.size(); }
  const std::vector<BitSolution>& s_plus() const { return s_plus_; }
  const std::vector<BitSolution>& s_minus() const { return s_minus_; }
  std::int64_t delta() const { return delta_; }

 private:
  bool in_window(std::int64_t w) const {
    return w >= capacity_ - delta_ && w <= capacity_ + delta_;
  }

  bool feasible_side(std::int64_t w) const { return w <= capacity_; }

  static std::vector<BitSolution>::iterator weight_pos(std::vector<BitSolution>& set,
                                                       std::int64_t w) {
    return std::lower_bound(set.begin(), set.end(), w,
                            [](const BitSolution& s, std::int64_t key) {
                              return s.weight() < key;
                            });
  }

  void insert(BitSolution y) {
    const bool feasible = feasible_side(y.weight());
    auto& set = feasible ? s_minus_ : s_plus_;
    // Cache maintenance: the max profit in S- never drops between
    // repartitions (replacements and MOEA_D sweeps only remove members
    // with profit <= the newcomer's).
    if (feasible) best_minus_profit_ = std::max(best_minus_profit_, y.profit());
    auto it = weight_pos(set, y.weight());
    if (variant_ == MoeaVariant::moea) {
      // One slot per weight; equal fitness keeps the incumbent.
      if (it != set.end() && it->weight() == y.weight()) {
        if (y.profit() > it->profit()) *it = std::move(y);
      } else {
        set.insert(it, std::move(y));
      }
      return;
    }
    // MOEA_D: reject if weakly dominated, else insert and remove the
    // members the offspring strictly dominates. The set stays sorted by
    // weight with strictly increasing profit.
    if (it != set.end() && it->weight() == y.weight() && it->profit() >= y.profit())
      return;
    if (it != set.begin() && std::prev(it)->profit() >= y.profit()) return;
    if (it != set.end() && it->weight() == y.weight()) {
      *it = std::move(y);
      auto sweep = std::next(it);
      auto end = sweep;
      while (end != set.end() && end->profit() <= it->profit()) ++end;
      set.erase(sweep, end);
      return;
    }
    it = set.insert(it, std::move(y));
    auto sweep = std::next(it);
    auto end = sweep;
    while (end != set.end() && end->profit() <= it->profit()) ++end;
    set.erase(sweep, end);
  }

  void repartition() {
    std::vector<BitSolution> all;
    all.reserve(size());
    std::merge(std::make_move_iterator(s_minus_.begin()),
               std::make_move_iterator(s_minus_.end()),
               std::make_move_iterator(s_plus_.begin()),
               std::make_move_iterator(s_plus_.end()), std::back_inserter(all),
               [](const BitSolution& a, const BitSolution& b) {
                 return a.weight() < b.weight();
               });
    s_minus_.clear();
    s_plus_.clear();
    best_minus_profit_ = std::numeric_limits<std::int64_t>::min();
    for (auto& z : all) {
      if (!in_window(z.weight())) continue;
      // Re-insert through the dominance filter so MOEA_D sets stay
      // mutually non-dominated under the new split point.
      insert(std::move(z));
    }
  }

  const BitSolution& pick_parent(Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, size() - 1);
    const std::size_t i = pick(rng);
    return i < s_minus_.size() ? s_minus_[i] : s_plus_[i - s_minus_.size()];
  }

  void repair_step(Rng& rng) {
    BitSolution y = mutate_standard(repair_q_, *inst_, rng);
    observe(y);
    if (fitness_1p1(y, capacity_, *inst_) >= fitness_1p1(repair_q_, capacity_, *inst_)) {
      repair_q_ = std::move(y);
      if (in_window(repair_q_.weight())) {
        insert(repair_q_);
        repairing_ = false;
      }
    }
  }

  void observe(const BitSolution& y) {
    if (!best_since_change_ || prefer_solution(y, *best_since_change_, capacity_))
      best_since_change_ = y;
  }

  static GenerationReport report_for(const BitSolution& s, std::int64_t capacity) {
    GenerationReport r;
    const std::int64_t v = violation(s, capacity);
    if (v == 0) {
      r.feasible = true;
      r.profit = s.profit();
    } else {
      r.min_violation = v;
    }
    return r;
  }

  MoeaVariant variant_;
  std::int64_t delta_;
  const Instance* inst_ = nullptr;
  std::int64_t capacity_ = 0;
  std::vector<BitSolution> s_plus_;   // C < w <= C + delta
  std::vector<BitSolution> s_minus_;  // C - delta <= w <= C
  std::int64_t best_minus_profit_ = std::numeric_limits<std::int64_t>::min();
  std::optional<BitSolution> best_since_change_;
  BitSolution repair_q_;
  bool repairing_ = false;
};

}  // namespace dynknap
