#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dynknap/instance.hpp"
#include "dynknap/rng.hpp"

namespace dynknap {

/// Length-n bit string with incrementally maintained weight and profit.
class BitSolution {
 public:
  BitSolution() = default;

  explicit BitSolution(std::size_t n) : bits_(n, 0) {}

  static BitSolution random(const Instance& inst, Rng& rng) {
    BitSolution s(inst.n());
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < inst.n(); ++i) {
      if (coin(rng)) s.set(i, inst);
    }
    return s;
  }

  std::size_t size() const { return bits_.size(); }
  bool get(std::size_t i) const { return bits_[i] != 0; }
  std::int64_t weight() const { return weight_; }
  std::int64_t profit() const { return profit_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  void flip(std::size_t i, const Instance& inst) {
    if (bits_[i]) {
      bits_[i] = 0;
      weight_ -= inst.weights[i];
      profit_ -= inst.profits[i];
    } else {
      bits_[i] = 1;
      weight_ += inst.weights[i];
      profit_ += inst.profits[i];
    }
  }

  void set(std::size_t i, const Instance& inst) {
    if (!bits_[i]) flip(i, inst);
  }

  friend bool operator==(const BitSolution& a, const BitSolution& b) {
    return a.bits_ == b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
  std::int64_t weight_ = 0;
  std::int64_t profit_ = 0;
};

inline std::int64_t violation(const BitSolution& x, std::int64_t capacity) {
  return std::max<std::int64_t>(0, x.weight() - capacity);
}

/// p(x) minus a penalty large enough that any feasible solution beats any
/// infeasible one, and less-violating beats more-violating.
inline std::int64_t fitness_1p1(const BitSolution& x, std::int64_t capacity,
                                const Instance& inst) {
  const std::int64_t penalty =
      static_cast<std::int64_t>(inst.n()) * inst.max_profit() + 1;
  return x.profit() - penalty * violation(x, capacity);
}

/// Standard bit-flip mutation: each bit independently with probability 1/n.
inline BitSolution mutate_standard(const BitSolution& x, const Instance& inst, Rng& rng) {
  BitSolution y = x;
  const double rate = 1.0 / static_cast<double>(inst.n());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < inst.n(); ++i) {
    if (unit(rng) < rate) y.flip(i, inst);
  }
  return y;
}

inline BitSolution random_solution(const Instance& inst, Rng& rng) {
  return BitSolution::random(inst, rng);
}

/// What an algorithm can show for the current generation: its best feasible
/// solution, or the least-violating one if nothing is feasible.
struct GenerationReport {
  bool feasible = false;
  std::int64_t profit = 0;
  std::int64_t min_violation = 0;
};

/// Common surface for all dynamic-knapsack algorithms. One step() call is
/// one generation; on_change() is invoked when the capacity moves.
class DynAlgorithm {
 public:
  virtual ~DynAlgorithm() = default;
  virtual void init(const Instance& inst, std::int64_t capacity, Rng& rng) = 0;
  virtual void step(std::int64_t capacity, Rng& rng) = 0;
  virtual void on_change(std::int64_t new_capacity, Rng& rng) = 0;
  virtual GenerationReport report(std::int64_t capacity) const = 0;
};

class OnePlusOneEa final : public DynAlgorithm {
 public:
  void init(const Instance& inst, std::int64_t capacity, Rng& rng) override {
    inst_ = &inst;
    (void)capacity;
    x_ = random_solution(inst, rng);
  }

  void step(std::int64_t capacity, Rng& rng) override {
    BitSolution y = mutate_standard(x_, *inst_, rng);
    if (fitness_1p1(y, capacity, *inst_) >= fitness_1p1(x_, capacity, *inst_)) {
      x_ = std::move(y);
    }
  }

  void on_change(std::int64_t, Rng&) override {
    // The incumbent carries over; its fitness is re-evaluated against the
    // new capacity on the next comparison.
  }

  GenerationReport report(std::int64_t capacity) const override {
    GenerationReport r;
    const std::int64_t v = violation(x_, capacity);
    if (v == 0) {
      r.feasible = true;
      r.profit = x_.profit();
    } else {
      r.min_violation = v;
    }
    return r;
  }

  const BitSolution& current() const { return x_; }

 private:
  const Instance* inst_ = nullptr;
  BitSolution x_;
};

}  // namespace dynknap
