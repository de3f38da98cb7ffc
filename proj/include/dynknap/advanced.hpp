#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dynknap/ea_core.hpp"
#include "dynknap/moea.hpp"

namespace dynknap {

/// Two-objective view of a solution: weight to minimize, profit to
/// maximize. Solutions outside [C-delta, C+delta] carry penalties
/// proportional to their distance from the nearer window edge, so every
/// in-window solution dominates every out-of-window one.
struct MOObjectives {
  std::int64_t w_mo = 0;
  std::int64_t p_mo = 0;

  friend bool operator==(const MOObjectives&, const MOObjectives&) = default;
};

inline std::int64_t window_distance(std::int64_t w, std::int64_t capacity,
                                    std::int64_t delta) {
  if (w >= capacity - delta && w <= capacity + delta) return 0;
  return std::min(std::llabs(w - (capacity + delta)), std::llabs(w - (capacity - delta)));
}

inline MOObjectives penalized_objectives(const BitSolution& x, std::int64_t capacity,
                                         std::int64_t delta, const Instance& inst) {
  if (delta < 0) throw std::invalid_argument("penalized_objectives: delta must be >= 0");
  const std::int64_t alpha = window_distance(x.weight(), capacity, delta);
  if (alpha == 0) return {x.weight(), x.profit()};
  const std::int64_t n = static_cast<std::int64_t>(inst.n());
  return {x.weight() + (n * inst.max_weight() + 1) * alpha,
          x.profit() - (n * inst.max_profit() + 1) * alpha};
}

inline bool dominates_mo(const MOObjectives& a, const MOObjectives& b) {
  return a.w_mo <= b.w_mo && a.p_mo >= b.p_mo;
}

inline bool strictly_dominates_mo(const MOObjectives& a, const MOObjectives& b) {
  return dominates_mo(a, b) && a != b;
}

/// Deb's fast non-dominated sort; fronts hold indices into `objs`,
/// front 1 first.
inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<MOObjectives>& objs) {
  if (objs.empty()) throw std::invalid_argument("fast_nondominated_sort: empty population");
  const std::size_t n = objs.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dominator_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (strictly_dominates_mo(objs[i], objs[j])) dominated[i].push_back(j);
      else if (strictly_dominates_mo(objs[j], objs[i])) ++dominator_count[i];
    }
  }
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (dominator_count[i] == 0) current.push_back(i);
  while (!current.empty()) {
    fronts.push_back(current);
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated[i]) {
        if (--dominator_count[j] == 0) next.push_back(j);
      }
    }
    current = std::move(next);
  }
  return fronts;
}

/// Crowding distances for one front, aligned with `front` order. Boundary
/// members per objective get +infinity; interior members accumulate
/// normalized neighbor gaps.
inline std::vector<double> crowding_distance(const std::vector<MOObjectives>& objs,
                                             const std::vector<std::size_t>& front) {
  if (front.empty()) throw std::invalid_argument("crowding_distance: empty front");
  const std::size_t m = front.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) return std::vector<double>(m, inf);
  std::vector<std::size_t> order(m);
  auto by_key = [&](auto key) {
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return key(objs[front[a]]) < key(objs[front[b]]);
    });
    const double lo = static_cast<double>(key(objs[front[order.front()]]));
    const double hi = static_cast<double>(key(objs[front[order.back()]]));
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    if (hi <= lo) return;  // all duplicates: zero gap contribution
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double prev = static_cast<double>(key(objs[front[order[i - 1]]]));
      const double next = static_cast<double>(key(objs[front[order[i + 1]]]));
      dist[order[i]] += (next - prev) / (hi - lo);
    }
  };
  by_key([](const MOObjectives& o) { return o.w_mo; });
  by_key([](const MOObjectives& o) { return o.p_mo; });
  return dist;
}

// ---------------------------------------------------------------------------
// SPEA2 fitness machinery
// ---------------------------------------------------------------------------

struct Spea2Fitness {
  std::int64_t raw = 0;   // R(x): sum of strengths of dominators
  double density = 0.0;   // D(x) = 1 / (sigma_k + 2), in (0, 1/2]
  double fitness = 0.0;   // F(x) = R(x) + D(x)
};

/// Euclidean distances in objective space after min-max normalization over
/// the whole group; penalized magnitudes would otherwise swamp in-window
/// geometry.
inline std::vector<std::vector<double>> normalized_distance_matrix(
    const std::vector<MOObjectives>& objs) {
  const std::size_t n = objs.size();
  double wlo = std::numeric_limits<double>::max(), whi = std::numeric_limits<double>::lowest();
  double plo = wlo, phi = whi;
  for (const auto& o : objs) {
    wlo = std::min(wlo, double(o.w_mo)); whi = std::max(whi, double(o.w_mo));
    plo = std::min(plo, double(o.p_mo)); phi = std::max(phi, double(o.p_mo));
  }
  const double wspan = whi > wlo ? whi - wlo : 1.0;
  const double pspan = phi > plo ? phi - plo : 1.0;
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dw = (double(objs[i].w_mo) - double(objs[j].w_mo)) / wspan;
      const double dp = (double(objs[i].p_mo) - double(objs[j].p_mo)) / pspan;
      d[i][j] = d[j][i] = std::sqrt(dw * dw + dp * dp);
    }
  }
  return d;
}

/// Strength/raw-fitness/density assignment over one combined group
/// (population plus archive). k is the neighbor index for the density
/// estimate; coincident points and singletons give sigma_k = 0, hence
/// D = 1/2.
inline std::vector<Spea2Fitness> spea2_fitness(const std::vector<MOObjectives>& objs,
                                               std::size_t k) {
  if (objs.empty()) throw std::invalid_argument("spea2_fitness: empty group");
  const std::size_t n = objs.size();
  std::vector<std::int64_t> strength(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && strictly_dominates_mo(objs[i], objs[j])) ++strength[i];
  std::vector<Spea2Fitness> fit(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t raw = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && strictly_dominates_mo(objs[j], objs[i])) raw += strength[j];
    fit[i].raw = raw;
  }
  const auto dist = normalized_distance_matrix(objs);
  std::vector<double> neighbors;
  for (std::size_t i = 0; i < n; ++i) {
    neighbors.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) neighbors.push_back(dist[i][j]);
    double sigma_k = 0.0;
    if (!neighbors.empty()) {
      const std::size_t idx = std::min(k >= 1 ? k - 1 : 0, neighbors.size() - 1);
      std::nth_element(neighbors.begin(), neighbors.begin() + idx, neighbors.end());
      sigma_k = neighbors[idx];
    }
    fit[i].density = 1.0 / (sigma_k + 2.0);
    fit[i].fitness = static_cast<double>(fit[i].raw) + fit[i].density;
  }
  return fit;
}

/// Environmental selection: keep all non-dominated individuals (F < 1),
/// truncate by nearest-neighbor distance profiles when over capacity, pad
/// with the best dominated individuals when under. Returns indices into
/// `objs`, exactly `archive_size` of them.
inline std::vector<std::size_t> spea2_environmental_selection(
    const std::vector<MOObjectives>& objs, const std::vector<Spea2Fitness>& fit,
    std::size_t archive_size) {
  if (archive_size < 1) throw std::invalid_argument("environmental selection: archive size < 1");
  if (objs.size() < archive_size)
    throw std::invalid_argument("environmental selection: fewer candidates than slots");
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < objs.size(); ++i)
    if (fit[i].fitness < 1.0) chosen.push_back(i);
  if (chosen.size() < archive_size) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < objs.size(); ++i)
      if (fit[i].fitness >= 1.0) rest.push_back(i);
    std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
      return fit[a].fitness < fit[b].fitness;
    });
    for (std::size_t i : rest) {
      if (chosen.size() == archive_size) break;
      chosen.push_back(i);
    }
    return chosen;
  }
  if (chosen.size() == archive_size) return chosen;

  // Truncation: repeatedly drop the member with the lexicographically
  // smallest sorted distance profile to the remaining members.
  std::vector<MOObjectives> sub;
  sub.reserve(chosen.size());
  for (std::size_t i : chosen) sub.push_back(objs[i]);
  const auto dist = normalized_distance_matrix(sub);
  const std::size_t m = chosen.size();
  std::vector<bool> alive(m, true);
  std::vector<std::vector<double>> profile(m);
  for (std::size_t i = 0; i < m; ++i) {
    profile[i].reserve(m - 1);
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) profile[i].push_back(dist[i][j]);
    std::sort(profile[i].begin(), profile[i].end());
  }
  std::size_t remaining = m;
  while (remaining > archive_size) {
    std::size_t victim = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      if (victim == m ||
          std::lexicographical_compare(profile[i].begin(), profile[i].end(),
                                       profile[victim].begin(), profile[victim].end()))
        victim = i;
    }
    alive[victim] = false;
    --remaining;
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      auto it = std::lower_bound(profile[i].begin(), profile[i].end(), dist[i][victim]);
      profile[i].erase(it);
    }
  }
  std::vector<std::size_t> result;
  result.reserve(archive_size);
  for (std::size_t i = 0; i < m; ++i)
    if (alive[i]) result.push_back(chosen[i]);
  return result;
}

// ---------------------------------------------------------------------------
// Shared variation operators (jMetal binary-problem defaults)
// ---------------------------------------------------------------------------

inline constexpr double kCrossoverProbability = 0.9;

inline std::pair<BitSolution, BitSolution> single_point_crossover(
    const BitSolution& a, const BitSolution& b, const Instance& inst, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (inst.n() < 2 || unit(rng) >= kCrossoverProbability) return {a, b};
  std::uniform_int_distribution<std::size_t> point(1, inst.n() - 1);
  const std::size_t cut = point(rng);
  BitSolution c = a, d = b;
  for (std::size_t i = cut; i < inst.n(); ++i) {
    if (a.get(i) != b.get(i)) {
      c.flip(i, inst);
      d.flip(i, inst);
    }
  }
  return {c, d};
}

// ---------------------------------------------------------------------------
// NSGA-II
// ---------------------------------------------------------------------------

class Nsga2 final : public DynAlgorithm {
 public:
  struct Individual {
    BitSolution sol;
    MOObjectives obj;
    std::size_t rank = 0;  // 1-based front index
    double crowding = 0.0;
  };

  Nsga2(std::size_t pop_size, std::int64_t delta, bool elitism)
      : pop_size_(pop_size), delta_(delta), elitism_(elitism) {
    if (pop_size < 2) throw std::invalid_argument("nsga2: population size must be >= 2");
  }

  void init(const Instance& inst, std::int64_t capacity, Rng& rng) override {
    inst_ = &inst;
    capacity_ = capacity;
    elite_.reset();
    pop_.clear();
    for (std::size_t i = 0; i < pop_size_; ++i) {
      Individual ind;
      ind.sol = random_solution(inst, rng);
      ind.obj = penalized_objectives(ind.sol, capacity_, delta_, inst);
      pop_.push_back(std::move(ind));
    }
    rank_population(pop_);
    if (elitism_) apply_elitism();
    offspring_ = make_new_pop(rng);
  }

  void step(std::int64_t capacity, Rng& rng) override {
    capacity_ = capacity;
    std::vector<Individual> combined = pop_;
    combined.insert(combined.end(), offspring_.begin(), offspring_.end());
    // The elite tracks the best feasible solution *seen*, so it must look
    // at the combined set before survivor selection can discard anything.
    if (elitism_) update_elite_from(combined);
    pop_ = select_survivors(std::move(combined));
    if (elitism_) apply_elitism();
    offspring_ = make_new_pop(rng);
  }

  void on_change(std::int64_t new_capacity, Rng&) override {
    capacity_ = new_capacity;
    for (auto& ind : pop_) ind.obj = penalized_objectives(ind.sol, capacity_, delta_, *inst_);
    for (auto& ind : offspring_)
      ind.obj = penalized_objectives(ind.sol, capacity_, delta_, *inst_);
    if (elite_ && elite_->weight() > capacity_) elite_.reset();
  }

  GenerationReport report(std::int64_t capacity) const override {
    GenerationReport r = best_of_population(capacity);
    if (elite_ && elite_->weight() <= capacity) {
      if (!r.feasible || elite_->profit() > r.profit) {
        r.feasible = true;
        r.profit = elite_->profit();
        r.min_violation = 0;
      }
    }
    return r;
  }

  const std::vector<Individual>& population() const { return pop_; }
  const std::optional<BitSolution>& elite() const { return elite_; }

 private:
  void rank_population(std::vector<Individual>& pop) const {
    std::vector<MOObjectives> objs;
    objs.reserve(pop.size());
    for (const auto& ind : pop) objs.push_back(ind.obj);
    const auto fronts = fast_nondominated_sort(objs);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
      const auto crowd = crowding_distance(objs, fronts[f]);
      for (std::size_t i = 0; i < fronts[f].size(); ++i) {
        pop[fronts[f][i]].rank = f + 1;
        pop[fronts[f][i]].crowding = crowd[i];
      }
    }
  }

  std::vector<Individual> select_survivors(std::vector<Individual> combined) const {
    std::vector<MOObjectives> objs;
    objs.reserve(combined.size());
    for (const auto& ind : combined) objs.push_back(ind.obj);
    const auto fronts = fast_nondominated_sort(objs);
    std::vector<Individual> next;
    next.reserve(pop_size_);
    for (std::size_t f = 0; f < fronts.size() && next.size() < pop_size_; ++f) {
      const auto crowd = crowding_distance(objs, fronts[f]);
      std::vector<std::size_t> order(fronts[f].size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      if (fronts[f].size() > pop_size_ - next.size()) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      }
      for (std::size_t i : order) {
        if (next.size() == pop_size_) break;
        Individual ind = std::move(combined[fronts[f][i]]);
        ind.rank = f + 1;
        ind.crowding = crowd[i];
        next.push_back(std::move(ind));
      }
    }
    return next;
  }

  void update_elite_from(const std::vector<Individual>& group) {
    for (const auto& ind : group) {
      if (ind.sol.weight() > capacity_) continue;
      if (!elite_ || ind.sol.profit() > elite_->profit()) elite_ = ind.sol;
    }
  }

  /// Keep the best feasible solution alive: restore it into front 1 when
  /// survivor selection dropped it for spread, otherwise just boost its
  /// crowding so it wins every decided tournament.
  void apply_elitism() {
    const double inf = std::numeric_limits<double>::infinity();
    Individual* cur_best = nullptr;
    for (auto& ind : pop_) {
      if (ind.sol.weight() > capacity_) continue;
      if (!cur_best || ind.sol.profit() > cur_best->sol.profit()) cur_best = &ind;
    }
    if (!elite_) {
      if (cur_best) {
        elite_ = cur_best->sol;
        cur_best->crowding = inf;
      }
      return;
    }
    auto in_pop = std::find_if(pop_.begin(), pop_.end(), [&](const Individual& ind) {
      return ind.sol == *elite_;
    });
    if (in_pop == pop_.end() &&
        (!cur_best || cur_best->sol.profit() < elite_->profit())) {
      // Reinsertion: drop the worst member (max rank, then min crowding).
      auto worst = std::max_element(pop_.begin(), pop_.end(),
                                    [](const Individual& a, const Individual& b) {
                                      if (a.rank != b.rank) return a.rank < b.rank;
                                      return a.crowding > b.crowding;
                                    });
      Individual restored;
      restored.sol = *elite_;
      restored.obj = penalized_objectives(restored.sol, capacity_, delta_, *inst_);
      restored.rank = 1;
      restored.crowding = inf;
      *worst = std::move(restored);
      return;
    }
    if (cur_best && cur_best->sol.profit() > elite_->profit()) elite_ = cur_best->sol;
    auto again = std::find_if(pop_.begin(), pop_.end(), [&](const Individual& ind) {
      return ind.sol == *elite_;
    });
    if (again != pop_.end()) again->crowding = inf;
  }

  std::vector<Individual> make_new_pop(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, pop_.size() - 1);
    auto tournament = [&]() -> const BitSolution& {
      const Individual& a = pop_[pick(rng)];
      const Individual& b = pop_[pick(rng)];
      if (a.rank != b.rank) return a.rank < b.rank ? a.sol : b.sol;
      return a.crowding >= b.crowding ? a.sol : b.sol;
    };
    std::vector<Individual> offspring;
    offspring.reserve(pop_size_);
    while (offspring.size() < pop_size_) {
      auto [c, d] = single_point_crossover(tournament(), tournament(), *inst_, rng);
      for (BitSolution* child : {&c, &d}) {
        if (offspring.size() == pop_size_) break;
        BitSolution mutated = mutate_standard(*child, *inst_, rng);
        Individual ind;
        ind.obj = penalized_objectives(mutated, capacity_, delta_, *inst_);
        ind.sol = std::move(mutated);
        offspring.push_back(std::move(ind));
      }
    }
    return offspring;
  }

  GenerationReport best_of_population(std::int64_t capacity) const {
    GenerationReport r;
    std::int64_t min_v = std::numeric_limits<std::int64_t>::max();
    for (const auto& ind : pop_) {
      const std::int64_t v = violation(ind.sol, capacity);
      if (v == 0) {
        if (!r.feasible || ind.sol.profit() > r.profit) {
          r.feasible = true;
          r.profit = ind.sol.profit();
        }
      } else {
        min_v = std::min(min_v, v);
      }
    }
    if (!r.feasible) r.min_violation = min_v;
    return r;
  }

  std::size_t pop_size_;
  std::int64_t delta_;
  bool elitism_;
  const Instance* inst_ = nullptr;
  std::int64_t capacity_ = 0;
  std::vector<Individual> pop_;
  std::vector<Individual> offspring_;
  std::optional<BitSolution> elite_;
};

// ---------------------------------------------------------------------------
// SPEA2
// ---------------------------------------------------------------------------

class Spea2 final : public DynAlgorithm {
 public:
  struct Individual {
    BitSolution sol;
    MOObjectives obj;
    double fitness = 0.0;
  };

  Spea2(std::size_t pop_size, std::size_t archive_size, std::int64_t delta, bool elitism)
      : pop_size_(pop_size), archive_size_(archive_size), delta_(delta), elitism_(elitism) {
    if (pop_size < 2) throw std::invalid_argument("spea2: population size must be >= 2");
    if (archive_size < 1) throw std::invalid_argument("spea2: archive size must be >= 1");
    k_ = static_cast<std::size_t>(
        std::llround(std::sqrt(static_cast<double>(pop_size + archive_size))));
    if (k_ < 1) k_ = 1;
  }

  void init(const Instance& inst, std::int64_t capacity, Rng& rng) override {
    inst_ = &inst;
    capacity_ = capacity;
    elite_.reset();
    archive_.clear();
    pop_.clear();
    for (std::size_t i = 0; i < pop_size_; ++i) {
      Individual ind;
      ind.sol = random_solution(inst, rng);
      ind.obj = penalized_objectives(ind.sol, capacity_, delta_, inst);
      pop_.push_back(std::move(ind));
    }
    refresh_archive();
  }

  void step(std::int64_t capacity, Rng& rng) override {
    capacity_ = capacity;
    refresh_archive();
    // Mating selection from the archive, then variation into the next pop.
    std::uniform_int_distribution<std::size_t> pick(0, archive_.size() - 1);
    auto tournament = [&]() -> const BitSolution& {
      const Individual& a = archive_[pick(rng)];
      const Individual& b = archive_[pick(rng)];
      return a.fitness <= b.fitness ? a.sol : b.sol;
    };
    std::vector<Individual> next;
    next.reserve(pop_size_);
    while (next.size() < pop_size_) {
      auto [c, d] = single_point_crossover(tournament(), tournament(), *inst_, rng);
      for (BitSolution* child : {&c, &d}) {
        if (next.size() == pop_size_) break;
        BitSolution mutated = mutate_standard(*child, *inst_, rng);
        Individual ind;
        ind.obj = penalized_objectives(mutated, capacity_, delta_, *inst_);
        ind.sol = std::move(mutated);
        next.push_back(std::move(ind));
      }
    }
    pop_ = std::move(next);
  }

  void on_change(std::int64_t new_capacity, Rng&) override {
    capacity_ = new_capacity;
    for (auto& ind : pop_) ind.obj = penalized_objectives(ind.sol, capacity_, delta_, *inst_);
    for (auto& ind : archive_)
      ind.obj = penalized_objectives(ind.sol, capacity_, delta_, *inst_);
    if (elite_ && elite_->weight() > capacity_) elite_.reset();
  }

  GenerationReport report(std::int64_t capacity) const override {
    GenerationReport r;
    std::int64_t min_v = std::numeric_limits<std::int64_t>::max();
    for (const auto& ind : archive_) {
      const std::int64_t v = violation(ind.sol, capacity);
      if (v == 0) {
        if (!r.feasible || ind.sol.profit() > r.profit) {
          r.feasible = true;
          r.profit = ind.sol.profit();
        }
      } else {
        min_v = std::min(min_v, v);
      }
    }
    if (!r.feasible && min_v != std::numeric_limits<std::int64_t>::max())
      r.min_violation = min_v;
    if (elite_ && elite_->weight() <= capacity) {
      if (!r.feasible || elite_->profit() > r.profit) {
        r.feasible = true;
        r.profit = elite_->profit();
        r.min_violation = 0;
      }
    }
    return r;
  }

  const std::vector<Individual>& archive() const { return archive_; }
  const std::optional<BitSolution>& elite() const { return elite_; }
  double min_density_seen() const { return min_density_seen_; }
  double max_density_seen() const { return max_density_seen_; }

 private:
  /// Fitness assignment over pop + archive and environmental selection into
  /// the next archive, followed by the elitism hook.
  void refresh_archive() {
    std::vector<Individual> combined = pop_;
    combined.insert(combined.end(), archive_.begin(), archive_.end());
    // The elite tracks the best feasible solution *seen*, so update it from
    // the combined set before environmental selection can discard anything.
    if (elitism_) {
      for (const auto& ind : combined) {
        if (ind.sol.weight() > capacity_) continue;
        if (!elite_ || ind.sol.profit() > elite_->profit()) elite_ = ind.sol;
      }
    }
    std::vector<MOObjectives> objs;
    objs.reserve(combined.size());
    for (const auto& ind : combined) objs.push_back(ind.obj);
    const auto fit = spea2_fitness(objs, k_);
    for (std::size_t i = 0; i < combined.size(); ++i) {
      combined[i].fitness = fit[i].fitness;
      min_density_seen_ = std::min(min_density_seen_, fit[i].density);
      max_density_seen_ = std::max(max_density_seen_, fit[i].density);
    }
    const std::size_t target = std::min(archive_size_, combined.size());
    const auto keep = spea2_environmental_selection(objs, fit, target);
    std::vector<Individual> next;
    next.reserve(keep.size());
    for (std::size_t i : keep) next.push_back(std::move(combined[i]));
    archive_ = std::move(next);
    if (elitism_) apply_elitism();
  }

  /// Store the best feasible solution; force it into the archive with
  /// fitness zero so it wins every decided tournament.
  void apply_elitism() {
    Individual* cur_best = nullptr;
    for (auto& ind : archive_) {
      if (ind.sol.weight() > capacity_) continue;
      if (!cur_best || ind.sol.profit() > cur_best->sol.profit()) cur_best = &ind;
    }
    if (cur_best && (!elite_ || cur_best->sol.profit() > elite_->profit()))
      elite_ = cur_best->sol;
    if (!elite_) return;
    auto in_archive = std::find_if(archive_.begin(), archive_.end(),
                                   [&](const Individual& ind) { return ind.sol == *elite_; });
    if (in_archive == archive_.end()) {
      auto worst = std::max_element(archive_.begin(), archive_.end(),
                                    [](const Individual& a, const Individual& b) {
                                      return a.fitness < b.fitness;
                                    });
      Individual restored;
      restored.sol = *elite_;
      restored.obj = penalized_objectives(restored.sol, capacity_, delta_, *inst_);
      restored.fitness = 0.0;
      *worst = std::move(restored);
    } else {
      in_archive->fitness = 0.0;
    }
  }

  std::size_t pop_size_;
  std::size_t archive_size_;
  std::int64_t delta_;
  bool elitism_;
  std::size_t k_ = 1;
  const Instance* inst_ = nullptr;
  std::int64_t capacity_ = 0;
  std::vector<Individual> pop_;
  std::vector<Individual> archive_;
  std::optional<BitSolution> elite_;
  double min_density_seen_ = std::numeric_limits<double>::max();
  double max_density_seen_ = 0.0;
};

}  // namespace dynknap
