#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynknap/rng.hpp"

namespace dynknap {

/// A static 0/1 knapsack instance: n items with positive integer weights
/// and profits, plus the initial capacity.
struct Instance {
  std::vector<std::int64_t> weights;
  std::vector<std::int64_t> profits;
  std::int64_t capacity = 0;

  std::size_t n() const { return weights.size(); }

  std::int64_t max_profit() const {
    return *std::max_element(profits.begin(), profits.end());
  }
  std::int64_t max_weight() const {
    return *std::max_element(weights.begin(), weights.end());
  }
  std::int64_t total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
  }
  std::int64_t total_profit() const {
    return std::accumulate(profits.begin(), profits.end(), std::int64_t{0});
  }

  void validate() const {
    if (weights.empty()) throw std::invalid_argument("instance: no items");
    if (weights.size() != profits.size())
      throw std::invalid_argument("instance: weights/profits length mismatch");
    for (std::int64_t w : weights)
      if (w < 1) throw std::invalid_argument("instance: weight < 1");
    for (std::int64_t p : profits)
      if (p < 1) throw std::invalid_argument("instance: profit < 1");
    if (capacity < 0) throw std::invalid_argument("instance: negative capacity");
  }
};

/// Weights and profits uniform in [1, 1000]. Capacity is left at 0.
inline Instance gen_uncorrelated(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("gen_uncorrelated: n must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(1, 1000);
  Instance inst;
  inst.weights.reserve(n);
  inst.profits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) inst.weights.push_back(dist(rng));
  for (std::size_t i = 0; i < n; ++i) inst.profits.push_back(dist(rng));
  return inst;
}

/// Weights uniform in [1000, 1010], profits uniform in [1, 1000].
inline Instance gen_uncorr_similar_weights(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("gen_uncorr_similar_weights: n must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<std::int64_t> wdist(1000, 1010);
  std::uniform_int_distribution<std::int64_t> pdist(1, 1000);
  Instance inst;
  inst.weights.reserve(n);
  inst.profits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) inst.weights.push_back(wdist(rng));
  for (std::size_t i = 0; i < n; ++i) inst.profits.push_back(pdist(rng));
  return inst;
}

/// Weights uniform in [1, 1000], profit_i = weight_i + 100.
inline Instance gen_bounded_strongly_correlated(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("gen_bounded_strongly_correlated: n must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(1, 1000);
  Instance inst;
  inst.weights.reserve(n);
  inst.profits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) inst.weights.push_back(dist(rng));
  for (std::int64_t w : inst.weights) inst.profits.push_back(w + 100);
  return inst;
}

/// All weights set to 1; capacity rescaled by the mean profit and clamped
/// to be non-negative.
inline Instance to_unit_weights(const Instance& inst) {
  inst.validate();
  Instance out;
  out.weights.assign(inst.n(), 1);
  out.profits = inst.profits;
  const double mean_profit =
      static_cast<double>(inst.total_profit()) / static_cast<double>(inst.n());
  out.capacity = std::max<std::int64_t>(
      0, std::llround(static_cast<double>(inst.capacity) / mean_profit));
  return out;
}

// File format: first line "n C", then n lines "weight profit".

inline void save_instance(const Instance& inst, const std::string& path) {
  inst.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << inst.n() << ' ' << inst.capacity << '\n';
  for (std::size_t i = 0; i < inst.n(); ++i)
    out << inst.weights[i] << ' ' << inst.profits[i] << '\n';
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  auto fail = [&](std::size_t line, const std::string& what) {
    throw std::runtime_error("load_instance: " + path + ":" + std::to_string(line) +
                             ": " + what);
  };
  std::string line;
  if (!std::getline(in, line)) fail(1, "empty file");
  std::istringstream header(line);
  std::int64_t n = 0;
  Instance inst;
  if (!(header >> n >> inst.capacity) || n < 1) fail(1, "expected 'n C' header");
  if (inst.capacity < 0) fail(1, "negative capacity");
  for (std::int64_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) fail(static_cast<std::size_t>(i) + 2, "fewer items than declared");
    std::istringstream row(line);
    std::int64_t w = 0, p = 0;
    if (!(row >> w >> p)) fail(static_cast<std::size_t>(i) + 2, "expected 'weight profit'");
    if (w < 1) fail(static_cast<std::size_t>(i) + 2, "weight must be >= 1");
    if (p < 1) fail(static_cast<std::size_t>(i) + 2, "profit must be >= 1");
    inst.weights.push_back(w);
    inst.profits.push_back(p);
  }
  return inst;
}

}  // namespace dynknap
