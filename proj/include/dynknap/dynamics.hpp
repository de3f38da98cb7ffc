#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynknap/rng.hpp"

namespace dynknap {

/// How capacity deltas are drawn: uniform on [-r, r] or N(0, sigma^2)
/// rounded to the nearest integer. A change is applied every tau generations.
struct ChangeModel {
  enum class Kind { uniform, normal };
  Kind kind = Kind::uniform;
  std::int64_t magnitude = 1;  // r for uniform, sigma for normal
  std::int64_t tau = 1;

  void validate() const {
    if (magnitude < 1) throw std::invalid_argument("change model: magnitude must be >= 1");
    if (tau < 1) throw std::invalid_argument("change model: tau must be >= 1");
  }
};

struct ChangeSequence {
  std::vector<std::int64_t> deltas;
};

inline ChangeSequence gen_uniform_changes(std::int64_t r, std::size_t count,
                                          std::uint64_t seed) {
  if (r < 1) throw std::invalid_argument("gen_uniform_changes: r must be >= 1");
  if (count < 1) throw std::invalid_argument("gen_uniform_changes: count must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-r, r);
  ChangeSequence seq;
  seq.deltas.reserve(count);
  for (std::size_t i = 0; i < count; ++i) seq.deltas.push_back(dist(rng));
  return seq;
}

/// Normal samples are rounded to the nearest integer so capacities stay
/// integral for the DP oracle.
inline ChangeSequence gen_normal_changes(std::int64_t sigma, std::size_t count,
                                         std::uint64_t seed) {
  if (sigma < 1) throw std::invalid_argument("gen_normal_changes: sigma must be >= 1");
  if (count < 1) throw std::invalid_argument("gen_normal_changes: count must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> dist(0.0, static_cast<double>(sigma));
  ChangeSequence seq;
  seq.deltas.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    seq.deltas.push_back(std::llround(dist(rng)));
  return seq;
}

/// Capacity after a change; clamped at 0 so only the empty solution is
/// feasible when the walk goes negative.
inline std::int64_t apply_change(std::int64_t capacity, std::int64_t delta) {
  return std::max<std::int64_t>(0, capacity + delta);
}

// Change file format: one signed decimal integer per line, no header.

inline void save_changes(const ChangeSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_changes: cannot open " + path);
  for (std::int64_t d : seq.deltas) out << d << '\n';
  if (!out) throw std::runtime_error("save_changes: write failed for " + path);
}

inline ChangeSequence load_changes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_changes: cannot open " + path);
  ChangeSequence seq;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() && in.eof()) break;
    std::istringstream row(line);
    std::int64_t d = 0;
    char extra = 0;
    if (!(row >> d) || (row >> extra))
      throw std::runtime_error("load_changes: " + path + ":" + std::to_string(lineno) +
                               ": expected one integer");
    seq.deltas.push_back(d);
  }
  if (seq.deltas.empty())
    throw std::runtime_error("load_changes: " + path + ": empty change file");
  return seq;
}

/// Piecewise-constant capacity series over `horizon` generations.
/// The capacity in effect during generation g (1-based) has absorbed
/// floor((g-1)/tau) deltas; exactly floor(horizon/tau) deltas are consumed,
/// matching the change events a run of the same length applies.
inline std::vector<std::int64_t> trajectory(std::int64_t c0, const ChangeSequence& seq,
                                            std::int64_t tau, std::int64_t horizon) {
  if (tau < 1) throw std::invalid_argument("trajectory: tau must be >= 1");
  if (horizon < 1) throw std::invalid_argument("trajectory: horizon must be >= 1");
  if (c0 < 0) throw std::invalid_argument("trajectory: negative initial capacity");
  const std::size_t changes = static_cast<std::size_t>(horizon / tau);
  if (seq.deltas.size() < changes)
    throw std::runtime_error("trajectory: change sequence exhausted (" +
                             std::to_string(seq.deltas.size()) + " deltas, need " +
                             std::to_string(changes) + ")");
  std::vector<std::int64_t> series;
  series.reserve(static_cast<std::size_t>(horizon));
  std::int64_t c = c0;
  std::size_t next_delta = 0;
  for (std::int64_t g = 1; g <= horizon; ++g) {
    series.push_back(c);
    if (g % tau == 0) c = apply_change(c, seq.deltas[next_delta++]);
  }
  return series;
}

}  // namespace dynknap
