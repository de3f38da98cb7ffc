#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynknap {

// ---------------------------------------------------------------------------
// Chi-square tail probability via the regularized incomplete gamma function
// (series expansion below a+1, continued fraction above; Numerical Recipes
// scheme). Accurate to ~1e-12 for the small degrees of freedom used here.
// ---------------------------------------------------------------------------

namespace detail {

inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// P(X <= x) for X ~ Gamma(a, 1), regularized.
inline double lower_regularized_gamma(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("lower_regularized_gamma: a must be > 0");
  if (x < 0.0) throw std::invalid_argument("lower_regularized_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

/// Survival function of the chi-square distribution with df degrees of
/// freedom: P(X >= x).
inline double chi_squared_sf(double x, std::size_t df) {
  if (df < 1) throw std::invalid_argument("chi_squared_sf: df must be >= 1");
  if (x <= 0.0) return 1.0;
  const double a = static_cast<double>(df) / 2.0;
  if (x / 2.0 < a + 1.0) return 1.0 - detail::gamma_p_series(a, x / 2.0);
  return detail::gamma_q_contfrac(a, x / 2.0);
}

/// Standard normal survival function P(Z >= z).
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// Kruskal-Wallis omnibus test
// ---------------------------------------------------------------------------

struct KruskalWallisResult {
  double h = 0.0;
  double p = 1.0;
};

namespace detail {

struct RankInfo {
  std::vector<std::vector<double>> ranks;  // per group, aligned with inputs
  double tie_sum = 0.0;                    // sum over tie groups of t^3 - t
  std::size_t total = 0;
};

inline RankInfo average_ranks(const std::vector<std::vector<double>>& groups) {
  RankInfo info;
  std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> all;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t i = 0; i < groups[g].size(); ++i)
      all.push_back({groups[g][i], {g, i}});
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  info.total = all.size();
  info.ranks.resize(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    info.ranks[g].resize(groups[g].size(), 0.0);
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      info.ranks[all[k].second.first][all[k].second.second] = avg;
    if (t > 1.0) info.tie_sum += t * t * t - t;
    i = j;
  }
  return info;
}

inline void check_groups(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2)
    throw std::invalid_argument("kruskal_wallis: need at least 2 groups");
  for (const auto& g : groups)
    if (g.size() < 2)
      throw std::invalid_argument("kruskal_wallis: each group needs >= 2 values");
}

}  // namespace detail

/// Rank-based H with tie correction; p from chi-square with (#groups - 1)
/// degrees of freedom. Fully tied data gives H = 0, p = 1.
inline KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  detail::check_groups(groups);
  const auto info = detail::average_ranks(groups);
  const double n = static_cast<double>(info.total);
  double h = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double rank_sum = 0.0;
    for (double r : info.ranks[g]) rank_sum += r;
    h += rank_sum * rank_sum / static_cast<double>(groups[g].size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  const double correction = 1.0 - info.tie_sum / (n * n * n - n);
  if (correction <= 0.0) return {0.0, 1.0};  // every value identical
  h /= correction;
  if (h <= 0.0) return {0.0, 1.0};
  return {h, chi_squared_sf(h, groups.size() - 1)};
}

// ---------------------------------------------------------------------------
// Dunn post-hoc with Bonferroni-adjusted alpha
// ---------------------------------------------------------------------------

enum class Mark { none, plus, minus };

struct PosthocResult {
  // marks[i][j]: how group i relates to group j. plus = i significantly
  // better (lower values), minus = significantly worse.
  std::vector<std::vector<Mark>> marks;
  std::vector<std::vector<double>> pairwise_p;  // unadjusted Dunn p-values
};

/// Dunn-style pairwise rank comparisons at threshold alpha / #pairs. Marks
/// are only awarded when the omnibus test itself is significant at alpha,
/// and lower values count as better.
inline PosthocResult bonferroni_posthoc(const std::vector<std::vector<double>>& groups,
                                        double alpha = 0.05) {
  detail::check_groups(groups);
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("bonferroni_posthoc: alpha must be in (0, 1)");
  const std::size_t k = groups.size();
  const auto info = detail::average_ranks(groups);
  const double n = static_cast<double>(info.total);
  std::vector<double> mean_rank(k, 0.0);
  for (std::size_t g = 0; g < k; ++g) {
    for (double r : info.ranks[g]) mean_rank[g] += r;
    mean_rank[g] /= static_cast<double>(groups[g].size());
  }
  const double variance_base = n * (n + 1.0) / 12.0 - info.tie_sum / (12.0 * (n - 1.0));
  const bool omnibus_significant = kruskal_wallis(groups).p < alpha;
  const double pair_alpha = alpha / (static_cast<double>(k) * (k - 1.0) / 2.0);

  PosthocResult result;
  result.marks.assign(k, std::vector<Mark>(k, Mark::none));
  result.pairwise_p.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double se = std::sqrt(variance_base * (1.0 / groups[i].size() +
                                                   1.0 / groups[j].size()));
      double p = 1.0;
      if (se > 0.0) {
        const double z = std::fabs(mean_rank[i] - mean_rank[j]) / se;
        p = 2.0 * normal_sf(z);
      }
      result.pairwise_p[i][j] = result.pairwise_p[j][i] = p;
      if (omnibus_significant && p < pair_alpha && mean_rank[i] != mean_rank[j]) {
        const bool i_better = mean_rank[i] < mean_rank[j];
        result.marks[i][j] = i_better ? Mark::plus : Mark::minus;
        result.marks[j][i] = i_better ? Mark::minus : Mark::plus;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Comparison reports and table rendering
// ---------------------------------------------------------------------------

struct ComparisonReport {
  std::vector<std::string> algorithms;
  std::vector<double> means;
  std::vector<double> stddevs;  // sample standard deviation
  double h = 0.0;
  double p = 1.0;
  std::vector<std::vector<Mark>> marks;  // empty when < 2 algorithms
};

inline ComparisonReport make_comparison_report(const std::vector<std::string>& names,
                                               const std::vector<std::vector<double>>& groups,
                                               double alpha = 0.05) {
  if (names.size() != groups.size())
    throw std::invalid_argument("make_comparison_report: name/group count mismatch");
  if (groups.empty())
    throw std::invalid_argument("make_comparison_report: no groups");
  ComparisonReport rep;
  rep.algorithms = names;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("make_comparison_report: empty group");
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    for (double v : g) var += (v - mean) * (v - mean);
    const double sd = g.size() > 1 ? std::sqrt(var / static_cast<double>(g.size() - 1)) : 0.0;
    rep.means.push_back(mean);
    rep.stddevs.push_back(sd);
  }
  if (groups.size() >= 2) {
    const auto kw = kruskal_wallis(groups);
    rep.h = kw.h;
    rep.p = kw.p;
    rep.marks = bonferroni_posthoc(groups, alpha).marks;
  } else {
    rep.marks.assign(1, std::vector<Mark>(1, Mark::none));
  }
  return rep;
}

/// Marks for one column, formatted with 1-based algorithm indices, e.g.
/// `2^(+),3^(-)`. Empty when nothing is significant.
inline std::string format_marks(const ComparisonReport& rep, std::size_t column) {
  if (column >= rep.algorithms.size())
    throw std::invalid_argument("format_marks: column out of range");
  std::string out;
  if (rep.marks.empty()) return out;
  for (std::size_t j = 0; j < rep.algorithms.size(); ++j) {
    if (j == column || rep.marks[column][j] == Mark::none) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(j + 1);
    out += rep.marks[column][j] == Mark::plus ? "^(+)" : "^(-)";
  }
  return out;
}

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

/// One table row: the experiment setting (instance class, n, r or sigma,
/// tau, ...) plus the per-algorithm comparison for that setting.
struct ComparisonTableRow {
  std::vector<std::string> setting;
  ComparisonReport report;
};

namespace detail {

inline void check_table(const std::vector<std::string>& setting_headers,
                        const std::vector<ComparisonTableRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("render_table: no rows");
  for (const auto& row : rows) {
    if (row.setting.size() != setting_headers.size())
      throw std::invalid_argument("render_table: setting column count mismatch");
    if (row.report.algorithms != rows.front().report.algorithms)
      throw std::invalid_argument("render_table: algorithm sets differ across rows");
  }
}

}  // namespace detail

/// Aligned text table: setting columns, then mean / st / stat per algorithm.
inline std::string render_table(const std::vector<std::string>& setting_headers,
                                const std::vector<ComparisonTableRow>& rows) {
  detail::check_table(setting_headers, rows);
  const auto& algs = rows.front().report.algorithms;
  std::vector<std::string> headers = setting_headers;
  for (const auto& a : algs) {
    headers.push_back(a + " mean");
    headers.push_back(a + " st");
    headers.push_back(a + " stat");
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : rows) {
    std::vector<std::string> line = row.setting;
    for (std::size_t a = 0; a < algs.size(); ++a) {
      std::ostringstream mean, st;
      mean << std::fixed << std::setprecision(2) << row.report.means[a];
      st << std::fixed << std::setprecision(2) << row.report.stddevs[a];
      line.push_back(mean.str());
      line.push_back(st.str());
      line.push_back(format_marks(row.report, a));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& line : cells) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[c])) << line[c];
    }
    out << '\n';
  };
  emit(headers);
  for (const auto& line : cells) emit(line);
  return out.str();
}

/// CSV twin of render_table; numbers keep full round-trip precision.
inline std::string render_table_csv(const std::vector<std::string>& setting_headers,
                                    const std::vector<ComparisonTableRow>& rows) {
  detail::check_table(setting_headers, rows);
  const auto& algs = rows.front().report.algorithms;
  std::ostringstream out;
  for (std::size_t c = 0; c < setting_headers.size(); ++c) {
    if (c) out << ',';
    out << setting_headers[c];
  }
  for (const auto& a : algs)
    out << ',' << a << "_mean," << a << "_st," << a << "_stat";
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.setting.size(); ++c) {
      if (c) out << ',';
      out << row.setting[c];
    }
    for (std::size_t a = 0; a < algs.size(); ++a) {
      out << ',' << format_double(row.report.means[a]) << ','
          << format_double(row.report.stddevs[a]) << ','
          << '"' << format_marks(row.report, a) << '"';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dynknap
