#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dynknap/metrics.hpp"

using namespace dynknap;

namespace {

Instance small(std::vector<std::int64_t> w, std::vector<std::int64_t> p) {
  Instance inst;
  inst.weights = std::move(w);
  inst.profits = std::move(p);
  return inst;
}

}  // namespace

TEST_CASE("generation error formula") {
  GenerationRecord feasible{10, true, 90, 0};
  CHECK(generation_error(feasible, 100) == 10);
  GenerationRecord optimal{10, true, 100, 0};
  CHECK(generation_error(optimal, 100) == 0);
  GenerationRecord infeasible{10, false, 0, 7};
  CHECK(generation_error(infeasible, 100) == 107);
}

TEST_CASE("total offline error is the mean over all generations") {
  // Instance where optimum at C=5 is 11 and at C=9 is 18.
  const Instance inst = small({2, 3, 4}, {5, 6, 7});
  const OracleTable oracle(inst, 9);
  RunTrace trace;
  trace.records.push_back({5, true, 11, 0});  // error 0
  trace.records.push_back({5, true, 1, 0});   // error 10
  CHECK(total_offline_error(trace, oracle) == doctest::Approx(5.0));

  RunTrace constant;
  for (int g = 0; g < 17; ++g) constant.records.push_back({9, true, 13, 0});
  CHECK(total_offline_error(constant, oracle) == doctest::Approx(5.0));

  RunTrace empty;
  CHECK_THROWS(total_offline_error(empty, oracle));
}

TEST_CASE("partial offline error samples the last generation of each window") {
  const Instance inst = small({2, 3, 4}, {5, 6, 7});
  const OracleTable oracle(inst, 9);
  RunTrace trace;
  // tau = 3, horizon = 6: samples at generations 3 and 6 only.
  trace.records.push_back({5, true, 0, 0});   // ignored
  trace.records.push_back({5, true, 0, 0});   // ignored
  trace.records.push_back({5, true, 11, 0});  // sampled: error 0
  trace.records.push_back({9, true, 0, 0});   // ignored
  trace.records.push_back({9, true, 0, 0});   // ignored
  trace.records.push_back({9, true, 10, 0});  // sampled: error 8
  CHECK(partial_offline_error(trace, oracle, 3) == doctest::Approx(4.0));

  // tau = horizon: one sample, equal to that generation's error.
  CHECK(partial_offline_error(trace, oracle, 6) == doctest::Approx(8.0));

  // Optimal at every window end but bad mid-window: partial is 0.
  RunTrace clean;
  for (int g = 1; g <= 9; ++g)
    clean.records.push_back({5, true, g % 3 == 0 ? 11 : 0, 0});
  CHECK(partial_offline_error(clean, oracle, 3) == doctest::Approx(0.0));

  CHECK_THROWS(partial_offline_error(trace, oracle, 7));  // horizon < tau
  CHECK_THROWS(partial_offline_error(trace, oracle, 0));
}

TEST_CASE("partial error never exceeds the max sampled generation error") {
  const Instance inst = small({2, 3, 4}, {5, 6, 7});
  const OracleTable oracle(inst, 9);
  Rng rng(6);
  std::uniform_int_distribution<std::int64_t> profit(0, 11);
  RunTrace trace;
  for (int g = 0; g < 60; ++g) trace.records.push_back({5, true, profit(rng), 0});
  std::int64_t max_err = 0;
  for (const auto& rec : trace.records)
    max_err = std::max(max_err, generation_error(rec, oracle.optimal_profit(5)));
  CHECK(partial_offline_error(trace, oracle, 10) <= static_cast<double>(max_err));
  CHECK(total_offline_error(trace, oracle) <= static_cast<double>(max_err));
}

TEST_CASE("trace CSV leaves the profit column empty when infeasible") {
  RunTrace trace;
  trace.records.push_back({5, true, 11, 0});
  trace.records.push_back({3, false, 0, 4});
  const std::string path = "/tmp/dynknap_test_trace.csv";
  save_trace_csv(trace, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "generation,capacity,best_feasible_profit,min_violation");
  std::getline(in, line);
  CHECK(line == "1,5,11,");
  std::getline(in, line);
  CHECK(line == "2,3,,4");
  std::remove(path.c_str());
}
