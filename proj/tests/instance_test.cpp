#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "dynknap/instance.hpp"

using namespace dynknap;

namespace {

// Writes content to a temp file and returns its path.
std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/dynknap_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("uncorrelated generator stays in [1,1000] and is deterministic") {
  const Instance a = gen_uncorrelated(100, 7);
  CHECK(a.n() == 100);
  for (std::size_t i = 0; i < a.n(); ++i) {
    CHECK(a.weights[i] >= 1);
    CHECK(a.weights[i] <= 1000);
    CHECK(a.profits[i] >= 1);
    CHECK(a.profits[i] <= 1000);
  }
  const Instance b = gen_uncorrelated(100, 7);
  CHECK(a.weights == b.weights);
  CHECK(a.profits == b.profits);

  const Instance single = gen_uncorrelated(1, 123);
  CHECK(single.n() == 1);
  CHECK(single.weights[0] >= 1);
  CHECK(single.weights[0] <= 1000);

  CHECK_THROWS(gen_uncorrelated(0, 1));
}

TEST_CASE("uncorrelated weights have the uniform mean") {
  // Mean of U[1,1000] is 500.5; 1e5 samples concentrate well within +-10.
  double sum = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = gen_uncorrelated(1000, seed);
    for (std::int64_t w : inst.weights) sum += static_cast<double>(w);
    count += inst.n();
  }
  CHECK(count == 100000);
  const double mean = sum / static_cast<double>(count);
  CHECK(mean > 490.5);
  CHECK(mean < 510.5);
}

TEST_CASE("similar-weights generator has narrow weights") {
  const Instance inst = gen_uncorr_similar_weights(200, 11);
  std::int64_t wmin = inst.weights[0], wmax = inst.weights[0];
  for (std::int64_t w : inst.weights) {
    CHECK(w >= 1000);
    CHECK(w <= 1010);
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
  }
  CHECK(wmax - wmin <= 10);
  for (std::int64_t p : inst.profits) {
    CHECK(p >= 1);
    CHECK(p <= 1000);
  }
  const Instance again = gen_uncorr_similar_weights(200, 11);
  CHECK(inst.weights == again.weights);
}

TEST_CASE("bounded strongly correlated profits are weight plus 100") {
  const Instance inst = gen_bounded_strongly_correlated(150, 5);
  for (std::size_t i = 0; i < inst.n(); ++i) {
    CHECK(inst.profits[i] == inst.weights[i] + 100);
    CHECK(inst.weights[i] >= 1);
    CHECK(inst.weights[i] <= 1000);
    CHECK(inst.profits[i] >= 101);
    CHECK(inst.profits[i] <= 1100);
  }
}

TEST_CASE("generator outputs satisfy the instance invariants") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + static_cast<std::size_t>(seed * 13 % 200);
    CHECK_NOTHROW(gen_uncorrelated(n, seed).validate());
    CHECK_NOTHROW(gen_uncorr_similar_weights(n, seed).validate());
    CHECK_NOTHROW(gen_bounded_strongly_correlated(n, seed).validate());
  }
}

TEST_CASE("unit-weight transform rescales the capacity by mean profit") {
  Instance inst;
  inst.weights = {100, 200};
  inst.profits = {481, 482};  // mean profit 481.5
  inst.capacity = 4815;
  const Instance unit = to_unit_weights(inst);
  CHECK(unit.capacity == 10);
  CHECK(unit.profits == inst.profits);
  for (std::int64_t w : unit.weights) CHECK(w == 1);

  inst.capacity = 0;
  CHECK(to_unit_weights(inst).capacity == 0);
}

TEST_CASE("unit-weight transform is idempotent on unit-weight instances") {
  Instance inst = gen_uncorrelated(50, 3);
  inst.capacity = 12345;
  const Instance once = to_unit_weights(inst);
  const Instance twice = to_unit_weights(once);
  CHECK(twice.weights == once.weights);
  CHECK(twice.profits == once.profits);
  // Mean profit is unchanged by the transform, so capacity rescales again
  // by the same factor.
  const double mean =
      static_cast<double>(once.total_profit()) / static_cast<double>(once.n());
  CHECK(twice.capacity ==
        std::max<std::int64_t>(0, std::llround(once.capacity / mean)));
}

TEST_CASE("instance files round-trip") {
  Instance inst = gen_bounded_strongly_correlated(30, 9);
  inst.capacity = 777;
  const std::string path = "/tmp/dynknap_test_roundtrip.txt";
  save_instance(inst, path);
  const Instance back = load_instance(path);
  CHECK(back.weights == inst.weights);
  CHECK(back.profits == inst.profits);
  CHECK(back.capacity == inst.capacity);
  std::remove(path.c_str());
}

TEST_CASE("instance loader rejects bad files with line numbers") {
  SUBCASE("zero profit") {
    const auto path = temp_file("zero_profit.txt", "2 10\n3 5\n4 0\n");
    CHECK_THROWS_WITH_AS(load_instance(path), doctest::Contains(":3:"),
                         std::runtime_error);
  }
  SUBCASE("item count mismatch") {
    const auto path = temp_file("short.txt", "3 10\n3 5\n4 6\n");
    CHECK_THROWS_WITH_AS(load_instance(path), doctest::Contains("fewer items"),
                         std::runtime_error);
  }
  SUBCASE("malformed header") {
    const auto path = temp_file("header.txt", "oops\n");
    CHECK_THROWS_AS(load_instance(path), std::runtime_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_instance("/tmp/dynknap_test_does_not_exist"), std::runtime_error);
  }
}
