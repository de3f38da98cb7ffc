#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "dynknap/stats.hpp"
#include "kw_reference.hpp"

using namespace dynknap;

TEST_CASE("chi-square tail probabilities hit tabulated critical values") {
  // df=2, H=5.991 is the classic 5% critical value.
  CHECK(chi_squared_sf(5.991, 2) == doctest::Approx(0.05).epsilon(0.001));
  CHECK(chi_squared_sf(3.841, 1) == doctest::Approx(0.05).epsilon(0.001));
  CHECK(chi_squared_sf(9.488, 4) == doctest::Approx(0.05).epsilon(0.001));
  CHECK(chi_squared_sf(0.0, 3) == doctest::Approx(1.0));
  CHECK_THROWS(chi_squared_sf(1.0, 0));
}

TEST_CASE("identical groups give H=0, p=1 and no marks") {
  const std::vector<std::vector<double>> groups = {{5, 5, 5}, {5, 5, 5}, {5, 5, 5}};
  const auto kw = kruskal_wallis(groups);
  CHECK(kw.h == 0.0);
  CHECK(kw.p == 1.0);
  const auto post = bonferroni_posthoc(groups);
  for (const auto& row : post.marks)
    for (Mark m : row) CHECK(m == Mark::none);
}

TEST_CASE("clearly separated groups are significant and fully marked") {
  const std::vector<std::vector<double>> groups = {
      {1, 2, 3}, {101, 102, 103}, {201, 202, 203}};
  const auto kw = kruskal_wallis(groups);
  CHECK(kw.p < 0.05);
  // Dunn z for the extreme pair: mean ranks 2 vs 8, se = sqrt(7.5*(2/3)).
  const auto post = bonferroni_posthoc(groups, 0.05);
  CHECK(post.marks[0][2] == Mark::plus);
  CHECK(post.marks[2][0] == Mark::minus);
  CHECK(post.pairwise_p[0][2] < post.pairwise_p[0][1]);
}

TEST_CASE("group order permutation leaves H and p unchanged") {
  std::vector<std::vector<double>> groups = {
      {3.2, 1.1, 4.5, 2.0}, {9.9, 8.8, 7.7}, {0.5, 0.6, 0.7, 0.8, 0.9}};
  const auto base = kruskal_wallis(groups);
  std::rotate(groups.begin(), groups.begin() + 1, groups.end());
  const auto rotated = kruskal_wallis(groups);
  CHECK(rotated.h == doctest::Approx(base.h));
  CHECK(rotated.p == doctest::Approx(base.p));
}

TEST_CASE("preconditions: at least two groups of at least two values") {
  CHECK_THROWS(kruskal_wallis({{1, 2, 3}}));
  CHECK_THROWS(kruskal_wallis({{1, 2}, {3}}));
  CHECK_THROWS(bonferroni_posthoc({{1, 2}, {3}}));
  CHECK_THROWS(bonferroni_posthoc({{1, 2}, {3, 4}}, 1.5));
}

TEST_CASE("marks are antisymmetric on random inputs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> kdist(2, 5), sdist(2, 10);
    std::uniform_real_distribution<double> shift(-20, 20);
    std::normal_distribution<double> noise(0, 5);
    std::vector<std::vector<double>> groups(kdist(rng));
    for (auto& g : groups) {
      const double mu = shift(rng);
      g.resize(sdist(rng));
      for (double& v : g) v = mu + noise(rng);
    }
    const auto post = bonferroni_posthoc(groups);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = 0; j < groups.size(); ++j) {
        if (post.marks[i][j] == Mark::plus) CHECK(post.marks[j][i] == Mark::minus);
        if (post.marks[i][j] == Mark::minus) CHECK(post.marks[j][i] == Mark::plus);
        if (post.marks[i][j] == Mark::none) CHECK(post.marks[j][i] == Mark::none);
      }
    }
  }
}

TEST_CASE("rank statistics are invariant under shifts and monotone maps") {
  const std::vector<std::vector<double>> groups = {
      {1, 4, 2, 8}, {5, 7, 6, 9}, {3, 10, 11, 12}};
  const auto base = kruskal_wallis(groups);
  const auto base_marks = bonferroni_posthoc(groups).marks;

  auto transform = [&](auto f) {
    std::vector<std::vector<double>> out = groups;
    for (auto& g : out)
      for (double& v : g) v = f(v);
    return out;
  };
  const auto shifted = transform([](double v) { return v + 1000.0; });
  CHECK(kruskal_wallis(shifted).h == doctest::Approx(base.h));
  CHECK(kruskal_wallis(shifted).p == doctest::Approx(base.p));
  CHECK(bonferroni_posthoc(shifted).marks == base_marks);

  const auto cubed = transform([](double v) { return v * v * v; });  // monotone
  CHECK(kruskal_wallis(cubed).h == doctest::Approx(base.h));
  CHECK(bonferroni_posthoc(cubed).marks == base_marks);
}

TEST_CASE("H and p match the frozen reference implementation values") {
  for (const auto& c : testdata::kw_reference_cases()) {
    const auto kw = kruskal_wallis(c.groups);
    CHECK(kw.h == doctest::Approx(c.h).epsilon(1e-9));
    CHECK(kw.p == doctest::Approx(c.p).epsilon(1e-9));
  }
}

TEST_CASE("comparison report and mark formatting") {
  const std::vector<std::string> names = {"A", "B", "C"};
  const std::vector<std::vector<double>> groups = {
      {1, 2, 3}, {101, 102, 103}, {201, 202, 203}};
  const auto rep = make_comparison_report(names, groups);
  CHECK(rep.means[1] == doctest::Approx(102.0));
  CHECK(rep.stddevs[1] == doctest::Approx(1.0));
  CHECK(rep.p < 0.05);
  // Column A is significantly better than C only (Bonferroni keeps the
  // adjacent pairs unmarked at these tiny sizes).
  CHECK(format_marks(rep, 0) == "3^(+)");
  CHECK(format_marks(rep, 2) == "1^(-)");
  CHECK_THROWS(format_marks(rep, 3));
}

TEST_CASE("single algorithm report has no marks") {
  const auto rep = make_comparison_report({"solo"}, {{1.0, 2.0, 3.0}});
  CHECK(rep.algorithms.size() == 1);
  CHECK(format_marks(rep, 0).empty());
  CHECK(rep.p == 1.0);
}

TEST_CASE("tables render aligned text and lossless CSV") {
  const std::vector<std::string> names = {"A", "B", "C"};
  std::vector<std::vector<double>> groups = {
      {1.25, 2.5, 3.125}, {101, 102, 103}, {201, 202, 203}};
  ComparisonTableRow row{{"uncorr", "100", "uniform", "2000", "1000"},
                         make_comparison_report(names, groups)};
  const auto headers = std::vector<std::string>{"class", "n", "change", "r", "tau"};
  const std::string text = render_table(headers, {row});
  CHECK(text.find("A mean") != std::string::npos);
  CHECK(text.find("uncorr") != std::string::npos);

  const std::string csv = render_table_csv(headers, {row});
  // Round-trip: parse the numeric cells back and compare bit-exactly.
  std::istringstream in(csv);
  std::string header_line, data_line;
  std::getline(in, header_line);
  std::getline(in, data_line);
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ds(data_line);
  while (std::getline(ds, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() >= 14);
  CHECK(std::stod(fields[5]) == row.report.means[0]);
  CHECK(std::stod(fields[6]) == row.report.stddevs[0]);
  // Mark cells keep the caret notation in the CSV output.
  CHECK(csv.find("\"3^(+)\"") != std::string::npos);
  CHECK(csv.find("\"1^(-)\"") != std::string::npos);
}

TEST_CASE("mark strings can list several algorithms") {
  // Craft a report by hand to pin the exact string format.
  ComparisonReport rep;
  rep.algorithms = {"X", "Y", "Z"};
  rep.means = {1, 2, 3};
  rep.stddevs = {0, 0, 0};
  rep.marks.assign(3, std::vector<Mark>(3, Mark::none));
  rep.marks[0][1] = Mark::plus;
  rep.marks[0][2] = Mark::minus;
  CHECK(format_marks(rep, 0) == "2^(+),3^(-)");
}
