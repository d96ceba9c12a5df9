#include <bit>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mib/csv.hpp"
#include "mib/data_matrix.hpp"
#include "mib/errors.hpp"
#include "synth.hpp"

using namespace mib;

TEST_CASE("csv parse basics") {
  std::istringstream in("a,b\n1,2\n3,\n");
  DataMatrix m = parse_csv(in, std::nullopt, "test");
  CHECK(m.rows == 2);
  CHECK(m.cols == 2);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.at(0, 1) == 2.0);
  CHECK(m.at(1, 0) == 3.0);
  CHECK(!m.is_observed(1, 1));
  CHECK(m.column_names[0] == "a");
}

TEST_CASE("csv target resolution") {
  std::istringstream in("a,b\n1,2\n");
  DataMatrix m = parse_csv(in, std::string("b"), "test");
  REQUIRE(m.target_col.has_value());
  CHECK(*m.target_col == 1);
}

TEST_CASE("csv skips leading comment lines") {
  std::istringstream in("# config_hash=abc seed=1\na,b\n1,2\n");
  DataMatrix m = parse_csv(in, std::nullopt, "test");
  CHECK(m.rows == 1);
  CHECK(m.column_names[1] == "b");
}

TEST_CASE("csv error cases") {
  auto message_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_csv(in, std::nullopt, "test");
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string bad_field = message_of("a,b\n1,2\n3,4\nx,6\n");
  CHECK(bad_field.find("row 3") != std::string::npos);
  CHECK(bad_field.find("column a") != std::string::npos);
  CHECK(message_of("a\n1\n").find("at least 2 columns") != std::string::npos);
  CHECK(message_of("a,b\n").find("no data rows") != std::string::npos);
  std::istringstream in("a,b\n1,2\n");
  CHECK_THROWS_AS(parse_csv(in, std::string("zz"), "test"), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("csv write/parse round trip is bit exact") {
  DataMatrix m = synth::normal_matrix(17, 5, 99);
  m.set(0, 0, 1.0 / 3.0);
  m.set(0, 1, 1e-17);
  m.set(0, 2, -123456.789e100);
  m.set_missing(3, 2);
  m.set_missing(16, 4);
  const std::string text = render_csv(m, {"meta line"});
  std::istringstream in(text);
  DataMatrix back = parse_csv(in, std::nullopt, "round");
  REQUIRE(back.rows == m.rows);
  REQUIRE(back.cols == m.cols);
  for (size_t i = 0; i < m.rows; ++i) {
    for (size_t j = 0; j < m.cols; ++j) {
      REQUIRE(back.is_observed(i, j) == m.is_observed(i, j));
      if (m.is_observed(i, j)) {
        REQUIRE(std::bit_cast<uint64_t>(back.at(i, j)) ==
                std::bit_cast<uint64_t>(m.at(i, j)));
      }
    }
  }
}

TEST_CASE("standardizer matches hand-computed stats") {
  DataMatrix m = make_matrix(3, 2);
  m.set(0, 0, 1.0); m.set(1, 0, 2.0); m.set(2, 0, 3.0);
  m.set(0, 1, 5.0); m.set(1, 1, 5.0); m.set(2, 1, 5.0);
  StandardizationParams p = fit_standardizer(m);
  CHECK(p.means[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.stds[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(p.means[1] == 5.0);
  CHECK(p.stds[1] == 0.0);

  DataMatrix z = apply_standardizer(m, p);
  CHECK(z.at(0, 0) == doctest::Approx(-1.2247448713915890).epsilon(1e-12));
  CHECK(z.at(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(z.at(2, 0) == doctest::Approx(1.2247448713915890).epsilon(1e-12));
  CHECK(z.at(0, 1) == 0.0);  // constant column maps to 0
  CHECK(z.at(2, 1) == 0.0);
}

TEST_CASE("standardizer skips unobserved cells") {
  DataMatrix m = make_matrix(3, 1);
  m.set(0, 0, 1.0);
  m.set_missing(1, 0);
  m.set(2, 0, 3.0);
  StandardizationParams p = fit_standardizer(m);
  CHECK(p.means[0] == 2.0);
  CHECK(p.stds[0] == 1.0);
}

TEST_CASE("standardize then invert is the identity within 1e-12") {
  DataMatrix m = synth::normal_matrix(40, 6, 5);
  synth::punch_holes(m, 0.2, 6);
  StandardizationParams p = fit_standardizer(m);
  DataMatrix z = apply_standardizer(m, p);
  DataMatrix back = invert_standardizer(z, p);
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j)
      if (m.is_observed(i, j))
        CHECK(back.at(i, j) == doctest::Approx(m.at(i, j)).epsilon(1e-12));
}

TEST_CASE("z-scored columns have mean 0 and std 1") {
  DataMatrix m = synth::normal_matrix(200, 4, 11);
  StandardizationParams p = fit_standardizer(m);
  DataMatrix z = apply_standardizer(m, p);
  for (size_t j = 0; j < z.cols; ++j) {
    double s = 0.0;
    for (size_t i = 0; i < z.rows; ++i) s += z.at(i, j);
    const double mean = s / static_cast<double>(z.rows);
    double var = 0.0;
    for (size_t i = 0; i < z.rows; ++i) {
      const double dvl = z.at(i, j) - mean;
      var += dvl * dvl;
    }
    var /= static_cast<double>(z.rows);
    CHECK(std::fabs(mean) < 1e-9);
    CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-9);
  }
}

TEST_CASE("apply_standardizer rejects dimension mismatch") {
  DataMatrix m = make_matrix(2, 3);
  StandardizationParams p;
  p.means = {0.0, 0.0};
  p.stds = {1.0, 1.0};
  CHECK_THROWS_AS(apply_standardizer(m, p), DataError);
}

TEST_CASE("fold plan partitions rows with balanced sizes") {
  const FoldPlan plan = make_fold_plan(10, 5, 3);
  std::vector<size_t> counts(5, 0);
  for (size_t f : plan.assignments) counts[f]++;
  for (size_t c : counts) CHECK(c == 2);

  const FoldPlan plan11 = make_fold_plan(11, 5, 3);
  std::multiset<size_t> sizes;
  std::vector<size_t> counts11(5, 0);
  for (size_t f : plan11.assignments) counts11[f]++;
  for (size_t c : counts11) sizes.insert(c);
  CHECK(sizes == std::multiset<size_t>({2, 2, 2, 2, 3}));

  std::set<size_t> seen;
  for (size_t f = 0; f < 5; ++f)
    for (size_t r : plan11.fold_rows(f)) seen.insert(r);
  CHECK(seen.size() == 11);
}

TEST_CASE("fold plan is deterministic and validates its inputs") {
  const FoldPlan a = make_fold_plan(23, 4, 7);
  const FoldPlan b = make_fold_plan(23, 4, 7);
  CHECK(a.assignments == b.assignments);
  CHECK_THROWS_AS(make_fold_plan(3, 5, 1), ConfigError);
  CHECK_THROWS_AS(make_fold_plan(10, 1, 1), ConfigError);
}

TEST_CASE("fold complement is the other folds") {
  const FoldPlan plan = make_fold_plan(20, 4, 9);
  for (size_t f = 0; f < 4; ++f) {
    auto in_fold = plan.fold_rows(f);
    auto out_fold = plan.complement_rows(f);
    CHECK(in_fold.size() + out_fold.size() == 20);
    std::set<size_t> all(in_fold.begin(), in_fold.end());
    for (size_t r : out_fold) CHECK(all.insert(r).second);
  }
}
