#include <bit>
#include <cmath>

#include "doctest.h"
#include "mib/errors.hpp"
#include "mib/imputer.hpp"
#include "mib/reference.hpp"
#include "mib/rng.hpp"
#include "synth.hpp"

using namespace mib;

namespace {

ImputerSpec spec_of(ImputerKind kind, uint64_t seed = 0) {
  ImputerSpec s;
  s.kind = kind;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("column statistics match worked examples") {
  CHECK(column_median({3, 1, 2}) == 2.0);
  CHECK(column_median({4, 1, 3, 2}) == 2.0);  // even length takes the lower middle
  CHECK(column_median({7}) == 7.0);
  CHECK(column_mode({1, 2, 2, 3}) == 2.0);
  CHECK(column_mode({3, 3, 1, 1, 2}) == 1.0);  // tie goes to the smallest value
  CHECK(column_mode({5, 4}) == 4.0);
}

TEST_CASE("column statistics match the references bit for bit") {
  SplitMix64 rng(7001);
  for (int rep = 0; rep < 200; ++rep) {
    const size_t n = 1 + rng.below(12);
    std::vector<double> vals(n);
    // mix of repeated small integers and awkward fractions
    for (double& v : vals)
      v = rng.below(2) ? static_cast<double>(rng.below(5))
                       : rng.next_double() / 3.0;
    double s = 0.0;
    for (double v : vals) s += v;
    const double mean = s / static_cast<double>(n);
    CHECK(std::bit_cast<uint64_t>(mean) ==
          std::bit_cast<uint64_t>(ref_mean(vals)));
    CHECK(std::bit_cast<uint64_t>(column_median(vals)) ==
          std::bit_cast<uint64_t>(ref_median(vals)));
    CHECK(std::bit_cast<uint64_t>(column_mode(vals)) ==
          std::bit_cast<uint64_t>(ref_mode(vals)));
  }
}

TEST_CASE("stat imputers fill with the training statistic") {
  DataMatrix train = make_matrix(4, 2);
  train.set(0, 0, 1.0); train.set(1, 0, 2.0); train.set(2, 0, 2.0); train.set(3, 0, 9.0);
  train.set(0, 1, 5.0); train.set(1, 1, 6.0); train.set(2, 1, 7.0);
  train.set_missing(3, 1);

  DataMatrix query = make_matrix(1, 2);
  query.set_missing(0, 0);
  query.set_missing(0, 1);

  auto mean_i = fit_imputer(spec_of(ImputerKind::Mean), train);
  DataMatrix got = mean_i->transform(query);
  CHECK(got.at(0, 0) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(got.at(0, 1) == doctest::Approx(6.0).epsilon(1e-12));

  auto median_i = fit_imputer(spec_of(ImputerKind::Median), train);
  DataMatrix med = median_i->transform(query);
  CHECK(med.at(0, 0) == 2.0);
  CHECK(med.at(0, 1) == 6.0);

  auto mode_i = fit_imputer(spec_of(ImputerKind::Mode), train);
  DataMatrix mod = mode_i->transform(query);
  CHECK(mod.at(0, 0) == 2.0);
}

TEST_CASE("transform keeps observed cells bit identical and completes the rest") {
  DataMatrix train = synth::normal_matrix(40, 5, 10);
  synth::punch_holes(train, 0.2, 11);
  DataMatrix query = synth::normal_matrix(15, 5, 12);
  synth::punch_holes(query, 0.3, 13);
  for (ImputerKind kind : all_imputer_kinds()) {
    ImputerSpec s = spec_of(kind, 3);
    s.mf_epochs = 20;
    s.ae_epochs = 10;
    s.gain_epochs = 3;
    s.gbt_trees = 10;
    auto imp = fit_imputer(s, train);
    DataMatrix out = imp->transform(query);
    REQUIRE(out.missing_count() == 0);
    for (size_t i = 0; i < query.rows; ++i) {
      for (size_t j = 0; j < query.cols; ++j) {
        if (query.is_observed(i, j)) {
          CHECK(std::bit_cast<uint64_t>(out.at(i, j)) ==
                std::bit_cast<uint64_t>(query.at(i, j)));
        } else {
          CHECK(std::isfinite(out.at(i, j)));
        }
      }
    }
  }
}

TEST_CASE("transform of a complete matrix is the identity") {
  DataMatrix train = synth::normal_matrix(30, 4, 20);
  DataMatrix query = synth::normal_matrix(8, 4, 21);
  for (ImputerKind kind : all_imputer_kinds()) {
    ImputerSpec s = spec_of(kind, 1);
    s.mf_epochs = 5;
    s.ae_epochs = 3;
    s.gain_epochs = 2;
    s.gbt_trees = 5;
    auto imp = fit_imputer(s, train);
    DataMatrix out = imp->transform(query);
    for (size_t c = 0; c < query.values.size(); ++c)
      CHECK(std::bit_cast<uint64_t>(out.values[c]) ==
            std::bit_cast<uint64_t>(query.values[c]));
  }
}

TEST_CASE("transform rejects column count mismatches") {
  DataMatrix train = synth::normal_matrix(10, 3, 1);
  DataMatrix query = synth::normal_matrix(4, 5, 2);
  auto imp = fit_imputer(spec_of(ImputerKind::Mean), train);
  CHECK_THROWS_AS(imp->transform(query), DataError);
}

TEST_CASE("all-missing training column falls back to zero") {
  DataMatrix train = make_matrix(5, 2);
  for (size_t i = 0; i < 5; ++i) {
    train.set(i, 0, static_cast<double>(i));
    train.set_missing(i, 1);
  }
  DataMatrix query = make_matrix(2, 2);
  query.set(0, 0, 1.0);
  query.set_missing(0, 1);
  query.set_missing(1, 0);
  query.set_missing(1, 1);
  auto mean_i = fit_imputer(spec_of(ImputerKind::Mean), train);
  DataMatrix m = mean_i->transform(query);
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(1, 1) == 0.0);
  auto gbt = fit_imputer(spec_of(ImputerKind::GradientBoostedTrees), train);
  DataMatrix g = gbt->transform(query);
  CHECK(g.at(0, 1) == 0.0);
}

TEST_CASE("knn matches a worked example") {
  // train rows: (0,0), (1,1), (10,10); query (0.9, missing), k=2
  DataMatrix train = make_matrix(3, 2);
  train.set(0, 0, 0.0); train.set(0, 1, 0.0);
  train.set(1, 0, 1.0); train.set(1, 1, 1.0);
  train.set(2, 0, 10.0); train.set(2, 1, 10.0);
  ImputerSpec s = spec_of(ImputerKind::Knn);
  s.knn_k = 2;
  KnnImputer knn(s, train);
  DataMatrix query = make_matrix(1, 2);
  query.set(0, 0, 0.9);
  query.set_missing(0, 1);
  // nearest two rows by the shared coordinate are (1,1) then (0,0)
  CHECK(knn.impute_cell(query, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  DataMatrix out = knn.transform(query);
  CHECK(out.at(0, 1) == knn.impute_cell(query, 0, 1));
}

TEST_CASE("knn with fewer rows than k averages everyone") {
  DataMatrix train = make_matrix(2, 2);
  train.set(0, 0, 0.0); train.set(0, 1, 4.0);
  train.set(1, 0, 1.0); train.set(1, 1, 8.0);
  ImputerSpec s = spec_of(ImputerKind::Knn);
  s.knn_k = 10;
  KnnImputer knn(s, train);
  DataMatrix query = make_matrix(1, 2);
  query.set(0, 0, 0.4);
  query.set_missing(0, 1);
  CHECK(knn.impute_cell(query, 0, 1) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("knn with no usable neighbor returns the column mean") {
  DataMatrix train = make_matrix(2, 3);
  // neither training row observes column 0, where the query has its only value
  train.set_missing(0, 0); train.set(0, 1, 2.0); train.set(0, 2, 3.0);
  train.set_missing(1, 0); train.set(1, 1, 4.0); train.set(1, 2, 5.0);
  ImputerSpec s = spec_of(ImputerKind::Knn);
  KnnImputer knn(s, train);
  DataMatrix query = make_matrix(1, 3);
  query.set(0, 0, 7.0);
  query.set_missing(0, 1);
  query.set_missing(0, 2);
  CHECK(knn.impute_cell(query, 0, 1) == 3.0);  // mean of {2,4}
  CHECK(knn.impute_cell(query, 0, 2) == 4.0);
}

TEST_CASE("knn transform equals the serial reference exactly") {
  SplitMix64 rng(51);
  for (int rep = 0; rep < 8; ++rep) {
    DataMatrix train = synth::normal_matrix(30 + 5 * rep, 4, 100 + rep);
    synth::punch_holes(train, 0.25, 200 + rep);
    DataMatrix query = synth::normal_matrix(20, 4, 300 + rep);
    synth::punch_holes(query, 0.35, 400 + rep);
    const size_t k = 1 + rng.below(6);
    ImputerSpec s = spec_of(ImputerKind::Knn);
    s.knn_k = k;
    KnnImputer knn(s, train);
    DataMatrix got = knn.transform(query);
    DataMatrix want = ref_knn_complete(train, query, k);
    for (size_t c = 0; c < got.values.size(); ++c)
      REQUIRE(std::bit_cast<uint64_t>(got.values[c]) ==
              std::bit_cast<uint64_t>(want.values[c]));
  }
}

TEST_CASE("knn distance tie breaks on the lower row id") {
  // two training rows at the same distance but different fill values: the
  // k=1 neighbor must be the lower row id deterministically
  DataMatrix train = make_matrix(3, 2);
  train.set(0, 0, 1.0); train.set(0, 1, 100.0);
  train.set(1, 0, 1.0); train.set(1, 1, 200.0);
  train.set(2, 0, 50.0); train.set(2, 1, 300.0);
  ImputerSpec s = spec_of(ImputerKind::Knn);
  s.knn_k = 1;
  KnnImputer knn(s, train);
  DataMatrix query = make_matrix(1, 2);
  query.set(0, 0, 1.0);
  query.set_missing(0, 1);
  CHECK(knn.impute_cell(query, 0, 1) == 100.0);
}

TEST_CASE("matrix factorization recovers low rank structure") {
  DataMatrix data = synth::rank1_matrix(80, 6, 42, 0.01);
  DataMatrix holed = data;
  synth::punch_holes(holed, 0.25, 44);
  // every row must keep at least one observed cell, or there is nothing
  // for the row factor to latch onto
  for (size_t i = 0; i < holed.rows; ++i) {
    size_t obs = 0;
    for (size_t j = 0; j < holed.cols; ++j) obs += holed.is_observed(i, j);
    REQUIRE(obs > 0);
  }
  ImputerSpec s = spec_of(ImputerKind::MatrixFactorization, 7);
  s.mf_rank = 2;
  s.mf_epochs = 400;
  s.mf_lr = 0.02;
  s.mf_reg = 0.02;
  auto imp = fit_imputer(s, holed);
  DataMatrix out = imp->transform(holed);
  double sse = 0.0;
  size_t cnt = 0;
  for (size_t i = 0; i < data.rows; ++i) {
    for (size_t j = 0; j < data.cols; ++j) {
      if (holed.is_observed(i, j)) continue;
      const double d = out.at(i, j) - data.at(i, j);
      sse += d * d;
      ++cnt;
    }
  }
  REQUIRE(cnt > 0);
  CHECK(std::sqrt(sse / static_cast<double>(cnt)) < 0.1);
}

TEST_CASE("matrix factorization training loss goes down") {
  DataMatrix train = synth::rank1_matrix(50, 5, 9, 0.05);
  synth::punch_holes(train, 0.2, 10);
  ImputerSpec s = spec_of(ImputerKind::MatrixFactorization, 3);
  s.mf_epochs = 100;
  MfImputer mf(s, train);
  const auto& curve = mf.loss_curve();
  REQUIRE(curve.size() == 101);
  CHECK(curve.back() <= curve[1]);
  CHECK(curve.back() < curve.front());
  for (double v : curve) CHECK(std::isfinite(v));
}

TEST_CASE("matrix factorization rank sentinel resolves to min(8, d-1)") {
  DataMatrix wide = synth::normal_matrix(30, 12, 2);
  MfImputer a(spec_of(ImputerKind::MatrixFactorization), wide);
  CHECK(a.rank() == 8);
  DataMatrix narrow = synth::normal_matrix(30, 4, 2);
  MfImputer b(spec_of(ImputerKind::MatrixFactorization), narrow);
  CHECK(b.rank() == 3);
  DataMatrix tiny = synth::normal_matrix(2, 6, 2);
  MfImputer c(spec_of(ImputerKind::MatrixFactorization), tiny);
  CHECK(c.rank() == 2);  // clamped by the row count
}

TEST_CASE("matrix factorization with zero epochs still completes finitely") {
  DataMatrix train = synth::normal_matrix(20, 4, 5);
  synth::punch_holes(train, 0.2, 6);
  ImputerSpec s = spec_of(ImputerKind::MatrixFactorization, 1);
  s.mf_epochs = 0;
  auto imp = fit_imputer(s, train);
  DataMatrix out = imp->transform(train);
  CHECK(out.missing_count() == 0);
}

TEST_CASE("boosted-tree imputer exploits a duplicated column") {
  SplitMix64 rng(612);
  const size_t n = 120;
  DataMatrix data = make_matrix(n, 3);
  for (size_t i = 0; i < n; ++i) {
    const double v = 4.0 * rng.next_double() - 2.0;
    data.set(i, 0, v);
    data.set(i, 1, v);  // exact copy of column 0
    data.set(i, 2, synth::gauss(rng));
  }
  DataMatrix holed = data;
  // hide some of column 1 only
  for (size_t i = 0; i < n; i += 4) holed.set_missing(i, 1);
  ImputerSpec s = spec_of(ImputerKind::GradientBoostedTrees, 4);
  s.gbt_trees = 60;
  s.gbt_depth = 4;
  auto imp = fit_imputer(s, holed);
  DataMatrix out = imp->transform(holed);
  double sse = 0.0;
  size_t cnt = 0;
  for (size_t i = 0; i < n; i += 4) {
    const double d = out.at(i, 1) - data.at(i, 1);
    sse += d * d;
    ++cnt;
  }
  CHECK(std::sqrt(sse / static_cast<double>(cnt)) < 0.1);
}

TEST_CASE("boosted-tree imputer handles degenerate shapes") {
  DataMatrix one = make_matrix(1, 2);
  one.set(0, 0, 3.0);
  one.set_missing(0, 1);
  ImputerSpec s = spec_of(ImputerKind::GradientBoostedTrees, 1);
  s.gbt_trees = 5;
  auto imp = fit_imputer(s, one);
  DataMatrix out = imp->transform(one);
  CHECK(std::isfinite(out.at(0, 1)));
}

TEST_CASE("seeded imputers are deterministic") {
  DataMatrix train = synth::normal_matrix(40, 5, 7);
  synth::punch_holes(train, 0.2, 8);
  DataMatrix query = synth::normal_matrix(10, 5, 9);
  synth::punch_holes(query, 0.3, 10);
  for (ImputerKind kind : {ImputerKind::MatrixFactorization,
                           ImputerKind::GradientBoostedTrees}) {
    ImputerSpec s = spec_of(kind, 99);
    s.mf_epochs = 30;
    s.gbt_trees = 10;
    auto a = fit_imputer(s, train);
    auto b = fit_imputer(s, train);
    DataMatrix oa = a->transform(query);
    DataMatrix ob = b->transform(query);
    for (size_t c = 0; c < oa.values.size(); ++c)
      CHECK(std::bit_cast<uint64_t>(oa.values[c]) ==
            std::bit_cast<uint64_t>(ob.values[c]));
  }
}

TEST_CASE("imputer names round trip") {
  for (ImputerKind kind : all_imputer_kinds()) {
    auto back = imputer_kind_from_name(imputer_name(kind));
    REQUIRE(back.has_value());
    CHECK(*back == kind);
  }
  CHECK(!imputer_kind_from_name("bogus").has_value());
  CHECK(imputer_kind_index(ImputerKind::Mean) == 0);
  CHECK(imputer_kind_index(ImputerKind::Gain) == 7);
}
