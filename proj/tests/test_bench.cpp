#include <doctest.h>

#include <sstream>

#include "rfsel/bench.hpp"
#include "rfsel/error.hpp"

using namespace rfsel;

namespace {

SelectionConfig small_selection() {
  SelectionConfig cfg;
  cfg.vi_runs = 3;
  cfg.vi_forest = ForestConfig{50, MtryExpr::p_over(3), std::nullopt, RngSeed{}};
  cfg.nested_forest = ForestConfig{30, std::nullopt, std::nullopt, RngSeed{}};
  cfg.nested_repeats = 2;
  cfg.curve_min_leaf = 2;
  return cfg;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("sweep deduplicates grid entries that floor to the same mtry") {
  const Dataset d = gen_toys({40, 9, RngSeed{1}});
  SweepSpec s;
  s.mtry_grid = {MtryExpr::parse("p/3"), MtryExpr::parse("sqrt(p)"), MtryExpr::parse("1")};
  s.ntree_grid = {10, 20};
  s.repeats = 2;
  s.seed = RngSeed{5};
  const auto cells = run_sweep(d, s);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].mtry_expr == "p/3");
  CHECK(cells[0].mtry_value == 3);
  CHECK(cells[1].mtry_value == 1);

  std::ostringstream csv;
  write_sweep_csv(csv, cells);
  CHECK(csv.str().rfind("mtry_expr,mtry_value,ntree,mean,sd\n", 0) == 0);
}

TEST_CASE("sweep cells do not depend on the rest of the grid") {
  const Dataset d = gen_friedman1({1, 50, 12, std::nullopt, RngSeed{2}});
  SweepSpec full;
  full.mtry_grid = {MtryExpr::parse("1"), MtryExpr::parse("p/3"), MtryExpr::parse("p")};
  full.ntree_grid = {15, 30};
  full.repeats = 2;
  full.seed = RngSeed{8};
  SweepSpec sub = full;
  sub.mtry_grid = {MtryExpr::parse("p")};
  sub.ntree_grid = {30};
  const auto all = run_sweep(d, full);
  const auto one = run_sweep(d, sub);
  REQUIRE(one.size() == 1);
  bool found = false;
  for (const auto& c : all) {
    if (c.mtry_value == 12 && c.ntree == 30) {
      found = true;
      CHECK(c.mean == one[0].mean);
      CHECK(c.sd == one[0].sd);
    }
  }
  CHECK(found);
}

TEST_CASE("sweep rejects expressions outside 1..p and empty grids") {
  const Dataset d = gen_toys({20, 9, RngSeed{1}});
  SweepSpec s;
  s.mtry_grid = {MtryExpr::parse("2p")};
  s.ntree_grid = {5};
  CHECK_THROWS_AS(run_sweep(d, s), ConfigError);
  s.mtry_grid = {MtryExpr::parse("sqrt(p)/4")};
  CHECK_THROWS_AS(run_sweep(d, s), ConfigError);
  s.mtry_grid = {};
  CHECK_THROWS_AS(run_sweep(d, s), ConfigError);
}

TEST_CASE("type 7 quantiles") {
  CHECK(quantile({4, 1, 3, 2}, 0.25) == 1.75);
  CHECK(quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(quantile({7}, 0.3) == 7.0);
}

TEST_CASE("importance summaries cover the first top_count columns") {
  ImportanceReport r;
  r.runs = 3;
  r.per_run = {{0.3, 0.0, 1.0}, {0.1, 0.0, 2.0}, {0.2, 0.0, 3.0}};
  r.mean_vi = {0.2, 0.0, 2.0};
  r.sd_vi = {0.1, 0.0, 1.0};
  r.ranking = rank_by_importance(r.mean_vi);
  const auto s = summarize_importance(r, {"a", "b", "c"}, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0].name == "a");
  CHECK(s[0].rank == 2);
  CHECK(s[0].median == doctest::Approx(0.2));
  CHECK(s[0].min == 0.1);
  CHECK(s[0].max == 0.3);
  CHECK(s[1].rank == 3);
}

TEST_CASE("generator sources place replicates after the true block") {
  GeneratorSpec g;
  g.kind = GeneratorSpec::Kind::Friedman1;
  g.n = 30;
  g.p = 10;
  g.replicates = {{2, 2, 0.9}};
  const LoadedSource src = draw_generator(g, RngSeed{3});
  CHECK(src.data.num_features() == 12);
  CHECK(src.data.feature_names()[5] == "6^3");
  CHECK(src.true_variables == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(parse_generator_kind("friedman2") == GeneratorSpec::Kind::Friedman2);
  CHECK(to_string(GeneratorSpec::Kind::Toys) == "toys");
  CHECK_THROWS_AS(parse_generator_kind("nope"), ConfigError);
}

TEST_CASE("CV aggregate is the test-size weighted mean of fold errors") {
  const Dataset d = gen_toys({48, 10, RngSeed{9}});
  CvSpec c;
  c.folds = 3;
  c.selection = small_selection();
  c.eval_forest = ForestConfig{40, std::nullopt, std::nullopt, RngSeed{}};
  c.seed = RngSeed{4};
  const CvReport r = run_cv_selection(d, c);
  REQUIRE(r.folds.size() == 3);
  double w = 0, all = 0, interp = 0, pred = 0;
  for (const auto& f : r.folds) {
    w += f.test_size;
    all += f.test_size * f.test_error.all;
    interp += f.test_size * f.test_error.interpretation;
    pred += f.test_size * f.test_error.prediction;
  }
  CHECK(w == 48);
  CHECK(r.error.all == doctest::Approx(all / w).epsilon(1e-14));
  CHECK(r.error.interpretation == doctest::Approx(interp / w).epsilon(1e-14));
  CHECK(r.error.prediction == doctest::Approx(pred / w).epsilon(1e-14));

  const CvReport again = run_cv_selection(d, c);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(again.folds[k].interpretation_set == r.folds[k].interpretation_set);
    CHECK(again.folds[k].prediction_set == r.folds[k].prediction_set);
  }
  std::ostringstream csv;
  write_cv_csv(csv, r);
  CHECK(csv.str().find("\nall,48,") != std::string::npos);

  c.folds = 1;
  CHECK_THROWS_AS(run_cv_selection(d, c), ConfigError);
}

TEST_CASE("train/test evaluation: equal sets give equal errors") {
  GeneratorSpec g;
  g.n = 60;
  g.p = 12;
  const auto r = run_train_test_eval(g, small_selection(), ForestConfig{60, std::nullopt, std::nullopt, RngSeed{}},
                                     RngSeed{6});
  if (r.selection.prediction_set == r.selection.interpretation_set) {
    CHECK(r.test_error.prediction == r.test_error.interpretation);
  }
  const Dataset train = gen_toys({60, 12, RngSeed{1}});
  const Dataset test = gen_toys({60, 12, RngSeed{2}});
  const ForestConfig fc{40, std::nullopt, std::nullopt, RngSeed{5}};
  const std::vector<std::size_t> features{2, 5, 4};
  CHECK(subset_test_error(train, test, features, fc) == subset_test_error(train, test, features, fc));
  CHECK(r.test_error.all >= 0.0);
  CHECK(r.test_error.all <= 1.0);
}

}  // TEST_SUITE
