#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "seqlab/runs.hpp"
#include "support.hpp"

using namespace seqlab;
using namespace seqlab::testing;

namespace {

RunRecord run(const std::string& name, std::int64_t seed, double f1, double test_f1 = 0.0) {
  RunRecord r;
  r.run_name = name;
  r.seed = seed;
  r.reports = {{"val", {{"strict", {{"micro", {{"entity", {{"f1", f1}}}}}}}}},
               {"test", {{"strict", {{"micro", {{"entity", {{"f1", test_f1}}}}}}}}}};
  return r;
}

}  // namespace

TEST(Summarize, StandardErrorOfTheMean) {
  const std::vector<double> two{0.8, 0.9};
  const auto s = summarize(two);
  EXPECT_NEAR(s.mean, 0.85, 1e-12);
  EXPECT_NEAR(s.uncertainty, 0.05, 1e-12);
  const std::vector<double> one{0.7};
  EXPECT_EQ(summarize(one).uncertainty, 0.0);
  EXPECT_EQ(summarize(one).mean, 0.7);
  const std::vector<double> four{1, 2, 3, 4};
  EXPECT_NEAR(summarize(four).uncertainty, std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
}

TEST(Summarize, MeanWithinRange) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v(uniform(rng, 1, 12));
    for (auto& x : v) x = double(uniform(rng, 0, 1000)) / 1000.0;
    const auto s = summarize(v);
    ASSERT_GE(s.mean, *std::min_element(v.begin(), v.end()));
    ASSERT_LE(s.mean, *std::max_element(v.begin(), v.end()));
    ASSERT_GE(s.uncertainty, 0.0);
  }
}

TEST(MetricValue, DottedAndPointerPaths) {
  const auto r = run("a", 1, 0.5);
  EXPECT_EQ(metric_value(r.reports, "val.strict.micro.entity.f1"), 0.5);
  EXPECT_EQ(metric_value(r.reports, "/val/strict/micro/entity/f1"), 0.5);
  EXPECT_FALSE(metric_value(r.reports, "val.strict.micro"));
  EXPECT_FALSE(metric_value(r.reports, "val.nope"));
}

TEST(Best, ArgmaxWithDeterministicTies) {
  std::vector<RunRecord> rs{run("b", 3, 0.9), run("a", 5, 0.7), run("c", 1, 0.9)};
  EXPECT_EQ(best_model(rs).run_name, "c");
  rs = {run("z", 2, 0.9), run("y", 2, 0.9)};
  EXPECT_EQ(best_model(rs).run_name, "y");
  EXPECT_EQ(best_model(std::vector<RunRecord>{run("a", 1, 0.1, 0.9), run("b", 2, 0.2, 0.1)},
                       "test.strict.micro.entity.f1")
                .run_name,
            "a");
}

TEST(Best, InvariantUnderPositiveAffineRescaling) {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    std::vector<RunRecord> runs, scaled;
    const double a = double(uniform(rng, 1, 100)) / 10.0, b = double(uniform(rng, 0, 100)) - 50.0;
    const auto n = uniform(rng, 1, 8);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = double(uniform(rng, 0, 20)) / 20.0;
      runs.push_back(run("r" + std::to_string(k), std::int64_t(uniform(rng, 0, 5)), v));
      scaled.push_back(run("r" + std::to_string(k), runs.back().seed, a * v + b));
    }
    ASSERT_EQ(best_model(runs).run_name, best_model(scaled).run_name);
  }
}

TEST(Aggregate, SummarizesCommonLeaves) {
  const std::vector<RunRecord> rs{run("s2", 2, 0.9, 0.6), run("s1", 1, 0.8, 0.4)};
  const auto a = aggregate(rs);
  EXPECT_EQ(a.run_names, (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(a.best_run, "s2");
  const auto& val = a.metrics.at("val.strict.micro.entity.f1");
  EXPECT_NEAR(val.mean, 0.85, 1e-12);
  EXPECT_NEAR(val.uncertainty, 0.05, 1e-12);
  EXPECT_EQ(val.per_run, (std::vector<double>{0.8, 0.9}));
  EXPECT_NEAR(a.metrics.at("test.strict.micro.entity.f1").mean, 0.5, 1e-12);
}

TEST(Aggregate, Errors) {
  try {
    aggregate(std::vector<RunRecord>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyRunSet);
  }
  RunRecord bare;
  bare.run_name = "x";
  try {
    aggregate(std::vector<RunRecord>{bare});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingMetric);
  }
}

TEST(Persistence, SaveLoadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "seqlab_runs_test";
  std::filesystem::remove_all(dir);
  const auto a = run("alpha", 7, 0.5), b = run("beta", 8, 0.6);
  save_run_record(dir, a);
  save_run_record(dir, b);
  std::ofstream(dir / "aggregate.json") << "{}";
  const auto loaded = load_run_records(dir);
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].run_name, "alpha");
  EXPECT_EQ(loaded[1].seed, 8);
  EXPECT_EQ(loaded[1].reports, b.reports);
  std::ofstream(dir / "dup.json") << to_json(a).dump();
  EXPECT_THROW(load_run_records(dir), Error);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_run_records(dir), Error);
}
