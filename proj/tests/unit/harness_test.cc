#include <gtest/gtest.h>

#include "dexp/harness.h"
#include "props.h"

namespace dexp {
namespace {

const std::filesystem::path kAssets = DEXP_TEST_ASSETS;

std::shared_ptr<CountingLibrary> counter() {
  return std::make_shared<CountingLibrary>(props::bundled(kAssets));
}

TEST(EditScript, JsonShape) {
  auto s = EditScript::from_json(nlohmann::json::parse(
      R"j([{"text": "1"}, {"text": "math.add(1, 2)", "label": "x"}])j"));
  ASSERT_EQ(s.steps.size(), 2u);
  EXPECT_EQ(s.steps[0].label, "");
  EXPECT_EQ(s.steps[1].label, "x");
  EXPECT_EQ(EditScript::from_json(s.to_json()).steps[1].text, "math.add(1, 2)");
  EXPECT_THROW(EditScript::from_json(nlohmann::json::parse("{}")), std::runtime_error);
  EXPECT_THROW(EditScript::from_json(nlohmann::json::parse(R"j([{"label": "a"}])j")),
               std::runtime_error);
  EXPECT_THROW(EditScript::from_json(nlohmann::json::parse(R"j([{"text": 3}])j")),
               std::runtime_error);
  EXPECT_THROW(EditScript::load(kAssets / "nope.json"), std::runtime_error);
}

TEST(Strategy, Names) {
  for (auto s : {Strategy::kCbv, Strategy::kLazy, Strategy::kLive}) {
    EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  }
  EXPECT_EQ(strategy_name(Strategy::kLive), "live");
  EXPECT_FALSE(parse_strategy("eager"));
}

TEST(Replay, StrategiesAgreeOnValues) {
  auto script = EditScript::load(kAssets / "scripts/image_edits.json");
  auto c = counter();
  auto cbv = replay(script, Strategy::kCbv, c);
  auto lazy = replay(script, Strategy::kLazy, c);
  auto live = replay(script, Strategy::kLive, c);
  ASSERT_EQ(cbv.size(), 38u);
  ASSERT_EQ(lazy.size(), 38u);
  ASSERT_EQ(live.size(), 38u);
  for (std::size_t i = 0; i < cbv.size(); ++i) {
    EXPECT_EQ(cbv[i].step, i + 1);
    EXPECT_EQ(cbv[i].parse_ok, live[i].parse_ok);
    EXPECT_EQ(cbv[i].values, lazy[i].values) << "step " << i + 1;
    EXPECT_EQ(cbv[i].values, live[i].values) << "step " << i + 1;
    if (!cbv[i].parse_ok) EXPECT_EQ(live[i].total_calls, 0u);
  }
}

TEST(Replay, LabelledStepsAndCallCounts) {
  auto script = EditScript::load(kAssets / "scripts/image_edits.json");
  auto live = replay(script, Strategy::kLive, counter());
  std::map<std::string, std::size_t> by_label;
  for (const auto& r : live) {
    if (!r.label.empty()) by_label[r.label] = image_calls(r);
  }
  std::map<std::string, std::size_t> want{{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1},
                                          {"e", 0}, {"f", 1}, {"g", 1}, {"h", 0}};
  EXPECT_EQ(by_label, want);
  auto cbv = replay(script, Strategy::kCbv, counter());
  std::size_t cbv_total = 0, live_total = 0;
  for (const auto& r : cbv) cbv_total += image_calls(r);
  for (const auto& r : live) live_total += image_calls(r);
  EXPECT_LT(live_total, cbv_total);
}

TEST(Replay, CountsOnlyTheStep) {
  EditScript s;
  s.steps = {{"data.sum()", ""}, {"data.sum()", ""}, {"data.sum()\nmath.add(1, 2)", ""}};
  auto cbv = replay(s, Strategy::kCbv, counter());
  EXPECT_EQ(cbv[1].total_calls, 1u);
  EXPECT_EQ(cbv[2].total_calls, 2u);
  auto live = replay(s, Strategy::kLive, counter());
  EXPECT_EQ(live[0].total_calls, 1u);
  EXPECT_EQ(live[1].total_calls, 0u);
  EXPECT_EQ(live[2].calls, (std::map<std::string, std::size_t>{{"add", 1}}));
}

StepReport report(std::size_t step, Strategy s, double ms) {
  StepReport r;
  r.step = step;
  r.strategy = s;
  r.ms = ms;
  return r;
}

TEST(Summary, SlowHistogramKeepsWholeSteps) {
  std::vector<StepReport> rs = {report(1, Strategy::kCbv, 1),
                                report(2, Strategy::kCbv, 20),
                                report(2, Strategy::kLive, 2)};
  auto s = summarize(rs, 15);
  EXPECT_EQ(s.all.entries(), 3u);
  EXPECT_EQ(s.slow.entries(), 2u);
  EXPECT_EQ(s.slow.counts["live"][0], 1u);
  EXPECT_EQ(s.all.counts["cbv"][0], 1u);
  EXPECT_EQ(s.all.counts["cbv"][2], 1u);
  auto empty = summarize({}, 15);
  EXPECT_EQ(empty.all.entries(), 0u);
  EXPECT_EQ(empty.csv, csv_header() + "\n");
}

TEST(Csv, HeaderAndQuoting) {
  EXPECT_EQ(csv_header(), "step,label,strategy,ms,total_calls,calls_json");
  StepReport r = report(3, Strategy::kLazy, 1.23456);
  r.label = "d";
  r.calls = {{"blur", 1}, {"load", 2}};
  r.total_calls = 3;
  EXPECT_EQ(csv_row(r), "3,d,lazy,1.235,3,\"{\"\"blur\"\":1,\"\"load\"\":2}\"");
  r.label = "a,b";
  EXPECT_EQ(csv_row(r).substr(0, 8), "3,\"a,b\",");
}

TEST(Histogram, EdgesAreIncreasing) {
  const auto& e = default_edges();
  ASSERT_GE(e.size(), 2u);
  EXPECT_EQ(e.front(), 0);
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_LT(e[i - 1], e[i]);
  EXPECT_TRUE(std::isinf(e.back()));
}

}  // namespace
}  // namespace dexp
