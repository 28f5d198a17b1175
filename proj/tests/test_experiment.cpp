#include <cstdio>
#include <filesystem>
#include <fstream>
#include <variant>

#include <gtest/gtest.h>

#include "kmrate/experiment.hpp"

using namespace kmrate;
using namespace kmrate::experiment;

TEST(ScheduleSource, Generators) {
  const auto c = parse_schedule_source("const:0.25", 7, 0);
  EXPECT_EQ(c.size(), 7U);
  EXPECT_EQ(c.alpha(7), 0.25);
  EXPECT_EQ(parse_schedule_source("const:0.5:3", 100, 0).size(), 3U);

  const auto tb = parse_schedule_source("two-block:4,0.8", 0, 0);
  EXPECT_EQ(tb.size(), 8U);
  EXPECT_DOUBLE_EQ(tb.alpha(1), 0.2);
  EXPECT_DOUBLE_EQ(parse_schedule_source("two-block:10", 0, 0).alpha(1), km::sharpness_optimal_u() / 10.0);

  const auto r1 = parse_schedule_source("uniform-random:12", 0, 5);
  const auto r2 = parse_schedule_source("uniform-random", 12, 5);
  EXPECT_EQ(r1.size(), 12U);
  ASSERT_EQ(r2.size(), 12U);
  for (std::size_t k = 1; k <= 12; ++k) EXPECT_EQ(r1.alpha(k), r2.alpha(k));
  EXPECT_NE(parse_schedule_source("uniform-random:12", 0, 6).alpha(1), r1.alpha(1));

  const auto j = parse_schedule_source(R"(json:{"kind":"explicit","alphas":[0.1,0.9]})", 0, 0);
  EXPECT_EQ(j.size(), 2U);
  EXPECT_EQ(j.alpha(2), 0.9);
}

TEST(ScheduleSource, Files) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto text = dir / "kmrate_sched_test.txt";
  const auto js = dir / "kmrate_sched_test.json";
  {
    std::ofstream(text) << "# alphas\n0.1, 0.2\n0.3 0.4\n";
    std::ofstream(js) << "[0.5, 0.6]";
  }
  EXPECT_EQ(parse_schedule_source("file:" + text.string(), 0, 0).size(), 4U);
  EXPECT_EQ(parse_schedule_source("file:" + js.string(), 0, 0).alpha(2), 0.6);
  std::filesystem::remove(text);
  std::filesystem::remove(js);
  EXPECT_THROW(parse_schedule_source("file:/nonexistent/kmrate", 0, 0), SpecError);
}

TEST(ScheduleSource, Malformed) {
  EXPECT_THROW(parse_schedule_source("const:abc", 3, 0), SpecError);
  EXPECT_THROW(parse_schedule_source("const:1.5", 3, 0), SpecError);
  EXPECT_THROW(parse_schedule_source("two-block:x", 3, 0), SpecError);
  EXPECT_THROW(parse_schedule_source("bogus:1", 3, 0), SpecError);
  EXPECT_THROW(parse_schedule_source("json:{not json", 3, 0), SpecError);
  EXPECT_THROW(schedule_from_json(json{{"kind", "const"}}), SpecError);
}

TEST(OperatorSpec, Builds) {
  const auto rot = operator_from_json(json::parse(R"({"kind":"rotation","angle":1.5707963267948966})"));
  ASSERT_TRUE(std::holds_alternative<DenseExperiment>(rot));
  const auto& d = std::get<DenseExperiment>(rot);
  EXPECT_EQ(d.op.name, "rotation");
  EXPECT_EQ(*d.dist0, 1.0);

  const auto box = operator_from_json(json::parse(R"({"kind":"box_projection","lo":[0,0],"hi":[1,1],"x0":[4,1]})"));
  EXPECT_EQ(*std::get<DenseExperiment>(box).dist0, 3.0);

  const auto shift = operator_from_json(json::parse(R"({"kind":"shift_l1","x0":{"0":0.5,"2":0.25}})"));
  const auto& s = std::get<SequenceExperiment>(shift);
  EXPECT_EQ(s.x0[2], 0.25);
  EXPECT_EQ(*s.dist0, 0.75);
}

TEST(OperatorSpec, Rejects) {
  EXPECT_THROW(operator_from_json(json::parse(R"({"kind":"warp"})")), SpecError);
  EXPECT_THROW(operator_from_json(json::parse(R"({"kind":"rotation"})")), SpecError);
  EXPECT_THROW(operator_from_json(json::parse(R"({"kind":"linear","matrix":[[3,0],[0,1]]})")), SpecError);
  EXPECT_THROW(operator_from_json(json::parse(R"({"kind":"identity","dim":2,"x0":[1]})")), SpecError);
}
