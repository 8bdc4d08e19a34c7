#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "teleop/report.hpp"
#include "teleop/scenario.hpp"

namespace teleop {
namespace {

AnalysisReport sample_report() {
  const auto sc = load_scenario(std::filesystem::path(TELEOP_SOURCE_DIR) / "scenarios" /
                                "paper_sec4.cfg");
  auto rep = make_report(sc, analyze(analysis_system(sc), sc.channel, sc.analysis));
  SimVerdict v;
  v.bounded = false;
  v.max_abs_position = std::numeric_limits<double>::infinity();
  v.final_velocity_max = 0.1 / 3.0;
  v.divergence_time = 3.2;
  rep.simulation = v;
  PeriodSearch ps;
  ps.status = BracketStatus::Crossing;
  ps.period = 0.123456789;
  ps.pass_at_lo = false;
  ps.pass_at_hi = true;
  ps.bracket_lo = 0.1234;
  ps.bracket_hi = 0.1235;
  ps.iterations = 13;
  rep.period_search = ps;
  rep.period_criterion = Criterion::SmallGain;
  return rep;
}

TEST(Report, JsonRoundTrip) {
  const auto rep = sample_report();
  const std::string text = to_json(rep);
  EXPECT_NE(text.find("\"schema_version\": 1"), std::string::npos);
  EXPECT_NE(text.find("\"units\""), std::string::npos);
  const auto back = report_from_json(text);
  EXPECT_TRUE(back == rep);
  EXPECT_EQ(back.stability.small_gain_value, rep.stability.small_gain_value);
  EXPECT_EQ(back.provenance.scenario_hash.size(), 16u);
}

TEST(Report, OptionalPartsMayBeAbsent) {
  auto rep = sample_report();
  rep.simulation.reset();
  rep.period_search.reset();
  rep.period_criterion.reset();
  EXPECT_TRUE(report_from_json(to_json(rep, -1)) == rep);
}

TEST(Report, SchemaMismatchRejected) {
  std::string text = to_json(sample_report());
  text.replace(text.find("\"schema_version\": 1"), 19, "\"schema_version\": 99");
  EXPECT_THROW(report_from_json(text), ParseError);
  EXPECT_THROW(report_from_json("{ not json"), ParseError);
  EXPECT_THROW(report_from_json("{}"), ParseError);
}

TEST(Report, SweepTable) {
  std::vector<SweepRow> rows(2);
  rows[0].T = 0.006;
  rows[0].report = StabilityReport{};
  rows[0].verdict = SimVerdict{};
  rows[1].T = 0.01;
  rows[1].error = "bad, row";
  const std::string csv = sweep_table_csv(rows);
  EXPECT_EQ(csv.rfind("T,small_gain_value,small_gain_pass,eq21_bound,eq21_pass,bounded,"
                      "max_abs_position,settling_ok,final_velocity_max,error\n",
                      0),
            0u);
  EXPECT_NE(csv.find("0.01,,,,,,,,,bad; row\n"), std::string::npos);
}

}  // namespace
}  // namespace teleop
