#include "bushy/harness.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

namespace bushy {
namespace {

using json = nlohmann::ordered_json;

ExperimentSpec spec_of(const json& j) { return parse_spec(j); }

const Statistic& stat(const StatsReport& r, const std::string& name) {
  for (const auto& s : r.stats) {
    if (s.name == name) return s;
  }
  throw std::out_of_range(name);
}

TEST(Harness, KindNamesRoundTrip) {
  for (auto k : {ExperimentKind::kWalkBound, ExperimentKind::kFireworksTrap,
                 ExperimentKind::kDncBounded, ExperimentKind::kDncUnbounded,
                 ExperimentKind::kFamilyAudit, ExperimentKind::kLemmaSuite}) {
    EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_experiment_kind("walk"));
}

TEST(Harness, ZeroGrowthNeverHits) {
  const auto r = run_experiment(
      spec_of({{"kind", "walk-bound"}, {"trials", 200}, {"payload", {{"g", 0}, {"depth", 5}}}}));
  EXPECT_EQ(stat(r, "avoidance").successes, 200u);
  EXPECT_DOUBLE_EQ(stat(r, "avoidance").frequency, 1.0);
  EXPECT_TRUE(r.pass);
}

TEST(Harness, WalkMatchesPlantedProbability) {
  // g = 2, h(n) = 2^(n+4): the planted set is hit with probability 1 - prod(1 - 1/h(i)).
  const auto r = run_experiment(spec_of({{"kind", "walk-bound"}, {"trials", 20000}, {"seed", 3}}));
  const double exact = (1 - 1.0 / 16) * (1 - 1.0 / 32) * (1 - 1.0 / 64);
  const auto& s = stat(r, "avoidance");
  EXPECT_NEAR(s.frequency, exact, 4 * std::sqrt(exact * (1 - exact) / 20000));
  EXPECT_EQ(to_string(s.bound), "3255/4096");
  EXPECT_TRUE(r.pass);
}

TEST(Harness, ReportsAreDeterministicAcrossWorkerCounts) {
  json base = {{"kind", "fireworks-trap"},
               {"trials", 60},
               {"seed", 11},
               {"payload", {{"requirements", 6}, {"replay_seeds", 4}}}};
  base["workers"] = 1;
  const auto a = run_experiment(spec_of(base));
  base["workers"] = 3;
  const auto b = run_experiment(spec_of(base));
  EXPECT_EQ(report_json(a, false), report_json(b, false));
  EXPECT_EQ(report_csv(a, false), report_csv(b, false));
  base["seed"] = 12;
  EXPECT_NE(report_json(run_experiment(spec_of(base)), false), report_json(a, false));
}

TEST(Harness, DncBoundedSmallRun) {
  const auto r = run_experiment(spec_of({{"kind", "dnc-bounded"},
                                         {"trials", 30},
                                         {"seed", 5},
                                         {"workers", 1},
                                         {"payload", {{"depth", 12}, {"traps", 3}, {"audit_trials", 5}}}}));
  EXPECT_EQ(stat(r, "audit").trials, 5u);
  EXPECT_TRUE(stat(r, "audit").pass);
  EXPECT_EQ(stat(r, "dnc").trials, 30u);
}

TEST(Harness, UnboundedDefaultIsThreeBranch) {
  const auto r = run_experiment(spec_of({{"kind", "dnc-unbounded"}, {"trials", 3}}));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(stat(r, "met-given-not-stuck").successes, 3u);
  bool saw = false;
  for (const auto& [k, v] : r.details) {
    if (k == "step b.3.ii") {
      saw = true;
      EXPECT_EQ(v, "6");
    }
  }
  EXPECT_TRUE(saw);
}

TEST(Harness, FamilyAuditExact) {
  const auto r = run_experiment(spec_of({{"kind", "family-audit"}}));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(stat(r, "threshold-decreasing").pass);
}

TEST(Harness, ConfigErrorsNameTheField) {
  auto field_of = [](const json& j) -> std::string {
    try {
      run_experiment(parse_spec(j));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  EXPECT_EQ(field_of({{"trials", 1}}), "config.kind");
  EXPECT_EQ(field_of({{"kind", "nope"}}), "config.kind");
  EXPECT_EQ(field_of({{"kind", "walk-bound"}, {"trails", 1}}), "config.trails");
  EXPECT_EQ(field_of({{"kind", "walk-bound"}, {"trials", -1}}), "config.trials");
  EXPECT_EQ(field_of({{"kind", "walk-bound"}, {"payload", {{"depth", "3"}}}}), "payload.depth");
  EXPECT_EQ(field_of({{"kind", "walk-bound"}, {"payload", {{"g", 100}, {"h_offset", 0}}}}),
            "payload.g");
  EXPECT_EQ(field_of({{"kind", "dnc-bounded"},
                      {"payload", {{"roster", json::array({{{"gamma", "bogus"}}})}}}}),
            "payload.roster[0].gamma");
  EXPECT_EQ(field_of({{"kind", "dnc-bounded"}, {"payload", {{"budgets", {{"steps", 1}}}}}}),
            "payload.budgets.steps");
  EXPECT_EQ(field_of({{"kind", "dnc-bounded"}, {"payload", {{"mode", "exact"}}}}), "payload.mode");
  EXPECT_EQ(field_of({{"kind", "dnc-unbounded"}, {"payload", {{"roster", default_payload(ExperimentKind::kDncUnbounded)["roster"]},
                                   {"n2", {{"0-1", 2}}}}}}),
            "payload.n2.0-1");
  EXPECT_EQ(field_of({{"kind", "family-audit"}, {"payload", {{"boost", {-1}}}}}), "payload");
}

TEST(Harness, CsvAndJsonAgreeOnNumbers) {
  const auto r = run_experiment(spec_of({{"kind", "walk-bound"}, {"trials", 777}, {"seed", 9}}));
  const json j = json::parse(report_json(r));
  const std::string csv = report_csv(r);
  const auto& s = j["statistics"][0];
  const std::string row = "walk-bound,9,avoidance,at_least,777," + s["successes"].dump() + "," +
                          s["frequency"].dump() + ",3255/4096," + s["bound_decimal"].dump() +
                          "," + s["sigma"].dump() + "," + s["margin"].dump() + ",";
  EXPECT_NE(csv.find(row), std::string::npos) << csv;
  EXPECT_NE(csv.find("wall_clock_seconds,"), std::string::npos);
  EXPECT_EQ(report_csv(r, false).find("wall_clock"), std::string::npos);
}

TEST(Harness, StatisticVerdicts) {
  EXPECT_TRUE(make_statistic("x", Direction::kAtLeast, 100, 50, Rational(1, 2), 3).pass);
  EXPECT_FALSE(make_statistic("x", Direction::kAtLeast, 10000, 4000, Rational(1, 2), 3).pass);
  EXPECT_TRUE(make_statistic("x", Direction::kAtMost, 10000, 5100, Rational(1, 2), 3).pass);
  EXPECT_FALSE(make_statistic("x", Direction::kAll, 3, 2, 1, 3).pass);
  EXPECT_DOUBLE_EQ(make_statistic("x", Direction::kAtMost, 100, 0, Rational(1, 4), 2).margin,
                   2 * std::sqrt(0.25 * 0.75 / 100));
}

TEST(Harness, AdversarialRosterShape) {
  const json r = adversarial_roster(2);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0]["gamma"], "fixed-emitter:111:1");
  EXPECT_EQ(r[1]["gamma"], "fixed-emitter:1111:1");
  EXPECT_EQ(r[2]["gamma"], "everywhere-partial");
  const BoundedConfig c = bounded_config_from_payload({{"traps", 2}});
  EXPECT_EQ(c.roster.size(), 3u);
  EXPECT_EQ(c.roster[2].first_attention, 1u);
}

}  // namespace
}  // namespace bushy
