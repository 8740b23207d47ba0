#include "rieszgreen/scenario.hpp"

#include <gtest/gtest.h>

using namespace rieszgreen;
using scenario::json;

namespace {

std::filesystem::path demo(const std::string& name) { return std::filesystem::path(RIESZGREEN_DEMOS_DIR) / name; }

ErrorKind kind_of(const json& doc) {
  try {
    scenario::parse(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error";
  return ErrorKind::invariant;
}

json base() {
  return json::parse(R"({
    "task": "gauss", "dim": 3, "alpha": 2.0,
    "geometry": {"parts": [{"name": "line", "generator": "points",
                            "coords": [[0,0,0],[1,0,0],[-1,0,0],[2,0,0]]}]},
    "regions": {"f": {"indices": [0, 1]}},
    "theta": [{"index": 2, "mass": 0.6}, {"index": 3, "mass": 0.2}]
  })");
}

}  // namespace

TEST(Scenario, DemoConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(RIESZGREEN_DEMOS_DIR))
    if (entry.path().extension() == ".json") EXPECT_NO_THROW(scenario::load(entry.path())) << entry.path();
}

TEST(Scenario, UnknownFieldsAreRejectedWithPath) {
  json doc = base();
  doc["geometry"]["parts"][0]["radius"] = 1.0;
  try {
    scenario::parse(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("config.geometry.parts[0].radius"), std::string::npos);
  }
  doc = base();
  doc["options"] = {{"gauss", {{"check_uniqness", true}}}};
  EXPECT_EQ(kind_of(doc), ErrorKind::config);
}

TEST(Scenario, MalformedValues) {
  json doc = base();
  doc["task"] = "bogus";
  EXPECT_EQ(kind_of(doc), ErrorKind::config);
  doc = base();
  doc["alpha"] = "two";
  EXPECT_EQ(kind_of(doc), ErrorKind::config);
  doc = base();
  doc["regions"]["f"] = {{"indices", {0, 9}}};
  EXPECT_EQ(kind_of(doc), ErrorKind::config);
  doc = base();
  doc["regions"]["f"] = {{"all", true}};
  EXPECT_EQ(kind_of(doc), ErrorKind::validation);
  doc = base();
  doc["alpha"] = 2.5;
  EXPECT_EQ(kind_of(doc), ErrorKind::validation);
}

TEST(Scenario, PredicatesCompose) {
  json doc = base();
  doc["regions"]["f"] = {{"all_of", json::array({{{"half_space", {{"normal", {1, 0, 0}}, {"offset", 0}}}},
                                                 {{"radius_band", {{"max", 1.0}}}}})}};
  const auto cfg = scenario::parse(doc);
  EXPECT_EQ(cfg.target, (IndexSet{0, 1}));
  doc["regions"]["f"] = {{"not", {{"indices", {2, 3}}}}};
  EXPECT_EQ(scenario::parse(doc).target, (IndexSet{0, 1}));
}

TEST(Scenario, ThetaAtSnapsToNearestPoint) {
  json doc = base();
  doc["theta"] = json::array({{{"at", {-0.9, 0.1, 0}}, {"mass", 0.5}}});
  const auto cfg = scenario::parse(doc);
  EXPECT_DOUBLE_EQ(cfg.theta[2], 0.5);
  EXPECT_DOUBLE_EQ(cfg.theta.sum(), 0.5);
}

TEST(Scenario, GaussHandConfigReport) {
  const auto cfg = scenario::load(demo("gauss_collinear.json"));
  const auto out = scenario::execute(cfg);
  EXPECT_TRUE(out.passed());
  const json r = scenario::full_report(cfg, out);
  EXPECT_NEAR(r["results"]["c_constant"].get<double>(), 0.9, 1e-12);
  EXPECT_EQ(r["version"], 1);
  for (const auto& inv : r["invariants"]) EXPECT_TRUE(inv.contains("tolerance"));
}

TEST(Scenario, CapacityHandConfig) {
  const auto out = scenario::execute(scenario::load(demo("capacity_two_points.json")));
  EXPECT_NEAR(out.report["results"]["capacity"].get<double>(), 0.4, 1e-12);
}

TEST(Scenario, OutputsAreDeterministic) {
  const auto cfg = scenario::load(demo("gauss_sphere.json"));
  const auto a = scenario::execute(cfg), b = scenario::execute(cfg);
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t k = 0; k < a.tables.size(); ++k) EXPECT_EQ(a.tables[k].to_csv(), b.tables[k].to_csv());
  EXPECT_EQ(scenario::full_report(cfg, a).dump(), scenario::full_report(cfg, b).dump());
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, (k % 40) - 20);
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
}
