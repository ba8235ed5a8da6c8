#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mst/json_export.hpp"

using namespace mst;
using namespace fixtures;

TEST(Json, DocumentCarriesSchemaFirst) {
  auto doc = document("mst.process/1", to_json(p_nil()));
  ASSERT_TRUE(doc.is_object());
  EXPECT_EQ(doc.begin().key(), "schema");
  EXPECT_EQ(doc["schema"], "mst.process/1");
}

TEST(Json, ProcessNodes) {
  auto j = to_json(parse_process("(new u : !(Int).end)(u!(5).0 | ~u?(x).0)"));
  EXPECT_EQ(j["node"], "new");
  auto dump = j.dump();
  for (const char* node : {"\"par\"", "\"out\"", "\"in\"", "\"nil\"", "\"int\""})
    EXPECT_NE(dump.find(node), std::string::npos) << node;
}

TEST(Json, TypeNodes) {
  auto j = to_json(parse_session_type("mu t.?(Int).!(Bool).t"));
  EXPECT_EQ(j["node"], "mu");
  auto dump = j.dump();
  for (const char* node : {"\"recv\"", "\"send\"", "\"tvar\"", "\"bool\""})
    EXPECT_NE(dump.find(node), std::string::npos) << node;
}

TEST(Json, TraceEvents) {
  auto t = run(parse_process("(new u : !(Int).end)(u!(5).0 | ~u?(x).0)"), 10);
  ASSERT_EQ(t.events.size(), 1u);
  auto j = to_json(t.events[0]);
  EXPECT_EQ(j["kind"], "pass");
  EXPECT_TRUE(j.contains("subject"));
  EXPECT_EQ(j["payload"].size(), 1u);
  EXPECT_EQ(j["administrative"], false);
}

TEST(Json, SelectEventHasLabel) {
  auto s = source(kMathServer);
  auto obs = observable_trace(s.process, 100);
  ASSERT_FALSE(obs.empty());
  auto j = to_json(obs[0]);
  EXPECT_EQ(j["kind"], "select");
  EXPECT_EQ(j["label"], "add");
}

TEST(Json, MetricsWithoutComposedCounts) {
  auto s = source(kMathServer);
  auto j = to_json(metrics(s.process, s.env.delta));
  EXPECT_TRUE(j["degree_composed"].is_null());
  EXPECT_EQ(j["degree_opt"], 7);
}

TEST(Json, RoundTripsThroughText) {
  auto s = source(kDelegation, kDelegationEnv);
  auto j = to_json(s.env);
  EXPECT_EQ(Json::parse(j.dump()), j);
}
