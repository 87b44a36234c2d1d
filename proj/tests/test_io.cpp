#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "oneend/io.hpp"
#include "support.hpp"

using namespace oneend;
using oneend::io::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(ONEEND_DATA_DIR) + "/" + name);
  return json::parse(in);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Contract;
}

}  // namespace

TEST(GogJson, DataFilesRoundTrip) {
  for (const char* name : {"double_abAB.json", "double_aa.json", "hnn_a_b.json", "double_aabbAB.json", "rigid_pair.json"}) {
    const auto g = io::gog_from_json(load(name));
    EXPECT_EQ(io::gog_from_json(io::to_json(g)), g) << name;
  }
}

TEST(GogJson, IntegerEndpointsAccepted) {
  const json j = json::parse(R"({"vertices":[{"name":"v","rank":2}],
      "edges":[{"name":"t","from":0,"to":0,"word_plus":"a","word_minus":"b"}]})");
  const auto g = io::gog_from_json(j);
  EXPECT_EQ(g.edges[0].from, 0);
  EXPECT_EQ(g.edges[0].word_minus.str(), "b");
}

TEST(GogJson, MalformedInputIsAValidationError) {
  EXPECT_EQ(kind_of([] { io::gog_from_json(json::parse(R"({"vertices":[]})")); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] {
              io::gog_from_json(json::parse(R"({"vertices":[{"name":"v","rank":2}],
                  "edges":[{"name":"t","from":"w","to":"v","word_plus":"a","word_minus":"b"}]})"));
            }),
            ErrorKind::Validation);
  EXPECT_EQ(kind_of([] {
              io::gog_from_json(json::parse(R"({"vertices":[{"name":"v","rank":2}],
                  "edges":[{"name":"t","from":"v","to":"v","word_plus":"a","word_minus":""}]})"));
            }),
            ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { io::gog_from_json(json::parse(R"({"vertices":[{"name":"v","rank":"two"}],"edges":[]})")); }),
            ErrorKind::Validation);
}

TEST(CoverJson, RoundTripAndValidation) {
  const auto c = io::cover_from_json(load("cover_deg3.json"));
  EXPECT_EQ(c.degree(), 3);
  EXPECT_EQ(io::cover_from_json(io::to_json(c)), c);
  EXPECT_EQ(kind_of([] { io::cover_from_json(json::parse(R"({"perms":{"a":[1,1]}})")); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { io::cover_from_json(json::parse(R"({"degree":3,"perms":{"a":[2,1]}})")); }),
            ErrorKind::Validation);
  // Not transitive.
  EXPECT_EQ(kind_of([] { io::cover_from_json(json::parse(R"({"perms":{"a":[1,2],"b":[1,2]}})")); }),
            ErrorKind::Validation);
}

TEST(PeripheralJson, RoundTrip) {
  const auto p = make_peripheral_structure(std::vector<Word>{Word::parse("aabbAB"), Word::parse("ba"), Word::parse("aaa")});
  EXPECT_EQ(io::peripheral_from_json(io::to_json(p)), p);
}

TEST(PreCoverJson, RoundTripKeepsMatchingAndHanging) {
  const auto g = io::gog_from_json(load("double_abAB.json"));
  const auto c = io::cover_from_json(load("cover_deg3.json"));
  const auto n = elevations(c, CyclicWord::parse("abAB")).size();
  std::vector<Match> matches;
  for (int i = 0; i + 1 < static_cast<int>(n); ++i) matches.push_back({{0, 0, 0, i}, {1, 0, 1, i}});
  const auto p = glue(g, {c}, {{0, 0}, {1, 0}}, matches);
  const json j = io::to_json(p);
  const auto q = io::precover_from_json(j);
  EXPECT_EQ(q.matches(), p.matches());
  EXPECT_EQ(q.copies(), p.copies());
  EXPECT_EQ(q.hanging(), p.hanging());
  EXPECT_EQ(io::to_json(q), j);

  json tampered = j;
  tampered["hanging"] = json::array();
  EXPECT_EQ(kind_of([&] { io::precover_from_json(tampered); }), ErrorKind::Validation);
}

TEST(BuildBundle, ReplaysFromText) {
  const auto g = io::gog_from_json(load("double_aabbAB.json"));
  const auto r = build_one_ended_subgroup(g, 0);
  const std::string text = io::to_json(r, g, 0).dump();
  const json bundle = json::parse(text);
  const auto replay = io::replay_bundle(bundle);
  EXPECT_TRUE(replay.ok);
  EXPECT_TRUE(replay.mismatches.empty());
  EXPECT_EQ(bundle.at("certificates").size(), 3U);
  EXPECT_EQ(bundle.at("certificates")[0].at("kind"), "MONOMORPHISM");

  // Forged evidence is caught.
  json forged = bundle;
  forged["certificates"][1]["holds"] = false;
  EXPECT_FALSE(io::replay_bundle(forged).ok);
}

TEST(Dot, MarksBasepointAndHanging) {
  const auto c = io::cover_from_json(load("cover_deg3.json"));
  const auto dot = io::to_dot(c);
  EXPECT_NE(dot.find("doublecircle"), std::string::npos);
  const auto g = io::gog_from_json(load("double_abAB.json"));
  const auto p = glue(g, {c}, {{0, 0}, {1, 0}}, {});
  EXPECT_NE(io::to_dot(p).find("dashed"), std::string::npos);
}
