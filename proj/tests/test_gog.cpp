#include <gtest/gtest.h>

#include "oneend/gog.hpp"

using namespace oneend;

namespace {

Word w(std::string_view s) { return Word::parse(s); }

GraphOfGroups dbl(int rank, std::initializer_list<const char*> words) {
  std::vector<Word> ws;
  for (const char* x : words) ws.push_back(w(x));
  return double_of(Basis(rank), ws);
}

// Two vertices glued along a proper power: <x, y | x^k = y^k> in rank 1.
GraphOfGroups amalgam(int rank, const char* word) {
  GraphOfGroups g;
  g.vertices = {{"left", rank}, {"right", rank}};
  g.edges = {{"e0", 0, 1, w(word), w(word)}};
  return g;
}

GraphOfGroups hnn_a_b() {
  GraphOfGroups g;
  g.vertices = {{"v", 2}};
  g.edges = {{"t", 0, 0, w("a"), w("b")}};
  return g;
}

}  // namespace

TEST(Validate, Examples) {
  EXPECT_TRUE(validate(dbl(2, {"abAB"})).empty());

  auto empty_word = dbl(2, {"abAB"});
  empty_word.edges[0].word_minus = Word();
  EXPECT_FALSE(validate(empty_word).empty());
  EXPECT_THROW(check_valid(empty_word), Error);

  GraphOfGroups split;
  split.vertices = {{"u", 2}, {"v", 2}};
  EXPECT_FALSE(validate(split).empty());

  auto leaves = dbl(2, {"abAB"});
  leaves.edges[0].word_plus = w("ac");
  EXPECT_FALSE(validate(leaves).empty());

  auto not_reduced = dbl(2, {"abAB"});
  not_reduced.edges[0].word_plus = w("baB");
  EXPECT_FALSE(validate(not_reduced).empty());
}

TEST(VertexPeripheralStructure, Examples) {
  const auto d = dbl(2, {"abAB"});
  const auto p = vertex_peripheral_structure(d, 0);
  ASSERT_EQ(p.size(), 1U);
  EXPECT_EQ(p.entries()[0].root, canonical_class(CyclicWord::parse("abAB")));

  GraphOfGroups loop;
  loop.vertices = {{"v", 2}};
  loop.edges = {{"t", 0, 0, w("aa"), w("bb")}};
  const auto q = vertex_peripheral_structure(loop, 0);
  ASSERT_EQ(q.size(), 2U);
  EXPECT_TRUE(q.contains(canonical_class(CyclicWord::parse("a"))));
  EXPECT_TRUE(q.contains(canonical_class(CyclicWord::parse("b"))));

  GraphOfGroups two;
  two.vertices = {{"u", 2}, {"x", 1}, {"y", 1}};
  two.edges = {{"e", 0, 1, w("aaa"), w("aa")}, {"f", 0, 2, w("aa"), w("aaa")}};
  EXPECT_EQ(vertex_peripheral_structure(two, 0).size(), 1U);
}

TEST(IsReduced, Examples) {
  EXPECT_TRUE(is_reduced(amalgam(1, "aa")));
  // Edge groups of a double are maximal cyclic, so the root a is onto F1.
  EXPECT_FALSE(is_reduced(dbl(1, {"aa"})));
  GraphOfGroups onto;
  onto.vertices = {{"u", 2}, {"x", 1}};
  onto.edges = {{"e", 0, 1, w("abAB"), w("a")}};
  EXPECT_FALSE(is_reduced(onto));
  ASSERT_EQ(reducedness_violations(onto).size(), 1U);
  EXPECT_EQ(reducedness_violations(onto)[0].side, 1);
  EXPECT_TRUE(is_reduced(dbl(2, {"a"})));
}

TEST(CollapseReduce, AbsorbsRankOneVertex) {
  GraphOfGroups chain;
  chain.vertices = {{"u", 2}, {"x", 1}, {"v", 2}};
  chain.edges = {{"e", 0, 1, w("abAB"), w("a")}, {"f", 1, 2, w("aa"), w("abAB")}};
  const auto r = collapse_reduce(chain);
  EXPECT_EQ(r.absorbed, std::vector<std::string>{"x"});
  ASSERT_EQ(r.graph.vertex_count(), 2);
  ASSERT_EQ(r.graph.edge_count(), 1);
  // The generator of x is abAB at u, so x^2 becomes (abAB)^2.
  EXPECT_EQ(r.graph.edges[0].word_plus, w("abABabAB"));
  EXPECT_TRUE(is_reduced(r.graph));
}

TEST(CollapseReduce, LeavesReducedGraphsAlone) {
  const auto d = dbl(2, {"abAB"});
  EXPECT_EQ(collapse_reduce(d).graph, d);
  const auto d1 = amalgam(1, "aa");
  EXPECT_EQ(collapse_reduce(d1).graph, d1);
  EXPECT_TRUE(collapse_reduce(d1).absorbed.empty());
}

TEST(DoubleOf, Examples) {
  const auto a = dbl(2, {"abAB"});
  EXPECT_EQ(a.vertex_count(), 2);
  EXPECT_EQ(a.edge_count(), 1);
  EXPECT_TRUE(is_double(a));
  EXPECT_EQ(dbl(2, {"a", "b", "ab"}).edge_count(), 3);
  EXPECT_EQ(dbl(1, {"aa"}).edge_count(), 1);
  // Conjugate and repeated classes collapse to one edge.
  EXPECT_EQ(dbl(2, {"abAB", "bABa", "BAba"}).edge_count(), 1);
  EXPECT_FALSE(is_double(hnn_a_b()));
}

TEST(Presentation, Counts) {
  const auto d = presentation(dbl(2, {"abAB"}));
  EXPECT_EQ(d.presentation.generator_count(), 4);
  EXPECT_EQ(d.presentation.relators.size(), 1U);

  GraphOfGroups single;
  single.vertices = {{"v", 3}};
  const auto s = presentation(single);
  EXPECT_EQ(s.presentation.generator_count(), 3);
  EXPECT_TRUE(s.presentation.relators.empty());

  const auto h = presentation(hnn_a_b());
  EXPECT_EQ(h.presentation.generator_count(), 3);
  ASSERT_EQ(h.presentation.relators.size(), 1U);
  EXPECT_EQ(h.presentation.relators[0], Word::reduced({3, 1, -3, -2}));
}

TEST(Presentation, AbelianInvariants) {
  // Closed genus-2 surface.
  EXPECT_EQ(abelian_invariants(presentation(dbl(2, {"abAB"})).presentation), (AbelianInvariants{4, {}}));
  // F2 *_{a^2} F2, and the double along the root a.
  EXPECT_EQ(abelian_invariants(presentation(amalgam(2, "aa")).presentation), (AbelianInvariants{3, {2}}));
  EXPECT_EQ(abelian_invariants(presentation(dbl(2, {"aa"})).presentation), (AbelianInvariants{3, {}}));
  EXPECT_EQ(abelian_invariants(presentation(hnn_a_b()).presentation), (AbelianInvariants{2, {}}));
  // Z *_{2Z} Z with both sides squared: <x, y | x^2 = y^2>.
  EXPECT_EQ(abelian_invariants(presentation(amalgam(1, "aa")).presentation), (AbelianInvariants{1, {2}}));
}

TEST(IsOneEnded, Examples) {
  EXPECT_TRUE(is_one_ended(dbl(2, {"abAB"})).one_ended);
  EXPECT_FALSE(is_one_ended(dbl(2, {"aa"})).one_ended);
  EXPECT_FALSE(is_one_ended(hnn_a_b()).one_ended);
  EXPECT_TRUE(is_one_ended(dbl(2, {"aabbAB"})).one_ended);
  // Z *_Z Z collapses to Z, which has two ends.
  EXPECT_FALSE(is_one_ended(dbl(1, {"a"})).one_ended);
}

TEST(IsOneEnded, ReportsWitnessPerVertex) {
  const auto r = is_one_ended(dbl(2, {"aa"}));
  ASSERT_EQ(r.vertices.size(), 2U);
  for (const auto& v : r.vertices) {
    EXPECT_FALSE(v.witness.indecomposable);
    EXPECT_FALSE(v.witness.partition.empty());
  }
}
