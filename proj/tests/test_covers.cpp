#include <gtest/gtest.h>

#include <random>

#include "oneend/covers.hpp"
#include "support.hpp"

using namespace oneend;

namespace {

Word w(std::string_view s) { return Word::parse(s); }

GraphOfGroups dbl(std::initializer_list<const char*> words) {
  std::vector<Word> ws;
  for (const char* x : words) ws.push_back(w(x));
  return double_of(Basis(2), ws);
}

GraphOfGroups hnn_a_b() {
  GraphOfGroups g;
  g.vertices = {{"v", 2}};
  g.edges = {{"t", 0, 0, w("a"), w("b")}};
  return g;
}

CoverGraph kernel_a() { return CoverGraph::from_perms({{1, 0}, {0, 1}}); }

PreCover mirror(const GraphOfGroups& g, const CoverGraph& c) {
  auto r = extend_to_cover(g, 0, c);
  return std::move(r.result->cover);
}

// Euler characteristic of the presentation complex: 1 - generators + relators.
long euler(const Presentation& p) {
  return 1 - static_cast<long>(p.generator_count()) + static_cast<long>(p.relators.size());
}

const BuildResult& rigid_build() {
  static const BuildResult r = build_one_ended_subgroup(dbl({"aabbAB"}), 0);
  return r;
}

}  // namespace

TEST(Glue, ValidMirrorAndHanging) {
  const auto g = dbl({"abAB"});
  const auto c = kernel_a();
  const auto elev = elevations(c, CyclicWord::parse("abAB"));
  ASSERT_EQ(elev.size(), 2U);
  std::vector<Match> all;
  for (int i = 0; i < 2; ++i) all.push_back({{0, 0, 0, i}, {1, 0, 1, i}});
  const auto full = glue(g, {c}, {{0, 0}, {1, 0}}, all);
  EXPECT_TRUE(full.is_cover());
  EXPECT_TRUE(full.connected());

  const auto partial = glue(g, {c}, {{0, 0}, {1, 0}}, {all[0]});
  EXPECT_EQ(partial.hanging().size(), 2U);

  const auto bare = glue(g, {c}, {{0, 0}, {1, 0}}, {});
  EXPECT_EQ(bare.hanging().size(), 4U);
  EXPECT_FALSE(bare.connected());
}

TEST(Glue, RejectsInconsistentMatches) {
  const auto g = dbl({"aa"});
  // aa has two elevations of degree 2 in the first cover, degree 1 in the second.
  const auto swap_aa = CoverGraph::from_perms({{1, 2, 3, 0}, {1, 0, 3, 2}});
  const auto b_kernel = CoverGraph::from_perms({{0, 1}, {1, 0}});
  ASSERT_EQ(elevations(swap_aa, CyclicWord::parse("aa"))[0].degree, 2);
  ASSERT_EQ(elevations(b_kernel, CyclicWord::parse("aa"))[0].degree, 1);
  const auto c4 = CoverGraph::from_perms({{1, 0, 3, 2}, {2, 3, 0, 1}});
  try {
    glue(g, {swap_aa, b_kernel}, {{0, 0}, {1, 1}}, {{{0, 0, 0, 0}, {1, 0, 1, 0}}});
    FAIL() << "degree mismatch accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
  }
  // Wrong sides, unknown index, double use.
  EXPECT_THROW(glue(g, {c4}, {{0, 0}, {1, 0}}, {{{0, 0, 1, 0}, {1, 0, 0, 0}}}), Error);
  EXPECT_THROW(glue(g, {c4}, {{0, 0}, {1, 0}}, {{{0, 0, 0, 9}, {1, 0, 1, 0}}}), Error);
  EXPECT_THROW(glue(g, {c4}, {{0, 0}, {1, 0}}, {{{0, 0, 0, 0}, {1, 0, 1, 0}}, {{0, 0, 0, 0}, {1, 0, 1, 1}}}), Error);
  // A copy of vertex 0 cannot host the - end of the edge.
  EXPECT_THROW(glue(g, {c4}, {{0, 0}, {0, 0}}, {{{0, 0, 0, 0}, {1, 0, 1, 0}}}), Error);
}

TEST(ElevationTable, Examples) {
  const auto p = mirror(dbl({"abAB"}), kernel_a());
  int plus = 0, minus = 0;
  for (const auto& row : elevation_table(p)) {
    (row.id.side == 0 ? plus : minus) += row.degree;
    EXPECT_TRUE(row.matched);
  }
  EXPECT_EQ(plus, 2);
  EXPECT_EQ(minus, 2);

  const auto g = dbl({"abAB", "aab"});
  const auto one = glue(g, {CoverGraph::rose(2)}, {{0, 0}, {1, 0}}, {});
  const auto rows = elevation_table(one);
  ASSERT_EQ(rows.size(), 4U);
  for (const auto& row : rows) {
    EXPECT_EQ(row.degree, 1);
    EXPECT_FALSE(row.matched);
  }
}

TEST(ElevationTable, ConservationOnRandomCovers) {
  std::mt19937_64 rng(oracle::seed() + 40);
  const auto g = dbl({"aabbAB", "ab"});
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = CoverGraph::from_perms(oracle::random_transitive_perms(rng, 2, 1 + trial % 5));
    const auto p = glue(g, {c}, {{0, 0}, {1, 0}}, {});
    std::map<std::tuple<int, int, int>, int> sum;
    for (const auto& row : elevation_table(p)) sum[{row.id.copy, row.id.edge, row.id.side}] += row.degree;
    for (const auto& [key, s] : sum) EXPECT_EQ(s, c.degree());
  }
}

TEST(ExtendToCover, DoubleIsMirrored) {
  const auto g = dbl({"aabbAB"});
  const auto clean = clean_subgroup({CyclicWord::parse("aabbAB")}, CoverGraph::rose(2));
  const auto r = extend_to_cover(g, 0, clean);
  ASSERT_TRUE(r.result);
  EXPECT_TRUE(r.result->mirrored);
  EXPECT_EQ(r.result->degree, clean.degree());
  EXPECT_TRUE(r.result->cover.is_cover());
}

TEST(ExtendToCover, HnnNeedsLargerDegree) {
  const auto g = hnn_a_b();
  const auto req = kernel_a();
  // At degree 2 the two ends have cycle types (2) and (1,1).
  EXPECT_EQ(oracle::cycle_type(req.perms(), "a"), std::vector<int>{2});
  EXPECT_EQ(oracle::cycle_type(req.perms(), "b"), (std::vector<int>{1, 1}));
  const auto r = extend_to_cover(g, 0, req);
  ASSERT_TRUE(r.result);
  EXPECT_GT(r.result->degree, 2);
  EXPECT_FALSE(r.result->mirrored);
  const auto& p = r.result->cover;
  EXPECT_TRUE(p.is_cover());
  EXPECT_EQ(p.covers()[static_cast<std::size_t>(p.copies()[static_cast<std::size_t>(r.result->designated_copy)].cover)],
            req);
  int sheets = 0;
  for (const auto& vc : p.copies()) sheets += p.covers()[static_cast<std::size_t>(vc.cover)].degree();
  EXPECT_EQ(sheets, r.result->degree);

  ExtendOptions tight;
  tight.max_degree = 2;
  const auto none = extend_to_cover(g, 0, req, tight);
  EXPECT_FALSE(none.result);
  EXPECT_FALSE(none.budget_exhausted);

  ExtendOptions starved;
  starved.budget = 1;
  EXPECT_TRUE(extend_to_cover(g, 0, req, starved).budget_exhausted);
}

TEST(ExtendToCover, DegreeOneIsTrivial) {
  const auto r = extend_to_cover(hnn_a_b(), 0, CoverGraph::rose(2));
  ASSERT_TRUE(r.result);
  EXPECT_EQ(r.result->degree, 1);
  EXPECT_EQ(r.result->cover.copy_count(), 1);
  EXPECT_TRUE(r.result->cover.is_cover());
}

TEST(Pi1PreCover, EulerCharacteristicMultipliesByDegree) {
  const std::vector<GraphOfGroups> bases{dbl({"abAB"}), dbl({"aabbAB", "ab"}), hnn_a_b()};
  std::mt19937_64 rng(oracle::seed() + 41);
  for (const auto& g : bases) {
    const long base_chi = euler(presentation(g).presentation);
    for (int trial = 0; trial < 4; ++trial) {
      const auto req = CoverGraph::from_perms(oracle::random_transitive_perms(rng, 2, 1 + trial));
      const auto r = extend_to_cover(g, 0, req);
      if (!r.result) continue;
      const auto& p = r.result->cover;
      if (!p.connected()) continue;
      const auto pi = pi1_precover(p);
      int sheets = 0;
      for (const auto& vc : p.copies()) {
        if (vc.vertex == 0) sheets += p.covers()[static_cast<std::size_t>(vc.cover)].degree();
      }
      EXPECT_EQ(euler(pi.presentation), sheets * base_chi);
      EXPECT_EQ(pi.presentation.relators.size(), p.matches().size());
    }
  }
}

TEST(Pi1PreCover, SingleCopyIsFree) {
  GraphOfGroups g;
  g.vertices = {{"v", 2}};
  const auto c = CoverGraph::from_perms({{1, 2, 0}, {0, 2, 1}});
  const auto p = glue(g, {c}, {{0, 0}}, {});
  const auto pi = pi1_precover(p);
  EXPECT_EQ(pi.presentation.generator_count(), static_cast<int>(subgroup_basis(c).size()));
  EXPECT_TRUE(pi.presentation.relators.empty());
}

TEST(Britton, BaseRelatorsAndConjugatesAreTrivial) {
  std::mt19937_64 rng(oracle::seed() + 42);
  for (const auto& g : {dbl({"abAB"}), dbl({"aabbAB", "ab"}), hnn_a_b()}) {
    const auto gp = presentation(g);
    const int n = gp.presentation.generator_count();
    for (const auto& r : gp.presentation.relators) {
      EXPECT_TRUE(is_trivial_in(g, gp, r));
      for (int k = 0; k < 20; ++k) {
        const auto s = oracle::random_word(rng, n, 6);
        const Word x = Word::parse(s);
        EXPECT_TRUE(is_trivial_in(g, gp, x * r * x.inverse()));
        EXPECT_TRUE(is_trivial_in(g, gp, x * r.power(2) * x.inverse() * r.inverse()));
      }
    }
  }
}

TEST(Britton, VertexGroupsEmbedAndStableLettersAreNontrivial) {
  std::mt19937_64 rng(oracle::seed() + 43);
  const auto g = hnn_a_b();
  const auto gp = presentation(g);
  EXPECT_TRUE(is_trivial_in(g, gp, Word::reduced({3, 1, -3, -2})));
  EXPECT_FALSE(is_trivial_in(g, gp, Word::reduced({3, 1, -3})));
  EXPECT_FALSE(is_trivial_in(g, gp, Word::reduced({3, 2, -3, -2})));
  EXPECT_FALSE(is_trivial_in(g, gp, Word::letter(3)));
  for (int k = 0; k < 100; ++k) {
    const Word x = Word::parse(oracle::random_word(rng, 2, 10));
    EXPECT_EQ(is_trivial_in(g, gp, x), x.empty()) << x.str();
  }
}

TEST(Certificates, MirrorCoverOfOneEndedDouble) {
  const auto p = mirror(dbl({"abAB"}), kernel_a());
  const auto c = certify(p);
  EXPECT_TRUE(c.monomorphism.holds);
  EXPECT_EQ(c.monomorphism.relators_trivial, c.monomorphism.relators);
  EXPECT_TRUE(c.one_ended.holds);
  EXPECT_FALSE(c.infinite_index.applicable);
  EXPECT_FALSE(c.all_hold());
}

TEST(Certificates, IsolatedCopyFailsOneEndedness) {
  GraphOfGroups g;
  g.vertices = {{"v", 2}};
  const auto p = glue(g, {CoverGraph::rose(2)}, {{0, 0}}, {});
  const auto c = one_ended_certificate(p);
  EXPECT_FALSE(c.holds);
  EXPECT_FALSE(c.failure.empty());
}

TEST(Certificates, InfiniteIndexNeedsReducedBaseAndHanging) {
  GraphOfGroups onto;
  onto.vertices = {{"u", 2}, {"x", 1}};
  onto.edges = {{"e", 0, 1, w("abAB"), w("a")}};
  const auto p = glue(onto, {CoverGraph::rose(2), CoverGraph::rose(1)}, {{0, 0}, {1, 1}}, {});
  const auto c = infinite_index_certificate(p);
  EXPECT_FALSE(c.applicable);
  EXPECT_FALSE(c.base_reduced);
  EXPECT_NE(c.reason.find("collapse_reduce"), std::string::npos);

  const auto g = dbl({"abAB"});
  const auto hanging = glue(g, {kernel_a()}, {{0, 0}, {1, 0}}, {{{0, 0, 0, 0}, {1, 0, 1, 0}}});
  EXPECT_TRUE(infinite_index_certificate(hanging).applicable);
}

TEST(Build, RigidDoubleBookkeeping) {
  const auto& r = rigid_build();
  const auto& bk = r.bookkeeping;
  const int m = static_cast<int>(elevations(r.clean_cover, CyclicWord::parse("aabbAB")).size());
  EXPECT_EQ(bk.m, m);
  EXPECT_EQ(bk.n, 0);
  EXPECT_EQ(bk.elevations_per_map, bk.m + 2 * bk.n - 1);
  EXPECT_EQ(bk.hanging_before, bk.m + 2 * bk.n);
  EXPECT_GE(bk.hanging_after, 1);
  EXPECT_TRUE(r.precover.connected());
  EXPECT_EQ(static_cast<int>(r.precover.hanging().size()), bk.hanging_after);
  EXPECT_EQ(r.pi1.presentation.relators.size(), r.precover.matches().size());
  EXPECT_TRUE(r.certificates.all_hold());
  EXPECT_EQ(r.certificates.monomorphism.relators_trivial, r.certificates.monomorphism.relators);
  for (const auto& copy : r.certificates.one_ended.copies) EXPECT_TRUE(copy.indecomposable);
}

TEST(Build, CertificatesAreThreadCountIndependent) {
  const auto& r = rigid_build();
  EXPECT_EQ(certify(r.precover, kDefaultRankCap, 4), r.certificates);
}

TEST(Build, RejectsNonRigidVertices) {
  try {
    build_one_ended_subgroup(dbl({"abAB"}), 0);
    FAIL() << "surface vertex accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
  GraphOfGroups g;
  g.vertices = {{"u", 2}, {"v", 2}};
  g.edges = {{"e", 0, 1, w("aabbAB"), w("aa")}};
  try {
    build_one_ended_subgroup(g, 0);
    FAIL() << "decomposable neighbour accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}
