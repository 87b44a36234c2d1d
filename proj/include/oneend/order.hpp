#pragma once

// Subgroups of F marked with peripheral structures compatible with an
// ambient multiword, the commensurability preorder on them, and the descent
// step that either certifies minimality through a surface or produces a
// strictly smaller marked subgroup.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oneend/error.hpp"
#include "oneend/stallings.hpp"
#include "oneend/whitehead.hpp"
#include "oneend/words.hpp"

namespace oneend {

struct Ambient {
  int rank = 1;
  PeripheralStructure structure;  // classes of F
};

// A finitely generated H <= F with a peripheral structure written in the
// spanning-tree basis of H's core graph.
struct MarkedSubgroup {
  CoreGraph subgroup;
  PeripheralStructure marking;

  int rank() const { return SpanningTree<CoreGraph>(subgroup).generator_count(); }
};

inline MarkedSubgroup whole_group(const Ambient& a) { return {CoreGraph::rose(a.rank), a.structure}; }

// Marked subgroup given by generators in F and marking classes written as
// words of F that lie in the subgroup.
inline MarkedSubgroup marked_subgroup(const Ambient& a, const std::vector<Word>& generators,
                                      const std::vector<Word>& classes) {
  MarkedSubgroup m{from_generators(Basis(a.rank), generators), {}};
  const SpanningTree<CoreGraph> tree(m.subgroup);
  std::vector<Word> local;
  for (const auto& w : classes) {
    const auto [gens, end] = tree.rewrite(0, w);
    require(end == 0, ErrorKind::Validation, "marking word " + w.str() + " is not in the subgroup");
    local.push_back(gens);
  }
  m.marking = make_peripheral_structure(local);
  return m;
}

inline bool is_compatible(const CoreGraph& h, const PeripheralStructure& u, const Ambient& a) {
  return u.subset_of(pullback_structure(h, a.structure));
}

inline bool is_compatible(const MarkedSubgroup& m, const Ambient& a) { return is_compatible(m.subgroup, m.marking, a); }

namespace detail {

// Loop at the basepoint of `to` spelled by an F-word, in `to`'s tree basis.
inline Word rewrite_loop(const SpanningTree<CoreGraph>& to, const Word& f) {
  const auto [gens, end] = to.rewrite(0, f);
  require(end == 0, ErrorKind::Contract, "word is not a loop in the target subgroup");
  return gens;
}

// The subgroup `inner` <= `outer` as a core graph over outer's tree basis.
inline std::optional<CoreGraph> relative_core(const CoreGraph& outer, const CoreGraph& inner) {
  const SpanningTree<CoreGraph> tree(outer);
  if (tree.generator_count() == 0) return std::nullopt;
  std::vector<Word> gens;
  for (const auto& w : subgroup_basis(inner)) gens.push_back(rewrite_loop(tree, w));
  return from_generators(Basis(tree.generator_count()), gens);
}

}  // namespace detail

// |outer : inner| for inner <= outer, or nullopt when infinite.
inline std::optional<int> relative_index(const CoreGraph& outer, const CoreGraph& inner) {
  const auto rel = detail::relative_core(outer, inner);
  if (!rel) return subgroup_basis(inner).empty() ? std::optional<int>(1) : std::nullopt;
  return index(*rel);
}

// The structure a marking of `outer` induces on a subgroup `inner` <= outer,
// in inner's tree basis.
inline PeripheralStructure induced_structure(const CoreGraph& outer, const PeripheralStructure& marking,
                                             const CoreGraph& inner) {
  const auto rel = detail::relative_core(outer, inner);
  PeripheralStructure out;
  if (!rel || marking.empty()) return out;
  const SpanningTree<CoreGraph> outer_tree(outer), rel_tree(*rel), inner_tree(inner);
  const auto pulled = pullback_structure(*rel, marking);
  for (const auto& e : pulled.entries()) {
    const Word f = outer_tree.expand(rel_tree.expand(e.root.word.word()));
    const auto c = cyclic_reduce(detail::rewrite_loop(inner_tree, f)).cyclic;
    out.insert(canonical_class(c), e.exponent);
  }
  return out;
}

enum class Verdict { Leq, Geq, Equiv, Incomparable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Leq: return "LEQ";
    case Verdict::Geq: return "GEQ";
    case Verdict::Equiv: return "EQUIV";
    case Verdict::Incomparable: return "INCOMPARABLE";
  }
  return "UNKNOWN";
}

struct Comparison {
  Verdict verdict = Verdict::Incomparable;
  bool leq = false;
  bool geq = false;
  std::optional<int> index_in_a;  // |H : H n K|
  std::optional<int> index_in_b;  // |K : H n K|
  int meet_rank = 0;
  PeripheralStructure induced_a;  // on H n K, in its tree basis
  PeripheralStructure induced_b;
};

inline Verdict verdict_of(bool leq, bool geq) {
  if (leq && geq) return Verdict::Equiv;
  if (leq) return Verdict::Leq;
  if (geq) return Verdict::Geq;
  return Verdict::Incomparable;
}

// Pointed comparison: H n K is the fiber product at the basepoints.
inline Comparison compare(const MarkedSubgroup& a, const MarkedSubgroup& b) {
  require(a.subgroup.rank() == b.subgroup.rank(), ErrorKind::Validation, "marked subgroups of different free groups");
  Comparison c;
  const CoreGraph meet = intersect(a.subgroup, b.subgroup);
  c.meet_rank = SpanningTree<CoreGraph>(meet).generator_count();
  c.index_in_a = relative_index(a.subgroup, meet);
  c.index_in_b = relative_index(b.subgroup, meet);
  if (c.index_in_a && c.index_in_b) {
    c.induced_a = induced_structure(a.subgroup, a.marking, meet);
    c.induced_b = induced_structure(b.subgroup, b.marking, meet);
  }
  c.leq = c.index_in_a.has_value() && (!c.index_in_b || c.induced_a.subset_of(c.induced_b));
  c.geq = c.index_in_b.has_value() && (!c.index_in_a || c.induced_b.subset_of(c.induced_a));
  c.verdict = verdict_of(c.leq, c.geq);
  return c;
}

// The conjugate of a finite-index marked subgroup by the tree path to `vertex`.
inline MarkedSubgroup rebase(const MarkedSubgroup& m, int vertex) {
  require(m.subgroup.complete(), ErrorKind::Precondition, "rebasing needs a finite-index subgroup");
  const SpanningTree<CoreGraph> old_tree(m.subgroup);
  MarkedSubgroup out{CoreGraph::build(m.subgroup.rank(), m.subgroup.vertex_count(), m.subgroup.edges(), vertex), {}};
  const SpanningTree<CoreGraph> new_tree(out.subgroup);
  const Word& p = old_tree.path(vertex);
  for (const auto& e : m.marking.entries()) {
    const Word f = p.inverse() * old_tree.expand(e.root.word.word()) * p;
    out.marking.insert(canonical_class(cyclic_reduce(detail::rewrite_loop(new_tree, f)).cyclic), e.exponent);
  }
  return out;
}

// Up to conjugacy: each direction holds if it holds for some conjugate of
// the larger side. Exhaustive over basepoints, so finite-index sides only;
// other sides are compared pointed.
inline Comparison compare_up_to_conjugacy(const MarkedSubgroup& a, const MarkedSubgroup& b) {
  Comparison c = compare(a, b);
  if (!c.leq && b.subgroup.complete()) {
    for (int v = 1; v < b.subgroup.vertex_count() && !c.leq; ++v) c.leq = compare(a, rebase(b, v)).leq;
  }
  if (!c.geq && a.subgroup.complete()) {
    for (int v = 1; v < a.subgroup.vertex_count() && !c.geq; ++v) c.geq = compare(rebase(a, v), b).geq;
  }
  c.verdict = verdict_of(c.leq, c.geq);
  return c;
}

struct PosetMembership {
  bool member = false;
  int rank = 0;
  bool compatible = false;
  bool indecomposable = false;
  std::string reason;
};

inline PosetMembership poset_membership(const MarkedSubgroup& m, const Ambient& a, int rank_cap = kDefaultRankCap) {
  PosetMembership p;
  p.rank = m.rank();
  p.compatible = is_compatible(m, a);
  if (p.rank < 2) {
    p.reason = "abelian subgroup";
    return p;
  }
  if (!p.compatible) {
    p.reason = "marking is not compatible with the ambient structure";
    return p;
  }
  p.indecomposable = is_freely_indecomposable(m.marking.words(), p.rank, rank_cap).indecomposable;
  if (!p.indecomposable) {
    p.reason = "freely decomposable relative to the marking";
    return p;
  }
  p.member = true;
  return p;
}

inline bool in_poset(const MarkedSubgroup& m, const Ambient& a, int rank_cap = kDefaultRankCap) {
  return poset_membership(m, a, rank_cap).member;
}

enum class DescentKind { Minimal, Smaller, Inconclusive };

inline const char* to_string(DescentKind k) {
  switch (k) {
    case DescentKind::Minimal: return "MINIMAL";
    case DescentKind::Smaller: return "SMALLER";
    case DescentKind::Inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

struct Descent {
  DescentKind kind = DescentKind::Inconclusive;
  PairClassification classification;
  std::optional<SurfaceData> surface;
  std::optional<MarkedSubgroup> smaller;
  int clean_degree = 0;
  std::optional<ConjClassRep> dropped;  // class left out of the smaller marking
  std::string witness;
};

// One descent step. Surfaces are minimal; a rigid candidate descends to a
// clean finite-index subgroup marked by its pullback minus one class.
inline Descent descend(const MarkedSubgroup& m, const Ambient& a, int rank_cap = kDefaultRankCap,
                       std::size_t degree_cap = kDefaultDegreeCap) {
  const auto membership = poset_membership(m, a, rank_cap);
  require(membership.member, ErrorKind::Precondition, "descend outside the poset: " + membership.reason);
  const int rank = membership.rank;
  Descent d;
  d.classification = classify_pair(m.marking.words(), rank, rank_cap);
  switch (d.classification.tag) {
    case PairTag::Surface:
    case PairTag::ThricePuncturedSphere:
      d.kind = DescentKind::Minimal;
      d.surface = d.classification.surface;
      return d;
    case PairTag::RigidCandidate: break;
    case PairTag::Decomposable: fail(ErrorKind::Contract, "poset member classified as decomposable");
    case PairTag::Inconclusive: {
      const auto& r = d.classification.report;
      d.witness = std::to_string(r.cut_edge_pairs.size()) + " separating edge pair(s), " +
                  std::to_string(r.cut_vertex_edge_pairs.size()) + " separating vertex-edge pair(s)";
      return d;
    }
  }

  const CoverGraph clean = clean_subgroup(m.marking.words(), CoverGraph::rose(rank), degree_cap);
  d.clean_degree = clean.degree();
  const SpanningTree<CoreGraph> h_tree(m.subgroup);
  const SpanningTree<CoverGraph> clean_tree(clean);
  std::vector<Word> generators;
  for (const auto& w : clean_tree.basis()) generators.push_back(h_tree.expand(w));
  MarkedSubgroup next{from_generators(Basis(m.subgroup.rank()), generators), {}};
  const SpanningTree<CoreGraph> next_tree(next.subgroup);
  PeripheralStructure full;
  const auto pulled = pullback_structure(clean, m.marking);
  for (const auto& e : pulled.entries()) {
    const Word f = h_tree.expand(clean_tree.expand(e.root.word.word()));
    full.insert(canonical_class(cyclic_reduce(detail::rewrite_loop(next_tree, f)).cyclic), e.exponent);
  }
  require(full.size() >= 2, ErrorKind::Contract, "clean pullback has fewer than two classes");
  d.dropped = full.entries().front().root;
  next.marking = full.without(0);
  d.smaller = std::move(next);
  d.kind = DescentKind::Smaller;
  return d;
}

}  // namespace oneend
