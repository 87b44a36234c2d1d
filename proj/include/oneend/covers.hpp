#pragma once

// Covers and pre-covers of graphs of free groups: vertex-space covers glued
// along degree-preserving matchings of elevations, bounded extension of
// vertex covers to finite covers, fundamental-group presentations with their
// embedding into the base, certificates, and the construction of a
// finitely generated one-ended subgroup of infinite index.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "oneend/error.hpp"
#include "oneend/gog.hpp"
#include "oneend/stallings.hpp"
#include "oneend/whitehead.hpp"
#include "oneend/words.hpp"

namespace oneend {

// Elevation `index` of the attaching map of (edge, side) into vertex copy `copy`.
struct ElevationId {
  int copy = 0;
  int edge = 0;
  int side = 0;
  int index = 0;

  auto operator<=>(const ElevationId&) const = default;
};

struct Match {
  ElevationId plus;   // side 0
  ElevationId minus;  // side 1

  int edge() const { return plus.edge; }
  bool operator==(const Match&) const = default;
};

struct VertexCopy {
  int vertex = 0;
  int cover = 0;  // index into PreCover::covers()

  bool operator==(const VertexCopy&) const = default;
};

class PreCover {
 public:
  PreCover() = default;

  const GraphOfGroups& base() const { return base_; }
  const std::vector<CoverGraph>& covers() const { return covers_; }
  const std::vector<VertexCopy>& copies() const { return copies_; }
  const std::vector<Match>& matches() const { return matches_; }

  int copy_count() const { return static_cast<int>(copies_.size()); }

  // Elevations of the attaching map of (edge, side) into a copy; empty when
  // the copy does not sit at that end.
  const std::vector<Elevation>& elevations_at(int copy, int edge, int side) const {
    static const std::vector<Elevation> none;
    const auto& vc = copies_[static_cast<std::size_t>(copy)];
    if (base_.endpoint(edge, side) != vc.vertex) return none;
    return table_.at(key(vc.cover, edge, side));
  }

  const Elevation& elevation(const ElevationId& id) const {
    return elevations_at(id.copy, id.edge, id.side)[static_cast<std::size_t>(id.index)];
  }

  std::vector<ElevationId> all_elevations() const {
    std::vector<ElevationId> out;
    for (int c = 0; c < copy_count(); ++c) {
      for (int e = 0; e < base_.edge_count(); ++e) {
        for (int side = 0; side < 2; ++side) {
          const auto n = static_cast<int>(elevations_at(c, e, side).size());
          for (int i = 0; i < n; ++i) out.push_back({c, e, side, i});
        }
      }
    }
    return out;
  }

  std::vector<ElevationId> hanging() const {
    std::set<ElevationId> matched;
    for (const auto& m : matches_) {
      matched.insert(m.plus);
      matched.insert(m.minus);
    }
    std::vector<ElevationId> out;
    for (const auto& id : all_elevations()) {
      if (!matched.count(id)) out.push_back(id);
    }
    return out;
  }

  bool is_cover() const { return hanging().empty(); }

  bool connected() const {
    if (copies_.empty()) return false;
    const auto [id, count] = components(underlying_graph());
    (void)id;
    return count == 1;
  }

  // One vertex per copy, one edge per match (tag = match index).
  Multigraph underlying_graph() const {
    Multigraph g{copy_count(), {}};
    for (std::size_t i = 0; i < matches_.size(); ++i) {
      g.edges.push_back({matches_[i].plus.copy, matches_[i].minus.copy, static_cast<int>(i)});
    }
    return g;
  }

  friend PreCover glue(GraphOfGroups base, std::vector<CoverGraph> covers, std::vector<VertexCopy> copies,
                       std::vector<Match> matches);

 private:
  static std::int64_t key(int cover, int edge, int side) {
    return (static_cast<std::int64_t>(cover) << 32) | (static_cast<std::int64_t>(edge) << 1) | side;
  }

  GraphOfGroups base_;
  std::vector<CoverGraph> covers_;
  std::vector<VertexCopy> copies_;
  std::vector<Match> matches_;
  std::map<std::int64_t, std::vector<Elevation>> table_;
};

// Builds a pre-cover, checking that every match joins opposite ends of one
// base edge with equal degrees and that no elevation is used twice.
inline PreCover glue(GraphOfGroups base, std::vector<CoverGraph> covers, std::vector<VertexCopy> copies,
                     std::vector<Match> matches) {
  check_valid(base);
  PreCover p;
  p.base_ = std::move(base);
  p.covers_ = std::move(covers);
  p.copies_ = std::move(copies);
  p.matches_ = std::move(matches);
  const auto& g = p.base_;
  std::map<int, SpanningTree<CoverGraph>> trees;
  for (const auto& vc : p.copies_) {
    require(vc.vertex >= 0 && vc.vertex < g.vertex_count(), ErrorKind::Validation, "copy of an unknown vertex");
    require(vc.cover >= 0 && vc.cover < static_cast<int>(p.covers_.size()), ErrorKind::Validation,
            "copy refers to an unknown cover");
    const auto& c = p.covers_[static_cast<std::size_t>(vc.cover)];
    require(c.rank() == g.vertices[static_cast<std::size_t>(vc.vertex)].rank, ErrorKind::Validation,
            "cover rank differs from its vertex rank");
    for (int e = 0; e < g.edge_count(); ++e) {
      for (int side = 0; side < 2; ++side) {
        if (g.endpoint(e, side) != vc.vertex) continue;
        const auto k = PreCover::key(vc.cover, e, side);
        if (p.table_.count(k)) continue;
        auto it = trees.find(vc.cover);
        if (it == trees.end()) it = trees.emplace(vc.cover, SpanningTree<CoverGraph>(c)).first;
        p.table_[k] = elevations(c, CyclicWord(g.word(e, side)), it->second);
      }
    }
  }
  std::set<ElevationId> used;
  for (const auto& m : p.matches_) {
    require(m.plus.side == 0 && m.minus.side == 1, ErrorKind::Validation, "match must join a + end to a - end");
    require(m.plus.edge == m.minus.edge, ErrorKind::Validation, "match joins elevations of different edges");
    require(m.plus.edge >= 0 && m.plus.edge < g.edge_count(), ErrorKind::Validation, "match on an unknown edge");
    for (const auto* id : {&m.plus, &m.minus}) {
      require(id->copy >= 0 && id->copy < p.copy_count(), ErrorKind::Validation, "match on an unknown copy");
      const auto& list = p.elevations_at(id->copy, id->edge, id->side);
      require(id->index >= 0 && id->index < static_cast<int>(list.size()), ErrorKind::Validation,
              "match names an elevation that does not exist (end mismatch)");
      require(used.insert(*id).second, ErrorKind::Validation, "elevation matched twice");
    }
    require(p.elevation(m.plus).degree == p.elevation(m.minus).degree, ErrorKind::Validation,
            "matched elevations have different degrees (" + std::to_string(p.elevation(m.plus).degree) + " vs " +
                std::to_string(p.elevation(m.minus).degree) + ")");
  }
  return p;
}

struct ElevationRow {
  ElevationId id;
  int degree = 0;
  int start = 0;
  bool matched = false;
};

inline std::vector<ElevationRow> elevation_table(const PreCover& p) {
  std::set<ElevationId> matched;
  for (const auto& m : p.matches()) {
    matched.insert(m.plus);
    matched.insert(m.minus);
  }
  std::vector<ElevationRow> out;
  for (const auto& id : p.all_elevations()) {
    const auto& e = p.elevation(id);
    out.push_back({id, e.degree, e.start(), matched.count(id) > 0});
  }
  return out;
}

namespace detail {

// Matches + elevations to - elevations of each edge, first come first served
// within each degree, in elevation order.
inline std::vector<Match> match_by_degree(const PreCover& p) {
  std::vector<Match> out;
  const auto rows = elevation_table(p);
  for (int e = 0; e < p.base().edge_count(); ++e) {
    std::map<int, std::vector<ElevationId>> minus_by_degree;
    for (const auto& r : rows) {
      if (r.id.edge == e && r.id.side == 1) minus_by_degree[r.degree].push_back(r.id);
    }
    std::map<int, std::size_t> next;
    for (const auto& r : rows) {
      if (r.id.edge != e || r.id.side != 0) continue;
      auto& pool = minus_by_degree[r.degree];
      auto& k = next[r.degree];
      if (k < pool.size()) out.push_back({r.id, pool[k++]});
    }
  }
  return out;
}

inline std::vector<int> word_cycle_type(const std::vector<std::vector<int>>& perms, const Word& w) {
  const auto d = perms.front().size();
  std::vector<int> image(d);
  for (std::size_t s = 0; s < d; ++s) {
    int v = static_cast<int>(s);
    for (Letter l : w.letters()) {
      const auto& p = perms[static_cast<std::size_t>(letter_index(l))];
      if (l > 0) {
        v = p[static_cast<std::size_t>(v)];
      } else {
        v = static_cast<int>(std::find(p.begin(), p.end(), v) - p.begin());
      }
    }
    image[s] = v;
  }
  std::vector<char> seen(d, 0);
  std::vector<int> type;
  for (std::size_t s = 0; s < d; ++s) {
    if (seen[s]) continue;
    int len = 0;
    for (auto t = s; !seen[t]; t = static_cast<std::size_t>(image[t])) {
      seen[t] = 1;
      ++len;
    }
    type.push_back(len);
  }
  std::sort(type.begin(), type.end());
  return type;
}

// Splits a (possibly disconnected) permutation action into transitive pieces,
// each relabelled by its sheets in increasing order.
inline std::vector<CoverGraph> split_components(const std::vector<std::vector<int>>& perms) {
  const auto d = perms.front().size();
  std::vector<int> comp(d, -1);
  int count = 0;
  for (std::size_t s = 0; s < d; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = count;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (const auto& p : perms) {
        const auto fwd = static_cast<std::size_t>(p[v]);
        const auto bwd = static_cast<std::size_t>(std::find(p.begin(), p.end(), static_cast<int>(v)) - p.begin());
        for (auto u : {fwd, bwd}) {
          if (comp[u] < 0) {
            comp[u] = count;
            stack.push_back(u);
          }
        }
      }
    }
    ++count;
  }
  std::vector<CoverGraph> out;
  for (int c = 0; c < count; ++c) {
    std::vector<int> local(d, -1);
    int n = 0;
    for (std::size_t s = 0; s < d; ++s) {
      if (comp[s] == c) local[s] = n++;
    }
    std::vector<std::vector<int>> sub(perms.size());
    for (std::size_t i = 0; i < perms.size(); ++i) {
      for (std::size_t s = 0; s < d; ++s) {
        if (comp[s] == c) sub[i].push_back(local[static_cast<std::size_t>(perms[i][s])]);
      }
    }
    out.push_back(CoverGraph::from_perms(std::move(sub)));
  }
  return out;
}

}  // namespace detail

struct ExtendResult {
  PreCover cover;
  int designated_copy = 0;  // copy carrying the required vertex cover
  int degree = 0;           // sheets over each base vertex
  bool mirrored = false;
};

struct ExtendOptions {
  int max_degree = 8;
  std::int64_t budget = 2'000'000;  // candidate vertex-cover tuples examined
};

struct ExtendOutcome {
  std::optional<ExtendResult> result;
  std::int64_t examined = 0;
  bool budget_exhausted = false;
};

// Extends a cover of one vertex group to a finite cover of the graph of
// groups. Doubles are mirrored. Otherwise vertex covers of a common degree D
// are searched for D up to max_degree, the required cover being a direct
// summand at its vertex; an edge is feasible only if the cycle types of its
// two attaching words agree.
inline ExtendOutcome extend_to_cover(const GraphOfGroups& g, int vertex, const CoverGraph& required,
                                     const ExtendOptions& options = {}) {
  check_valid(g);
  require(vertex >= 0 && vertex < g.vertex_count(), ErrorKind::Validation, "unknown vertex");
  require(required.rank() == g.vertices[static_cast<std::size_t>(vertex)].rank, ErrorKind::Validation,
          "required cover rank differs from the vertex rank");
  ExtendOutcome out;
  if (is_double(g)) {
    std::vector<Match> matches;
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto n = elevations(required, CyclicWord(g.edges[static_cast<std::size_t>(e)].word_plus)).size();
      for (int i = 0; i < static_cast<int>(n); ++i) matches.push_back({{0, e, 0, i}, {1, e, 1, i}});
    }
    ExtendResult r{glue(g, {required}, {{0, 0}, {1, 0}}, std::move(matches)), vertex, required.degree(), true};
    require(r.cover.is_cover(), ErrorKind::Contract, "mirror double is not a cover");
    out.result = std::move(r);
    return out;
  }

  const int d = required.degree();
  const int nv = g.vertex_count();
  for (int D = d; D <= options.max_degree; ++D) {
    // Slots: the complement at `vertex` (degree D - d), full degree D elsewhere.
    std::vector<int> slot_size;
    std::vector<int> slot_vertex;
    for (int v = 0; v < nv; ++v) {
      const int size = v == vertex ? D - d : D;
      if (size == 0) continue;
      for (int i = 0; i < g.vertices[static_cast<std::size_t>(v)].rank; ++i) {
        slot_size.push_back(size);
        slot_vertex.push_back(v);
      }
    }
    std::vector<std::vector<int>> choice;
    for (int s : slot_size) {
      choice.emplace_back(static_cast<std::size_t>(s));
      std::iota(choice.back().begin(), choice.back().end(), 0);
    }
    while (true) {
      if (++out.examined > options.budget) {
        out.budget_exhausted = true;
        return out;
      }
      // Assemble the vertex actions.
      std::vector<std::vector<std::vector<int>>> action(static_cast<std::size_t>(nv));
      for (int v = 0; v < nv; ++v) {
        action[static_cast<std::size_t>(v)].assign(
            static_cast<std::size_t>(g.vertices[static_cast<std::size_t>(v)].rank), {});
      }
      for (int x = 1; x <= required.rank(); ++x) {
        action[static_cast<std::size_t>(vertex)][static_cast<std::size_t>(x - 1)] =
            required.perms()[static_cast<std::size_t>(x - 1)];
      }
      std::vector<int> letter_of_slot(slot_size.size());
      {
        std::map<int, int> used;
        for (std::size_t k = 0; k < slot_size.size(); ++k) letter_of_slot[k] = used[slot_vertex[k]]++;
      }
      for (std::size_t k = 0; k < slot_size.size(); ++k) {
        const auto& p = choice[k];
        auto& target = action[static_cast<std::size_t>(slot_vertex[k])][static_cast<std::size_t>(letter_of_slot[k])];
        const int shift = slot_vertex[k] == vertex ? d : 0;
        for (int s : p) target.push_back(s + shift);
      }
      bool feasible = true;
      for (const auto& e : g.edges) {
        if (detail::word_cycle_type(action[static_cast<std::size_t>(e.from)], e.word_plus) !=
            detail::word_cycle_type(action[static_cast<std::size_t>(e.to)], e.word_minus)) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        std::vector<CoverGraph> covers;
        std::vector<VertexCopy> copies;
        int designated = -1;
        for (int v = 0; v < nv; ++v) {
          for (auto& piece : detail::split_components(action[static_cast<std::size_t>(v)])) {
            if (v == vertex && designated < 0) designated = static_cast<int>(copies.size());
            auto it = std::find(covers.begin(), covers.end(), piece);
            const int id = static_cast<int>(it - covers.begin());
            if (it == covers.end()) covers.push_back(std::move(piece));
            copies.push_back({v, id});
          }
        }
        PreCover bare = glue(g, covers, copies, {});
        auto matches = detail::match_by_degree(bare);
        PreCover full = glue(g, std::move(covers), std::move(copies), std::move(matches));
        require(full.is_cover(), ErrorKind::Contract, "feasible cycle types did not give a cover");
        require(full.covers()[static_cast<std::size_t>(full.copies()[static_cast<std::size_t>(designated)].cover)] ==
                    required,
                ErrorKind::Contract, "designated copy lost the required cover");
        out.result = ExtendResult{std::move(full), designated, D, false};
        return out;
      }
      // Odometer step.
      std::size_t k = 0;
      while (k < choice.size()) {
        // next_permutation wraps to the identity when it returns false.
        if (std::next_permutation(choice[k].begin(), choice[k].end())) break;
        ++k;
      }
      if (k == choice.size()) break;
    }
  }
  return out;
}

// Element of a vertex copy's group carried by an elevation: the loop reading
// w^k from the elevation's start, conjugated by the tree path to that start,
// in the copy's spanning-tree basis.
inline Word elevation_element(const SpanningTree<CoverGraph>& tree, const Word& w, const Elevation& e) {
  const auto [gens, end] = tree.rewrite(e.start(), w.power(e.degree));
  require(end == e.start(), ErrorKind::Contract, "elevation does not close up");
  return gens;
}

namespace detail {

inline bool in_cyclic_subgroup(const Word& u, const Word& w, int* power) {
  if (u.empty()) {
    *power = 0;
    return true;
  }
  if (u.size() % w.size() != 0) return false;
  const int k = static_cast<int>(u.size() / w.size());
  if (u == w.power(k)) {
    *power = k;
    return true;
  }
  if (u == w.power(-k)) {
    *power = -k;
    return true;
  }
  return false;
}

}  // namespace detail

// Decides whether a word in the generators of presentation(g) is trivial in
// the fundamental group, by Britton reduction of the corresponding path in
// the graph of groups.
inline bool is_trivial_in(const GraphOfGroups& g, const GogPresentation& gp, const Word& word) {
  struct Crossing {
    int edge;
    int dir;  // +1: from the - end to the + end; -1: the reverse
  };
  std::vector<Crossing> crossings;
  std::vector<Word> elems{Word()};
  std::vector<int> at{0};

  std::vector<int> depth(static_cast<std::size_t>(g.vertex_count()), 0);
  auto parent_vertex = [&](int v) {
    const auto& e = g.edges[static_cast<std::size_t>(gp.tree_parent_edge[static_cast<std::size_t>(v)])];
    return e.from == v ? e.to : e.from;
  };
  for (int v = 0; v < g.vertex_count(); ++v) {
    for (int u = v; gp.tree_parent_edge[static_cast<std::size_t>(u)] >= 0; u = parent_vertex(u)) {
      ++depth[static_cast<std::size_t>(v)];
    }
  }

  auto cross = [&](int edge, int dir) {
    const auto& e = g.edges[static_cast<std::size_t>(edge)];
    if (!crossings.empty() && crossings.back().edge == edge && crossings.back().dir == -dir) {
      const int side = crossings.back().dir > 0 ? 0 : 1;
      int k = 0;
      if (detail::in_cyclic_subgroup(elems.back(), g.word(edge, side), &k)) {
        const Word moved = g.word(edge, 1 - side).power(k);
        crossings.pop_back();
        elems.pop_back();
        at.pop_back();
        elems.back() *= moved;
        return;
      }
    }
    crossings.push_back({edge, dir});
    elems.emplace_back();
    at.push_back(dir > 0 ? e.from : e.to);
  };
  auto step_tree = [&](int v, bool up) {
    // Crosses the tree edge between v and its parent, upwards or downwards.
    const int edge = gp.tree_parent_edge[static_cast<std::size_t>(v)];
    const auto& e = g.edges[static_cast<std::size_t>(edge)];
    const int from_vertex = up ? v : parent_vertex(v);
    cross(edge, e.to == from_vertex ? +1 : -1);
  };
  auto route = [&](int target) {
    int cur = at.back();
    std::vector<int> down;
    int t = target;
    while (depth[static_cast<std::size_t>(cur)] > depth[static_cast<std::size_t>(t)]) {
      step_tree(cur, true);
      cur = parent_vertex(cur);
    }
    while (depth[static_cast<std::size_t>(t)] > depth[static_cast<std::size_t>(cur)]) {
      down.push_back(t);
      t = parent_vertex(t);
    }
    while (cur != t) {
      step_tree(cur, true);
      cur = parent_vertex(cur);
      down.push_back(t);
      t = parent_vertex(t);
    }
    for (auto it = down.rbegin(); it != down.rend(); ++it) step_tree(*it, false);
  };

  const int vertex_letters = gp.vertex_offset.back() + g.vertices.back().rank;
  for (Letter l : word.letters()) {
    const int gen = std::abs(l);
    int edge = -1;
    for (int e = 0; e < g.edge_count() && edge < 0; ++e) {
      if (gp.stable_letter[static_cast<std::size_t>(e)] == gen) edge = e;
    }
    if (edge >= 0) {
      const auto& e = g.edges[static_cast<std::size_t>(edge)];
      route(l > 0 ? e.to : e.from);
      cross(edge, l > 0 ? +1 : -1);
      continue;
    }
    int v = g.vertex_count() - 1;
    while (v > 0 && gp.vertex_offset[static_cast<std::size_t>(v)] >= gen) --v;
    require(gen <= vertex_letters, ErrorKind::Validation, "letter outside the presentation");
    route(v);
    const Letter local = gen - gp.vertex_offset[static_cast<std::size_t>(v)];
    elems.back().push_back(l > 0 ? local : -local);
  }
  route(0);
  return crossings.empty() && elems.back().empty();
}

// Presentation of the fundamental group of a connected pre-cover, with each
// generator's image in the base group kept in factored form: a vertex
// generator of copy c maps to transport(c) * basis word * transport(c)^-1.
struct Pi1Result {
  Presentation presentation;
  GogPresentation base;
  std::vector<int> copy_offset;           // generator count before each copy's block
  std::vector<int> match_stable;          // 1-based generator of each match; 0 on tree matches
  std::vector<int> stable_match;          // match of each stable generator, by generator - first stable
  std::vector<int> tree_parent_match;     // per copy; -1 at copy 0
  std::vector<Word> transport;            // per copy, in base generators
  std::vector<Word> match_core;           // per match: p- t p+^-1 in base generators
  std::vector<std::vector<Word>> cover_basis;  // per cover, spanning-tree basis in vertex letters

  // Image in the base group of a word in this presentation's generators.
  Word image(const PreCover& p, const Word& w) const {
    // Consecutive letters of one copy share a single conjugation by its transport.
    Word out;
    Word inner;
    int run = -1;
    auto flush = [&] {
      if (run < 0) return;
      const Word& t = transport[static_cast<std::size_t>(run)];
      out *= t * inner * t.inverse();
      inner = Word();
      run = -1;
    };
    const int first_stable = presentation.generator_count() - static_cast<int>(stable_match.size());
    for (Letter l : w.letters()) {
      const int gen = std::abs(l) - 1;
      if (gen < first_stable) {
        auto it = std::upper_bound(copy_offset.begin(), copy_offset.end(), gen);
        const int c = static_cast<int>(it - copy_offset.begin()) - 1;
        if (c != run) flush();
        run = c;
        const auto& vc = p.copies()[static_cast<std::size_t>(c)];
        const Word piece = base.vertex_word(
            vc.vertex, cover_basis[static_cast<std::size_t>(vc.cover)]
                                  [static_cast<std::size_t>(gen - copy_offset[static_cast<std::size_t>(c)])]);
        inner *= l > 0 ? piece : piece.inverse();
      } else {
        flush();
        const auto m = static_cast<std::size_t>(stable_match[static_cast<std::size_t>(gen - first_stable)]);
        const auto& mt = p.matches()[m];
        const Word piece = transport[static_cast<std::size_t>(mt.minus.copy)] * match_core[m] *
                           transport[static_cast<std::size_t>(mt.plus.copy)].inverse();
        out *= l > 0 ? piece : piece.inverse();
      }
    }
    flush();
    return out;
  }
};

inline Pi1Result pi1_precover(const PreCover& p) {
  require(p.connected(), ErrorKind::Precondition, "pre-cover is disconnected; select a component first");
  const auto& g = p.base();
  Pi1Result r;
  r.base = presentation(g);
  std::vector<SpanningTree<CoverGraph>> trees;
  for (const auto& c : p.covers()) {
    trees.emplace_back(c);
    r.cover_basis.push_back(trees.back().basis());
  }
  auto& pres = r.presentation;
  for (int c = 0; c < p.copy_count(); ++c) {
    r.copy_offset.push_back(pres.generator_count());
    const auto& basis = r.cover_basis[static_cast<std::size_t>(p.copies()[static_cast<std::size_t>(c)].cover)];
    for (std::size_t j = 0; j < basis.size(); ++j) {
      pres.generators.push_back("c" + std::to_string(c) + ".g" + std::to_string(j + 1));
    }
  }
  // Spanning tree of the pre-cover graph, breadth first from copy 0.
  const auto adj = p.underlying_graph().adjacency();
  r.tree_parent_match.assign(static_cast<std::size_t>(p.copy_count()), -1);
  std::vector<char> seen(static_cast<std::size_t>(p.copy_count()), 0);
  std::vector<char> tree_match(p.matches().size(), 0);
  std::vector<int> order{0};
  seen[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& [w, m] : adj[static_cast<std::size_t>(order[i])]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = 1;
      tree_match[static_cast<std::size_t>(m)] = 1;
      r.tree_parent_match[static_cast<std::size_t>(w)] = m;
      order.push_back(w);
    }
  }
  r.match_stable.assign(p.matches().size(), 0);
  for (std::size_t m = 0; m < p.matches().size(); ++m) {
    if (tree_match[m]) continue;
    pres.generators.push_back("t" + std::to_string(m));
    r.match_stable[m] = pres.generator_count();
    r.stable_match.push_back(static_cast<int>(m));
  }

  // Cores p- t p+^-1 and the relator pieces.
  std::vector<Word> plus_elem(p.matches().size()), minus_elem(p.matches().size());
  for (std::size_t m = 0; m < p.matches().size(); ++m) {
    const auto& mt = p.matches()[m];
    const auto& cp = p.copies()[static_cast<std::size_t>(mt.plus.copy)];
    const auto& cm = p.copies()[static_cast<std::size_t>(mt.minus.copy)];
    const auto& tp = trees[static_cast<std::size_t>(cp.cover)];
    const auto& tm = trees[static_cast<std::size_t>(cm.cover)];
    const auto& ep = p.elevation(mt.plus);
    const auto& em = p.elevation(mt.minus);
    const auto& ed = g.edges[static_cast<std::size_t>(mt.edge())];
    Word core = r.base.vertex_word(cm.vertex, tm.path(em.start()));
    const int t = r.base.stable_letter[static_cast<std::size_t>(mt.edge())];
    if (t) core.push_back(t);
    core *= r.base.vertex_word(cp.vertex, tp.path(ep.start())).inverse();
    r.match_core.push_back(core);
    plus_elem[m] = elevation_element(tp, ed.word_plus, ep);
    minus_elem[m] = elevation_element(tm, ed.word_minus, em);
  }
  auto shifted = [&](int copy, const Word& w) {
    Word out;
    for (Letter l : w.letters()) {
      const int gidx = r.copy_offset[static_cast<std::size_t>(copy)] + std::abs(l);
      out.push_back(l > 0 ? gidx : -gidx);
    }
    return out;
  };
  for (std::size_t m = 0; m < p.matches().size(); ++m) {
    const auto& mt = p.matches()[m];
    const int t = r.match_stable[m];
    Word rel;
    if (t) rel.push_back(t);
    rel *= shifted(mt.plus.copy, plus_elem[m]);
    if (t) rel.push_back(-t);
    rel *= shifted(mt.minus.copy, minus_elem[m]).inverse();
    pres.relators.push_back(rel);
  }

  // Transports along the tree: crossing a match from + to - multiplies by
  // core^-1, from - to + by core.
  r.transport.assign(static_cast<std::size_t>(p.copy_count()), Word());
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int c = order[i];
    const auto m = static_cast<std::size_t>(r.tree_parent_match[static_cast<std::size_t>(c)]);
    const auto& mt = p.matches()[m];
    if (mt.minus.copy == c) {
      r.transport[static_cast<std::size_t>(c)] =
          r.transport[static_cast<std::size_t>(mt.plus.copy)] * r.match_core[m].inverse();
    } else {
      r.transport[static_cast<std::size_t>(c)] =
          r.transport[static_cast<std::size_t>(mt.minus.copy)] * r.match_core[m];
    }
  }
  return r;
}

namespace detail {

// Runs body(i) for i in [0, n) on up to `threads` threads. Results must go
// to per-index slots; the first exception in index order is rethrown.
template <class Body>
void parallel_for(int n, int threads, Body body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

enum class CertificateKind { Monomorphism, InfiniteIndex, OneEnded };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::Monomorphism: return "MONOMORPHISM";
    case CertificateKind::InfiniteIndex: return "INFINITE_INDEX";
    case CertificateKind::OneEnded: return "ONE_ENDED";
  }
  return "UNKNOWN";
}

struct MonomorphismCertificate {
  bool holds = false;
  bool connected = false;
  int copies = 0;
  int matches = 0;
  int generators = 0;
  int relators = 0;
  int stable_letters = 0;
  int relators_trivial = 0;   // relator images verified trivial in the base
  int tree_letters_trivial = 0;  // tree matches whose image is trivial
  std::vector<Word> transports;

  bool operator==(const MonomorphismCertificate&) const = default;
};

struct CopyWitness {
  int copy = 0;
  int vertex = 0;
  int rank = 0;
  int classes = 0;
  int graph_vertices = 0;
  int graph_edges = 0;
  bool connected = false;
  int cut_vertices = 0;
  bool minimized = false;
  bool indecomposable = false;

  bool operator==(const CopyWitness&) const = default;
};

struct OneEndedCertificate {
  bool holds = false;
  std::vector<CopyWitness> copies;
  std::string failure;

  bool operator==(const OneEndedCertificate&) const = default;
};

struct InfiniteIndexCertificate {
  bool applicable = false;
  bool base_reduced = false;
  std::vector<ElevationId> hanging;
  std::string reason;

  bool operator==(const InfiniteIndexCertificate&) const = default;
};

inline MonomorphismCertificate monomorphism_certificate(const PreCover& p, const Pi1Result& pi, int threads = 1) {
  MonomorphismCertificate c;
  c.connected = p.connected();
  c.copies = p.copy_count();
  c.matches = static_cast<int>(p.matches().size());
  c.generators = pi.presentation.generator_count();
  c.relators = static_cast<int>(pi.presentation.relators.size());
  c.stable_letters = static_cast<int>(std::count_if(pi.match_stable.begin(), pi.match_stable.end(), [](int t) { return t != 0; }));
  c.transports = pi.transport;
  int expected_generators = c.stable_letters;
  for (const auto& vc : p.copies()) {
    expected_generators += static_cast<int>(pi.cover_basis[static_cast<std::size_t>(vc.cover)].size());
  }
  const auto& rels = pi.presentation.relators;
  std::vector<char> rel_ok(rels.size(), 0);
  detail::parallel_for(c.relators, threads, [&](int i) {
    const Word img = cyclic_reduce(pi.image(p, rels[static_cast<std::size_t>(i)])).cyclic.word();
    rel_ok[static_cast<std::size_t>(i)] = is_trivial_in(p.base(), pi.base, img);
  });
  c.relators_trivial = static_cast<int>(std::count(rel_ok.begin(), rel_ok.end(), 1));
  for (std::size_t m = 0; m < p.matches().size(); ++m) {
    if (pi.match_stable[m] != 0) continue;
    const auto& mt = p.matches()[m];
    const Word img = pi.transport[static_cast<std::size_t>(mt.minus.copy)] * pi.match_core[m] *
                     pi.transport[static_cast<std::size_t>(mt.plus.copy)].inverse();
    if (is_trivial_in(p.base(), pi.base, cyclic_reduce(img).cyclic.word())) ++c.tree_letters_trivial;
  }
  c.holds = c.connected && c.relators == c.matches && c.generators == expected_generators &&
            c.stable_letters == c.matches - (c.copies - 1) && c.relators_trivial == c.relators &&
            c.tree_letters_trivial == c.matches - c.stable_letters;
  return c;
}

// Peripheral words of each copy coming from matched elevations, in the
// copy's spanning-tree basis.
inline std::vector<std::vector<CyclicWord>> matched_multiwords(const PreCover& p) {
  std::vector<SpanningTree<CoverGraph>> trees;
  for (const auto& c : p.covers()) trees.emplace_back(c);
  // Copies sharing a cover share their elevation classes.
  std::map<ElevationId, std::pair<ConjClassRep, int>> cache;
  std::vector<PeripheralStructure> structures(static_cast<std::size_t>(p.copy_count()));
  for (const auto& m : p.matches()) {
    for (const auto* id : {&m.plus, &m.minus}) {
      const auto& vc = p.copies()[static_cast<std::size_t>(id->copy)];
      const ElevationId key{vc.cover, id->edge, id->side, id->index};
      auto it = cache.find(key);
      if (it == cache.end()) {
        const Word element = elevation_element(trees[static_cast<std::size_t>(vc.cover)],
                                               p.base().word(id->edge, id->side), p.elevation(*id));
        const auto r = root(cyclic_reduce(element).cyclic);
        it = cache.emplace(key, std::pair{canonical_class(r.root), r.exponent}).first;
      }
      structures[static_cast<std::size_t>(id->copy)].insert(it->second.first, it->second.second);
    }
  }
  std::vector<std::vector<CyclicWord>> out;
  for (const auto& s : structures) out.push_back(s.words());
  return out;
}

inline OneEndedCertificate one_ended_certificate(const PreCover& p, int rank_cap = kDefaultRankCap, int threads = 1) {
  require(p.connected(), ErrorKind::Precondition, "pre-cover is disconnected");
  OneEndedCertificate c;
  const auto words = matched_multiwords(p);
  c.copies.resize(static_cast<std::size_t>(p.copy_count()));
  std::vector<std::string> cap_failure(c.copies.size());
  detail::parallel_for(p.copy_count(), threads, [&](int i) {
    const auto& vc = p.copies()[static_cast<std::size_t>(i)];
    const auto& cover = p.covers()[static_cast<std::size_t>(vc.cover)];
    auto& w = c.copies[static_cast<std::size_t>(i)];
    w.copy = i;
    w.vertex = vc.vertex;
    w.rank = 1 + cover.degree() * (cover.rank() - 1);
    w.classes = static_cast<int>(words[static_cast<std::size_t>(i)].size());
    try {
      const auto r = is_freely_indecomposable(words[static_cast<std::size_t>(i)], w.rank, rank_cap);
      w.graph_vertices = r.graph.graph.vertex_count;
      w.graph_edges = static_cast<int>(r.graph.graph.edges.size());
      w.connected = is_connected(r.graph.graph);
      w.cut_vertices = w.connected ? static_cast<int>(articulation_points(r.graph.graph).size()) : 0;
      w.minimized = r.minimized;
      w.indecomposable = r.indecomposable;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CapExceeded) throw;
      cap_failure[static_cast<std::size_t>(i)] = e.what();
    }
  });
  c.holds = true;
  for (const auto& w : c.copies) {
    if (w.indecomposable) continue;
    c.holds = false;
    if (c.failure.empty()) {
      const auto& cap = cap_failure[static_cast<std::size_t>(w.copy)];
      c.failure = "copy " + std::to_string(w.copy) +
                  (cap.empty() ? std::string(" is freely decomposable relative to its edges") : ": " + cap);
    }
  }
  return c;
}

inline InfiniteIndexCertificate infinite_index_certificate(const PreCover& p) {
  InfiniteIndexCertificate c;
  c.base_reduced = is_reduced(p.base());
  c.hanging = p.hanging();
  if (!c.base_reduced) {
    c.reason = "base graph is not reduced; apply collapse_reduce first";
  } else if (c.hanging.empty()) {
    c.reason = "no hanging elevation: the pre-cover is a finite cover";
  } else {
    c.applicable = true;
  }
  return c;
}

struct Certificates {
  MonomorphismCertificate monomorphism;
  OneEndedCertificate one_ended;
  InfiniteIndexCertificate infinite_index;

  bool all_hold() const { return monomorphism.holds && one_ended.holds && infinite_index.applicable; }
  bool operator==(const Certificates&) const = default;
};

inline Certificates certify(const PreCover& p, int rank_cap = kDefaultRankCap, int threads = 1) {
  const auto pi = pi1_precover(p);
  return {monomorphism_certificate(p, pi, threads), one_ended_certificate(p, rank_cap, threads),
          infinite_index_certificate(p)};
}

// Connected component of a pre-cover containing `root`, copies renumbered in
// their original order.
inline PreCover component_of(const PreCover& p, int root) {
  const auto [id, count] = components(p.underlying_graph());
  (void)count;
  const int target = id[static_cast<std::size_t>(root)];
  std::vector<int> number(static_cast<std::size_t>(p.copy_count()), -1);
  std::vector<VertexCopy> copies;
  for (int c = 0; c < p.copy_count(); ++c) {
    if (id[static_cast<std::size_t>(c)] != target) continue;
    number[static_cast<std::size_t>(c)] = static_cast<int>(copies.size());
    copies.push_back(p.copies()[static_cast<std::size_t>(c)]);
  }
  std::vector<Match> matches;
  for (const auto& m : p.matches()) {
    if (number[static_cast<std::size_t>(m.plus.copy)] < 0) continue;
    Match n = m;
    n.plus.copy = number[static_cast<std::size_t>(m.plus.copy)];
    n.minus.copy = number[static_cast<std::size_t>(m.minus.copy)];
    matches.push_back(n);
  }
  return glue(p.base(), p.covers(), std::move(copies), std::move(matches));
}

struct BuildOptions {
  int rank_cap = kDefaultRankCap;
  std::size_t degree_cap = kDefaultDegreeCap;
  ExtendOptions extend;
  bool assume_rigid = false;  // skip the rigid-candidate gate
  int threads = 1;
};

struct Bookkeeping {
  int m = 0;                   // edges of the covering graph with one end at the chosen vertex copy
  int n = 0;                   // loops there
  int y_copies = 0;
  int z_copies = 0;
  int xprime_copies = 0;
  int elevations_per_map = 0;  // m + 2n - 1
  int hanging_before = 0;      // m + 2n
  int copies_before = 0;
  int copies_after = 0;
  int hanging_after = 0;
};

struct BuildResult {
  PairClassification classification;
  CoverGraph clean_cover;
  int extension_degree = 0;
  bool extension_mirrored = false;
  Bookkeeping bookkeeping;
  PreCover precover;
  Pi1Result pi1;
  Certificates certificates;
};

// The one-ended subgroup construction: copies Y of the chosen vertex copy
// with one designated elevation left out each, copies Z of the rest of the
// finite cover, glued order-preservingly, then the component of Y_1.
inline BuildResult build_one_ended_subgroup(const GraphOfGroups& g, int v, const BuildOptions& options = {}) {
  check_valid(g);
  require(v >= 0 && v < g.vertex_count(), ErrorKind::Validation, "unknown vertex");
  require(is_reduced(g), ErrorKind::Precondition, "graph of groups is not reduced; run collapse_reduce first");
  const int rank = g.vertices[static_cast<std::size_t>(v)].rank;
  const auto ps = vertex_peripheral_structure(g, v);
  BuildResult out;
  out.classification = classify_pair(ps.words(), rank, options.rank_cap);
  const auto tag = out.classification.tag;
  if (!options.assume_rigid) {
    require(tag == PairTag::RigidCandidate, ErrorKind::Precondition,
            std::string("vertex ") + g.vertices[static_cast<std::size_t>(v)].name + " is " + to_string(tag) +
                ", not a rigid candidate");
  } else {
    require(tag != PairTag::ThricePuncturedSphere && tag != PairTag::Decomposable, ErrorKind::Precondition,
            std::string("rigidity override refused for a ") + to_string(tag) + " vertex");
  }
  for (int u = 0; u < g.vertex_count(); ++u) {
    if (u == v) continue;
    const auto w = is_freely_indecomposable(vertex_peripheral_structure(g, u).words(),
                                            g.vertices[static_cast<std::size_t>(u)].rank, options.rank_cap);
    require(w.indecomposable, ErrorKind::Precondition,
            "vertex " + g.vertices[static_cast<std::size_t>(u)].name + " is freely decomposable");
  }

  out.clean_cover = clean_subgroup(ps.words(), CoverGraph::rose(rank), options.degree_cap);
  auto ext = extend_to_cover(g, v, out.clean_cover, options.extend);
  if (!ext.result) {
    fail(ErrorKind::SearchExhausted,
         "no finite cover extending the clean cover found up to degree " + std::to_string(options.extend.max_degree) +
             (ext.budget_exhausted ? " (search budget exhausted)" : ""));
  }
  out.extension_degree = ext.result->degree;
  out.extension_mirrored = ext.result->mirrored;
  const PreCover& xhat = ext.result->cover;
  const int vhat = ext.result->designated_copy;

  // Edges of the covering graph at vhat.
  struct Side {
    ElevationId at_vhat;
    ElevationId far;
  };
  std::vector<Side> e_list;
  std::vector<std::pair<ElevationId, ElevationId>> f_list;  // (+ end, - end), both at vhat
  std::vector<int> xprime_copies;
  std::vector<int> xprime_number(static_cast<std::size_t>(xhat.copy_count()), -1);
  for (int c = 0; c < xhat.copy_count(); ++c) {
    if (c == vhat) continue;
    xprime_number[static_cast<std::size_t>(c)] = static_cast<int>(xprime_copies.size());
    xprime_copies.push_back(c);
  }
  std::vector<Match> xprime_matches;
  for (const auto& mt : xhat.matches()) {
    const bool p_at = mt.plus.copy == vhat;
    const bool m_at = mt.minus.copy == vhat;
    if (p_at && m_at) {
      f_list.push_back({mt.plus, mt.minus});
    } else if (p_at) {
      e_list.push_back({mt.plus, mt.minus});
    } else if (m_at) {
      e_list.push_back({mt.minus, mt.plus});
    } else {
      xprime_matches.push_back(mt);
    }
  }
  auto& bk = out.bookkeeping;
  bk.m = static_cast<int>(e_list.size());
  bk.n = static_cast<int>(f_list.size());
  bk.y_copies = bk.m + 2 * bk.n;
  bk.z_copies = bk.m + 2 * bk.n - 1;
  bk.xprime_copies = static_cast<int>(xprime_copies.size());
  bk.elevations_per_map = bk.m + 2 * bk.n - 1;
  require(bk.y_copies >= 1, ErrorKind::Precondition, "chosen vertex copy has no incident edges");

  // Copies: Y_1..Y_m, then Y_j^+, Y_j^- for each loop, then the Z blocks.
  std::vector<VertexCopy> copies;
  const auto vhat_copy = xhat.copies()[static_cast<std::size_t>(vhat)];
  for (int i = 0; i < bk.y_copies; ++i) copies.push_back(vhat_copy);
  auto y_plus = [&](int j) { return bk.m + 2 * j; };
  auto y_minus = [&](int j) { return bk.m + 2 * j + 1; };
  const int z_base = bk.y_copies;
  for (int k = 0; k < bk.z_copies; ++k) {
    for (int c : xprime_copies) copies.push_back(xhat.copies()[static_cast<std::size_t>(c)]);
  }
  auto z_copy = [&](int k, int xhat_copy) {
    return z_base + k * bk.xprime_copies + xprime_number[static_cast<std::size_t>(xhat_copy)];
  };
  auto with_copy = [](ElevationId id, int copy) {
    id.copy = copy;
    return id;
  };
  auto make_match = [](const ElevationId& a, const ElevationId& b) {
    return a.side == 0 ? Match{a, b} : Match{b, a};
  };

  std::vector<Match> matches;
  for (int k = 0; k < bk.z_copies; ++k) {
    for (const auto& mt : xprime_matches) {
      matches.push_back({with_copy(mt.plus, z_copy(k, mt.plus.copy)), with_copy(mt.minus, z_copy(k, mt.minus.copy))});
    }
  }
  std::vector<int> in_e(static_cast<std::size_t>(bk.m), 0);
  for (int i = 0; i < bk.m; ++i) {
    int k = 0;
    for (int y = 0; y < bk.y_copies; ++y) {
      if (y == i) continue;
      const auto& side = e_list[static_cast<std::size_t>(i)];
      matches.push_back(make_match(with_copy(side.at_vhat, y), with_copy(side.far, z_copy(k, side.far.copy))));
      ++k;
      ++in_e[static_cast<std::size_t>(i)];
    }
  }
  for (int j = 0; j < bk.n; ++j) {
    std::vector<int> plus_hosts, minus_hosts;
    for (int y = 0; y < bk.y_copies; ++y) {
      if (y != y_plus(j)) plus_hosts.push_back(y);
      if (y != y_minus(j)) minus_hosts.push_back(y);
    }
    for (std::size_t k = 0; k < plus_hosts.size(); ++k) {
      matches.push_back({with_copy(f_list[static_cast<std::size_t>(j)].first, plus_hosts[k]),
                         with_copy(f_list[static_cast<std::size_t>(j)].second, minus_hosts[k])});
    }
    require(static_cast<int>(plus_hosts.size()) == bk.elevations_per_map, ErrorKind::Contract,
            "loop elevation count does not balance");
  }
  for (int count : in_e) {
    require(count == bk.elevations_per_map, ErrorKind::Contract, "edge elevation count does not balance");
  }

  const PreCover whole = glue(g, xhat.covers(), copies, std::move(matches));
  bk.copies_before = whole.copy_count();
  bk.hanging_before = static_cast<int>(whole.hanging().size());
  require(bk.hanging_before == bk.m + 2 * bk.n, ErrorKind::Contract,
          "hanging elevations before selecting a component: expected " + std::to_string(bk.m + 2 * bk.n) + ", got " +
              std::to_string(bk.hanging_before));
  out.precover = component_of(whole, 0);
  bk.copies_after = out.precover.copy_count();
  bk.hanging_after = static_cast<int>(out.precover.hanging().size());

  out.pi1 = pi1_precover(out.precover);
  out.certificates = {monomorphism_certificate(out.precover, out.pi1, options.threads),
                      one_ended_certificate(out.precover, options.rank_cap, options.threads),
                      infinite_index_certificate(out.precover)};
  if (!out.certificates.all_hold()) {
    std::string why;
    if (!out.certificates.monomorphism.holds) why += " monomorphism check failed;";
    if (!out.certificates.one_ended.holds) why += " one-endedness failed: " + out.certificates.one_ended.failure + ";";
    if (!out.certificates.infinite_index.applicable) why += " infinite index: " + out.certificates.infinite_index.reason + ";";
    fail(ErrorKind::Contract, "construction produced failing certificates:" + why);
  }
  return out;
}

}  // namespace oneend
