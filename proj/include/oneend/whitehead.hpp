#pragma once

// Whitehead graphs of multiwords, Whitehead moves and greedy minimisation,
// free-splitting witnesses, ribbon-graph surface recognition, pair
// classification, the spliced Whitehead graph of a pullback, and the local
// connectivity check for clean covers.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "oneend/error.hpp"
#include "oneend/multigraph.hpp"
#include "oneend/stallings.hpp"
#include "oneend/words.hpp"

namespace oneend {

inline constexpr int kDefaultRankCap = 4;

// Multigraph on the 2r letter slots (a, A, b, B, ...); slot s pairs with s^1.
struct WhiteheadGraph {
  int rank = 1;
  Multigraph graph;

  int degree(Letter l) const { return graph.degrees()[static_cast<std::size_t>(letter_slot(l))]; }
  std::size_t edge_count() const { return graph.edges.size(); }
};

// Adjacent letters x, y (cyclically) contribute the edge {x, y^-1}. Edges are
// tagged with the index of the word they come from.
inline WhiteheadGraph whitehead_graph(const Basis& basis, const std::vector<CyclicWord>& ws) {
  WhiteheadGraph w{basis.rank, {2 * basis.rank, {}}};
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto& c = ws[i];
    require(!c.empty(), ErrorKind::Validation, "Whitehead graph of the empty word");
    check_in_basis(basis, c.word());
    for (std::size_t p = 0; p < c.size(); ++p) {
      const Letter x = c[p];
      const Letter y = c[(p + 1) % c.size()];
      w.graph.edges.push_back({letter_slot(x), letter_slot(-y), static_cast<int>(i)});
    }
  }
  return w;
}

inline int inferred_rank(const std::vector<CyclicWord>& ws) {
  int r = 1;
  for (const auto& w : ws) r = std::max(r, w.word().max_index());
  return r;
}

// Whitehead automorphism (A, a): a is fixed; a letter x outside {a, a^-1}
// maps to x a when only x lies in A, to a^-1 x when only x^-1 does, and to
// a^-1 x a when both do.
struct WhiteheadMove {
  Letter special = 1;
  std::uint64_t subset = 0;  // bit per letter slot

  bool in_subset(Letter l) const { return (subset >> letter_slot(l)) & 1U; }

  std::vector<Letter> members(int rank) const {
    std::vector<Letter> out;
    for (Letter l : Basis(rank).letters()) {
      if (in_subset(l)) out.push_back(l);
    }
    return out;
  }

  static WhiteheadMove make(Letter special, const std::vector<Letter>& subset) {
    WhiteheadMove m{special, 0};
    for (Letter l : subset) m.subset |= std::uint64_t{1} << letter_slot(l);
    m.subset |= std::uint64_t{1} << letter_slot(special);
    return m;
  }

  bool well_formed(int rank) const {
    const std::uint64_t all = (rank >= 32) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (2 * rank)) - 1);
    return std::abs(special) <= rank && in_subset(special) && !in_subset(-special) && (subset & ~all) == 0;
  }

  Word image(Letter x) const {
    if (x == special || x == -special) return Word::letter(x);
    std::vector<Letter> out;
    if (in_subset(-x)) out.push_back(-special);
    out.push_back(x);
    if (in_subset(x)) out.push_back(special);
    return Word::reduced(out);
  }

  Word apply(const Word& w) const {
    Word out;
    for (Letter l : w.letters()) out *= image(l);
    return out;
  }

  WhiteheadMove inverse() const {
    WhiteheadMove m = *this;
    m.special = -special;
    m.subset &= ~(std::uint64_t{1} << letter_slot(special));
    m.subset |= std::uint64_t{1} << letter_slot(-special);
    return m;
  }

  std::string str(int rank) const {
    std::string s = "(" + letter_name(special) + "; {";
    bool first = true;
    for (Letter l : members(rank)) {
      if (!first) s += ",";
      s += letter_name(l);
      first = false;
    }
    return s + "})";
  }

  bool operator==(const WhiteheadMove&) const = default;
};

inline std::vector<CyclicWord> apply_move(const WhiteheadMove& m, const std::vector<CyclicWord>& ws) {
  std::vector<CyclicWord> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(cyclic_reduce(m.apply(w.word())).cyclic);
  return out;
}

// All nontrivial moves in canonical order: special letter by letter order,
// then subset bitmask ascending. Skips A = {a} and A = all but a^-1, which
// act trivially on cyclic words.
inline std::vector<WhiteheadMove> all_moves(int rank) {
  std::vector<WhiteheadMove> out;
  const int n = 2 * rank;
  for (Letter a : Basis(rank).letters()) {
    const int sa = letter_slot(a);
    const int sA = letter_slot(-a);
    std::vector<int> others;
    for (int s = 0; s < n; ++s) {
      if (s != sa && s != sA) others.push_back(s);
    }
    const std::uint64_t count = std::uint64_t{1} << others.size();
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      std::uint64_t mask = std::uint64_t{1} << sa;
      for (std::size_t k = 0; k < others.size(); ++k) {
        if ((bits >> k) & 1U) mask |= std::uint64_t{1} << others[k];
      }
      if (bits == 0 || bits == count - 1) continue;
      out.push_back({a, mask});
    }
  }
  return out;
}

// Change in total length predicted by the Whitehead graph: edges crossing
// from A to its complement, minus the valence of the special letter.
inline long move_length_delta(const WhiteheadGraph& g, const WhiteheadMove& m) {
  long cross = 0;
  for (const auto& e : g.graph.edges) {
    const bool in_u = m.in_subset(slot_letter(e.u));
    const bool in_v = m.in_subset(slot_letter(e.v));
    cross += in_u != in_v;
  }
  return cross - g.degree(m.special);
}

struct MinimizeResult {
  std::vector<CyclicWord> words;
  std::vector<WhiteheadMove> moves;
};

inline void check_rank_cap(int rank, int rank_cap) {
  require(rank <= rank_cap, ErrorKind::CapExceeded,
          "rank " + std::to_string(rank) + " exceeds rank cap " + std::to_string(rank_cap));
}

inline std::optional<WhiteheadMove> first_reducing_move(const std::vector<CyclicWord>& ws, int rank) {
  const WhiteheadGraph g = whitehead_graph(Basis(rank), ws);
  for (const auto& m : all_moves(rank)) {
    if (move_length_delta(g, m) < 0) return m;
  }
  return std::nullopt;
}

// Greedy descent: repeatedly applies the first strictly length-decreasing move.
inline MinimizeResult minimize(const std::vector<CyclicWord>& ws, int rank, int rank_cap = kDefaultRankCap) {
  check_rank_cap(rank, rank_cap);
  MinimizeResult r{ws, {}};
  while (auto m = first_reducing_move(r.words, rank)) {
    const auto next = apply_move(*m, r.words);
    require(total_length(next) < total_length(r.words), ErrorKind::Contract,
            "Whitehead move predicted a decrease that did not happen");
    r.words = next;
    r.moves.push_back(*m);
  }
  return r;
}

// Blocks of basis indices such that every word uses letters of a single
// block. Empty when the graph does not separate basis letters this way.
inline std::vector<std::vector<int>> free_factor_partition(const WhiteheadGraph& g) {
  const auto [id, count] = components(g.graph);
  if (count < 2) return {};
  // Merge each component with the component of the inverse letters.
  std::vector<int> parent(static_cast<std::size_t>(count));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (int i = 0; i < g.rank; ++i) {
    const int p = find(id[static_cast<std::size_t>(2 * i)]);
    const int q = find(id[static_cast<std::size_t>(2 * i + 1)]);
    if (p != q) parent[static_cast<std::size_t>(p)] = q;
  }
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of(static_cast<std::size_t>(count), -1);
  for (int i = 0; i < g.rank; ++i) {
    const int root = find(id[static_cast<std::size_t>(2 * i)]);
    if (block_of[static_cast<std::size_t>(root)] < 0) {
      block_of[static_cast<std::size_t>(root)] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(block_of[static_cast<std::size_t>(root)])].push_back(i);
  }
  if (blocks.size() < 2) return {};
  return blocks;
}

struct IndecomposabilityWitness {
  bool indecomposable = false;
  bool minimized = false;  // false when the answer came from the input graph
  std::vector<WhiteheadMove> moves;
  std::vector<CyclicWord> words;  // words in the basis the verdict refers to
  WhiteheadGraph graph;
  std::vector<std::vector<int>> partition;  // free factors when decomposable
};

// Disconnected Whitehead graph: decomposable. Connected without cut vertex:
// indecomposable. Only a cut vertex forces minimisation (under the rank cap).
// An empty multiword is decomposable: the free group itself splits freely.
inline IndecomposabilityWitness is_freely_indecomposable(const std::vector<CyclicWord>& ws, int rank,
                                                         int rank_cap = kDefaultRankCap) {
  IndecomposabilityWitness out;
  out.words = ws;
  out.graph = whitehead_graph(Basis(rank), ws);
  if (!is_connected(out.graph.graph)) {
    out.partition = free_factor_partition(out.graph);
    if (out.partition.empty() && rank <= rank_cap) {
      auto m = minimize(ws, rank, rank_cap);
      out.minimized = true;
      out.moves = std::move(m.moves);
      out.words = std::move(m.words);
      out.graph = whitehead_graph(Basis(rank), out.words);
      out.partition = free_factor_partition(out.graph);
    }
    return out;
  }
  if (articulation_points(out.graph.graph).empty()) {
    out.indecomposable = true;
    return out;
  }
  auto m = minimize(ws, rank, rank_cap);
  out.minimized = true;
  out.moves = std::move(m.moves);
  out.words = std::move(m.words);
  out.graph = whitehead_graph(Basis(rank), out.words);
  out.indecomposable = is_connected(out.graph.graph);
  if (out.indecomposable) {
    require(articulation_points(out.graph.graph).empty(), ErrorKind::Contract,
            "minimal Whitehead graph has a cut vertex");
  } else {
    out.partition = free_factor_partition(out.graph);
  }
  return out;
}

// One-vertex ribbon graph: a cyclic order of the 2r half-edges (half-edge 2i
// leaves along letter i, 2i+1 arrives) and a twist bit per edge.
struct RibbonStructure {
  std::vector<int> cyclic_order;
  std::vector<int> twists;
};

struct SurfaceData {
  bool orientable = true;
  int genus = 0;  // crosscap number when non-orientable
  int boundary = 0;
  RibbonStructure ribbon;
  std::vector<CyclicWord> boundary_words;

  int euler_characteristic() const { return orientable ? 2 - 2 * genus - boundary : 2 - genus - boundary; }
};

inline std::vector<CyclicWord> ribbon_boundary(int rank, const RibbonStructure& rs) {
  const int n = 2 * rank;
  std::vector<int> next(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    next[static_cast<std::size_t>(rs.cyclic_order[static_cast<std::size_t>(i)])] =
        rs.cyclic_order[static_cast<std::size_t>((i + 1) % n)];
  }
  // Flags (half-edge, side) encoded as 2h + side.
  auto alpha0 = [&](int f) {
    const int h = f / 2;
    const int s = f % 2;
    const int partner = h ^ 1;
    const bool twisted = rs.twists[static_cast<std::size_t>(h / 2)] != 0;
    return 2 * partner + (twisted ? s : 1 - s);
  };
  std::vector<int> prev(static_cast<std::size_t>(n));
  for (int h = 0; h < n; ++h) prev[static_cast<std::size_t>(next[static_cast<std::size_t>(h)])] = h;
  auto alpha1 = [&](int f) {
    const int h = f / 2;
    return f % 2 == 1 ? 2 * next[static_cast<std::size_t>(h)] : 2 * prev[static_cast<std::size_t>(h)] + 1;
  };
  std::vector<char> seen(static_cast<std::size_t>(2 * n), 0);
  std::vector<CyclicWord> out;
  for (int f0 = 0; f0 < 2 * n; ++f0) {
    if (seen[static_cast<std::size_t>(f0)]) continue;
    std::vector<Letter> letters;
    int f = f0;
    do {
      const int h = f / 2;
      letters.push_back(h % 2 == 0 ? h / 2 + 1 : -(h / 2 + 1));
      seen[static_cast<std::size_t>(f)] = 1;
      f = alpha0(f);
      seen[static_cast<std::size_t>(f)] = 1;
      f = alpha1(f);
    } while (f != f0);
    out.push_back(cyclic_reduce(Word::reduced(letters)).cyclic);
  }
  return out;
}

namespace detail {

inline std::vector<ConjClassRep> class_multiset(const std::vector<CyclicWord>& ws) {
  std::vector<ConjClassRep> out;
  for (const auto& w : ws) {
    if (w.empty()) return {};
    out.push_back(canonical_class(w));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Exhaustive search over one-vertex ribbon graphs whose boundary matches ws
// class by class. Orientable structures are tried first. Input must be
// Whitehead-minimal.
inline std::optional<SurfaceData> surface_recognize(const std::vector<CyclicWord>& ws, int rank,
                                                    int rank_cap = kDefaultRankCap) {
  check_rank_cap(rank, rank_cap);
  require(!first_reducing_move(ws, rank), ErrorKind::Precondition,
          "surface recognition needs a Whitehead-minimal multiword");
  std::vector<int> count(static_cast<std::size_t>(rank), 0);
  for (const auto& w : ws) {
    for (Letter l : w.word().letters()) ++count[static_cast<std::size_t>(letter_index(l))];
  }
  if (std::any_of(count.begin(), count.end(), [](int c) { return c != 2; })) return std::nullopt;
  const auto target = detail::class_multiset(ws);
  if (target.empty()) return std::nullopt;

  const int n = 2 * rank;
  for (int twisted_pass = 0; twisted_pass < 2; ++twisted_pass) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    do {
      const std::uint32_t masks = twisted_pass == 0 ? 1U : (1U << rank);
      for (std::uint32_t mask = twisted_pass == 0 ? 0U : 1U; mask < masks; ++mask) {
        RibbonStructure rs{order, std::vector<int>(static_cast<std::size_t>(rank), 0)};
        for (int i = 0; i < rank; ++i) rs.twists[static_cast<std::size_t>(i)] = (mask >> i) & 1U;
        auto boundary = ribbon_boundary(rank, rs);
        if (boundary.size() != ws.size() || detail::class_multiset(boundary) != target) continue;
        SurfaceData s;
        s.orientable = mask == 0;
        s.boundary = static_cast<int>(boundary.size());
        s.genus = s.orientable ? (1 + rank - s.boundary) / 2 : 1 + rank - s.boundary;
        s.ribbon = std::move(rs);
        s.boundary_words = std::move(boundary);
        require(s.euler_characteristic() == 1 - rank, ErrorKind::Contract, "ribbon surface has wrong Euler characteristic");
        return s;
      }
    } while (std::next_permutation(order.begin() + 1, order.end()));
  }
  return std::nullopt;
}

enum class PairTag { Decomposable, Surface, ThricePuncturedSphere, RigidCandidate, Inconclusive };

inline const char* to_string(PairTag t) {
  switch (t) {
    case PairTag::Decomposable: return "DECOMPOSABLE";
    case PairTag::Surface: return "SURFACE";
    case PairTag::ThricePuncturedSphere: return "THRICE_PUNCTURED_SPHERE";
    case PairTag::RigidCandidate: return "RIGID_CANDIDATE";
    case PairTag::Inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

struct PairClassification {
  PairTag tag = PairTag::Inconclusive;
  std::vector<WhiteheadMove> moves;
  std::vector<CyclicWord> minimal_words;
  WhiteheadGraph graph;
  ConnectivityReport report;
  std::optional<SurfaceData> surface;
  std::vector<std::vector<int>> partition;
};

inline PairClassification classify_pair(const std::vector<CyclicWord>& ws, int rank, int rank_cap = kDefaultRankCap) {
  PairClassification c;
  auto m = minimize(ws, rank, rank_cap);
  c.moves = std::move(m.moves);
  c.minimal_words = std::move(m.words);
  c.graph = whitehead_graph(Basis(rank), c.minimal_words);
  c.report = connectivity_report(c.graph.graph);
  if (!c.report.connected) {
    c.tag = PairTag::Decomposable;
    c.partition = free_factor_partition(c.graph);
    return c;
  }
  require(c.report.cut_vertices.empty(), ErrorKind::Contract, "minimal Whitehead graph has a cut vertex");
  c.surface = surface_recognize(c.minimal_words, rank, rank_cap);
  if (c.surface) {
    const bool pants = c.surface->orientable && c.surface->genus == 0 && c.surface->boundary == 3;
    c.tag = pants ? PairTag::ThricePuncturedSphere : PairTag::Surface;
    return c;
  }
  c.tag = c.report.cut_edge_pairs.empty() && c.report.cut_vertex_edge_pairs.empty() ? PairTag::RigidCandidate
                                                                                     : PairTag::Inconclusive;
  return c;
}

// Splices one copy of W(ws) per sheet of the cover along its spanning-tree
// edges, then names the surviving vertices by the spanning-tree generators:
// the non-tree edge u -x-> v gives (v, x) -> g and (u, x^-1) -> g^-1. Edge tags
// are elevation indices, numbered word by word in elevation order.
inline WhiteheadGraph spliced_pullback_graph(const CoverGraph& c, const std::vector<CyclicWord>& ws) {
  const int r = c.rank();
  const int d = c.degree();
  const int n_slots = 2 * r;
  const SpanningTree<CoverGraph> tree(c);
  Multigraph copies;
  copies.vertex_count = d * n_slots;
  auto vertex = [&](int sheet, Letter l) { return sheet * n_slots + letter_slot(l); };

  std::vector<int> word_offset;  // first edge index of each word
  int elevation_base = 0;
  for (const auto& w : ws) {
    require(!w.empty(), ErrorKind::Validation, "spliced graph of the empty word");
    word_offset.push_back(static_cast<int>(copies.edges.size()));
    std::vector<int> elevation_of(static_cast<std::size_t>(d), -1);
    const auto elev = elevations(c, w, tree);
    for (std::size_t e = 0; e < elev.size(); ++e) {
      for (int s : elev[e].orbit) elevation_of[static_cast<std::size_t>(s)] = elevation_base + static_cast<int>(e);
    }
    const auto L = w.size();
    for (int s = 0; s < d; ++s) {
      int v = s;
      for (std::size_t p = 0; p < L; ++p) {
        v = c.step(v, w[p]);
        copies.edges.push_back({vertex(v, w[p]), vertex(v, -w[(p + 1) % L]), elevation_of[static_cast<std::size_t>(s)]});
      }
    }
    elevation_base += static_cast<int>(elev.size());
  }

  std::vector<char> deleted(static_cast<std::size_t>(copies.vertex_count), 0);
  for (int v = 1; v < d; ++v) {
    const int u = tree.parent(v);
    for (int x = 1; x <= r; ++x) {
      // Tree edge between u and v, in whichever direction it is labelled.
      if (c.step(u, x) == v && tree.generator_of(u, x) < 0) {
        deleted[static_cast<std::size_t>(vertex(u, -x))] = 1;
        deleted[static_cast<std::size_t>(vertex(v, x))] = 1;
      }
      if (c.step(v, x) == u && tree.generator_of(v, x) < 0) {
        deleted[static_cast<std::size_t>(vertex(v, -x))] = 1;
        deleted[static_cast<std::size_t>(vertex(u, x))] = 1;
      }
    }
  }

  // Each traversal of a tree edge joins the departure end of one copy edge
  // with the arrival end of the next.
  std::map<EdgeEnd, EdgeEnd> partner;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto L = static_cast<int>(ws[i].size());
    for (int s = 0; s < d; ++s) {
      const int s_next = *read(c, s, ws[i].word());
      for (int p = 0; p < L; ++p) {
        const int here = word_offset[i] + s * L + p;
        const int there = p + 1 < L ? here + 1 : word_offset[i] + s_next * L;
        const EdgeEnd depart{here, 1};
        const EdgeEnd arrive{there, 0};
        const auto& e_here = copies.edges[static_cast<std::size_t>(here)];
        if (deleted[static_cast<std::size_t>(e_here.v)]) {
          partner[depart] = arrive;
          partner[arrive] = depart;
        }
      }
    }
  }
  const Multigraph spliced = splice_ends(copies, deleted, partner);

  std::vector<int> label;  // compact vertex -> generator slot
  for (int sheet = 0; sheet < d; ++sheet) {
    for (int slot = 0; slot < n_slots; ++slot) {
      if (deleted[static_cast<std::size_t>(sheet * n_slots + slot)]) continue;
      const Letter l = slot_letter(slot);
      int j;
      if (l > 0) {
        j = tree.generator_of(c.step(sheet, -l), l);
        label.push_back(2 * j);
      } else {
        j = tree.generator_of(sheet, -l);
        label.push_back(2 * j + 1);
      }
      require(j >= 0, ErrorKind::Contract, "surviving vertex is not on a non-tree edge");
    }
  }
  WhiteheadGraph out;
  out.rank = std::max(1, tree.generator_count());
  out.graph.vertex_count = 2 * out.rank;
  for (const auto& e : spliced.edges) {
    out.graph.edges.push_back({label[static_cast<std::size_t>(e.u)], label[static_cast<std::size_t>(e.v)], e.tag});
  }
  return out;
}

struct LocalTheoremReport {
  bool ok = false;
  bool connected = false;
  std::vector<int> cut_vertices;
  int vertex_count = 0;
  int edge_count = 0;
  int removed_edges = 0;
  int elevation_count = 0;
  std::optional<int> dropped;
};

// Removes the edges of one elevation (or none) from the spliced pullback graph
// and checks that what is left is connected with no cut vertex.
inline LocalTheoremReport local_theorem_check(const std::vector<CyclicWord>& ws, const CoverGraph& c,
                                              std::optional<int> drop_index, int rank_cap = kDefaultRankCap,
                                              bool assume_rigid = false) {
  const int rank = c.rank();
  if (!assume_rigid) {
    const auto cls = classify_pair(ws, rank, rank_cap);
    require(cls.tag == PairTag::RigidCandidate, ErrorKind::Precondition,
            std::string("local theorem check needs a rigid candidate, got ") + to_string(cls.tag));
  }
  require(!first_reducing_move(ws, rank), ErrorKind::Precondition, "multiword is not Whitehead-minimal");
  require(is_clean(c, ws), ErrorKind::Precondition, "cover is not clean for the multiword");
  const WhiteheadGraph g = spliced_pullback_graph(c, ws);
  LocalTheoremReport r;
  r.vertex_count = g.graph.vertex_count;
  r.dropped = drop_index;
  for (const auto& e : g.graph.edges) r.elevation_count = std::max(r.elevation_count, e.tag + 1);
  if (drop_index) {
    require(*drop_index >= 0 && *drop_index < r.elevation_count, ErrorKind::Validation, "drop index out of range");
  }
  Multigraph kept{g.graph.vertex_count, {}};
  for (const auto& e : g.graph.edges) {
    if (drop_index && e.tag == *drop_index) {
      ++r.removed_edges;
    } else {
      kept.edges.push_back(e);
    }
  }
  r.edge_count = static_cast<int>(kept.edges.size());
  r.connected = is_connected(kept);
  if (r.connected) r.cut_vertices = articulation_points(kept);
  r.ok = r.connected && r.cut_vertices.empty();
  return r;
}

}  // namespace oneend
