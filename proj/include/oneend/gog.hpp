#pragma once

// Graphs of free groups with infinite cyclic edge groups: validation,
// vertex peripheral structures, reducedness and collapsing, doubles,
// spanning-tree presentations, abelianisation, and the one-endedness test.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oneend/error.hpp"
#include "oneend/whitehead.hpp"
#include "oneend/words.hpp"

namespace oneend {

struct GogVertex {
  std::string name;
  int rank = 1;

  bool operator==(const GogVertex&) const = default;
};

// Edge e joins `from` (the + end, word_plus in its basis) to `to` (the - end).
struct GogEdge {
  std::string name;
  int from = 0;
  int to = 0;
  Word word_plus;
  Word word_minus;

  bool operator==(const GogEdge&) const = default;
};

struct GraphOfGroups {
  std::vector<GogVertex> vertices;
  std::vector<GogEdge> edges;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  std::optional<int> find_vertex(const std::string& name) const {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  int endpoint(int edge, int side) const {
    const auto& e = edges[static_cast<std::size_t>(edge)];
    return side == 0 ? e.from : e.to;
  }

  const Word& word(int edge, int side) const {
    const auto& e = edges[static_cast<std::size_t>(edge)];
    return side == 0 ? e.word_plus : e.word_minus;
  }

  bool operator==(const GraphOfGroups&) const = default;
};

inline std::vector<std::string> validate(const GraphOfGroups& g) {
  std::vector<std::string> problems;
  if (g.vertices.empty()) problems.push_back("graph has no vertices");
  std::set<std::string> names;
  for (const auto& v : g.vertices) {
    if (v.rank < 1) problems.push_back("vertex " + v.name + " has rank below 1");
    if (!names.insert(v.name).second) problems.push_back("duplicate vertex name " + v.name);
  }
  std::set<std::string> edge_names;
  const int n = g.vertex_count();
  for (const auto& e : g.edges) {
    if (!edge_names.insert(e.name).second) problems.push_back("duplicate edge name " + e.name);
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      problems.push_back("edge " + e.name + " has an unknown endpoint");
      continue;
    }
    for (int side = 0; side < 2; ++side) {
      const Word& w = side == 0 ? e.word_plus : e.word_minus;
      const auto& v = g.vertices[static_cast<std::size_t>(side == 0 ? e.from : e.to)];
      const std::string where = "edge " + e.name + (side == 0 ? " (+ end)" : " (- end)");
      if (w.empty()) {
        problems.push_back(where + ": trivial attaching word, edge group is not infinite cyclic");
      } else if (!is_cyclically_reduced(w)) {
        problems.push_back(where + ": attaching word " + w.str() + " is not cyclically reduced");
      }
      if (w.max_index() > v.rank) {
        problems.push_back(where + ": word " + w.str() + " leaves the rank-" + std::to_string(v.rank) + " basis of " + v.name);
      }
    }
  }
  if (problems.empty() && n > 0) {
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
      return x;
    };
    for (const auto& e : g.edges) parent[static_cast<std::size_t>(find(e.from))] = find(e.to);
    for (int v = 0; v < n; ++v) {
      if (find(v) != find(0)) {
        problems.push_back("underlying graph is disconnected");
        break;
      }
    }
  }
  return problems;
}

inline void check_valid(const GraphOfGroups& g) {
  const auto problems = validate(g);
  if (problems.empty()) return;
  std::string msg = "invalid graph of groups:";
  for (const auto& p : problems) msg += " " + p + ";";
  fail(ErrorKind::Validation, msg);
}

// Attaching words at v, loops contributing both ends.
inline std::vector<Word> vertex_attaching_words(const GraphOfGroups& g, int v) {
  std::vector<Word> out;
  for (int e = 0; e < g.edge_count(); ++e) {
    for (int side = 0; side < 2; ++side) {
      if (g.endpoint(e, side) == v) out.push_back(g.word(e, side));
    }
  }
  return out;
}

inline PeripheralStructure vertex_peripheral_structure(const GraphOfGroups& g, int v) {
  return make_peripheral_structure(vertex_attaching_words(g, v));
}

struct ReducednessViolation {
  int edge = 0;
  int side = 0;
};

// Attaching maps that are onto a rank-1 vertex group.
inline std::vector<ReducednessViolation> reducedness_violations(const GraphOfGroups& g) {
  std::vector<ReducednessViolation> out;
  for (int e = 0; e < g.edge_count(); ++e) {
    for (int side = 0; side < 2; ++side) {
      const auto& v = g.vertices[static_cast<std::size_t>(g.endpoint(e, side))];
      if (v.rank == 1 && g.word(e, side).size() == 1) out.push_back({e, side});
    }
  }
  return out;
}

inline bool is_reduced(const GraphOfGroups& g) { return reducedness_violations(g).empty(); }

struct CollapseResult {
  GraphOfGroups graph;
  std::vector<std::string> absorbed;         // names of absorbed vertices, in order
  std::vector<std::string> loop_violations;  // loops onto rank-1 vertices that remain
};

// Collapses non-loop edges whose attaching map is onto a rank-1 endpoint: the
// amalgam is the other vertex group, and words at the absorbed vertex are
// rewritten as powers of the surviving end's word.
inline CollapseResult collapse_reduce(const GraphOfGroups& input) {
  check_valid(input);
  CollapseResult r{input, {}, {}};
  GraphOfGroups& g = r.graph;
  while (true) {
    std::optional<ReducednessViolation> pick;
    for (const auto& viol : reducedness_violations(g)) {
      const auto& e = g.edges[static_cast<std::size_t>(viol.edge)];
      if (e.from != e.to) {
        pick = viol;
        break;
      }
    }
    if (!pick) break;
    const int gone = g.endpoint(pick->edge, pick->side);
    const int keep = g.endpoint(pick->edge, 1 - pick->side);
    // The generator of the absorbed vertex equals this word of the kept vertex.
    const Word gen_image = g.word(pick->edge, pick->side)[0] > 0 ? g.word(pick->edge, 1 - pick->side)
                                                                : g.word(pick->edge, 1 - pick->side).inverse();
    r.absorbed.push_back(g.vertices[static_cast<std::size_t>(gone)].name);
    std::vector<GogEdge> edges;
    for (int i = 0; i < g.edge_count(); ++i) {
      if (i == pick->edge) continue;
      GogEdge e = g.edges[static_cast<std::size_t>(i)];
      if (e.from == gone) {
        e.word_plus = cyclic_reduce(gen_image.power(e.word_plus[0] > 0 ? static_cast<int>(e.word_plus.size())
                                                                       : -static_cast<int>(e.word_plus.size())))
                          .cyclic.word();
        e.from = keep;
      }
      if (e.to == gone) {
        e.word_minus = cyclic_reduce(gen_image.power(e.word_minus[0] > 0 ? static_cast<int>(e.word_minus.size())
                                                                         : -static_cast<int>(e.word_minus.size())))
                           .cyclic.word();
        e.to = keep;
      }
      edges.push_back(std::move(e));
    }
    std::vector<GogVertex> vertices;
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (v != gone) vertices.push_back(g.vertices[static_cast<std::size_t>(v)]);
    }
    for (auto& e : edges) {
      if (e.from > gone) --e.from;
      if (e.to > gone) --e.to;
    }
    g.vertices = std::move(vertices);
    g.edges = std::move(edges);
  }
  for (const auto& viol : reducedness_violations(g)) {
    r.loop_violations.push_back(g.edges[static_cast<std::size_t>(viol.edge)].name);
  }
  return r;
}

// D(F, ws): two copies of F joined by one edge per peripheral class.
inline GraphOfGroups double_of(const Basis& basis, const std::vector<Word>& ws) {
  const auto p = make_peripheral_structure(ws);
  GraphOfGroups g;
  g.vertices = {{"left", basis.rank}, {"right", basis.rank}};
  int i = 0;
  for (const auto& entry : p.entries()) {
    check_in_basis(basis, entry.root.word.word());
    g.edges.push_back({"e" + std::to_string(i++), 0, 1, entry.root.word.word(), entry.root.word.word()});
  }
  return g;
}

// Two vertices of equal rank, every edge left -> right with equal words.
inline bool is_double(const GraphOfGroups& g) {
  if (g.vertex_count() != 2 || g.vertices[0].rank != g.vertices[1].rank) return false;
  return std::all_of(g.edges.begin(), g.edges.end(), [](const GogEdge& e) {
    return e.from == 0 && e.to == 1 && e.word_plus == e.word_minus;
  });
}

// Finitely presented group; relator letters index generators (1-based).
struct Presentation {
  std::vector<std::string> generators;
  std::vector<Word> relators;

  int generator_count() const { return static_cast<int>(generators.size()); }
};

struct GogPresentation {
  Presentation presentation;
  std::vector<int> vertex_offset;  // generator index of letter 1 of each vertex, minus one
  std::vector<int> stable_letter;  // per edge; 0 on spanning-tree edges
  std::vector<int> tree_parent_edge;  // per vertex; -1 at the root

  Letter vertex_letter(int v, Letter l) const {
    const int g = vertex_offset[static_cast<std::size_t>(v)] + std::abs(l);
    return l > 0 ? g : -g;
  }

  Word vertex_word(int v, const Word& w) const {
    Word out;
    for (Letter l : w.letters()) out.push_back(vertex_letter(v, l));
    return out;
  }
};

// Breadth-first spanning tree from vertex 0, edges scanned in index order.
inline std::vector<char> gog_spanning_tree(const GraphOfGroups& g, std::vector<int>* parent_edge = nullptr) {
  std::vector<char> tree(static_cast<std::size_t>(g.edge_count()), 0);
  std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()), -1);
  std::vector<char> seen(static_cast<std::size_t>(g.vertex_count()), 0);
  std::vector<int> order{0};
  seen[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edges[static_cast<std::size_t>(e)];
      int other = -1;
      if (ed.from == order[i]) other = ed.to;
      if (ed.to == order[i]) other = ed.from;
      if (other < 0 || seen[static_cast<std::size_t>(other)]) continue;
      seen[static_cast<std::size_t>(other)] = 1;
      tree[static_cast<std::size_t>(e)] = 1;
      parent[static_cast<std::size_t>(other)] = e;
      order.push_back(other);
    }
  }
  if (parent_edge) *parent_edge = std::move(parent);
  return tree;
}

// Generators: vertex letters, then one stable letter per non-tree edge.
// Relators: t w+ t^-1 (w-)^-1, with t omitted on tree edges.
inline GogPresentation presentation(const GraphOfGroups& g) {
  check_valid(g);
  GogPresentation out;
  auto& p = out.presentation;
  for (const auto& v : g.vertices) {
    out.vertex_offset.push_back(p.generator_count());
    for (int i = 1; i <= v.rank; ++i) p.generators.push_back(v.name + "." + letter_name(i));
  }
  const auto tree = gog_spanning_tree(g, &out.tree_parent_edge);
  out.stable_letter.assign(static_cast<std::size_t>(g.edge_count()), 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (tree[static_cast<std::size_t>(e)]) continue;
    p.generators.push_back("t." + g.edges[static_cast<std::size_t>(e)].name);
    out.stable_letter[static_cast<std::size_t>(e)] = p.generator_count();
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edges[static_cast<std::size_t>(e)];
    const int t = out.stable_letter[static_cast<std::size_t>(e)];
    Word r;
    if (t) r.push_back(t);
    r *= out.vertex_word(ed.from, ed.word_plus);
    if (t) r.push_back(-t);
    r *= out.vertex_word(ed.to, ed.word_minus).inverse();
    p.relators.push_back(r);
  }
  return out;
}

struct AbelianInvariants {
  int free_rank = 0;
  std::vector<long long> torsion;  // invariant factors greater than 1, ascending

  bool operator==(const AbelianInvariants&) const = default;
};

// Smith normal form of the relation matrix of the abelianisation.
inline AbelianInvariants abelian_invariants(const Presentation& p) {
  const auto rows = p.relators.size();
  const auto cols = static_cast<std::size_t>(p.generator_count());
  std::vector<std::vector<long long>> m(rows, std::vector<long long>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (Letter l : p.relators[i].letters()) m[i][static_cast<std::size_t>(letter_index(l))] += l > 0 ? 1 : -1;
  }
  std::vector<long long> diag;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // Pivot: smallest nonzero absolute value in the remaining block.
    std::size_t pr = rows, pc = cols;
    for (std::size_t i = t; i < rows; ++i) {
      for (std::size_t j = t; j < cols; ++j) {
        if (m[i][j] != 0 && (pr == rows || std::llabs(m[i][j]) < std::llabs(m[pr][pc]))) {
          pr = i;
          pc = j;
        }
      }
    }
    if (pr == rows) break;
    std::swap(m[t], m[pr]);
    for (auto& row : m) std::swap(row[t], row[pc]);
    bool clean = true;
    for (std::size_t i = t + 1; i < rows; ++i) {
      const long long q = m[i][t] / m[t][t];
      for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
      if (m[i][t] != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < cols; ++j) {
      const long long q = m[t][j] / m[t][t];
      for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
      if (m[t][j] != 0) clean = false;
    }
    if (!clean) continue;
    // Enforce divisibility of the remaining block by the pivot.
    bool divides = true;
    for (std::size_t i = t + 1; i < rows && divides; ++i) {
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m[i][j] % m[t][t] != 0) {
          for (std::size_t k = t; k < cols; ++k) m[t][k] += m[i][k];
          divides = false;
          break;
        }
      }
    }
    if (!divides) continue;
    diag.push_back(std::llabs(m[t][t]));
    ++t;
  }
  AbelianInvariants a;
  a.free_rank = static_cast<int>(cols - diag.size());
  for (long long d : diag) {
    if (d > 1) a.torsion.push_back(d);
  }
  std::sort(a.torsion.begin(), a.torsion.end());
  return a;
}

struct VertexWitness {
  int vertex = 0;
  std::string name;
  int rank = 1;
  std::vector<CyclicWord> words;
  IndecomposabilityWitness witness;
};

struct OneEndedReport {
  bool one_ended = false;
  GraphOfGroups reduced;  // graph the vertex test ran on
  std::vector<std::string> absorbed;
  std::vector<VertexWitness> vertices;
};

// Runs on the collapsed graph, so that amalgams over a whole rank-1 vertex
// group do not hide a free factor.
inline OneEndedReport is_one_ended(const GraphOfGroups& g, int rank_cap = kDefaultRankCap) {
  const auto collapsed = collapse_reduce(g);
  OneEndedReport r;
  r.reduced = collapsed.graph;
  r.absorbed = collapsed.absorbed;
  r.one_ended = true;
  for (int v = 0; v < r.reduced.vertex_count(); ++v) {
    VertexWitness w;
    w.vertex = v;
    w.name = r.reduced.vertices[static_cast<std::size_t>(v)].name;
    w.rank = r.reduced.vertices[static_cast<std::size_t>(v)].rank;
    w.words = vertex_peripheral_structure(r.reduced, v).words();
    w.witness = is_freely_indecomposable(w.words, w.rank, rank_cap);
    r.one_ended = r.one_ended && w.witness.indecomposable;
    r.vertices.push_back(std::move(w));
  }
  return r;
}

}  // namespace oneend
