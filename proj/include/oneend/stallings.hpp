#pragma once

// Finitely generated subgroups of free groups as folded labelled graphs,
// finite covers of the rose as permutation tuples, and the operations that
// move between them: folding, fibre products, Hall completion, normal cores,
// elevations of cyclic words and pullback peripheral structures.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "oneend/error.hpp"
#include "oneend/words.hpp"

namespace oneend {

inline constexpr std::size_t kDefaultDegreeCap = 5040;

struct LabelledEdge {
  int from;
  Letter letter;  // positive
  int to;
};

namespace detail {

// Stallings folding by union-find. Vertex 0 is the basepoint.
class Folder {
 public:
  Folder(int rank, int vertex_count)
      : two_r_(2 * rank), parent_(static_cast<std::size_t>(vertex_count)),
        size_(static_cast<std::size_t>(vertex_count), 1),
        adj_(static_cast<std::size_t>(vertex_count)) {
    for (int v = 0; v < vertex_count; ++v) parent_[static_cast<std::size_t>(v)] = v;
  }

  void add_edge(int u, Letter x, int v) {
    adj_[static_cast<std::size_t>(u)].push_back({letter_slot(x), v});
    adj_[static_cast<std::size_t>(v)].push_back({letter_slot(-x), u});
  }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }

  void fold() {
    for (int v = 0; v < static_cast<int>(parent_.size()); ++v) queue_.push_back(v);
    std::vector<int> target(static_cast<std::size_t>(two_r_), -1);
    while (!queue_.empty()) {
      const int v = queue_.front();
      queue_.pop_front();
      if (find(v) != v) continue;
      std::fill(target.begin(), target.end(), -1);
      bool merged = false;
      auto& list = adj_[static_cast<std::size_t>(v)];
      for (auto& [slot, t] : list) {
        t = find(t);
        int& seen = target[static_cast<std::size_t>(slot)];
        if (seen == -1) {
          seen = t;
        } else if (seen != t) {
          unite(seen, t);
          merged = true;
          break;
        }
      }
      if (merged) {
        queue_.push_back(find(v));
        continue;
      }
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  // Folded adjacency table indexed by root vertices: [root][slot] -> root or -1.
  std::vector<std::vector<int>> table() {
    std::vector<std::vector<int>> out(parent_.size());
    for (std::size_t v = 0; v < parent_.size(); ++v) {
      if (find(static_cast<int>(v)) != static_cast<int>(v)) continue;
      out[v].assign(static_cast<std::size_t>(two_r_), -1);
      for (auto [slot, t] : adj_[v]) out[v][static_cast<std::size_t>(slot)] = find(t);
    }
    return out;
  }

 private:
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    auto& from = adj_[static_cast<std::size_t>(b)];
    auto& into = adj_[static_cast<std::size_t>(a)];
    into.insert(into.end(), from.begin(), from.end());
    from.clear();
    from.shrink_to_fit();
    queue_.push_back(a);
  }

  int two_r_;
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::deque<int> queue_;
};

}  // namespace detail

// Folded, connected, pointed labelled graph with every non-basepoint vertex of
// degree at least two. Vertices are numbered canonically (breadth-first from
// the basepoint in slot order), so equal subgroups give equal graphs.
class CoreGraph {
 public:
  CoreGraph() : CoreGraph(1) {}
  explicit CoreGraph(int rank) : rank_(rank), next_(static_cast<std::size_t>(2 * rank), -1) {
    require(rank >= 1, ErrorKind::Validation, "rank must be at least 1");
  }

  // Folds, prunes to the core and renumbers the given pointed graph.
  static CoreGraph build(int rank, int vertex_count, const std::vector<LabelledEdge>& edges,
                         int basepoint = 0) {
    require(vertex_count >= 1, ErrorKind::Validation, "graph needs a basepoint");
    detail::Folder folder(rank, vertex_count);
    for (const auto& e : edges) {
      require(e.letter > 0 && e.letter <= rank, ErrorKind::Validation, "edge letter out of range");
      folder.add_edge(e.from, e.letter, e.to);
    }
    folder.fold();
    auto table = folder.table();
    const int base = folder.find(basepoint);
    const int two_r = 2 * rank;

    // Prune hanging trees.
    std::vector<int> degree(table.size(), 0);
    std::vector<char> removed(table.size(), 0);
    std::deque<int> queue;
    for (std::size_t v = 0; v < table.size(); ++v) {
      if (table[v].empty()) {
        removed[v] = 1;
        continue;
      }
      for (int t : table[v]) degree[v] += (t >= 0);
      if (static_cast<int>(v) != base && degree[v] <= 1) queue.push_back(static_cast<int>(v));
    }
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      if (removed[static_cast<std::size_t>(v)]) continue;
      removed[static_cast<std::size_t>(v)] = 1;
      for (int s = 0; s < two_r; ++s) {
        const int t = table[static_cast<std::size_t>(v)][static_cast<std::size_t>(s)];
        if (t < 0 || t == v) continue;
        table[static_cast<std::size_t>(t)][static_cast<std::size_t>(s ^ 1)] = -1;
        if (--degree[static_cast<std::size_t>(t)] <= 1 && t != base) queue.push_back(t);
      }
      table[static_cast<std::size_t>(v)].assign(static_cast<std::size_t>(two_r), -1);
    }

    // Canonical breadth-first renumbering from the basepoint.
    std::vector<int> number(table.size(), -1);
    std::vector<int> order{base};
    number[static_cast<std::size_t>(base)] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (int s = 0; s < two_r; ++s) {
        const int t = table[static_cast<std::size_t>(order[i])][static_cast<std::size_t>(s)];
        if (t >= 0 && number[static_cast<std::size_t>(t)] < 0) {
          number[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
          order.push_back(t);
        }
      }
    }
    CoreGraph g(rank);
    g.next_.assign(order.size() * static_cast<std::size_t>(two_r), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (int s = 0; s < two_r; ++s) {
        const int t = table[static_cast<std::size_t>(order[i])][static_cast<std::size_t>(s)];
        if (t >= 0) g.next_[i * static_cast<std::size_t>(two_r) + static_cast<std::size_t>(s)] =
                        number[static_cast<std::size_t>(t)];
      }
    }
    return g;
  }

  static CoreGraph rose(int rank) {
    std::vector<LabelledEdge> edges;
    for (int x = 1; x <= rank; ++x) edges.push_back({0, x, 0});
    return build(rank, 1, edges);
  }

  int rank() const { return rank_; }
  int vertex_count() const { return static_cast<int>(next_.size()) / (2 * rank_); }

  int step(int v, Letter l) const {
    return next_[static_cast<std::size_t>(v) * static_cast<std::size_t>(2 * rank_) +
                 static_cast<std::size_t>(letter_slot(l))];
  }

  int degree(int v) const {
    int d = 0;
    for (int s = 0; s < 2 * rank_; ++s) d += step(v, slot_letter(s)) >= 0;
    return d;
  }

  std::vector<LabelledEdge> edges() const {
    std::vector<LabelledEdge> out;
    for (int v = 0; v < vertex_count(); ++v) {
      for (int x = 1; x <= rank_; ++x) {
        const int t = step(v, x);
        if (t >= 0) out.push_back({v, x, t});
      }
    }
    return out;
  }

  int edge_count() const { return static_cast<int>(edges().size()); }

  bool complete() const {
    return std::none_of(next_.begin(), next_.end(), [](int t) { return t < 0; });
  }

  bool operator==(const CoreGraph&) const = default;

 private:
  int rank_;
  std::vector<int> next_;
};

// Finite cover of the rose: one permutation of the sheets per basis letter.
// Sheet 0 is the basepoint.
class CoverGraph {
 public:
  CoverGraph() : perm_{{0}}, inv_{{0}} {}

  static CoverGraph from_perms(std::vector<std::vector<int>> perms, bool require_connected = true) {
    require(!perms.empty(), ErrorKind::Validation, "cover needs at least one letter");
    const std::size_t d = perms.front().size();
    require(d >= 1, ErrorKind::Validation, "cover degree must be positive");
    CoverGraph c;
    c.perm_ = std::move(perms);
    c.inv_.assign(c.perm_.size(), std::vector<int>(d, -1));
    for (std::size_t i = 0; i < c.perm_.size(); ++i) {
      require(c.perm_[i].size() == d, ErrorKind::Validation, "permutations differ in degree");
      for (std::size_t s = 0; s < d; ++s) {
        const int t = c.perm_[i][s];
        require(t >= 0 && static_cast<std::size_t>(t) < d && c.inv_[i][static_cast<std::size_t>(t)] < 0,
                ErrorKind::Validation, "cover letter is not a bijection");
        c.inv_[i][static_cast<std::size_t>(t)] = static_cast<int>(s);
      }
    }
    require(!require_connected || c.connected(), ErrorKind::Validation,
            "cover is not connected (the letters do not act transitively)");
    return c;
  }

  static CoverGraph rose(int rank) {
    return from_perms(std::vector<std::vector<int>>(static_cast<std::size_t>(rank), {0}));
  }

  static CoverGraph from_core(const CoreGraph& g) {
    require(g.complete(), ErrorKind::Precondition, "core graph is not a finite cover");
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(g.rank()));
    for (int x = 1; x <= g.rank(); ++x) {
      for (int v = 0; v < g.vertex_count(); ++v) perms[static_cast<std::size_t>(x - 1)].push_back(g.step(v, x));
    }
    return from_perms(std::move(perms));
  }

  int rank() const { return static_cast<int>(perm_.size()); }
  int degree() const { return static_cast<int>(perm_.front().size()); }
  int vertex_count() const { return degree(); }

  int step(int sheet, Letter l) const {
    const auto i = static_cast<std::size_t>(letter_index(l));
    return l > 0 ? perm_[i][static_cast<std::size_t>(sheet)] : inv_[i][static_cast<std::size_t>(sheet)];
  }

  const std::vector<std::vector<int>>& perms() const { return perm_; }

  bool connected() const {
    std::vector<char> seen(static_cast<std::size_t>(degree()), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int s = 0; s < 2 * rank(); ++s) {
        const int t = step(v, slot_letter(s));
        if (!seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = 1;
          ++count;
          stack.push_back(t);
        }
      }
    }
    return count == degree();
  }

  CoreGraph core() const {
    std::vector<LabelledEdge> edges;
    for (int x = 1; x <= rank(); ++x) {
      for (int v = 0; v < degree(); ++v) edges.push_back({v, x, step(v, x)});
    }
    return CoreGraph::build(rank(), degree(), edges);
  }

  bool operator==(const CoverGraph& o) const { return perm_ == o.perm_; }

 private:
  std::vector<std::vector<int>> perm_;
  std::vector<std::vector<int>> inv_;
};

// Reads w from vertex v; nullopt if the path leaves the graph.
template <class Graph>
std::optional<int> read(const Graph& g, int v, const Word& w) {
  for (Letter l : w.letters()) {
    v = g.step(v, l);
    if (v < 0) return std::nullopt;
  }
  return v;
}

inline CoreGraph from_generators(const Basis& basis, const std::vector<Word>& gens) {
  std::vector<LabelledEdge> edges;
  int n = 1;
  for (const auto& w : gens) {
    check_in_basis(basis, w);
    if (w.empty()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const int nxt = (i + 1 == w.size()) ? 0 : n++;
      const Letter l = w[i];
      if (l > 0) {
        edges.push_back({cur, l, nxt});
      } else {
        edges.push_back({nxt, -l, cur});
      }
      cur = nxt;
    }
  }
  return CoreGraph::build(basis.rank, n, edges);
}

template <class Graph>
bool contains(const Graph& g, const Word& w) {
  const auto end = read(g, 0, w);
  return end && *end == 0;
}

// Finite index iff the graph is complete; nullopt means infinite index.
inline std::optional<int> index(const CoreGraph& g) {
  if (!g.complete()) return std::nullopt;
  return g.vertex_count();
}

// Fibre product at (basepoint, basepoint), restricted to the core.
template <class G1, class G2>
CoreGraph intersect(const G1& g1, const G2& g2) {
  require(g1.rank() == g2.rank(), ErrorKind::Validation, "intersect: ranks differ");
  const int rank = g1.rank();
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> order{{0, 0}};
  id[{0, 0}] = 0;
  std::vector<LabelledEdge> edges;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto [u1, u2] = order[i];
    for (int s = 0; s < 2 * rank; ++s) {
      const Letter l = slot_letter(s);
      const int v1 = g1.step(u1, l);
      const int v2 = g2.step(u2, l);
      if (v1 < 0 || v2 < 0) continue;
      auto [it, fresh] = id.try_emplace({v1, v2}, static_cast<int>(order.size()));
      if (fresh) order.push_back({v1, v2});
      if (l > 0) edges.push_back({static_cast<int>(i), l, it->second});
    }
  }
  return CoreGraph::build(rank, static_cast<int>(order.size()), edges);
}

// Marshall Hall completion: each letter's partial permutation is completed by
// pairing missing out-slots with missing in-slots in index order.
template <class Graph>
CoverGraph hall_complete(const Graph& g) {
  const int n = g.vertex_count();
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(g.rank()));
  for (int x = 1; x <= g.rank(); ++x) {
    auto& p = perms[static_cast<std::size_t>(x - 1)];
    p.assign(static_cast<std::size_t>(n), -1);
    std::vector<char> has_in(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
      const int t = g.step(v, x);
      if (t >= 0) {
        p[static_cast<std::size_t>(v)] = t;
        has_in[static_cast<std::size_t>(t)] = 1;
      }
    }
    std::vector<int> missing_in;
    for (int v = 0; v < n; ++v) {
      if (!has_in[static_cast<std::size_t>(v)]) missing_in.push_back(v);
    }
    std::size_t next = 0;
    for (int v = 0; v < n; ++v) {
      if (p[static_cast<std::size_t>(v)] < 0) p[static_cast<std::size_t>(v)] = missing_in[next++];
    }
  }
  return CoverGraph::from_perms(std::move(perms));
}

// Regular cover for the kernel of the sheet permutation action: the Cayley
// graph of the permutation group generated by the letters.
inline CoverGraph normal_core(const CoverGraph& c, std::size_t degree_cap = kDefaultDegreeCap) {
  const auto d = static_cast<std::size_t>(c.degree());
  std::vector<int> identity(d);
  for (std::size_t i = 0; i < d; ++i) identity[i] = static_cast<int>(i);
  std::map<std::vector<int>, int> id{{identity, 0}};
  std::vector<std::vector<int>> elements{identity};
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(c.rank()));
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (int x = 1; x <= c.rank(); ++x) {
      // Reading x after g: sheet s goes to sigma_x(g(s)).
      std::vector<int> next(d);
      for (std::size_t s = 0; s < d; ++s) next[s] = c.step(elements[i][s], x);
      auto [it, fresh] = id.try_emplace(next, static_cast<int>(elements.size()));
      if (fresh) {
        if (elements.size() + 1 > degree_cap) {
          fail(ErrorKind::CapExceeded,
               "normal core exceeds degree cap " + std::to_string(degree_cap));
        }
        elements.push_back(std::move(next));
      }
      perms[static_cast<std::size_t>(x - 1)].push_back(it->second);
    }
  }
  return CoverGraph::from_perms(std::move(perms));
}

// Breadth-first spanning tree from the basepoint and the free basis it
// induces: one generator per non-tree edge, ordered by (tail vertex, letter).
template <class Graph>
class SpanningTree {
 public:
  explicit SpanningTree(const Graph& g) : g_(&g) {
    const int n = g.vertex_count();
    const int r = g.rank();
    parent_.assign(static_cast<std::size_t>(n), -1);
    path_.assign(static_cast<std::size_t>(n), Word());
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<char> tree_edge(static_cast<std::size_t>(n) * static_cast<std::size_t>(r), 0);
    std::vector<int> order{0};
    seen[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const int u = order[i];
      for (int s = 0; s < 2 * r; ++s) {
        const Letter l = slot_letter(s);
        const int v = g.step(u, l);
        if (v < 0 || seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        parent_[static_cast<std::size_t>(v)] = u;
        path_[static_cast<std::size_t>(v)] = path_[static_cast<std::size_t>(u)] * Word::letter(l);
        const int tail = l > 0 ? u : v;
        tree_edge[static_cast<std::size_t>(tail) * static_cast<std::size_t>(r) +
                  static_cast<std::size_t>(std::abs(l) - 1)] = 1;
        order.push_back(v);
      }
    }
    generator_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(r), -1);
    for (int u = 0; u < n; ++u) {
      for (int x = 1; x <= r; ++x) {
        const auto key = static_cast<std::size_t>(u) * static_cast<std::size_t>(r) + static_cast<std::size_t>(x - 1);
        if (g.step(u, x) >= 0 && !tree_edge[key]) {
          generator_[key] = static_cast<int>(edges_.size());
          edges_.push_back({u, x, g.step(u, x)});
        }
      }
    }
  }

  const Word& path(int v) const { return path_[static_cast<std::size_t>(v)]; }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }

  int generator_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<LabelledEdge>& generator_edges() const { return edges_; }

  // Generator index of the positive edge (u, x), or -1 for tree edges.
  int generator_of(int u, Letter x) const {
    return generator_[static_cast<std::size_t>(u) * static_cast<std::size_t>(g_->rank()) +
                      static_cast<std::size_t>(x - 1)];
  }

  Word generator_word(int j) const {
    const auto& e = edges_[static_cast<std::size_t>(j)];
    return path(e.from) * Word::letter(e.letter) * path(e.to).inverse();
  }

  std::vector<Word> basis() const {
    std::vector<Word> out;
    out.reserve(edges_.size());
    for (int j = 0; j < generator_count(); ++j) out.push_back(generator_word(j));
    return out;
  }

  // Rewrites the path spelled by w from `start` as a word in the generators.
  // Also returns the end vertex. Throws if the path leaves the graph.
  std::pair<Word, int> rewrite(int start, const Word& w) const {
    Word out;
    int cur = start;
    for (Letter l : w.letters()) {
      const int nxt = g_->step(cur, l);
      require(nxt >= 0, ErrorKind::Precondition, "path leaves the graph");
      const int j = l > 0 ? generator_of(cur, l) : generator_of(nxt, -l);
      if (j >= 0) out.push_back(l > 0 ? j + 1 : -(j + 1));
      cur = nxt;
    }
    return {out, cur};
  }

  // Expands a word in the generators back to a word in the ambient letters.
  Word expand(const Word& gen_word) const {
    Word out;
    for (Letter l : gen_word.letters()) {
      const Word g = generator_word(letter_index(l));
      out *= (l > 0 ? g : g.inverse());
    }
    return out;
  }

 private:
  const Graph* g_;
  std::vector<int> parent_;
  std::vector<Word> path_;
  std::vector<int> generator_;
  std::vector<LabelledEdge> edges_;
};

template <class Graph>
std::vector<Word> subgroup_basis(const Graph& g) {
  return SpanningTree<Graph>(g).basis();
}

struct Elevation {
  std::vector<int> orbit;  // sheets where a reading of w starts, in order
  int degree = 0;
  Word conjugator;  // tree path from the basepoint to orbit.front()

  int start() const { return orbit.front(); }
};

// Closed orbits of the (partial) action of w on vertices, each starting at its
// least vertex, ordered by that vertex.
template <class Graph>
std::vector<std::vector<int>> closed_orbits(const Graph& g, const Word& w) {
  const int n = g.vertex_count();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<int> orbit;
    int t = s;
    bool closed = false;
    while (true) {
      seen[static_cast<std::size_t>(t)] = 1;
      orbit.push_back(t);
      const auto nxt = read(g, t, w);
      if (!nxt) break;
      if (*nxt == s) {
        closed = true;
        break;
      }
      if (seen[static_cast<std::size_t>(*nxt)]) break;
      t = *nxt;
    }
    if (closed) out.push_back(std::move(orbit));
  }
  return out;
}

template <class Graph>
std::vector<Elevation> elevations(const Graph& g, const CyclicWord& w, const SpanningTree<Graph>& tree) {
  require(!w.empty(), ErrorKind::Precondition, "elevations of the empty word");
  std::vector<Elevation> out;
  for (auto& orbit : closed_orbits(g, w.word())) {
    Elevation e;
    e.degree = static_cast<int>(orbit.size());
    e.conjugator = tree.path(orbit.front());
    e.orbit = std::move(orbit);
    out.push_back(std::move(e));
  }
  return out;
}

template <class Graph>
std::vector<Elevation> elevations(const Graph& g, const CyclicWord& w) {
  return elevations(g, w, SpanningTree<Graph>(g));
}

// Element of the subgroup carried by an elevation, as a cyclic word in the
// spanning-tree basis.
template <class Graph>
CyclicWord elevation_class_word(const SpanningTree<Graph>& tree, const CyclicWord& w, const Elevation& e) {
  const auto [gens, end] = tree.rewrite(e.start(), w.word().power(e.degree));
  require(end == e.start(), ErrorKind::Contract, "elevation does not close up");
  return cyclic_reduce(gens).cyclic;
}

// Pullback of a peripheral structure to the subgroup of g, expressed in the
// spanning-tree basis of g. Readings that leave the graph contribute nothing.
template <class Graph>
PeripheralStructure pullback_structure(const Graph& g, const PeripheralStructure& p) {
  const SpanningTree<Graph> tree(g);
  PeripheralStructure out;
  for (const auto& entry : p.entries()) {
    for (const auto& e : elevations(g, entry.root.word, tree)) {
      const auto c = elevation_class_word(tree, entry.root.word, e);
      const bool fresh = out.insert(canonical_class(c), e.degree);
      require(fresh, ErrorKind::Contract, "distinct elevations gave conjugate classes");
    }
  }
  return out;
}

// True iff every elevation of every word is an embedded circle.
template <class Graph>
bool is_clean(const Graph& g, const std::vector<CyclicWord>& ws) {
  for (const auto& w : ws) {
    for (const auto& e : elevations(g, w)) {
      std::vector<char> visited(static_cast<std::size_t>(g.vertex_count()), 0);
      int cur = e.start();
      for (int k = 0; k < e.degree; ++k) {
        for (Letter l : w.word().letters()) {
          cur = g.step(cur, l);
          if (visited[static_cast<std::size_t>(cur)]) return false;
          visited[static_cast<std::size_t>(cur)] = 1;
        }
      }
    }
  }
  return true;
}

// Clean regular cover inside `within`: the normal core of the intersection of
// `within` with one Hall cover per word.
inline CoverGraph clean_subgroup(const std::vector<CyclicWord>& ws, const CoverGraph& within,
                                 std::size_t degree_cap = kDefaultDegreeCap) {
  const Basis basis(within.rank());
  CoreGraph meet = within.core();
  for (const auto& w : ws) {
    require(!w.empty(), ErrorKind::Precondition, "clean_subgroup: empty word");
    check_in_basis(basis, w.word());
    const CoverGraph hall = hall_complete(from_generators(basis, {w.word()}));
    meet = intersect(meet, hall);
  }
  const CoverGraph core = normal_core(CoverGraph::from_core(meet), degree_cap);
  require(is_clean(core, ws), ErrorKind::Contract, "normal core of Hall covers is not clean");
  return core;
}

}  // namespace oneend
