#pragma once

// Undirected multigraphs with tagged edges: connectivity, articulation
// points, brute-force cut enumeration, and splicing along deleted vertices.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oneend/error.hpp"

namespace oneend {

struct MultiEdge {
  int u = 0;
  int v = 0;
  int tag = 0;

  bool operator==(const MultiEdge&) const = default;
  auto operator<=>(const MultiEdge&) const = default;
};

struct Multigraph {
  int vertex_count = 0;
  std::vector<MultiEdge> edges;

  std::vector<int> degrees() const {
    std::vector<int> d(static_cast<std::size_t>(vertex_count), 0);
    for (const auto& e : edges) {
      ++d[static_cast<std::size_t>(e.u)];
      ++d[static_cast<std::size_t>(e.v)];
    }
    return d;
  }

  // Sorted edge multiset with endpoints normalised, tags ignored.
  std::vector<std::pair<int, int>> edge_multiset() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges.size());
    for (const auto& e : edges) out.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::vector<std::pair<int, int>>> adjacency() const {
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(vertex_count));
    for (std::size_t i = 0; i < edges.size(); ++i) {
      adj[static_cast<std::size_t>(edges[i].u)].emplace_back(edges[i].v, static_cast<int>(i));
      if (edges[i].u != edges[i].v) {
        adj[static_cast<std::size_t>(edges[i].v)].emplace_back(edges[i].u, static_cast<int>(i));
      }
    }
    return adj;
  }
};

// Connected components among vertices not in `removed_vertex`, ignoring
// edges flagged in `removed_edge`. Returns a component id per vertex (-1 for
// removed vertices) and the number of components.
inline std::pair<std::vector<int>, int> components(const Multigraph& g,
                                                   const std::vector<char>& removed_vertex = {},
                                                   const std::vector<char>& removed_edge = {}) {
  const auto n = static_cast<std::size_t>(g.vertex_count);
  std::vector<int> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto gone = [&](int v) { return !removed_vertex.empty() && removed_vertex[static_cast<std::size_t>(v)]; };
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!removed_edge.empty() && removed_edge[i]) continue;
    const auto& e = g.edges[i];
    if (gone(e.u) || gone(e.v)) continue;
    parent[static_cast<std::size_t>(find(e.u))] = find(e.v);
  }
  std::vector<int> id(n, -1);
  std::map<int, int> label;
  for (std::size_t v = 0; v < n; ++v) {
    if (gone(static_cast<int>(v))) continue;
    auto [it, fresh] = label.try_emplace(find(static_cast<int>(v)), static_cast<int>(label.size()));
    id[v] = it->second;
  }
  return {id, static_cast<int>(label.size())};
}

inline bool is_connected(const Multigraph& g) { return components(g).second <= 1; }

// Articulation points by iterative Tarjan lowpoint search. Parallel edges are
// handled by skipping only the tree edge itself, not the parent vertex.
inline std::vector<int> articulation_points(const Multigraph& g) {
  const auto n = static_cast<std::size_t>(g.vertex_count);
  const auto adj = g.adjacency();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<char> cut(n, 0);
  int timer = 0;
  struct Frame {
    int v;
    int parent_edge;
    std::size_t next;
    int children;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack{{static_cast<int>(root), -1, 0, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto v = static_cast<std::size_t>(f.v);
      if (f.next < adj[v].size()) {
        const auto [w, e] = adj[v][f.next++];
        if (e == f.parent_edge) continue;
        const auto wi = static_cast<std::size_t>(w);
        if (disc[wi] < 0) {
          disc[wi] = low[wi] = timer++;
          ++f.children;
          stack.push_back({w, e, 0, 0});
        } else {
          low[v] = std::min(low[v], disc[wi]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (stack.empty()) {
        if (done.children >= 2) cut[v] = 1;
        continue;
      }
      const auto p = static_cast<std::size_t>(stack.back().v);
      low[p] = std::min(low[p], low[v]);
      if (stack.size() > 1 && low[v] >= disc[p]) cut[p] = 1;
    }
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < n; ++v) {
    if (cut[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

// Connected and free of cut vertices.
inline bool is_biconnected_like(const Multigraph& g) {
  return is_connected(g) && articulation_points(g).empty();
}

struct ConnectivityReport {
  bool connected = false;
  std::vector<int> cut_vertices;
  std::vector<std::pair<int, int>> cut_edge_pairs;         // edge indices, first < second
  std::vector<std::pair<int, int>> cut_vertex_edge_pairs;  // (vertex, edge index)
};

namespace detail {

// Every component left after the removal has at least two vertices.
inline bool nontrivial_split(const Multigraph& g, const std::vector<char>& rv,
                             const std::vector<char>& re) {
  const auto [id, count] = components(g, rv, re);
  if (count < 2) return false;
  std::vector<int> size(static_cast<std::size_t>(count), 0);
  for (int c : id) {
    if (c >= 0) ++size[static_cast<std::size_t>(c)];
  }
  return std::all_of(size.begin(), size.end(), [](int s) { return s >= 2; });
}

}  // namespace detail

// Exhaustive cut search. Cut vertices are those whose removal disconnects the
// rest; edge pairs and vertex-edge pairs are reported only when they split the
// graph into pieces that each keep at least two vertices.
inline ConnectivityReport connectivity_report(const Multigraph& g) {
  ConnectivityReport r;
  r.connected = is_connected(g);
  if (!r.connected) return r;
  const auto n = static_cast<std::size_t>(g.vertex_count);
  const auto m = g.edges.size();
  std::vector<char> rv(n, 0), re(m, 0);
  for (std::size_t v = 0; v < n; ++v) {
    rv[v] = 1;
    if (components(g, rv, re).second >= 2) r.cut_vertices.push_back(static_cast<int>(v));
    rv[v] = 0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    re[i] = 1;
    for (std::size_t j = i + 1; j < m; ++j) {
      re[j] = 1;
      if (detail::nontrivial_split(g, rv, re)) r.cut_edge_pairs.emplace_back(i, j);
      re[j] = 0;
    }
    re[i] = 0;
  }
  for (std::size_t v = 0; v < n; ++v) {
    rv[v] = 1;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& e = g.edges[i];
      if (e.u == static_cast<int>(v) || e.v == static_cast<int>(v)) continue;
      re[i] = 1;
      if (detail::nontrivial_split(g, rv, re)) r.cut_vertex_edge_pairs.emplace_back(v, i);
      re[i] = 0;
    }
    rv[v] = 0;
  }
  return r;
}

// An edge end: edge index and side (0 = u, 1 = v).
struct EdgeEnd {
  int edge = 0;
  int side = 0;

  auto operator<=>(const EdgeEnd&) const = default;
};

inline std::vector<EdgeEnd> ends_at(const Multigraph& g, int v) {
  std::vector<EdgeEnd> out;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (g.edges[i].u == v) out.push_back({static_cast<int>(i), 0});
    if (g.edges[i].v == v) out.push_back({static_cast<int>(i), 1});
  }
  return out;
}

// Deletes the marked vertices and joins edge ends through them according to
// `partner`, an involution on the ends lying at deleted vertices. Chains of
// joined edges become single edges carrying the tag of their first edge;
// chains that close up without meeting a surviving vertex disappear.
// Surviving vertices keep their relative order.
inline Multigraph splice_ends(const Multigraph& g, const std::vector<char>& deleted,
                              const std::map<EdgeEnd, EdgeEnd>& partner) {
  auto at = [&](EdgeEnd end) {
    const auto& e = g.edges[static_cast<std::size_t>(end.edge)];
    return end.side == 0 ? e.u : e.v;
  };
  auto dead = [&](int v) { return deleted[static_cast<std::size_t>(v)] != 0; };
  for (const auto& [a, b] : partner) {
    require(dead(at(a)) && dead(at(b)), ErrorKind::Validation, "splice: joined end is not at a deleted vertex");
    const auto back = partner.find(b);
    require(back != partner.end() && back->second == a, ErrorKind::Validation,
            "splice: end pairing is not an involution");
  }
  std::vector<int> number(deleted.size(), -1);
  int kept = 0;
  for (std::size_t v = 0; v < deleted.size(); ++v) {
    if (!deleted[v]) number[v] = kept++;
  }
  Multigraph out;
  out.vertex_count = kept;
  std::vector<char> used(g.edges.size(), 0);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (used[i]) continue;
    for (int side = 0; side < 2 && !used[i]; ++side) {
      const EdgeEnd start{static_cast<int>(i), side};
      if (dead(at(start))) continue;
      EdgeEnd cur = start;
      while (true) {
        used[static_cast<std::size_t>(cur.edge)] = 1;
        const EdgeEnd far{cur.edge, 1 - cur.side};
        if (!dead(at(far))) {
          out.edges.push_back({number[static_cast<std::size_t>(at(start))],
                               number[static_cast<std::size_t>(at(far))], g.edges[i].tag});
          break;
        }
        const auto it = partner.find(far);
        require(it != partner.end(), ErrorKind::Validation, "splice: unmatched end at deleted vertex");
        cur = it->second;
      }
    }
  }
  return out;
}

// Splices g1 and g2 by deleting v1 and v2 and joining the i-th end at v1 to
// the bijection[i]-th end at v2 (ends ordered by edge index, then side).
// Vertices of g1 come first, then those of g2.
inline Multigraph splice(const Multigraph& g1, int v1, const Multigraph& g2, int v2,
                         const std::vector<int>& bijection) {
  const auto e1 = ends_at(g1, v1);
  const auto e2 = ends_at(g2, v2);
  require(e1.size() == e2.size(), ErrorKind::Validation,
          "splice: valence mismatch (" + std::to_string(e1.size()) + " vs " + std::to_string(e2.size()) + ")");
  require(bijection.size() == e1.size(), ErrorKind::Validation, "splice: bijection has the wrong size");
  std::vector<int> check = bijection;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i) {
    require(check[i] == static_cast<int>(i), ErrorKind::Validation, "splice: not a bijection");
  }
  Multigraph both;
  both.vertex_count = g1.vertex_count + g2.vertex_count;
  both.edges = g1.edges;
  const int shift = g1.vertex_count;
  const int edge_shift = static_cast<int>(g1.edges.size());
  for (const auto& e : g2.edges) both.edges.push_back({e.u + shift, e.v + shift, e.tag});
  std::vector<char> deleted(static_cast<std::size_t>(both.vertex_count), 0);
  deleted[static_cast<std::size_t>(v1)] = 1;
  deleted[static_cast<std::size_t>(v2 + shift)] = 1;
  std::map<EdgeEnd, EdgeEnd> partner;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    const EdgeEnd a = e1[i];
    const EdgeEnd b{e2[static_cast<std::size_t>(bijection[i])].edge + edge_shift,
                    e2[static_cast<std::size_t>(bijection[i])].side};
    partner[a] = b;
    partner[b] = a;
  }
  return splice_ends(both, deleted, partner);
}

}  // namespace oneend
