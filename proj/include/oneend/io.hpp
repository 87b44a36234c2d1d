#pragma once

// JSON and DOT encodings of the library's values, and replay of serialized
// construction bundles.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oneend/covers.hpp"
#include "oneend/error.hpp"
#include "oneend/gog.hpp"
#include "oneend/order.hpp"
#include "oneend/stallings.hpp"
#include "oneend/whitehead.hpp"
#include "oneend/words.hpp"

namespace oneend::io {

using json = nlohmann::ordered_json;

inline json to_json(const Word& w) { return w.str(); }
inline json to_json(const CyclicWord& w) { return w.str(); }

inline json to_json(const ElevationId& id) {
  return {{"copy", id.copy}, {"edge", id.edge}, {"side", id.side}, {"index", id.index}};
}

template <class T>
json to_json_list(const std::vector<T>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

inline json to_json(const PeripheralStructure& p) {
  json out = json::array();
  for (const auto& e : p.entries()) out.push_back({{"root", e.root.word.str()}, {"exponent", e.exponent}});
  return out;
}

inline PeripheralStructure peripheral_from_json(const json& j) {
  PeripheralStructure p;
  for (const auto& e : j) {
    const auto r = root(cyclic_reduce(Word::parse(e.at("root").get<std::string>())).cyclic);
    require(r.exponent == 1, ErrorKind::Validation, "peripheral entry is not a root");
    p.insert(canonical_class(r.root), e.value("exponent", 1));
  }
  return p;
}

inline json to_json(const WhiteheadMove& m, int rank) {
  json subset = json::array();
  for (Letter l : m.members(rank)) subset.push_back(letter_name(l));
  return {{"special", letter_name(m.special)}, {"subset", subset}, {"text", m.str(rank)}};
}

inline json moves_json(const std::vector<WhiteheadMove>& moves, int rank) {
  json out = json::array();
  for (const auto& m : moves) out.push_back(to_json(m, rank));
  return out;
}

inline json to_json(const Multigraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back({e.u, e.v, e.tag});
  return {{"vertex_count", g.vertex_count}, {"edges", edges}};
}

inline json to_json(const WhiteheadGraph& w) {
  json names = json::array();
  for (Letter l : Basis(w.rank).letters()) names.push_back(letter_name(l));
  json degrees = json::array();
  for (Letter l : Basis(w.rank).letters()) degrees.push_back(w.degree(l));
  json out = to_json(w.graph);
  out["rank"] = w.rank;
  out["vertices"] = names;
  out["degrees"] = degrees;
  return out;
}

inline json to_json(const ConnectivityReport& r) {
  json pairs = json::array();
  for (const auto& [a, b] : r.cut_edge_pairs) pairs.push_back({a, b});
  json vpairs = json::array();
  for (const auto& [v, e] : r.cut_vertex_edge_pairs) vpairs.push_back({v, e});
  return {{"connected", r.connected},
          {"cut_vertices", r.cut_vertices},
          {"cut_edge_pairs", pairs},
          {"cut_vertex_edge_pairs", vpairs}};
}

inline json to_json(const SurfaceData& s) {
  return {{"orientable", s.orientable},
          {s.orientable ? "genus" : "crosscaps", s.genus},
          {"boundary", s.boundary},
          {"euler_characteristic", s.euler_characteristic()},
          {"cyclic_order", s.ribbon.cyclic_order},
          {"twists", s.ribbon.twists},
          {"boundary_words", to_json_list(s.boundary_words)}};
}

inline json to_json(const IndecomposabilityWitness& w, int rank) {
  return {{"indecomposable", w.indecomposable},
          {"minimized", w.minimized},
          {"moves", moves_json(w.moves, rank)},
          {"words", to_json_list(w.words)},
          {"graph", to_json(w.graph)},
          {"partition", w.partition}};
}

inline json to_json(const PairClassification& c, int rank) {
  json out{{"tag", to_string(c.tag)},
           {"moves", moves_json(c.moves, rank)},
           {"minimal_words", to_json_list(c.minimal_words)},
           {"whitehead_graph", to_json(c.graph)},
           {"connectivity", to_json(c.report)}};
  out["surface"] = c.surface ? to_json(*c.surface) : json(nullptr);
  out["partition"] = c.partition;
  return out;
}

inline json to_json(const LocalTheoremReport& r) {
  return {{"ok", r.ok},
          {"connected", r.connected},
          {"cut_vertices", r.cut_vertices},
          {"vertex_count", r.vertex_count},
          {"edge_count", r.edge_count},
          {"removed_edges", r.removed_edges},
          {"elevation_count", r.elevation_count},
          {"dropped", r.dropped ? json(*r.dropped) : json(nullptr)}};
}

// Graphs of groups.

inline json to_json(const GraphOfGroups& g) {
  json vs = json::array();
  for (const auto& v : g.vertices) vs.push_back({{"name", v.name}, {"rank", v.rank}});
  json es = json::array();
  for (const auto& e : g.edges) {
    es.push_back({{"name", e.name},
                  {"from", g.vertices[static_cast<std::size_t>(e.from)].name},
                  {"to", g.vertices[static_cast<std::size_t>(e.to)].name},
                  {"word_plus", e.word_plus.str()},
                  {"word_minus", e.word_minus.str()}});
  }
  return {{"vertices", vs}, {"edges", es}};
}

inline GraphOfGroups gog_from_json(const json& j) {
  GraphOfGroups g;
  try {
    for (const auto& v : j.at("vertices")) g.vertices.push_back({v.at("name").get<std::string>(), v.at("rank").get<int>()});
    for (const auto& e : j.at("edges")) {
      auto endpoint = [&](const json& x) {
        if (x.is_number_integer()) return x.get<int>();
        const auto found = g.find_vertex(x.get<std::string>());
        require(found.has_value(), ErrorKind::Validation, "edge names unknown vertex " + x.get<std::string>());
        return *found;
      };
      g.edges.push_back({e.at("name").get<std::string>(), endpoint(e.at("from")), endpoint(e.at("to")),
                         Word::parse(e.at("word_plus").get<std::string>()),
                         Word::parse(e.at("word_minus").get<std::string>())});
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Validation, std::string("malformed graph of groups: ") + e.what());
  }
  check_valid(g);
  return g;
}

inline json to_json(const OneEndedReport& r) {
  json vs = json::array();
  for (const auto& v : r.vertices) {
    vs.push_back({{"vertex", v.name},
                  {"rank", v.rank},
                  {"words", to_json_list(v.words)},
                  {"witness", to_json(v.witness, v.rank)}});
  }
  return {{"one_ended", r.one_ended}, {"absorbed", r.absorbed}, {"reduced", to_json(r.reduced)}, {"vertices", vs}};
}

inline json to_json(const Presentation& p) {
  json rels = json::array();
  for (const auto& r : p.relators) rels.push_back(r.str());
  return {{"generators", p.generators}, {"relators", rels}};
}

// Covers.

inline json to_json(const CoverGraph& c) {
  json perms = json::object();
  for (int x = 1; x <= c.rank(); ++x) {
    std::vector<int> one_based;
    for (int s : c.perms()[static_cast<std::size_t>(x - 1)]) one_based.push_back(s + 1);
    perms[letter_name(x)] = one_based;
  }
  return {{"degree", c.degree()}, {"perms", perms}};
}

inline CoverGraph cover_from_json(const json& j) {
  try {
    const auto& perms = j.at("perms");
    std::vector<std::vector<int>> out;
    for (int x = 1; x <= static_cast<int>(perms.size()); ++x) {
      std::vector<int> p;
      for (int s : perms.at(letter_name(x)).get<std::vector<int>>()) p.push_back(s - 1);
      out.push_back(std::move(p));
    }
    require(!out.empty(), ErrorKind::Validation, "cover without permutations");
    auto c = CoverGraph::from_perms(std::move(out));
    if (j.contains("degree")) require(j.at("degree").get<int>() == c.degree(), ErrorKind::Validation, "degree field disagrees");
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::Validation, std::string("malformed cover: ") + e.what());
  }
}

inline json to_json(const CoreGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.from, letter_name(e.letter), e.to});
  return {{"rank", g.rank()}, {"vertex_count", g.vertex_count()}, {"basepoint", 0}, {"edges", edges}};
}

inline json to_json(const Elevation& e) {
  return {{"start", e.start()}, {"degree", e.degree}, {"orbit", e.orbit}, {"conjugator", e.conjugator.str()}};
}

inline ElevationId elevation_id_from_json(const json& j) {
  return {j.at("copy").get<int>(), j.at("edge").get<int>(), j.at("side").get<int>(), j.at("index").get<int>()};
}

inline json to_json(const PreCover& p) {
  json covers = json::array();
  for (const auto& c : p.covers()) covers.push_back(to_json(c));
  json copies = json::array();
  for (const auto& c : p.copies()) copies.push_back({{"vertex", c.vertex}, {"cover", c.cover}});
  json matches = json::array();
  for (const auto& m : p.matches()) {
    matches.push_back({m.edge(), {m.plus.copy, m.plus.index}, {m.minus.copy, m.minus.index}});
  }
  return {{"base", to_json(p.base())},
          {"covers", covers},
          {"copies", copies},
          {"matches", matches},
          {"hanging", to_json_list(p.hanging())}};
}

inline PreCover precover_from_json(const json& j) {
  try {
    GraphOfGroups base = gog_from_json(j.at("base"));
    std::vector<CoverGraph> covers;
    for (const auto& c : j.at("covers")) covers.push_back(cover_from_json(c));
    std::vector<VertexCopy> copies;
    for (const auto& c : j.at("copies")) copies.push_back({c.at("vertex").get<int>(), c.at("cover").get<int>()});
    std::vector<Match> matches;
    for (const auto& m : j.at("matches")) {
      const int e = m.at(0).get<int>();
      matches.push_back({{m.at(1).at(0).get<int>(), e, 0, m.at(1).at(1).get<int>()},
                         {m.at(2).at(0).get<int>(), e, 1, m.at(2).at(1).get<int>()}});
    }
    PreCover p = glue(std::move(base), std::move(covers), std::move(copies), std::move(matches));
    if (j.contains("hanging")) {
      std::vector<ElevationId> stored;
      for (const auto& h : j.at("hanging")) stored.push_back(elevation_id_from_json(h));
      require(stored == p.hanging(), ErrorKind::Validation, "stored hanging list disagrees with the matching");
    }
    return p;
  } catch (const json::exception& e) {
    fail(ErrorKind::Validation, std::string("malformed pre-cover: ") + e.what());
  }
}

inline json elevation_table_json(const PreCover& p) {
  json rows = json::array();
  for (const auto& r : elevation_table(p)) {
    json row = to_json(r.id);
    row["degree"] = r.degree;
    row["start"] = r.start;
    row["matched"] = r.matched;
    rows.push_back(row);
  }
  return rows;
}

// Certificates.

inline json to_json(const MonomorphismCertificate& c) {
  return {{"kind", to_string(CertificateKind::Monomorphism)},
          {"holds", c.holds},
          {"connected", c.connected},
          {"copies", c.copies},
          {"matches", c.matches},
          {"generators", c.generators},
          {"relators", c.relators},
          {"stable_letters", c.stable_letters},
          {"relators_trivial", c.relators_trivial},
          {"tree_letters_trivial", c.tree_letters_trivial},
          {"transports", to_json_list(c.transports)}};
}

inline json to_json(const OneEndedCertificate& c) {
  json copies = json::array();
  for (const auto& w : c.copies) {
    copies.push_back({{"copy", w.copy},
                      {"vertex", w.vertex},
                      {"rank", w.rank},
                      {"classes", w.classes},
                      {"graph_vertices", w.graph_vertices},
                      {"graph_edges", w.graph_edges},
                      {"connected", w.connected},
                      {"cut_vertices", w.cut_vertices},
                      {"minimized", w.minimized},
                      {"indecomposable", w.indecomposable}});
  }
  return {{"kind", to_string(CertificateKind::OneEnded)}, {"holds", c.holds}, {"failure", c.failure}, {"copies", copies}};
}

inline json to_json(const InfiniteIndexCertificate& c) {
  return {{"kind", to_string(CertificateKind::InfiniteIndex)},
          {"applicable", c.applicable},
          {"base_reduced", c.base_reduced},
          {"reason", c.reason},
          {"hanging", to_json_list(c.hanging)}};
}

inline json to_json(const Certificates& c) {
  return json::array({to_json(c.monomorphism), to_json(c.one_ended), to_json(c.infinite_index)});
}

inline json to_json(const Pi1Result& r) {
  json cores = json::array();
  for (const auto& w : r.match_core) cores.push_back(w.str());
  return {{"presentation", to_json(r.presentation)},
          {"base_presentation", to_json(r.base.presentation)},
          {"copy_offset", r.copy_offset},
          {"match_stable", r.match_stable},
          {"tree_parent_match", r.tree_parent_match},
          {"transport", to_json_list(r.transport)},
          {"match_core", cores}};
}

inline json to_json(const Bookkeeping& b) {
  return {{"m", b.m},
          {"n", b.n},
          {"y_copies", b.y_copies},
          {"z_copies", b.z_copies},
          {"xprime_copies", b.xprime_copies},
          {"elevations_per_map", b.elevations_per_map},
          {"hanging_before", b.hanging_before},
          {"copies_before", b.copies_before},
          {"copies_after", b.copies_after},
          {"hanging_after", b.hanging_after}};
}

inline json to_json(const BuildResult& r, const GraphOfGroups& g, int vertex) {
  return {{"vertex", g.vertices[static_cast<std::size_t>(vertex)].name},
          {"classification", to_json(r.classification, g.vertices[static_cast<std::size_t>(vertex)].rank)},
          {"clean_cover_degree", r.clean_cover.degree()},
          {"extension_degree", r.extension_degree},
          {"extension_mirrored", r.extension_mirrored},
          {"bookkeeping", to_json(r.bookkeeping)},
          {"precover", to_json(r.precover)},
          {"pi1", to_json(r.pi1)},
          {"certificates", to_json(r.certificates)}};
}

struct ReplayResult {
  bool ok = false;
  std::vector<std::string> mismatches;
};

// Re-derives every certificate from the serialized pre-cover alone and
// compares with the stored certificates.
inline ReplayResult replay_bundle(const json& bundle, int rank_cap = kDefaultRankCap, int threads = 1) {
  ReplayResult r;
  const PreCover p = precover_from_json(bundle.at("precover"));
  const Pi1Result pi = pi1_precover(p);
  const Certificates fresh{monomorphism_certificate(p, pi, threads), one_ended_certificate(p, rank_cap, threads),
                           infinite_index_certificate(p)};
  const json now = to_json(fresh);
  const json& stored = bundle.at("certificates");
  for (std::size_t i = 0; i < now.size(); ++i) {
    const std::string kind = now[i].at("kind").get<std::string>();
    if (i >= stored.size() || stored[i] != now[i]) r.mismatches.push_back(kind + ": stored evidence differs");
  }
  if (!fresh.monomorphism.holds) r.mismatches.push_back("MONOMORPHISM does not hold");
  if (!fresh.one_ended.holds) r.mismatches.push_back("ONE_ENDED does not hold: " + fresh.one_ended.failure);
  if (!fresh.infinite_index.applicable) r.mismatches.push_back("INFINITE_INDEX not applicable: " + fresh.infinite_index.reason);
  if (bundle.contains("pi1") && bundle.at("pi1").at("presentation") != to_json(pi.presentation)) {
    r.mismatches.push_back("presentation differs");
  }
  r.ok = r.mismatches.empty();
  return r;
}

// Order.

inline json to_json(const MarkedSubgroup& m) {
  json gens = json::array();
  for (const auto& w : subgroup_basis(m.subgroup)) gens.push_back(w.str());
  return {{"rank", m.rank()},
          {"index", index(m.subgroup) ? json(*index(m.subgroup)) : json(nullptr)},
          {"generators", gens},
          {"marking", to_json(m.marking)}};
}

inline json to_json(const Comparison& c) {
  return {{"verdict", to_string(c.verdict)},
          {"leq", c.leq},
          {"geq", c.geq},
          {"index_in_a", c.index_in_a ? json(*c.index_in_a) : json(nullptr)},
          {"index_in_b", c.index_in_b ? json(*c.index_in_b) : json(nullptr)},
          {"meet_rank", c.meet_rank},
          {"induced_a", to_json(c.induced_a)},
          {"induced_b", to_json(c.induced_b)}};
}

inline json to_json(const Descent& d, int rank) {
  json out{{"result", to_string(d.kind)}, {"classification", to_json(d.classification, rank)}};
  out["surface"] = d.surface ? to_json(*d.surface) : json(nullptr);
  out["smaller"] = d.smaller ? to_json(*d.smaller) : json(nullptr);
  out["clean_degree"] = d.clean_degree;
  out["dropped"] = d.dropped ? json(d.dropped->str()) : json(nullptr);
  out["witness"] = d.witness;
  return out;
}

// DOT.

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

template <class Graph>
std::string dot_labelled(const Graph& g, const std::string& name) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(name) << "\" {\n";
  os << "  0 [shape=doublecircle];\n";
  for (int v = 1; v < g.vertex_count(); ++v) os << "  " << v << " [shape=circle];\n";
  for (int v = 0; v < g.vertex_count(); ++v) {
    for (int x = 1; x <= g.rank(); ++x) {
      const int w = g.step(v, x);
      if (w >= 0) os << "  " << v << " -> " << w << " [label=\"" << letter_name(x) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

inline std::string to_dot(const CoreGraph& g) { return dot_labelled(g, "core"); }
inline std::string to_dot(const CoverGraph& g) { return dot_labelled(g, "cover"); }

inline std::string to_dot(const WhiteheadGraph& w) {
  std::ostringstream os;
  os << "graph whitehead {\n";
  for (Letter l : Basis(w.rank).letters()) os << "  " << letter_slot(l) << " [label=\"" << letter_name(l) << "\"];\n";
  for (const auto& e : w.graph.edges) os << "  " << e.u << " -- " << e.v << ";\n";
  os << "}\n";
  return os.str();
}

inline std::string to_dot(const PreCover& p) {
  std::ostringstream os;
  os << "graph precover {\n";
  for (int c = 0; c < p.copy_count(); ++c) {
    const auto& vc = p.copies()[static_cast<std::size_t>(c)];
    os << "  " << c << " [label=\"" << dot_escape(p.base().vertices[static_cast<std::size_t>(vc.vertex)].name) << "#"
       << c << "\"];\n";
  }
  for (const auto& m : p.matches()) {
    os << "  " << m.plus.copy << " -- " << m.minus.copy << " [label=\""
       << dot_escape(p.base().edges[static_cast<std::size_t>(m.edge())].name) << "\"];\n";
  }
  std::map<int, int> hanging;
  for (const auto& h : p.hanging()) ++hanging[h.copy];
  for (const auto& [c, n] : hanging) {
    os << "  h" << c << " [shape=point];\n  " << c << " -- h" << c << " [style=dashed,label=\"" << n << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace oneend::io
