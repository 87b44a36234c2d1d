// Command-line front end for the oneend library.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oneend/covers.hpp"
#include "oneend/error.hpp"
#include "oneend/gog.hpp"
#include "oneend/io.hpp"
#include "oneend/order.hpp"
#include "oneend/stallings.hpp"
#include "oneend/whitehead.hpp"
#include "oneend/words.hpp"

namespace {

using oneend::io::json;
using namespace oneend;

struct Config {
  int rank = 0;  // 0: infer from the words
  int rank_cap = kDefaultRankCap;
  std::size_t degree_cap = kDefaultDegreeCap;
  int search_degree_max = 8;
  long long seed = 0;
  std::string format;
  int threads = 1;
};

enum ExitCode { kOk = 0, kInternal = 1, kValidation = 2, kSearchExhausted = 3, kCapExceeded = 4 };

std::vector<CyclicWord> parse_multiword(const std::vector<std::string>& texts) {
  require(!texts.empty(), ErrorKind::Validation, "no words given");
  std::vector<CyclicWord> out;
  for (const auto& t : texts) {
    const Word w = Word::parse(t);
    require(!w.empty(), ErrorKind::Validation, "word '" + t + "' is trivial");
    out.push_back(cyclic_reduce(w).cyclic);
  }
  return out;
}

// Without --rank the words are read in F_2 or in the smallest free group
// containing their letters, whichever is larger.
int rank_for(const Config& cfg, const std::vector<CyclicWord>& ws) {
  const int inferred = inferred_rank(ws);
  if (cfg.rank == 0) return std::max(2, inferred);
  require(cfg.rank >= inferred, ErrorKind::Validation,
          "--rank " + std::to_string(cfg.rank) + " is smaller than the letters used (" + std::to_string(inferred) + ")");
  return cfg.rank;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Validation, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Validation, "cannot parse " + path + ": " + e.what());
  }
}

json config_json(const Config& cfg) {
  return {{"rank_cap", cfg.rank_cap},
          {"degree_cap", cfg.degree_cap},
          {"search_degree_max", cfg.search_degree_max},
          {"seed", cfg.seed}};
}

std::string words_text(const std::vector<CyclicWord>& ws) {
  std::string s;
  for (const auto& w : ws) s += (s.empty() ? "" : " ") + w.str();
  return s;
}

void emit(const Config& cfg, const std::string& command, const json& result, const std::string& text,
          const std::string& dot = {}) {
  const std::string format = cfg.format.empty() ? (command == "whitehead-graph" ? "dot" : "json") : cfg.format;
  if (format == "text") {
    std::cout << text;
  } else if (format == "dot") {
    require(!dot.empty(), ErrorKind::Validation, command + " has no DOT output");
    std::cout << dot;
  } else {
    json out{{"command", command}, {"config", config_json(cfg)}, {"result", result}};
    std::cout << out.dump(2) << "\n";
  }
}

std::string surface_text(const SurfaceData& s) {
  std::ostringstream os;
  if (s.orientable) {
    os << "orientable, genus " << s.genus;
  } else {
    os << "non-orientable, " << s.genus << " crosscap(s)";
  }
  os << ", " << s.boundary << " boundary component(s)";
  return os.str();
}

MarkedSubgroup marked_from_options(const Ambient& a, const std::vector<std::string>& gens,
                                   const std::vector<std::string>& marks, int drop) {
  std::vector<Word> g;
  for (const auto& t : gens) g.push_back(Word::parse(t));
  if (g.empty()) {
    for (int x = 1; x <= a.rank; ++x) g.push_back(Word::letter(x));
  }
  std::vector<Word> ws;
  for (const auto& t : marks) ws.push_back(Word::parse(t));
  MarkedSubgroup m = marked_subgroup(a, g, ws);
  if (marks.empty()) m.marking = pullback_structure(m.subgroup, a.structure);
  if (drop >= 0) {
    require(drop < static_cast<int>(m.marking.size()), ErrorKind::Validation, "drop index out of range");
    m.marking = m.marking.without(static_cast<std::size_t>(drop));
  }
  return m;
}

Ambient ambient_from(const Config& cfg, const std::vector<std::string>& texts) {
  const auto ws = parse_multiword(texts);
  return {rank_for(cfg, ws), make_peripheral_structure(ws)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whitehead graphs, Stallings covers and one-ended subgroups of graphs of free groups"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--rank", cfg.rank, "Rank of the free group (default: at least 2, enough for the letters used)")->check(CLI::NonNegativeNumber);
  app.add_option("--rank-cap", cfg.rank_cap, "Largest rank handled by exhaustive Whitehead search")
      ->check(CLI::PositiveNumber);
  app.add_option("--degree-cap", cfg.degree_cap, "Largest cover degree built by normal cores")->check(CLI::PositiveNumber);
  app.add_option("--search-degree-max", cfg.search_degree_max, "Largest degree tried when extending covers")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed (ONEEND_SEED overrides)");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text", "dot"}));
  app.add_option("--threads", cfg.threads, "Worker threads for certificate checks")->check(CLI::PositiveNumber);

  std::vector<std::string> words;
  std::string file;
  std::string cover_file;
  std::string vertex;
  std::string out_file;
  std::optional<int> drop;
  bool assume_rigid = false;
  std::vector<std::string> ambient, a_gens, a_marks, b_gens, b_marks;
  int a_drop = -1, b_drop = -1;
  std::string mode = "pointed";

  auto* minimize_cmd = app.add_subcommand("minimize", "Whitehead-minimize a multiword");
  minimize_cmd->add_option("words", words, "Words")->required();
  auto* graph_cmd = app.add_subcommand("whitehead-graph", "Whitehead graph of a multiword (DOT by default)");
  graph_cmd->add_option("words", words, "Words")->required();
  auto* classify_cmd = app.add_subcommand("classify", "Classify a free group with a multiword");
  classify_cmd->add_option("words", words, "Words")->required();
  auto* clean_cmd = app.add_subcommand("clean-cover", "Clean regular cover for a multiword");
  clean_cmd->add_option("words", words, "Words")->required();
  auto* pullback_cmd = app.add_subcommand("pullback", "Elevations and pullback structure to a cover");
  pullback_cmd->add_option("--cover", cover_file, "Cover JSON")->required();
  pullback_cmd->add_option("words", words, "Words")->required();
  auto* splice_cmd = app.add_subcommand("splice-check", "Compare the spliced and direct pullback Whitehead graphs");
  splice_cmd->add_option("--cover", cover_file, "Cover JSON (default: clean cover)");
  splice_cmd->add_option("--drop", drop, "Elevation to drop for the connectivity check");
  splice_cmd->add_option("words", words, "Words")->required();
  auto* one_ended_cmd = app.add_subcommand("one-ended", "One-endedness of a graph of free groups");
  one_ended_cmd->add_option("file", file, "Graph of groups JSON")->required();
  auto* build_cmd = app.add_subcommand("build", "Build a one-ended subgroup of infinite index");
  build_cmd->add_option("file", file, "Graph of groups JSON")->required();
  build_cmd->add_option("--vertex", vertex, "Vertex name (default: first vertex)");
  build_cmd->add_option("--out", out_file, "Write the full bundle here and print a summary");
  build_cmd->add_flag("--assume-rigid", assume_rigid, "Accept a vertex that is not a rigid candidate");
  auto* compare_cmd = app.add_subcommand("compare", "Compare two marked subgroups");
  compare_cmd->add_option("--ambient", ambient, "Ambient multiword")->required();
  compare_cmd->add_option("--a-gens", a_gens, "Generators of A (default: the whole group)");
  compare_cmd->add_option("--a-marks", a_marks, "Marking of A as words of F (default: full pullback)");
  compare_cmd->add_option("--a-drop", a_drop, "Drop this class from A's marking");
  compare_cmd->add_option("--b-gens", b_gens, "Generators of B");
  compare_cmd->add_option("--b-marks", b_marks, "Marking of B");
  compare_cmd->add_option("--b-drop", b_drop, "Drop this class from B's marking");
  compare_cmd->add_option("--mode", mode, "Intersection mode")->check(CLI::IsMember({"pointed", "conjugacy"}));
  auto* descend_cmd = app.add_subcommand("descend", "One descent step in the poset");
  descend_cmd->add_option("--ambient", ambient, "Ambient multiword")->required();
  descend_cmd->add_option("--gens", a_gens, "Generators (default: the whole group)");
  descend_cmd->add_option("--marks", a_marks, "Marking as words of F (default: full pullback)");
  auto* verify_cmd = app.add_subcommand("verify", "Replay the certificates of a build bundle");
  verify_cmd->add_option("file", file, "Bundle JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  if (const char* env = std::getenv("ONEEND_SEED")) {
    try {
      cfg.seed = std::stoll(env);
    } catch (const std::exception&) {
      std::cerr << "error: validation: ONEEND_SEED is not an integer\n";
      return kValidation;
    }
  }

  try {
    if (minimize_cmd->parsed()) {
      const auto ws = parse_multiword(words);
      const int rank = rank_for(cfg, ws);
      const auto r = minimize(ws, rank, cfg.rank_cap);
      std::ostringstream text;
      for (const auto& m : r.moves) text << m.str(rank) << "\n";
      text << words_text(r.words) << " (length " << total_length(ws) << " -> " << total_length(r.words) << ")\n";
      emit(cfg, "minimize",
           {{"input", io::to_json_list(ws)},
            {"rank", rank},
            {"moves", io::moves_json(r.moves, rank)},
            {"words", io::to_json_list(r.words)},
            {"length_before", total_length(ws)},
            {"length_after", total_length(r.words)}},
           text.str());
    } else if (graph_cmd->parsed()) {
      const auto ws = parse_multiword(words);
      const auto g = whitehead_graph(Basis(rank_for(cfg, ws)), ws);
      std::ostringstream text;
      text << g.edge_count() << " edges, " << (is_connected(g.graph) ? "connected" : "disconnected") << ", "
           << articulation_points(g.graph).size() << " cut vertices\n";
      emit(cfg, "whitehead-graph", io::to_json(g), text.str(), io::to_dot(g));
    } else if (classify_cmd->parsed()) {
      const auto ws = parse_multiword(words);
      const int rank = rank_for(cfg, ws);
      const auto c = classify_pair(ws, rank, cfg.rank_cap);
      std::string text = std::string(to_string(c.tag));
      if (c.surface) text += ": " + surface_text(*c.surface);
      emit(cfg, "classify", io::to_json(c, rank), text + "\n");
    } else if (clean_cmd->parsed()) {
      const auto ws = parse_multiword(words);
      const int rank = rank_for(cfg, ws);
      const auto c = clean_subgroup(ws, CoverGraph::rose(rank), cfg.degree_cap);
      json elev = json::array();
      for (const auto& w : ws) elev.push_back({{"word", w.str()}, {"elevations", elevations(c, w).size()}});
      emit(cfg, "clean-cover",
           {{"degree", c.degree()}, {"clean", is_clean(c, ws)}, {"elevations", elev}, {"cover", io::to_json(c)}},
           "clean regular cover of degree " + std::to_string(c.degree()) + "\n", io::to_dot(c));
    } else if (pullback_cmd->parsed()) {
      const auto ws = parse_multiword(words);
      const auto c = io::cover_from_json(read_json_file(cover_file));
      require(c.rank() >= inferred_rank(ws), ErrorKind::Validation, "cover rank is smaller than the words need");
      const SpanningTree<CoverGraph> tree(c);
      json per_word = json::array();
      for (const auto& w : ws) {
        json list = json::array();
        for (const auto& e : elevations(c, w, tree)) {
          json row = io::to_json(e);
          row["class"] = elevation_class_word(tree, w, e).str();
          list.push_back(row);
        }
        per_word.push_back({{"word", w.str()}, {"elevations", list}});
      }
      const auto pb = pullback_structure(c, make_peripheral_structure(ws));
      emit(cfg, "pullback",
           {{"degree", c.degree()}, {"generators", tree.generator_count()}, {"words", per_word},
            {"pullback", io::to_json(pb)}},
           std::to_string(pb.size()) + " pullback classes over " + std::to_string(tree.generator_count()) +
               " generators\n");
    } else if (splice_cmd->parsed()) {
      const auto ws = parse_multiword(words);
      const int rank = rank_for(cfg, ws);
      const CoverGraph c = cover_file.empty() ? clean_subgroup(ws, CoverGraph::rose(rank), cfg.degree_cap)
                                              : io::cover_from_json(read_json_file(cover_file));
      const SpanningTree<CoverGraph> tree(c);
      const auto spliced = spliced_pullback_graph(c, ws);
      std::vector<CyclicWord> classes;
      for (const auto& w : ws) {
        for (const auto& e : elevations(c, w, tree)) classes.push_back(elevation_class_word(tree, w, e));
      }
      const auto direct = whitehead_graph(Basis(std::max(1, tree.generator_count())), classes);
      const bool same = spliced.graph.edge_multiset() == direct.graph.edge_multiset();
      json result{{"degree", c.degree()},
                  {"generators", tree.generator_count()},
                  {"edges", spliced.edge_count()},
                  {"spliced_equals_direct", same}};
      std::string text = std::string("spliced graph ") + (same ? "equals" : "differs from") + " the direct graph\n";
      if (drop || cover_file.empty()) {
        const auto r = local_theorem_check(ws, c, drop, cfg.rank_cap);
        result["local_check"] = io::to_json(r);
        text += std::string("connected without cut vertex: ") + (r.ok ? "yes" : "no") + "\n";
      }
      emit(cfg, "splice-check", result, text);
    } else if (one_ended_cmd->parsed()) {
      const auto g = io::gog_from_json(read_json_file(file));
      const auto r = is_one_ended(g, cfg.rank_cap);
      std::string text = std::string("one-ended: ") + (r.one_ended ? "true" : "false") + "\n";
      for (const auto& v : r.vertices) {
        if (!v.witness.indecomposable) text += "  vertex " + v.name + " is freely decomposable relative to its edges\n";
      }
      emit(cfg, "one-ended", io::to_json(r), text);
    } else if (build_cmd->parsed()) {
      const auto g = io::gog_from_json(read_json_file(file));
      int v = 0;
      if (!vertex.empty()) {
        const auto found = g.find_vertex(vertex);
        require(found.has_value(), ErrorKind::Validation, "unknown vertex " + vertex);
        v = *found;
      }
      BuildOptions options;
      options.rank_cap = cfg.rank_cap;
      options.degree_cap = cfg.degree_cap;
      options.extend.max_degree = cfg.search_degree_max;
      options.assume_rigid = assume_rigid;
      options.threads = cfg.threads;
      const auto r = build_one_ended_subgroup(g, v, options);
      const json bundle = io::to_json(r, g, v);
      const auto& bk = r.bookkeeping;
      json summary{{"vertex", g.vertices[static_cast<std::size_t>(v)].name},
                   {"clean_cover_degree", r.clean_cover.degree()},
                   {"extension_degree", r.extension_degree},
                   {"bookkeeping", io::to_json(bk)},
                   {"generators", r.pi1.presentation.generator_count()},
                   {"relators", r.pi1.presentation.relators.size()},
                   {"certificates",
                    {{"MONOMORPHISM", r.certificates.monomorphism.holds},
                     {"ONE_ENDED", r.certificates.one_ended.holds},
                     {"INFINITE_INDEX", r.certificates.infinite_index.applicable}}}};
      std::ostringstream text;
      text << "copies " << bk.copies_after << ", matches " << r.precover.matches().size() << ", hanging "
           << bk.hanging_after << "\npresentation: " << r.pi1.presentation.generator_count() << " generators, "
           << r.pi1.presentation.relators.size() << " relators\ncertificates: MONOMORPHISM ONE_ENDED INFINITE_INDEX\n";
      if (!out_file.empty()) {
        std::ofstream out(out_file);
        require(static_cast<bool>(out), ErrorKind::Validation, "cannot write " + out_file);
        out << json{{"command", "build"}, {"config", config_json(cfg)}, {"result", bundle}}.dump() << "\n";
        summary["bundle"] = out_file;
        emit(cfg, "build", summary, text.str(), io::to_dot(r.precover));
      } else {
        emit(cfg, "build", bundle, text.str(), io::to_dot(r.precover));
      }
    } else if (compare_cmd->parsed()) {
      const auto a = ambient_from(cfg, ambient);
      const auto lhs = marked_from_options(a, a_gens, a_marks, a_drop);
      const auto rhs = marked_from_options(a, b_gens, b_marks, b_drop);
      const auto c = mode == "conjugacy" ? compare_up_to_conjugacy(lhs, rhs) : compare(lhs, rhs);
      json result = io::to_json(c);
      result["mode"] = mode;
      result["a"] = io::to_json(lhs);
      result["b"] = io::to_json(rhs);
      emit(cfg, "compare", result, std::string(to_string(c.verdict)) + "\n");
    } else if (descend_cmd->parsed()) {
      const auto a = ambient_from(cfg, ambient);
      const auto m = marked_from_options(a, a_gens, a_marks, -1);
      const auto d = descend(m, a, cfg.rank_cap, cfg.degree_cap);
      std::string text = to_string(d.kind);
      if (d.surface) text += ": " + surface_text(*d.surface);
      if (d.smaller) {
        text += ": rank " + std::to_string(d.smaller->rank()) + ", " + std::to_string(d.smaller->marking.size()) +
                " classes";
      }
      if (!d.witness.empty()) text += ": " + d.witness;
      emit(cfg, "descend", io::to_json(d, m.rank()), text + "\n");
    } else if (verify_cmd->parsed()) {
      json doc = read_json_file(file);
      const json& bundle = doc.contains("result") ? doc.at("result") : doc;
      const auto r = io::replay_bundle(bundle, cfg.rank_cap, cfg.threads);
      std::string text = r.ok ? "all certificates replay\n" : "";
      for (const auto& m : r.mismatches) text += m + "\n";
      emit(cfg, "verify", {{"ok", r.ok}, {"mismatches", r.mismatches}}, text);
      if (!r.ok) return kInternal;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Validation:
      case ErrorKind::Precondition: return kValidation;
      case ErrorKind::SearchExhausted: return kSearchExhausted;
      case ErrorKind::CapExceeded: return kCapExceeded;
      case ErrorKind::Contract: return kInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
