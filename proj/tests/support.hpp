#pragma once

// Independent oracles and seeded generators shared by the test programs.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oneend/stallings.hpp"
#include "oneend/words.hpp"

namespace oracle {

inline std::uint64_t seed() {
  if (const char* env = std::getenv("ONEEND_SEED")) return std::strtoull(env, nullptr, 10);
  return 20240601ULL;
}

// Words as strings over a..z / A..Z, manipulated without the library.

inline char inv(char c) { return std::islower(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c)) : static_cast<char>(std::tolower(c)); }

inline std::string free_reduce(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!out.empty() && out.back() == inv(c)) {
      out.pop_back();
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::string cyclic_core(std::string s) {
  s = free_reduce(s);
  while (s.size() >= 2 && s.front() == inv(s.back())) s = s.substr(1, s.size() - 2);
  return s;
}

inline std::string inverse(const std::string& s) {
  std::string out(s.rbegin(), s.rend());
  for (auto& c : out) c = inv(c);
  return out;
}

inline std::vector<std::string> rotations(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < s.size(); ++k) out.push_back(s.substr(k) + s.substr(0, k));
  return out;
}

// Alphabet a, A, b, B, ... for the given rank.
inline std::string alphabet(int rank) {
  std::string out;
  for (int i = 0; i < rank; ++i) {
    out.push_back(static_cast<char>('a' + i));
    out.push_back(static_cast<char>('A' + i));
  }
  return out;
}

// All cyclically reduced words of exactly length n, as strings.
inline std::vector<std::string> cyclic_words(int rank, int n) {
  std::vector<std::string> out;
  const std::string letters = alphabet(rank);
  std::string cur;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == n) {
      if (n == 0 || (cur.front() != inv(cur.back()))) out.push_back(cur);
      return;
    }
    for (char c : letters) {
      if (!cur.empty() && cur.back() == inv(c)) continue;
      cur.push_back(c);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

// One representative per class up to rotation and inversion (the
// lexicographically least string), for words of length 1..max_len.
inline std::vector<std::string> class_representatives(int rank, int max_len) {
  std::set<std::string> reps;
  for (int n = 1; n <= max_len; ++n) {
    for (const auto& w : cyclic_words(rank, n)) {
      std::string best = w;
      for (const auto& r : rotations(w)) best = std::min(best, r);
      for (const auto& r : rotations(inverse(w))) best = std::min(best, r);
      reps.insert(best);
    }
  }
  return {reps.begin(), reps.end()};
}

inline std::string class_key(const std::string& w) {
  const std::string c = cyclic_core(w);
  std::string best = c;
  for (const auto& r : rotations(c)) best = std::min(best, r);
  for (const auto& r : rotations(inverse(c))) best = std::min(best, r);
  return best;
}

// Whitehead automorphism (A, a) by substitution: a fixed; for x not a^+-1,
// x -> (a^-1 if x^-1 in A) x (a if x in A). A contains a but not a^-1.
inline std::string whitehead_substitute(const std::string& w, char a, const std::string& subset) {
  auto in = [&](char c) { return subset.find(c) != std::string::npos; };
  std::string out;
  for (char x : w) {
    if (x == a || x == inv(a)) {
      out.push_back(x);
      continue;
    }
    if (in(inv(x))) out.push_back(inv(a));
    out.push_back(x);
    if (in(x)) out.push_back(a);
  }
  return free_reduce(out);
}

struct SubstitutionMove {
  char special;
  std::string subset;
};

inline std::vector<SubstitutionMove> substitution_moves(int rank) {
  const std::string letters = alphabet(rank);
  std::vector<SubstitutionMove> out;
  for (char a : letters) {
    std::string others;
    for (char c : letters) {
      if (c != a && c != inv(a)) others.push_back(c);
    }
    for (std::uint32_t mask = 0; mask < (1U << others.size()); ++mask) {
      std::string subset(1, a);
      for (std::size_t i = 0; i < others.size(); ++i) {
        if (mask >> i & 1U) subset.push_back(others[i]);
      }
      out.push_back({a, subset});
    }
  }
  return out;
}

// Permutation action helpers.

inline std::vector<std::vector<int>> random_transitive_perms(std::mt19937_64& rng, int rank, int degree) {
  while (true) {
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(rank), std::vector<int>(static_cast<std::size_t>(degree)));
    for (auto& p : perms) {
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
    }
    std::vector<char> seen(static_cast<std::size_t>(degree), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& p : perms) {
        for (int u = 0; u < degree; ++u) {
          const bool adjacent = p[static_cast<std::size_t>(v)] == u || p[static_cast<std::size_t>(u)] == v;
          if (adjacent && !seen[static_cast<std::size_t>(u)]) {
            seen[static_cast<std::size_t>(u)] = 1;
            stack.push_back(u);
          }
        }
      }
    }
    if (std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; })) return perms;
  }
}

// Sheet reached from s by reading the string w under the permutation action.
inline int act(const std::vector<std::vector<int>>& perms, int s, const std::string& w) {
  for (char c : w) {
    const auto& p = perms[static_cast<std::size_t>(std::tolower(c) - 'a')];
    if (std::islower(static_cast<unsigned char>(c))) {
      s = p[static_cast<std::size_t>(s)];
    } else {
      s = static_cast<int>(std::find(p.begin(), p.end(), s) - p.begin());
    }
  }
  return s;
}

// Cycle lengths of the permutation induced by w, sorted.
inline std::vector<int> cycle_type(const std::vector<std::vector<int>>& perms, const std::string& w) {
  const int d = static_cast<int>(perms.front().size());
  std::vector<char> seen(static_cast<std::size_t>(d), 0);
  std::vector<int> out;
  for (int s = 0; s < d; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    int len = 0;
    for (int t = s; !seen[static_cast<std::size_t>(t)]; t = act(perms, t, w)) {
      seen[static_cast<std::size_t>(t)] = 1;
      ++len;
    }
    out.push_back(len);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string random_cyclic_word(std::mt19937_64& rng, int rank, int min_len, int max_len) {
  const std::string letters = alphabet(rank);
  std::uniform_int_distribution<int> len_dist(min_len, max_len);
  std::uniform_int_distribution<int> letter_dist(0, static_cast<int>(letters.size()) - 1);
  while (true) {
    std::string w;
    const int n = len_dist(rng);
    for (int i = 0; i < n; ++i) w.push_back(letters[static_cast<std::size_t>(letter_dist(rng))]);
    w = cyclic_core(w);
    if (!w.empty()) return w;
  }
}

inline std::string random_word(std::mt19937_64& rng, int rank, int max_len) {
  const std::string letters = alphabet(rank);
  std::uniform_int_distribution<int> len_dist(0, max_len);
  std::uniform_int_distribution<int> letter_dist(0, static_cast<int>(letters.size()) - 1);
  std::string w;
  const int n = len_dist(rng);
  for (int i = 0; i < n; ++i) w.push_back(letters[static_cast<std::size_t>(letter_dist(rng))]);
  return free_reduce(w);
}

// Multiword key up to rotation and inversion of each word and reordering.
inline std::string multiword_key(const std::vector<std::string>& ws) {
  std::vector<std::string> keys;
  for (const auto& w : ws) keys.push_back(class_key(w));
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (const auto& k : keys) out += k + ",";
  return out;
}

// Least total length over the closure of `ws` under Whitehead automorphisms,
// restricted to multiwords no longer than the input plus `slack`.
inline std::size_t closure_min_length(const std::vector<std::string>& ws, int rank, std::size_t slack) {
  const auto moves = substitution_moves(rank);
  auto total = [](const std::vector<std::string>& v) {
    std::size_t n = 0;
    for (const auto& w : v) n += w.size();
    return n;
  };
  const std::size_t ceiling = total(ws) + slack;
  std::vector<std::vector<std::string>> frontier{ws};
  std::set<std::string> seen{multiword_key(ws)};
  std::size_t best = total(ws);
  while (!frontier.empty()) {
    const auto cur = std::move(frontier.back());
    frontier.pop_back();
    for (const auto& m : moves) {
      std::vector<std::string> img;
      for (const auto& w : cur) img.push_back(cyclic_core(whitehead_substitute(w, m.special, m.subset)));
      const std::size_t len = total(img);
      if (len > ceiling || !seen.insert(multiword_key(img)).second) continue;
      best = std::min(best, len);
      frontier.push_back(std::move(img));
    }
  }
  return best;
}

// Least total length reachable by at most `depth` Whitehead automorphisms.
inline std::size_t depth_limited_min_length(const std::vector<std::string>& ws, int rank, int depth) {
  const auto moves = substitution_moves(rank);
  auto total = [](const std::vector<std::string>& v) {
    std::size_t n = 0;
    for (const auto& w : v) n += w.size();
    return n;
  };
  std::vector<std::vector<std::string>> level{ws};
  std::set<std::string> seen{multiword_key(ws)};
  std::size_t best = total(ws);
  for (int step = 0; step < depth; ++step) {
    std::vector<std::vector<std::string>> next;
    for (const auto& cur : level) {
      for (const auto& m : moves) {
        std::vector<std::string> img;
        for (const auto& w : cur) img.push_back(cyclic_core(whitehead_substitute(w, m.special, m.subset)));
        if (seen.insert(multiword_key(img)).second) {
          best = std::min(best, total(img));
          next.push_back(std::move(img));
        }
      }
    }
    level = std::move(next);
  }
  return best;
}

}  // namespace oracle
