#pragma once

// Free-group words over a ranked basis: free and cyclic reduction, roots,
// conjugacy-class canonical forms and peripheral structures.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oneend/error.hpp"

namespace oneend {

// A signed letter: +(i+1) is the i-th basis element, -(i+1) its inverse.
using Letter = int;

inline int letter_index(Letter l) { return std::abs(l) - 1; }

// Position of a letter among the 2r letters: a, A, b, B, ...
inline int letter_slot(Letter l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }
inline Letter slot_letter(int slot) { return (slot % 2 == 0) ? slot / 2 + 1 : -(slot / 2 + 1); }

// Canonical order: every basis letter precedes every inverse letter.
inline int letter_key(Letter l) {
  constexpr int kInverseOffset = 1 << 24;
  return l > 0 ? l : kInverseOffset - l;
}

inline std::string letter_name(Letter l) {
  const int i = letter_index(l);
  if (i < 26) {
    const char c = static_cast<char>('a' + i);
    return std::string(1, l > 0 ? c : static_cast<char>(std::toupper(c)));
  }
  return (l > 0 ? "x" : "X") + std::to_string(i + 1);
}

struct Basis {
  int rank = 1;

  explicit Basis(int r = 1) : rank(r) {
    require(r >= 1, ErrorKind::Validation, "basis rank must be at least 1");
  }

  bool contains(Letter l) const { return l != 0 && std::abs(l) <= rank; }
  int letter_count() const { return 2 * rank; }

  // Letters in canonical order.
  std::vector<Letter> letters() const {
    std::vector<Letter> out;
    for (int i = 1; i <= rank; ++i) out.push_back(i);
    for (int i = 1; i <= rank; ++i) out.push_back(-i);
    return out;
  }
};

// Parses letter syntax: lowercase a..z are basis letters, uppercase their
// inverses; "x27" / "X27" address letters past the alphabet. Whitespace and
// '.' separators are ignored.
inline std::vector<Letter> parse_letters(std::string_view text) {
  std::vector<Letter> out;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '.') {
      ++i;
      continue;
    }
    if ((c == 'x' || c == 'X') && i + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      std::size_t j = i + 1;
      int value = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        value = value * 10 + (text[j] - '0');
        require(value < (1 << 22), ErrorKind::Validation, "letter index too large");
        ++j;
      }
      require(value >= 1, ErrorKind::Validation, "letter index must be positive");
      out.push_back(c == 'x' ? value : -value);
      i = j;
      continue;
    }
    if (c >= 'a' && c <= 'z') {
      out.push_back(c - 'a' + 1);
    } else if (c >= 'A' && c <= 'Z') {
      out.push_back(-(c - 'A' + 1));
    } else {
      fail(ErrorKind::Validation, std::string("unknown letter symbol '") + c + "'");
    }
    ++i;
  }
  return out;
}

// Freely reduced word.
class Word {
 public:
  Word() = default;

  static Word reduced(const std::vector<Letter>& raw) {
    Word w;
    w.letters_.reserve(raw.size());
    for (Letter l : raw) w.push_back(l);
    return w;
  }

  static Word parse(std::string_view text) { return reduced(parse_letters(text)); }

  static Word letter(Letter l) { return reduced({l}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  // Appends with free cancellation.
  void push_back(Letter l) {
    if (!letters_.empty() && letters_.back() == -l) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }

  Word inverse() const {
    Word w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
    return w;
  }

  Word& operator*=(const Word& other) {
    for (Letter l : other.letters_) push_back(l);
    return *this;
  }

  friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }

  Word power(int k) const {
    Word base = k < 0 ? inverse() : *this;
    Word out;
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return out;
  }

  int max_index() const {
    int m = 0;
    for (Letter l : letters_) m = std::max(m, std::abs(l));
    return m;
  }

  std::string str() const {
    std::string s;
    for (Letter l : letters_) {
      // Separate multi-character tokens so the output parses back.
      const std::string name = letter_name(l);
      if (name.size() > 1 && !s.empty() && s.back() != '.') s += '.';
      s += name;
      if (name.size() > 1) s += '.';
    }
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  bool operator==(const Word&) const = default;

  // Shortlex under the canonical letter order.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int ka = letter_key(a[i]);
      const int kb = letter_key(b[i]);
      if (ka != kb) return ka <=> kb;
    }
    return std::strong_ordering::equal;
  }

 private:
  std::vector<Letter> letters_;
};

// reduce: parse and freely reduce, checking letters against the basis.
inline Word reduce(const Basis& basis, std::string_view raw) {
  const auto letters = parse_letters(raw);
  for (Letter l : letters) {
    require(basis.contains(l), ErrorKind::Validation,
            "letter " + letter_name(l) + " is not in the rank-" + std::to_string(basis.rank) +
                " basis");
  }
  return Word::reduced(letters);
}

inline void check_in_basis(const Basis& basis, const Word& w) {
  require(w.max_index() <= basis.rank, ErrorKind::Validation,
          "word " + w.str() + " uses letters outside the rank-" + std::to_string(basis.rank) +
              " basis");
}

inline bool is_cyclically_reduced(const Word& w) {
  return w.size() <= 1 || w.front() != -w.back();
}

// Freely and cyclically reduced word, read up to rotation.
class CyclicWord {
 public:
  CyclicWord() = default;

  explicit CyclicWord(Word w) : word_(std::move(w)) {
    require(is_cyclically_reduced(word_), ErrorKind::Validation,
            "word " + word_.str() + " is not cyclically reduced");
  }

  static CyclicWord parse(std::string_view text) { return CyclicWord(Word::parse(text)); }

  const Word& word() const { return word_; }
  std::size_t size() const { return word_.size(); }
  bool empty() const { return word_.empty(); }
  Letter operator[](std::size_t i) const { return word_[i]; }
  std::string str() const { return word_.str(); }

  CyclicWord rotate(std::size_t k) const {
    if (word_.empty()) return *this;
    const auto& l = word_.letters();
    k %= l.size();
    std::vector<Letter> out(l.begin() + static_cast<long>(k), l.end());
    out.insert(out.end(), l.begin(), l.begin() + static_cast<long>(k));
    return CyclicWord(Word::reduced(out));
  }

  CyclicWord inverse() const { return CyclicWord(word_.inverse()); }

  bool operator==(const CyclicWord&) const = default;
  friend std::strong_ordering operator<=>(const CyclicWord& a, const CyclicWord& b) {
    return a.word_ <=> b.word_;
  }

 private:
  Word word_;
};

struct CyclicReduction {
  CyclicWord cyclic;
  Word conjugator;  // w = conjugator * cyclic * conjugator^-1
};

inline CyclicReduction cyclic_reduce(const Word& w) {
  const auto& l = w.letters();
  std::size_t lo = 0;
  std::size_t hi = l.size();
  while (hi - lo >= 2 && l[lo] == -l[hi - 1]) {
    ++lo;
    --hi;
  }
  std::vector<Letter> core(l.begin() + static_cast<long>(lo), l.begin() + static_cast<long>(hi));
  std::vector<Letter> conj(l.begin(), l.begin() + static_cast<long>(lo));
  return {CyclicWord(Word::reduced(core)), Word::reduced(conj)};
}

struct Root {
  CyclicWord root;
  int exponent = 1;
};

inline Root root(const CyclicWord& c) {
  require(!c.empty(), ErrorKind::Validation, "root of the empty word");
  const std::size_t n = c.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = c[i] == c[i - p];
    if (periodic) {
      std::vector<Letter> prefix(c.word().letters().begin(),
                                 c.word().letters().begin() + static_cast<long>(p));
      return {CyclicWord(Word::reduced(prefix)), static_cast<int>(n / p)};
    }
  }
  return {c, 1};
}

// Canonical representative of the conjugacy class of c up to inversion:
// minimal over all rotations of c and of c^-1.
struct ConjClassRep {
  CyclicWord word;

  bool operator==(const ConjClassRep&) const = default;
  friend std::strong_ordering operator<=>(const ConjClassRep& a, const ConjClassRep& b) {
    return a.word <=> b.word;
  }
  std::string str() const { return word.str(); }
};

inline ConjClassRep canonical_class(const CyclicWord& c) {
  require(!c.empty(), ErrorKind::Validation, "canonical class of the empty word");
  CyclicWord best = c;
  const CyclicWord inv = c.inverse();
  for (std::size_t k = 0; k < c.size(); ++k) {
    best = std::min({best, c.rotate(k), inv.rotate(k)});
  }
  return {best};
}

// Pairwise non-conjugate maximal cyclic subgroups, kept as canonical roots.
class PeripheralStructure {
 public:
  struct Entry {
    ConjClassRep root;
    int exponent = 1;  // diagnostic only; identity is by root class
  };

  PeripheralStructure() = default;

  // Adds a class given by a root; returns false if already present.
  bool insert(const ConjClassRep& rep, int exponent = 1) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), rep,
                               [](const Entry& e, const ConjClassRep& r) { return e.root < r; });
    if (it != entries_.end() && it->root == rep) return false;
    entries_.insert(it, Entry{rep, exponent});
    return true;
  }

  bool contains(const ConjClassRep& rep) const {
    return std::binary_search(entries_.begin(), entries_.end(), Entry{rep, 1},
                              [](const Entry& a, const Entry& b) { return a.root < b.root; });
  }

  bool subset_of(const PeripheralStructure& other) const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return other.contains(e.root); });
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::vector<CyclicWord> words() const {
    std::vector<CyclicWord> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.root.word);
    return out;
  }

  PeripheralStructure without(std::size_t index) const {
    PeripheralStructure out = *this;
    out.entries_.erase(out.entries_.begin() + static_cast<long>(index));
    return out;
  }

  bool operator==(const PeripheralStructure& other) const {
    if (size() != other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!(entries_[i].root == other.entries_[i].root)) return false;
    }
    return true;
  }

 private:
  std::vector<Entry> entries_;  // sorted by root
};

inline PeripheralStructure make_peripheral_structure(const std::vector<Word>& ws) {
  PeripheralStructure out;
  for (const auto& w : ws) {
    require(!w.empty(), ErrorKind::Validation, "peripheral structure given a trivial element");
    const auto r = root(cyclic_reduce(w).cyclic);
    out.insert(canonical_class(r.root), r.exponent);
  }
  return out;
}

inline PeripheralStructure make_peripheral_structure(const std::vector<CyclicWord>& ws) {
  std::vector<Word> plain;
  plain.reserve(ws.size());
  for (const auto& c : ws) plain.push_back(c.word());
  return make_peripheral_structure(plain);
}

inline std::size_t total_length(const std::vector<CyclicWord>& ws) {
  std::size_t n = 0;
  for (const auto& w : ws) n += w.size();
  return n;
}

inline std::vector<std::string> to_strings(const std::vector<CyclicWord>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) out.push_back(w.str());
  return out;
}

}  // namespace oneend
