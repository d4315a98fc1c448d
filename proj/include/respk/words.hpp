#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace respk {

// Ranked alphabet with printable generator names. Names must be distinct,
// non-empty, and free of the word-syntax delimiters '*' and '^'.
struct Alphabet {
  std::vector<std::string> names;

  int rank() const { return static_cast<int>(names.size()); }
  int index_of(std::string_view name) const;  // -1 if absent

  static Alphabet named(std::vector<std::string> names);
  // x1,y1,...,xn,yn — the standard symplectic-style surface alphabet.
  // primed: x'1,y'1,...
  static Alphabet surface(int n, bool primed = false);

  bool operator==(const Alphabet&) const = default;
};

struct Letter {
  int gen = 0;
  int sign = 1;  // +1 or -1

  Letter inverse() const { return {gen, -sign}; }
  bool operator==(const Letter&) const = default;
  auto operator<=>(const Letter&) const = default;
};

// Freely reduced word over a ranked alphabet. Reduction is established at
// construction and preserved by every operation; no unreduced value escapes.
class Word {
 public:
  Word() = default;
  static Word reduce(std::span<const Letter> raw);
  static Word generator(int gen, int sign = 1);

  const std::vector<Letter>& letters() const { return letters_; }
  int length() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const;
  friend Word operator*(const Word& a, const Word& b);

  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;

 private:
  std::vector<Letter> letters_;
};

Word pow(const Word& w, long e);
// [a, b] = a^{-1} b^{-1} a b
Word commutator(const Word& a, const Word& b);
// f a f^{-1}
Word conjugated(const Word& a, const Word& f);
// [x1,y1][x2,y2]...[xn,yn] over the rank-2n surface alphabet (x_i = 2(i-1),
// y_i = 2(i-1)+1); freely and cyclically reduced of length 4n.
Word surface_relator(int n);

std::vector<int> support(const Word& w);  // sorted distinct generator indices

// Exponent-sum vector in Z^rank.
struct AbelianVector {
  std::vector<long> coords;
  bool is_zero() const;
  bool operator==(const AbelianVector&) const = default;
};
AbelianVector abelianize(const Word& w, int rank);

// w = conjugator * core * conjugator^{-1}, core cyclically reduced.
struct CyclicReduction {
  Word core;
  Word conjugator;
};
CyclicReduction cyclic_reduce(const Word& w);

bool is_cyclically_reduced(const Word& w);
// Lexicographically least rotation of a cyclically reduced word; the canonical
// representative used for cyclic-word comparison.
Word least_cyclic_rotation(const Word& w);

// Conjugacy decision in the free group. On success returns f with
// f h f^{-1} = g.
std::optional<Word> is_conjugate_free(const Word& g, const Word& h);

// If w == u^e for the given u (u nontrivial), returns e; otherwise nullopt.
// Exact, via length arithmetic plus one comparison.
std::optional<long> power_of(const Word& w, const Word& u);

// Canonical syntax: '*'-separated factors name or name^k (k nonzero integer),
// "1" for the empty word. Printing collapses maximal runs to powers; parsing
// accepts any exponent, so parse(print(w)) == w exactly.
std::string print_word(const Word& w, const Alphabet& a);
Word parse_word(std::string_view text, const Alphabet& a);

}  // namespace respk
