#pragma once

#include <optional>
#include <string>
#include <vector>

#include "respk/words.hpp"

namespace respk {

// Homomorphism onto Z/p^s given by generator exponents, with a designated
// generator mapped to 1. Its kernel is the subgroup the Schreier machinery
// rewrites into.
struct ExponentHom {
  Alphabet domain;
  std::vector<long> values;   // residues mod modulus, one per generator
  unsigned long modulus = 2;  // p^s
  int designated = 0;         // values[designated] == 1

  long apply(const Word& w) const;  // residue in [0, modulus)
  void check() const;               // structural invariants
};

// Schreier generators of Ker mu for the coset transversal {x^i}:
// d(y,i) = x^i y x^{-(i + mu(y))} for y != x and 0 <= i < modulus, plus
// X = x^modulus. Symbols are ordered d(y,i) by (y, i), X last, and double as
// the alphabet of a free group of rank modulus*(rank-1)+1.
struct SchreierBasis {
  ExponentHom mu;
  Alphabet symbol_alphabet;          // names d(y,i), X
  std::vector<Word> defining_words;  // over mu.domain
  int x_symbol = 0;                  // index of X
  // (generator, coset) per symbol; X carries (designated, modulus).
  std::vector<std::pair<int, long>> symbol_meta;

  // Symbol index of d(y, i); -1 for y == designated (those are handled by the
  // rewrite rules directly).
  int symbol_of(int gen, long coset) const;
};

SchreierBasis schreier_generators(const ExponentHom& mu);

// Rewrites x^i f x^{-i} (f in Ker mu) as a freely reduced word over the basis
// symbols. Length never exceeds |f|; evaluating the symbols back and reducing
// recovers x^i f x^{-i}.
Word rewrite_in_basis(const SchreierBasis& basis, const Word& f, long i);

// Least i whose rewrite of g is strictly shorter than |g|. Exists whenever the
// designated generator occurs in g.
long choose_decreasing_coset(const SchreierBasis& basis, const Word& g);

// --- subgroup checks used to certify generating sets ---

// Stallings folding of the subgroup generated by `words`: returns (rank,
// index) where index is nullopt for infinite index. Exact.
struct SubgroupShape {
  std::size_t rank = 0;
  std::optional<std::size_t> index;
};
SubgroupShape fold_subgroup(int ambient_rank, const std::vector<Word>& words);

// Greedy Nielsen length reduction; returns the surviving generator count
// (duplicates, inverses and trivial words collapse). Never larger than the
// input size; equality certifies no collapse happened.
std::size_t nielsen_surviving_count(std::vector<Word> words);

// --- conjugating-cover basis ---

// Free basis of Ker mu for mu: F(rank 2n) -> Z/p^2, mu(x1) = 1, adapted to a
// conjugating element g: contains gamma itself and a z-symbol z_{l0}
// exhibiting g gamma g^{-1} = w z_{l0} w^{-1} with w a word over the basis.
struct CoverBasis {
  ExponentHom mu;                    // modulus p^2, designated x1
  Alphabet symbol_alphabet;          // z<l> (l != k0), X, b0, t(name,l)
  std::vector<Word> defining_words;  // over the surface alphabet
  long l0 = 0;                       // mu(g)
  long k0 = 1;                       // omitted z-index, k0 not in {0, l0}
  int gamma_symbol = 0;              // index of z0 == gamma
  int z_l0_symbol = 0;               // index of z_{l0}
  Word w_over_basis;                 // g x1^{-l0} rewritten over the symbols
  // z-symbol index by l (-1 at k0), for rewriting convenience.
  std::vector<int> z_symbol_by_level;
  // Machinery reused by rewrite_over_cover.
  SchreierBasis standard_basis;
  std::vector<Word> b_over_cover;  // x1^l y1 x1^{-l} over the cover symbols
};

CoverBasis cover_basis(int genus_n, long p, const Word& g);

// Rewrites f in Ker mu over the cover basis symbols (freely reduced; evaluates
// back to f).
Word rewrite_over_cover(const CoverBasis& basis, const Word& f);

Word evaluate_symbol_word(const Word& symbol_word, const std::vector<Word>& defining_words);

}  // namespace respk
