#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "respk/config.hpp"
#include "respk/schreier.hpp"

using namespace respk;

namespace {

ExponentHom simple_mu(unsigned long m, long mu_y) {
  ExponentHom mu;
  mu.domain = Alphabet::named({"x", "y"});
  mu.values = {1, mu_y};
  mu.modulus = m;
  mu.designated = 0;
  return mu;
}

Word random_word(std::mt19937_64& rng, int rank, int len) {
  std::vector<Letter> ls;
  for (int i = 0; i < len; ++i) {
    int g = static_cast<int>(rng() % static_cast<unsigned long>(rank));
    ls.push_back({g, (rng() & 1) ? 1 : -1});
  }
  return Word::reduce(ls);
}

Word random_kernel_element(std::mt19937_64& rng, const ExponentHom& mu, int len) {
  Word w = random_word(rng, mu.domain.rank(), len);
  long a = mu.apply(w);
  return w * pow(Word::generator(mu.designated), -a);
}

}  // namespace

TEST_CASE("exponent homomorphism") {
  ExponentHom mu = simple_mu(2, 0);
  mu.check();
  Alphabet a = mu.domain;
  CHECK(mu.apply(parse_word("x*y", a)) == 1);
  CHECK(mu.apply(parse_word("x^2", a)) == 0);
  CHECK(mu.apply(parse_word("x^-1", a)) == 1);
  CHECK(mu.apply(parse_word("y^5", a)) == 0);
  ExponentHom bad = mu;
  bad.values[0] = 0;
  CHECK_THROWS_AS(bad.check(), PreconditionError);
}

TEST_CASE("schreier basis shape") {
  SchreierBasis b = schreier_generators(simple_mu(2, 0));
  REQUIRE(b.symbol_alphabet.rank() == 3);
  CHECK(b.symbol_alphabet.names[b.x_symbol] == "X");
  Alphabet a = b.mu.domain;
  CHECK(b.defining_words[b.symbol_of(1, 0)] == parse_word("y", a));
  CHECK(b.defining_words[b.symbol_of(1, 1)] == parse_word("x*y*x^-1", a));
  CHECK(b.defining_words[b.x_symbol] == parse_word("x^2", a));
  SchreierBasis c = schreier_generators(simple_mu(4, 3));
  CHECK(c.symbol_alphabet.rank() == 5);
  // d(y,1) = x y x^{-(1+3 mod 4)} = x y
  CHECK(c.defining_words[c.symbol_of(1, 1)] == parse_word("x*y", a));
}

TEST_CASE("rewrite examples") {
  SchreierBasis b = schreier_generators(simple_mu(2, 0));
  Alphabet a = b.mu.domain;
  Word f1 = parse_word("y*x^2", a);
  CHECK(print_word(rewrite_in_basis(b, f1, 0), b.symbol_alphabet) == "d(y,0)*X");
  Word f2 = parse_word("y*x*y*x", a);
  CHECK(print_word(rewrite_in_basis(b, f2, 0), b.symbol_alphabet) == "d(y,0)*d(y,1)*X");
  CHECK(print_word(rewrite_in_basis(b, f2, 1), b.symbol_alphabet) == "d(y,1)*X*d(y,0)");
  CHECK(rewrite_in_basis(b, Word(), 0).empty());
}

TEST_CASE("rewrite round trip and length bound") {
  std::mt19937_64 rng(31);
  for (unsigned long m : {2UL, 3UL, 4UL}) {
    for (long mu_y : {0L, 1L}) {
      ExponentHom mu = simple_mu(m, mu_y);
      SchreierBasis b = schreier_generators(mu);
      for (int t = 0; t < 60; ++t) {
        Word f = random_kernel_element(rng, mu, static_cast<int>(rng() % 16));
        for (unsigned long i = 0; i < m; ++i) {
          Word r = rewrite_in_basis(b, f, static_cast<long>(i));
          CHECK(r.length() <= f.length());
          Word x_i = pow(Word::generator(0), static_cast<long>(i));
          CHECK(evaluate_symbol_word(r, b.defining_words) == x_i * f * x_i.inverse());
        }
      }
    }
  }
}

TEST_CASE("decreasing coset exists when x occurs") {
  std::mt19937_64 rng(32);
  ExponentHom mu = simple_mu(4, 0);
  SchreierBasis b = schreier_generators(mu);
  for (int t = 0; t < 80; ++t) {
    Word g = random_kernel_element(rng, mu, 2 + static_cast<int>(rng() % 14));
    bool has_x = false;
    for (const Letter& l : g.letters()) has_x |= (l.gen == 0);
    if (!has_x || g.empty()) continue;
    long i = choose_decreasing_coset(b, g);
    CHECK(rewrite_in_basis(b, g, i).length() < g.length());
  }
}

TEST_CASE("folding computes rank and index") {
  Alphabet a = Alphabet::named({"x", "y"});
  auto w = [&](const char* s) { return parse_word(s, a); };

  SubgroupShape full = fold_subgroup(2, {w("x"), w("y")});
  CHECK(full.rank == 2);
  CHECK(full.index == 1);

  SubgroupShape idx2 = fold_subgroup(2, {w("x^2"), w("y"), w("x*y*x^-1")});
  CHECK(idx2.rank == 3);
  CHECK(idx2.index == 2);

  SubgroupShape cyc = fold_subgroup(2, {w("x^2")});
  CHECK(cyc.rank == 1);
  CHECK(!cyc.index.has_value());

  SubgroupShape comm = fold_subgroup(2, {commutator(w("x"), w("y"))});
  CHECK(comm.rank == 1);
  CHECK(!comm.index.has_value());

  SubgroupShape dup = fold_subgroup(2, {w("y"), w("y"), w("y^-1")});
  CHECK(dup.rank == 1);
  CHECK(!dup.index.has_value());
}

TEST_CASE("nielsen survivor count") {
  Alphabet a = Alphabet::named({"x", "y"});
  auto w = [&](const char* s) { return parse_word(s, a); };
  CHECK(nielsen_surviving_count({w("x"), w("x*y"), w("y")}) == 2);
  CHECK(nielsen_surviving_count({w("x^2"), w("y^2")}) == 2);
  CHECK(nielsen_surviving_count({w("x"), w("x^-1")}) == 1);
  CHECK(nielsen_surviving_count({surface_relator(2)}) == 1);
  CHECK(nielsen_surviving_count({}) == 0);
}

TEST_CASE("cover basis shape and conjugation identity") {
  std::mt19937_64 rng(33);
  for (int n : {1, 2}) {
    Alphabet a = Alphabet::surface(n);
    Word gamma = surface_relator(n);
    for (int t = 0; t < 12; ++t) {
      Word g = random_word(rng, 2 * n, 1 + static_cast<int>(rng() % 8));
      CoverBasis cb = cover_basis(n, 2, g);
      CHECK(cb.defining_words.size() == static_cast<std::size_t>(4 * (2 * n - 1) + 1));
      CHECK(cb.defining_words[cb.gamma_symbol] == gamma);
      CHECK(cb.l0 == cb.mu.apply(g));
      CHECK(cb.k0 == ((cb.l0 == 1) ? 2 : 1));
      // g gamma g^-1 = w z_{l0} w^-1 with w evaluated from the basis word
      Word w_eval = evaluate_symbol_word(cb.w_over_basis, cb.defining_words);
      CHECK(conjugated(gamma, g) ==
            conjugated(cb.defining_words[cb.z_l0_symbol], w_eval));
    }
  }
}

TEST_CASE("cover basis handles every residue of the conjugator") {
  // force each l0 in 0..3 for n=1, p=2
  Alphabet a = Alphabet::surface(1);
  for (long l0 = 0; l0 < 4; ++l0) {
    Word g = pow(parse_word("x1", a), l0) * parse_word("y1^2", a);
    CoverBasis cb = cover_basis(1, 2, g);
    CHECK(cb.l0 == l0);
    CHECK(cb.defining_words.size() == 5);
    Word w_eval = evaluate_symbol_word(cb.w_over_basis, cb.defining_words);
    CHECK(conjugated(surface_relator(1), g) ==
          conjugated(cb.defining_words[cb.z_l0_symbol], w_eval));
  }
}

TEST_CASE("rewrite over cover round trips") {
  std::mt19937_64 rng(34);
  for (int n : {1, 2}) {
    Word g = random_word(rng, 2 * n, 5);
    CoverBasis cb = cover_basis(n, 2, g);
    for (int t = 0; t < 20; ++t) {
      Word f = random_kernel_element(rng, cb.mu, static_cast<int>(rng() % 12));
      Word r = rewrite_over_cover(cb, f);
      CHECK(evaluate_symbol_word(r, cb.defining_words) == f);
    }
    Word gamma = surface_relator(n);
    Word rg = rewrite_over_cover(cb, gamma);
    CHECK(evaluate_symbol_word(rg, cb.defining_words) == gamma);
  }
}
