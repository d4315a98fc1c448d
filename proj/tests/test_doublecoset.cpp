#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "respk/config.hpp"
#include "respk/doublecoset.hpp"
#include "respk/pgroup.hpp"
#include "respk/words.hpp"

using namespace respk;

namespace {

Word random_word(std::mt19937_64& rng, int rank, int len) {
  std::vector<Letter> ls;
  for (int i = 0; i < len; ++i) {
    int g = static_cast<int>(rng() % static_cast<unsigned long>(rank));
    ls.push_back({g, (rng() & 1) ? 1 : -1});
  }
  return Word::reduce(ls);
}

// Independent table recheck: walk the full (a, b) grid below the recorded
// modulus and make sure the two coset lines never meet.
bool table_separates(const PHom& phi, const Word& g, const Word& h,
                     const Word& gamma) {
  PElement pg = phi.apply(g);
  PElement ph = phi.apply(h);
  PElement pc = phi.apply(gamma);
  unsigned long n = elem_order(pc);
  PElement left = pg;
  for (unsigned long a = 0; a < n; ++a) {
    PElement right = ph;
    for (unsigned long b = 0; b < n; ++b) {
      if (left == right) return false;
      right = elem_mul(right, pc);
    }
    left = elem_mul(pc, left);
  }
  return true;
}

}  // namespace

TEST_CASE("double coset membership is decided exactly") {
  Word gamma = surface_relator(1);
  Alphabet ab = Alphabet::surface(1);
  Word x = Word::generator(0);
  Word y = Word::generator(1);

  auto hit = double_coset_decide(x, gamma * x, gamma);
  CHECK(hit.kind == DoubleCosetResult::Kind::Unique);
  CHECK(hit.a == 1);
  CHECK(hit.b == 0);
  CHECK(pow(gamma, hit.a) * x == (gamma * x) * pow(gamma, hit.b));

  auto tail = double_coset_decide(x, x * pow(gamma, 2), gamma);
  CHECK(tail.kind == DoubleCosetResult::Kind::Unique);
  CHECK(tail.a == 0);
  CHECK(tail.b == -2);

  auto self = double_coset_decide(x, x, gamma);
  CHECK(self.kind == DoubleCosetResult::Kind::Unique);
  CHECK(self.a == 0);
  CHECK(self.b == 0);

  auto miss = double_coset_decide(x, y, gamma);
  CHECK(miss.kind == DoubleCosetResult::Kind::None);
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      CHECK(pow(gamma, a) * x != y * pow(gamma, b));

  // Both inputs powers: a one-parameter family of solutions.
  auto line = double_coset_decide(pow(gamma, 3), gamma, gamma);
  CHECK(line.kind == DoubleCosetResult::Kind::Line);
  CHECK(line.a == -2);
  auto line2 = double_coset_decide(Word{}, gamma, gamma);
  CHECK(line2.kind == DoubleCosetResult::Kind::Line);
  CHECK(line2.a == 1);

  // Exactly one input a power: no solution can exist.
  CHECK(double_coset_decide(x, pow(gamma, 2), gamma).kind ==
        DoubleCosetResult::Kind::None);
  CHECK(double_coset_decide(pow(gamma, 2), x, gamma).kind ==
        DoubleCosetResult::Kind::None);
}

TEST_CASE("the coset word must be a genuine relator shape") {
  Alphabet ab = Alphabet::surface(1);
  Word x = Word::generator(0);
  Word y = Word::generator(1);

  Word short_gamma = x * y;
  CHECK_THROWS_AS(double_coset_decide(x, y, short_gamma), PreconditionError);

  Word unreduced = x * y * y * x.inverse();
  REQUIRE(unreduced.length() == 4);
  CHECK_THROWS_AS(double_coset_decide(x, y, unreduced), PreconditionError);
}

TEST_CASE("a nonzero class difference gives the short witness") {
  Config cfg;
  Word gamma = surface_relator(1);
  Word x = Word::generator(0);
  Word y = Word::generator(1);

  auto w = double_coset_witness(x, x * x, gamma, cfg);
  CHECK(w.early);
  CHECK(w.modulus == 1);
  CHECK(w.phi.target->print() == "C(4)");
  CHECK(w.phi.apply(x).residue == 1);
  CHECK(w.phi.apply(y).residue == 0);
  CHECK_NOTHROW(verify_double_coset(w.phi, x, x * x, gamma));
  CHECK(table_separates(w.phi, x, x * x, gamma));

  auto w2 = double_coset_witness(x, y, gamma, cfg);
  CHECK(w2.early);
  CHECK(w2.phi.target->print() == "C(4)");
  CHECK(table_separates(w2.phi, x, y, gamma));
}

TEST_CASE("witness generation refuses pairs in one double coset") {
  Config cfg;
  Word gamma = surface_relator(1);
  Word x = Word::generator(0);
  CHECK_THROWS_AS(double_coset_witness(x, gamma * x, gamma, cfg),
                  PreconditionError);
}

TEST_CASE("kernel pairs run the truncated unit pipeline") {
  Config cfg;
  Word gamma = surface_relator(1);
  Word x = Word::generator(0);
  Word y = Word::generator(1);

  Word h1 = conjugated(x, pow(y, 2).inverse());
  auto w1 = double_coset_witness(x, h1, gamma, cfg);
  CHECK(!w1.early);
  CHECK(w1.q == 4);
  CHECK(w1.degree == 4);
  CHECK(w1.modulus == 4);
  CHECK(w1.modulus == elem_order(w1.phi.apply(gamma)));
  CHECK(w1.phi.target->print() == "W(U(5,4,4),4)");
  CHECK_NOTHROW(verify_double_coset(w1.phi, x, h1, gamma));
  CHECK(table_separates(w1.phi, x, h1, gamma));

  // A pair that survives degree 4 and needs the next nilpotency step.
  Word h2 = pow(y, 2) * x;
  auto w2 = double_coset_witness(x, h2, gamma, cfg);
  CHECK(!w2.early);
  CHECK(w2.q == 8);
  CHECK(w2.degree == 5);
  CHECK(w2.modulus == 8);
  CHECK(w2.phi.target->print() == "W(U(5,5,8),4)");
  CHECK(table_separates(w2.phi, x, h2, gamma));
}

TEST_CASE("higher genus runs through the same pipeline") {
  Config cfg;
  Word gamma = surface_relator(2);
  Word x1 = Word::generator(0);
  Word y2 = Word::generator(3);

  Word h = y2 * x1 * y2;
  auto w = double_coset_witness(x1, h, gamma, cfg);
  CHECK(!w.early);
  CHECK(w.q == 4);
  CHECK(w.degree == 4);
  CHECK(w.modulus == 4);
  CHECK(w.phi.target->print() == "W(U(13,4,4),4)");
  CHECK(table_separates(w.phi, x1, h, gamma));
}

TEST_CASE("random kernel pairs are separated and re-checkable") {
  Config cfg;
  Word gamma = surface_relator(1);
  std::mt19937_64 rng(81);
  int witnessed = 0;
  for (int t = 0; t < 60 && witnessed < 25; ++t) {
    Word g = random_word(rng, 2, 1 + static_cast<int>(rng() % 5));
    Word h = random_word(rng, 2, 1 + static_cast<int>(rng() % 5));
    auto d = double_coset_decide(g, h, gamma);
    if (d.kind == DoubleCosetResult::Kind::Unique) {
      CHECK(pow(gamma, d.a) * g == h * pow(gamma, d.b));
      continue;
    }
    if (d.kind != DoubleCosetResult::Kind::None) continue;
    auto w = double_coset_witness(g, h, gamma, cfg);
    CHECK(w.modulus == elem_order(w.phi.apply(gamma)));
    CHECK(table_separates(w.phi, g, h, gamma));
    ++witnessed;
  }
  CHECK(witnessed >= 15);
}

TEST_CASE("verification rejects a collapsed witness") {
  Config cfg;
  Word gamma = surface_relator(1);
  Word x = Word::generator(0);
  Word h = conjugated(x, pow(Word::generator(1), 2).inverse());

  auto w = double_coset_witness(x, h, gamma, cfg);
  PElement id = identity(w.phi.target);
  for (auto& img : w.phi.images) img = id;
  CHECK_THROWS_AS(verify_double_coset(w.phi, x, h, gamma), VerificationError);
}
