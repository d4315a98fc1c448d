#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "respk/config.hpp"
#include "respk/pgroup.hpp"
#include "respk/separate_free.hpp"
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

// Independent conjugacy oracle: strip matching conjugating letters from both
// ends, then compare against every rotation of the candidate core.
Word oracle_core(const Word& w) {
  std::vector<Letter> v(w.letters().begin(), w.letters().end());
  while (v.size() >= 2 && v.front() == v.back().inverse()) {
    v.erase(v.begin());
    v.pop_back();
  }
  return Word::reduce(v);
}

bool oracle_conjugate(const Word& a, const Word& b) {
  Word ca = oracle_core(a);
  Word cb = oracle_core(b);
  if (ca.length() != cb.length()) return false;
  if (ca.empty()) return true;
  std::vector<Letter> rot(ca.letters().begin(), ca.letters().end());
  for (int r = 0; r < ca.length(); ++r) {
    if (Word::reduce(rot) == cb) return true;
    rot.push_back(rot.front());
    rot.erase(rot.begin());
  }
  return false;
}

// Every wreath node must split into strictly smaller subproblems, and those
// subproblems must themselves be non-conjugate pairs.
void check_tree_invariants(const SeparationNode& node) {
  if (node.kind != NodeKind::Wreath) return;
  int parent_measure = node.g.length() + node.h.length();
  REQUIRE(!node.children.empty());
  for (const auto& child : node.children) {
    CHECK(!oracle_conjugate(child->g, child->h));
    CHECK(child->g.length() + child->h.length() < parent_measure);
    check_tree_invariants(*child);
  }
}

Word wparse(const std::string& s, const Alphabet& a) { return parse_word(s, a); }

}  // namespace

TEST_CASE("trivial side delegates to the residual witness") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  Word e;
  Word c = commutator(Word::generator(0), Word::generator(1));

  auto out = separate_conjugacy_free(e, c, ab, cfg);
  REQUIRE(out.witness != nullptr);
  CHECK(!out.conjugator.has_value());
  CHECK(out.witness->kind == NodeKind::Residual);
  CHECK(out.witness->verify == VerifyMode::Nontrivial);
  CHECK(out.witness->g.empty());
  CHECK(!elem_is_identity(out.witness->hom.apply(c)));

  // Same pair with the empty word second; the node still stores it first.
  auto flipped = separate_conjugacy_free(c, e, ab, cfg);
  REQUIRE(flipped.witness != nullptr);
  CHECK(flipped.witness->g.empty());
  CHECK_NOTHROW(verify_separation(*flipped.witness, c, e, cfg));
}

TEST_CASE("single generator powers map to a cyclic group") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  Word x = Word::generator(0);
  Word y = Word::generator(1);

  // Distinct generators: exponents 1 and 1, q = 4 at p = 2.
  auto out = separate_conjugacy_free(x, y, ab, cfg);
  REQUIRE(out.witness != nullptr);
  CHECK(out.witness->kind == NodeKind::Cyclic);
  CHECK(out.witness->verify == VerifyMode::AbelianDistinct);
  CHECK(out.witness->hom.target->print() == "C(4)");
  CHECK(out.witness->hom.apply(x).residue == 1);
  CHECK(out.witness->hom.apply(y).residue == 0);

  cfg.prime = 3;
  auto out3 = separate_conjugacy_free(x, y, ab, cfg);
  REQUIRE(out3.witness != nullptr);
  CHECK(out3.witness->hom.target->print() == "C(3)");
  cfg.prime = 2;

  // Same generator, exponents 2 and -1: q must clear 2*2, so 8.
  auto out2 = separate_conjugacy_free(pow(x, 2), x.inverse(), ab, cfg);
  REQUIRE(out2.witness != nullptr);
  CHECK(out2.witness->hom.target->print() == "C(8)");
  CHECK(out2.witness->hom.apply(pow(x, 2)).residue == 2);
  CHECK(out2.witness->hom.apply(x.inverse()).residue == 7);

  auto out4 = separate_conjugacy_free(x, pow(x, 3), ab, cfg);
  REQUIRE(out4.witness != nullptr);
  CHECK(out4.witness->hom.target->print() == "C(8)");
  CHECK(out4.witness->hom.apply(x).residue == 1);
  CHECK(out4.witness->hom.apply(pow(x, 3)).residue == 3);
}

TEST_CASE("distinct abelianizations separate through one coordinate") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  Word g = wparse("x*y", ab);
  Word h = wparse("x^-1*y", ab);

  // Class difference (2, 0): first nonzero entry 2, q = 8.
  auto out = separate_conjugacy_free(g, h, ab, cfg);
  REQUIRE(out.witness != nullptr);
  CHECK(out.witness->kind == NodeKind::Cyclic);
  CHECK(out.witness->hom.target->print() == "C(8)");
  CHECK(out.witness->hom.apply(g).residue == 1);
  CHECK(out.witness->hom.apply(h).residue == 7);
  CHECK_NOTHROW(verify_separation(*out.witness, g, h, cfg));
}

TEST_CASE("commutator against its inverse builds the full recursion") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  Word x = Word::generator(0);
  Word y = Word::generator(1);
  Word g = commutator(x, y);
  Word h = commutator(y, x);
  REQUIRE(!oracle_conjugate(g, h));

  auto out = separate_conjugacy_free(g, h, ab, cfg);
  REQUIRE(out.witness != nullptr);
  const SeparationNode& root = *out.witness;

  CHECK(root.kind == NodeKind::Wreath);
  CHECK(root.verify == VerifyMode::Enumeration);
  CHECK(root.i0 == 1);
  CHECK(root.mu.values == std::vector<long>{1, 0});
  CHECK(root.hom.target->print() == "W(D(W(D(C(4),C(4)),2),C(8)),2)");

  REQUIRE(root.children.size() == 2);
  CHECK(root.children[0]->kind == NodeKind::Wreath);
  CHECK(root.children[0]->hom.target->print() == "W(D(C(4),C(4)),2)");
  CHECK(root.children[1]->kind == NodeKind::Cyclic);
  CHECK(root.children[1]->hom.target->print() == "C(8)");

  // The recorded image subgroup is small enough to search outright.
  auto image = enumerate_image(root.hom, cfg.enum_cap);
  CHECK(image.size() == 8192);
  CHECK(!find_conjugator_finite(image, root.hom.apply(root.g),
                                root.hom.apply(root.h))
             .has_value());

  check_tree_invariants(root);
  CHECK_NOTHROW(verify_separation(root, g, h, cfg));
}

TEST_CASE("larger support goes first") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  Word g = wparse("x^2", ab);
  Word h = wparse("x*y*x*y^-1", ab);

  auto out = separate_conjugacy_free(g, h, ab, cfg);
  REQUIRE(out.witness != nullptr);
  const SeparationNode& root = *out.witness;
  CHECK(root.g == h);
  CHECK(root.h == g);
  CHECK(root.kind == NodeKind::Wreath);
  CHECK(root.mu.designated == 1);
  CHECK(root.mu.values == std::vector<long>{0, 1});
  CHECK_NOTHROW(verify_separation(root, g, h, cfg));
}

TEST_CASE("exponent map covers every residue pattern") {
  Alphabet ab{{"x", "y"}};
  Config cfg;

  // Zero class on both sides: the map marks the least supported generator.
  Word g2 = wparse("x^-1*y*x", ab);
  Word h2 = wparse("y*x^-1*y^-1*x*y", ab);
  auto out2 = separate_conjugacy_free(g2, h2, ab, cfg);
  REQUIRE(out2.witness != nullptr);
  CHECK(out2.witness->g == oracle_core(h2));
  CHECK(out2.witness->h == wparse("y", ab));
  CHECK(out2.witness->mu.designated == 0);
  CHECK(out2.witness->mu.values == std::vector<long>{1, 0});
  CHECK_NOTHROW(verify_separation(*out2.witness, g2, h2, cfg));

  // Shared class (2, 2): the map must kill it while hitting a unit somewhere.
  Word g3 = wparse("x^2*y^2", ab);
  Word h3 = wparse("x*y*x*y", ab);
  REQUIRE(!oracle_conjugate(g3, h3));
  auto out3 = separate_conjugacy_free(g3, h3, ab, cfg);
  REQUIRE(out3.witness != nullptr);
  CHECK(out3.witness->kind == NodeKind::Wreath);
  CHECK(out3.witness->mu.designated == 0);
  CHECK(out3.witness->mu.values == std::vector<long>{1, 1});
  CHECK_NOTHROW(verify_separation(*out3.witness, g3, h3, cfg));

  cfg.prime = 3;
  auto out5 = separate_conjugacy_free(g3, h3, ab, cfg);
  REQUIRE(out5.witness != nullptr);
  CHECK(out5.witness->mu.designated == 0);
  CHECK(out5.witness->mu.values == std::vector<long>{1, 2});
  CHECK(out5.witness->hom.target->print() == "W(D(C(3),C(3),C(9)),3)");
  CHECK_NOTHROW(verify_separation(*out5.witness, g3, h3, cfg));
}

TEST_CASE("conjugate pairs return a checked conjugator") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  std::mt19937_64 rng(71);
  int found = 0;
  for (int t = 0; t < 200; ++t) {
    Word base = random_word(rng, 2, 1 + static_cast<int>(rng() % 8));
    if (base.empty()) continue;
    Word f = random_word(rng, 2, static_cast<int>(rng() % 6));
    Word g = conjugated(base, f);
    auto out = separate_conjugacy_free(g, base, ab, cfg);
    REQUIRE(out.conjugator.has_value());
    CHECK(out.witness == nullptr);
    CHECK(conjugated(base, *out.conjugator) == g);
    ++found;
  }
  CHECK(found > 150);
}

TEST_CASE("random non-conjugate pairs yield verified witnesses") {
  Alphabet ab{{"x", "y"}};
  std::mt19937_64 rng(72);
  for (unsigned long p : {2ul, 3ul}) {
    Config cfg;
    cfg.prime = p;
    int witnessed = 0;
    for (int t = 0; t < 60 && witnessed < 40; ++t) {
      Word g = random_word(rng, 2, 1 + static_cast<int>(rng() % 6));
      Word h = random_word(rng, 2, 1 + static_cast<int>(rng() % 6));
      auto out = separate_conjugacy_free(g, h, ab, cfg);
      // The outcome must agree with the independent oracle either way.
      CHECK(out.conjugator.has_value() == oracle_conjugate(g, h));
      if (!out.witness) continue;
      CHECK_NOTHROW(verify_separation(*out.witness, g, h, cfg));
      check_tree_invariants(*out.witness);
      ++witnessed;
    }
    CHECK(witnessed >= 20);
  }
}

TEST_CASE("class-equal commutator pairs exercise the wreath branch") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  // Deep pairs can hit huge wreath images; a modest cap keeps the
  // enumeration attempts bounded and still covers both verify modes.
  cfg.enum_cap = 20000;
  std::mt19937_64 rng(73);
  int wreaths = 0;
  int done = 0;
  for (int t = 0; t < 40 && done < 12; ++t) {
    Word u = random_word(rng, 2, 1 + static_cast<int>(rng() % 3));
    Word v = random_word(rng, 2, 1 + static_cast<int>(rng() % 3));
    Word g = commutator(u, v);
    Word h = commutator(v, u);
    if (g.empty() || h.empty() || g.length() > 8) continue;
    if (oracle_conjugate(g, h)) continue;
    ++done;
    auto out = separate_conjugacy_free(g, h, ab, cfg);
    REQUIRE(out.witness != nullptr);
    CHECK_NOTHROW(verify_separation(*out.witness, g, h, cfg));
    check_tree_invariants(*out.witness);
    if (out.witness->kind == NodeKind::Wreath) ++wreaths;
  }
  CHECK(wreaths > 0);
}

TEST_CASE("tight enumeration caps fall back to compositional checking") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  cfg.enum_cap = 50;
  Word g = commutator(Word::generator(0), Word::generator(1));
  Word h = commutator(Word::generator(1), Word::generator(0));

  auto out = separate_conjugacy_free(g, h, ab, cfg);
  REQUIRE(out.witness != nullptr);
  CHECK(out.witness->verify == VerifyMode::Compositional);
  REQUIRE(out.witness->children.size() == 2);
  CHECK(out.witness->children[0]->verify == VerifyMode::Compositional);
  CHECK_NOTHROW(verify_separation(*out.witness, g, h, cfg));

  // The recorded mode is honored even when re-checked with a loose cap.
  Config loose;
  CHECK_NOTHROW(verify_separation(*out.witness, g, h, loose));
}

TEST_CASE("verification rejects tampered witnesses") {
  Alphabet ab{{"x", "y"}};
  Config cfg;
  Word x = Word::generator(0);
  Word y = Word::generator(1);

  // Wrong pair: the recorded words no longer match the claim.
  auto cyc = separate_conjugacy_free(x, y, ab, cfg);
  REQUIRE(cyc.witness != nullptr);
  CHECK_THROWS_AS(verify_separation(*cyc.witness, x, x * y, cfg),
                  VerificationError);

  // Collapsed cyclic images.
  for (auto& img : cyc.witness->hom.images) img.residue = 0;
  CHECK_THROWS_AS(verify_separation(*cyc.witness, x, y, cfg),
                  VerificationError);

  Word g = commutator(x, y);
  Word h = commutator(y, x);

  // Identity images on an enumeration node: the search finds a conjugator.
  auto en = separate_conjugacy_free(g, h, ab, cfg);
  REQUIRE(en.witness != nullptr);
  REQUIRE(en.witness->verify == VerifyMode::Enumeration);
  PElement id = identity(en.witness->hom.target);
  for (auto& img : en.witness->hom.images) img = id;
  CHECK_THROWS_AS(verify_separation(*en.witness, g, h, cfg),
                  VerificationError);

  // Flipped coset index on a compositional node: the per-child pairs shift.
  Config tight;
  tight.enum_cap = 50;
  auto comp = separate_conjugacy_free(g, h, ab, tight);
  REQUIRE(comp.witness != nullptr);
  REQUIRE(comp.witness->verify == VerifyMode::Compositional);
  comp.witness->i0 ^= 1;
  CHECK_THROWS_AS(verify_separation(*comp.witness, g, h, tight),
                  VerificationError);
}

TEST_CASE("bad inputs are rejected up front") {
  Alphabet ab{{"x", "y"}};
  Word x = Word::generator(0);
  Word y = Word::generator(1);

  Config bad;
  bad.prime = 4;
  CHECK_THROWS_AS(separate_conjugacy_free(x, y, ab, bad), PreconditionError);

  Config cfg;
  Word outside = Word::generator(5);
  CHECK_THROWS_AS(separate_conjugacy_free(x, outside, ab, cfg),
                  PreconditionError);
}
