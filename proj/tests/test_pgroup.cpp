#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "respk/config.hpp"
#include "respk/pgroup.hpp"

using namespace respk;

namespace {

PElement random_element(std::mt19937_64& rng, const PGroupExprPtr& e) {
  PElement r;
  r.expr = e;
  switch (e->kind) {
    case GroupKind::Trivial:
      break;
    case GroupKind::Cyclic:
      r.residue = rng() % e->cyclic_order;
      break;
    case GroupKind::Direct:
      for (const auto& f : e->factors) r.parts.push_back(random_element(rng, f));
      break;
    case GroupKind::Wreath:
      for (unsigned long i = 0; i < e->top_modulus; ++i)
        r.parts.push_back(random_element(rng, e->base));
      r.top = rng() % e->top_modulus;
      break;
    case GroupKind::TruncUnits: {
      r.poly = TruncatedPoly::constant(e->prime, e->tu_symbols, e->tu_degree, 1,
                                       e->tu_nilpotency);
      for (int t = 0; t < 3; ++t) {
        std::vector<std::uint8_t> m;
        int d = 1 + static_cast<int>(rng() % 2);
        for (int i = 0; i < d; ++i)
          m.push_back(static_cast<std::uint8_t>(rng() % e->tu_symbols));
        r.poly.add_term(m, 1);
      }
      break;
    }
  }
  return r;
}

PElement wr2(const PGroupExprPtr& e, unsigned long b0, unsigned long b1,
             unsigned long top) {
  return parse_element("(" + std::to_string(b0) + "," + std::to_string(b1) +
                           ";" + std::to_string(top) + ")",
                       e);
}

}  // namespace

TEST_CASE("expression print parse round trip") {
  for (const char* s : {"1", "C(4)", "D(C(2),C(4))", "W(C(2),2)",
                        "W(D(C(2),C(2)),4)", "U(2,5)", "D(W(C(2),2),U(3,4,2))"}) {
    auto e = PGroupExpr::parse(s, 2);
    CHECK(e->print() == s);
  }
  auto u = PGroupExpr::parse("U(3,4,2)", 3);
  CHECK(u->tu_symbols == 3);
  CHECK(u->tu_degree == 4);
  CHECK(u->tu_nilpotency == 2);
  CHECK_THROWS_AS(PGroupExpr::parse("C(3)", 2), ParseError);
  CHECK_THROWS_AS(PGroupExpr::parse("C(1)", 2), ParseError);
  CHECK_THROWS_AS(PGroupExpr::parse("Q(2)", 2), ParseError);
  CHECK(expr_equal(PGroupExpr::parse("W(C(2),2)", 2), PGroupExpr::parse("W(C(2),2)", 2)));
  CHECK(!expr_equal(PGroupExpr::parse("W(C(2),2)", 2), PGroupExpr::parse("W(C(2),4)", 2)));
}

TEST_CASE("group laws on random elements") {
  std::mt19937_64 rng(41);
  for (const char* s : {"C(8)", "C(9)", "W(C(4),2)", "W(D(C(2),C(2)),4)",
                        "U(2,4)"}) {
    long p = (std::string(s) == "C(9)") ? 3 : 2;
    auto e = PGroupExpr::parse(s, p);
    PElement id = identity(e);
    for (int t = 0; t < 40; ++t) {
      PElement a = random_element(rng, e);
      PElement b = random_element(rng, e);
      PElement c = random_element(rng, e);
      CHECK(elem_mul(elem_mul(a, b), c) == elem_mul(a, elem_mul(b, c)));
      CHECK(elem_mul(a, id) == a);
      CHECK(elem_mul(id, a) == a);
      CHECK(elem_is_identity(elem_mul(a, elem_inverse(a))));
      CHECK(elem_is_identity(elem_mul(elem_inverse(a), a)));
      CHECK(elem_pow(a, 3) == elem_mul(a, elem_mul(a, a)));
      CHECK(elem_pow(a, -2) == elem_inverse(elem_mul(a, a)));
    }
  }
}

TEST_CASE("wreath of two cyclic 2-groups is dihedral of order 8") {
  auto e = PGroupExpr::parse("W(C(2),2)", 2);
  PElement a = wr2(e, 1, 0, 0);
  PElement b = wr2(e, 0, 0, 1);
  PHom h{Alphabet::named({"a", "b"}), e, {a, b}};
  auto all = enumerate_image(h, 100);
  CHECK(all.size() == 8);
  int order4 = 0, central = 0;
  for (const auto& g : all) {
    if (elem_order(g) == 4) ++order4;
    bool z = true;
    for (const auto& x : all) z &= (elem_mul(g, x) == elem_mul(x, g));
    if (z) ++central;
  }
  CHECK(order4 == 2);
  CHECK(central == 2);
}

TEST_CASE("wreath arithmetic hand values") {
  auto e = PGroupExpr::parse("W(C(2),2)", 2);
  PElement y = wr2(e, 1, 0, 0);
  PElement x = wr2(e, 0, 0, 1);
  // conjugating by the top swaps coordinates
  CHECK(elem_conjugate(y, x) == wr2(e, 0, 1, 0));
  CHECK(elem_mul(x, x) == identity(e));
  CHECK(elem_order(wr2(e, 1, 0, 1)) == 4);

  auto e4 = PGroupExpr::parse("W(C(2),4)", 2);
  PElement g = parse_element("(1,0,0,0;1)", e4);
  PElement g2 = elem_mul(g, g);
  CHECK(g2 == parse_element("(1,0,0,1;2)", e4));
  CHECK(elem_pow(g, 4) == parse_element("(1,1,1,1;0)", e4));
  CHECK(elem_order(g) == 8);
}

TEST_CASE("element print parse round trip") {
  std::mt19937_64 rng(42);
  for (const char* s : {"C(8)", "D(C(2),W(C(2),2))", "W(C(4),2)", "U(2,4)"}) {
    auto e = PGroupExpr::parse(s, 2);
    for (int t = 0; t < 30; ++t) {
      PElement a = random_element(rng, e);
      CHECK(parse_element(a.print(), e) == a);
    }
  }
  auto c = PGroupExpr::parse("C(4)", 2);
  CHECK(parse_element("-1", c).residue == 3);
  CHECK(parse_element("7", c).residue == 3);
}

TEST_CASE("induced wreath reproduces the index two example") {
  ExponentHom mu;
  mu.domain = Alphabet::named({"x", "y"});
  mu.values = {1, 0};
  mu.modulus = 2;
  mu.designated = 0;
  SchreierBasis basis = schreier_generators(mu);
  auto c2 = PGroupExpr::parse("C(2)", 2);
  // beta on the kernel basis: d(y,0) -> 1, d(y,1) -> 0, X -> 0
  PHom beta{basis.symbol_alphabet, c2, {}};
  beta.images.resize(3);
  for (auto& img : beta.images) img = identity(c2);
  beta.images[basis.symbol_of(1, 0)].residue = 1;
  auto kernel_eval = [&](const Word& w) {
    return beta.apply(rewrite_in_basis(basis, w, 0));
  };
  PHom phi = induced_wreath(mu, c2, kernel_eval);
  auto e = phi.target;
  CHECK(e->print() == "W(C(2),2)");
  CHECK(phi.images[0] == wr2(e, 0, 0, 1));
  CHECK(phi.images[1] == wr2(e, 1, 0, 0));
  // phi is multiplicative through apply
  Alphabet a = mu.domain;
  CHECK(phi.apply(parse_word("x*y*x^-1", a)) == wr2(e, 0, 1, 0));
  CHECK(phi.apply(parse_word("x^2", a)) == identity(e));
  std::mt19937_64 rng(43);
  for (int t = 0; t < 40; ++t) {
    std::vector<Letter> ls;
    for (int i = 0; i < 8; ++i)
      ls.push_back({static_cast<int>(rng() % 2), (rng() & 1) ? 1 : -1});
    Word u = Word::reduce(std::vector<Letter>(ls.begin(), ls.begin() + 4));
    Word v = Word::reduce(std::vector<Letter>(ls.begin() + 4, ls.end()));
    CHECK(phi.apply(u * v) == elem_mul(phi.apply(u), phi.apply(v)));
  }
}

TEST_CASE("kernel law of the induced map") {
  // phi(f) = identity exactly when beta kills every conjugate rewrite of f
  ExponentHom mu;
  mu.domain = Alphabet::named({"x", "y"});
  mu.values = {1, 0};
  mu.modulus = 2;
  mu.designated = 0;
  SchreierBasis basis = schreier_generators(mu);
  auto c2 = PGroupExpr::parse("C(2)", 2);
  PHom beta{basis.symbol_alphabet, c2, {}};
  beta.images.resize(3);
  for (auto& img : beta.images) img = identity(c2);
  beta.images[basis.symbol_of(1, 0)].residue = 1;
  auto kernel_eval = [&](const Word& w) {
    return beta.apply(rewrite_in_basis(basis, w, 0));
  };
  PHom phi = induced_wreath(mu, c2, kernel_eval);
  std::mt19937_64 rng(44);
  Alphabet a = mu.domain;
  for (int t = 0; t < 60; ++t) {
    std::vector<Letter> ls;
    int len = static_cast<int>(rng() % 10);
    for (int i = 0; i < len; ++i)
      ls.push_back({static_cast<int>(rng() % 2), (rng() & 1) ? 1 : -1});
    Word w = Word::reduce(ls);
    if (mu.apply(w) != 0) continue;
    bool in_kernel = true;
    for (long i = 0; i < 2; ++i) {
      if (!elem_is_identity(beta.apply(rewrite_in_basis(basis, w, i))))
        in_kernel = false;
    }
    CHECK(elem_is_identity(phi.apply(w)) == in_kernel);
  }
}

TEST_CASE("image enumeration is capped and deterministic") {
  auto e = PGroupExpr::parse("W(C(2),2)", 2);
  PHom h{Alphabet::named({"a", "b"}), e, {wr2(e, 1, 0, 0), wr2(e, 0, 0, 1)}};
  auto s1 = enumerate_image(h, 8);
  auto s2 = enumerate_image(h, 100);
  CHECK(s1 == s2);
  CHECK_THROWS_AS(enumerate_image(h, 7), CapExceeded);
}

TEST_CASE("finite conjugator search") {
  auto e = PGroupExpr::parse("W(C(2),2)", 2);
  PHom h{Alphabet::named({"a", "b"}), e, {wr2(e, 1, 0, 0), wr2(e, 0, 0, 1)}};
  auto all = enumerate_image(h, 100);
  PElement g = wr2(e, 1, 0, 0), hh = wr2(e, 0, 1, 0);
  auto s = find_conjugator_finite(all, g, hh);
  REQUIRE(s.has_value());
  CHECK(elem_conjugate(g, *s) == hh);
  CHECK(!find_conjugator_finite(all, g, wr2(e, 1, 1, 0)).has_value());
}

TEST_CASE("direct combine stacks images") {
  auto c2 = PGroupExpr::parse("C(2)", 2);
  auto c4 = PGroupExpr::parse("C(4)", 2);
  Alphabet a = Alphabet::named({"x", "y"});
  PHom h1{a, c2, {parse_element("1", c2), parse_element("0", c2)}};
  PHom h2{a, c4, {parse_element("1", c4), parse_element("2", c4)}};
  PHom h = direct_combine({h1, h2});
  CHECK(h.target->print() == "D(C(2),C(4))");
  PElement v = h.apply(parse_word("x*y", a));
  CHECK(v.print() == "(1,3)");
  CHECK(elem_order(v) == 4);
}

TEST_CASE("conjugate power divisibility report") {
  // In the truncated unit group with omega = 1+e0, xi = 1+e1, degree < 6:
  // omega has order 8, commutators with the conjugate stay nontrivial through
  // r = 1, and the only power relations in range are multiples of 8.
  auto u = PGroupExpr::parse("U(2,6)", 2);
  PElement omega, xi;
  omega.expr = u;
  omega.poly = TruncatedPoly::one_plus_symbol(2, 2, 6, 0);
  xi.expr = u;
  xi.poly = TruncatedPoly::one_plus_symbol(2, 2, 6, 1);
  CHECK(elem_order(omega) == 8);
  auto rep = check_conjugate_power_divisibility(omega, xi, 1, 10);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.divisibility_ok);
  CHECK(rep.solutions.size() == 9);  // a, b in {-8, 0, 8}

  auto bad = check_conjugate_power_divisibility(identity(u), xi, 0, 4);
  CHECK(!bad.hypotheses_ok);
  CHECK(bad.failed_r == 0);
}
