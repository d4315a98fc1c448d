#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <vector>

#include "respk/config.hpp"
#include "respk/truncpoly.hpp"

using namespace respk;

namespace {

// Independent multiplication oracle: plain map arithmetic with its own
// truncation. Nilpotency-free on purpose; that pruning is tested separately.
using Mono = std::vector<std::uint8_t>;
using Naive = std::map<Mono, long>;

Naive to_naive(const TruncatedPoly& p) {
  Naive n;
  for (const auto& [m, c] : p.terms()) n[m] = c;
  return n;
}

Naive naive_mul(const Naive& a, const Naive& b, long prime, int degree) {
  Naive out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      if (static_cast<int>(ma.size() + mb.size()) >= degree) continue;
      Mono m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      long c = ((out[m] + ca * cb) % prime + prime) % prime;
      if (c == 0)
        out.erase(m);
      else
        out[m] = c;
    }
  return out;
}

TruncatedPoly random_unit(std::mt19937_64& rng, long prime, int symbols, int degree) {
  TruncatedPoly p = TruncatedPoly::constant(prime, symbols, degree, 1);
  int terms = 1 + static_cast<int>(rng() % 5);
  for (int t = 0; t < terms; ++t) {
    Mono m;
    int d = 1 + static_cast<int>(rng() % static_cast<unsigned long>(degree - 1));
    for (int i = 0; i < d; ++i)
      m.push_back(static_cast<std::uint8_t>(rng() % static_cast<unsigned long>(symbols)));
    p.add_term(m, 1 + static_cast<long>(rng() % static_cast<unsigned long>(prime - 1)));
  }
  return p;
}

}  // namespace

TEST_CASE("basic arithmetic against the naive oracle") {
  std::mt19937_64 rng(21);
  for (long prime : {2L, 3L, 5L}) {
    for (int t = 0; t < 60; ++t) {
      TruncatedPoly a = random_unit(rng, prime, 3, 5);
      TruncatedPoly b = random_unit(rng, prime, 3, 5);
      CHECK(to_naive(a * b) == naive_mul(to_naive(a), to_naive(b), prime, 5));
    }
  }
}

TEST_CASE("hand product") {
  TruncatedPoly x = TruncatedPoly::one_plus_symbol(2, 2, 4, 0);
  TruncatedPoly y = TruncatedPoly::one_plus_symbol(2, 2, 4, 1);
  TruncatedPoly p = x * y;
  CHECK(p.print() == "1+e0+e1+e0*e1");
  CHECK((y * x).print() == "1+e0+e1+e1*e0");
  CHECK(p != y * x);
}

TEST_CASE("unit generator shortcut matches full multiplication") {
  std::mt19937_64 rng(22);
  for (long prime : {2L, 3L}) {
    TruncatedPoly g = TruncatedPoly::one_plus_symbol(prime, 3, 6, 1);
    TruncatedPoly ginv = g.inverse();
    for (int t = 0; t < 50; ++t) {
      TruncatedPoly a = random_unit(rng, prime, 3, 6);
      CHECK(a.times_unit_generator(1, 1) == a * g);
      CHECK(a.times_unit_generator(1, -1) == a * ginv);
    }
  }
}

TEST_CASE("inverse of a unit") {
  std::mt19937_64 rng(23);
  for (long prime : {2L, 3L, 5L}) {
    TruncatedPoly one = TruncatedPoly::constant(prime, 3, 6, 1);
    for (int t = 0; t < 40; ++t) {
      TruncatedPoly a = random_unit(rng, prime, 3, 6);
      CHECK(a * a.inverse() == one);
      CHECK(a.inverse() * a == one);
    }
  }
}

TEST_CASE("p-th power of 1+e is 1+e^p") {
  for (long prime : {2L, 3L}) {
    int degree = static_cast<int>(prime) * 2 + 1;
    TruncatedPoly x = TruncatedPoly::one_plus_symbol(prime, 1, degree, 0);
    TruncatedPoly acc = x;
    for (long i = 1; i < prime; ++i) acc = acc * x;
    TruncatedPoly expect = TruncatedPoly::constant(prime, 1, degree, 1);
    expect.add_term(Mono(static_cast<std::size_t>(prime), 0), 1);
    CHECK(acc == expect);
  }
}

TEST_CASE("order of 1+e under truncation") {
  // degree bound 5 over F_2: e^4 is the last living power, so 1+e has order 8.
  TruncatedPoly x = TruncatedPoly::one_plus_symbol(2, 1, 5, 0);
  TruncatedPoly p = x;
  int order = 1;
  while (!p.is_one()) {
    p = p * x;
    ++order;
    REQUIRE(order <= 16);
  }
  CHECK(order == 8);
}

TEST_CASE("nilpotent symbols collapse runs") {
  // q = 2 kills e*e, so (1+e)^p = 1 + p*e = 1 over F_p.
  for (long prime : {2L, 3L, 5L}) {
    TruncatedPoly x = TruncatedPoly::one_plus_symbol(prime, 2, 8, 0, 2);
    TruncatedPoly p = x;
    for (long i = 1; i < prime; ++i) {
      CHECK(!p.is_one());
      p = p * x;
    }
    CHECK(p.is_one());
    // mixed runs survive: e0*e1*e0 has no run of length 2
    TruncatedPoly y = TruncatedPoly::one_plus_symbol(prime, 2, 8, 1, 2);
    CHECK(!(x * y * x).is_one());
    CHECK((x * y * x).terms().count({0, 1, 0}) == 1);
  }
}

TEST_CASE("degree truncation in add_term") {
  TruncatedPoly p = TruncatedPoly::constant(2, 2, 3, 1);
  p.add_term({0, 1, 0}, 1);  // degree 3 >= bound, dropped
  CHECK(p.is_one());
  p.add_term({0, 1}, 1);
  CHECK(p.terms().size() == 2);
  CHECK(p.min_nonconstant_degree() == 2);
}

TEST_CASE("print parse round trip") {
  std::mt19937_64 rng(24);
  for (long prime : {2L, 3L}) {
    for (int t = 0; t < 60; ++t) {
      TruncatedPoly a = random_unit(rng, prime, 3, 5);
      TruncatedPoly b = TruncatedPoly::parse(a.print(), prime, 3, 5);
      CHECK(a == b);
    }
  }
  TruncatedPoly z = TruncatedPoly::parse("1+e0+2*e1*e0", 3, 2, 4);
  CHECK(z.constant_term() == 1);
  CHECK(z.terms().at({1, 0}) == 2);
  CHECK(z.print() == "1+e0+2*e1*e0");
  CHECK_THROWS_AS(TruncatedPoly::parse("1+e7", 2, 2, 4), ParseError);
}
