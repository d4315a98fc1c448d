#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace respk {

// Element of the free associative F_p-algebra on `symbols` noncommuting
// generators, truncated at total degree < degree_bound, with an optional
// per-symbol nilpotency: when nilpotency > 0, any monomial containing a run of
// >= nilpotency equal symbols is identified with zero (the two-sided ideal
// generated by e_i^nilpotency).
//
// Monomials are symbol-index sequences stored sparsely with nonzero
// coefficients; the empty monomial is the constant term. Iteration order of
// the map (length-lexicographic via vector<>) makes printing deterministic.
class TruncatedPoly {
 public:
  using Monomial = std::vector<std::uint8_t>;

  TruncatedPoly() = default;
  TruncatedPoly(long prime, int symbols, int degree_bound, int nilpotency = 0);

  static TruncatedPoly constant(long prime, int symbols, int degree_bound,
                                long value, int nilpotency = 0);
  static TruncatedPoly one_plus_symbol(long prime, int symbols, int degree_bound,
                                       int symbol, int nilpotency = 0);

  long prime() const { return prime_; }
  int symbols() const { return symbols_; }
  int degree_bound() const { return degree_; }
  int nilpotency() const { return nil_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_one() const;
  long constant_term() const;
  // Least degree among nonconstant terms; -1 if none.
  int min_nonconstant_degree() const;
  const std::map<Monomial, long>& terms() const { return terms_; }

  void add_term(const Monomial& m, long coeff);  // coeff reduced mod prime

  TruncatedPoly operator+(const TruncatedPoly& o) const;
  TruncatedPoly operator-(const TruncatedPoly& o) const;
  TruncatedPoly operator*(const TruncatedPoly& o) const;
  // Multiplication by (1 + e_symbol)^sign: the workhorse for evaluating long
  // words of unit generators; linear in the term count.
  TruncatedPoly times_unit_generator(int symbol, int sign) const;

  // Multiplicative inverse for units (constant term invertible mod p), via the
  // geometric series on the nilpotent part.
  TruncatedPoly inverse() const;

  bool same_shape(const TruncatedPoly& o) const;
  bool operator==(const TruncatedPoly&) const = default;
  auto operator<=>(const TruncatedPoly&) const = default;

  // Literal syntax: terms joined by '+', term = coeff or coeff '*' monomial or
  // monomial, monomial = '*'-joined symbol names e<i>; "0" for zero. Constant
  // term prints first, then terms by (degree, lex) order.
  std::string print() const;
  static TruncatedPoly parse(std::string_view text, long prime, int symbols,
                             int degree_bound, int nilpotency = 0);

 private:
  bool monomial_alive(const Monomial& m) const;
  long prime_ = 2;
  int symbols_ = 0;
  int degree_ = 1;
  int nil_ = 0;
  std::map<Monomial, long> terms_;
};

}  // namespace respk
