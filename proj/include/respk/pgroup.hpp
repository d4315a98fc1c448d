#pragma once

#include <compare>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "respk/schreier.hpp"
#include "respk/truncpoly.hpp"
#include "respk/words.hpp"

namespace respk {

// Expression tree describing a concrete finite p-group.  Shapes:
//   Trivial                      the one-element group
//   Cyclic                      Z / p^e
//   Direct                      product of the listed factors
//   Wreath                      base wr (Z / m), m a power of p; elements are
//                               (vector of m base elements; top residue)
//   TruncUnits                  units 1 + n in the truncated polynomial ring
//                               F_p<e_0..e_{m-1}> / (degree >= k), optionally
//                               with each symbol nilpotent of class q
//
// Nodes are immutable and shared.
enum class GroupKind { Trivial, Cyclic, Direct, Wreath, TruncUnits };

class PGroupExpr;
using PGroupExprPtr = std::shared_ptr<const PGroupExpr>;

class PGroupExpr {
 public:
  GroupKind kind = GroupKind::Trivial;
  long prime = 2;

  unsigned long cyclic_order = 1;         // Cyclic
  std::vector<PGroupExprPtr> factors;     // Direct
  PGroupExprPtr base;                     // Wreath
  unsigned long top_modulus = 1;          // Wreath
  int tu_symbols = 0;                     // TruncUnits
  int tu_degree = 0;                      // TruncUnits
  int tu_nilpotency = 0;                  // TruncUnits, 0 = none

  static PGroupExprPtr trivial(long p);
  static PGroupExprPtr cyclic(long p, int e);
  static PGroupExprPtr direct(long p, std::vector<PGroupExprPtr> factors);
  static PGroupExprPtr wreath(PGroupExprPtr base_group, unsigned long m);
  static PGroupExprPtr trunc_units(long p, int symbols, int degree,
                                   int nilpotency = 0);

  std::string print() const;
  static PGroupExprPtr parse(std::string_view text, long p);
};

bool expr_equal(const PGroupExprPtr& a, const PGroupExprPtr& b);

// One element of the group described by `expr`.  Exactly one of the payload
// fields is meaningful, matching expr->kind.
struct PElement {
  PGroupExprPtr expr;
  unsigned long residue = 0;       // Cyclic
  std::vector<PElement> parts;     // Direct (per factor) / Wreath (m coords)
  unsigned long top = 0;           // Wreath
  TruncatedPoly poly;              // TruncUnits

  std::string print() const;
};

// Data-only comparison; both elements must live in structurally equal groups.
int elem_compare(const PElement& a, const PElement& b);
bool operator==(const PElement& a, const PElement& b);
bool operator<(const PElement& a, const PElement& b);

PElement identity(const PGroupExprPtr& expr);
PElement elem_mul(const PElement& a, const PElement& b);
PElement elem_inverse(const PElement& a);
PElement elem_pow(const PElement& a, long e);
PElement elem_conjugate(const PElement& a, const PElement& s);  // s a s^-1
bool elem_is_identity(const PElement& a);

// Order via repeated p-th powers; every element here has p-power order.
unsigned long elem_order(const PElement& a);

PElement parse_element(std::string_view text, const PGroupExprPtr& expr);

// Homomorphism from the free group on `domain` given by generator images.
struct PHom {
  Alphabet domain;
  PGroupExprPtr target;
  std::vector<PElement> images;

  PElement apply(const Word& w) const;
};

// Same domain, targets packed into one direct product.
PHom direct_combine(const std::vector<PHom>& homs);

// Closure of the generator images, deterministic iteration order.  Throws
// CapExceeded past `cap` elements.
std::set<PElement> enumerate_image(const PHom& hom, std::size_t cap);

// Search for s with s g s^-1 = h inside an enumerated group.
std::optional<PElement> find_conjugator_finite(const std::set<PElement>& elems,
                                               const PElement& g,
                                               const PElement& h);

// Lift a map through an index-m cyclic quotient: given mu on the free group F
// and beta defined on Ker mu (presented by evaluating F-words that lie in the
// kernel), build phi : F -> base wr (Z/m) with
//   phi(t) = (i -> beta(x^i t x^-(i + mu(t))); mu(t)).
PHom induced_wreath(const ExponentHom& mu, const PGroupExprPtr& base_target,
                    const std::function<PElement(const Word&)>& kernel_eval);

// Check the two-part divisibility property of conjugate powers: first that
// omega^{p^r} fails to commute with its xi-conjugate for r = 0..e, then that
// every relation omega^a = xi omega^b xi^-1 in the scanned range has
// p^{e+1} | a and p^{e+1} | b.
struct ConjugatePowerReport {
  bool hypotheses_ok = true;
  int failed_r = -1;
  bool divisibility_ok = true;
  long bad_a = 0;
  long bad_b = 0;
  std::vector<std::pair<long, long>> solutions;
};
ConjugatePowerReport check_conjugate_power_divisibility(const PElement& omega,
                                                        const PElement& xi,
                                                        int e, long range);

}  // namespace respk
