#pragma once

#include "respk/config.hpp"
#include "respk/pgroup.hpp"
#include "respk/words.hpp"

namespace respk {

// Solutions of gamma^a * g = h * gamma^b in the ambient free group.
//   None    no solution (g and h lie in distinct <gamma> double cosets)
//   Unique  exactly one solution, recorded in (a, b)
//   Line    both g and h are powers of gamma; solutions form the line
//           a - b = (exponent of h) - (exponent of g), recorded as (a, 0)
struct DoubleCosetResult {
  enum class Kind { None, Unique, Line };
  Kind kind = Kind::None;
  long a = 0;
  long b = 0;
};

// Bounded scan with |a|, |b| <= (|g| + |h|) / |gamma| + 2; the bound is
// re-checked by widening once. gamma must be cyclically reduced of length 4n.
DoubleCosetResult double_coset_decide(const Word& g, const Word& h,
                                      const Word& gamma);

// Homomorphism onto a finite p-group under which the double cosets stay
// separated: phi(gamma)^a phi(g) != phi(h) phi(gamma)^b for every a, b; the
// check table only needs residues mod N = elem_order(phi(gamma)).
struct DoubleCosetWitness {
  PHom phi;
  unsigned long modulus = 1;  // N
  bool early = false;         // the mod-p^2 exponent map alone separates
  unsigned long q = 0;        // cyclic factor order of the free-product stage
  int degree = 0;             // truncation degree of the free-product stage
};

// Requires double_coset_decide(g, h, gamma) = None and gamma the genus-n
// surface relator; p comes from cfg. The witness is table-verified before
// being returned.
DoubleCosetWitness double_coset_witness(const Word& g, const Word& h,
                                        const Word& gamma, const Config& cfg);

// Recomputes N and the full (a, b) table from the generator images alone.
// Throws VerificationError on any collision.
void verify_double_coset(const PHom& phi, const Word& g, const Word& h,
                         const Word& gamma);

}  // namespace respk
