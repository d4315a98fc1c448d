#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "respk/config.hpp"
#include "respk/pgroup.hpp"
#include "respk/words.hpp"

namespace respk {

// Amalgamated products H1 *_C H2 over a cyclic C. Two flavors share the
// representation: both factors free surface-relator groups (the source of
// the surface pipeline), or both finite p-groups presented as quotients of
// those free factors (the witness targets).

struct FreeFactor {
  int genus = 0;      // rank 2 * genus
  Alphabet alphabet;  // local names; factor 2 uses primed names
  Word gamma;         // product of handle commutators, length 4 * genus
};

struct FiniteFactor {
  PHom onto;       // quotient map from the free factor; defines the group
  PElement gamma;  // image of the relator, generates the edge subgroup
  unsigned long order = 1;  // its order, a power of p
};

struct FactorGroup {
  bool finite = false;
  FreeFactor free_part;
  FiniteFactor finite_part;
};

struct Amalgam {
  FactorGroup f1;
  FactorGroup f2;
};

// Free surface splitting of genus n + m: factor 1 carries handles 1..n,
// factor 2 the rest, relators identified.
Amalgam surface_amalgam(int n, int m);

// Finite quotient amalgam from two factor quotient maps; computes and
// checks the edge generator orders (they must agree).
Amalgam finite_amalgam(const PHom& onto1, const Word& gamma1,
                       const PHom& onto2, const Word& gamma2);

// One syllable of a normal form: a coset representative outside C in the
// tagged factor. The word member carries free elements, elem finite ones.
struct Syllable {
  int factor = 0;  // 0 or 1
  Word word;
  PElement elem;
};

// Canonical normal form: alternating syllables, each the fixed canonical
// representative of its right coset of C, then a trailing power of the
// edge generator. Equal group elements have identical forms.
struct AmalgamElement {
  std::vector<Syllable> syllables;
  long c = 0;
};

int syl(const AmalgamElement& g);
bool amalgam_equal(const Amalgam& a, const AmalgamElement& x,
                   const AmalgamElement& y);
bool amalgam_is_identity(const Amalgam& a, const AmalgamElement& x);

// Exponent e with s = gamma^e in s's factor, if s lies in C.
std::optional<long> c_membership(const Amalgam& a, const Syllable& s);

// Left-to-right reduction of an arbitrary syllable sequence to the
// canonical form. Parts may lie in C; trailing_c appends gamma^trailing_c.
AmalgamElement normalize(const Amalgam& a, const std::vector<Syllable>& parts,
                         long trailing_c = 0);

AmalgamElement amalgam_mul(const Amalgam& a, const AmalgamElement& x,
                           const AmalgamElement& y);
AmalgamElement amalgam_inverse(const Amalgam& a, const AmalgamElement& x);
// s x s^-1
AmalgamElement amalgam_conjugate(const Amalgam& a, const AmalgamElement& x,
                                 const AmalgamElement& s);
// gamma^k as an element
AmalgamElement amalgam_c_power(const Amalgam& a, long k);

// Free amalgams only: elements as words over the combined alphabet
// (factor-1 names first, then factor-2 names).
Alphabet combined_alphabet(const Amalgam& a);
AmalgamElement amalgam_from_word(const Amalgam& a, const Word& combined);
Word amalgam_to_word(const Amalgam& a, const AmalgamElement& g);

std::string print_amalgam(const Amalgam& a, const AmalgamElement& g);

struct AmalgamCyclic {
  AmalgamElement core;
  AmalgamElement conjugator;  // g = conjugator * core * conjugator^-1
};
AmalgamCyclic amalgam_cyclic_reduce(const Amalgam& a, const AmalgamElement& g);

// Conjugacy decision. On success conjugator f satisfies f h f^-1 = g.
// Syllable length >= 2 runs the rotation and coset-chain analysis; shorter
// elements go through factor conjugacy and edge-subgroup chains, complete
// for both flavors (finite factors may hit the enumeration cap).
struct AmalgamConjugacy {
  std::optional<AmalgamElement> conjugator;
  bool incomplete = false;  // reserved; the implemented cases are complete
};
AmalgamConjugacy amalgam_conjugacy(const Amalgam& a, const AmalgamElement& g,
                                   const AmalgamElement& h, const Config& cfg);

// Homomorphism onto a finite quotient amalgam, one factor map per side,
// edge generator orders matched to q.
struct AmalgamHom {
  PHom phi1;
  PHom phi2;
  Amalgam target;
  unsigned long q = 1;
};
AmalgamElement apply_hom(const AmalgamHom& hom, const Amalgam& source,
                         const AmalgamElement& g);

// Witness that g and h stay non-conjugate in a finite quotient amalgam.
// step records which branch built it: 1 collapses h into a factor, 2
// separates by syllable length, 3 runs the per-rotation coset analysis.
struct SurfaceWitness {
  AmalgamHom hom;
  int step = 0;
  bool swapped = false;  // witness built for (h, g) instead of (g, h)
};

// Requires g cyclically reduced with syl(g) >= 2 and g not conjugate to h.
// The returned hom keeps phi(g) cyclically reduced of the same syllable
// length while phi(h) is separated from it; verified before return.
SurfaceWitness syllable_preserving_witness(const Amalgam& a,
                                           const AmalgamElement& g,
                                           const AmalgamElement& h,
                                           const Config& cfg);

// Re-checks a witness against the pair from scratch: order matching,
// syllable images outside the edge subgroup, syllable length preservation,
// and the exhaustive rotation-and-twist table in the target.
void verify_surface_witness(const Amalgam& a, const AmalgamHom& hom,
                            const AmalgamElement& g, const AmalgamElement& h,
                            const Config& cfg);

// Raised when no listed relator-preserving automorphism brings the pair
// into the syllable length >= 2 regime the witness construction needs.
struct NormalizationFailed : public std::runtime_error {
  explicit NormalizationFailed(const std::string& what)
      : std::runtime_error(what) {}
};

// Full surface pipeline: decide conjugacy; for non-conjugate pairs
// normalize (swap, then relator-preserving automorphisms up to the
// configured depth) and build a verified witness.
struct SurfaceOutcome {
  std::optional<AmalgamElement> conjugator;
  std::optional<SurfaceWitness> witness;
};
SurfaceOutcome separate_conjugacy_surface(const Amalgam& a,
                                          const AmalgamElement& g,
                                          const AmalgamElement& h,
                                          const Config& cfg);

}  // namespace respk
