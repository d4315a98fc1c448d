#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "respk/config.hpp"
#include "respk/pgroup.hpp"
#include "respk/schreier.hpp"
#include "respk/words.hpp"

namespace respk {

// One node of a conjugacy-separation witness tree. The hom maps the free
// group on its domain onto a finite p-group in which the classes of g and h
// stay apart; the node kind says why:
//   Residual  g is trivial and phi(h) is not, so the classes differ
//   Cyclic    abelian target and phi(g) != phi(h)
//   Wreath    hom induced along mu from the combined child witnesses
enum class NodeKind { Residual, Cyclic, Wreath };

// How the node's claim was established, and how a verifier must recheck it.
// Wreath nodes use Enumeration when the image closes under the cap, else
// Compositional (children carry the claim; only bookkeeping is rechecked).
enum class VerifyMode { Nontrivial, AbelianDistinct, Enumeration, Compositional };

struct SeparationNode {
  NodeKind kind = NodeKind::Residual;
  VerifyMode verify = VerifyMode::Nontrivial;
  // Cyclically reduced pair, possibly swapped relative to the caller's order;
  // separation is symmetric so the orientation is free.
  Word g, h;
  PHom hom;
  // Wreath data: exponent map, the strictly decreasing coset, one child per
  // coset of Ker mu (child i handles the pair rewritten at cosets (i0, i)).
  ExponentHom mu;
  long i0 = 0;
  std::vector<std::unique_ptr<SeparationNode>> children;
};

// Result of the separation: exactly one member is set.
struct ConjOutcome {
  std::optional<Word> conjugator;           // f with f h f^-1 = g
  std::unique_ptr<SeparationNode> witness;  // verified before return
};

// Decide conjugacy in the free group on `alphabet`; for a non-conjugate pair
// build a homomorphism onto a finite p-group (p = cfg.prime) separating the
// classes, as a witness tree whose root hom is the separating map.
ConjOutcome separate_conjugacy_free(const Word& g, const Word& h,
                                    const Alphabet& alphabet,
                                    const Config& cfg);

// Independent recheck of a witness tree against the pair it claims to
// separate: recomputes rewrites, recombines child maps, re-induces the
// recorded homomorphisms, and redoes every enumeration. Throws
// VerificationError on any mismatch.
void verify_separation(const SeparationNode& node, const Word& g, const Word& h,
                       const Config& cfg);

}  // namespace respk
