#pragma once

#include "respk/config.hpp"
#include "respk/pgroup.hpp"
#include "respk/truncpoly.hpp"
#include "respk/words.hpp"

namespace respk {

// Witnesses built from the unit group of a truncated free algebra over F_p,
// generator i mapped to 1 + e_i. The minimal degree of phi(w) - 1 in the
// untruncated algebra is the weight of w; every witness below is a hom onto a
// finite p-group determined by that weight.

// Generator images 1 + e_i in U(rank, k[, q]).
PHom magnus_hom(int rank, long p, int k, int nilpotency = 0);

// phi(w) evaluated letter by letter; linear in |w| for fixed degree.
TruncatedPoly magnus_eval(const Word& w, long p, int rank, int k,
                          int nilpotency = 0);

// Weight of a nontrivial w: minimal degree of phi(w) - 1. Found by escalating
// the truncation bound from 2; CapExceeded past degree_cap.
int word_weight(const Word& w, long p, int rank, int degree_cap);

struct MagnusWitness {
  PHom hom;
  int degree = 0;  // truncation bound of the target
};

// phi(w) != 1; target degree bound is weight + 1, the least that works.
MagnusWitness residual_p_witness(const Word& w, long p, int rank,
                                 const Config& cfg);

// phi(g) of order exactly p^e (e >= 1), via bound d*p^{e-1} + 1 for weight d.
MagnusWitness order_exact_witness(const Word& g, long p, int rank, int e,
                                  const Config& cfg);

// phi(g) and phi(gamma) do not commute; needs [g, gamma] != 1.
MagnusWitness noncentral_witness(const Word& g, const Word& gamma, long p,
                                 int rank, const Config& cfg);

// One hom under which no power relation gamma^a = f gamma^b f^-1 can hold
// below p-adic level e+1: all commutators [gamma^{p^r}, f^-1 gamma^{p^r} f]
// for r = 0..e survive. Preconditions: each such commutator is nontrivial.
MagnusWitness conjugate_commutator_witness(const Word& f, const Word& gamma,
                                           long p, int rank, int e,
                                           const Config& cfg);

}  // namespace respk
