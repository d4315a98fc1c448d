#include "respk/magnus.hpp"

#include <cassert>

namespace respk {

PHom magnus_hom(int rank, long p, int k, int nilpotency) {
  PHom h;
  std::vector<std::string> names;
  for (int i = 0; i < rank; ++i) names.push_back("g" + std::to_string(i));
  h.domain = Alphabet::named(std::move(names));
  h.target = PGroupExpr::trunc_units(p, rank, k, nilpotency);
  for (int i = 0; i < rank; ++i) {
    PElement img;
    img.expr = h.target;
    img.poly = TruncatedPoly::one_plus_symbol(p, rank, k, i, nilpotency);
    h.images.push_back(std::move(img));
  }
  return h;
}

TruncatedPoly magnus_eval(const Word& w, long p, int rank, int k, int nilpotency) {
  TruncatedPoly acc = TruncatedPoly::constant(p, rank, k, 1, nilpotency);
  for (const Letter& l : w.letters()) {
    if (l.gen < 0 || l.gen >= rank)
      throw PreconditionError("word letter outside the algebra rank");
    acc = acc.times_unit_generator(l.gen, l.sign);
  }
  return acc;
}

int word_weight(const Word& w, long p, int rank, int degree_cap) {
  if (w.empty()) throw PreconditionError("the trivial word has no weight");
  for (int k = 2; k <= degree_cap; ++k) {
    TruncatedPoly v = magnus_eval(w, p, rank, k);
    if (!v.is_one()) {
      int d = v.min_nonconstant_degree();
      assert(d == k - 1);
      return d;
    }
  }
  throw CapExceeded("weight exceeds degree cap " + std::to_string(degree_cap));
}

MagnusWitness residual_p_witness(const Word& w, long p, int rank,
                                 const Config& cfg) {
  int d = word_weight(w, p, rank, cfg.trunc_degree_cap);
  MagnusWitness out;
  out.degree = d + 1;
  out.hom = magnus_hom(rank, p, out.degree);
  if (elem_is_identity(out.hom.apply(w)))
    throw VerificationError("residual witness failed to separate");
  return out;
}

MagnusWitness order_exact_witness(const Word& g, long p, int rank, int e,
                                  const Config& cfg) {
  if (e < 1) throw PreconditionError("order witness needs e >= 1");
  int d = word_weight(g, p, rank, cfg.trunc_degree_cap);
  long target_order = static_cast<long>(ipow(p, e));
  // Degree bound d*p^{e-1} + 1 keeps the lowest term of phi(g)^{p^{e-1}}
  // alive and kills the p^e-th power; the loop is a guard only.
  long k = d * static_cast<long>(ipow(p, e - 1)) + 1;
  long cap = d * static_cast<long>(ipow(p, e)) + 1;
  for (; k <= cap; ++k) {
    MagnusWitness out;
    out.degree = static_cast<int>(k);
    out.hom = magnus_hom(rank, p, out.degree);
    if (elem_order(out.hom.apply(g)) == static_cast<unsigned long>(target_order))
      return out;
  }
  throw VerificationError("no truncation bound gave the requested order");
}

MagnusWitness noncentral_witness(const Word& g, const Word& gamma, long p,
                                 int rank, const Config& cfg) {
  Word c = commutator(g, gamma);
  if (c.empty())
    throw PreconditionError("elements commute, no noncentral witness exists");
  MagnusWitness out = residual_p_witness(c, p, rank, cfg);
  return out;
}

MagnusWitness conjugate_commutator_witness(const Word& f, const Word& gamma,
                                           long p, int rank, int e,
                                           const Config& cfg) {
  std::vector<PHom> parts;
  int degree = 0;
  for (int r = 0; r <= e; ++r) {
    Word gpow = pow(gamma, static_cast<long>(ipow(p, r)));
    Word c = commutator(gpow, conjugated(gpow, f.inverse()));
    if (c.empty())
      throw PreconditionError("conjugate power commutator vanishes at level " +
                              std::to_string(r));
    MagnusWitness w = residual_p_witness(c, p, rank, cfg);
    degree = std::max(degree, w.degree);
    parts.push_back(std::move(w.hom));
  }
  MagnusWitness out;
  out.hom = direct_combine(parts);
  out.degree = degree;
  return out;
}

}  // namespace respk
