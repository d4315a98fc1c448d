#include "respk/doublecoset.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "respk/magnus.hpp"
#include "respk/schreier.hpp"
#include "respk/truncpoly.hpp"

namespace respk {

namespace {

// Signed run-length decomposition; runs of one generator in a freely reduced
// word carry a constant sign, so the exponent never crosses zero.
std::vector<std::pair<int, long>> syllables(const Word& w) {
  std::vector<std::pair<int, long>> out;
  for (Letter l : w.letters()) {
    if (!out.empty() && out.back().first == l.gen)
      out.back().second += l.sign;
    else
      out.emplace_back(l.gen, static_cast<long>(l.sign));
  }
  return out;
}

std::vector<std::pair<long, long>> scan_solutions(const Word& g, const Word& h,
                                                  const Word& gamma, long bound) {
  std::map<Word, long> lefts;  // gamma^a * g -> a
  Word a_word = pow(gamma, -bound) * g;
  for (long a = -bound; a <= bound; ++a) {
    lefts.emplace(a_word, a);
    a_word = gamma * a_word;
  }
  std::vector<std::pair<long, long>> sols;
  Word b_word = h * pow(gamma, -bound);
  for (long b = -bound; b <= bound; ++b) {
    auto it = lefts.find(b_word);
    if (it != lefts.end()) sols.emplace_back(it->second, b);
    b_word = b_word * gamma;
  }
  std::sort(sols.begin(), sols.end());
  return sols;
}

int p_exponent(unsigned long q, long p) {
  int e = 0;
  while (q > 1) {
    q /= static_cast<unsigned long>(p);
    ++e;
  }
  return e;
}

}  // namespace

DoubleCosetResult double_coset_decide(const Word& g, const Word& h,
                                      const Word& gamma) {
  if (gamma.empty() || !is_cyclically_reduced(gamma) || gamma.length() % 4 != 0)
    throw PreconditionError(
        "double_coset_decide needs a cyclically reduced gamma of length 4n");
  DoubleCosetResult res;
  auto cg = power_of(g, gamma);
  auto ch = power_of(h, gamma);
  if (cg && ch) {
    res.kind = DoubleCosetResult::Kind::Line;
    res.a = *ch - *cg;
    res.b = 0;
    return res;
  }
  if (cg || ch) {
    // gamma^a gamma^c = h gamma^b would force the other side into <gamma>
    res.kind = DoubleCosetResult::Kind::None;
    return res;
  }
  long bound = (g.length() + h.length()) / gamma.length() + 2;
  auto sols = scan_solutions(g, h, gamma, bound);
  auto wide = scan_solutions(g, h, gamma, bound + 4);
  if (sols != wide)
    throw std::logic_error("double-coset scan bound admitted a new solution");
  if (sols.empty()) {
    res.kind = DoubleCosetResult::Kind::None;
    return res;
  }
  if (sols.size() > 1)
    throw std::logic_error(
        "multiple double-coset solutions outside the power case");
  res.kind = DoubleCosetResult::Kind::Unique;
  res.a = sols.front().first;
  res.b = sols.front().second;
  return res;
}

DoubleCosetWitness double_coset_witness(const Word& g, const Word& h,
                                        const Word& gamma, const Config& cfg) {
  const long p = cfg.prime;
  if (!is_prime(p)) throw PreconditionError("cfg.prime must be prime");
  if (gamma.empty() || gamma.length() % 4 != 0)
    throw PreconditionError("gamma must have length 4n");
  const int n = gamma.length() / 4;
  if (!(gamma == surface_relator(n)))
    throw PreconditionError("gamma must be the genus-n surface relator");
  for (const Word* w : {&g, &h})
    for (Letter l : w->letters())
      if (l.gen < 0 || l.gen >= 2 * n)
        throw PreconditionError("word outside the genus-n surface alphabet");
  auto dec = double_coset_decide(g, h, gamma);
  if (dec.kind != DoubleCosetResult::Kind::None)
    throw PreconditionError("g and h share a <gamma> double coset");

  DoubleCosetWitness out;
  Word hp = h * g.inverse();
  CoverBasis cb = cover_basis(n, p, g);
  if (cb.mu.apply(hp) != 0) {
    // The mod-p^2 exponent map already tells the cosets apart: phi(gamma) is
    // trivial, so the table degenerates to phi(g) != phi(h).
    PHom phi;
    phi.domain = cb.mu.domain;
    phi.target = PGroupExpr::cyclic(p, 2);
    for (long v : cb.mu.values) {
      PElement el = identity(phi.target);
      el.residue = static_cast<unsigned long>(v);
      phi.images.push_back(el);
    }
    out.phi = std::move(phi);
    out.early = true;
    out.modulus = elem_order(out.phi.apply(gamma));
    verify_double_coset(out.phi, g, h, gamma);
    return out;
  }

  // gamma g gamma^-1-conjugation data: g gamma g^-1 = u z_l0 u^-1 over the
  // cover symbols. Trailing z_l0 syllables of u are absorbed into the
  // conjugation, then the leading gamma-run splits off as u = gamma^c1 * v.
  Word u = cb.w_over_basis;
  const int zg = cb.gamma_symbol;
  const int z0 = cb.z_l0_symbol;
  {
    std::vector<Letter> kept(u.letters().begin(), u.letters().end());
    while (!kept.empty() && kept.back().gen == z0) kept.pop_back();
    u = Word::reduce(kept);
  }
  long c1 = 0;
  std::size_t cut = 0;
  const auto& ul = u.letters();
  while (cut < ul.size() && ul[cut].gen == zg) {
    c1 += ul[cut].sign;
    ++cut;
  }
  Word v = Word::reduce(std::span<const Letter>(ul.data() + cut, ul.size() - cut));

  // q exceeds twice every syllable exponent of v and of the element to be
  // separated, so all exponents stay honest mod q.
  Word target_sym = rewrite_over_cover(cb, hp * pow(gamma, c1));
  long bound = 1;
  for (auto& [sym, e] : syllables(v)) bound = std::max(bound, 2 * std::labs(e));
  for (auto& [sym, e] : syllables(target_sym))
    bound = std::max(bound, 2 * std::labs(e));
  const unsigned long q = least_p_power_above(p, bound, 1);
  const int eq = p_exponent(q, p);
  const int nz = cb.symbol_alphabet.rank();

  // Free product of |Z| cyclics of order q, realized as units 1 + e_z with
  // per-symbol nilpotency q. The decisive element must avoid all q^2 double
  // coset representatives gamma^a v z0^b v^-1; escalate the degree until the
  // finitely many inequalities hold.
  const int k_start = std::max(4, static_cast<int>(ipow(p, eq - 1)) + 1);
  int used_k = -1;
  for (int k = k_start; k <= cfg.trunc_degree_cap && used_k < 0; ++k) {
    TruncatedPoly target = magnus_eval(target_sym, p, nz, k, static_cast<int>(q));
    TruncatedPoly pv = magnus_eval(v, p, nz, k, static_cast<int>(q));
    TruncatedPoly step = pv.times_unit_generator(z0, 1) * pv.inverse();
    bool collide = false;
    TruncatedPoly a_pow =
        TruncatedPoly::constant(p, nz, k, 1, static_cast<int>(q));
    for (unsigned long a = 0; a < q && !collide; ++a) {
      TruncatedPoly cand = a_pow;
      for (unsigned long b = 0; b < q; ++b) {
        if (cand == target) {
          collide = true;
          break;
        }
        cand = cand * step;
      }
      a_pow = a_pow.times_unit_generator(zg, 1);
    }
    if (!collide) used_k = k;
  }
  if (used_k < 0)
    throw CapExceeded("double-coset separation degree escalation cap");

  auto base = PGroupExpr::trunc_units(p, nz, used_k, static_cast<int>(q));
  out.phi = induced_wreath(cb.mu, base, [&](const Word& w) {
    PElement el = identity(base);
    el.poly = magnus_eval(rewrite_over_cover(cb, w), p, nz, used_k,
                          static_cast<int>(q));
    return el;
  });
  out.early = false;
  out.q = q;
  out.degree = used_k;
  out.modulus = elem_order(out.phi.apply(gamma));
  verify_double_coset(out.phi, g, h, gamma);
  return out;
}

void verify_double_coset(const PHom& phi, const Word& g, const Word& h,
                         const Word& gamma) {
  for (const Word* w : {&g, &h, &gamma})
    for (Letter l : w->letters())
      if (l.gen < 0 || l.gen >= static_cast<int>(phi.images.size()))
        throw VerificationError("word outside the witness domain");
  PElement pg = phi.apply(g);
  PElement ph = phi.apply(h);
  PElement pc = phi.apply(gamma);
  const unsigned long n = elem_order(pc);
  std::set<PElement> rights;
  PElement right = ph;
  for (unsigned long b = 0; b < n; ++b) {
    rights.insert(right);
    right = elem_mul(right, pc);
  }
  PElement left = pg;
  for (unsigned long a = 0; a < n; ++a) {
    if (rights.count(left))
      throw VerificationError("double-coset witness table has a collision");
    left = elem_mul(pc, left);
  }
}

}  // namespace respk
