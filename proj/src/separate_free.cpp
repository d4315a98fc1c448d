#include "respk/separate_free.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "respk/magnus.hpp"

namespace respk {

namespace {

struct Bezout {
  long g, s, t;  // s*a + t*b == g == gcd(a, b) >= 0
};

Bezout ext_gcd(long a, long b) {
  if (b == 0) return a >= 0 ? Bezout{a, 1, 0} : Bezout{-a, -1, 0};
  Bezout r = ext_gcd(b, a % b);
  return {r.g, r.t, r.s - (a / b) * r.t};
}

long mod_inverse(long a, long p) {
  Bezout b = ext_gcd(((a % p) + p) % p, p);
  return ((b.s % p) + p) % p;
}

// Second row of a unimodular V with V*b = (gcd, 0, ..., 0): a primitive
// integer row orthogonal to b. Needs |b| >= 2.
std::vector<long> orthogonal_primitive_row(const std::vector<long>& b) {
  const std::size_t k = b.size();
  std::vector<std::vector<long>> rows(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < k; ++i) rows[i][i] = 1;
  std::vector<long> v = b;
  for (std::size_t i = 1; i < k; ++i) {
    if (v[i] == 0) continue;
    Bezout bz = ext_gcd(v[0], v[i]);
    std::vector<long> top(k), cur(k);
    for (std::size_t j = 0; j < k; ++j) {
      top[j] = bz.s * rows[0][j] + bz.t * rows[i][j];
      cur[j] = -(v[i] / bz.g) * rows[0][j] + (v[0] / bz.g) * rows[i][j];
    }
    rows[0] = std::move(top);
    rows[i] = std::move(cur);
    v[0] = bz.g;
    v[i] = 0;
  }
  return rows[1];
}

// Exponent map mod p with a designated generator in Sup(g) and
// mu(g) = mu(h) = 0. Callable once the pair shares its homology class and
// Sup(g) has at least two generators (the zero-class case needs only one).
ExponentHom step4_mu(const Word& g, const Word& h, const Alphabet& alpha,
                     long p) {
  const int r = alpha.rank();
  AbelianVector cls = abelianize(g, r);
  std::vector<int> sup = support(g);
  std::vector<int> cls_sup;
  for (int j = 0; j < r; ++j)
    if (cls.coords[j] != 0) cls_sup.push_back(j);

  ExponentHom mu;
  mu.domain = alpha;
  mu.values.assign(r, 0);
  mu.modulus = static_cast<unsigned long>(p);
  if (cls_sup.empty()) {
    // zero class: any occurring generator carries the map
    mu.designated = sup.front();
    mu.values[mu.designated] = 1;
  } else if (cls_sup.size() == 1) {
    // class a[y]: kill y, designate another occurring generator
    int y = cls_sup.front();
    int x = -1;
    for (int s : sup)
      if (s != y) {
        x = s;
        break;
      }
    if (x < 0)
      throw std::logic_error("step 4 needs a second generator in the support");
    mu.designated = x;
    mu.values[x] = 1;
  } else {
    // class on >= 2 generators: a primitive row orthogonal to the coefficient
    // vector cannot vanish mod p; scale it so the designated generator maps
    // to 1
    std::vector<long> coeff;
    coeff.reserve(cls_sup.size());
    for (int j : cls_sup) coeff.push_back(cls.coords[j]);
    std::vector<long> lambda = orthogonal_primitive_row(coeff);
    long dot = 0;
    for (std::size_t t = 0; t < coeff.size(); ++t) dot += lambda[t] * coeff[t];
    if (dot != 0) throw std::logic_error("orthogonal row construction failed");
    int x = -1;
    long lead = 0;
    for (std::size_t t = 0; t < cls_sup.size(); ++t) {
      long lv = ((lambda[t] % p) + p) % p;
      if (lv != 0) {
        x = cls_sup[t];
        lead = lv;
        break;
      }
    }
    if (x < 0) throw std::logic_error("primitive row vanished mod p");
    long inv = mod_inverse(lead, p);
    for (std::size_t t = 0; t < cls_sup.size(); ++t) {
      long lv = ((lambda[t] % p) + p) % p;
      mu.values[cls_sup[t]] = (lv * inv) % p;
    }
    mu.designated = x;
  }
  mu.check();
  if (mu.apply(g) != 0 || mu.apply(h) != 0)
    throw std::logic_error("step 4 map does not kill the pair");
  return mu;
}

std::unique_ptr<SeparationNode> make_cyclic_node(const Word& g, const Word& h,
                                                 const Alphabet& alpha, long p,
                                                 int designated,
                                                 unsigned long q) {
  int e = 0;
  for (unsigned long t = q; t > 1; t /= static_cast<unsigned long>(p)) ++e;
  auto node = std::make_unique<SeparationNode>();
  node->kind = NodeKind::Cyclic;
  node->verify = VerifyMode::AbelianDistinct;
  node->g = g;
  node->h = h;
  node->hom.domain = alpha;
  node->hom.target = PGroupExpr::cyclic(p, e);
  for (int j = 0; j < alpha.rank(); ++j) {
    PElement el = identity(node->hom.target);
    if (j == designated) el.residue = 1;
    node->hom.images.push_back(el);
  }
  if (node->hom.apply(g) == node->hom.apply(h))
    throw VerificationError("cyclic witness failed to separate");
  return node;
}

// Builds the witness tree for a pair known to be non-conjugate.
std::unique_ptr<SeparationNode> build_witness(const Word& g_in, const Word& h_in,
                                              const Alphabet& alpha,
                                              const Config& cfg, int depth) {
  if (depth > cfg.recursion_cap)
    throw CapExceeded("separation recursion depth cap");
  const long p = cfg.prime;
  const int r = alpha.rank();
  Word g = cyclic_reduce(g_in).core;
  Word h = cyclic_reduce(h_in).core;
  if (h.empty()) std::swap(g, h);

  // Step 1: one class is trivial; any map keeping the other side alive works.
  if (g.empty()) {
    auto node = std::make_unique<SeparationNode>();
    node->kind = NodeKind::Residual;
    node->verify = VerifyMode::Nontrivial;
    node->g = g;
    node->h = h;
    MagnusWitness mw = residual_p_witness(h, p, r, cfg);
    mw.hom.domain = alpha;
    node->hom = std::move(mw.hom);
    if (elem_is_identity(node->hom.apply(node->h)))
      throw VerificationError("residual witness vanished");
    return node;
  }

  std::vector<int> sg = support(g);
  std::vector<int> sh = support(h);
  AbelianVector ag = abelianize(g, r);
  AbelianVector ah = abelianize(h, r);

  // Step 2: both sides are powers of single generators; a cyclic group large
  // enough to keep both exponents honest separates them.
  if (sg.size() == 1 && sh.size() == 1) {
    long ne = ag.coords[sg[0]];
    long me = ah.coords[sh[0]];
    long twice = 2 * std::max(std::labs(ne), std::labs(me));
    return make_cyclic_node(g, h, alpha, p, sg[0],
                            least_p_power_above(p, twice, 1));
  }

  // Step 3: distinct homology classes; the first differing exponent sum
  // survives mod a large enough p-power.
  if (!(ag == ah)) {
    int x = -1;
    long a1 = 0;
    for (int j = 0; j < r; ++j) {
      long d = ag.coords[j] - ah.coords[j];
      if (d != 0) {
        x = j;
        a1 = d;
        break;
      }
    }
    return make_cyclic_node(g, h, alpha, p, x,
                            least_p_power_above(p, 2 * std::labs(a1), 1));
  }

  // Steps 4-6 need two generators in Sup(g); separation is symmetric, so a
  // swap is harmless.
  if (sg.size() == 1) {
    std::swap(g, h);
    std::swap(sg, sh);
  }

  ExponentHom mu = step4_mu(g, h, alpha, p);
  SchreierBasis basis = schreier_generators(mu);
  const long i0 = choose_decreasing_coset(basis, g);
  const long m = static_cast<long>(mu.modulus);
  Word gi0 = rewrite_in_basis(basis, g, i0);

  auto node = std::make_unique<SeparationNode>();
  node->kind = NodeKind::Wreath;
  node->g = g;
  node->h = h;
  node->mu = mu;
  node->i0 = i0;
  std::vector<PHom> child_homs;
  for (long i = 0; i < m; ++i) {
    Word hi = rewrite_in_basis(basis, h, i);
    // Conjugacy of a subproblem would evaluate back to conjugacy of (g, h).
    if (is_conjugate_free(gi0, hi))
      throw std::logic_error("conjugate subproblem under a non-conjugate pair");
    node->children.push_back(
        build_witness(gi0, hi, basis.symbol_alphabet, cfg, depth + 1));
    child_homs.push_back(node->children.back()->hom);
  }
  PHom beta = direct_combine(child_homs);
  node->hom = induced_wreath(mu, beta.target, [&](const Word& w) {
    return beta.apply(rewrite_in_basis(basis, w, 0));
  });

  PElement pg = node->hom.apply(g);
  PElement ph = node->hom.apply(h);
  try {
    auto elems = enumerate_image(node->hom, cfg.enum_cap);
    if (auto s = find_conjugator_finite(elems, pg, ph))
      throw VerificationError("images conjugate in the induced group by " +
                              s->print());
    node->verify = VerifyMode::Enumeration;
  } catch (const CapExceeded&) {
    // image too large to close; the child certificates carry the claim
    node->verify = VerifyMode::Compositional;
  }
  return node;
}

void verify_node(const SeparationNode& node, const Word& g_in, const Word& h_in,
                 const Config& cfg, int depth) {
  if (depth > cfg.recursion_cap)
    throw CapExceeded("verification recursion depth cap");
  Word g = cyclic_reduce(g_in).core;
  Word h = cyclic_reduce(h_in).core;
  const bool direct = (node.g == g && node.h == h);
  const bool swapped = (node.g == h && node.h == g);
  if (!direct && !swapped)
    throw VerificationError("witness records a different pair");
  if (!node.hom.target)
    throw VerificationError("witness node lacks a target group");
  for (const Word* w : {&node.g, &node.h})
    for (Letter l : w->letters())
      if (l.gen < 0 || l.gen >= static_cast<int>(node.hom.images.size()))
        throw VerificationError("word outside the witness domain");

  switch (node.kind) {
    case NodeKind::Residual: {
      if (node.verify != VerifyMode::Nontrivial)
        throw VerificationError("residual node with foreign verification mode");
      if (!node.g.empty())
        throw VerificationError("residual node expects a trivial first word");
      if (elem_is_identity(node.hom.apply(node.h)))
        throw VerificationError("residual witness image is trivial");
      break;
    }
    case NodeKind::Cyclic: {
      if (node.verify != VerifyMode::AbelianDistinct)
        throw VerificationError("cyclic node with foreign verification mode");
      if (node.hom.target->kind != GroupKind::Cyclic)
        throw VerificationError("cyclic node with a non-cyclic target");
      if (node.hom.apply(node.g) == node.hom.apply(node.h))
        throw VerificationError("cyclic witness images coincide");
      break;
    }
    case NodeKind::Wreath: {
      node.mu.check();
      if (node.hom.target->kind != GroupKind::Wreath ||
          node.hom.target->top_modulus != node.mu.modulus)
        throw VerificationError("wreath target does not match the exponent map");
      if (node.mu.apply(node.g) != 0 || node.mu.apply(node.h) != 0)
        throw VerificationError("wreath node pair escapes the exponent kernel");
      if (node.verify == VerifyMode::Enumeration) {
        auto elems = enumerate_image(node.hom, cfg.enum_cap);
        if (auto s = find_conjugator_finite(elems, node.hom.apply(node.g),
                                            node.hom.apply(node.h)))
          throw VerificationError("images conjugate in the enumerated group by " +
                                  s->print());
      } else if (node.verify == VerifyMode::Compositional) {
        SchreierBasis basis = schreier_generators(node.mu);
        const long m = static_cast<long>(node.mu.modulus);
        if (static_cast<long>(node.children.size()) != m)
          throw VerificationError("wreath node child count mismatch");
        if (node.i0 < 0 || node.i0 >= m)
          throw VerificationError("wreath node coset out of range");
        Word gi0 = rewrite_in_basis(basis, node.g, node.i0);
        std::vector<PHom> child_homs;
        for (long i = 0; i < m; ++i) {
          if (!node.children[i])
            throw VerificationError("wreath node misses a child");
          Word hi = rewrite_in_basis(basis, node.h, i);
          verify_node(*node.children[i], gi0, hi, cfg, depth + 1);
          child_homs.push_back(node.children[i]->hom);
        }
        PHom beta = direct_combine(child_homs);
        PHom rebuilt = induced_wreath(node.mu, beta.target, [&](const Word& w) {
          return beta.apply(rewrite_in_basis(basis, w, 0));
        });
        if (!expr_equal(rebuilt.target, node.hom.target))
          throw VerificationError("recorded target differs from the induced one");
        if (rebuilt.images.size() != node.hom.images.size())
          throw VerificationError("recorded image count differs");
        for (std::size_t j = 0; j < rebuilt.images.size(); ++j)
          if (!(rebuilt.images[j] == node.hom.images[j]))
            throw VerificationError("recorded generator image differs");
      } else {
        throw VerificationError("wreath node with foreign verification mode");
      }
      break;
    }
  }
}

}  // namespace

ConjOutcome separate_conjugacy_free(const Word& g, const Word& h,
                                    const Alphabet& alphabet,
                                    const Config& cfg) {
  if (!is_prime(cfg.prime)) throw PreconditionError("cfg.prime must be prime");
  for (const Word* w : {&g, &h})
    for (Letter l : w->letters())
      if (l.gen < 0 || l.gen >= alphabet.rank())
        throw PreconditionError("word outside the given alphabet");
  ConjOutcome out;
  if (auto f = is_conjugate_free(g, h)) {
    out.conjugator = *f;
    return out;
  }
  out.witness = build_witness(g, h, alphabet, cfg, 0);
  verify_separation(*out.witness, g, h, cfg);
  return out;
}

void verify_separation(const SeparationNode& node, const Word& g, const Word& h,
                       const Config& cfg) {
  verify_node(node, g, h, cfg, 0);
}

}  // namespace respk
