#include "respk/pgroup.hpp"

#include <cassert>
#include <deque>
#include <sstream>

#include "respk/config.hpp"

namespace respk {

namespace {

bool is_p_power(unsigned long m, long p) {
  if (m < 1) return false;
  while (m % static_cast<unsigned long>(p) == 0) m /= static_cast<unsigned long>(p);
  return m == 1;
}

// Top-level split on `delim`, respecting parenthesis nesting.
std::vector<std::string_view> split_top(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == delim && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::string strip_spaces(std::string_view s) {
  std::string t;
  for (char c : s)
    if (c != ' ' && c != '\t') t += c;
  return t;
}

unsigned long parse_ulong(std::string_view s) {
  if (s.empty()) throw ParseError("expected a number");
  unsigned long v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError("bad number: " + std::string(s));
    v = v * 10 + static_cast<unsigned long>(c - '0');
  }
  return v;
}

PGroupExprPtr parse_expr(std::string_view s, long p) {
  if (s == "1") return PGroupExpr::trivial(p);
  auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')')
    throw ParseError("bad group expression: " + std::string(s));
  std::string_view head = s.substr(0, open);
  std::string_view inner = s.substr(open + 1, s.size() - open - 2);
  std::vector<std::string_view> args = split_top(inner, ',');
  if (head == "C") {
    if (args.size() != 1) throw ParseError("C takes one argument");
    unsigned long n = parse_ulong(args[0]);
    if (n < 2 || !is_p_power(n, p))
      throw ParseError("cyclic order must be a positive power of the prime");
    int e = 0;
    for (unsigned long t = n; t > 1; t /= static_cast<unsigned long>(p)) ++e;
    return PGroupExpr::cyclic(p, e);
  }
  if (head == "D") {
    std::vector<PGroupExprPtr> factors;
    for (auto a : args) factors.push_back(parse_expr(a, p));
    return PGroupExpr::direct(p, std::move(factors));
  }
  if (head == "W") {
    if (args.size() != 2) throw ParseError("W takes base and modulus");
    return PGroupExpr::wreath(parse_expr(args[0], p), parse_ulong(args[1]));
  }
  if (head == "U") {
    if (args.size() != 2 && args.size() != 3)
      throw ParseError("U takes symbols, degree and optional nilpotency");
    int m = static_cast<int>(parse_ulong(args[0]));
    int k = static_cast<int>(parse_ulong(args[1]));
    int q = args.size() == 3 ? static_cast<int>(parse_ulong(args[2])) : 0;
    return PGroupExpr::trunc_units(p, m, k, q);
  }
  throw ParseError("unknown group constructor: " + std::string(head));
}

}  // namespace

PGroupExprPtr PGroupExpr::trivial(long p) {
  auto e = std::make_shared<PGroupExpr>();
  e->kind = GroupKind::Trivial;
  e->prime = p;
  return e;
}

PGroupExprPtr PGroupExpr::cyclic(long p, int e) {
  if (e < 1) throw PreconditionError("cyclic exponent must be >= 1");
  auto g = std::make_shared<PGroupExpr>();
  g->kind = GroupKind::Cyclic;
  g->prime = p;
  g->cyclic_order = ipow(p, e);
  return g;
}

PGroupExprPtr PGroupExpr::direct(long p, std::vector<PGroupExprPtr> factors) {
  if (factors.empty()) throw PreconditionError("direct product needs a factor");
  for (const auto& f : factors)
    if (f->prime != p) throw PreconditionError("direct factors must share the prime");
  auto g = std::make_shared<PGroupExpr>();
  g->kind = GroupKind::Direct;
  g->prime = p;
  g->factors = std::move(factors);
  return g;
}

PGroupExprPtr PGroupExpr::wreath(PGroupExprPtr base_group, unsigned long m) {
  if (!base_group) throw PreconditionError("wreath needs a base");
  if (m < 2 || !is_p_power(m, base_group->prime))
    throw PreconditionError("wreath modulus must be a positive power of the prime");
  auto g = std::make_shared<PGroupExpr>();
  g->kind = GroupKind::Wreath;
  g->prime = base_group->prime;
  g->base = std::move(base_group);
  g->top_modulus = m;
  return g;
}

PGroupExprPtr PGroupExpr::trunc_units(long p, int symbols, int degree, int nilpotency) {
  if (symbols < 1 || degree < 2)
    throw PreconditionError("unit group needs >= 1 symbol and degree >= 2");
  auto g = std::make_shared<PGroupExpr>();
  g->kind = GroupKind::TruncUnits;
  g->prime = p;
  g->tu_symbols = symbols;
  g->tu_degree = degree;
  g->tu_nilpotency = nilpotency;
  return g;
}

std::string PGroupExpr::print() const {
  switch (kind) {
    case GroupKind::Trivial:
      return "1";
    case GroupKind::Cyclic:
      return "C(" + std::to_string(cyclic_order) + ")";
    case GroupKind::Direct: {
      std::string s = "D(";
      for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += ',';
        s += factors[i]->print();
      }
      return s + ")";
    }
    case GroupKind::Wreath:
      return "W(" + base->print() + "," + std::to_string(top_modulus) + ")";
    case GroupKind::TruncUnits: {
      std::string s = "U(" + std::to_string(tu_symbols) + "," + std::to_string(tu_degree);
      if (tu_nilpotency) s += "," + std::to_string(tu_nilpotency);
      return s + ")";
    }
  }
  throw PreconditionError("corrupt group expression");
}

PGroupExprPtr PGroupExpr::parse(std::string_view text, long p) {
  std::string s = strip_spaces(text);
  if (s.empty()) throw ParseError("empty group expression");
  return parse_expr(s, p);
}

bool expr_equal(const PGroupExprPtr& a, const PGroupExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->prime != b->prime) return false;
  switch (a->kind) {
    case GroupKind::Trivial:
      return true;
    case GroupKind::Cyclic:
      return a->cyclic_order == b->cyclic_order;
    case GroupKind::Direct: {
      if (a->factors.size() != b->factors.size()) return false;
      for (std::size_t i = 0; i < a->factors.size(); ++i)
        if (!expr_equal(a->factors[i], b->factors[i])) return false;
      return true;
    }
    case GroupKind::Wreath:
      return a->top_modulus == b->top_modulus && expr_equal(a->base, b->base);
    case GroupKind::TruncUnits:
      return a->tu_symbols == b->tu_symbols && a->tu_degree == b->tu_degree &&
             a->tu_nilpotency == b->tu_nilpotency;
  }
  return false;
}

std::string PElement::print() const {
  switch (expr->kind) {
    case GroupKind::Trivial:
      return "1";
    case GroupKind::Cyclic:
      return std::to_string(residue);
    case GroupKind::Direct: {
      std::string s = "(";
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ',';
        s += parts[i].print();
      }
      return s + ")";
    }
    case GroupKind::Wreath: {
      std::string s = "(";
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ',';
        s += parts[i].print();
      }
      return s + ";" + std::to_string(top) + ")";
    }
    case GroupKind::TruncUnits:
      return poly.print();
  }
  throw PreconditionError("corrupt element");
}

int elem_compare(const PElement& a, const PElement& b) {
  assert(expr_equal(a.expr, b.expr));
  switch (a.expr->kind) {
    case GroupKind::Trivial:
      return 0;
    case GroupKind::Cyclic:
      return a.residue < b.residue ? -1 : a.residue > b.residue ? 1 : 0;
    case GroupKind::Direct:
    case GroupKind::Wreath: {
      for (std::size_t i = 0; i < a.parts.size(); ++i)
        if (int c = elem_compare(a.parts[i], b.parts[i])) return c;
      return a.top < b.top ? -1 : a.top > b.top ? 1 : 0;
    }
    case GroupKind::TruncUnits: {
      auto c = a.poly <=> b.poly;
      return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
  }
  return 0;
}

bool operator==(const PElement& a, const PElement& b) { return elem_compare(a, b) == 0; }
bool operator<(const PElement& a, const PElement& b) { return elem_compare(a, b) < 0; }

PElement identity(const PGroupExprPtr& expr) {
  PElement e;
  e.expr = expr;
  switch (expr->kind) {
    case GroupKind::Trivial:
    case GroupKind::Cyclic:
      break;
    case GroupKind::Direct:
      for (const auto& f : expr->factors) e.parts.push_back(identity(f));
      break;
    case GroupKind::Wreath:
      e.parts.assign(expr->top_modulus, identity(expr->base));
      break;
    case GroupKind::TruncUnits:
      e.poly = TruncatedPoly::constant(expr->prime, expr->tu_symbols,
                                       expr->tu_degree, 1, expr->tu_nilpotency);
      break;
  }
  return e;
}

PElement elem_mul(const PElement& a, const PElement& b) {
  assert(expr_equal(a.expr, b.expr));
  PElement r;
  r.expr = a.expr;
  switch (a.expr->kind) {
    case GroupKind::Trivial:
      break;
    case GroupKind::Cyclic:
      r.residue = (a.residue + b.residue) % a.expr->cyclic_order;
      break;
    case GroupKind::Direct:
      r.parts.reserve(a.parts.size());
      for (std::size_t i = 0; i < a.parts.size(); ++i)
        r.parts.push_back(elem_mul(a.parts[i], b.parts[i]));
      break;
    case GroupKind::Wreath: {
      unsigned long m = a.expr->top_modulus;
      r.parts.reserve(m);
      for (unsigned long i = 0; i < m; ++i)
        r.parts.push_back(elem_mul(a.parts[i], b.parts[(i + a.top) % m]));
      r.top = (a.top + b.top) % m;
      break;
    }
    case GroupKind::TruncUnits:
      r.poly = a.poly * b.poly;
      break;
  }
  return r;
}

PElement elem_inverse(const PElement& a) {
  PElement r;
  r.expr = a.expr;
  switch (a.expr->kind) {
    case GroupKind::Trivial:
      break;
    case GroupKind::Cyclic:
      r.residue = (a.expr->cyclic_order - a.residue) % a.expr->cyclic_order;
      break;
    case GroupKind::Direct:
      r.parts.reserve(a.parts.size());
      for (const auto& p : a.parts) r.parts.push_back(elem_inverse(p));
      break;
    case GroupKind::Wreath: {
      unsigned long m = a.expr->top_modulus;
      r.top = (m - a.top) % m;
      r.parts.reserve(m);
      for (unsigned long j = 0; j < m; ++j)
        r.parts.push_back(elem_inverse(a.parts[(j + m - a.top) % m]));
      break;
    }
    case GroupKind::TruncUnits:
      r.poly = a.poly.inverse();
      break;
  }
  return r;
}

PElement elem_pow(const PElement& a, long e) {
  if (e < 0) return elem_pow(elem_inverse(a), -e);
  PElement acc = identity(a.expr);
  PElement sq = a;
  while (e > 0) {
    if (e & 1) acc = elem_mul(acc, sq);
    e >>= 1;
    if (e > 0) sq = elem_mul(sq, sq);
  }
  return acc;
}

PElement elem_conjugate(const PElement& a, const PElement& s) {
  return elem_mul(elem_mul(s, a), elem_inverse(s));
}

bool elem_is_identity(const PElement& a) {
  switch (a.expr->kind) {
    case GroupKind::Trivial:
      return true;
    case GroupKind::Cyclic:
      return a.residue == 0;
    case GroupKind::Direct:
      for (const auto& p : a.parts)
        if (!elem_is_identity(p)) return false;
      return true;
    case GroupKind::Wreath:
      if (a.top != 0) return false;
      for (const auto& p : a.parts)
        if (!elem_is_identity(p)) return false;
      return true;
    case GroupKind::TruncUnits:
      return a.poly.is_one();
  }
  return false;
}

unsigned long elem_order(const PElement& a) {
  long p = a.expr->prime;
  PElement b = a;
  int t = 0;
  while (!elem_is_identity(b)) {
    b = elem_pow(b, p);
    if (++t > 62) throw CapExceeded("element order is not a small prime power");
  }
  return ipow(p, t);
}

PElement parse_element(std::string_view text, const PGroupExprPtr& expr) {
  std::string stripped = strip_spaces(text);
  std::string_view s = stripped;
  std::function<PElement(std::string_view, const PGroupExprPtr&)> go =
      [&](std::string_view v, const PGroupExprPtr& e) -> PElement {
    PElement out;
    out.expr = e;
    switch (e->kind) {
      case GroupKind::Trivial:
        if (v != "1") throw ParseError("trivial group element must be 1");
        return out;
      case GroupKind::Cyclic: {
        bool neg = !v.empty() && v[0] == '-';
        unsigned long n = parse_ulong(neg ? v.substr(1) : v) % e->cyclic_order;
        out.residue = neg ? (e->cyclic_order - n) % e->cyclic_order : n;
        return out;
      }
      case GroupKind::Direct: {
        if (v.size() < 2 || v.front() != '(' || v.back() != ')')
          throw ParseError("direct product element needs (...)");
        auto items = split_top(v.substr(1, v.size() - 2), ',');
        if (items.size() != e->factors.size())
          throw ParseError("direct product arity mismatch");
        for (std::size_t i = 0; i < items.size(); ++i)
          out.parts.push_back(go(items[i], e->factors[i]));
        return out;
      }
      case GroupKind::Wreath: {
        if (v.size() < 2 || v.front() != '(' || v.back() != ')')
          throw ParseError("wreath element needs (...;top)");
        auto halves = split_top(v.substr(1, v.size() - 2), ';');
        if (halves.size() != 2) throw ParseError("wreath element needs one ';'");
        auto items = split_top(halves[0], ',');
        if (items.size() != e->top_modulus)
          throw ParseError("wreath coordinate count mismatch");
        for (auto it : items) out.parts.push_back(go(it, e->base));
        out.top = parse_ulong(halves[1]) % e->top_modulus;
        return out;
      }
      case GroupKind::TruncUnits:
        out.poly = TruncatedPoly::parse(v, e->prime, e->tu_symbols, e->tu_degree,
                                        e->tu_nilpotency);
        if (out.poly.constant_term() != 1)
          throw ParseError("unit group element must have constant term 1");
        return out;
    }
    throw ParseError("corrupt group expression");
  };
  return go(s, expr);
}

PElement PHom::apply(const Word& w) const {
  std::vector<std::optional<PElement>> inv_cache(images.size());
  PElement acc = identity(target);
  for (const Letter& l : w.letters()) {
    if (l.gen < 0 || l.gen >= static_cast<int>(images.size()))
      throw PreconditionError("word letter outside the hom domain");
    if (l.sign > 0) {
      acc = elem_mul(acc, images[l.gen]);
    } else {
      if (!inv_cache[l.gen]) inv_cache[l.gen] = elem_inverse(images[l.gen]);
      acc = elem_mul(acc, *inv_cache[l.gen]);
    }
  }
  return acc;
}

PHom direct_combine(const std::vector<PHom>& homs) {
  if (homs.empty()) throw PreconditionError("direct_combine needs at least one map");
  for (const auto& h : homs) {
    if (!(h.domain == homs[0].domain))
      throw PreconditionError("direct_combine domains differ");
    if (h.images.size() != static_cast<std::size_t>(h.domain.rank()))
      throw PreconditionError("hom image count mismatch");
  }
  std::vector<PGroupExprPtr> targets;
  for (const auto& h : homs) targets.push_back(h.target);
  PHom out;
  out.domain = homs[0].domain;
  out.target = PGroupExpr::direct(homs[0].target->prime, std::move(targets));
  for (int g = 0; g < out.domain.rank(); ++g) {
    PElement img;
    img.expr = out.target;
    for (const auto& h : homs) img.parts.push_back(h.images[g]);
    out.images.push_back(std::move(img));
  }
  return out;
}

std::set<PElement> enumerate_image(const PHom& hom, std::size_t cap) {
  std::set<PElement> seen;
  std::deque<PElement> frontier;
  PElement id = identity(hom.target);
  seen.insert(id);
  frontier.push_back(id);
  while (!frontier.empty()) {
    PElement cur = std::move(frontier.front());
    frontier.pop_front();
    for (const PElement& g : hom.images) {
      PElement nxt = elem_mul(cur, g);
      if (seen.insert(nxt).second) {
        if (seen.size() > cap)
          throw CapExceeded("image enumeration exceeded cap " + std::to_string(cap));
        frontier.push_back(std::move(nxt));
      }
    }
  }
  return seen;
}

std::optional<PElement> find_conjugator_finite(const std::set<PElement>& elems,
                                               const PElement& g,
                                               const PElement& h) {
  for (const PElement& s : elems)
    if (elem_conjugate(g, s) == h) return s;
  return std::nullopt;
}

PHom induced_wreath(const ExponentHom& mu, const PGroupExprPtr& base_target,
                    const std::function<PElement(const Word&)>& kernel_eval) {
  mu.check();
  unsigned long m = mu.modulus;
  if (!is_p_power(m, base_target->prime))
    throw PreconditionError("quotient modulus must be a power of the target prime");
  PHom phi;
  phi.domain = mu.domain;
  phi.target = PGroupExpr::wreath(base_target, m);
  for (int t = 0; t < mu.domain.rank(); ++t) {
    PElement img;
    img.expr = phi.target;
    img.top = static_cast<unsigned long>(mu.values[t]) % m;
    img.parts.reserve(m);
    for (unsigned long i = 0; i < m; ++i) {
      // d(t,i) = x^i t x^{-j}, j the transversal exponent of coset i + mu(t);
      // always in Ker mu.
      long j = static_cast<long>((i + static_cast<unsigned long>(mu.values[t])) % m);
      Word d = pow(Word::generator(mu.designated), static_cast<long>(i)) *
               Word::generator(t) * pow(Word::generator(mu.designated), -j);
      PElement val = kernel_eval(d);
      if (!expr_equal(val.expr, base_target))
        throw PreconditionError("kernel evaluation landed outside the base group");
      img.parts.push_back(std::move(val));
    }
    phi.images.push_back(std::move(img));
  }
  return phi;
}

ConjugatePowerReport check_conjugate_power_divisibility(const PElement& omega,
                                                        const PElement& xi,
                                                        int e, long range) {
  ConjugatePowerReport rep;
  long p = omega.expr->prime;
  for (int r = 0; r <= e; ++r) {
    PElement a = elem_pow(omega, static_cast<long>(ipow(p, r)));
    PElement b = elem_conjugate(a, xi);
    PElement comm = elem_mul(elem_mul(elem_inverse(a), elem_inverse(b)), elem_mul(a, b));
    if (elem_is_identity(comm)) {
      rep.hypotheses_ok = false;
      rep.failed_r = r;
      return rep;
    }
  }
  long n = static_cast<long>(elem_order(omega));
  std::vector<PElement> pow_tab, conj_tab;
  pow_tab.reserve(n);
  pow_tab.push_back(identity(omega.expr));
  for (long k = 1; k < n; ++k) pow_tab.push_back(elem_mul(pow_tab.back(), omega));
  conj_tab.reserve(n);
  for (long k = 0; k < n; ++k) conj_tab.push_back(elem_conjugate(pow_tab[k], xi));
  long pe1 = static_cast<long>(ipow(p, e + 1));
  for (long a = -range; a <= range; ++a)
    for (long b = -range; b <= range; ++b) {
      if (pow_tab[((a % n) + n) % n] == conj_tab[((b % n) + n) % n]) {
        rep.solutions.emplace_back(a, b);
        if (a % pe1 != 0 || b % pe1 != 0) {
          rep.divisibility_ok = false;
          rep.bad_a = a;
          rep.bad_b = b;
          return rep;
        }
      }
    }
  return rep;
}

}  // namespace respk
