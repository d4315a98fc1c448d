#include "respk/filtration.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace respk {

namespace {

void verify_table(const TableGroup& g) {
  int n = g.order;
  if (n < 1 || n > 64) throw PreconditionError("table group order must be in 1..64");
  if (static_cast<int>(g.table.size()) != n * n) {
    throw PreconditionError("multiplication table has the wrong size");
  }
  for (int a = 0; a < n; ++a) {
    if (g.mul(0, a) != a || g.mul(a, 0) != a) {
      throw PreconditionError("element 0 is not an identity");
    }
    if (g.mul(a, g.inv[static_cast<std::size_t>(a)]) != 0 ||
        g.mul(g.inv[static_cast<std::size_t>(a)], a) != 0) {
      throw PreconditionError("inverse table is wrong");
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) {
          throw PreconditionError("multiplication is not associative");
        }
      }
    }
  }
}

void fill_inverses(TableGroup& g) {
  g.inv.assign(static_cast<std::size_t>(g.order), -1);
  for (int a = 0; a < g.order; ++a) {
    for (int b = 0; b < g.order; ++b) {
      if (g.mul(a, b) == 0) g.inv[static_cast<std::size_t>(a)] = b;
    }
  }
}

int elem_pow_table(const TableGroup& g, int a, long e) {
  int r = 0;
  long n = e >= 0 ? e : -e;
  int base = e >= 0 ? a : g.inv[static_cast<std::size_t>(a)];
  for (long i = 0; i < n; ++i) r = g.mul(r, base);
  return r;
}

int table_order_of(const TableGroup& g, int a) {
  int r = a, n = 1;
  while (r != 0) {
    r = g.mul(r, a);
    ++n;
  }
  return n;
}

int commutator_table(const TableGroup& g, int a, int b) {
  return g.mul(g.mul(g.inv[static_cast<std::size_t>(a)],
                     g.inv[static_cast<std::size_t>(b)]),
               g.mul(a, b));
}

}  // namespace

Mask full_mask(const TableGroup& g) {
  return g.order == 64 ? ~Mask{0} : (Mask{1} << g.order) - 1;
}

bool mask_subset(Mask inner, Mask outer) { return (inner & ~outer) == 0; }

Mask subgroup_closure(const TableGroup& g, Mask seed) {
  Mask cur = seed | 1;
  bool grew = true;
  while (grew) {
    grew = false;
    Mask next = cur;
    for (int a = 0; a < g.order; ++a) {
      if (!(cur >> a & 1)) continue;
      next |= Mask{1} << g.inv[static_cast<std::size_t>(a)];
      for (int b = 0; b < g.order; ++b) {
        if (cur >> b & 1) next |= Mask{1} << g.mul(a, b);
      }
    }
    if (next != cur) {
      cur = next;
      grew = true;
    }
  }
  return cur;
}

TableGroup cyclic_table(int n) {
  if (n < 1 || n > 64) throw PreconditionError("cyclic order must be in 1..64");
  TableGroup g;
  g.order = n;
  g.name = "c" + std::to_string(n);
  g.table.resize(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      g.table[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
    }
  }
  fill_inverses(g);
  if (n > 1) g.generators = {1};
  verify_table(g);
  return g;
}

TableGroup dihedral_table(int n) {
  if (n < 1 || 2 * n > 64) throw PreconditionError("dihedral parameter out of range");
  TableGroup g;
  g.order = 2 * n;
  g.name = "d" + std::to_string(2 * n);
  g.table.resize(static_cast<std::size_t>(g.order) * g.order);
  // index e*n + a encodes s^e r^a; s r^a s = r^-a
  auto idx = [n](int e, int a) { return e * n + ((a % n + n) % n); };
  for (int e1 = 0; e1 < 2; ++e1) {
    for (int a1 = 0; a1 < n; ++a1) {
      for (int e2 = 0; e2 < 2; ++e2) {
        for (int a2 = 0; a2 < n; ++a2) {
          int a = a2 + (e2 ? -a1 : a1);
          g.table[static_cast<std::size_t>(idx(e1, a1)) * g.order +
                  idx(e2, a2)] = idx((e1 + e2) % 2, a);
        }
      }
    }
  }
  fill_inverses(g);
  g.generators = n > 1 ? std::vector<int>{1, n} : std::vector<int>{n};
  verify_table(g);
  return g;
}

TableGroup quaternion_table() {
  TableGroup g;
  g.order = 8;
  g.name = "q8";
  // index 2u + s encodes (-1)^s e_u with e_0=1, e_1=i, e_2=j, e_3=k
  static const int unit[4][4] = {
      {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int sign[4][4] = {
      {0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  // sign[1][2]=0 (ij=k), sign[2][1]=1 (ji=-k), etc.
  g.table.resize(64);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      int ua = a / 2, sa = a % 2, ub = b / 2, sb = b % 2;
      int u = unit[ua][ub];
      int s = (sa + sb + sign[ua][ub]) % 2;
      g.table[static_cast<std::size_t>(a) * 8 + b] = 2 * u + s;
    }
  }
  fill_inverses(g);
  g.generators = {2, 4};  // i and j
  verify_table(g);
  return g;
}

TableGroup elementary_abelian_table(long p, int k) {
  if (!is_prime(p)) throw PreconditionError("p must be prime");
  long n = 1;
  for (int i = 0; i < k; ++i) n *= p;
  if (k < 1 || n > 64) throw PreconditionError("elementary abelian order out of range");
  TableGroup g;
  g.order = static_cast<int>(n);
  g.name = "e" + std::to_string(p) + "_" + std::to_string(k);
  g.table.resize(static_cast<std::size_t>(n) * n);
  auto add = [&](int a, int b) {
    int r = 0, m = 1;
    for (int i = 0; i < k; ++i) {
      int da = a % static_cast<int>(p), db = b % static_cast<int>(p);
      r += ((da + db) % static_cast<int>(p)) * m;
      a /= static_cast<int>(p);
      b /= static_cast<int>(p);
      m *= static_cast<int>(p);
    }
    return r;
  };
  for (int a = 0; a < g.order; ++a) {
    for (int b = 0; b < g.order; ++b) {
      g.table[static_cast<std::size_t>(a) * g.order + b] = add(a, b);
    }
  }
  fill_inverses(g);
  int m = 1;
  for (int i = 0; i < k; ++i) {
    g.generators.push_back(m);
    m *= static_cast<int>(p);
  }
  verify_table(g);
  return g;
}

TableGroup direct_table(const TableGroup& a, const TableGroup& b) {
  long n = static_cast<long>(a.order) * b.order;
  if (n > 64) throw PreconditionError("direct product order exceeds 64");
  TableGroup g;
  g.order = static_cast<int>(n);
  g.name = a.name + "x" + b.name;
  g.table.resize(static_cast<std::size_t>(n) * n);
  auto idx = [&](int x, int y) { return x * b.order + y; };
  for (int x1 = 0; x1 < a.order; ++x1) {
    for (int y1 = 0; y1 < b.order; ++y1) {
      for (int x2 = 0; x2 < a.order; ++x2) {
        for (int y2 = 0; y2 < b.order; ++y2) {
          g.table[static_cast<std::size_t>(idx(x1, y1)) * g.order +
                  idx(x2, y2)] = idx(a.mul(x1, x2), b.mul(y1, y2));
        }
      }
    }
  }
  fill_inverses(g);
  for (int x : a.generators) g.generators.push_back(idx(x, 0));
  for (int y : b.generators) g.generators.push_back(idx(0, y));
  verify_table(g);
  return g;
}

TableGroup symmetric3_table() {
  TableGroup g = dihedral_table(3);
  g.name = "s3";
  return g;
}

TableGroup table_group_by_name(const std::string& name) {
  auto split = name.find('x');
  if (split != std::string::npos) {
    return direct_table(table_group_by_name(name.substr(0, split)),
                        table_group_by_name(name.substr(split + 1)));
  }
  if (name == "q8") return quaternion_table();
  if (name == "s3") return symmetric3_table();
  if (name == "v4") return elementary_abelian_table(2, 2);
  if (name.size() > 1 && name[0] == 'c') {
    return cyclic_table(std::stoi(name.substr(1)));
  }
  if (name.size() > 1 && name[0] == 'd') {
    int ord = std::stoi(name.substr(1));
    if (ord % 2 != 0) throw PreconditionError("dihedral order must be even");
    return dihedral_table(ord / 2);
  }
  if (name.size() > 2 && name[0] == 'e') {
    auto us = name.find('_');
    if (us != std::string::npos) {
      return elementary_abelian_table(std::stol(name.substr(1, us - 1)),
                                      std::stoi(name.substr(us + 1)));
    }
  }
  throw ParseError("unknown group name: " + name);
}

Mask SeriesChain::term(int n) const {
  if (n < 1) throw PreconditionError("series index starts at 1");
  std::size_t i = static_cast<std::size_t>(n - 1);
  return i < terms.size() ? terms[i] : terms.back();
}

SeriesChain lower_p_series(const TableGroup& g, long p) {
  SeriesChain s;
  s.terms.push_back(full_mask(g));
  for (;;) {
    Mask cur = s.terms.back();
    Mask seed = 1;
    for (int a = 0; a < g.order; ++a) {
      if (!(cur >> a & 1)) continue;
      seed |= Mask{1} << elem_pow_table(g, a, p);
      for (int x = 0; x < g.order; ++x) {
        seed |= Mask{1} << commutator_table(g, x, a);
      }
    }
    Mask next = subgroup_closure(g, seed);
    if (next == cur) break;
    s.terms.push_back(next);
  }
  return s;
}

bool check_lemma21(const TableGroup& g, long p, int bound) {
  SeriesChain s = lower_p_series(g, p);
  for (int m = 1; m <= bound; ++m) {
    for (int n = 1; m + n <= bound; ++n) {
      Mask seed = 1;
      for (int a = 0; a < g.order; ++a) {
        if (!(s.term(m) >> a & 1)) continue;
        for (int b = 0; b < g.order; ++b) {
          if (!(s.term(n) >> b & 1)) continue;
          seed |= Mask{1} << commutator_table(g, a, b);
        }
      }
      if (!mask_subset(subgroup_closure(g, seed), s.term(m + n))) return false;
    }
  }
  return true;
}

namespace {

// Express every element as a product of generators, by breadth-first search.
std::vector<std::vector<int>> generator_words(const TableGroup& g) {
  std::vector<std::vector<int>> words(static_cast<std::size_t>(g.order));
  std::vector<bool> seen(static_cast<std::size_t>(g.order), false);
  seen[0] = true;
  std::vector<int> frontier = {0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int a : frontier) {
      for (std::size_t gi = 0; gi < g.generators.size(); ++gi) {
        int b = g.mul(a, g.generators[gi]);
        if (!seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = true;
          words[static_cast<std::size_t>(b)] = words[static_cast<std::size_t>(a)];
          words[static_cast<std::size_t>(b)].push_back(static_cast<int>(gi));
          next.push_back(b);
        }
      }
    }
    frontier = std::move(next);
  }
  for (bool b : seen) {
    if (!b) throw PreconditionError("generators do not generate the group");
  }
  return words;
}

bool is_automorphism(const TableGroup& g, const std::vector<int>& m) {
  std::vector<bool> hit(static_cast<std::size_t>(g.order), false);
  for (int x : m) {
    if (hit[static_cast<std::size_t>(x)]) return false;
    hit[static_cast<std::size_t>(x)] = true;
  }
  for (int a = 0; a < g.order; ++a) {
    for (int b = 0; b < g.order; ++b) {
      if (m[static_cast<std::size_t>(g.mul(a, b))] !=
          g.mul(m[static_cast<std::size_t>(a)], m[static_cast<std::size_t>(b)])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

AutGroup aut_group(const TableGroup& g, std::size_t order_cap,
                   std::size_t candidate_cap) {
  if (static_cast<std::size_t>(g.order) > order_cap) {
    throw CapExceeded("group order above the automorphism cap");
  }
  AutGroup out;
  if (g.generators.empty()) {
    out.maps.push_back({0});
    return out;
  }
  std::vector<std::vector<int>> words = generator_words(g);
  // candidate images must preserve element order
  std::vector<std::vector<int>> cands;
  for (int gen : g.generators) {
    std::vector<int> c;
    int od = table_order_of(g, gen);
    for (int x = 0; x < g.order; ++x) {
      if (table_order_of(g, x) == od) c.push_back(x);
    }
    cands.push_back(c);
  }
  std::size_t tried = 0;
  std::vector<std::size_t> pick(cands.size(), 0);
  for (;;) {
    if (++tried > candidate_cap) {
      throw CapExceeded("automorphism candidate budget exhausted");
    }
    std::vector<int> m(static_cast<std::size_t>(g.order));
    for (int x = 0; x < g.order; ++x) {
      int v = 0;
      for (int gi : words[static_cast<std::size_t>(x)]) {
        v = g.mul(v, cands[static_cast<std::size_t>(gi)]
                          [pick[static_cast<std::size_t>(gi)]]);
      }
      m[static_cast<std::size_t>(x)] = v;
    }
    if (is_automorphism(g, m)) out.maps.push_back(m);
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == cands[i].size()) {
      pick[i] = 0;
      ++i;
    }
    if (i == pick.size()) break;
  }
  return out;
}

std::vector<std::vector<int>> inn_subgroup(const TableGroup& g) {
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.order; ++s) {
    std::vector<int> m(static_cast<std::size_t>(g.order));
    for (int x = 0; x < g.order; ++x) {
      m[static_cast<std::size_t>(x)] =
          g.mul(g.mul(s, x), g.inv[static_cast<std::size_t>(s)]);
    }
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

namespace {

// alpha moves every element within its coset of the mask subgroup
bool trivial_mod(const TableGroup& g, const std::vector<int>& alpha, Mask sub) {
  for (int x = 0; x < g.order; ++x) {
    int d = g.mul(g.inv[static_cast<std::size_t>(x)],
                  alpha[static_cast<std::size_t>(x)]);
    if (!(sub >> d & 1)) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<int>> ip_kernel(const TableGroup& g, long p,
                                        const AutGroup& auts) {
  Mask lam2 = lower_p_series(g, p).term(2);
  std::vector<std::vector<int>> out;
  for (const auto& m : auts.maps) {
    if (trivial_mod(g, m, lam2)) out.push_back(m);
  }
  return out;
}

namespace {

std::vector<int> compose_maps(const std::vector<int>& second,
                              const std::vector<int>& first) {
  std::vector<int> r(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    r[i] = second[static_cast<std::size_t>(first[i])];
  }
  return r;
}

bool is_p_power(std::size_t v, long p) {
  while (v % static_cast<std::size_t>(p) == 0) v /= static_cast<std::size_t>(p);
  return v == 1;
}

void report_line(ClaimReport& r, const std::string& key, const std::string& val) {
  r.lines.push_back(key + ": " + val);
}

void report_check(ClaimReport& r, const std::string& key, bool pass) {
  report_line(r, key, pass ? "pass" : "FAIL");
  if (!pass) r.ok = false;
}

}  // namespace

ClaimReport an_filtration_checks(const TableGroup& g, long p, int depth,
                                 std::size_t order_cap,
                                 std::size_t candidate_cap) {
  ClaimReport rep;
  report_line(rep, "group", g.name);
  report_line(rep, "p", std::to_string(p));
  SeriesChain s = lower_p_series(g, p);
  AutGroup auts = aut_group(g, order_cap, candidate_cap);
  report_line(rep, "aut_order", std::to_string(auts.maps.size()));

  // A_n = kernel of the action on G/lambda_{n+1}
  std::vector<std::vector<std::vector<int>>> A(
      static_cast<std::size_t>(depth + 2));
  for (int n = 1; n <= depth + 1; ++n) {
    for (const auto& m : auts.maps) {
      if (trivial_mod(g, m, s.term(n + 1))) {
        A[static_cast<std::size_t>(n)].push_back(m);
      }
    }
    if (n <= depth) {
      report_line(rep, "A" + std::to_string(n),
                  std::to_string(A[static_cast<std::size_t>(n)].size()));
    }
  }
  report_check(rep, "A1_equals_ip_kernel",
               A[1].size() == ip_kernel(g, p, auts).size());

  // Claim 1: A_n trivial on lambda_k/lambda_{n+k}
  bool c1 = true;
  for (int n = 1; n <= depth; ++n) {
    for (int k = 1; k <= depth; ++k) {
      for (const auto& m : A[static_cast<std::size_t>(n)]) {
        for (int x = 0; x < g.order; ++x) {
          if (!(s.term(k) >> x & 1)) continue;
          int d = g.mul(g.inv[static_cast<std::size_t>(x)],
                        m[static_cast<std::size_t>(x)]);
          if (!(s.term(n + k) >> d & 1)) c1 = false;
        }
      }
    }
  }
  report_check(rep, "claim1_action_trivial", c1);

  // Claim 3: [g] -> [g^-1 a(g)] well-defined on G/lambda_{n+1}
  bool c3 = true;
  for (int n = 1; n <= depth; ++n) {
    Mask ln1 = s.term(n + 1), ln2 = s.term(n + 2);
    for (const auto& m : A[static_cast<std::size_t>(n)]) {
      for (int x = 0; x < g.order; ++x) {
        for (int y = 0; y < g.order; ++y) {
          int d = g.mul(g.inv[static_cast<std::size_t>(x)], y);
          if (!(ln1 >> d & 1)) continue;  // same coset only
          int ux = g.mul(g.inv[static_cast<std::size_t>(x)],
                         m[static_cast<std::size_t>(x)]);
          int uy = g.mul(g.inv[static_cast<std::size_t>(y)],
                         m[static_cast<std::size_t>(y)]);
          int diff = g.mul(g.inv[static_cast<std::size_t>(ux)], uy);
          if (!(ln2 >> diff & 1)) c3 = false;
        }
      }
    }
  }
  report_check(rep, "claim3_u_well_defined", c3);

  // Claim 4: u is a homomorphism and Ker u = A_{n+1}
  bool hom = true, ker = true;
  for (int n = 1; n <= depth; ++n) {
    Mask ln2 = s.term(n + 2);
    const auto& An = A[static_cast<std::size_t>(n)];
    for (const auto& a1 : An) {
      for (const auto& a2 : An) {
        std::vector<int> comp = compose_maps(a2, a1);
        for (int x = 0; x < g.order; ++x) {
          int uc = g.mul(g.inv[static_cast<std::size_t>(x)],
                         comp[static_cast<std::size_t>(x)]);
          int u1 = g.mul(g.inv[static_cast<std::size_t>(x)],
                         a1[static_cast<std::size_t>(x)]);
          int u2 = g.mul(g.inv[static_cast<std::size_t>(x)],
                         a2[static_cast<std::size_t>(x)]);
          int d = g.mul(g.inv[static_cast<std::size_t>(g.mul(u2, u1))], uc);
          if (!(ln2 >> d & 1)) hom = false;
        }
      }
    }
    // kernel of u versus A_{n+1}
    for (const auto& m : An) {
      bool in_ker = true;
      for (int x = 0; x < g.order; ++x) {
        int u = g.mul(g.inv[static_cast<std::size_t>(x)],
                      m[static_cast<std::size_t>(x)]);
        if (!(ln2 >> u & 1)) in_ker = false;
      }
      bool in_next =
          std::find(A[static_cast<std::size_t>(n + 1)].begin(),
                    A[static_cast<std::size_t>(n + 1)].end(),
                    m) != A[static_cast<std::size_t>(n + 1)].end();
      if (in_ker != in_next) ker = false;
    }
  }
  report_check(rep, "claim4_u_homomorphism", hom);
  report_check(rep, "claim4_kernel_is_next", ker);

  // p-filtration: each index a p power
  bool pf = true;
  for (int n = 1; n <= depth; ++n) {
    std::size_t a = A[static_cast<std::size_t>(n)].size();
    std::size_t b = A[static_cast<std::size_t>(n + 1)].size();
    if (a % b != 0 || !is_p_power(a / b, p)) pf = false;
  }
  report_check(rep, "indices_p_powers", pf);
  return rep;
}

ClaimReport bn_filtration_checks(const TableGroup& g, long p, int depth,
                                 std::size_t order_cap,
                                 std::size_t candidate_cap) {
  ClaimReport rep;
  report_line(rep, "group", g.name);
  report_line(rep, "p", std::to_string(p));
  SeriesChain s = lower_p_series(g, p);
  AutGroup auts = aut_group(g, order_cap, candidate_cap);
  std::vector<std::vector<int>> ip = ip_kernel(g, p, auts);
  std::vector<std::vector<int>> inn = inn_subgroup(g);
  report_line(rep, "ip_order", std::to_string(ip.size()));
  report_line(rep, "inn_order", std::to_string(inn.size()));

  // conjugacy class id of [x] in G/lambda_{n+1}
  auto class_ids = [&](Mask sub) {
    std::vector<int> cls(static_cast<std::size_t>(g.order), -1);
    int next = 0;
    for (int x = 0; x < g.order; ++x) {
      if (cls[static_cast<std::size_t>(x)] != -1) continue;
      // orbit of the coset of x under conjugation, saturated by the subgroup
      std::vector<int> stack = {x};
      cls[static_cast<std::size_t>(x)] = next;
      while (!stack.empty()) {
        int y = stack.back();
        stack.pop_back();
        for (int t = 0; t < g.order; ++t) {
          int c = g.mul(g.mul(t, y), g.inv[static_cast<std::size_t>(t)]);
          for (int d = 0; d < g.order; ++d) {
            if (!(sub >> d & 1)) continue;
            int z = g.mul(c, d);
            if (cls[static_cast<std::size_t>(z)] == -1) {
              cls[static_cast<std::size_t>(z)] = next;
              stack.push_back(z);
            }
          }
        }
      }
      ++next;
    }
    return cls;
  };

  std::vector<std::vector<int>> inter = ip;
  bool inn_inside = true;
  for (int n = 1; n <= depth; ++n) {
    std::vector<int> cls = class_ids(s.term(n + 1));
    std::vector<std::vector<int>> bn;
    for (const auto& m : ip) {
      bool fixes = true;
      for (int x = 0; x < g.order; ++x) {
        if (cls[static_cast<std::size_t>(x)] !=
            cls[static_cast<std::size_t>(m[static_cast<std::size_t>(x)])]) {
          fixes = false;
          break;
        }
      }
      if (fixes) bn.push_back(m);
    }
    report_line(rep, "B" + std::to_string(n), std::to_string(bn.size()));
    for (const auto& m : inn) {
      if (std::find(bn.begin(), bn.end(), m) == bn.end()) inn_inside = false;
    }
    std::vector<std::vector<int>> keep;
    for (const auto& m : inter) {
      if (std::find(bn.begin(), bn.end(), m) != bn.end()) keep.push_back(m);
    }
    inter = std::move(keep);
    // the quotient I_p/B_n embeds in a p-group image
    if (!ip.empty() && (ip.size() % bn.size() != 0 ||
                        !is_p_power(ip.size() / bn.size(), p))) {
      rep.ok = false;
    }
  }
  report_check(rep, "inn_inside_every_Bn", inn_inside);
  report_line(rep, "intersection_order", std::to_string(inter.size()));
  bool matches = inter.size() == inn.size();
  for (const auto& m : inn) {
    if (std::find(inter.begin(), inter.end(), m) == inter.end()) matches = false;
  }
  report_line(rep, "intersection_equals_inn", matches ? "yes" : "no");
  return rep;
}

bool graded_bracket_check(const TableGroup& g, long p) {
  SeriesChain s = lower_p_series(g, p);
  int len = static_cast<int>(s.terms.size());
  for (int m = 1; m <= len; ++m) {
    for (int n = 1; m + n <= len; ++n) {
      Mask lm = s.term(m), ln = s.term(n);
      Mask out = s.term(m + n + 1);
      // well-defined: the bracket coset depends only on the input cosets
      std::map<std::pair<int, int>, int> seen;
      for (int a = 0; a < g.order; ++a) {
        if (!(lm >> a & 1)) continue;
        for (int b = 0; b < g.order; ++b) {
          if (!(ln >> b & 1)) continue;
          int br = commutator_table(g, a, b);
          // canonical coset keys: smallest element of each coset
          auto coset_key = [&](int x, Mask sub) {
            int best = x;
            for (int d = 0; d < g.order; ++d) {
              if (sub >> d & 1) best = std::min(best, g.mul(x, d));
            }
            return best;
          };
          int key_a = coset_key(a, s.term(m + 1));
          int key_b = coset_key(b, s.term(n + 1));
          int val = coset_key(br, out);
          auto [it, fresh] = seen.try_emplace({key_a, key_b}, val);
          if (!fresh && it->second != val) return false;
        }
      }
      // bilinearity in the first slot (the second follows by symmetry of the
      // check over all pairs, but scan it too)
      for (int a1 = 0; a1 < g.order; ++a1) {
        if (!(lm >> a1 & 1)) continue;
        for (int a2 = 0; a2 < g.order; ++a2) {
          if (!(lm >> a2 & 1)) continue;
          for (int b = 0; b < g.order; ++b) {
            if (!(ln >> b & 1)) continue;
            int lhs = commutator_table(g, g.mul(a1, a2), b);
            int rhs = g.mul(commutator_table(g, a1, b),
                            commutator_table(g, a2, b));
            int d = g.mul(g.inv[static_cast<std::size_t>(lhs)], rhs);
            if (!(out >> d & 1)) return false;
          }
        }
      }
      for (int a = 0; a < g.order; ++a) {
        if (!(lm >> a & 1)) continue;
        for (int b1 = 0; b1 < g.order; ++b1) {
          if (!(ln >> b1 & 1)) continue;
          for (int b2 = 0; b2 < g.order; ++b2) {
            if (!(ln >> b2 & 1)) continue;
            int lhs = commutator_table(g, a, g.mul(b1, b2));
            int rhs = g.mul(commutator_table(g, a, b1),
                            commutator_table(g, a, b2));
            int d = g.mul(g.inv[static_cast<std::size_t>(lhs)], rhs);
            if (!(out >> d & 1)) return false;
          }
        }
      }
    }
  }
  return true;
}

}  // namespace respk
