#include "respk/schreier.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>

#include "respk/config.hpp"

namespace respk {

long ExponentHom::apply(const Word& w) const {
  long m = static_cast<long>(modulus);
  long acc = 0;
  for (const Letter& l : w.letters()) {
    acc += l.sign * values.at(l.gen);
    acc %= m;
  }
  return acc < 0 ? acc + m : acc;
}

void ExponentHom::check() const {
  if (modulus < 2) throw PreconditionError("exponent hom: modulus < 2");
  if (static_cast<int>(values.size()) != domain.rank())
    throw PreconditionError("exponent hom: value count != rank");
  if (designated < 0 || designated >= domain.rank())
    throw PreconditionError("exponent hom: bad designated generator");
  if (values[designated] % static_cast<long>(modulus) != 1)
    throw PreconditionError("exponent hom: designated generator must map to 1");
  for (long v : values)
    if (v < 0 || v >= static_cast<long>(modulus))
      throw PreconditionError("exponent hom: value out of range");
}

int SchreierBasis::symbol_of(int gen, long coset) const {
  if (gen == mu.designated) return -1;
  for (std::size_t s = 0; s < symbol_meta.size(); ++s)
    if (symbol_meta[s].first == gen && symbol_meta[s].second == coset &&
        static_cast<int>(s) != x_symbol)
      return static_cast<int>(s);
  return -1;
}

SchreierBasis schreier_generators(const ExponentHom& mu) {
  mu.check();
  SchreierBasis b;
  b.mu = mu;
  const long m = static_cast<long>(mu.modulus);
  const Word x = Word::generator(mu.designated);
  std::vector<std::string> names;
  for (int gen = 0; gen < mu.domain.rank(); ++gen) {
    if (gen == mu.designated) continue;
    for (long i = 0; i < m; ++i) {
      names.push_back("d(" + mu.domain.names[gen] + "," + std::to_string(i) + ")");
      long target = (i + mu.values[gen]) % m;
      b.defining_words.push_back(pow(x, i) * Word::generator(gen) * pow(x, -target));
      b.symbol_meta.emplace_back(gen, i);
    }
  }
  b.x_symbol = static_cast<int>(names.size());
  names.push_back("X");
  b.defining_words.push_back(pow(x, m));
  b.symbol_meta.emplace_back(mu.designated, m);
  b.symbol_alphabet = Alphabet::named(std::move(names));
  return b;
}

Word rewrite_in_basis(const SchreierBasis& basis, const Word& f, long i) {
  const ExponentHom& mu = basis.mu;
  const long m = static_cast<long>(mu.modulus);
  if (mu.apply(f) != 0)
    throw PreconditionError("rewrite_in_basis: word not in the kernel");
  long coset = ((i % m) + m) % m;
  const long start = coset;
  std::vector<Letter> out;
  for (const Letter& l : f.letters()) {
    if (l.gen == mu.designated) {
      if (l.sign > 0) {
        if (coset == m - 1) out.push_back({basis.x_symbol, 1});
        coset = (coset + 1) % m;
      } else {
        if (coset == 0) out.push_back({basis.x_symbol, -1});
        coset = (coset - 1 + m) % m;
      }
    } else {
      const long v = mu.values[l.gen];
      if (l.sign > 0) {
        out.push_back({basis.symbol_of(l.gen, coset), 1});
        coset = (coset + v) % m;
      } else {
        long c2 = (coset - v % m + m) % m;
        out.push_back({basis.symbol_of(l.gen, c2), -1});
        coset = c2;
      }
    }
  }
  if (coset != start)
    throw PreconditionError("rewrite_in_basis: coset walk did not close");
  return Word::reduce(out);
}

long choose_decreasing_coset(const SchreierBasis& basis, const Word& g) {
  const long m = static_cast<long>(basis.mu.modulus);
  for (long i = 0; i < m; ++i)
    if (rewrite_in_basis(basis, g, i).length() < g.length()) return i;
  throw PreconditionError(
      "choose_decreasing_coset: no strict decrease (designated generator absent?)");
}

Word evaluate_symbol_word(const Word& symbol_word, const std::vector<Word>& defining_words) {
  Word r;
  for (const Letter& l : symbol_word.letters()) {
    const Word& d = defining_words.at(l.gen);
    r = r * (l.sign > 0 ? d : d.inverse());
  }
  return r;
}

// --- Stallings folding ---

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

SubgroupShape fold_subgroup(int ambient_rank, const std::vector<Word>& words) {
  // Wedge of loops at vertex 0, one path per word; edges directed along the
  // positive generator.
  std::vector<std::array<int, 3>> edges;  // {from, gen, to}
  int n_vertices = 1;
  for (const Word& w : words) {
    int cur = 0;
    const auto& ls = w.letters();
    for (std::size_t k = 0; k < ls.size(); ++k) {
      int next = (k + 1 == ls.size()) ? 0 : n_vertices++;
      if (ls[k].sign > 0)
        edges.push_back({cur, ls[k].gen, next});
      else
        edges.push_back({next, ls[k].gen, cur});
      cur = next;
    }
  }
  UnionFind uf(n_vertices);
  bool changed = true;
  while (changed) {
    changed = false;
    // Normalize then look for two equal-labelled edges sharing an endpoint.
    std::map<std::pair<int, int>, int> by_source, by_target;
    for (auto& e : edges) {
      e[0] = uf.find(e[0]);
      e[2] = uf.find(e[2]);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& e : edges) {
      auto [it, fresh] = by_source.try_emplace({e[0], e[1]}, e[2]);
      if (!fresh && it->second != e[2]) {
        uf.unite(it->second, e[2]);
        changed = true;
        break;
      }
      auto [it2, fresh2] = by_target.try_emplace({e[2], e[1]}, e[0]);
      if (!fresh2 && it2->second != e[0]) {
        uf.unite(it2->second, e[0]);
        changed = true;
        break;
      }
    }
  }
  std::set<int> vertices;
  for (const auto& e : edges) {
    vertices.insert(e[0]);
    vertices.insert(e[2]);
  }
  vertices.insert(uf.find(0));
  SubgroupShape shape;
  shape.rank = edges.size() - vertices.size() + 1;
  // Complete cover <=> every vertex has one outgoing and one incoming edge per
  // generator.
  bool complete = true;
  std::set<std::pair<int, int>> outs, ins;
  for (const auto& e : edges) {
    outs.insert({e[0], e[1]});
    ins.insert({e[2], e[1]});
  }
  for (int v : vertices)
    for (int g = 0; g < ambient_rank && complete; ++g)
      complete = outs.count({v, g}) && ins.count({v, g});
  if (complete) shape.index = vertices.size();
  return shape;
}

std::size_t nielsen_surviving_count(std::vector<Word> words) {
  std::erase_if(words, [](const Word& w) { return w.empty(); });
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < words.size() && !changed; ++j) {
      for (std::size_t i = 0; i < words.size() && !changed; ++i) {
        if (i == j) continue;
        for (const Word& c :
             {words[i] * words[j], words[i].inverse() * words[j],
              words[j] * words[i], words[j] * words[i].inverse()}) {
          if (c.length() < words[j].length()) {
            words[j] = c;
            if (words[j].empty()) words.erase(words.begin() + j);
            changed = true;
            break;
          }
        }
      }
    }
  }
  return words.size();
}

// --- conjugating-cover basis ---

namespace {

int t_symbol_index(long p2, int gen, long level) {
  // Layout: z-levels (p^2 - 1 of them), X, b0, then t(gen, level) blocks.
  return static_cast<int>(p2 + 1 + (gen - 2) * p2 + level);
}

}  // namespace

CoverBasis cover_basis(int genus_n, long p, const Word& g) {
  if (genus_n < 1) throw PreconditionError("cover_basis: genus factor must be >= 1");
  if (!is_prime(p)) throw PreconditionError("cover_basis: prime required");
  const int rank = 2 * genus_n;
  const long p2 = p * p;
  CoverBasis cb;
  cb.mu.domain = Alphabet::surface(genus_n);
  cb.mu.values.assign(rank, 0);
  cb.mu.values[0] = 1;
  cb.mu.modulus = static_cast<unsigned long>(p2);
  cb.mu.designated = 0;
  cb.mu.check();
  for (const Letter& l : g.letters())
    if (l.gen >= rank) throw PreconditionError("cover_basis: word outside alphabet");

  cb.l0 = cb.mu.apply(g);
  cb.k0 = (cb.l0 == 1) ? 2 : 1;
  const Word x1 = Word::generator(0);
  const Word gamma = surface_relator(genus_n);

  std::vector<std::string> names;
  cb.z_symbol_by_level.assign(p2, -1);
  for (long l = 0; l < p2; ++l) {
    if (l == cb.k0) continue;
    cb.z_symbol_by_level[l] = static_cast<int>(names.size());
    names.push_back("z" + std::to_string(l));
    cb.defining_words.push_back(pow(x1, l) * gamma * pow(x1, -l));
  }
  const int x_sym = static_cast<int>(names.size());
  names.push_back("X");
  cb.defining_words.push_back(pow(x1, p2));
  const int b0_sym = static_cast<int>(names.size());
  names.push_back("b0");
  cb.defining_words.push_back(Word::generator(1));
  for (int gen = 2; gen < rank; ++gen) {
    for (long l = 0; l < p2; ++l) {
      if (static_cast<int>(names.size()) != t_symbol_index(p2, gen, l))
        throw PreconditionError("cover_basis: internal symbol layout error");
      names.push_back("t(" + cb.mu.domain.names[gen] + "," + std::to_string(l) + ")");
      cb.defining_words.push_back(pow(x1, l) * Word::generator(gen) * pow(x1, -l));
    }
  }
  cb.symbol_alphabet = Alphabet::named(names);
  cb.gamma_symbol = cb.z_symbol_by_level[0];
  cb.z_l0_symbol = cb.z_symbol_by_level[cb.l0];

  const std::size_t expected = static_cast<std::size_t>(p2) * (2 * genus_n - 1) + 1;
  if (cb.defining_words.size() != expected)
    throw PreconditionError("cover_basis: wrong symbol count");
  for (const Word& d : cb.defining_words)
    if (cb.mu.apply(d) != 0)
      throw PreconditionError("cover_basis: symbol outside the kernel");

  // c_l = conjugated tail commutator chain over the t-symbols (empty if n=1).
  auto c_word = [&](long l) {
    Word c;
    for (int j = 1; j < genus_n; ++j) {
      Word a = Word::generator(t_symbol_index(p2, 2 * j, l));
      Word b = Word::generator(t_symbol_index(p2, 2 * j + 1, l));
      c = c * commutator(a, b);
    }
    return c;
  };
  auto z_word = [&](long l) { return Word::generator(cb.z_symbol_by_level.at(l)); };

  // Triangular recovery of b_l = x1^l y1 x1^{-l} over the cover symbols:
  //   z_l = b_{l-1}^{-1} b_l c_l          (1 <= l <= p^2-1)
  //   z_0 = X^{-1} b_{p^2-1}^{-1} X b_0 c_0
  cb.b_over_cover.assign(p2, Word{});
  cb.b_over_cover[0] = Word::generator(b0_sym);
  if (cb.k0 == 2)
    cb.b_over_cover[1] = cb.b_over_cover[0] * z_word(1) * c_word(1).inverse();
  const Word X = Word::generator(x_sym);
  cb.b_over_cover[p2 - 1] =
      X * cb.b_over_cover[0] * c_word(0) * z_word(0).inverse() * X.inverse();
  for (long l = p2 - 1; l >= cb.k0 + 1; --l)
    cb.b_over_cover[l - 1] = cb.b_over_cover[l] * c_word(l) * z_word(l).inverse();

  for (long l = 0; l < p2; ++l) {
    Word expect = pow(x1, l) * Word::generator(1) * pow(x1, -l);
    if (evaluate_symbol_word(cb.b_over_cover[l], cb.defining_words) != expect)
      throw PreconditionError("cover_basis: b-recovery failed at level " +
                              std::to_string(l));
  }

  // Rank / index certification.
  SubgroupShape shape = fold_subgroup(rank, cb.defining_words);
  if (shape.rank != expected || !shape.index || *shape.index != static_cast<std::size_t>(p2))
    throw PreconditionError("cover_basis: folding rejects the basis");
  if (nielsen_surviving_count(cb.defining_words) != expected)
    throw PreconditionError("cover_basis: Nielsen reduction collapses the basis");

  // Standard machinery for rewriting arbitrary kernel elements.
  cb.standard_basis = schreier_generators(cb.mu);

  Word w_f = g * pow(x1, -cb.l0);
  cb.w_over_basis = rewrite_over_cover(cb, w_f);

  // g gamma g^{-1} = w z_{l0} w^{-1} with w evaluated back into the surface group.
  Word w_eval = evaluate_symbol_word(cb.w_over_basis, cb.defining_words);
  Word zl0 = cb.defining_words.at(cb.z_l0_symbol);
  if (conjugated(gamma, g) != conjugated(zl0, w_eval))
    throw PreconditionError("cover_basis: conjugation identity failed");
  return cb;
}

Word rewrite_over_cover(const CoverBasis& cb, const Word& f) {
  Word y = rewrite_in_basis(cb.standard_basis, f, 0);
  const long p2 = static_cast<long>(cb.mu.modulus);
  std::vector<Letter> out;
  auto append = [&out](const Word& w, int sign) {
    const Word v = sign > 0 ? w : w.inverse();
    out.insert(out.end(), v.letters().begin(), v.letters().end());
  };
  for (const Letter& l : y.letters()) {
    if (l.gen == cb.standard_basis.x_symbol) {
      append(Word::generator(cb.symbol_alphabet.index_of("X")), l.sign);
      continue;
    }
    auto [gen, coset] = cb.standard_basis.symbol_meta.at(l.gen);
    if (gen == 1) {
      append(cb.b_over_cover.at(coset), l.sign);
    } else {
      append(Word::generator(t_symbol_index(p2, gen, coset)), l.sign);
    }
  }
  Word z = Word::reduce(out);
  if (evaluate_symbol_word(z, cb.defining_words) != f)
    throw PreconditionError("rewrite_over_cover: round-trip failed");
  return z;
}

}  // namespace respk
