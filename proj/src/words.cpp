#include "respk/words.hpp"

#include <algorithm>
#include <set>

#include "respk/config.hpp"

namespace respk {

int Alphabet::index_of(std::string_view name) const {
  for (int i = 0; i < rank(); ++i)
    if (names[i] == name) return i;
  return -1;
}

Alphabet Alphabet::named(std::vector<std::string> names) {
  for (const auto& n : names) {
    if (n.empty()) throw PreconditionError("alphabet: empty generator name");
    if (n.find('*') != std::string::npos || n.find('^') != std::string::npos)
      throw PreconditionError("alphabet: name contains a delimiter: " + n);
  }
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j])
        throw PreconditionError("alphabet: duplicate name " + names[i]);
  Alphabet a;
  a.names = std::move(names);
  return a;
}

Alphabet Alphabet::surface(int n, bool primed) {
  std::vector<std::string> names;
  const char* tick = primed ? "'" : "";
  for (int i = 1; i <= n; ++i) {
    names.push_back("x" + std::string(tick) + std::to_string(i));
    names.push_back("y" + std::string(tick) + std::to_string(i));
  }
  return named(std::move(names));
}

Word Word::reduce(std::span<const Letter> raw) {
  Word w;
  w.letters_.reserve(raw.size());
  for (const Letter& l : raw) {
    if (!w.letters_.empty() && w.letters_.back() == l.inverse())
      w.letters_.pop_back();
    else
      w.letters_.push_back(l);
  }
  return w;
}

Word Word::generator(int gen, int sign) {
  Word w;
  w.letters_.push_back({gen, sign});
  return w;
}

Word Word::inverse() const {
  Word w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
    w.letters_.push_back(it->inverse());
  return w;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> raw = a.letters_;
  raw.insert(raw.end(), b.letters_.begin(), b.letters_.end());
  return Word::reduce(raw);
}

Word pow(const Word& w, long e) {
  if (e == 0) return Word{};
  Word base = e > 0 ? w : w.inverse();
  long n = e > 0 ? e : -e;
  Word r;
  for (long i = 0; i < n; ++i) r = r * base;
  return r;
}

Word commutator(const Word& a, const Word& b) {
  return a.inverse() * b.inverse() * a * b;
}

Word conjugated(const Word& a, const Word& f) { return f * a * f.inverse(); }

Word surface_relator(int n) {
  Word r;
  for (int i = 0; i < n; ++i)
    r = r * commutator(Word::generator(2 * i), Word::generator(2 * i + 1));
  return r;
}

std::vector<int> support(const Word& w) {
  std::set<int> s;
  for (const Letter& l : w.letters()) s.insert(l.gen);
  return {s.begin(), s.end()};
}

bool AbelianVector::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](long c) { return c == 0; });
}

AbelianVector abelianize(const Word& w, int rank) {
  AbelianVector v;
  v.coords.assign(rank, 0);
  for (const Letter& l : w.letters()) v.coords.at(l.gen) += l.sign;
  return v;
}

CyclicReduction cyclic_reduce(const Word& w) {
  std::vector<Letter> core = w.letters();
  std::vector<Letter> conj;
  while (core.size() >= 2 && core.front() == core.back().inverse()) {
    conj.push_back(core.front());
    core.erase(core.begin());
    core.pop_back();
  }
  return {Word::reduce(core), Word::reduce(conj)};
}

bool is_cyclically_reduced(const Word& w) {
  return w.length() < 2 || w.letters().front() != w.letters().back().inverse();
}

Word least_cyclic_rotation(const Word& w) {
  if (!is_cyclically_reduced(w))
    throw PreconditionError("least_cyclic_rotation: input not cyclically reduced");
  const auto& ls = w.letters();
  const int n = w.length();
  if (n <= 1) return w;
  std::vector<Letter> best = ls;
  std::vector<Letter> cand = ls;
  for (int r = 1; r < n; ++r) {
    std::rotate(cand.begin(), cand.begin() + 1, cand.end());
    if (cand < best) best = cand;
  }
  return Word::reduce(best);
}

std::optional<Word> is_conjugate_free(const Word& g, const Word& h) {
  CyclicReduction cg = cyclic_reduce(g);
  CyclicReduction ch = cyclic_reduce(h);
  if (cg.core.length() != ch.core.length()) return std::nullopt;
  if (cg.core.empty()) return cg.conjugator;  // both trivial cores
  // Find a rotation offset k with rot_k(ch.core) == cg.core, where
  // rot_k(c) = s^{-1} c s for the length-k prefix s.
  const auto& target = cg.core.letters();
  std::vector<Letter> cand = ch.core.letters();
  const int n = static_cast<int>(cand.size());
  for (int k = 0; k < n; ++k) {
    if (cand == target) {
      std::span<const Letter> prefix(ch.core.letters().data(), k);
      Word s = Word::reduce(prefix);
      // g = cg.conjugator s^{-1} ch.core s cg.conjugator^{-1}
      //   = (cg.conjugator s^{-1} ch.conjugator^{-1}) h (...)^{-1}
      Word f = cg.conjugator * s.inverse() * ch.conjugator.inverse();
      return f;
    }
    std::rotate(cand.begin(), cand.begin() + 1, cand.end());
  }
  return std::nullopt;
}

std::optional<long> power_of(const Word& w, const Word& u) {
  if (u.empty()) throw PreconditionError("power_of: trivial base");
  if (w.empty()) return 0;
  // |u^e| <= |e| * |u|; try the exponents consistent with the length.
  if (w.length() % u.length() == 0) {
    long e = w.length() / u.length();
    if (pow(u, e) == w) return e;
    if (pow(u, -e) == w) return -e;
  }
  // Non-cyclically-reduced u can hide cancellation; fall back for small cases.
  for (long e = 1; static_cast<long>(e) <= w.length(); ++e) {
    if (pow(u, e) == w) return e;
    if (pow(u, -e) == w) return -e;
    if (pow(u, e).length() > 2 * w.length() + 2 * u.length()) break;
  }
  return std::nullopt;
}

std::string print_word(const Word& w, const Alphabet& a) {
  if (w.empty()) return "1";
  std::string out;
  const auto& ls = w.letters();
  std::size_t i = 0;
  while (i < ls.size()) {
    std::size_t j = i;
    while (j < ls.size() && ls[j] == ls[i]) ++j;
    long e = static_cast<long>(j - i) * ls[i].sign;
    if (!out.empty()) out += '*';
    out += a.names.at(ls[i].gen);
    if (e != 1) out += '^' + std::to_string(e);
    i = j;
  }
  return out;
}

Word parse_word(std::string_view text, const Alphabet& a) {
  // Strip spaces for CLI friendliness; canonical output has none.
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (s.empty()) throw ParseError("empty word literal");
  if (s == "1") return Word{};
  std::vector<Letter> raw;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t star = s.find('*', pos);
    std::string tok = s.substr(pos, star == std::string::npos ? star : star - pos);
    if (tok.empty()) throw ParseError("empty factor in word: " + s);
    std::string name = tok;
    long e = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      name = tok.substr(0, caret);
      std::string es = tok.substr(caret + 1);
      try {
        std::size_t used = 0;
        e = std::stol(es, &used);
        if (used != es.size()) throw std::invalid_argument(es);
      } catch (const std::exception&) {
        throw ParseError("bad exponent in factor: " + tok);
      }
      if (e == 0) throw ParseError("zero exponent in factor: " + tok);
    }
    int gen = a.index_of(name);
    if (gen < 0) throw ParseError("unknown generator: " + name);
    int sign = e > 0 ? 1 : -1;
    for (long k = 0; k < (e > 0 ? e : -e); ++k) raw.push_back({gen, sign});
    if (star == std::string::npos) break;
    pos = star + 1;
    if (pos == s.size()) throw ParseError("trailing '*' in word: " + s);
  }
  return Word::reduce(raw);
}

}  // namespace respk
