#include "respk/truncpoly.hpp"

#include <algorithm>

#include "respk/config.hpp"

namespace respk {

namespace {

long mod_reduce(long v, long p) {
  long r = v % p;
  return r < 0 ? r + p : r;
}

long mod_inverse(long v, long p) {
  // p prime, v not divisible by p.
  long r = mod_reduce(v, p);
  if (r == 0) throw PreconditionError("mod_inverse: zero residue");
  long result = 1, base = r, e = p - 2;
  while (e > 0) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return result;
}

bool has_run_at_least(const std::vector<std::uint8_t>& m, int q) {
  if (q <= 0) return false;
  int run = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    run = (i > 0 && m[i] == m[i - 1]) ? run + 1 : 1;
    if (run >= q) return true;
  }
  return false;
}

}  // namespace

TruncatedPoly::TruncatedPoly(long prime, int symbols, int degree_bound, int nilpotency)
    : prime_(prime), symbols_(symbols), degree_(degree_bound), nil_(nilpotency) {
  if (!is_prime(prime)) throw PreconditionError("truncated poly: prime required");
  if (degree_bound < 1) throw PreconditionError("truncated poly: degree bound < 1");
  if (symbols < 0) throw PreconditionError("truncated poly: negative symbol count");
}

TruncatedPoly TruncatedPoly::constant(long prime, int symbols, int degree_bound,
                                      long value, int nilpotency) {
  TruncatedPoly r(prime, symbols, degree_bound, nilpotency);
  r.add_term({}, value);
  return r;
}

TruncatedPoly TruncatedPoly::one_plus_symbol(long prime, int symbols, int degree_bound,
                                             int symbol, int nilpotency) {
  if (symbol < 0 || symbol >= symbols)
    throw PreconditionError("truncated poly: symbol out of range");
  TruncatedPoly r = constant(prime, symbols, degree_bound, 1, nilpotency);
  r.add_term({static_cast<std::uint8_t>(symbol)}, 1);
  return r;
}

bool TruncatedPoly::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first.empty() &&
         terms_.begin()->second == 1;
}

long TruncatedPoly::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? 0 : it->second;
}

int TruncatedPoly::min_nonconstant_degree() const {
  int best = -1;
  for (const auto& [m, c] : terms_) {
    if (m.empty()) continue;
    int d = static_cast<int>(m.size());
    if (best < 0 || d < best) best = d;
  }
  return best;
}

bool TruncatedPoly::monomial_alive(const Monomial& m) const {
  if (static_cast<int>(m.size()) >= degree_ && !m.empty()) return false;
  if (nil_ > 0 && has_run_at_least(m, nil_)) return false;
  return true;
}

void TruncatedPoly::add_term(const Monomial& m, long coeff) {
  if (static_cast<int>(m.size()) >= degree_ && !m.empty()) return;
  if (nil_ > 0 && has_run_at_least(m, nil_)) return;
  long c = mod_reduce(coeff, prime_);
  if (c == 0) {
    // still normalize an existing entry
    auto it = terms_.find(m);
    if (it != terms_.end() && it->second == 0) terms_.erase(it);
    return;
  }
  long& slot = terms_[m];
  slot = mod_reduce(slot + c, prime_);
  if (slot == 0) terms_.erase(m);
}

bool TruncatedPoly::same_shape(const TruncatedPoly& o) const {
  return prime_ == o.prime_ && symbols_ == o.symbols_ && degree_ == o.degree_ &&
         nil_ == o.nil_;
}

TruncatedPoly TruncatedPoly::operator+(const TruncatedPoly& o) const {
  if (!same_shape(o)) throw TypeMismatch("truncated poly: shape mismatch in +");
  TruncatedPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

TruncatedPoly TruncatedPoly::operator-(const TruncatedPoly& o) const {
  if (!same_shape(o)) throw TypeMismatch("truncated poly: shape mismatch in -");
  TruncatedPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

TruncatedPoly TruncatedPoly::operator*(const TruncatedPoly& o) const {
  if (!same_shape(o)) throw TypeMismatch("truncated poly: shape mismatch in *");
  TruncatedPoly r(prime_, symbols_, degree_, nil_);
  Monomial cat;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      if (static_cast<int>(ma.size() + mb.size()) >= degree_ &&
          !(ma.empty() && mb.empty()))
        continue;
      cat = ma;
      cat.insert(cat.end(), mb.begin(), mb.end());
      r.add_term(cat, ca * cb);
    }
  }
  return r;
}

TruncatedPoly TruncatedPoly::times_unit_generator(int symbol, int sign) const {
  if (symbol < 0 || symbol >= symbols_)
    throw PreconditionError("truncated poly: symbol out of range");
  TruncatedPoly r(prime_, symbols_, degree_, nil_);
  Monomial ext;
  for (const auto& [m, c] : terms_) {
    if (sign > 0) {
      r.add_term(m, c);
      ext = m;
      ext.push_back(static_cast<std::uint8_t>(symbol));
      r.add_term(ext, c);
    } else {
      // multiply by (1+e)^{-1} = sum_j (-e)^j
      ext = m;
      long coeff = c;
      r.add_term(ext, coeff);
      for (int j = 1; j < degree_; ++j) {
        ext.push_back(static_cast<std::uint8_t>(symbol));
        if (static_cast<int>(ext.size()) >= degree_) break;
        if (nil_ > 0 && has_run_at_least(ext, nil_)) break;
        coeff = -coeff;
        r.add_term(ext, coeff);
      }
    }
  }
  return r;
}

TruncatedPoly TruncatedPoly::inverse() const {
  long c = constant_term();
  if (mod_reduce(c, prime_) == 0)
    throw PreconditionError("truncated poly: not a unit");
  long cinv = mod_inverse(c, prime_);
  TruncatedPoly n = *this;
  n.add_term({}, -c);  // nilpotent part
  // (c + n)^{-1} = cinv * sum_j (-cinv * n)^j
  TruncatedPoly acc = constant(prime_, symbols_, degree_, 1, nil_);
  TruncatedPoly pow_term = acc;
  TruncatedPoly step(prime_, symbols_, degree_, nil_);
  for (const auto& [m, coeff] : n.terms_) step.add_term(m, -cinv * coeff);
  for (int j = 1; j < degree_; ++j) {
    pow_term = pow_term * step;
    if (pow_term.is_zero()) break;
    acc = acc + pow_term;
  }
  TruncatedPoly r(prime_, symbols_, degree_, nil_);
  for (const auto& [m, coeff] : acc.terms_) r.add_term(m, coeff * cinv);
  return r;
}

std::string TruncatedPoly::print() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Monomial, long>> ordered(terms_.begin(), terms_.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  std::string out;
  for (const auto& [m, c] : ordered) {
    if (!out.empty()) out += '+';
    if (m.empty()) {
      out += std::to_string(c);
      continue;
    }
    if (c != 1) out += std::to_string(c) + "*";
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i) out += '*';
      out += "e" + std::to_string(static_cast<int>(m[i]));
    }
  }
  return out;
}

TruncatedPoly TruncatedPoly::parse(std::string_view text, long prime, int symbols,
                                   int degree_bound, int nilpotency) {
  TruncatedPoly r(prime, symbols, degree_bound, nilpotency);
  std::string s;
  for (char ch : text)
    if (ch != ' ') s += ch;
  if (s.empty()) throw ParseError("empty polynomial literal");
  if (s == "0") return r;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t plus = s.find('+', pos);
    std::string term = s.substr(pos, plus == std::string::npos ? plus : plus - pos);
    if (term.empty()) throw ParseError("empty term in polynomial: " + s);
    long coeff = 1;
    Monomial m;
    std::size_t tp = 0;
    bool first_part = true;
    while (tp <= term.size()) {
      std::size_t star = term.find('*', tp);
      std::string part = term.substr(tp, star == std::string::npos ? star : star - tp);
      if (part.empty()) throw ParseError("empty factor in polynomial term: " + term);
      if (std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        if (!first_part) throw ParseError("misplaced coefficient in term: " + term);
        coeff = std::stol(part);
      } else {
        if (part[0] != 'e') throw ParseError("bad symbol in term: " + part);
        int idx;
        try {
          std::size_t used = 0;
          idx = std::stoi(part.substr(1), &used);
          if (used != part.size() - 1) throw std::invalid_argument(part);
        } catch (const std::exception&) {
          throw ParseError("bad symbol in term: " + part);
        }
        if (idx < 0 || idx >= symbols) throw ParseError("symbol out of range: " + part);
        m.push_back(static_cast<std::uint8_t>(idx));
      }
      first_part = false;
      if (star == std::string::npos) break;
      tp = star + 1;
    }
    r.add_term(m, coeff);
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  return r;
}

}  // namespace respk
