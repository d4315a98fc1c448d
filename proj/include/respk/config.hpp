#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace respk {

// Tunable caps and defaults. All recoverable resource limits live here so
// callers can widen them; hitting a cap raises CapExceeded, never UB.
struct Config {
  long prime = 2;
  // Largest finite image enumerated exhaustively (closure element count).
  std::size_t enum_cap = 1'000'000;
  // Truncated-polynomial degree bound: default when nothing pins it, and the
  // hard cap escalation loops may reach.
  int trunc_degree_default = 8;
  int trunc_degree_cap = 24;
  // Recursion depth cap for the free-group separation recursion.
  int recursion_cap = 64;
  // Composition depth for the surface normalization automorphism list.
  int normalization_depth = 2;
  // Bounded search cap for low-syllable C-twist chains.
  int low_syllable_cap = 4096;
  // Candidate budget for brute-force automorphism search on table groups.
  std::size_t aut_candidate_cap = 5'000'000;
  std::uint64_t seed = 0x5eedbeef;

  static Config from_file(const std::string& path);
  static Config from_env();  // honours RESPK_CONFIG, else defaults
  void set(const std::string& key, const std::string& value);
};

struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionError : std::logic_error {
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

struct ParseError : std::runtime_error {
  int line = 0;
  explicit ParseError(const std::string& what, int line_no = 0)
      : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + what : what),
        line(line_no) {}
};

struct TypeMismatch : std::logic_error {
  explicit TypeMismatch(const std::string& what) : std::logic_error(what) {}
};

struct VerificationError : std::runtime_error {
  explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// p^e with overflow guard; exponents here are tiny.
inline unsigned long ipow(long p, int e) {
  unsigned long r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<unsigned long>(p);
  return r;
}

// Least power p^e strictly greater than bound (e >= min_exp).
inline unsigned long least_p_power_above(long p, long bound, int min_exp = 0) {
  unsigned long q = ipow(p, min_exp);
  while (static_cast<long>(q) <= bound) q *= static_cast<unsigned long>(p);
  return q;
}

}  // namespace respk
