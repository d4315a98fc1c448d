#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "respk/config.hpp"

namespace respk {

// Finite group as a full multiplication table. Elements are 0..order-1 with 0
// the identity; order is capped at 64 so subsets fit in one 64-bit mask.
// Construction verifies the identity, inverse, and associativity laws.
struct TableGroup {
  int order = 1;
  std::vector<int> table;  // table[a*order + b] = a*b
  std::vector<int> inv;
  std::vector<int> generators;
  std::string name;

  int mul(int a, int b) const { return table[a * order + b]; }
};

TableGroup cyclic_table(int n);
TableGroup dihedral_table(int n);  // order 2n, n >= 1
TableGroup quaternion_table();     // Q8
TableGroup elementary_abelian_table(long p, int k);
TableGroup direct_table(const TableGroup& a, const TableGroup& b);
TableGroup symmetric3_table();
// c<n>, d<n> (dihedral of order 2n), q8, s3, v4, e<p>_<k>, and products
// joined by 'x' (e.g. "d8xc2").
TableGroup table_group_by_name(const std::string& name);

using Mask = std::uint64_t;  // bit i = element i

Mask full_mask(const TableGroup& g);
bool mask_subset(Mask inner, Mask outer);
// Smallest subgroup containing the seeded elements.
Mask subgroup_closure(const TableGroup& g, Mask seed);

// Descending chain lambda_1 = G, lambda_{n+1} = [G, lambda_n]^p, listed up to
// the first repetition. For a p-group the last term is {1}.
struct SeriesChain {
  std::vector<Mask> terms;

  // lambda_n with the stabilized tail extended indefinitely.
  Mask term(int n) const;
};

SeriesChain lower_p_series(const TableGroup& g, long p);

// [lambda_m, lambda_n] contained in lambda_{m+n} for all m + n <= bound.
bool check_lemma21(const TableGroup& g, long p, int bound);

// Every automorphism, each stored as a permutation of the elements.
struct AutGroup {
  std::vector<std::vector<int>> maps;
};

AutGroup aut_group(const TableGroup& g, std::size_t order_cap = 32,
                   std::size_t candidate_cap = 5'000'000);
std::vector<std::vector<int>> inn_subgroup(const TableGroup& g);
// Automorphisms acting trivially on G/lambda_2, the mod-p homology.
std::vector<std::vector<int>> ip_kernel(const TableGroup& g, long p,
                                        const AutGroup& auts);

// Structured check report: key: value lines plus an overall verdict.
struct ClaimReport {
  std::vector<std::string> lines;
  bool ok = true;
};

// A_n = automorphisms trivial on G/lambda_{n+1}. Verifies, for n <= depth:
// the action of A_n on lambda_k/lambda_{n+k} is trivial, the coset map
// [g] -> [g^-1 a(g)] is well-defined, u is a homomorphism with kernel
// A_{n+1}, and the index of A_{n+1} in A_n is a p power.
ClaimReport an_filtration_checks(const TableGroup& g, long p, int depth,
                                 std::size_t order_cap = 32,
                                 std::size_t candidate_cap = 5'000'000);

// B_n = elements of I_p(G) fixing every conjugacy class of G/lambda_{n+1}.
// Verifies Inn(G) inside B_n for n <= depth and reports the stabilized
// intersection against Inn(G).
ClaimReport bn_filtration_checks(const TableGroup& g, long p, int depth,
                                 std::size_t order_cap = 32,
                                 std::size_t candidate_cap = 5'000'000);

// The commutator-induced bracket on consecutive lambda quotients is
// well-defined and bilinear; checked over all representatives.
bool graded_bracket_check(const TableGroup& g, long p);

}  // namespace respk
