#pragma once
// ============================================================================
// Forbidden-difference sets from polynomial systems, avoidance verification,
// exact and greedy maximum avoiding sets, residue-class search, and digit
// lifting constructions. Every emitted witness is re-verified.
// ============================================================================

#include <cstdint>
#include <vector>

#include "pds/aux_family.hpp"
#include "pds/certify.hpp"
#include "pds/int_poly.hpp"

namespace pds {

struct ForbiddenSet {
    long N = 0;                    // window [1, N]
    std::vector<long> D;           // sorted difference values in [1, N-1]
    std::vector<IntPoly> polys;    // provenance: the value-generating polynomials
    InputMode mode = InputMode::Integer;
    std::vector<mpz_class> shifts; // scaling parameters d_i (1 for the base system)
};

// D = { |h_1(n_1)+...+h_l(n_l)| in [1,N-1] : every term nonzero }, inputs
// n_i >= 1 in integer mode, n_i prime in prime mode. For l >= 2 every leading
// coefficient must be positive (UnsupportedSystem otherwise).
ForbiddenSet forbidden_differences(const std::vector<IntPoly>& polys, long N,
                                   InputMode mode = InputMode::Integer);

// Same, for the rescaled system h_i^{d_i}; prime mode draws n from the fiber
// { n : d_i*n + r_i prime }. (Non-const: entry lookups are memoized.)
ForbiddenSet forbidden_differences(AuxiliaryFamily& fam, long N,
                                   const std::vector<mpz_class>& shifts);

struct AvoidanceCheck {
    bool ok = true;
    long x = 0, y = 0;  // first violating pair (x > y, x - y in D) when !ok
};

// True iff (A - A) avoids D. Runs both a bitset shift scan and a direct
// double loop and requires agreement.
AvoidanceCheck verify_avoiding(const std::vector<long>& A, const ForbiddenSet& F);

struct ExtremalResult {
    long window = 0;             // ambient N (or modulus q for residue search)
    std::vector<long> witness;   // verified avoiding set
    long size = 0;
    bool optimal = false;        // exact search completed
    bool lower_bound = false;    // construction / greedy / budget-exhausted
    long long nodes = 0;         // branch-and-bound nodes explored
    double elapsed_ms = 0.0;
};

// Maximum independent set in the graph on [1,N] with edges {x, x+d}, d in D,
// by branch-and-bound with greedy seeding. Budget counts search nodes; when
// exhausted the best found is returned with optimal = false.
ExtremalResult max_avoiding_exact(const ForbiddenSet& F, long long node_budget = 50'000'000);

// First-fit ascending scan; always verified.
ExtremalResult greedy_avoiding(const ForbiddenSet& F);

// Maximum B in Z_q with (B - B) mod q avoiding the nonzero residues hit by
// h_1(n_1)+...+h_l(n_l) mod q (inputs over all of Z_q), symmetrized.
ExtremalResult residue_avoiding_search(const std::vector<IntPoly>& polys, long q);

// The forbidden residue set used above (sorted, symmetric, 0 excluded).
std::vector<long> forbidden_residues(const std::vector<IntPoly>& polys, long q);

// Base-q digit lifting into [1, q^{2k}]: block i contributes b_i + q*x_i with
// b_i from B and x_i free in [0, q). The result is accepted only if
// verify_avoiding passes against the full forbidden set in the window
// (ConstructionRejected otherwise).
ExtremalResult digit_construction(long q, const std::vector<long>& B, int k,
                                  const std::vector<IntPoly>& polys);

}  // namespace pds
