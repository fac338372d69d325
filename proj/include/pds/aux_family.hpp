#pragma once
// ============================================================================
// Shifted / rescaled polynomial families.
//
// For each polynomial h_i in a root system and each d >= 1 there is a unique
// r_i^d in (-d, 0] congruent to the chosen roots modulo every p^v_p(d); the
// derived polynomial h_i^d(x) = h_i(r_i^d + d x) / lambda_i(d) has integer
// coefficients. This module computes and caches those objects, checks the
// content bound, and verifies the avoidance-inheritance identity used when a
// set is restricted to an arithmetic progression.
// ============================================================================

#include <gmpxx.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "pds/certify.hpp"
#include "pds/int_poly.hpp"

namespace pds {

struct AuxEntry {
    mpz_class d;
    mpz_class r;       // in (-d, 0], d | h_i(r)
    mpz_class lambda;  // lambda_i(d)
    IntPoly aux;       // h_i^d
    mpz_class lead;    // leading coefficient of aux (b_i^d)
};

class AuxiliaryFamily {
  public:
    explicit AuxiliaryFamily(std::shared_ptr<RootSystem> sys);

    const RootSystem& system() const { return *sys_; }
    size_t size() const { return sys_->size(); }

    // r_i^d: the unique representative of the root residues in (-d, 0].
    mpz_class shift(size_t i, const mpz_class& d);
    mpz_class lambda_value(size_t i, const mpz_class& d) { return sys_->lambda_i(i, d); }
    mpz_class lambda_total(const mpz_class& d) { return sys_->lambda_total(d); }
    mpz_class lambda_tilde(size_t i, const mpz_class& d) { return sys_->lambda_tilde(i, d); }

    // Cached {r, lambda_i(d), h_i^d}; integrality of h_i^d is enforced and a
    // failure indicates a root-system bug (NonIntegralDivision propagates).
    AuxEntry entry(size_t i, const mpz_class& d);
    IntPoly aux_polynomial(size_t i, const mpz_class& d) { return entry(i, d).aux; }

    struct ContentBound {
        mpz_class lhs;  // cont(h_i^d)
        mpz_class rhs;  // ceil(|disc h_i|^{(k-1)/2}) * cont(h_i)
        bool ok;
    };
    ContentBound check_content_bound(size_t i, const mpz_class& d);

    // All cached entries, sorted by (i, d), for serialization.
    std::vector<std::pair<size_t, AuxEntry>> snapshot() const;

  private:
    std::shared_ptr<RootSystem> sys_;
    mutable std::mutex mu_;
    std::map<std::pair<size_t, mpz_class>, AuxEntry> cache_;
};

// ----------------------------------------------------------------------------
// Inheritance: if a - a' is a sum of nonzero h_i^{lt_i(q) d_i} values, then
// lambda(q) (a - a') is the corresponding sum of h_i^{d_i} values at shifted
// indices. The checker recomputes everything exactly.
// ----------------------------------------------------------------------------

struct InheritanceWitness {
    mpz_class q;                  // progression step parameter, q >= 1
    std::vector<mpz_class> d;     // current shifts d_i (>= 1)
    std::vector<mpz_class> n;     // indices n_i (>= 1)
    mpz_class a_minus_aprime;     // claimed difference, nonzero
};

struct InheritanceResult {
    std::vector<mpz_class> s;     // s_i with r^{lt_i(q) d_i} = r^{d_i} + d_i s_i
    mpz_class lambda_q;
    mpz_class lhs;                // sum_i h_i^{d_i}(s_i + lt_i(q) n_i)
    mpz_class rhs;                // lambda(q) (a - a')
    bool ok;                      // lhs == rhs, all per-term identities exact
    std::vector<mpz_class> fiber_points;  // d_i x + r_i^{d_i} at the shifted index
};

// Prime-input mode additionally requires each input index to lie in the
// prime fiber (lt_i(q) d_i n_i + r^{lt_i(q) d_i} prime) and re-verifies the
// shifted index lands in the same fiber (it is the same integer).
InheritanceResult inheritance_pushforward(AuxiliaryFamily& fam, const InheritanceWitness& w);

// Count |{n >= 1 : 0 < sgn(lead) aux(n) < x}  symmetric-difference  [1, T]|
// with T = floor((x/|lead|)^{1/deg}): the leading-term-dominance discrepancy.
long symbig_discrepancy(const IntPoly& aux, const mpz_class& x);

}  // namespace pds
