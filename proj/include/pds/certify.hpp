#pragma once
// ============================================================================
// Root certification machinery.
//
// A residue class s mod p^k is a *certified* root class of h when it provably
// contains a p-adic integer root: every class we emit carries a witness level
// L = 2*v_p(Res(u,u')) + 1 for the squarefree factor u it came from, at which
// u(s) = 0 mod p^L forces v_p(u(s)) > 2*v_p(u'(s)) and Newton iteration
// converges inside the class.
//
// "Complete" certificates come from rational roots and cover every modulus at
// once; "up to P" certificates exhaustively scan primes p <= P; negative
// certificates carry a modulus q = p^j with no (unit) root, verified by an
// exhaustive residue tree search.
// ============================================================================

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "pds/int_poly.hpp"

namespace pds {

enum class InputMode { Integer, Prime };

const char* to_string(InputMode m);

struct PadicRootClass {
    uint64_t p = 0;
    int precision = 0;       // class is modulo p^precision
    mpz_class modulus;       // p^precision
    mpz_class residue;       // in [0, modulus)
    int multiplicity = 0;    // multiplicity of the underlying root of h
    bool liftable = false;   // strong-Hensel certified
    int witness_level = 0;   // DFS depth used for the certificate
};

// All residue classes mod p^precision containing a certified p-adic root of
// h, sorted by (residue, multiplicity). p must be prime, precision >= 1.
std::vector<PadicRootClass> padic_roots(const IntPoly& h, uint64_t p, int precision);
// Same, restricted to unit classes (residue not divisible by p).
std::vector<PadicRootClass> padic_unit_roots(const IntPoly& h, uint64_t p, int precision);

enum class CertifyStatus {
    IntersectiveComplete,
    IntersectiveUpTo,
    NotIntersective,
    PIntersectiveComplete,
    PIntersectiveUpTo,
    NotPIntersective,
};

const char* to_string(CertifyStatus s);

struct PrimeWitness {
    uint64_t p = 0;
    mpz_class residue;  // selected certified class
    int precision = 0;
    int multiplicity = 0;
};

struct Certificate {
    InputMode mode = InputMode::Integer;
    CertifyStatus status = CertifyStatus::NotIntersective;
    uint64_t p_max = 0;  // scan bound for the UpTo statuses
    // Complete route: rational roots establishing every modulus at once.
    std::vector<mpq_class> rational_roots_used;
    // Negative route: q = p^j with no (unit) root of h mod q.
    uint64_t witness_prime = 0;
    mpz_class witness_modulus;
    // UpTo route: one certified class per scanned prime.
    std::vector<PrimeWitness> witnesses;
    std::string detail;

    bool positive() const {
        return status == CertifyStatus::IntersectiveComplete ||
               status == CertifyStatus::IntersectiveUpTo ||
               status == CertifyStatus::PIntersectiveComplete ||
               status == CertifyStatus::PIntersectiveUpTo;
    }
    bool complete() const {
        return status == CertifyStatus::IntersectiveComplete ||
               status == CertifyStatus::PIntersectiveComplete;
    }
};

// Certify that h has a root (unit root in Prime mode) modulo every positive
// integer, or find a modulus where it has none. Scans primes up to p_max
// when no rational-root argument settles the question outright.
Certificate certify_intersective(const IntPoly& h, uint64_t p_max, InputMode mode);

// Exhaustively verify a negative witness: true iff h has no root (Prime
// mode: no unit root) modulo q. Intended for third-party re-checks.
bool verify_no_root_mod(const IntPoly& h, const mpz_class& q, InputMode mode);

// ----------------------------------------------------------------------------
// Root systems: a tuple of polynomials with one selected p-adic root each.
//
// Selection policy, applied independently per (polynomial, prime):
//   1. exact rational roots forced by the mode take precedence
//      (Integer: 0 when h(0)=0; Prime: +1 then -1 when h(+-1)=0);
//   2. otherwise the certified (unit) class with the smallest nonnegative
//      residue at working precision p^(2*v_p(disc h) + 3).
// The same underlying p-adic root is then used at every precision, so the
// residues are compatible across precisions by construction.
// ----------------------------------------------------------------------------

class RootSystem {
  public:
    RootSystem(std::vector<IntPoly> polys, InputMode mode);

    size_t size() const { return polys_.size(); }
    const IntPoly& poly(size_t i) const { return polys_.at(i); }
    const std::vector<IntPoly>& polys() const { return polys_; }
    InputMode mode() const { return mode_; }

    // Residue of the selected root of poly i modulo p^k, in [0, p^k).
    // Throws UncertifiedPrime if poly i has no admissible root at p.
    mpz_class root_residue(size_t i, uint64_t p, int k) const;
    // Multiplicity m_i(p) of the selected root.
    int root_multiplicity(size_t i, uint64_t p) const;

    // lambda_i(d) = prod p^(m_i(p) * a) over d = prod p^a; completely
    // multiplicative by construction. lambda_total composes all of them
    // (exponents multiply), lambda_tilde omits polynomial i.
    mpz_class lambda_i(size_t i, const mpz_class& d) const;
    mpz_class lambda_total(const mpz_class& d) const;
    mpz_class lambda_tilde(size_t i, const mpz_class& d) const;

    static std::string selection_policy() {
        return "forced rational root (0 / +1 / -1) else smallest nonnegative residue "
               "at working precision p^(2 v_p(disc) + 3)";
    }

  private:
    struct Selected {
        bool rational = false;
        mpz_class rational_value;  // 0 or +-1
        PadicRootClass cls;        // stored precision grows on demand
        int multiplicity = 0;
    };
    Selected select(size_t i, uint64_t p) const;  // copied out under the lock

    std::vector<IntPoly> polys_;
    InputMode mode_;
    std::vector<mpz_class> disc_;
    mutable std::vector<std::map<uint64_t, Selected>> cache_;
    mutable std::mutex mu_;
};

// ----------------------------------------------------------------------------
// System profile: slot classes and the derived exponents.
// ----------------------------------------------------------------------------

enum class SlotClass { General, Monomial, Vanishing };

const char* to_string(SlotClass c);

struct SystemProfile {
    std::vector<SlotClass> classes;
    size_t l1 = 0, l2 = 0, l3 = 0;
    std::vector<int> degrees;        // k_i
    std::vector<int> sparse_counts;  // nonzero-coefficient counts r_i
    mpq_class D;        // (sum_{General} 1/k_i + l2/2 + sum_{Vanishing} 1/r_i)^-1
    mpq_class Dprime;   // (sum over all slots of 1/k_i)^-1
    mpz_class k_product;
    mpz_class K;        // 2^(10 k_product)
    mpq_class rho;      // 2^(-10 k_product)
};

// Slots 1..l1 are General, the next l2 must be nonconstant monomials, the
// last l3 must be non-monomials with h(0)=0. Computes the exponents exactly;
// throws InvalidPartition naming the offending slot.
SystemProfile compute_profile(const std::vector<IntPoly>& polys, size_t l1, size_t l2,
                              size_t l3);

}  // namespace pds
