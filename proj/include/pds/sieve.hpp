#pragma once
// ============================================================================
// Prime infrastructure: cached Eratosthenes sieve, deterministic 64-bit
// primality, factorization (trial division + Pollard rho), and the usual
// multiplicative functions. Desk scale: sieve cap 1e8.
// ============================================================================

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace pds {

// All primes <= n, ascending (n <= 1e8, ResourceError beyond). Backed by a
// shared cached sieve; the returned copy contains exactly the primes <= n.
std::vector<uint32_t> primes_upto(uint64_t n);

bool is_prime_u64(uint64_t n);        // deterministic Miller-Rabin
bool is_prime_mpz(const mpz_class& n);

struct PrimePower {
    uint64_t p;
    int e;
};

// Ascending prime powers with product n; n >= 1 (empty for n = 1).
std::vector<PrimePower> factorize_u64(uint64_t n);
// Same for mpz; ResourceError if a large composite cofactor resists.
std::vector<std::pair<mpz_class, int>> factorize_mpz(const mpz_class& n);

uint64_t euler_phi_u64(uint64_t n);
int mobius_u64(uint64_t n);       // 0 if squarefull
int omega_u64(uint64_t n);        // distinct prime count
uint64_t tau_u64(uint64_t n);     // divisor count
std::vector<uint64_t> divisors_u64(uint64_t n);  // sorted ascending

// Product of all primes <= y (exact integer).
mpz_class primorial_upto(uint64_t y);

}  // namespace pds
