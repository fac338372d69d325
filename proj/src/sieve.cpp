// ============================================================================
// Sieve / primality / factorization implementation.
// ============================================================================

#include "pds/sieve.hpp"

#include <algorithm>
#include <mutex>

#include "pds/errors.hpp"

namespace pds {

namespace {

constexpr uint64_t kSieveCap = 100000000;  // 1e8

std::mutex g_sieve_mutex;
std::vector<uint32_t> g_primes;  // primes <= g_sieved
uint64_t g_sieved = 0;

void sieve_to(uint64_t n) {
    std::vector<bool> comp(n + 1, false);
    g_primes.clear();
    for (uint64_t i = 2; i <= n; ++i) {
        if (!comp[i]) {
            g_primes.push_back(static_cast<uint32_t>(i));
            for (uint64_t j = i * i; j <= n; j += i) comp[j] = true;
        }
    }
    g_sieved = n;
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

uint64_t gcd_u64(uint64_t a, uint64_t b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

// Brent-style Pollard rho; n must be odd composite, not a prime power issue.
uint64_t pollard_rho(uint64_t n) {
    if (n % 2 == 0) return 2;
    for (uint64_t c = 1;; ++c) {
        uint64_t x = 2, y = 2, d = 1;
        while (d == 1) {
            x = (mulmod_u64(x, x, n) + c) % n;
            y = (mulmod_u64(y, y, n) + c) % n;
            y = (mulmod_u64(y, y, n) + c) % n;
            d = gcd_u64(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

}  // namespace

std::vector<uint32_t> primes_upto(uint64_t n) {
    if (n > kSieveCap) throw ResourceError("sieve bound exceeds cap 1e8");
    std::lock_guard<std::mutex> lk(g_sieve_mutex);
    if (n > g_sieved) sieve_to(std::max<uint64_t>(n, 1024));
    auto end = std::upper_bound(g_primes.begin(), g_primes.end(), static_cast<uint32_t>(n));
    return std::vector<uint32_t>(g_primes.begin(), end);
}

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Deterministic witness set for all n < 3.3e24.
    for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

bool is_prime_mpz(const mpz_class& n) {
    if (n < 2) return false;
    if (n.fits_ulong_p()) return is_prime_u64(n.get_ui());
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

std::vector<PrimePower> factorize_u64(uint64_t n) {
    std::vector<PrimePower> out;
    if (n < 2) return out;
    for (uint64_t p = 2; p * p <= n && p < 100000; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    // Remaining cofactor: prime, prime square, or split by rho.
    std::vector<uint64_t> stack;
    if (n > 1) stack.push_back(n);
    std::vector<uint64_t> primes_found;
    while (!stack.empty()) {
        uint64_t v = stack.back();
        stack.pop_back();
        if (is_prime_u64(v)) {
            primes_found.push_back(v);
            continue;
        }
        uint64_t d = pollard_rho(v);
        stack.push_back(d);
        stack.push_back(v / d);
    }
    std::sort(primes_found.begin(), primes_found.end());
    for (size_t i = 0; i < primes_found.size();) {
        size_t j = i;
        while (j < primes_found.size() && primes_found[j] == primes_found[i]) ++j;
        out.push_back({primes_found[i], static_cast<int>(j - i)});
        i = j;
    }
    std::sort(out.begin(), out.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
    return out;
}

std::vector<std::pair<mpz_class, int>> factorize_mpz(const mpz_class& n_in) {
    if (n_in < 1) throw DomainError("factorize_mpz requires n >= 1");
    if (n_in.fits_ulong_p()) {
        std::vector<std::pair<mpz_class, int>> out;
        for (const auto& pp : factorize_u64(n_in.get_ui()))
            out.emplace_back(mpz_class(static_cast<unsigned long>(pp.p)), pp.e);
        return out;
    }
    mpz_class n = n_in;
    std::vector<std::pair<mpz_class, int>> out;
    for (uint32_t p : primes_upto(1000000)) {
        if (n == 1) break;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            int e = 0;
            while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
                mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
                ++e;
            }
            out.emplace_back(mpz_class(p), e);
        }
    }
    if (n > 1) {
        if (n.fits_ulong_p()) {
            for (const auto& pp : factorize_u64(n.get_ui()))
                out.emplace_back(mpz_class(static_cast<unsigned long>(pp.p)), pp.e);
        } else if (is_prime_mpz(n)) {
            out.emplace_back(n, 1);
        } else {
            // Large composite cofactor: try perfect powers, then give up.
            mpz_class root;
            for (int k = 2; k <= 6; ++k) {
                if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0 && is_prime_mpz(root)) {
                    out.emplace_back(root, k);
                    n = 1;
                    break;
                }
            }
            if (n > 1) throw ResourceError("composite cofactor too large to factor");
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

uint64_t euler_phi_u64(uint64_t n) {
    if (n == 0) throw DomainError("phi(0) undefined");
    uint64_t r = n;
    for (const auto& pp : factorize_u64(n)) r -= r / pp.p;
    return r;
}

int mobius_u64(uint64_t n) {
    if (n == 0) throw DomainError("mobius(0) undefined");
    auto f = factorize_u64(n);
    for (const auto& pp : f)
        if (pp.e > 1) return 0;
    return f.size() % 2 == 0 ? 1 : -1;
}

int omega_u64(uint64_t n) { return static_cast<int>(factorize_u64(n).size()); }

uint64_t tau_u64(uint64_t n) {
    uint64_t t = 1;
    for (const auto& pp : factorize_u64(n)) t *= static_cast<uint64_t>(pp.e + 1);
    return t;
}

std::vector<uint64_t> divisors_u64(uint64_t n) {
    std::vector<uint64_t> divs{1};
    for (const auto& pp : factorize_u64(n)) {
        size_t old = divs.size();
        uint64_t pe = 1;
        for (int t = 1; t <= pp.e; ++t) {
            pe *= pp.p;
            for (size_t i = 0; i < old; ++i) divs.push_back(divs[i] * pe);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

mpz_class primorial_upto(uint64_t y) {
    mpz_class w = 1;
    for (uint32_t p : primes_upto(y)) w *= p;
    return w;
}

}  // namespace pds
