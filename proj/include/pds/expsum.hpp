#pragma once
// ============================================================================
// Exponential sums and their analytic companions: complete / unit / shifted
// Gauss sums, Weyl sums in four weightings, prime-counting psi, oscillatory
// integrals, main-term asymptotics with measured error constants, and moment
// sums over discrete spectra.
//
// Phase discipline: rational parts of phases are reduced in exact integer
// arithmetic modulo the denominator before any float conversion; irrational
// offsets beta enter through exact dyadic rationals (every double is one).
// ============================================================================

#include <gmpxx.h>

#include <complex>
#include <optional>
#include <vector>

#include "pds/int_poly.hpp"

namespace pds {

using cplx = std::complex<double>;

// Reduced fraction a/q with q >= 1, a normalized into [0, q).
struct Rational {
    long long a = 0;
    long long q = 1;
    Rational() = default;
    Rational(long long num, long long den);  // reduces and normalizes
    double value() const { return static_cast<double>(a) / static_cast<double>(q); }
};

// Parse "a/q" (or bare integer "a") exactly.
Rational parse_rational(const std::string& s);

struct SumValue {
    cplx value{0.0, 0.0};
    long terms = 0;                 // number of summands included
    double weight_l1 = 0.0;         // sum of |weights| (the trivial bound)
    double absolute_error_budget = 0.0;
};

// ----------------------------------------------------------------------------
// Gauss sums. All arguments are reduced mod q exactly in integers.
// ----------------------------------------------------------------------------

// sum_{s=0}^{q-1} e(g(s) a / q)
cplx gauss_complete(const IntPoly& g, const Rational& aq);
// sum over (s,q)=1 only
cplx gauss_unit(const IntPoly& g, const Rational& aq);
// sum over (d s + r, q) = 1 only
cplx gauss_shifted_prime(const IntPoly& g, const Rational& aq, long long d, const mpz_class& r);
// sum over gcd(gcd(s,q), W) = 1 (restriction used by the sieved asymptotic)
cplx gauss_coprime_part(const IntPoly& g, const Rational& aq, const mpz_class& W);

// ----------------------------------------------------------------------------
// Weyl sums over n = 1..M at alpha = a/q + beta.
// ----------------------------------------------------------------------------

struct WeylVariant {
    enum class Kind { Plain, Sieved, Weighted, WeightedSieved, Prime };
    Kind kind = Kind::Plain;
    mpz_class W = 1;   // Sieved / WeightedSieved: restrict to (n, W) = 1
    long L = 1;        // Weighted*: 1/L (and 1/w) normalization, phases t/L
    long long d = 1;   // Prime: weight log(dn + r) over dn + r prime
    mpz_class r = 0;

    static WeylVariant plain() { return {}; }
    static WeylVariant sieved(mpz_class W);
    static WeylVariant weighted(long L);
    static WeylVariant weighted_sieved(long L, mpz_class W);
    static WeylVariant prime(long long d, mpz_class r);
};

SumValue weyl_sum(const IntPoly& g, const Rational& aq, double beta, long M,
                  const WeylVariant& v = WeylVariant::plain());
// Convenience overload: alpha given as a plain real.
SumValue weyl_sum(const IntPoly& g, double alpha, long M,
                  const WeylVariant& v = WeylVariant::plain());

// Density prod_{p | W} (1 - 1/p) of the W-coprime integers.
double coprime_density(const mpz_class& W);

// ----------------------------------------------------------------------------
// Prime counting: sum of log p over p <= x, p = a (mod q).
// ----------------------------------------------------------------------------
double psi_count(double x, long long a, long long q);

// ----------------------------------------------------------------------------
// Oscillatory integrals int_0^X e(g(x) beta) dx.
// ----------------------------------------------------------------------------

// Fast path: closed form for degree <= 1, stationary-phase series for pure
// monomials; adaptive quadrature otherwise. For monomials the rigid bound
// |I| <= 2 |c beta|^{-1/j} is asserted post-hoc (QuadratureFailure on breach).
cplx oscillatory_integral(const IntPoly& g, double beta, double X);
// Pure adaptive-quadrature evaluation (no closed forms): cross-check oracle.
cplx oscillatory_integral_direct(const IntPoly& g, double beta, double X);
// int_0^T e^{i u^j} du, the normalized monomial kernel.
cplx fresnel_kernel(int j, double T);

// ----------------------------------------------------------------------------
// Main-term asymptotics.
// ----------------------------------------------------------------------------

struct AsymptoticReport {
    cplx direct{0.0, 0.0};
    cplx main_term{0.0, 0.0};
    double error = 0.0;              // |direct - main_term|
    double paper_bound = 0.0;        // the lemma's error envelope (constant 1)
    double measured_constant = 0.0;  // error / paper_bound
};

// Optional exceptional-character correction for the prime variant: the main
// term integrand becomes (1 - chi_r (d x)^(rho-1)) e(g(x) beta). Defaults to
// absent (desk scale exhibits no exceptional zeros); rho = 1/2 is the worst
// case available for synthetic testing.
struct ExceptionalTerm {
    double rho = 0.5;
    int chi_r = 1;
};

AsymptoticReport verify_asymptotic(const IntPoly& g, const Rational& aq, double beta, long M,
                                   const WeylVariant& v = WeylVariant::plain(),
                                   const std::optional<ExceptionalTerm>& chi = std::nullopt,
                                   double bound_scale = 1.0);

// ----------------------------------------------------------------------------
// Named-bound instantiations.
// ----------------------------------------------------------------------------

// X * (a_j log^{j^2}(a_j q X) (1/q + 1/X + q/(a_j X^j)))^{2^{-j}}, a_j > 0.
double weyl_inequality_bound(const IntPoly& g, const Rational& aq, long X);

// sum_t |spectrum[t]|^m
double moment_sum(const std::vector<cplx>& spectrum, int m);

// Resource cap shared by the direct summation loops.
long& expsum_term_cap();  // default 20,000,000

}  // namespace pds
