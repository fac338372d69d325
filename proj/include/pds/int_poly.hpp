#pragma once
// ============================================================================
// Dense integer polynomials over GMP. Exact arithmetic everywhere; doubles
// only appear in eval_double for plotting / quadrature use.
//
// Canonical text form: terms highest power first, "a*x^k" pieces joined with
// " + " / " - ", unit coefficients elided ("x^2 - 6*x + 1"). parse() accepts
// a superset (parenthesised products, juxtaposition, optional leading sign)
// and parse(format(p)) == p for every polynomial p.
// ============================================================================

#include <gmpxx.h>

#include <string>
#include <vector>

#include "pds/errors.hpp"

namespace pds {

class IntPoly {
  public:
    IntPoly() = default;  // zero polynomial
    explicit IntPoly(std::vector<mpz_class> coeffs);  // coeffs[i] multiplies x^i

    static IntPoly zero();
    static IntPoly constant(const mpz_class& c);
    static IntPoly monomial(const mpz_class& c, int power);
    static IntPoly x();

    // degree of the zero polynomial is -1
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    // coefficient of x^i (0 beyond the degree)
    const mpz_class& coeff(int i) const;
    const std::vector<mpz_class>& coeffs() const { return c_; }
    const mpz_class& leading() const;  // DomainError on the zero polynomial

    mpz_class eval(const mpz_class& x) const;
    // value mod m, reduced into [0, m); m >= 1
    mpz_class eval_mod(const mpz_class& x, const mpz_class& m) const;
    double eval_double(double x) const;

    IntPoly derivative() const;
    // gcd of the coefficients of the NON-constant part; requires degree >= 1.
    mpz_class content() const;
    // sum of |a_i| over all coefficients (constant included)
    mpz_class coefficient_l1() const;
    int nonzero_coeff_count() const;
    // exactly one nonzero coefficient and degree >= 1
    bool is_nonconstant_monomial() const;
    bool has_zero_constant_term() const;  // h(0) == 0

    IntPoly operator+(const IntPoly& o) const;
    IntPoly operator-(const IntPoly& o) const;
    IntPoly operator*(const IntPoly& o) const;
    IntPoly operator-() const;
    bool operator==(const IntPoly& o) const { return c_ == o.c_; }
    bool operator!=(const IntPoly& o) const { return c_ != o.c_; }
    IntPoly mul_scalar(const mpz_class& s) const;

    std::string format() const;

  private:
    void normalize();
    std::vector<mpz_class> c_;  // c_[i] * x^i, c_.back() != 0 when nonempty
};

// Grammar:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*'? factor)*          (juxtaposition multiplies)
//   factor := INT | 'x' | 'x' '^' INT | '(' expr ')'
// Whitespace is insignificant. Throws ParseError with a byte offset.
IntPoly parse_poly(const std::string& text);

// h(r + d*x), expanded exactly.
IntPoly compose_affine(const IntPoly& h, const mpz_class& r, const mpz_class& d);

// h(x^k) for k >= 1 (variable substitution).
IntPoly compose_power(const IntPoly& h, int k);

// Divide every coefficient by s, throwing NonIntegralDivision (with the
// offending power) if any division leaves a remainder. s != 0.
IntPoly exact_div_scalar(const IntPoly& h, const mpz_class& s);

}  // namespace pds
