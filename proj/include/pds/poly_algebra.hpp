#pragma once
// ============================================================================
// Exact polynomial algebra over Z: gcd, squarefree decomposition, resultant,
// discriminant, rational roots. All results are exact GMP integers/rationals.
// ============================================================================

#include <gmpxx.h>

#include <vector>

#include "pds/int_poly.hpp"

namespace pds {

// Exact polynomial division; throws DomainError if den is zero or the
// division leaves a remainder.
IntPoly exact_div_poly(const IntPoly& num, const IntPoly& den);

// gcd over Z: primitive, positive leading coefficient; gcd(0,0) = 0.
IntPoly poly_gcd(IntPoly a, IntPoly b);

struct SquarefreeFactor {
    IntPoly factor;    // primitive, positive leading coefficient, squarefree
    int multiplicity;  // >= 1
};

// Yun decomposition of the primitive part: h = unit * content * prod f_m^m
// with the f_m pairwise coprime and squarefree. Constant h gives {}.
std::vector<SquarefreeFactor> yun_squarefree(const IntPoly& h);

// Resultant Res(f, g) via fraction-free elimination of the Sylvester matrix.
// Res with a zero polynomial is 0; Res of two constants is 1.
mpz_class resultant(const IntPoly& f, const IntPoly& g);

// Discriminant with the classical sign convention:
//   disc(f) = (-1)^{d(d-1)/2} Res(f, f') / lc(f)   for squarefree f,
// extended multiplicatively to arbitrary nonzero h of degree >= 1 through its
// squarefree decomposition (repeated roots contribute squared differences, so
// e.g. disc(x^2) = 1, disc((x-1)^2 (x+1)) = 16). Degree-1 gives 1.
mpz_class discriminant(const IntPoly& h);

struct RationalRoot {
    mpq_class value;   // reduced, denominator > 0
    int multiplicity;  // >= 1
};

// All rational roots with multiplicities, sorted ascending by value.
std::vector<RationalRoot> rational_roots(const IntPoly& h);

// Smallest integer s with s*s >= n (n >= 0).
mpz_class ceil_sqrt(const mpz_class& n);

}  // namespace pds
