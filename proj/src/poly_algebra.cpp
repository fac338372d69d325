// ============================================================================
// Exact polynomial algebra: gcd / Yun / resultant / discriminant / rational
// roots. Discriminant uses the classical sign and is extended to repeated
// roots multiplicatively over the squarefree decomposition.
// ============================================================================

#include "pds/poly_algebra.hpp"

#include <algorithm>
#include <cstdint>

namespace pds {

namespace {

// Full content: gcd of ALL coefficients (IntPoly::content excludes the
// constant term by contract, which is not what the algebra here needs).
mpz_class full_content(const IntPoly& p) {
    mpz_class g = 0;
    for (const auto& c : p.coeffs()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;  // 0 for the zero polynomial
}

// Primitive part with positive leading coefficient.
IntPoly primitive_positive(const IntPoly& p) {
    if (p.is_zero()) return p;
    mpz_class g = full_content(p);
    if (p.leading() < 0) g = -g;
    return exact_div_scalar(p, g);
}

// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a  mod  b, computed in Z.
IntPoly pseudo_rem(IntPoly a, const IntPoly& b) {
    int db = b.degree();
    const mpz_class& lb = b.leading();
    while (!a.is_zero() && a.degree() >= db) {
        int shift = a.degree() - db;
        mpz_class la = a.leading();
        a = a.mul_scalar(lb) - (b * IntPoly::monomial(la, shift));
    }
    return a;
}

}  // namespace

IntPoly exact_div_poly(const IntPoly& num, const IntPoly& den) {
    if (den.is_zero()) throw DomainError("polynomial division by zero");
    if (num.is_zero()) return IntPoly();
    int dn = num.degree(), dd = den.degree();
    if (dn < dd) throw DomainError("polynomial division is not exact");
    // Divide over Q, then demand integrality and zero remainder.
    std::vector<mpq_class> rem(dn + 1), quo(dn - dd + 1);
    for (int i = 0; i <= dn; ++i) rem[i] = num.coeff(i);
    mpq_class lead = den.leading();
    for (int k = dn - dd; k >= 0; --k) {
        mpq_class q = rem[k + dd] / lead;
        quo[k] = q;
        for (int j = 0; j <= dd; ++j) rem[k + j] -= q * mpq_class(den.coeff(j));
    }
    for (int i = 0; i < dd; ++i)
        if (rem[i] != 0) throw DomainError("polynomial division is not exact");
    std::vector<mpz_class> out(quo.size());
    for (size_t i = 0; i < quo.size(); ++i) {
        if (quo[i].get_den() != 1) throw DomainError("polynomial quotient not integral");
        out[i] = quo[i].get_num();
    }
    return IntPoly(std::move(out));
}

IntPoly poly_gcd(IntPoly a, IntPoly b) {
    if (a.is_zero()) return primitive_positive(b);
    if (b.is_zero()) return primitive_positive(a);
    mpz_class ca = full_content(a), cb = full_content(b);
    mpz_class cg;
    mpz_gcd(cg.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
    a = primitive_positive(a);
    b = primitive_positive(b);
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.is_zero()) {
        IntPoly r = pseudo_rem(a, b);
        a = b;
        b = r.is_zero() ? IntPoly() : primitive_positive(r);
    }
    if (a.degree() == 0) return IntPoly::constant(cg == 0 ? mpz_class(1) : cg);
    IntPoly g = primitive_positive(a);
    return g.mul_scalar(cg == 0 ? mpz_class(1) : cg);
}

std::vector<SquarefreeFactor> yun_squarefree(const IntPoly& h) {
    std::vector<SquarefreeFactor> out;
    if (h.degree() < 1) return out;
    IntPoly f = primitive_positive(h);
    IntPoly fp = f.derivative();
    IntPoly g = poly_gcd(f, fp);
    if (g.degree() == 0) {
        out.push_back({f, 1});
        return out;
    }
    IntPoly c = exact_div_poly(f, g);
    IntPoly d = exact_div_poly(fp, g) - c.derivative();
    int m = 1;
    while (c.degree() > 0) {
        IntPoly u = poly_gcd(c, d);
        if (u.degree() >= 1) out.push_back({primitive_positive(u), m});
        c = exact_div_poly(c, u);
        d = exact_div_poly(d, u) - c.derivative();
        ++m;
    }
    return out;
}

mpz_class resultant(const IntPoly& f, const IntPoly& g) {
    if (f.is_zero() || g.is_zero()) return 0;
    int m = f.degree(), n = g.degree();
    if (m == 0 && n == 0) return 1;
    if (m == 0) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), f.coeff(0).get_mpz_t(), n);
        return r;
    }
    if (n == 0) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), g.coeff(0).get_mpz_t(), m);
        return r;
    }
    int size = m + n;
    std::vector<std::vector<mpz_class>> a(size, std::vector<mpz_class>(size, mpz_class(0)));
    for (int r = 0; r < n; ++r)
        for (int j = 0; j <= m; ++j) a[r][r + j] = f.coeff(m - j);
    for (int r = 0; r < m; ++r)
        for (int j = 0; j <= n; ++j) a[n + r][r + j] = g.coeff(n - j);

    // Bareiss fraction-free elimination with row pivoting.
    mpz_class prev = 1;
    int sign = 1;
    for (int k = 0; k < size - 1; ++k) {
        if (a[k][k] == 0) {
            int swap_row = -1;
            for (int r = k + 1; r < size; ++r)
                if (a[r][k] != 0) {
                    swap_row = r;
                    break;
                }
            if (swap_row < 0) return 0;
            std::swap(a[k], a[swap_row]);
            sign = -sign;
        }
        for (int r = k + 1; r < size; ++r) {
            for (int col = k + 1; col < size; ++col) {
                mpz_class t = a[r][col] * a[k][k] - a[r][k] * a[k][col];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a[r][col] = t;
            }
            a[r][k] = 0;
        }
        prev = a[k][k];
    }
    return sign > 0 ? a[size - 1][size - 1] : -a[size - 1][size - 1];
}

namespace {

// Classical discriminant of a squarefree polynomial (1 for degree <= 1).
mpq_class disc_squarefree(const IntPoly& u) {
    int d = u.degree();
    if (d <= 1) return 1;
    mpz_class res = resultant(u, u.derivative());
    mpq_class out(res, u.leading());
    out.canonicalize();
    long s = (static_cast<long>(d) * (d - 1) / 2) % 2;
    return s ? -out : out;
}

mpq_class mpq_pow(const mpq_class& b, unsigned long e) {
    mpq_class r = 1, base = b;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

}  // namespace

mpz_class discriminant(const IntPoly& h) {
    int j = h.degree();
    if (j < 1) throw DomainError("discriminant requires degree >= 1");
    if (j == 1) return 1;
    auto factors = yun_squarefree(h);
    mpq_class acc = mpq_pow(mpq_class(h.leading()), 2UL * j - 2);
    for (size_t i = 0; i < factors.size(); ++i) {
        const IntPoly& u = factors[i].factor;
        unsigned long m = factors[i].multiplicity;
        int d = u.degree();
        mpq_class base = disc_squarefree(u) / mpq_pow(mpq_class(u.leading()), 2UL * d - 2);
        acc *= mpq_pow(base, m * m);
        for (size_t i2 = i + 1; i2 < factors.size(); ++i2) {
            const IntPoly& v = factors[i2].factor;
            unsigned long m2 = factors[i2].multiplicity;
            int d2 = v.degree();
            mpz_class r = resultant(u, v);
            mpq_class cross(r * r,
                            mpq_pow(mpq_class(u.leading()), 2UL * d2).get_num() *
                                mpq_pow(mpq_class(v.leading()), 2UL * d).get_num());
            cross.canonicalize();
            acc *= mpq_pow(cross, m * m2);
        }
    }
    acc.canonicalize();
    if (acc.get_den() != 1)
        throw ValidationFailure("discriminant recombination produced a non-integer");
    return acc.get_num();
}

namespace {

std::vector<mpz_class> divisors_of(const mpz_class& n_in) {
    mpz_class n = abs(n_in);
    if (n == 0) throw DomainError("divisors of zero requested");
    if (!n.fits_ulong_p() || n.get_ui() > 2000000000000ULL)
        throw ResourceError("rational-root candidate constant too large to factor");
    uint64_t v = n.get_ui();
    std::vector<uint64_t> divs{1};
    for (uint64_t p = 2; p * p <= v; ++p) {
        if (v % p) continue;
        int e = 0;
        while (v % p == 0) {
            v /= p;
            ++e;
        }
        size_t old = divs.size();
        uint64_t pe = 1;
        for (int t = 1; t <= e; ++t) {
            pe *= p;
            for (size_t i = 0; i < old; ++i) divs.push_back(divs[i] * pe);
        }
    }
    if (v > 1) {
        size_t old = divs.size();
        for (size_t i = 0; i < old; ++i) divs.push_back(divs[i] * v);
    }
    std::sort(divs.begin(), divs.end());
    std::vector<mpz_class> out;
    out.reserve(divs.size());
    for (uint64_t d : divs) out.emplace_back(static_cast<unsigned long>(d));
    return out;
}

// Is p/q (reduced) a root of u?  Tests sum a_i p^i q^{d-i} == 0 exactly.
bool is_root(const IntPoly& u, const mpz_class& p, const mpz_class& q) {
    int d = u.degree();
    mpz_class acc = 0, ppow = 1;
    std::vector<mpz_class> qpow(d + 1);
    qpow[0] = 1;
    for (int i = 1; i <= d; ++i) qpow[i] = qpow[i - 1] * q;
    for (int i = 0; i <= d; ++i) {
        acc += u.coeff(i) * ppow * qpow[d - i];
        ppow *= p;
    }
    return acc == 0;
}

}  // namespace

std::vector<RationalRoot> rational_roots(const IntPoly& h) {
    std::vector<RationalRoot> out;
    if (h.degree() < 1) return out;
    for (const auto& [u0, mult] : yun_squarefree(h)) {
        IntPoly u = u0;
        if (u.coeff(0) == 0) {
            out.push_back({mpq_class(0), mult});
            // u is squarefree, so x divides it exactly once.
            std::vector<mpz_class> shifted(u.coeffs().begin() + 1, u.coeffs().end());
            u = IntPoly(std::move(shifted));
        }
        if (u.degree() < 1) continue;
        auto nums = divisors_of(u.coeff(0));
        auto dens = divisors_of(u.leading());
        for (const auto& den : dens) {
            for (const auto& num : nums) {
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
                if (g != 1) continue;
                if (is_root(u, num, den)) out.push_back({mpq_class(num, den), mult});
                if (is_root(u, -num, den)) out.push_back({mpq_class(-num, den), mult});
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const RationalRoot& a, const RationalRoot& b) { return a.value < b.value; });
    return out;
}

mpz_class ceil_sqrt(const mpz_class& n) {
    if (n < 0) throw DomainError("ceil_sqrt of negative number");
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), n.get_mpz_t());
    if (s * s < n) s += 1;
    return s;
}

}  // namespace pds
