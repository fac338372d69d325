// ============================================================================
// Exponential sums, oscillatory integrals, asymptotic main terms.
// ============================================================================

#include "pds/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "pds/errors.hpp"
#include "pds/sieve.hpp"

namespace pds {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;  // 2*pi

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

inline cplx expi(double t) { return {std::cos(t), std::sin(t)}; }

std::vector<uint64_t> coeffs_mod(const IntPoly& g, uint64_t q) {
    std::vector<uint64_t> c(static_cast<size_t>(std::max(g.degree(), 0)) + 1, 0);
    for (int i = 0; i <= g.degree(); ++i)
        c[static_cast<size_t>(i)] = mpz_fdiv_ui(g.coeff(i).get_mpz_t(), q);
    return c;
}

inline uint64_t horner_mod(const std::vector<uint64_t>& c, uint64_t s, uint64_t q) {
    uint64_t h = 0;
    for (size_t i = c.size(); i-- > 0;) h = (mulmod(h, s, q) + c[i]) % q;
    return h;
}

template <class Accept>
cplx gauss_filtered(const IntPoly& g, const Rational& aq, Accept accept) {
    const uint64_t q = static_cast<uint64_t>(aq.q);
    if (static_cast<long>(q) > expsum_term_cap())
        throw ResourceError("gauss sum: q exceeds term cap");
    const uint64_t a = static_cast<uint64_t>(aq.a);
    std::vector<uint64_t> c = coeffs_mod(g, q);
    std::complex<long double> acc(0.0L, 0.0L);
    const long double step = static_cast<long double>(kTau) / static_cast<long double>(q);
    for (uint64_t s = 0; s < q; ++s) {
        if (!accept(s)) continue;
        uint64_t k = mulmod(horner_mod(c, s, q), a, q);
        long double ang = step * static_cast<long double>(k);
        acc += std::complex<long double>(std::cos(static_cast<double>(ang)),
                                         std::sin(static_cast<double>(ang)));
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

}  // namespace

long& expsum_term_cap() {
    static long cap = 20000000;
    return cap;
}

// ----------------------------------------------------------------------------
// Rational
// ----------------------------------------------------------------------------

Rational::Rational(long long num, long long den) {
    if (den < 1) throw DomainError("Rational: denominator must be positive");
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) g = 1;
    a = num / g;
    q = den / g;
    a %= q;
    if (a < 0) a += q;
    // a and q stay coprime after the shift into [0, q)
}

Rational parse_rational(const std::string& s) {
    size_t slash = s.find('/');
    try {
        size_t used = 0;
        if (slash == std::string::npos) {
            long long a = std::stoll(s, &used);
            if (used != s.size()) throw ParseError("trailing characters in rational", used);
            return Rational(a, 1);
        }
        long long a = std::stoll(s.substr(0, slash), &used);
        if (used != slash) throw ParseError("bad numerator", used);
        long long q = std::stoll(s.substr(slash + 1), &used);
        if (slash + 1 + used != s.size()) throw ParseError("bad denominator", slash + 1 + used);
        return Rational(a, q);
    } catch (const std::invalid_argument&) {
        throw ParseError("not a rational: " + s, 0);
    } catch (const std::out_of_range&) {
        throw ParseError("rational out of range: " + s, 0);
    }
}

// ----------------------------------------------------------------------------
// Gauss sums
// ----------------------------------------------------------------------------

cplx gauss_complete(const IntPoly& g, const Rational& aq) {
    return gauss_filtered(g, aq, [](uint64_t) { return true; });
}

cplx gauss_unit(const IntPoly& g, const Rational& aq) {
    const uint64_t q = static_cast<uint64_t>(aq.q);
    return gauss_filtered(g, aq, [q](uint64_t s) { return std::gcd(s, q) == 1; });
}

cplx gauss_shifted_prime(const IntPoly& g, const Rational& aq, long long d, const mpz_class& r) {
    const uint64_t q = static_cast<uint64_t>(aq.q);
    uint64_t dm = static_cast<uint64_t>(((d % aq.q) + aq.q) % aq.q);
    uint64_t rm = mpz_fdiv_ui(r.get_mpz_t(), q);
    return gauss_filtered(g, aq, [=](uint64_t s) {
        uint64_t v = (mulmod(dm, s, q) + rm) % q;
        return std::gcd(v, q) == 1;
    });
}

cplx gauss_coprime_part(const IntPoly& g, const Rational& aq, const mpz_class& W) {
    const uint64_t q = static_cast<uint64_t>(aq.q);
    return gauss_filtered(g, aq, [&](uint64_t s) {
        uint64_t gg = std::gcd(s, q);
        if (gg == 1) return true;
        uint64_t wm = mpz_fdiv_ui(W.get_mpz_t(), gg);
        return std::gcd(wm, gg) == 1;
    });
}

// ----------------------------------------------------------------------------
// Weyl sums
// ----------------------------------------------------------------------------

WeylVariant WeylVariant::sieved(mpz_class W) {
    WeylVariant v;
    v.kind = Kind::Sieved;
    v.W = std::move(W);
    return v;
}
WeylVariant WeylVariant::weighted(long L) {
    WeylVariant v;
    v.kind = Kind::Weighted;
    v.L = L;
    return v;
}
WeylVariant WeylVariant::weighted_sieved(long L, mpz_class W) {
    WeylVariant v;
    v.kind = Kind::WeightedSieved;
    v.L = L;
    v.W = std::move(W);
    return v;
}
WeylVariant WeylVariant::prime(long long d, mpz_class r) {
    WeylVariant v;
    v.kind = Kind::Prime;
    v.d = d;
    v.r = std::move(r);
    return v;
}

double coprime_density(const mpz_class& W) {
    if (W < 1) throw DomainError("coprime_density: W must be >= 1");
    double out = 1.0;
    for (const auto& [p, e] : factorize_mpz(W)) {
        (void)e;
        out *= 1.0 - 1.0 / p.get_d();
    }
    return out;
}

SumValue weyl_sum(const IntPoly& g, const Rational& aq, double beta, long M,
                  const WeylVariant& v) {
    if (M < 1) throw DomainError("weyl_sum: M must be >= 1");
    if (M > expsum_term_cap()) throw ResourceError("weyl_sum: M exceeds term cap");
    if (!std::isfinite(beta)) throw DomainError("weyl_sum: beta must be finite");
    using Kind = WeylVariant::Kind;
    const bool sieve = v.kind == Kind::Sieved || v.kind == Kind::WeightedSieved;
    const bool deriv = v.kind == Kind::Weighted || v.kind == Kind::WeightedSieved;
    if (sieve && v.W < 1) throw DomainError("weyl_sum: sieved variant needs W >= 1");
    if (deriv && v.L < 1) throw DomainError("weyl_sum: weighted variant needs modulus L >= 1");
    if (v.kind == Kind::Prime && v.d < 1) throw DomainError("weyl_sum: prime variant needs d >= 1");

    const uint64_t q = static_cast<uint64_t>(aq.q);
    const uint64_t a = static_cast<uint64_t>(aq.a);
    const mpz_class qz(static_cast<long>(aq.q));
    const bool bzero = (beta == 0.0);
    mpq_class bq;
    if (!bzero) bq = mpq_class(beta);  // exact: doubles are dyadic

    IntPoly gd;
    if (deriv) gd = g.derivative();
    double prime_scale = 1.0;
    if (v.kind == Kind::Prime)
        prime_scale = v.d == 1 ? 1.0
                               : static_cast<double>(euler_phi_u64(static_cast<uint64_t>(v.d))) /
                                     static_cast<double>(v.d);
    long double norm = 1.0L;
    if (deriv) norm /= static_cast<long double>(v.L);
    if (v.kind == Kind::WeightedSieved) norm /= static_cast<long double>(coprime_density(v.W));

    std::complex<long double> acc(0.0L, 0.0L);
    long terms = 0;
    long double wl1 = 0.0L;
    mpz_class scratch, num, den, fq;
    for (long n = 1; n <= M; ++n) {
        if (sieve) {
            mpz_class nn(n);
            mpz_gcd(scratch.get_mpz_t(), nn.get_mpz_t(), v.W.get_mpz_t());
            if (scratch != 1) continue;
        }
        double weight = 1.0;
        if (v.kind == Kind::Prime) {
            mpz_class x = mpz_class(static_cast<long>(v.d)) * n + v.r;
            if (x < 2 || !is_prime_mpz(x)) continue;
            weight = prime_scale * std::log(x.get_d());
        } else if (deriv) {
            weight = gd.eval(n).get_d();
        }
        // exact rational phase part
        uint64_t k = 0;
        if (q > 1) {
            mpz_class km = g.eval_mod(n, qz);
            k = mulmod(km.get_ui(), a, q);
        }
        long double frac = static_cast<long double>(k) / static_cast<long double>(q);
        if (!bzero) {
            mpq_class t = mpq_class(g.eval(n)) * bq;
            num = t.get_num();
            den = t.get_den();
            mpz_fdiv_q(fq.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
            t -= fq;  // fractional part in [0, 1), exact
            frac += static_cast<long double>(t.get_d());
        }
        double ang = kTau * static_cast<double>(frac);
        acc += static_cast<long double>(weight) * std::complex<long double>(std::cos(ang), std::sin(ang));
        wl1 += std::abs(static_cast<long double>(weight));
        ++terms;
    }
    acc *= norm;
    wl1 *= std::abs(static_cast<double>(norm));
    SumValue out;
    out.value = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
    out.terms = terms;
    out.weight_l1 = static_cast<double>(wl1);
    out.absolute_error_budget = 1e-12 * out.weight_l1 + 1e-15;
    return out;
}

SumValue weyl_sum(const IntPoly& g, double alpha, long M, const WeylVariant& v) {
    return weyl_sum(g, Rational(0, 1), alpha, M, v);
}

// ----------------------------------------------------------------------------
// psi(x, a, q)
// ----------------------------------------------------------------------------

double psi_count(double x, long long a, long long q) {
    if (q < 1) throw DomainError("psi_count: q must be >= 1");
    if (!std::isfinite(x)) throw DomainError("psi_count: x must be finite");
    if (x < 2) return 0.0;
    long long am = ((a % q) + q) % q;
    long double total = 0.0L;
    for (uint64_t p : primes_upto(static_cast<uint64_t>(x)))
        if (static_cast<long long>(p % static_cast<uint64_t>(q)) == am)
            total += std::log(static_cast<long double>(p));
    return static_cast<double>(total);
}

// ----------------------------------------------------------------------------
// Quadrature engine
// ----------------------------------------------------------------------------

namespace {

struct QuadCtx {
    const std::function<cplx(double)>* f;
    long evals = 0;
    long cap = 8000000;
};

cplx adaptive_panel(QuadCtx& ctx, double a, double b, cplx fa, cplx fm, cplx fb, cplx S,
                    double tol, int depth) {
    double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    if (ctx.evals + 2 > ctx.cap)
        throw QuadratureFailure("oscillatory integral: evaluation cap exceeded on [" +
                                std::to_string(a) + ", " + std::to_string(b) + "] after " +
                                std::to_string(ctx.evals) + " evaluations");
    cplx flm = (*ctx.f)(lm), frm = (*ctx.f)(rm);
    ctx.evals += 2;
    cplx Sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    cplx Sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    cplx S2 = Sl + Sr;
    if (std::abs(S2 - S) <= 15.0 * tol || (b - a) < 1e-13 * std::max(1.0, std::abs(b)))
        return S2 + (S2 - S) / 15.0;
    if (depth <= 0) throw QuadratureFailure("oscillatory integral: max refinement depth");
    // Subdivision gains ~16x accuracy per level, so a mild tolerance decay
    // still converges; never demand accuracy below the panel's roundoff scale.
    double child_tol = std::max(0.9 * tol, 1e-16 * (1.0 + std::abs(S2)));
    return adaptive_panel(ctx, a, m, fa, flm, fm, Sl, child_tol, depth - 1) +
           adaptive_panel(ctx, m, b, fm, frm, fb, Sr, child_tol, depth - 1);
}

cplx quad_complex(const std::function<cplx(double)>& f, double a, double b, double tol,
                  long min_panels) {
    if (!(b > a)) return {0.0, 0.0};
    long panels = std::max(1L, min_panels);
    if (panels > 400000) throw QuadratureFailure("oscillatory integral: too many panels");
    QuadCtx ctx;
    ctx.f = &f;
    cplx total{0.0, 0.0};
    double h = (b - a) / static_cast<double>(panels);
    double ptol = tol / static_cast<double>(panels);
    for (long k = 0; k < panels; ++k) {
        double x0 = a + h * static_cast<double>(k);
        double x1 = (k + 1 == panels) ? b : x0 + h;
        double xm = 0.5 * (x0 + x1);
        cplx f0 = f(x0), fm = f(xm), f1 = f(x1);
        ctx.evals += 3;
        cplx S = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += adaptive_panel(ctx, x0, x1, f0, fm, f1, S, ptol, 38);
    }
    return total;
}

// Estimated total phase (in radians) of e(g(x) beta) over [0, X].
double phase_span(const IntPoly& g, double beta, double X) {
    double s = 0.0;
    for (int i = 1; i <= g.degree(); ++i)
        s += std::abs(g.coeff(i).get_d()) * std::pow(X, static_cast<double>(i));
    return kTau * std::abs(beta) * s;
}

bool is_pure_monomial(const IntPoly& g, int* j, mpz_class* c) {
    if (g.degree() < 1 || g.nonzero_coeff_count() != 1) return false;
    *j = g.degree();
    *c = g.leading();
    return true;
}

}  // namespace

cplx fresnel_kernel(int j, double T) {
    if (j < 1) throw DomainError("fresnel_kernel: j must be >= 1");
    if (T < 0) throw DomainError("fresnel_kernel: T must be >= 0");
    if (T == 0) return {0.0, 0.0};
    if (j == 1) {  // (e^{iT} - 1) / i
        cplx num = expi(T) - cplx{1.0, 0.0};
        return num / cplx{0.0, 1.0};
    }
    double S = std::pow(T, static_cast<double>(j));
    if (S <= 50.0) {
        auto f = [j](double u) { return expi(std::pow(u, static_cast<double>(j))); };
        long panels = std::max(32L, static_cast<long>(S));
        return quad_complex(f, 0.0, T, 1e-12 * std::max(1.0, T), panels);
    }
    double s = 1.0 / static_cast<double>(j);
    cplx Finf = std::tgamma(1.0 + s) * expi(0.5 * M_PI * s);
    // I(S) = int_S^inf e^{iv} v^{s-1} dv by repeated integration by parts:
    // term_0 = i e^{iS} S^{s-1}, term_{k+1} = term_k * i (s-1-k) / S.
    cplx i_unit{0.0, 1.0};
    cplx term = i_unit * expi(S) * std::pow(S, s - 1.0);
    cplx tail{0.0, 0.0};
    for (int k = 0; k < 40; ++k) {
        tail += term;
        cplx next = term * (i_unit * ((s - 1.0 - static_cast<double>(k)) / S));
        if (std::abs(next) >= std::abs(term))
            throw QuadratureFailure("fresnel_kernel: asymptotic series diverged");
        term = next;
        if (std::abs(term) < 1e-18) break;
    }
    return Finf - s * tail;
}

cplx oscillatory_integral_direct(const IntPoly& g, double beta, double X) {
    if (!(X > 0)) throw DomainError("oscillatory integral: X must be positive");
    auto f = [&g, beta](double x) { return expi(kTau * beta * g.eval_double(x)); };
    long panels = std::max(16L, static_cast<long>(phase_span(g, beta, X) / 2.0) + 1);
    return quad_complex(f, 0.0, X, 1e-8 * std::max(1.0, X), panels);
}

cplx oscillatory_integral(const IntPoly& g, double beta, double X) {
    if (!(X > 0)) throw DomainError("oscillatory integral: X must be positive");
    if (!std::isfinite(beta)) throw DomainError("oscillatory integral: beta must be finite");
    if (beta == 0.0 || g.degree() < 1) {
        double c0 = g.degree() < 0 ? 0.0 : g.coeff(0).get_d();
        return X * expi(kTau * beta * c0);
    }
    const double c0 = g.coeff(0).get_d();
    const cplx pre = expi(kTau * beta * c0);
    std::vector<mpz_class> core_coeffs(static_cast<size_t>(g.degree()) + 1);
    for (int i = 1; i <= g.degree(); ++i) core_coeffs[static_cast<size_t>(i)] = g.coeff(i);
    IntPoly core(core_coeffs);

    int j = 0;
    mpz_class cz;
    if (core.degree() == 1) {  // closed form
        double c1 = core.leading().get_d();
        cplx num = expi(kTau * c1 * X * beta) - cplx{1.0, 0.0};
        return pre * (num / cplx{0.0, kTau * c1 * beta});
    }
    if (is_pure_monomial(core, &j, &cz)) {
        double cb = cz.get_d() * beta;
        double t = kTau * std::abs(cb);
        double scale = std::pow(t, -1.0 / static_cast<double>(j));
        cplx F = fresnel_kernel(j, X / scale);
        cplx I = scale * F;
        if (cb < 0) I = std::conj(I);
        double vdc = 2.0 * std::pow(std::abs(cb), -1.0 / static_cast<double>(j));
        double cap = std::min(X, vdc);
        if (std::abs(I) > cap + 1e-7 * (1.0 + cap))
            throw QuadratureFailure("oscillatory integral: van der Corput bound breached");
        return pre * I;
    }
    auto f = [&core, beta](double x) { return expi(kTau * beta * core.eval_double(x)); };
    long panels = std::max(16L, static_cast<long>(phase_span(core, beta, X) / 2.0) + 1);
    return pre * quad_complex(f, 0.0, X, 1e-8 * std::max(1.0, X), panels);
}

// ----------------------------------------------------------------------------
// Asymptotic reports
// ----------------------------------------------------------------------------

namespace {

// int_0^X x^{rho-1} e(g(x) beta) dx via the substitution u = x^rho (exact
// de-singularization: the integrand becomes (1/rho) e(g(u^{1/rho}) beta)).
cplx power_weighted_integral(const IntPoly& g, double beta, double X, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("exceptional rho must be in (0, 1]");
    double U = std::pow(X, rho);
    auto f = [&g, beta, rho](double u) {
        double x = std::pow(u, 1.0 / rho);
        return expi(kTau * beta * g.eval_double(x)) / rho;
    };
    long panels = std::max(16L, static_cast<long>(phase_span(g, beta, X) / 2.0) + 1);
    return quad_complex(f, 0.0, U, 1e-8 * std::max(1.0, U), panels);
}

}  // namespace

AsymptoticReport verify_asymptotic(const IntPoly& g, const Rational& aq, double beta, long M,
                                   const WeylVariant& v, const std::optional<ExceptionalTerm>& chi,
                                   double bound_scale) {
    using Kind = WeylVariant::Kind;
    if (v.kind == Kind::Weighted || v.kind == Kind::WeightedSieved)
        throw DomainError("verify_asymptotic: weighted variants have no main-term lemma");
    if (g.degree() < 1) throw DomainError("verify_asymptotic: polynomial must be nonconstant");

    AsymptoticReport rep;
    rep.direct = weyl_sum(g, aq, beta, M, v).value;

    const double X = static_cast<double>(M);
    const double q = static_cast<double>(aq.q);
    const double J = g.coefficient_l1().get_d();
    const int j = g.degree();
    const double growth = 1.0 + J * std::pow(X, static_cast<double>(j)) * std::abs(beta);

    if (v.kind == Kind::Plain) {
        cplx G = gauss_complete(g, aq);
        cplx I = oscillatory_integral(g, beta, X);
        rep.main_term = G * I / q;
        rep.paper_bound = q * growth * bound_scale;
    } else if (v.kind == Kind::Sieved) {
        if (v.W < 2) throw DomainError("verify_asymptotic: sieved variant needs W >= 2");
        cplx G = gauss_coprime_part(g, aq, v.W);
        cplx I = oscillatory_integral(g, beta, X);
        double euler = 1.0;
        mpz_class Y = 2;
        for (const auto& [p, e] : factorize_mpz(v.W)) {
            (void)e;
            if (p > Y) Y = p;
            bool divides_q = p.fits_slong_p() && aq.q % p.get_si() == 0;
            if (!divides_q) euler *= 1.0 - 1.0 / p.get_d();
        }
        rep.main_term = G * I * euler / q;
        double logY = std::log(Y.get_d());
        rep.paper_bound =
            X * std::exp(-std::log(std::max(X / q, 1.000001)) / (2.0 * logY)) * growth * bound_scale;
    } else {  // Prime
        double d = static_cast<double>(v.d);
        uint64_t qd = static_cast<uint64_t>(aq.q) * static_cast<uint64_t>(v.d);
        double phi_qd = static_cast<double>(euler_phi_u64(qd));
        double phi_d = v.d == 1 ? 1.0 : static_cast<double>(euler_phi_u64(static_cast<uint64_t>(v.d)));
        cplx G = gauss_shifted_prime(g, aq, v.d, v.r);
        cplx I = oscillatory_integral(g, beta, X);
        if (chi) {
            cplx corr = power_weighted_integral(g, beta, X, chi->rho);
            I -= static_cast<double>(chi->chi_r) * std::pow(d, chi->rho - 1.0) * corr;
        }
        // The direct sum carries the phi(d)/d weight, so the main term scales
        // by the same factor: (phi(d)/d) * (d/phi(qd)) = phi(d)/phi(qd).
        rep.main_term = (phi_d / phi_qd) * G * I;
        rep.paper_bound = q * X * growth * bound_scale;
    }
    rep.error = std::abs(rep.direct - rep.main_term);
    if (!(rep.paper_bound > 0)) throw DomainError("verify_asymptotic: bound must be positive");
    rep.measured_constant = rep.error / rep.paper_bound;
    if (!std::isfinite(rep.measured_constant))
        throw ValidationFailure("verify_asymptotic: non-finite report");
    return rep;
}

// ----------------------------------------------------------------------------
// Bound instantiations
// ----------------------------------------------------------------------------

double weyl_inequality_bound(const IntPoly& g, const Rational& aq, long X) {
    if (g.degree() < 1) throw DomainError("weyl_inequality_bound: degree must be >= 1");
    if (g.leading() <= 0) throw DomainError("weyl_inequality_bound: leading coefficient must be positive");
    if (X < 2) throw DomainError("weyl_inequality_bound: X must be >= 2");
    const int j = g.degree();
    const double aj = g.leading().get_d();
    const double q = static_cast<double>(aq.q);
    const double Xd = static_cast<double>(X);
    double lg = std::log(aj * q * Xd);
    double inner = aj * std::pow(lg, static_cast<double>(j) * j) *
                   (1.0 / q + 1.0 / Xd + q / (aj * std::pow(Xd, static_cast<double>(j))));
    return Xd * std::pow(inner, std::pow(2.0, -static_cast<double>(j)));
}

double moment_sum(const std::vector<cplx>& spectrum, int m) {
    if (m < 1) throw DomainError("moment_sum: m must be >= 1");
    long double total = 0.0L;
    for (const cplx& z : spectrum)
        total += std::pow(static_cast<long double>(std::abs(z)), static_cast<long double>(m));
    return static_cast<double>(total);
}

}  // namespace pds
