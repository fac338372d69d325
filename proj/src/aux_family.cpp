// ============================================================================
// Shifted / rescaled polynomial families: construction, content bound,
// inheritance identity. All arithmetic exact.
// ============================================================================

#include "pds/aux_family.hpp"

#include <algorithm>
#include <cmath>

#include "pds/errors.hpp"
#include "pds/poly_algebra.hpp"
#include "pds/sieve.hpp"

namespace pds {

AuxiliaryFamily::AuxiliaryFamily(std::shared_ptr<RootSystem> sys) : sys_(std::move(sys)) {
    if (!sys_ || sys_->size() == 0) throw DomainError("AuxiliaryFamily: empty root system");
}

mpz_class AuxiliaryFamily::shift(size_t i, const mpz_class& d) {
    if (i >= sys_->size()) throw DomainError("shift: polynomial index out of range");
    if (d < 1) throw DomainError("shift: d must be >= 1");
    if (d == 1) return 0;

    // CRT of the selected root residues mod p^v_p(d).
    mpz_class R = 0, M = 1;
    for (const auto& [p, e] : factorize_mpz(d)) {
        if (!p.fits_ulong_p()) throw ResourceError("shift: prime factor exceeds word size");
        mpz_class pk = 1;
        for (int t = 0; t < e; ++t) pk *= p;
        mpz_class c = sys_->root_residue(i, p.get_ui(), e);
        mpz_class inv;
        if (mpz_invert(inv.get_mpz_t(), M.get_mpz_t(), pk.get_mpz_t()) == 0)
            throw ValidationFailure("shift: CRT moduli not coprime");
        mpz_class t = ((c - R) * inv) % pk;
        if (t < 0) t += pk;
        R += M * t;
        M *= pk;
    }
    if (M != d) throw ValidationFailure("shift: factorization mismatch");
    mpz_class r = (R == 0) ? mpz_class(0) : mpz_class(R - d);

    mpz_class val = sys_->poly(i).eval(r);
    if (val % d != 0) throw ValidationFailure("shift: d does not divide h_i(r)");
    if (sys_->mode() == InputMode::Prime) {
        mpz_class g = gcd(R, d);
        if (g != 1) throw ValidationFailure("shift: residue not a unit in prime-input mode");
    }
    return r;
}

AuxEntry AuxiliaryFamily::entry(size_t i, const mpz_class& d) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find({i, d});
        if (it != cache_.end()) return it->second;
    }
    AuxEntry e;
    e.d = d;
    e.r = shift(i, d);
    e.lambda = sys_->lambda_i(i, d);
    try {
        e.aux = exact_div_scalar(compose_affine(sys_->poly(i), e.r, d), e.lambda);
    } catch (const NonIntegralDivision& ex) {
        throw NonIntegralDivision(
            "aux polynomial for polynomial #" + std::to_string(i) + " not integral", ex.index);
    }
    e.lead = e.aux.leading();
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, inserted] = cache_.emplace(std::make_pair(i, d), e);
    (void)inserted;  // concurrent fills compute identical entries
    return it->second;
}

AuxiliaryFamily::ContentBound AuxiliaryFamily::check_content_bound(size_t i, const mpz_class& d) {
    AuxEntry e = entry(i, d);
    const IntPoly& h = sys_->poly(i);
    int k = h.degree();
    mpz_class disc = abs(discriminant(h));
    mpz_class pow = 1;
    for (int t = 0; t + 1 < k; ++t) pow *= disc;  // |disc|^(k-1)
    ContentBound cb;
    cb.lhs = e.aux.content();
    cb.rhs = ceil_sqrt(pow) * h.content();
    cb.ok = cb.lhs <= cb.rhs;
    return cb;
}

std::vector<std::pair<size_t, AuxEntry>> AuxiliaryFamily::snapshot() const {
    std::lock_guard<std::mutex> lk(mu_);
    std::vector<std::pair<size_t, AuxEntry>> out;
    out.reserve(cache_.size());
    for (const auto& [key, e] : cache_) out.emplace_back(key.first, e);
    return out;
}

// ----------------------------------------------------------------------------
// Inheritance identity.
// ----------------------------------------------------------------------------

InheritanceResult inheritance_pushforward(AuxiliaryFamily& fam, const InheritanceWitness& w) {
    const size_t l = fam.size();
    if (w.d.size() != l || w.n.size() != l)
        throw DomainError("inheritance_pushforward: arity mismatch");
    if (w.q < 1) throw DomainError("inheritance_pushforward: q must be >= 1");
    if (w.a_minus_aprime == 0)
        throw PreconditionViolated("inheritance_pushforward: difference is zero");
    const bool prime_mode = fam.system().mode() == InputMode::Prime;

    // Validate the input representation a - a' = sum h_i^{lt_i(q) d_i}(n_i),
    // every term nonzero, and (prime mode) every index in the prime fiber.
    std::vector<mpz_class> lt(l), big_d(l), term(l);
    mpz_class total = 0;
    for (size_t i = 0; i < l; ++i) {
        if (w.d[i] < 1) throw DomainError("inheritance_pushforward: d_i must be >= 1");
        if (w.n[i] < 1) throw DomainError("inheritance_pushforward: n_i must be >= 1");
        lt[i] = fam.lambda_tilde(i, w.q);
        big_d[i] = lt[i] * w.d[i];
        AuxEntry big = fam.entry(i, big_d[i]);
        term[i] = big.aux.eval(w.n[i]);
        if (term[i] == 0)
            throw PreconditionViolated("inheritance_pushforward: zero term in representation");
        if (prime_mode) {
            mpz_class x = big_d[i] * w.n[i] + big.r;
            if (!is_prime_mpz(x))
                throw PreconditionViolated("inheritance_pushforward: index not in prime fiber");
        }
        total += term[i];
    }
    if (total != w.a_minus_aprime)
        throw PreconditionViolated("inheritance_pushforward: representation does not sum to a - a'");

    InheritanceResult res;
    res.s.resize(l);
    res.fiber_points.resize(l);
    res.lambda_q = fam.lambda_total(w.q);
    res.rhs = res.lambda_q * w.a_minus_aprime;
    res.lhs = 0;
    for (size_t i = 0; i < l; ++i) {
        AuxEntry base = fam.entry(i, w.d[i]);
        AuxEntry big = fam.entry(i, big_d[i]);
        mpz_class num = big.r - base.r;
        if (num % w.d[i] != 0)
            throw ValidationFailure("inheritance_pushforward: shift compatibility broken");
        res.s[i] = num / w.d[i];
        if (res.s[i] > 0 || res.s[i] <= -lt[i])
            throw ValidationFailure("inheritance_pushforward: s_i outside (-lt_i(q), 0]");
        mpz_class idx = res.s[i] + lt[i] * w.n[i];
        if (idx < 1) throw ValidationFailure("inheritance_pushforward: shifted index not positive");
        mpz_class v = base.aux.eval(idx);
        // Per-term identity: h_i^{d_i} at the shifted index equals
        // lambda_i(lt_i(q)) times the original term.
        mpz_class scale = fam.lambda_value(i, lt[i]);
        if (v != scale * term[i])
            throw ValidationFailure("inheritance_pushforward: per-term identity failed");
        res.fiber_points[i] = w.d[i] * idx + base.r;
        if (res.fiber_points[i] != big_d[i] * w.n[i] + big.r)
            throw ValidationFailure("inheritance_pushforward: fiber point mismatch");
        if (prime_mode && !is_prime_mpz(res.fiber_points[i]))
            throw ValidationFailure("inheritance_pushforward: shifted index left the prime fiber");
        res.lhs += v;
    }
    res.ok = (res.lhs == res.rhs);
    if (!res.ok) throw ValidationFailure("inheritance_pushforward: sum identity failed");
    return res;
}

// ----------------------------------------------------------------------------
// Leading-term-dominance discrepancy.
// ----------------------------------------------------------------------------

long symbig_discrepancy(const IntPoly& aux, const mpz_class& x) {
    int k = aux.degree();
    if (k < 1) throw DomainError("symbig_discrepancy: degree must be >= 1");
    if (x < 1) throw DomainError("symbig_discrepancy: x must be >= 1");
    mpz_class lead = aux.leading();
    int sgn = (lead > 0) ? 1 : -1;
    mpz_class alead = abs(lead);

    // T = floor((x / |lead|)^{1/k}).
    mpz_class q = x / alead;
    mpz_class T;
    mpz_root(T.get_mpz_t(), q.get_mpz_t(), k);

    // probe = sgn * aux is increasing past the Cauchy bound of its derivative;
    // binary-search the first n beyond it with probe(n) >= x. Past
    // max(that, T) neither side of the symmetric difference has members.
    IntPoly probe = (sgn == 1) ? aux : -aux;
    IntPoly der = probe.derivative();
    mpz_class lead_abs = abs(der.leading());
    mpz_class start = 1;
    for (int j = 0; j < der.degree(); ++j) {
        mpz_class b = abs(der.coeff(j)) / lead_abs + 2;
        if (b > start) start = b;
    }
    mpz_class hi = start;
    while (probe.eval(hi) < x) hi *= 2;
    mpz_class lo = start;  // invariant: probe(hi) >= x
    while (lo < hi) {
        mpz_class mid = (lo + hi) / 2;
        if (probe.eval(mid) >= x) hi = mid;
        else lo = mid + 1;
    }
    mpz_class stop = std::max(lo, T) + 1;
    if (stop > 50000000) throw ResourceError("symbig_discrepancy: window too large");

    long count = 0;
    long stop_l = static_cast<long>(stop.get_si());
    for (long n = 1; n <= stop_l; ++n) {
        mpz_class v = probe.eval(n);
        bool in_image = (v > 0 && v < x);
        bool in_box = (n >= 1 && mpz_class(n) <= T);
        if (in_image != in_box) ++count;
    }
    return count;
}

}  // namespace pds
