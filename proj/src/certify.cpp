// ============================================================================
// Root certification: residue-tree search with strong-Hensel cutoff, Newton
// lifting, intersectivity certificates, root systems, profiles.
// ============================================================================

#include "pds/certify.hpp"

#include <algorithm>

#include "pds/poly_algebra.hpp"
#include "pds/sieve.hpp"

namespace pds {

const char* to_string(InputMode m) {
    return m == InputMode::Integer ? "integer" : "prime";
}

const char* to_string(CertifyStatus s) {
    switch (s) {
        case CertifyStatus::IntersectiveComplete: return "intersective_complete";
        case CertifyStatus::IntersectiveUpTo: return "intersective_up_to";
        case CertifyStatus::NotIntersective: return "not_intersective";
        case CertifyStatus::PIntersectiveComplete: return "p_intersective_complete";
        case CertifyStatus::PIntersectiveUpTo: return "p_intersective_up_to";
        case CertifyStatus::NotPIntersective: return "not_p_intersective";
    }
    return "?";
}

const char* to_string(SlotClass c) {
    switch (c) {
        case SlotClass::General: return "general";
        case SlotClass::Monomial: return "monomial";
        case SlotClass::Vanishing: return "vanishing";
    }
    return "?";
}

namespace {

int valuation(mpz_class v, uint64_t p) {
    if (v == 0) throw DomainError("valuation of zero");
    int k = 0;
    while (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
        mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), p);
        ++k;
    }
    return k;
}

mpz_class pow_ui(uint64_t p, int k) {
    mpz_class m;
    mpz_ui_pow_ui(m.get_mpz_t(), p, k);
    return m;
}

// Residues s mod p^level with u(s) = 0 mod p^level, grown level by level.
// unit_only prunes classes divisible by p at the first level. Node budget
// guards against accidental blowups.
std::vector<mpz_class> residue_tree(const IntPoly& u, uint64_t p, int level, bool unit_only) {
    std::vector<mpz_class> cur{mpz_class(0)};  // the single class mod p^0
    mpz_class pj = 1;                          // p^j
    for (int j = 0; j < level; ++j) {
        std::vector<mpz_class> next;
        mpz_class pj1 = pj * static_cast<unsigned long>(p);
        for (const auto& s : cur) {
            for (uint64_t t = 0; t < p; ++t) {
                mpz_class cand = s + pj * static_cast<unsigned long>(t);
                if (j == 0 && unit_only && cand == 0) continue;
                if (u.eval_mod(cand, pj1) == 0) next.push_back(cand);
            }
        }
        if (next.size() > 2000000) throw ResourceError("residue tree too wide");
        cur = std::move(next);
        pj = pj1;
        if (cur.empty()) break;
    }
    return cur;
}

// Newton-lift a certified class of squarefree u to at least precision k.
// s satisfies v_p(u(s)) > 2 v_p(u'(s)); returns residue mod p^k.
mpz_class newton_lift(const IntPoly& u, uint64_t p, mpz_class s, int k) {
    IntPoly up = u.derivative();
    mpz_class b = up.eval(s);
    if (b == 0) throw ValidationFailure("derivative vanished during lift");
    int v = valuation(b, p);
    for (int iter = 0; iter < 200; ++iter) {
        mpz_class a = u.eval(s);
        if (a == 0) break;  // exact integer root
        int mu = valuation(a, p);
        if (mu - v >= k) break;  // class mod p^k is settled
        // s <- s - a/b, computed modulo a comfortably deep power.
        b = up.eval(s);
        v = valuation(b, p);
        if (mu <= 2 * v) throw ValidationFailure("lift invariant lost");
        int work = std::max(2 * mu, k + v + 2);
        mpz_class mod = pow_ui(p, work);
        mpz_class pv = pow_ui(p, v);
        mpz_class ahat = a / pv, bhat = b / pv;
        mpz_class inv;
        if (mpz_invert(inv.get_mpz_t(), bhat.get_mpz_t(), mod.get_mpz_t()) == 0)
            throw ValidationFailure("non-invertible unit during lift");
        mpz_class c = (ahat * inv) % mod;
        s = (s - c) % mod;
        if (s < 0) s += mod;
    }
    mpz_class out = s % pow_ui(p, k);
    if (out < 0) out += pow_ui(p, k);
    return out;
}

std::vector<PadicRootClass> padic_roots_impl(const IntPoly& h, uint64_t p, int precision,
                                             bool unit_only) {
    if (h.degree() < 1) throw DomainError("padic roots require degree >= 1");
    if (!is_prime_u64(p)) throw DomainError("p must be prime");
    if (precision < 1) throw DomainError("precision must be >= 1");
    std::vector<PadicRootClass> out;
    for (const auto& [u, mult] : yun_squarefree(h)) {
        if (u.degree() < 1) continue;
        mpz_class res = resultant(u, u.derivative());
        if (res == 0) throw ValidationFailure("squarefree factor with zero resultant");
        int R = valuation(res, p);
        int level = 2 * R + 1;
        for (const auto& s : residue_tree(u, p, level, unit_only)) {
            // Survivors at level 2R+1 satisfy the strong Hensel condition:
            // v_p(u(s)) >= 2R+1 > 2R >= 2 v_p(u'(s)).
            PadicRootClass cls;
            cls.p = p;
            cls.precision = precision;
            cls.modulus = pow_ui(p, precision);
            cls.residue = precision <= level ? mpz_class(s % cls.modulus)
                                             : newton_lift(u, p, s, precision);
            cls.multiplicity = mult;
            cls.liftable = true;
            cls.witness_level = level;
            out.push_back(std::move(cls));
        }
    }
    std::sort(out.begin(), out.end(), [](const PadicRootClass& a, const PadicRootClass& b) {
        if (a.residue != b.residue) return a.residue < b.residue;
        return a.multiplicity < b.multiplicity;
    });
    // Distinct roots can collapse to one class at low precision; keep one entry.
    out.erase(std::unique(out.begin(), out.end(),
                          [](const PadicRootClass& a, const PadicRootClass& b) {
                              return a.residue == b.residue &&
                                     a.multiplicity == b.multiplicity;
                          }),
              out.end());
    return out;
}

// Smallest j such that h has no (unit) root modulo p^j, found by exhausting
// the residue tree of h itself level by level; returns p^j. The search is
// guaranteed to terminate if no admissible p-adic root exists.
mpz_class no_root_witness(const IntPoly& h, uint64_t p, bool unit_only) {
    mpz_class full_cont = 0;
    for (const auto& c : h.coeffs())
        mpz_gcd(full_cont.get_mpz_t(), full_cont.get_mpz_t(), c.get_mpz_t());
    int guard = valuation(full_cont, p) + 1;
    for (const auto& [u, mult] : yun_squarefree(h)) {
        if (u.degree() < 1) continue;
        mpz_class res = resultant(u, u.derivative());
        guard += mult * (2 * valuation(res, p) + 1);
    }
    std::vector<mpz_class> cur{mpz_class(0)};
    mpz_class pj = 1;
    for (int j = 0; j < guard + 1; ++j) {
        std::vector<mpz_class> next;
        mpz_class pj1 = pj * static_cast<unsigned long>(p);
        for (const auto& s : cur) {
            for (uint64_t t = 0; t < p; ++t) {
                mpz_class cand = s + pj * static_cast<unsigned long>(t);
                if (j == 0 && unit_only && cand == 0) continue;
                if (h.eval_mod(cand, pj1) == 0) next.push_back(cand);
            }
        }
        if (next.empty()) return pj1;
        if (next.size() > 2000000) throw ResourceError("witness search too wide");
        cur = std::move(next);
        pj = pj1;
    }
    throw ValidationFailure("no-root witness search exceeded its certified depth");
}

}  // namespace

std::vector<PadicRootClass> padic_roots(const IntPoly& h, uint64_t p, int precision) {
    return padic_roots_impl(h, p, precision, false);
}

std::vector<PadicRootClass> padic_unit_roots(const IntPoly& h, uint64_t p, int precision) {
    return padic_roots_impl(h, p, precision, true);
}

bool verify_no_root_mod(const IntPoly& h, const mpz_class& q, InputMode mode) {
    if (q < 2) throw DomainError("modulus must be >= 2");
    for (mpz_class s = 0; s < q; ++s) {
        if (mode == InputMode::Prime) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), q.get_mpz_t());
            if (g != 1) continue;
        }
        if (h.eval_mod(s, q) == 0) return false;
    }
    return true;
}

Certificate certify_intersective(const IntPoly& h, uint64_t p_max, InputMode mode) {
    if (h.degree() < 1) throw DomainError("certification requires degree >= 1");
    Certificate cert;
    cert.mode = mode;
    cert.p_max = p_max;

    // ---- complete routes via rational roots --------------------------------
    auto roots = rational_roots(h);
    if (mode == InputMode::Integer) {
        // A pair of roots a/b, c/d with gcd(b,d)=1 covers every prime; a
        // single integer root is the i=j case.
        for (size_t i = 0; i < roots.size(); ++i) {
            for (size_t j = i; j < roots.size(); ++j) {
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), roots[i].value.get_den().get_mpz_t(),
                        roots[j].value.get_den().get_mpz_t());
                if (g == 1) {
                    cert.status = CertifyStatus::IntersectiveComplete;
                    cert.rational_roots_used = {roots[i].value};
                    if (j != i) cert.rational_roots_used.push_back(roots[j].value);
                    cert.detail = "rational roots with coprime denominators";
                    return cert;
                }
            }
        }
    } else {
        // Unit everywhere: a root +-1, or roots a/b, c/d with gcd(ab, cd)=1.
        for (size_t i = 0; i < roots.size(); ++i) {
            for (size_t j = i; j < roots.size(); ++j) {
                mpz_class ni = roots[i].value.get_num() * roots[i].value.get_den();
                mpz_class nj = roots[j].value.get_num() * roots[j].value.get_den();
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), ni.get_mpz_t(), nj.get_mpz_t());
                if (g == 1) {
                    cert.status = CertifyStatus::PIntersectiveComplete;
                    cert.rational_roots_used = {roots[i].value};
                    if (j != i) cert.rational_roots_used.push_back(roots[j].value);
                    cert.detail = "rational unit roots covering every prime";
                    return cert;
                }
            }
        }
    }

    // ---- prime-by-prime scan ------------------------------------------------
    bool unit_only = (mode == InputMode::Prime);
    mpz_class disc = discriminant(h);
    for (uint32_t p : primes_upto(p_max)) {
        int prec = 2 * valuation(disc, p) + 3;
        auto classes = padic_roots_impl(h, p, prec, unit_only);
        if (classes.empty()) {
            cert.status = unit_only ? CertifyStatus::NotPIntersective
                                    : CertifyStatus::NotIntersective;
            cert.witness_prime = p;
            cert.witness_modulus = no_root_witness(h, p, unit_only);
            cert.detail = "exhaustively verified absence of roots";
            return cert;
        }
        PrimeWitness w;
        w.p = p;
        w.residue = classes.front().residue;
        w.precision = classes.front().precision;
        w.multiplicity = classes.front().multiplicity;
        cert.witnesses.push_back(std::move(w));
    }
    cert.status = unit_only ? CertifyStatus::PIntersectiveUpTo
                            : CertifyStatus::IntersectiveUpTo;
    cert.detail = "certified liftable root at every scanned prime";
    return cert;
}

// ----------------------------------------------------------------------------
// RootSystem
// ----------------------------------------------------------------------------

RootSystem::RootSystem(std::vector<IntPoly> polys, InputMode mode)
    : polys_(std::move(polys)), mode_(mode) {
    if (polys_.empty()) throw DomainError("root system needs at least one polynomial");
    for (const auto& h : polys_) {
        if (h.degree() < 1) throw DomainError("root system polynomials need degree >= 1");
    }
    disc_.reserve(polys_.size());
    for (const auto& h : polys_) disc_.push_back(discriminant(h));
    cache_.resize(polys_.size());
}

RootSystem::Selected RootSystem::select(size_t i, uint64_t p) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto& slot = cache_.at(i);
        auto it = slot.find(p);
        if (it != slot.end()) return it->second;
    }
    const IntPoly& h = polys_[i];
    Selected sel;
    auto mult_of = [&](const mpz_class& r) {
        for (const auto& rr : rational_roots(h))
            if (rr.value == mpq_class(r)) return rr.multiplicity;
        throw ValidationFailure("forced root lost its multiplicity");
    };
    if (mode_ == InputMode::Integer && h.eval(0) == 0) {
        sel.rational = true;
        sel.rational_value = 0;
        sel.multiplicity = mult_of(0);
    } else if (mode_ == InputMode::Prime && h.eval(1) == 0) {
        sel.rational = true;
        sel.rational_value = 1;
        sel.multiplicity = mult_of(1);
    } else if (mode_ == InputMode::Prime && h.eval(-1) == 0) {
        sel.rational = true;
        sel.rational_value = -1;
        sel.multiplicity = mult_of(-1);
    } else {
        int prec = 2 * valuation(disc_[i], p) + 3;
        auto classes = padic_roots_impl(h, p, prec, mode_ == InputMode::Prime);
        if (classes.empty()) throw UncertifiedPrime(p, i);
        sel.cls = classes.front();  // smallest nonnegative residue
        sel.multiplicity = sel.cls.multiplicity;
    }
    std::lock_guard<std::mutex> lk(mu_);
    return cache_.at(i).emplace(p, std::move(sel)).first->second;
}

mpz_class RootSystem::root_residue(size_t i, uint64_t p, int k) const {
    if (k < 1) throw DomainError("precision must be >= 1");
    Selected sel = select(i, p);
    mpz_class mod = pow_ui(p, k);
    if (sel.rational) {
        mpz_class r = sel.rational_value % mod;
        if (r < 0) r += mod;
        return r;
    }
    if (k <= sel.cls.precision) {
        return sel.cls.residue % mod;
    }
    // Deepen: recompute the certified classes at precision k and take the one
    // refining the stored class; the cache only ever grows in precision, so
    // residues stay compatible across all queried precisions.
    auto classes = padic_roots_impl(polys_[i], p, k, mode_ == InputMode::Prime);
    for (const auto& c : classes) {
        if (c.multiplicity == sel.cls.multiplicity &&
            c.residue % sel.cls.modulus == sel.cls.residue) {
            std::lock_guard<std::mutex> lk(mu_);
            Selected& stored = cache_[i][p];
            if (k > stored.cls.precision) stored.cls = c;
            return c.residue;
        }
    }
    throw ValidationFailure("no class refined the stored root during lift");
}

int RootSystem::root_multiplicity(size_t i, uint64_t p) const {
    return select(i, p).multiplicity;
}

mpz_class RootSystem::lambda_i(size_t i, const mpz_class& d) const {
    if (d < 1) throw DomainError("lambda requires d >= 1");
    mpz_class out = 1;
    for (const auto& [p, e] : factorize_mpz(d)) {
        if (!p.fits_ulong_p()) throw ResourceError("prime factor too large");
        int m = root_multiplicity(i, p.get_ui());
        mpz_class pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(m) * e);
        out *= pe;
    }
    return out;
}

mpz_class RootSystem::lambda_total(const mpz_class& d) const {
    if (d < 1) throw DomainError("lambda requires d >= 1");
    mpz_class out = 1;
    for (const auto& [p, e] : factorize_mpz(d)) {
        if (!p.fits_ulong_p()) throw ResourceError("prime factor too large");
        unsigned long mprod = 1;
        for (size_t i = 0; i < polys_.size(); ++i)
            mprod *= static_cast<unsigned long>(root_multiplicity(i, p.get_ui()));
        mpz_class pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), mprod * e);
        out *= pe;
    }
    return out;
}

mpz_class RootSystem::lambda_tilde(size_t i, const mpz_class& d) const {
    if (d < 1) throw DomainError("lambda requires d >= 1");
    mpz_class out = 1;
    for (const auto& [p, e] : factorize_mpz(d)) {
        if (!p.fits_ulong_p()) throw ResourceError("prime factor too large");
        unsigned long mprod = 1;
        for (size_t j = 0; j < polys_.size(); ++j)
            if (j != i) mprod *= static_cast<unsigned long>(root_multiplicity(j, p.get_ui()));
        mpz_class pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), mprod * e);
        out *= pe;
    }
    return out;
}

// ----------------------------------------------------------------------------
// Profiles
// ----------------------------------------------------------------------------

SystemProfile compute_profile(const std::vector<IntPoly>& polys, size_t l1, size_t l2,
                              size_t l3) {
    if (polys.empty()) throw DomainError("profile needs at least one polynomial");
    if (l1 + l2 + l3 != polys.size())
        throw DomainError("partition sizes must sum to the number of polynomials");
    std::vector<SlotClass> classes;
    for (size_t i = 0; i < l1; ++i) classes.push_back(SlotClass::General);
    for (size_t i = 0; i < l2; ++i) classes.push_back(SlotClass::Monomial);
    for (size_t i = 0; i < l3; ++i) classes.push_back(SlotClass::Vanishing);
    SystemProfile prof;
    prof.classes = classes;
    mpq_class inv_sum = 0, inv_sum_all = 0;
    prof.k_product = 1;
    for (size_t i = 0; i < polys.size(); ++i) {
        const IntPoly& h = polys[i];
        if (h.degree() < 1) throw InvalidPartition("slot has degree < 1", i);
        int k = h.degree();
        int r = h.nonzero_coeff_count();
        prof.degrees.push_back(k);
        prof.sparse_counts.push_back(r);
        prof.k_product *= k;
        inv_sum_all += mpq_class(1, k);
        switch (classes[i]) {
            case SlotClass::General:
                ++prof.l1;
                inv_sum += mpq_class(1, k);
                break;
            case SlotClass::Monomial:
                if (!h.is_nonconstant_monomial())
                    throw InvalidPartition("monomial slot is not a nonconstant monomial", i);
                ++prof.l2;
                inv_sum += mpq_class(1, 2);
                break;
            case SlotClass::Vanishing:
                if (h.is_nonconstant_monomial())
                    throw InvalidPartition("vanishing slot must not be a monomial", i);
                if (!h.has_zero_constant_term())
                    throw InvalidPartition("vanishing slot needs zero constant term", i);
                ++prof.l3;
                inv_sum += mpq_class(1, r);
                break;
        }
    }
    prof.D = 1 / inv_sum;
    prof.Dprime = 1 / inv_sum_all;
    if (!prof.k_product.fits_ulong_p() || prof.k_product.get_ui() > 100000)
        throw ResourceError("degree product too large for exponent bookkeeping");
    unsigned long tenk = 10 * prof.k_product.get_ui();
    mpz_class K;
    mpz_ui_pow_ui(K.get_mpz_t(), 2, tenk);
    prof.K = K;
    prof.rho = mpq_class(1) / mpq_class(K);
    return prof;
}

}  // namespace pds
