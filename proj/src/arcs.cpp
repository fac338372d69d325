// ============================================================================
// Best rational approximation (continued fractions, exact comparisons) and
// the arc decomposition of Z_N with exact disjointness certification.
// ============================================================================

#include "pds/arcs.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "pds/errors.hpp"
#include "pds/parallel.hpp"

namespace pds {

namespace {

mpz_class mpq_floor(const mpq_class& x) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return f;
}

// Signed circle offset alpha - f, reduced into (-1/2, 1/2].
mpq_class circle_offset(const mpq_class& alpha, const mpq_class& f) {
    mpq_class d = alpha - f;
    d -= mpq_floor(d);  // now in [0, 1)
    if (d > mpq_class(1, 2)) d -= 1;
    return d;
}

long checked_long(const mpz_class& z, const char* what) {
    if (!z.fits_slong_p()) throw ResourceError(std::string(what) + " exceeds machine range");
    return z.get_si();
}

}  // namespace

const char* to_string(ArcKind k) {
    switch (k) {
        case ArcKind::Zero: return "zero";
        case ArcKind::Major: return "major";
        case ArcKind::Minor: return "minor";
    }
    return "?";
}

std::pair<Rational, mpq_class> best_rational_exact(const mpq_class& alpha, long Q) {
    if (Q < 1) throw DomainError("best_rational: Q must be >= 1");
    mpq_class frac = alpha - mpq_floor(alpha);  // [0, 1)

    // Candidates: all continued-fraction convergents of frac with denominator
    // <= Q, plus the boundary semiconvergent against the last convergent.
    std::vector<std::pair<mpz_class, mpz_class>> cand;  // (a, q), q <= Q
    cand.emplace_back(0, 1);
    mpz_class pm1 = 1, qm1 = 0, p0 = 0, q0 = 1;
    mpq_class x = frac;
    while (x != 0) {
        x = 1 / x;  // previous remainder was in (0, 1), so x > 1
        mpz_class a = mpq_floor(x);
        x -= mpq_class(a);
        mpz_class p1 = a * p0 + pm1;
        mpz_class q1 = a * q0 + qm1;
        if (q1 > Q) {
            mpz_class j = (Q - qm1) / q0;  // largest semiconvergent index, < a
            if (j >= 1) cand.emplace_back(j * p0 + pm1, j * q0 + qm1);
            break;
        }
        cand.emplace_back(p1, q1);
        pm1 = p0;
        qm1 = q0;
        p0 = p1;
        q0 = q1;
    }

    bool have = false;
    mpz_class ba = 0, bq = 1;
    mpq_class bbeta = 0, bdist = 0;
    for (const auto& [a, q] : cand) {
        mpq_class f(a, q);
        f.canonicalize();
        mpq_class beta = circle_offset(frac, f);
        mpq_class dist = abs(beta);
        // Normalized representative for tie-breaking.
        mpz_class cq = f.get_den();
        mpz_class ca = f.get_num();
        mpz_fdiv_r(ca.get_mpz_t(), ca.get_mpz_t(), cq.get_mpz_t());
        bool better = !have || dist < bdist ||
                      (dist == bdist && (cq < bq || (cq == bq && ca < ba)));
        if (better) {
            have = true;
            ba = ca;
            bq = cq;
            bbeta = beta;
            bdist = dist;
        }
    }
    Rational best(checked_long(ba, "best_rational numerator"),
                  checked_long(bq, "best_rational denominator"));
    return {best, bbeta};
}

std::pair<Rational, double> best_rational(double alpha, long Q) {
    if (!std::isfinite(alpha)) throw DomainError("best_rational: alpha must be finite");
    auto [aq, beta] = best_rational_exact(mpq_class(alpha), Q);
    return {aq, beta.get_d()};
}

ArcLabel classify(long t, long N, double K, long Q) {
    if (N < 1) throw DomainError("classify: N must be >= 1");
    if (t < 0 || t >= N) throw DomainError("classify: t must lie in [0, N)");
    if (Q < 1) throw DomainError("classify: Q must be >= 1");
    if (!(K >= 0.0) || !std::isfinite(K)) throw DomainError("classify: K must be finite and >= 0");
    ArcLabel lab;
    if (t == 0) {
        lab.kind = ArcKind::Zero;
        lab.aq = Rational(0, 1);
        lab.beta = 0.0;
        return lab;
    }
    auto [aq, beta] = best_rational_exact(mpq_class(t, N), Q);
    lab.aq = aq;
    lab.beta = beta.get_d();
    mpq_class radius = mpq_class(K) / N;
    lab.kind = (abs(beta) < radius) ? ArcKind::Major : ArcKind::Minor;
    return lab;
}

DisjointnessReport arc_disjointness(const mpq_class& gamma, long Q) {
    if (Q < 1) throw DomainError("arc_disjointness: Q must be >= 1");
    if (gamma <= 0) throw DomainError("arc_disjointness: gamma must be > 0");
    if (Q > 2000) throw ResourceError("arc_disjointness: Q too large for exact Farey scan");

    DisjointnessReport rep;
    rep.hypothesis = 2 * gamma * Q * Q < 1;

    std::vector<std::pair<long, long>> farey;  // reduced (a, q), q <= Q
    for (long q = 1; q <= Q; ++q)
        for (long a = 0; a < q; ++a)
            if (std::gcd(a, q) == 1) farey.emplace_back(a, q);
    std::sort(farey.begin(), farey.end(), [](const auto& l, const auto& r) {
        return l.first * r.second < r.first * l.second;
    });

    // Open arcs (a/q - gamma, a/q + gamma) are pairwise disjoint iff every
    // consecutive circular gap is >= 2*gamma.
    const mpz_class gnum = gamma.get_num(), gden = gamma.get_den();
    rep.disjoint = true;
    const size_t m = farey.size();
    for (size_t i = 0; i < m; ++i) {
        const auto& [a1, q1] = farey[i];
        const auto& [a2, q2] = farey[(i + 1) % m];
        // gap = a2/q2 - a1/q1 (+1 on the wrap pair); compare gap >= 2*gamma.
        mpz_class num = mpz_class(a2) * q1 - mpz_class(a1) * q2;
        if (i + 1 == m) num += mpz_class(q1) * q2;
        if (num * gden < 2 * gnum * q1 * q2) {
            rep.disjoint = false;
            rep.witness = OverlapWitness{Rational(a1, q1), Rational(a2, q2)};
            break;
        }
    }
    if (rep.hypothesis && !rep.disjoint)
        throw ValidationFailure("arc_disjointness: overlap under 2*gamma*Q^2 < 1");
    return rep;
}

ArcDecomposition decompose(long N, double K, long Q) {
    if (N < 1) throw DomainError("decompose: N must be >= 1");
    if (Q < 1) throw DomainError("decompose: Q must be >= 1");
    if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("decompose: K must be finite and > 0");
    if (static_cast<double>(N) * Q * Q > 2e8)
        throw ResourceError("decompose: N*Q^2 too large for exact verification");

    ArcDecomposition dec;
    dec.N = N;
    dec.K = K;
    dec.Q = Q;
    dec.labels.resize(static_cast<size_t>(N));
    parallel_for(static_cast<size_t>(N), [&](size_t t) {
        dec.labels[t] = classify(static_cast<long>(t), N, K, Q);
    });

    dec.disjointness = arc_disjointness(mpq_class(K) / N, Q);

    // For every q <= Q: the union of M_r over r | q (reduced centers b/r)
    // must equal the union of the K/N-arcs around a/q for ALL residues a.
    const mpq_class radius = mpq_class(K) / N;
    std::vector<char> identity_ok(static_cast<size_t>(Q), 1);
    parallel_for(static_cast<size_t>(Q), [&](size_t qi) {
        const long q = static_cast<long>(qi) + 1;
        std::vector<long> divs;
        for (long r = 1; r <= q; ++r)
            if (q % r == 0) divs.push_back(r);
        for (long t = 0; t < N; ++t) {
            const mpq_class al(t, N);
            bool lhs = false;
            for (long r : divs) {
                for (long b = 0; b < r && !lhs; ++b)
                    if (std::gcd(b, r) == 1 && abs(circle_offset(al, mpq_class(b, r))) < radius)
                        lhs = true;
                if (lhs) break;
            }
            bool rhs = false;
            for (long a = 0; a < q && !rhs; ++a)
                if (abs(circle_offset(al, mpq_class(a, q))) < radius) rhs = true;
            if (lhs != rhs) {
                identity_ok[qi] = 0;
                return;
            }
        }
    });
    for (char ok : identity_ok)
        if (!ok) throw ValidationFailure("decompose: divisor-union arc identity failed");
    dec.mprime_identity = true;
    return dec;
}

std::string decomposition_csv(const ArcDecomposition& d) {
    std::ostringstream os;
    os << "t,kind,a,q\n";
    for (size_t t = 0; t < d.labels.size(); ++t) {
        const ArcLabel& l = d.labels[t];
        os << t << ',' << to_string(l.kind) << ',' << l.aq.a << ',' << l.aq.q << '\n';
    }
    return os.str();
}

}  // namespace pds
