// ============================================================================
// Forbidden-difference enumeration (monotone tail cutoff + sumset folding),
// dual-route avoidance verification, branch-and-bound maximum avoiding sets,
// circulant residue search, and verified digit-lifting constructions.
// ============================================================================

#include "pds/extremal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <string>

#include "pds/errors.hpp"
#include "pds/poly_algebra.hpp"
#include "pds/sieve.hpp"

namespace pds {

namespace {

// --------------------------------------------------------------------------
// Word-packed bit vector with the shift/AND operations the searches need.
// --------------------------------------------------------------------------
struct BitVec {
    std::vector<uint64_t> w;
    long n = 0;

    explicit BitVec(long bits = 0) : w(static_cast<size_t>((bits + 63) / 64), 0), n(bits) {}
    void set(long i) { w[static_cast<size_t>(i) >> 6] |= 1ULL << (i & 63); }
    void reset(long i) { w[static_cast<size_t>(i) >> 6] &= ~(1ULL << (i & 63)); }
    bool test(long i) const { return (w[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1ULL; }
    long count() const {
        long c = 0;
        for (uint64_t x : w) c += __builtin_popcountll(x);
        return c;
    }
    long count_from(long i) const {  // popcount of bits >= i
        if (i >= n) return 0;
        size_t k = static_cast<size_t>(i) >> 6;
        long c = __builtin_popcountll(w[k] & (~0ULL << (i & 63)));
        for (size_t j = k + 1; j < w.size(); ++j) c += __builtin_popcountll(w[j]);
        return c;
    }
    long next_set(long i) const {  // first set bit >= i, or -1
        if (i >= n) return -1;
        size_t k = static_cast<size_t>(i) >> 6;
        uint64_t cur = w[k] & (~0ULL << (i & 63));
        while (true) {
            if (cur) return static_cast<long>((k << 6) + static_cast<size_t>(__builtin_ctzll(cur)));
            if (++k >= w.size()) return -1;
            cur = w[k];
        }
    }
    // this &= ~(other << s), s >= 0 — knock out everything s above a set bit.
    void clear_shifted(const BitVec& other, long s) {
        const size_t ws = static_cast<size_t>(s) >> 6;
        const int bs = s & 63;
        for (size_t i = w.size(); i-- > ws;) {
            uint64_t v = other.w[i - ws] << bs;
            if (bs && i - ws > 0) v |= other.w[i - ws - 1] >> (64 - bs);
            w[i] &= ~v;
        }
    }
};

// this = a & (a >> s); returns first set bit or -1.
long and_shift_first(const BitVec& a, long s) {
    const size_t ws = static_cast<size_t>(s) >> 6;
    const int bs = s & 63;
    for (size_t i = 0; i + ws < a.w.size(); ++i) {
        uint64_t v = a.w[i + ws] >> bs;
        if (bs && i + ws + 1 < a.w.size()) v |= a.w[i + ws + 1] << (64 - bs);
        v &= a.w[i];
        if (v) return static_cast<long>((i << 6) + static_cast<size_t>(__builtin_ctzll(v)));
    }
    return -1;
}

// n0 such that h is strictly monotone on [n0, oo): one past the Cauchy bound
// on the real roots of h'.
long monotone_start(const IntPoly& h) {
    IntPoly d = h.derivative();
    if (d.degree() < 1) return 0;
    mpz_class lead = abs(d.leading());
    mpz_class m = 0;
    for (int i = 0; i < d.degree(); ++i) {
        mpz_class c = abs(d.coeff(i));
        mpz_class q = c / lead + 1;
        if (q > m) m = q;
    }
    mpz_class n0 = m + 2;
    if (!n0.fits_slong_p()) throw ResourceError("monotone_start: coefficient bound too large");
    return n0.get_si();
}

struct TermValues {
    std::vector<long> vals;  // admissible nonzero term values
    long neg_extent = 0;     // B_i = max(0, -min value over all inputs)
};

// Enumerate { h(n) != 0 : n admissible, h(n) <= hi } for a polynomial with
// positive leading coefficient (fiber-restricted in prime mode).
TermValues enumerate_values(const IntPoly& h, long hi, InputMode mode, const mpz_class& d,
                            const mpz_class& r) {
    TermValues tv;
    const long n0 = monotone_start(h);
    mpz_class gmin = h.eval(1);
    for (long n = 2; n <= n0; ++n) gmin = std::min(gmin, h.eval(n));
    if (gmin < 0) {
        if (!gmin.fits_slong_p()) throw ResourceError("term minimum too large");
        tv.neg_extent = -gmin.get_si();
    }
    for (long n = 1;; ++n) {
        mpz_class v = h.eval(n);
        if (n > n0 && v > hi) break;
        if (v == 0 || v > hi) continue;
        if (mode == InputMode::Prime && !is_prime_mpz(d * n + r)) continue;
        tv.vals.push_back(static_cast<long>(v.get_si()));
        if (tv.vals.size() > (1u << 22))
            throw ResourceError("forbidden_differences: too many term values");
    }
    std::sort(tv.vals.begin(), tv.vals.end());
    tv.vals.erase(std::unique(tv.vals.begin(), tv.vals.end()), tv.vals.end());
    return tv;
}

ForbiddenSet build_forbidden(const std::vector<IntPoly>& polys, long N, InputMode mode,
                             const std::vector<mpz_class>& d, const std::vector<mpz_class>& r,
                             const std::vector<mpz_class>& shifts) {
    if (N < 1) throw DomainError("forbidden_differences: window must be >= 1");
    if (polys.empty()) throw DomainError("forbidden_differences: empty system");
    for (const IntPoly& h : polys)
        if (h.degree() < 1)
            throw UnsupportedSystem("forbidden_differences: constant polynomial term");
    const size_t l = polys.size();
    ForbiddenSet F;
    F.N = N;
    F.polys = polys;
    F.mode = mode;
    F.shifts = shifts;

    std::set<long> out;
    if (l == 1) {
        // Single polynomial: either sign of leading coefficient; collect |v|.
        IntPoly h = polys[0];
        bool flipped = h.leading() < 0;
        if (flipped) {
            std::vector<mpz_class> c(static_cast<size_t>(h.degree()) + 1);
            for (int i = 0; i <= h.degree(); ++i) c[static_cast<size_t>(i)] = -h.coeff(i);
            h = IntPoly(c);
        }
        TermValues tv = enumerate_values(h, N - 1, mode, d[0], r[0]);
        for (long v : tv.vals)
            if (std::abs(v) >= 1 && std::abs(v) <= N - 1) out.insert(std::abs(v));
    } else {
        for (const IntPoly& h : polys)
            if (h.leading() < 0)
                throw UnsupportedSystem(
                    "forbidden_differences: multi-polynomial systems require positive leading "
                    "coefficients");
        // First pass: negative extents B_i; second: values up to N-1 + sum of
        // the other extents; fold with a shifted-bitset sumset.
        std::vector<TermValues> terms(l);
        std::vector<long> ext(l, 0);
        long ext_sum = 0;
        for (size_t i = 0; i < l; ++i) {
            const long n0 = monotone_start(polys[i]);
            mpz_class gmin = polys[i].eval(1);
            for (long n = 2; n <= n0; ++n) gmin = std::min(gmin, polys[i].eval(n));
            ext[i] = gmin < 0 ? static_cast<long>(-gmin.get_si()) : 0;
            ext_sum += ext[i];
        }
        const long offset = ext_sum;
        const long width = (N - 1) + 2 * offset + 2;
        if (width > (1L << 26)) throw ResourceError("forbidden_differences: sum range too large");
        for (size_t i = 0; i < l; ++i) {
            long hi = N - 1 + ext_sum - ext[i];
            terms[i] = enumerate_values(polys[i], hi, mode, d[i], r[i]);
        }
        std::vector<char> cur(static_cast<size_t>(width), 0);
        cur[static_cast<size_t>(offset)] = 1;  // empty partial sum
        long tail_ext = ext_sum;
        for (size_t i = 0; i < l; ++i) {
            tail_ext -= ext[i];
            std::vector<char> nxt(static_cast<size_t>(width), 0);
            const long cap = (N - 1) + tail_ext + offset;  // prune unreachable highs
            for (long s = 0; s < width; ++s) {
                if (!cur[static_cast<size_t>(s)]) continue;
                for (long v : terms[i].vals) {
                    long t = s + v;
                    if (t >= 0 && t <= cap) nxt[static_cast<size_t>(t)] = 1;
                }
            }
            cur.swap(nxt);
        }
        for (long s = 0; s < width; ++s) {
            if (!cur[static_cast<size_t>(s)]) continue;
            long v = std::abs(s - offset);
            if (v >= 1 && v <= N - 1) out.insert(v);
        }
    }
    F.D.assign(out.begin(), out.end());
    return F;
}

BitVec bits_of_D(const ForbiddenSet& F) {
    BitVec DB(F.N);
    for (long d : F.D) DB.set(d - 1);
    return DB;
}

// --------------------------------------------------------------------------
// Branch and bound: maximum independent set on vertices 0..n-1, conflicts
// x ~ x+d for d in the (forward) difference set. Depth-first, include branch
// first, ascending vertex order; strict improvements only, so the reported
// witness is deterministic.
// --------------------------------------------------------------------------
struct Search {
    long n;
    BitVec diff;  // forward conflict offsets, bit d-1 <-> distance d
    long long budget, nodes = 0;
    bool complete = true;
    std::vector<long> cur, best;

    void block(BitVec& free_bits, long x) const {
        free_bits.reset(x);
        if (x + 1 < n) free_bits.clear_shifted(diff, x + 1);
    }

    void rec(BitVec free_bits, long pos) {
        if (++nodes > budget) {
            complete = false;
            return;
        }
        while (true) {
            long x = free_bits.next_set(pos);
            if (x < 0) {
                if (cur.size() > best.size()) best = cur;
                return;
            }
            if (static_cast<long>(cur.size()) + free_bits.count_from(x) <=
                static_cast<long>(best.size()))
                return;
            BitVec inc = free_bits;
            block(inc, x);  // drop x and its forward conflicts x + d
            cur.push_back(x);
            rec(inc, x + 1);
            cur.pop_back();
            if (!complete) return;
            free_bits.reset(x);
            pos = x + 1;
        }
    }
};

std::vector<long> greedy_scan(long n, const BitVec& diff) {
    BitVec blocked(n);
    std::vector<long> out;
    for (long x = 0; x < n; ++x) {
        if (blocked.test(x)) continue;
        out.push_back(x);
        for (long d = diff.next_set(0); d >= 0; d = diff.next_set(d + 1))
            if (x + d + 1 < n) blocked.set(x + d + 1);
    }
    return out;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

ForbiddenSet forbidden_differences(const std::vector<IntPoly>& polys, long N, InputMode mode) {
    std::vector<mpz_class> ones(polys.size(), 1), zeros(polys.size(), 0);
    return build_forbidden(polys, N, mode, ones, zeros, ones);
}

ForbiddenSet forbidden_differences(AuxiliaryFamily& fam, long N,
                                   const std::vector<mpz_class>& shifts) {
    if (shifts.size() != fam.size())
        throw DomainError("forbidden_differences: one shift per polynomial required");
    std::vector<IntPoly> polys;
    std::vector<mpz_class> d, r;
    for (size_t i = 0; i < fam.size(); ++i) {
        AuxEntry e = fam.entry(i, shifts[i]);
        polys.push_back(e.aux);
        d.push_back(e.d);
        r.push_back(e.r);
    }
    return build_forbidden(polys, N, fam.system().mode(), d, r, shifts);
}

AvoidanceCheck verify_avoiding(const std::vector<long>& A, const ForbiddenSet& F) {
    for (size_t i = 0; i < A.size(); ++i) {
        if (A[i] < 1 || A[i] > F.N) throw DomainError("verify_avoiding: element outside window");
        if (i > 0 && A[i] <= A[i - 1])
            throw DomainError("verify_avoiding: elements must be sorted and distinct");
    }
    // Route 1: bitset shift scan.
    BitVec X(F.N + 1);
    for (long a : A) X.set(a);
    AvoidanceCheck shift_res;
    for (long d : F.D) {
        long y = and_shift_first(X, d);
        if (y >= 0) {
            shift_res = AvoidanceCheck{false, y + d, y};
            break;
        }
    }
    // Route 2: direct double loop.
    BitVec DB(F.N);
    for (long d : F.D) DB.set(d - 1);
    bool loop_ok = true;
    for (size_t i = 0; i < A.size() && loop_ok; ++i)
        for (size_t j = 0; j < i; ++j) {
            long d = A[i] - A[j];
            if (d >= 1 && d <= F.N - 1 && DB.test(d - 1)) {
                loop_ok = false;
                break;
            }
        }
    if (shift_res.ok != loop_ok)
        throw ValidationFailure("verify_avoiding: bitset and double-loop routes disagree");
    return shift_res;
}

ExtremalResult max_avoiding_exact(const ForbiddenSet& F, long long node_budget) {
    if (F.N > 100000) throw ResourceError("max_avoiding_exact: window too large for exact search");
    auto t0 = std::chrono::steady_clock::now();
    Search s;
    s.n = F.N;
    s.diff = bits_of_D(F);
    s.budget = node_budget;
    s.best = greedy_scan(F.N, s.diff);
    BitVec free_bits(F.N);
    for (long i = 0; i < F.N; ++i) free_bits.set(i);
    s.rec(free_bits, 0);

    ExtremalResult r;
    r.window = F.N;
    for (long v : s.best) r.witness.push_back(v + 1);
    r.size = static_cast<long>(r.witness.size());
    r.optimal = s.complete;
    r.lower_bound = !s.complete;
    r.nodes = s.nodes;
    r.elapsed_ms = ms_since(t0);
    AvoidanceCheck chk = verify_avoiding(r.witness, F);
    if (!chk.ok) throw ValidationFailure("max_avoiding_exact: witness failed re-verification");
    return r;
}

ExtremalResult greedy_avoiding(const ForbiddenSet& F) {
    auto t0 = std::chrono::steady_clock::now();
    BitVec DB = bits_of_D(F);
    ExtremalResult r;
    r.window = F.N;
    for (long v : greedy_scan(F.N, DB)) r.witness.push_back(v + 1);
    r.size = static_cast<long>(r.witness.size());
    r.optimal = false;
    r.lower_bound = true;
    r.elapsed_ms = ms_since(t0);
    AvoidanceCheck chk = verify_avoiding(r.witness, F);
    if (!chk.ok) throw ValidationFailure("greedy_avoiding: witness failed re-verification");
    return r;
}

std::vector<long> forbidden_residues(const std::vector<IntPoly>& polys, long q) {
    if (q < 1) throw DomainError("forbidden_residues: modulus must be >= 1");
    if (polys.empty()) throw DomainError("forbidden_residues: empty system");
    const mpz_class qz(q);
    std::vector<char> cur(static_cast<size_t>(q), 0);
    cur[0] = 1;
    for (const IntPoly& h : polys) {
        std::vector<char> img(static_cast<size_t>(q), 0);
        for (long n = 0; n < q; ++n)
            img[static_cast<size_t>(h.eval_mod(n, qz).get_si())] = 1;
        std::vector<char> nxt(static_cast<size_t>(q), 0);
        for (long s = 0; s < q; ++s) {
            if (!cur[static_cast<size_t>(s)]) continue;
            for (long v = 0; v < q; ++v)
                if (img[static_cast<size_t>(v)]) nxt[static_cast<size_t>((s + v) % q)] = 1;
        }
        cur.swap(nxt);
    }
    std::set<long> out;
    for (long s = 1; s < q; ++s)
        if (cur[static_cast<size_t>(s)]) {
            out.insert(s);
            out.insert(q - s);
        }
    return std::vector<long>(out.begin(), out.end());
}

ExtremalResult residue_avoiding_search(const std::vector<IntPoly>& polys, long q) {
    if (q > 300) throw ResourceError("residue_avoiding_search: modulus too large for exact search");
    auto t0 = std::chrono::steady_clock::now();
    std::vector<long> F = forbidden_residues(polys, q);
    // Symmetric forbidden set: on ascending scan only forward distances
    // matter, and wrapped distances point at already-decided vertices.
    Search s;
    s.n = q;
    s.diff = BitVec(q);
    for (long d : F) s.diff.set(d - 1);
    s.budget = 500'000'000;
    s.best = greedy_scan(q, s.diff);
    // Every nonempty independent set can be rotated to contain 0.
    BitVec free_bits(q);
    for (long i = 1; i < q; ++i) free_bits.set(i);
    s.block(free_bits, 0);
    s.cur.push_back(0);
    s.rec(free_bits, 1);

    ExtremalResult r;
    r.window = q;
    r.witness = s.best;
    r.size = static_cast<long>(r.witness.size());
    r.optimal = s.complete;
    r.lower_bound = !s.complete;
    r.nodes = s.nodes;
    r.elapsed_ms = ms_since(t0);
    // Re-verify on the circulant directly.
    for (size_t i = 0; i < r.witness.size(); ++i)
        for (size_t j = 0; j < i; ++j) {
            long d = (r.witness[i] - r.witness[j]) % q;
            if (std::binary_search(F.begin(), F.end(), d) ||
                std::binary_search(F.begin(), F.end(), (q - d) % q))
                throw ValidationFailure("residue_avoiding_search: witness failed re-verification");
        }
    return r;
}

ExtremalResult digit_construction(long q, const std::vector<long>& B, int k,
                                  const std::vector<IntPoly>& polys) {
    if (q < 2 || k < 1) throw DomainError("digit_construction: need q >= 2 and k >= 1");
    for (long b : B)
        if (b < 0 || b >= q) throw DomainError("digit_construction: residues must lie in [0, q)");
    if (B.empty()) throw DomainError("digit_construction: empty residue set");
    mpz_class Nz = 1;
    for (int i = 0; i < 2 * k; ++i) Nz *= q;
    if (!Nz.fits_slong_p() || Nz > (1L << 22))
        throw ResourceError("digit_construction: window q^(2k) too large");
    const long N = Nz.get_si();

    double count = std::pow(static_cast<double>(q) * B.size(), k);
    if (count > static_cast<double>(1L << 22))
        throw ResourceError("digit_construction: too many constructed elements");

    auto t0 = std::chrono::steady_clock::now();
    // Block value b + q*x at base-q^2 digit i: residue digit low, free digit
    // high, so nonzero block differences are never squares-style values that
    // survive both the mod-q and the q-adic valuation tests.
    std::vector<long> A{0};
    long place = 1;
    for (int i = 0; i < k; ++i) {
        std::vector<long> next;
        next.reserve(A.size() * B.size() * static_cast<size_t>(q));
        for (long base : A)
            for (long b : B)
                for (long x = 0; x < q; ++x) next.push_back(base + (b + q * x) * place);
        A.swap(next);
        place *= q * q;
    }
    for (long& a : A) ++a;  // shift into [1, N]
    std::sort(A.begin(), A.end());

    ForbiddenSet F = forbidden_differences(polys, N, InputMode::Integer);
    AvoidanceCheck chk = verify_avoiding(A, F);
    if (!chk.ok)
        throw ConstructionRejected("digit_construction: lifted set hits forbidden difference " +
                                   std::to_string(chk.x) + " - " + std::to_string(chk.y));
    ExtremalResult r;
    r.window = N;
    r.witness = std::move(A);
    r.size = static_cast<long>(r.witness.size());
    r.optimal = false;
    r.lower_bound = true;
    r.elapsed_ms = ms_since(t0);
    return r;
}

}  // namespace pds
