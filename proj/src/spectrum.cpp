// ============================================================================
// Set spectra, arc masses, density increments, the divisor-closed max-mass
// bound, the iteration driver, and the one-step spectral blow-up.
//
// Everything here is checked against itself: Parseval on every transform,
// FFT vs direct difference counts, exact avoidance re-verification along
// driver traces, and exact rational sum-set counts in the blow-up.
// ============================================================================

#include "pds/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "pds/errors.hpp"
#include "pds/fft.hpp"
#include "pds/parallel.hpp"
#include "pds/sieve.hpp"

namespace pds {

namespace {

constexpr long kGridCap = 1L << 22;
constexpr double kPi = 3.14159265358979323846;

void check_set(const SetInWindow& A) {
    if (A.N < 1) throw DomainError("set window must be >= 1");
    for (size_t i = 0; i < A.elements.size(); ++i) {
        if (A.elements[i] < 1 || A.elements[i] > A.N)
            throw DomainError("set element outside window");
        if (i > 0 && A.elements[i] <= A.elements[i - 1])
            throw DomainError("set elements must be sorted and distinct");
    }
}

long mod_pos(long x, long G) { return ((x % G) + G) % G; }

// Frequencies t (mod G, nonzero) with |t/G - a/q| < radius for some listed
// fraction; the windows around G a/q are enumerated directly.
void collect_arc_points(long G, long q, double radius, std::set<long>& out) {
    double span = std::min(radius * G, static_cast<double>(G));
    for (long a = 0; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        double center = static_cast<double>(G) * a / q;
        long lo = static_cast<long>(std::ceil(center - span)) - 1;
        long hi = static_cast<long>(std::floor(center + span)) + 1;
        for (long t = lo; t <= hi; ++t) {
            if (std::abs(static_cast<double>(t) * q - static_cast<double>(a) * G) >=
                radius * q * G)
                continue;
            long tm = mod_pos(t, G);
            if (tm == 0) continue;
            out.insert(tm);
        }
    }
}

// Reduced fraction of freq/G with denominator <= Q, by exact continued
// fractions on the circle.
Rational label_fraction(long freq, long G, long Q) {
    mpq_class alpha(mod_pos(freq, G), G);
    alpha.canonicalize();
    return best_rational_exact(alpha, std::max(1L, Q)).first;
}

// First pair of listed frequencies sharing one M_{a,q}(radius) arc with
// q <= Qmax, or nullopt. radius is in frequency units (circle radius * G).
std::optional<std::pair<long, long>> shared_arc_pair(const std::vector<long>& fr, long G,
                                                     double radius_units, long Qmax) {
    std::map<std::pair<long, long>, size_t> seen;  // (q, a) -> first index
    for (size_t i = 0; i < fr.size(); ++i) {
        long u = mod_pos(fr[i], G);
        for (long q = 1; q <= Qmax; ++q) {
            double bc = static_cast<double>(u) * q / G;
            double bw = radius_units * q / G;
            long blo = static_cast<long>(std::floor(bc - bw)) - 1;
            long bhi = static_cast<long>(std::ceil(bc + bw)) + 1;
            for (long b = blo; b <= bhi; ++b) {
                if (std::abs(static_cast<double>(u) * q - static_cast<double>(b) * G) >=
                    radius_units * q)
                    continue;
                long bb = mod_pos(b, q);
                if (std::gcd(bb, q) != 1) continue;
                auto key = std::make_pair(q, bb);
                auto it = seen.find(key);
                if (it != seen.end() && fr[it->second] != fr[i])
                    return std::make_pair(fr[it->second], fr[i]);
                seen.emplace(key, i);
            }
        }
    }
    return std::nullopt;
}

// Product of per-slot exponential sums over slot ranges M_i derived from the
// window: M_i = floor((L / (frac * l * |lead_i|))^(1/deg)). Slots beyond the
// first l1 are restricted to (n, W) = 1 in integer mode; prime mode keeps
// only fiber points d n + r prime. weighted = true applies the derivative
// weight and a 1/L normalization per slot.
struct ProductSpectrum {
    std::vector<cplx> T;
    std::vector<long> M;
    std::vector<long> counts;
    double scale = 1.0;
};

ProductSpectrum product_spectrum(const SystemProfile& prof, AuxiliaryFamily& fam,
                                 const std::vector<mpz_class>& shifts, long L, long G,
                                 const mpz_class& W, double frac, bool weighted, int threads) {
    const size_t l = fam.size();
    ProductSpectrum ps;
    ps.T.assign(static_cast<size_t>(G), cplx(1.0, 0.0));
    std::vector<cplx> tab(static_cast<size_t>(G));
    for (long k = 0; k < G; ++k) tab[static_cast<size_t>(k)] = std::polar(1.0, 2.0 * kPi * k / G);
    const bool prime_mode = fam.system().mode() == InputMode::Prime;
    const mpz_class Gz(G);
    for (size_t i = 0; i < l; ++i) {
        AuxEntry e = fam.entry(i, shifts[i]);
        int deg = e.aux.degree();
        double bl = std::abs(e.lead.get_d());
        double mr = std::pow(static_cast<double>(L) / (frac * static_cast<double>(l) * bl),
                             1.0 / deg);
        long M = mr >= 1.0 ? static_cast<long>(std::floor(mr)) : 0;
        ps.M.push_back(M);
        const bool sieved = !prime_mode && i >= prof.l1;
        std::vector<long> idx;
        std::vector<double> wt;
        IntPoly daux = e.aux.derivative();
        for (long n = 1; n <= M; ++n) {
            if (prime_mode) {
                if (!is_prime_mpz(e.d * n + e.r)) continue;
            } else if (sieved) {
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), mpz_class(n).get_mpz_t(), W.get_mpz_t());
                if (g != 1) continue;
            }
            mpz_class hv = e.aux.eval(n), hm;
            mpz_fdiv_r(hm.get_mpz_t(), hv.get_mpz_t(), Gz.get_mpz_t());
            idx.push_back(hm.get_si());
            wt.push_back(weighted ? daux.eval_double(static_cast<double>(n)) : 1.0);
        }
        ps.counts.push_back(static_cast<long>(idx.size()));
        if (weighted) ps.scale /= static_cast<double>(L);
        std::vector<cplx> slot(static_cast<size_t>(G));
        parallel_for(
            static_cast<size_t>(G),
            [&](size_t t) {
                cplx acc(0.0, 0.0);
                for (size_t j = 0; j < idx.size(); ++j)
                    acc += wt[j] * tab[static_cast<size_t>((idx[j] * static_cast<long>(t)) % G)];
                slot[t] = acc;
            },
            threads);
        for (long t = 0; t < G; ++t) ps.T[static_cast<size_t>(t)] *= slot[static_cast<size_t>(t)];
    }
    if (ps.scale != 1.0)
        for (auto& v : ps.T) v *= ps.scale;
    return ps;
}

std::string fmt17(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

// ----------------------------------------------------------------------------
// Sets and transforms
// ----------------------------------------------------------------------------

SetInWindow make_window_set(long N, std::vector<long> elements) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    SetInWindow A{N, std::move(elements)};
    check_set(A);
    return A;
}

SpectrumReport balanced_dft(const SetInWindow& A, SpectrumGrid kind) {
    check_set(A);
    const long G = kind == SpectrumGrid::Window ? A.N : 4 * A.N;
    if (G > kGridCap) throw ResourceError("balanced_dft: grid larger than the resource cap");
    const double delta = A.delta();
    std::vector<cplx> f(static_cast<size_t>(G), cplx(0.0, 0.0));
    for (long x = 1; x <= A.N; ++x) f[static_cast<size_t>(x % G)] = cplx(-delta, 0.0);
    for (long a : A.elements) f[static_cast<size_t>(a % G)] += cplx(1.0, 0.0);

    SpectrumReport S;
    S.N = A.N;
    S.grid = G;
    S.kind = kind;
    S.delta = delta;
    S.fhat = dft_any(f, false);
    if (kind == SpectrumGrid::Window)
        for (auto& v : S.fhat) v /= static_cast<double>(G);
    const double w = S.weight();
    double total = 0.0;
    for (const cplx& v : S.fhat) total += std::norm(v);
    total *= w;
    S.parseval_total = total;
    S.parseval_expected = (kind == SpectrumGrid::Window ? 1.0 : static_cast<double>(A.N)) *
                          delta * (1.0 - delta);
    const double tol = 1e-9 * std::max(S.parseval_expected, 1e-9);
    if (std::abs(S.parseval_total - S.parseval_expected) > tol)
        throw ValidationFailure("balanced_dft: Parseval identity violated");
    const double zero_tol = 1e-12 * (kind == SpectrumGrid::Window ? 1.0 : G);
    if (std::abs(S.fhat[0]) > zero_tol)
        throw ValidationFailure("balanced_dft: zero frequency of a balanced function not 0");
    return S;
}

long long difference_count(const SetInWindow& A, const std::vector<long>& D) {
    check_set(A);
    if (A.N > (1L << 20)) throw ResourceError("difference_count: window too large");
    std::vector<long> Ds(D);
    std::sort(Ds.begin(), Ds.end());
    Ds.erase(std::unique(Ds.begin(), Ds.end()), Ds.end());
    for (long d : Ds)
        if (d < 1 || d >= A.N) throw DomainError("difference values must lie in [1, N-1]");

    long long direct = 0;
    for (size_t i = 0; i < A.elements.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            if (std::binary_search(Ds.begin(), Ds.end(), A.elements[i] - A.elements[j]))
                ++direct;

    size_t sz = 1;
    while (sz < 2 * static_cast<size_t>(A.N)) sz <<= 1;
    std::vector<cplx> ind(sz, cplx(0.0, 0.0));
    for (long a : A.elements) ind[static_cast<size_t>(a)] = cplx(1.0, 0.0);
    fft_pow2(ind, false);
    for (auto& v : ind) v = cplx(std::norm(v), 0.0);
    fft_pow2(ind, true);
    long long via_fft = 0;
    for (long d : Ds) {
        double re = ind[static_cast<size_t>(d)].real();
        long long c = std::llround(re);
        if (std::abs(re - static_cast<double>(c)) > 0.25)
            throw ValidationFailure("difference_count: convolution value is not near an integer");
        via_fft += c;
    }
    if (via_fft != direct)
        throw ValidationFailure("difference_count: convolution and direct counts disagree");
    return direct;
}

// ----------------------------------------------------------------------------
// Arc masses
// ----------------------------------------------------------------------------

ArcMass arc_l2_mass(const SpectrumReport& S, long q, double radius) {
    if (q < 1) throw DomainError("arc_l2_mass: q must be >= 1");
    if (!(radius > 0.0)) throw DomainError("arc_l2_mass: radius must be positive");
    const long G = S.grid;
    // each fraction window holds about 2 radius G candidate frequencies
    if (static_cast<double>(q) * (2.0 * std::min(radius * G, static_cast<double>(G)) + 3.0) > 2e8)
        throw ResourceError("arc_l2_mass: arc enumeration too large");
    std::set<long> on_q, on_div;
    collect_arc_points(G, q, radius, on_q);
    for (long r = 1; r <= q; ++r)
        if (q % r == 0) collect_arc_points(G, r, radius, on_div);
    const double w = S.weight();
    ArcMass m;
    for (long t : on_q) m.mq += w * std::norm(S.fhat[static_cast<size_t>(t)]);
    for (long t : on_div) m.mq_prime += w * std::norm(S.fhat[static_cast<size_t>(t)]);
    return m;
}

// ----------------------------------------------------------------------------
// Density increment
// ----------------------------------------------------------------------------

IncrementResult density_increment(const SetInWindow& A, long q, double gamma, double theta,
                                  double c) {
    check_set(A);
    if (q < 1 || q >= A.N) throw DomainError("density_increment: need 1 <= q < N");
    if (!(gamma > 0.0)) throw DomainError("density_increment: gamma must be positive");
    if (!(c > 0.0)) throw DomainError("density_increment: length constant must be positive");
    const long N = A.N;
    IncrementResult res;
    res.base_density = A.delta();
    res.theta = theta;
    res.target = res.base_density * (1.0 + theta / 32.0);
    res.P.step = q;

    const double len = c * std::min(theta * static_cast<double>(N), 1.0 / gamma) / q;
    const long L = len >= 1.0 ? static_cast<long>(std::floor(std::min(len, 2.0 * N))) : 0;
    res.P.length = L;
    if (L < 1 || N - L * q < 1 - q) return res;  // nothing to search: reported, not thrown

    std::vector<char> in(static_cast<size_t>(N) + 1, 0);
    for (long a : A.elements) in[static_cast<size_t>(a)] = 1;
    std::vector<long> pre(static_cast<size_t>(N) + 1, 0);
    for (long p = 1; p <= N; ++p)
        pre[static_cast<size_t>(p)] =
            in[static_cast<size_t>(p)] + (p > q ? pre[static_cast<size_t>(p - q)] : 0);

    long best_x = 1 - q, best_cnt = -1;
    for (long x = 1 - q; x <= N - L * q; ++x) {
        long cnt = pre[static_cast<size_t>(x + L * q)] - (x >= 1 ? pre[static_cast<size_t>(x)] : 0);
        if (cnt > best_cnt) {
            best_cnt = cnt;
            best_x = x;
        }
    }
    res.P.start = best_x;
    res.new_density = static_cast<double>(best_cnt) / L;
    std::vector<long> fib;
    for (long j = 1; j <= L; ++j)
        if (in[static_cast<size_t>(best_x + j * q)]) fib.push_back(j);
    res.fiber = SetInWindow{L, std::move(fib)};
    res.found = res.new_density + 1e-12 >= res.target;
    return res;
}

// ----------------------------------------------------------------------------
// Max mass over divisor-closed arcs
// ----------------------------------------------------------------------------

RstrickReport rstrick_max(const SpectrumReport& S, double gamma, long Q,
                          const std::function<double(long)>& b) {
    if (Q < 1) throw DomainError("rstrick_max: Q must be >= 1");
    if (!(gamma > 0.0)) throw DomainError("rstrick_max: gamma must be positive");
    if (!(2.0 * gamma * static_cast<double>(Q) * Q < 1.0))
        throw PreconditionViolated("rstrick_max: need 2 gamma Q^2 < 1");
    std::vector<double> bw(static_cast<size_t>(Q) + 1, 0.0);
    for (long q = 1; q <= Q; ++q) {
        bw[static_cast<size_t>(q)] = b(q);
        if (!std::isfinite(bw[static_cast<size_t>(q)]) || bw[static_cast<size_t>(q)] < 0.0)
            throw DomainError("rstrick_max: weights must be finite and nonnegative");
    }
    for (long r = 1; r <= Q; ++r)
        for (long q = 2; q * r <= Q; ++q) {
            double need = bw[static_cast<size_t>(r)] / q;
            if (bw[static_cast<size_t>(q * r)] + 1e-12 * (1.0 + need) < need)
                throw WeightContractViolated(q, r);
        }

    RstrickReport rep;
    rep.mass_mq.assign(static_cast<size_t>(Q) + 1, 0.0);
    rep.mass_mq_prime.assign(static_cast<size_t>(Q) + 1, 0.0);
    parallel_for(static_cast<size_t>(Q), [&](size_t i) {
        long q = static_cast<long>(i) + 1;
        ArcMass m = arc_l2_mass(S, q, gamma);
        rep.mass_mq[static_cast<size_t>(q)] = m.mq;
        rep.mass_mq_prime[static_cast<size_t>(q)] = m.mq_prime;
    });
    rep.q_star = 1;
    for (long q = 2; q <= Q; ++q)
        if (rep.mass_mq_prime[static_cast<size_t>(q)] >
            rep.mass_mq_prime[static_cast<size_t>(rep.q_star)])
            rep.q_star = q;
    rep.mass = rep.mass_mq_prime[static_cast<size_t>(rep.q_star)];

    double denom = 0.0, num = 0.0;
    for (long q = 1; q <= Q; ++q) {
        denom += static_cast<double>(q) * bw[static_cast<size_t>(q)];
        num += bw[static_cast<size_t>(q)] * rep.mass_mq[static_cast<size_t>(q)];
    }
    rep.rhs = denom > 0.0 ? static_cast<double>(Q) * num / (2.0 * denom) : 0.0;
    rep.verified = rep.mass + 1e-9 * (1.0 + rep.rhs) >= rep.rhs;
    if (!rep.verified)
        throw ValidationFailure("rstrick_max: maximum mass fell below the averaging bound");
    return rep;
}

// ----------------------------------------------------------------------------
// Iteration driver
// ----------------------------------------------------------------------------

IterationTrace sarkozy_driver(const SetInWindow& A0, const SystemProfile& profile,
                              AuxiliaryFamily& fam, const DriverConfig& cfg) {
    check_set(A0);
    if (profile.degrees.size() != fam.size())
        throw DomainError("sarkozy_driver: profile and family describe different systems");
    const size_t l = fam.size();
    const double Dexp = profile.D.get_d();
    const double Dpexp = profile.Dprime.get_d();

    IterationTrace tr;
    SetInWindow A = A0;
    std::vector<mpz_class> d(l, 1);

    for (int m = 0;; ++m) {
        if (m >= cfg.max_steps) {
            tr.terminal = "step_cap";
            break;
        }
        ForbiddenSet F = forbidden_differences(fam, A.N, d);
        AvoidanceCheck chk = verify_avoiding(A.elements, F);
        if (!chk.ok) {
            if (m == 0) {
                DriverStep st;
                st.window = A.N;
                st.density = A.delta();
                st.shifts = d;
                st.branch = "precondition_failed";
                tr.steps.push_back(st);
                tr.terminal = "precondition_failed";
                break;
            }
            throw ValidationFailure("sarkozy_driver: inherited fiber lost avoidance at step " +
                                    std::to_string(m));
        }
        if (A.N < cfg.floor_window) {
            tr.terminal = "floor_reached";
            break;
        }
        const double delta = A.delta();
        if (delta >= cfg.saturation) {
            tr.terminal = "saturated";
            break;
        }
        if (A.elements.empty()) {
            tr.terminal = "no_progress";
            break;
        }

        DriverStep st;
        st.window = A.N;
        st.density = delta;
        st.shifts = d;

        // Edge ninth: take either end if it already carries density 9/8 delta.
        const long N9 = A.N / 9;
        if (N9 >= 1) {
            long left = static_cast<long>(std::upper_bound(A.elements.begin(), A.elements.end(),
                                                           N9) -
                                          A.elements.begin());
            long right = static_cast<long>(A.elements.end() -
                                           std::lower_bound(A.elements.begin(), A.elements.end(),
                                                            A.N - N9 + 1));
            long side = std::max(left, right);
            if (side > 0 &&
                static_cast<double>(side) / N9 >= 9.0 * delta / 8.0) {
                std::vector<long> el;
                if (left >= right) {
                    for (long a : A.elements)
                        if (a <= N9) el.push_back(a);
                } else {
                    for (long a : A.elements)
                        if (a > A.N - N9) el.push_back(a - (A.N - N9));
                }
                st.branch = "edge_interval";
                st.new_window = N9;
                st.new_density = static_cast<double>(el.size()) / N9;
                tr.steps.push_back(st);
                A = SetInWindow{N9, std::move(el)};
                continue;
            }
        }

        // Arc branch: measure masses, pick the divisor-closed maximizer,
        // extract a progression, restrict to a step-lambda(q) subprogression.
        const double eta = cfg.c0 * delta;
        st.eta = eta;
        const double qreq = std::pow(eta, -(Dexp + cfg.eps));
        st.requested_Q = static_cast<long>(std::min(qreq, 1e15));
        const long Q = static_cast<long>(std::min(std::max(2.0, qreq),
                                                  static_cast<double>(cfg.q_cap)));
        st.Q = Q;
        const double greq = std::pow(eta, -(Dpexp + cfg.eps)) / A.N;
        st.requested_gamma = greq;
        const double gamma = std::min(greq, 0.49 / (static_cast<double>(Q) * Q));
        st.gamma = gamma;

        SpectrumReport S = balanced_dft(
            A, cfg.use_zn_arcs ? SpectrumGrid::Window : SpectrumGrid::Refined);
        const bool plain_weight = (profile.l2 + profile.l3 == 0);
        auto b = [&](long q) {
            double base = std::pow(static_cast<double>(q), -1.0 / Dexp);
            if (plain_weight) return base;
            return std::pow(2.0, static_cast<double>(omega_u64(static_cast<uint64_t>(q)))) * base;
        };
        RstrickReport rr = rstrick_max(S, gamma, Q, b);
        st.q = rr.q_star;
        st.mass_mq = rr.mass_mq[static_cast<size_t>(rr.q_star)];
        st.mass_mq_prime = rr.mass;
        const double scale = (S.kind == SpectrumGrid::Window)
                                 ? delta * delta
                                 : delta * delta * static_cast<double>(A.N);
        st.theta = scale > 0.0 ? rr.mass / scale : 0.0;

        // Weighted product spectrum on the same grid; its sup over the minor
        // arcs is logged against the configured threshold, never asserted.
        {
            double sb = std::min(std::pow(eta, -(Dpexp + cfg.eps)), cfg.sieve_bound_cap);
            mpz_class W = primorial_upto(static_cast<uint64_t>(std::max(2.0, sb)));
            ProductSpectrum T =
                product_spectrum(profile, fam, d, A.N, S.grid, W, 9.0, false, cfg.threads);
            double sup = 0.0;
            for (long t = 0; t < S.grid; ++t) {
                ArcLabel lab = classify(t, S.grid, gamma * S.grid, Q);
                if (lab.kind == ArcKind::Minor)
                    sup = std::max(sup, std::abs(T.T[static_cast<size_t>(t)]));
            }
            st.minor_sup = sup;
            double prod = 1.0;
            for (long c : T.counts) prod *= static_cast<double>(c);
            st.minor_threshold = cfg.minor_threshold_factor * delta * prod;
            st.minor_ok = sup <= st.minor_threshold;
        }

        IncrementResult inc = density_increment(A, rr.q_star, gamma, st.theta, cfg.c_len);
        if (!inc.found) {
            st.branch = "arc_no_increment";
            st.new_density = inc.new_density;
            st.new_window = 0;
            tr.steps.push_back(st);
            tr.terminal = "no_progress";
            break;
        }
        st.branch = "arc_increment";

        mpz_class Lam = fam.lambda_total(rr.q_star);
        if (!Lam.fits_slong_p()) throw ResourceError("sarkozy_driver: lambda(q) too large");
        const long lam = Lam.get_si();
        const long rho = lam / rr.q_star;  // q | lambda(q) always
        const long L = inc.P.length;

        std::vector<mpz_class> nd(l);
        for (size_t i = 0; i < l; ++i) nd[i] = fam.lambda_tilde(i, rr.q_star) * d[i];

        if (L / rho < 1) {
            st.new_window = 0;
            st.new_density = inc.new_density;
            tr.steps.push_back(st);
            tr.terminal = "floor_reached";
            break;
        }
        std::vector<char> in(static_cast<size_t>(A.N) + 1, 0);
        for (long a : A.elements) in[static_cast<size_t>(a)] = 1;
        long best_c = -1, best_Nc = 0, best_cnt = -1;
        for (long c = 0; c < rho; ++c) {
            long Nc = (L - c) / rho;
            if (Nc < 1) continue;
            long cnt = 0;
            for (long j = 1; j <= Nc; ++j)
                if (in[static_cast<size_t>(inc.P.start + (c + j * rho) * rr.q_star)]) ++cnt;
            if (best_c < 0 || static_cast<double>(cnt) * best_Nc >
                                  static_cast<double>(best_cnt) * Nc) {
                best_c = c;
                best_Nc = Nc;
                best_cnt = cnt;
            }
        }
        const double sub_density = static_cast<double>(best_cnt) / best_Nc;
        st.new_window = best_Nc;
        st.new_density = sub_density;
        if (sub_density + 1e-12 < delta) {
            st.branch = "arc_no_increment";  // increment did not survive subdivision
            tr.steps.push_back(st);
            tr.terminal = "no_progress";
            break;
        }
        tr.steps.push_back(st);
        std::vector<long> fib;
        for (long j = 1; j <= best_Nc; ++j)
            if (in[static_cast<size_t>(inc.P.start + (best_c + j * rho) * rr.q_star)])
                fib.push_back(j);
        A = SetInWindow{best_Nc, std::move(fib)};
        d = nd;
    }

    // Trace invariants: monotone densities, shrinking windows, exact shift
    // multiplication. Violations are implementation bugs.
    for (size_t i = 0; i < tr.steps.size(); ++i) {
        const DriverStep& s = tr.steps[i];
        const bool progressing = s.branch == "edge_interval" || s.branch == "arc_increment";
        if (progressing && s.new_density + 1e-9 < s.density)
            throw ValidationFailure("sarkozy_driver: density decreased along the trace");
        if (i + 1 < tr.steps.size()) {
            const DriverStep& nx = tr.steps[i + 1];
            if (nx.window != s.new_window || nx.window >= s.window)
                throw ValidationFailure("sarkozy_driver: window did not shrink");
            if (std::abs(nx.density - s.new_density) > 1e-12)
                throw ValidationFailure("sarkozy_driver: density bookkeeping mismatch");
            for (size_t j = 0; j < l; ++j) {
                mpz_class want = s.branch == "arc_increment"
                                     ? mpz_class(fam.lambda_tilde(j, s.q) * s.shifts[j])
                                     : s.shifts[j];
                if (nx.shifts[j] != want)
                    throw ValidationFailure("sarkozy_driver: shift multiplication not exact");
            }
        }
    }
    tr.valid = true;
    return tr;
}

std::string trace_jsonl(const IterationTrace& trace) {
    std::ostringstream os;
    for (size_t i = 0; i < trace.steps.size(); ++i) {
        const DriverStep& s = trace.steps[i];
        os << "{\"step\":" << i << ",\"window\":" << s.window << ",\"density\":"
           << fmt17(s.density) << ",\"shifts\":[";
        for (size_t j = 0; j < s.shifts.size(); ++j)
            os << (j ? "," : "") << "\"" << s.shifts[j].get_str() << "\"";
        os << "],\"branch\":\"" << s.branch << "\",\"q\":" << s.q << ",\"theta\":"
           << fmt17(s.theta) << ",\"mass_mq\":" << fmt17(s.mass_mq) << ",\"mass_mq_prime\":"
           << fmt17(s.mass_mq_prime) << ",\"eta\":" << fmt17(s.eta) << ",\"gamma\":"
           << fmt17(s.gamma) << ",\"requested_gamma\":" << fmt17(s.requested_gamma)
           << ",\"Q\":" << s.Q << ",\"requested_Q\":" << s.requested_Q << ",\"minor_sup\":"
           << fmt17(s.minor_sup) << ",\"minor_threshold\":" << fmt17(s.minor_threshold)
           << ",\"minor_ok\":" << (s.minor_ok ? "true" : "false") << ",\"new_density\":"
           << fmt17(s.new_density) << ",\"new_window\":" << s.new_window << "}\n";
    }
    os << "{\"terminal\":\"" << trace.terminal << "\",\"valid\":"
       << (trace.valid ? "true" : "false") << "}\n";
    return os.str();
}

std::string spectrum_csv(const SpectrumReport& S) {
    std::ostringstream os;
    os << "t,re,im,abs2\n";
    for (long t = 0; t < S.grid; ++t) {
        const cplx& v = S.fhat[static_cast<size_t>(t)];
        os << t << "," << fmt17(v.real()) << "," << fmt17(v.imag()) << ","
           << fmt17(std::norm(v)) << "\n";
    }
    return os.str();
}

// ----------------------------------------------------------------------------
// Rational sum-set count
// ----------------------------------------------------------------------------

CrReport cr_count(const std::map<long, std::vector<long>>& p_s, long grid, double V,
                  double V_tilde, double K, double eta) {
    if (grid < 1) throw DomainError("cr_count: grid must be >= 1");
    if (V < 1.0 || V_tilde < 1.0) throw DomainError("cr_count: denominator bounds must be >= 1");
    if (!(eta > 0.0) || !(K > 0.0)) throw DomainError("cr_count: radii must be positive");
    const long Qs = std::max(1L, static_cast<long>(std::floor(V)));
    const long Qt = std::max(1L, static_cast<long>(std::floor(V_tilde)));

    CrReport rep;
    rep.tau = 1;
    if (p_s.empty()) {
        rep.ok = true;
        return rep;
    }

    std::set<std::pair<long, long>> R;
    std::set<long> union_ts;
    double min_ps = -1.0;
    for (const auto& [s, ts] : p_s) {
        if (min_ps < 0.0 || static_cast<double>(ts.size()) < min_ps)
            min_ps = static_cast<double>(ts.size());
        Rational fs = label_fraction(s, grid, Qs);
        for (long t : ts) {
            union_ts.insert(mod_pos(t, grid));
            Rational ft = label_fraction(t, grid, Qt);
            long long num = fs.a * ft.q + ft.a * fs.q;
            long long den = fs.q * ft.q;
            num %= den;
            if (num < 0) num += den;
            long long g = std::gcd(num, den);
            R.insert({static_cast<long>(num / g), static_cast<long>(den / g)});
        }
    }
    rep.lhs = static_cast<long long>(R.size());
    rep.min_ps = std::max(0.0, min_ps);

    // E: worst touched-numerator count over denominators up to V~.
    const double radius_units = 1.0 / eta;  // arcs M_{b/r}(1/eta) in frequency units
    for (long r = 1; r <= Qt; ++r) {
        long cnt = 0;
        for (long b = 0; b < r; ++b) {
            if (std::gcd(b, r) != 1) continue;
            bool touched = false;
            for (long t : union_ts) {
                double d1 = std::abs(static_cast<double>(t) * r - static_cast<double>(b) * grid);
                d1 = std::min(d1, static_cast<double>(grid) * r - d1);
                if (d1 < radius_units * r) {
                    touched = true;
                    break;
                }
            }
            if (touched) ++cnt;
        }
        rep.E = std::max(rep.E, cnt);
    }

    // tau: max divisor count over q <= V V~.
    const double vv = V * V_tilde;
    if (vv > 2e6) throw ResourceError("cr_count: divisor bound too large");
    const long vmax = std::max(1L, static_cast<long>(std::floor(vv)));
    std::vector<int> cnts(static_cast<size_t>(vmax) + 1, 0);
    for (long dd = 1; dd <= vmax; ++dd)
        for (long mm = dd; mm <= vmax; mm += dd) ++cnts[static_cast<size_t>(mm)];
    for (long qq = 1; qq <= vmax; ++qq)
        rep.tau = std::max(rep.tau, static_cast<long>(cnts[static_cast<size_t>(qq)]));

    if (rep.E == 0 || rep.min_ps == 0.0) {
        rep.rhs = 0.0;
    } else {
        rep.rhs = static_cast<double>(p_s.size()) * rep.min_ps * rep.min_ps /
                  (V_tilde * static_cast<double>(rep.E) *
                   std::pow(static_cast<double>(rep.tau), 8.0) * (1.0 + std::log(V)));
    }
    rep.ok = static_cast<double>(rep.lhs) + 1e-9 >= rep.rhs;
    return rep;
}

// ----------------------------------------------------------------------------
// Blow-up step
// ----------------------------------------------------------------------------

BlowupResult blowup_step(const SetInWindow& B, const SetInWindow& B1, const std::vector<long>& P,
                         double U, double V, double K, const SystemProfile& profile,
                         AuxiliaryFamily& fam, const BlowupConfig& cfg) {
    check_set(B);
    check_set(B1);
    if (B1.N != B.N) throw DomainError("blowup_step: B and B1 must share a window");
    if (U < 1.0 || V < 1.0) throw DomainError("blowup_step: need U, V >= 1");
    if (!(K > 0.0)) throw DomainError("blowup_step: need K > 0");
    if (!(cfg.c1 > 0.0)) throw DomainError("blowup_step: split constant must be positive");
    if (B.elements.empty()) throw DomainError("blowup_step: empty base set");
    if (profile.degrees.size() != fam.size())
        throw DomainError("blowup_step: profile and family describe different systems");

    const long G = B.N;
    const size_t l = fam.size();
    std::vector<mpz_class> shifts = cfg.shifts;
    if (shifts.empty()) shifts.assign(l, 1);
    if (shifts.size() != l) throw DomainError("blowup_step: one shift per polynomial required");

    BlowupResult res;
    res.sigma = B.delta();
    int kmin = *std::min_element(profile.degrees.begin(), profile.degrees.end());
    res.m = 2 * kmin * kmin - 1;
    res.eta = cfg.c0 * res.sigma / U;
    const double radius_t = 1.0 / res.eta;  // frequency-unit arc radius
    if (radius_t >= G / 2.0) throw ResourceError("blowup_step: arc radius exceeds the grid");
    const double Dexp = profile.D.get_d();
    const long Qarc = static_cast<long>(
        std::min(std::max(2.0, std::pow(res.eta, -(Dexp + cfg.eps))),
                 static_cast<double>(cfg.q_cap)));

    // (dis): no two elements of P in one radius-K arc with denominator <= V.
    if (auto pr = shared_arc_pair(P, G, K, std::max(1L, static_cast<long>(std::ceil(V)))))
        throw PreconditionViolated("blowup_step: two input frequencies " +
                                   std::to_string(pr->first) + " and " +
                                   std::to_string(pr->second) + " share one arc");

    // Raw set transforms: the balanced transform patched at 0 (they agree off
    // 0 because the window indicator transform vanishes there).
    SpectrumReport SB = balanced_dft(B, SpectrumGrid::Window);
    SB.fhat[0] = cplx(B.delta(), 0.0);
    SpectrumReport SB1 = balanced_dft(B1, SpectrumGrid::Window);
    SB1.fhat[0] = cplx(B1.delta(), 0.0);

    res.threshold = cfg.c1 * std::pow(res.sigma, (res.m + 1) / 2.0) * std::pow(U, -res.m / 2.0);
    const long jk_cap =
        static_cast<long>(std::ceil(std::log2(std::max(2.0, res.sigma / res.threshold)))) + 1;

    // Weighted product spectrum and its logged bounds.
    {
        const double Dpexp = profile.Dprime.get_d();
        double sb = std::min(std::pow(res.eta, -(Dpexp + cfg.eps)), cfg.sieve_bound_cap);
        mpz_class W = primorial_upto(static_cast<uint64_t>(std::max(2.0, sb)));
        ProductSpectrum T =
            product_spectrum(profile, fam, shifts, G, G, W, 3.0, true, cfg.threads);
        double sup = 0.0;
        for (long t = 0; t < G; ++t) {
            ArcLabel lab = classify(t, G, radius_t, Qarc);
            if (lab.kind == ArcKind::Minor)
                sup = std::max(sup, std::abs(T.T[static_cast<size_t>(t)]));
        }
        res.minor_sup = sup;
        res.minor_bound =
            res.sigma / (std::pow(10.0 * static_cast<double>(l), static_cast<double>(l)) * U);
        res.minor_ok = sup <= res.minor_bound;
        double mw_min = -1.0;
        for (long s : P) {
            double mw = 0.0;
            for (long t = 1; t < G; ++t)
                mw += std::abs(SB.fhat[static_cast<size_t>(t)]) *
                      std::abs(SB1.fhat[static_cast<size_t>(mod_pos(s + t, G))]) *
                      std::abs(T.T[static_cast<size_t>(t)]);
            if (mw_min < 0.0 || mw < mw_min) mw_min = mw;
        }
        res.massw_min = std::max(0.0, mw_min);
        res.massw_bound = res.sigma * res.sigma /
                          (std::pow(5.0 * static_cast<double>(l), static_cast<double>(l)) * U);
    }

    // Arc windows at radius 1/eta for denominators up to Qarc.
    struct ArcWin {
        long q, a;
        std::vector<long> ts;  // nonzero frequencies mod G in the window
    };
    std::vector<ArcWin> arcs;
    for (long q = 1; q <= Qarc; ++q)
        for (long a = 0; a < q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            ArcWin aw{q, a, {}};
            double center = static_cast<double>(G) * a / q;
            long lo = static_cast<long>(std::ceil(center - radius_t)) - 1;
            long hi = static_cast<long>(std::floor(center + radius_t)) + 1;
            for (long t = lo; t <= hi; ++t) {
                if (std::abs(static_cast<double>(t) * q - static_cast<double>(a) * G) >=
                    radius_t * q)
                    continue;
                long tm = mod_pos(t, G);
                if (tm != 0) aw.ts.push_back(tm);
            }
            std::sort(aw.ts.begin(), aw.ts.end());
            aw.ts.erase(std::unique(aw.ts.begin(), aw.ts.end()), aw.ts.end());
            if (!aw.ts.empty()) arcs.push_back(std::move(aw));
        }

    // Per-s dyadic classes over alive arcs, then the best class by score.
    struct Chosen {
        long i = 0, j = 0, k = 0;
        std::vector<long> ts;  // one frequency per arc of the class
    };
    std::map<long, Chosen> per_s;
    for (long s : P) {
        std::map<std::tuple<long, long, long>, std::vector<long>> classes;
        for (const ArcWin& aw : arcs) {
            double m1 = 0.0, m2 = 0.0;
            long t_best = -1;
            for (long t : aw.ts) {
                m1 = std::max(m1, std::abs(SB.fhat[static_cast<size_t>(t)]));
                double v2 = std::abs(SB1.fhat[static_cast<size_t>(mod_pos(s + t, G))]);
                if (v2 > m2) {
                    m2 = v2;
                    t_best = t;
                }
            }
            if (std::min(m1, m2) <= res.threshold) continue;  // the X side of the split
            long ci = aw.q == 1 ? 0
                                : static_cast<long>(std::ceil(std::log2(
                                      static_cast<double>(aw.q)) - 1e-12));
            long cj = std::max(0L, static_cast<long>(std::ceil(
                                       std::log2(res.sigma / m1) - 1e-12)));
            long ck = std::max(0L, static_cast<long>(std::ceil(
                                       std::log2(res.sigma / m2) - 1e-12)));
            if (cj > jk_cap || ck > jk_cap) continue;
            classes[{ci, cj, ck}].push_back(t_best);
        }
        if (classes.empty()) continue;
        double best_score = -1.0;
        std::tuple<long, long, long> best_key{};
        for (const auto& [key, ts] : classes) {
            auto [ci, cj, ck] = key;
            double score = static_cast<double>(ts.size()) *
                           std::pow(2.0, -static_cast<double>(cj) - static_cast<double>(ck) -
                                             0.5 * static_cast<double>(ci));
            if (score > best_score) {
                best_score = score;
                best_key = key;
            }
        }
        Chosen ch;
        std::tie(ch.i, ch.j, ch.k) = best_key;
        ch.ts = classes[best_key];
        per_s.emplace(s, std::move(ch));
    }

    if (per_s.empty()) {
        res.empty = true;
        res.cr.ok = true;
        return res;
    }

    // Common-triple subset: the largest group of s sharing (i, j, k).
    std::map<std::tuple<long, long, long>, std::vector<long>> groups;
    for (const auto& [s, ch] : per_s) groups[{ch.i, ch.j, ch.k}].push_back(s);
    std::tuple<long, long, long> sel{};
    size_t best_sz = 0;
    for (const auto& [key, ss] : groups)
        if (ss.size() > best_sz) {
            best_sz = ss.size();
            sel = key;
        }
    auto [si, sj, sk] = sel;
    res.v_class = 1L << si;
    res.w_class = 1L << sj;
    res.u_class = 1L << sk;
    res.p_tilde = groups[sel];
    for (long s : res.p_tilde) res.p_s.emplace(s, per_s[s].ts);

    res.u_new = static_cast<double>(res.u_class);
    res.v_new = V * static_cast<double>(res.v_class);
    res.k_new = K + radius_t;

    // Exact sum set R over reduced fractions, one representative frequency
    // per element. Representatives are then greedily thinned so that no two
    // occupy a common radius-K' arc: at desk scale K' is not small next to
    // the fraction spacing, so disjointness must be enforced by selection.
    // The count report still reflects the full R.
    const long Qs = std::max(1L, static_cast<long>(std::floor(V)));
    const long Qp = std::min(cfg.label_cap,
                             std::max(1L, static_cast<long>(std::ceil(res.v_new))));
    std::set<std::pair<long, long>> R;
    std::vector<long> reps;
    for (const auto& [s, ts] : res.p_s) {
        Rational fs = label_fraction(s, G, Qs);
        for (long t : ts) {
            Rational ft = label_fraction(t, G, res.v_class);
            long long num = fs.a * ft.q + ft.a * fs.q;
            long long den = fs.q * ft.q;
            num %= den;
            if (num < 0) num += den;
            long long g = std::gcd(num, den);
            if (R.insert({static_cast<long>(num / g), static_cast<long>(den / g)}).second)
                reps.push_back(mod_pos(s + t, G));
        }
    }
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    std::set<std::pair<long, long>> taken;  // occupied arcs (q, a), q <= V'
    for (long u : reps) {
        std::vector<std::pair<long, long>> keys;
        for (long q = 1; q <= Qp; ++q) {
            double bc = static_cast<double>(u) * q / G;
            double bw = res.k_new * q / G;
            long blo = static_cast<long>(std::floor(bc - bw)) - 1;
            long bhi = static_cast<long>(std::ceil(bc + bw)) + 1;
            for (long b = blo; b <= bhi; ++b) {
                if (std::abs(static_cast<double>(u) * q - static_cast<double>(b) * G) >=
                    res.k_new * q)
                    continue;
                long bb = mod_pos(b, q);
                if (std::gcd(bb, q) != 1) continue;
                keys.emplace_back(q, bb);
            }
        }
        bool free_of_conflicts = true;
        for (const auto& k : keys)
            if (taken.count(k)) {
                free_of_conflicts = false;
                break;
            }
        if (!free_of_conflicts) continue;
        for (const auto& k : keys) taken.insert(k);
        res.p_new.push_back(u);
    }

    res.cr = cr_count(res.p_s, G, V, static_cast<double>(res.v_class), K, res.eta);
    if (res.cr.lhs != static_cast<long long>(R.size()))
        throw ValidationFailure("blowup_step: sum-set count mismatch against cr_count");
    if (!res.cr.ok)
        throw ValidationFailure("blowup_step: sum-set count fell below the counting bound");

    // (P'1): magnitude bound with the reported U'.
    for (long u : res.p_new)
        if (std::abs(SB1.fhat[static_cast<size_t>(u)]) + 1e-12 < res.sigma / res.u_new)
            throw ValidationFailure("blowup_step: output frequency misses the magnitude bound");
    // (P'2): pairwise arc disjointness at radius K' and denominators <= V'.
    if (auto pr = shared_arc_pair(res.p_new, G, res.k_new, Qp))
        throw ValidationFailure("blowup_step: output frequencies " + std::to_string(pr->first) +
                                " and " + std::to_string(pr->second) + " share one arc");

    const double in_ratio = static_cast<double>(P.size()) / (U * U);
    const double out_ratio = static_cast<double>(res.p_new.size()) / (res.u_new * res.u_new);
    res.growth = in_ratio > 0.0 ? out_ratio / in_ratio : 0.0;
    return res;
}

}  // namespace pds
