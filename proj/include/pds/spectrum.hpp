#pragma once
// ============================================================================
// Set spectra and the density-increment machinery.
//
// Two transform conventions, recorded on every report:
//   Window  : normalized over Z_N,  fhat(t) = (1/N) sum_x f(x) e(-2 pi i x t / N),
//             Parseval total = delta (1 - delta);
//   Refined : unnormalized, sampled at t / G on the refined grid G = 4N
//             (a circle surrogate: all pair differences are < G, so the
//             discrete Parseval total is exactly N delta (1 - delta)).
// f is always the balanced indicator 1_A - delta 1_[1,N].
//
// On top of the transforms: per-arc L2 masses, exhaustive density-increment
// extraction on progressions, the max-mass lower bound over divisor-closed
// arcs, a desk-scale iteration driver with exact avoidance re-verification,
// and a one-step spectral blow-up with its rational sum-set count.
// ============================================================================

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pds/arcs.hpp"
#include "pds/aux_family.hpp"
#include "pds/certify.hpp"
#include "pds/expsum.hpp"
#include "pds/extremal.hpp"

namespace pds {

// ----------------------------------------------------------------------------
// Sets and spectra
// ----------------------------------------------------------------------------

struct SetInWindow {
    long N = 0;
    std::vector<long> elements;  // sorted, distinct, subset of [1, N]
    double delta() const { return N ? static_cast<double>(elements.size()) / N : 0.0; }
};

// Validates (sorts, dedupes, range-checks) and assembles.
SetInWindow make_window_set(long N, std::vector<long> elements);

enum class SpectrumGrid { Window, Refined };

struct SpectrumReport {
    long N = 0;
    long grid = 0;  // number of samples G: N (Window) or 4N (Refined)
    SpectrumGrid kind = SpectrumGrid::Window;
    double delta = 0.0;
    std::vector<cplx> fhat;          // size grid
    double parseval_total = 0.0;     // sum of weight * |fhat|^2
    double parseval_expected = 0.0;  // delta(1-delta) resp. N delta(1-delta)
    // per-sample weight in all mass computations
    double weight() const { return kind == SpectrumGrid::Window ? 1.0 : 1.0 / grid; }
};

// Balanced transform; the Parseval identity is checked to 1e-9 relative on
// every construction (ValidationFailure on breach). fhat(0) = 0 to 1e-12.
SpectrumReport balanced_dft(const SetInWindow& A, SpectrumGrid kind = SpectrumGrid::Window);

// #{(a, a') in A^2 : a - a' in D}, computed by a direct double loop AND by
// FFT autocorrelation; exact agreement required (ValidationFailure).
long long difference_count(const SetInWindow& A, const std::vector<long>& D);

// ----------------------------------------------------------------------------
// Arc masses
// ----------------------------------------------------------------------------

struct ArcMass {
    double mq = 0.0;        // mass on M_q: reduced a/q, t != 0, |t/G - a/q| < radius
    double mq_prime = 0.0;  // mass on M'_q = union of M_r over r | q
};

// radius is an absolute circle-metric radius around each fraction (gamma, or
// K / N in window units). Frequencies are deduped across overlapping arcs.
ArcMass arc_l2_mass(const SpectrumReport& S, long q, double radius);

// ----------------------------------------------------------------------------
// Density increment
// ----------------------------------------------------------------------------

struct Progression {
    long start = 0;   // P = { start + l * step : 1 <= l <= length }
    long step = 1;
    long length = 0;
};

struct IncrementResult {
    bool found = false;        // best density reached delta (1 + theta / 32)
    Progression P;
    SetInWindow fiber;         // re-indexed to [1, length]
    double base_density = 0.0;
    double new_density = 0.0;
    double theta = 0.0;
    double target = 0.0;       // delta (1 + theta / 32)
};

// Exhaustive search over all progressions of step q and length
// floor(c min(theta N, 1/gamma) / q) inside [1, N]; returns the densest.
// When the caller-verified mass hypothesis holds the returned density meets
// the target; otherwise found = false and the best density is still reported.
IncrementResult density_increment(const SetInWindow& A, long q, double gamma, double theta,
                                  double c = 1.0);

// ----------------------------------------------------------------------------
// Max-mass lower bound over divisor-closed arcs
// ----------------------------------------------------------------------------

struct RstrickReport {
    long q_star = 1;      // maximizer of the M'_q mass over q <= Q
    double mass = 0.0;    // that mass
    double rhs = 0.0;     // (Q / (2 sum q b(q))) * sum_r b(r) mass(M_r)
    bool verified = false;
    std::vector<double> mass_mq;        // index q in [1, Q]; [0] unused
    std::vector<double> mass_mq_prime;
};

// Requires 2 gamma Q^2 < 1 (PreconditionViolated) and the weight contract
// b(q r) >= b(r) / q, validated on every pair with q r <= Q
// (WeightContractViolated with the offending pair). The lower bound on the
// maximum is then verified on the actual masses (ValidationFailure).
RstrickReport rstrick_max(const SpectrumReport& S, double gamma, long Q,
                          const std::function<double(long)>& b);

// ----------------------------------------------------------------------------
// Iteration driver
// ----------------------------------------------------------------------------

struct DriverConfig {
    double c0 = 0.5;            // eta = c0 * delta
    double eps = 0.05;          // exponent padding
    double c_len = 1.0;         // progression length constant
    long q_cap = 64;            // desk cap on the arc denominator bound Q
    double sieve_bound_cap = 30;  // desk cap on the sieve prime bound
    long floor_window = 32;     // stop when the window drops below this
    int max_steps = 32;
    double saturation = 0.999;  // stop when the density reaches this
    double minor_threshold_factor = 1.0 / 16;  // logged sup bound, not asserted
    bool use_zn_arcs = false;   // Window-grid arcs instead of Refined-grid arcs
    int threads = 0;
};

struct DriverStep {
    long window = 0;
    double density = 0.0;
    std::vector<mpz_class> shifts;  // d_i at entry to the step
    std::string branch;  // "edge_interval" | "arc_increment" | "arc_no_increment" |
                         // "precondition_failed"
    long q = 0;          // chosen modulus (arc branches)
    double theta = 0.0;  // measured M'_q mass / (delta^2 * scale)
    double mass_mq = 0.0, mass_mq_prime = 0.0;
    double eta = 0.0;
    double gamma = 0.0, requested_gamma = 0.0;  // used vs exponent-formula value
    long Q = 0, requested_Q = 0;
    double minor_sup = 0.0, minor_threshold = 0.0;  // weighted product sum on minor arcs
    bool minor_ok = true;                           // logged, never asserted
    double new_density = 0.0;
    long new_window = 0;
};

struct IterationTrace {
    std::vector<DriverStep> steps;
    std::string terminal;  // precondition_failed | floor_reached | saturated |
                           // no_progress | step_cap
    bool valid = false;    // trace invariants held (monotone density, shrinking
                           // windows, exact shift multiplication)
};

// Desk-scale iteration: re-verify avoidance of the current forbidden set
// (step 0 failure terminates the trace; later failures throw
// ValidationFailure), take an edge ninth when one carries density 9d/8, else
// measure arc masses, pick q by rstrick_max, extract a density increment and
// restrict to the best subprogression whose step is lambda(q); shifts then
// multiply by lambda~_i(q) exactly. Minor-arc sup bounds of the weighted
// product spectrum are logged per step.
IterationTrace sarkozy_driver(const SetInWindow& A0, const SystemProfile& profile,
                              AuxiliaryFamily& fam, const DriverConfig& cfg = {});

// One JSON object per step, then one terminal object; floats at 17 digits.
std::string trace_jsonl(const IterationTrace& trace);
// "t,re,im,abs2" rows for every sample.
std::string spectrum_csv(const SpectrumReport& S);

// ----------------------------------------------------------------------------
// Blow-up step and the rational sum-set count
// ----------------------------------------------------------------------------

struct CrReport {
    long long lhs = 0;   // |R|: distinct reduced sums a/q + b/r
    double rhs = 0.0;    // |P~| (min |P_s|)^2 / (V~ E tau^8 (1 + log V))
    long E = 0;          // max over r <= V~ of the touched-numerator count
    long tau = 1;        // max divisor count over q <= V V~
    double min_ps = 0.0; // min |P_s| over s in P~
    bool ok = false;     // lhs >= rhs
};

// Exact rational enumeration of R; s-fractions are labeled at radius K with
// denominators <= V, t-fractions at radius 1/eta with denominators <= V~.
CrReport cr_count(const std::map<long, std::vector<long>>& p_s, long grid, double V,
                  double V_tilde, double K, double eta);

struct BlowupConfig {
    double c0 = 0.5;    // eta = c0 sigma / U
    double c1 = 0.01;   // X/Y split constant
    double eps = 0.05;
    long q_cap = 64;    // desk cap on the arc denominator bound
    long label_cap = 512;  // cap on denominators when labeling fractions
    double sieve_bound_cap = 30;
    std::vector<mpz_class> shifts;  // d_i; defaults to all 1
    int threads = 0;
};

struct BlowupResult {
    bool empty = false;       // every dyadic class died (legal, reported)
    std::vector<long> p_new;  // P': one frequency s + t per element of R,
                              // greedily thinned to pairwise arc-disjointness
                              // at radius K' (so |P'| <= cr.lhs = |R|)
    double u_new = 0.0, v_new = 0.0, k_new = 0.0;  // U', V', K'
    double growth = 0.0;      // (|P'| / U'^2) / (|P| / U^2)
    long v_class = 0, w_class = 0, u_class = 0;    // selected triple V~, W~, U~
    std::vector<long> p_tilde;                     // subset of P with that triple
    std::map<long, std::vector<long>> p_s;         // s -> chosen per-arc frequencies
    CrReport cr;
    double sigma = 0.0, eta = 0.0, threshold = 0.0;
    int m = 0;  // moment exponent 2 (min k_i)^2 - 1
    // Logged weighted-spectrum diagnostics (never asserted): the smallest
    // per-s triple-product mass vs its target, and the sup of |T| on the
    // minor arcs vs its target.
    double massw_min = 0.0, massw_bound = 0.0;
    double minor_sup = 0.0, minor_bound = 0.0;
    bool minor_ok = true;
};

// One spectral blow-up at desk scale. Precondition: no two elements of P in
// one radius-K arc with denominator <= V (PreconditionViolated). Pipeline:
// weighted product spectrum T, X/Y threshold split, per-arc dyadic classes,
// per-s best class and frequency selection, common-triple subset P~, exact
// sum-set R, one representative per element. Postconditions checked exactly:
// (P'1) every u in P' has |B1^(u)| >= sigma / U'; (P'2) no two elements of P'
// share a radius-K' arc. Growth is reported, never asserted.
BlowupResult blowup_step(const SetInWindow& B, const SetInWindow& B1, const std::vector<long>& P,
                         double U, double V, double K, const SystemProfile& profile,
                         AuxiliaryFamily& fam, const BlowupConfig& cfg = {});

}  // namespace pds
