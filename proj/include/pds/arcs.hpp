#pragma once
// ============================================================================
// Rational approximation and major/minor arc structure, on the circle and on
// Z_N. All classification decisions are made in exact rational arithmetic;
// floats only appear in the reported offsets.
// ============================================================================

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pds/expsum.hpp"  // Rational

namespace pds {

enum class ArcKind { Zero, Major, Minor };
const char* to_string(ArcKind k);

struct ArcLabel {
    ArcKind kind = ArcKind::Minor;
    Rational aq;        // best rational with q <= Q (center for Major)
    double beta = 0.0;  // signed circle offset alpha - a/q, in (-1/2, 1/2]
};

// Best rational approximation with denominator <= Q: continued-fraction
// convergents plus the boundary semiconvergent, compared exactly, circle
// metric, ties toward smaller q then smaller a. Returns (a/q, beta).
std::pair<Rational, mpq_class> best_rational_exact(const mpq_class& alpha, long Q);
std::pair<Rational, double> best_rational(double alpha, long Q);

// Zero iff t = 0; Major iff the best rational with q <= Q sits strictly
// within K/N of t/N; Minor otherwise (boundary |beta| = K/N is Minor).
ArcLabel classify(long t, long N, double K, long Q);

struct OverlapWitness {
    Rational f1, f2;
};

struct DisjointnessReport {
    bool hypothesis = false;  // 2 gamma Q^2 < 1, exactly
    bool disjoint = false;    // all arcs of radius gamma pairwise disjoint
    std::optional<OverlapWitness> witness;  // a closest offending pair
};

// Exact Farey-gap disjointness check of {(a/q - gamma, a/q + gamma)} over all
// reduced a/q with q <= Q, on the circle.
DisjointnessReport arc_disjointness(const mpq_class& gamma, long Q);

struct ArcDecomposition {
    long N = 0;
    double K = 0.0;
    long Q = 0;
    std::vector<ArcLabel> labels;      // index t in [0, N)
    DisjointnessReport disjointness;   // gamma = K/N
    bool mprime_identity = false;      // union-over-divisors = union-over-all-a
};

// Full labeling of Z_N plus the disjointness certificate and the exact
// verification that for every q <= Q the union of M_r over r | q equals the
// union of the K/N-arcs around a/q for all a (reduced or not).
ArcDecomposition decompose(long N, double K, long Q);

// CSV rows "t,kind,a,q" (header included).
std::string decomposition_csv(const ArcDecomposition& d);

}  // namespace pds
