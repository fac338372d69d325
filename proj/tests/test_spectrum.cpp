// ============================================================================
// Spectrum module: transforms against hand-computed DFTs, dual-route
// difference counts, arc-mass partitions, density increments, the max-mass
// bound, full driver traces, and the blow-up step against a worked example.
// ============================================================================

#include "pds/spectrum.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pds/errors.hpp"
#include "require.hpp"

using namespace pds;

namespace {

std::shared_ptr<RootSystem> square_system() {
    return std::make_shared<RootSystem>(std::vector<IntPoly>{parse_poly("x^2")},
                                        InputMode::Integer);
}

long long naive_diff_count(const std::vector<long>& A, const std::vector<long>& D) {
    long long c = 0;
    for (long a : A)
        for (long b : A)
            if (a > b)
                for (long d : D)
                    if (a - b == d) { ++c; break; }
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------

static void test_balanced_dft_hand_values() {
    // A = {1} in [1,4]: the balanced transform has |fhat(t)| = 1/4 for t != 0.
    SpectrumReport S = balanced_dft(make_window_set(4, {1}));
    REQUIRE(S.grid == 4 && S.kind == SpectrumGrid::Window, "window grid of size N");
    REQUIRE(std::abs(S.fhat[0]) <= 1e-12, "balanced transform vanishes at 0");
    for (long t = 1; t < 4; ++t)
        REQUIRE(std::abs(std::abs(S.fhat[static_cast<size_t>(t)]) - 0.25) <= 1e-12,
                "|fhat(t)| = 1/4 for t = " << t);
    require_close("parseval {1} in [1,4]", S.parseval_total, 3.0 / 16, 1e-12, 1e-12);

    // Evens in [1,8]: all mass at t = 4, fhat(4) = 1/2 exactly.
    SpectrumReport E = balanced_dft(make_window_set(8, {2, 4, 6, 8}));
    for (long t = 0; t < 8; ++t) {
        double want = t == 4 ? 0.5 : 0.0;
        REQUIRE(std::abs(E.fhat[static_cast<size_t>(t)] - cplx(want, 0.0)) <= 1e-12,
                "evens transform at t = " << t);
    }
    require_close("parseval evens in [1,8]", E.parseval_total, 0.25, 1e-12, 1e-12);

    // The full window balances to the zero function on both grids.
    for (SpectrumGrid g : {SpectrumGrid::Window, SpectrumGrid::Refined}) {
        std::vector<long> all(10);
        for (long x = 1; x <= 10; ++x) all[static_cast<size_t>(x - 1)] = x;
        SpectrumReport F = balanced_dft(make_window_set(10, all), g);
        double mx = 0.0;
        for (const cplx& v : F.fhat) mx = std::max(mx, std::abs(v));
        REQUIRE(mx <= 1e-12, "full window transform is identically zero");
        REQUIRE(F.parseval_total <= 1e-12, "full window has no balanced mass");
    }

    // Refined grid: 4N samples, unnormalized, Parseval N delta (1 - delta).
    SpectrumReport R = balanced_dft(make_window_set(8, {2, 4, 6, 8}), SpectrumGrid::Refined);
    REQUIRE(R.grid == 32, "refined grid has 4N samples");
    require_close("refined parseval evens", R.parseval_total, 8 * 0.25, 1e-9, 1e-9);
    pass("balanced_dft matches hand-computed transforms");
}

static void test_difference_count() {
    REQUIRE(difference_count(make_window_set(3, {1, 2, 3}), {1}) == 2,
            "{1,2,3} has two differences equal to 1");
    REQUIRE(difference_count(make_window_set(10, {1, 2, 3}), {5}) == 0,
            "{1,2,3} has no difference equal to 5");
    REQUIRE(difference_count(make_window_set(10, {1, 6}), {5}) == 1,
            "{1,6} has one difference equal to 5");
    bool threw = false;
    try {
        difference_count(make_window_set(10, {1, 2}), {10});
    } catch (const DomainError&) {
        threw = true;
    }
    REQUIRE(threw, "difference value outside [1, N-1] rejected");

    std::vector<long> squares;
    for (long k = 1; k * k < 150; ++k) squares.push_back(k * k);
    std::mt19937 rng(20260814);
    for (int round = 0; round < 30; ++round) {
        std::vector<long> el;
        for (long x = 1; x <= 150; ++x)
            if (rng() % 3 == 0) el.push_back(x);
        SetInWindow A = make_window_set(150, el);
        REQUIRE(difference_count(A, squares) == naive_diff_count(A.elements, squares),
                "dual-route count matches the naive oracle on round " << round);
    }
    pass("difference_count agrees with the naive oracle", "30 random rounds");
}

static void test_arc_mass() {
    // Evens in [1,8]: all balanced mass sits at 4/8 = 1/2.
    SpectrumReport E = balanced_dft(make_window_set(8, {2, 4, 6, 8}));
    ArcMass m2 = arc_l2_mass(E, 2, 0.01);
    require_close("evens mass on M_2", m2.mq, 0.25, 1e-12, 1e-12);
    require_close("evens mass on M'_2", m2.mq_prime, 0.25, 1e-12, 1e-12);
    ArcMass m1 = arc_l2_mass(E, 1, 0.01);
    REQUIRE(m1.mq <= 1e-12 && m1.mq_prime <= 1e-12, "no evens mass near 0/1");
    ArcMass m3 = arc_l2_mass(E, 3, 0.01);
    REQUIRE(m3.mq <= 1e-12, "no evens mass on thirds");
    require_close("M'_6 collects the half", arc_l2_mass(E, 6, 0.01).mq_prime, 0.25, 1e-12,
                  1e-12);

    // At a radius below the grid spacing the arcs M_q, q <= N, partition the
    // nonzero frequencies by reduced denominator; masses sum to Parseval.
    SpectrumReport S = balanced_dft(make_window_set(12, {1, 3, 4, 7, 11}));
    double total = 0.0, prime_sum = 0.0;
    for (long q = 1; q <= 12; ++q) total += arc_l2_mass(S, q, 1e-7).mq;
    require_close("arc masses partition the spectrum", total, S.parseval_total, 1e-12, 1e-9);
    for (long r : {1L, 2L, 3L, 4L, 6L, 12L}) prime_sum += arc_l2_mass(S, r, 1e-7).mq;
    require_close("M'_12 equals the divisor union", arc_l2_mass(S, 12, 1e-7).mq_prime,
                  prime_sum, 1e-12, 1e-9);
    pass("arc_l2_mass partitions and pins hand values");
}

static void test_density_increment() {
    // Full window with theta = 0: the progression length collapses to zero
    // and no increment is reported.
    std::vector<long> all(64);
    for (long x = 1; x <= 64; ++x) all[static_cast<size_t>(x - 1)] = x;
    IncrementResult r0 = density_increment(make_window_set(64, all), 3, 1.0 / 128, 0.0);
    REQUIRE(!r0.found && r0.P.length == 0, "theta = 0 gives no progression to search");

    // Evens with q = 2: a full step-2 progression of density 1.
    std::vector<long> ev;
    for (long x = 2; x <= 64; x += 2) ev.push_back(x);
    IncrementResult r1 = density_increment(make_window_set(64, ev), 2, 1.0 / 128, 1.0);
    REQUIRE(r1.found, "evens admit a step-2 increment");
    REQUIRE(r1.P.length == 32 && r1.P.step == 2, "length floor(min(64,128)/2) = 32");
    require_close("evens increment density", r1.new_density, 1.0, 1e-12, 1e-12);
    REQUIRE(r1.fiber.N == 32 && static_cast<long>(r1.fiber.elements.size()) == 32,
            "fiber is the full re-indexed window");

    // Planted step-6 runs: the search must recover density 1.
    std::mt19937 rng(77);
    for (int round = 0; round < 3; ++round) {
        long x0 = 1 + static_cast<long>(rng() % 100);
        std::vector<long> el;
        for (long j = 0; j < 40; ++j) el.push_back(x0 + 6 * j);
        IncrementResult rr =
            density_increment(make_window_set(400, el), 6, 1.0 / 120, 120.0 / 400);
        REQUIRE(rr.found, "planted run found on round " << round);
        require_close("planted run density", rr.new_density, 1.0, 1e-12, 1e-12);
        REQUIRE(rr.P.length == 20, "planted run length floor(120/6)");
    }
    pass("density_increment finds planted structure");
}

static void test_rstrick() {
    SpectrumReport E = balanced_dft(make_window_set(8, {2, 4, 6, 8}));

    // Unit weights, Q = 2: max over {M'_1, M'_2} = 1/4 and the averaging
    // bound is 2 * (1/4) / (2 * 3) = 1/12.
    RstrickReport r1 = rstrick_max(E, 0.01, 2, [](long) { return 1.0; });
    REQUIRE(r1.q_star == 2, "maximizer is q = 2");
    require_close("max mass", r1.mass, 0.25, 1e-12, 1e-12);
    require_close("averaging bound", r1.rhs, 1.0 / 12, 1e-12, 1e-12);
    REQUIRE(r1.verified, "bound verified on the actual masses");

    // b(q) = q^{-1/2}, Q = 4: M'_4 ties M'_2 at 1/4, the smaller q wins.
    RstrickReport r2 =
        rstrick_max(E, 0.49 / 16, 4, [](long q) { return 1.0 / std::sqrt(static_cast<double>(q)); });
    REQUIRE(r2.q_star == 2, "tie between M'_2 and M'_4 resolves to q = 2");
    require_close("max mass at sqrt weights", r2.mass, 0.25, 1e-12, 1e-12);

    // b(q) = 1/q^2 breaks the contract at q = 2, r = 1.
    bool contract = false;
    try {
        rstrick_max(E, 0.01, 4, [](long q) { return 1.0 / (static_cast<double>(q) * q); });
    } catch (const WeightContractViolated& e) {
        contract = true;
        REQUIRE(e.q == 2 && e.r == 1, "offending pair is (q, r) = (2, 1), got q=" << e.q
                                                                                  << " r=" << e.r);
    }
    REQUIRE(contract, "1/q^2 violates the weight contract");

    bool pre = false;
    try {
        rstrick_max(E, 0.1, 3, [](long) { return 1.0; });
    } catch (const PreconditionViolated&) {
        pre = true;
    }
    REQUIRE(pre, "2 gamma Q^2 >= 1 rejected");
    pass("rstrick_max pins masses, bound, and contract checks");
}

// ---------------------------------------------------------------------------

static void test_driver_precondition() {
    auto fam = AuxiliaryFamily(square_system());
    SystemProfile prof = compute_profile({parse_poly("x^2")}, 1, 0, 0);
    std::vector<long> all(64);
    for (long x = 1; x <= 64; ++x) all[static_cast<size_t>(x - 1)] = x;
    IterationTrace tr = sarkozy_driver(make_window_set(64, all), prof, fam);
    REQUIRE(tr.terminal == "precondition_failed", "full window is not avoiding");
    REQUIRE(tr.steps.size() == 1 && tr.steps[0].branch == "precondition_failed",
            "failure recorded as the only step");
    REQUIRE(tr.valid, "trace with a step-0 failure is still well-formed");
    pass("driver rejects a non-avoiding start");
}

static void test_driver_arc_step() {
    // 23Z in [1, 414]: no edge ninth carries 9 delta / 8, the spectrum
    // concentrates on denominator-23 fractions, and the increment lands on a
    // full step-23 progression. lambda(23) = 529 shrinks the window below one
    // point, so the trace is one arc step ending at the floor.
    auto fam = AuxiliaryFamily(square_system());
    SystemProfile prof = compute_profile({parse_poly("x^2")}, 1, 0, 0);
    std::vector<long> el;
    for (long k = 1; 23 * k <= 414; ++k) el.push_back(23 * k);
    DriverConfig cfg;
    cfg.c_len = 0.1;
    IterationTrace tr = sarkozy_driver(make_window_set(414, el), prof, fam, cfg);
    REQUIRE(tr.steps.size() == 1, "single arc step, got " << tr.steps.size());
    const DriverStep& st = tr.steps[0];
    REQUIRE(st.branch == "arc_increment", "arc increment taken, got " << st.branch);
    REQUIRE(st.q == 23, "mass maximizer is q = 23, got " << st.q);
    require_close("theta on the 23-progression", st.theta, 5.5, 1e-9, 1e-9);
    require_close("mass on M'_23", st.mass_mq_prime, 7128.0 / 1656, 1e-9, 1e-9);
    require_close("extracted density", st.new_density, 1.0, 1e-12, 1e-12);
    REQUIRE(st.new_window == 0, "lambda(23) = 529 exceeds the progression length");
    REQUIRE(st.Q == 64 && st.requested_Q > 64, "denominator bound capped at the desk limit");
    REQUIRE(st.gamma < st.requested_gamma, "radius tamed to keep arcs disjoint");
    REQUIRE(tr.terminal == "floor_reached", "terminal floor_reached, got " << tr.terminal);
    REQUIRE(tr.valid, "trace invariants hold");

    std::string js = trace_jsonl(tr);
    REQUIRE(js.find("\"branch\":\"arc_increment\"") != std::string::npos &&
                js.find("\"terminal\":\"floor_reached\"") != std::string::npos,
            "jsonl carries the branch and terminal");
    REQUIRE(std::count(js.begin(), js.end(), '\n') == 2, "one line per step plus terminal");
    pass("driver arc step on 23Z", "theta = 5.5, q* = 23");
}

static void test_driver_two_branches() {
    // {23, 46} in [1, 900]: the left ninth [1, 100] holds both points at
    // density 0.02 >= 9 delta / 8, then the shrunk window goes to the arcs.
    auto fam = AuxiliaryFamily(square_system());
    SystemProfile prof = compute_profile({parse_poly("x^2")}, 1, 0, 0);
    IterationTrace tr = sarkozy_driver(make_window_set(900, {23, 46}), prof, fam);
    REQUIRE(tr.steps.size() >= 2, "at least the edge step and one arc step");
    REQUIRE(tr.steps[0].branch == "edge_interval", "first step takes the left ninth");
    REQUIRE(tr.steps[0].new_window == 100, "ninth of 900");
    require_close("edge density", tr.steps[0].new_density, 0.02, 1e-12, 1e-12);
    REQUIRE(tr.steps[1].window == 100, "second step starts from the ninth");
    REQUIRE(tr.steps[1].branch == "arc_increment" || tr.steps[1].branch == "arc_no_increment",
            "second step measures arcs, got " << tr.steps[1].branch);
    REQUIRE(tr.valid, "two-branch trace invariants hold");
    REQUIRE(!tr.terminal.empty(), "trace terminated");
    pass("driver exercises edge and arc branches", "terminal " + tr.terminal);
}

static void test_driver_greedy_run() {
    // Greedy square-difference avoider in [1, 2^14], full structural run.
    auto fam = AuxiliaryFamily(square_system());
    SystemProfile prof = compute_profile({parse_poly("x^2")}, 1, 0, 0);
    const long N = 1 << 14;
    ForbiddenSet F = forbidden_differences({parse_poly("x^2")}, N);
    ExtremalResult g = greedy_avoiding(F);
    IterationTrace tr = sarkozy_driver(make_window_set(N, g.witness), prof, fam);
    REQUIRE(tr.valid, "greedy run trace invariants hold");
    REQUIRE(!tr.steps.empty(), "greedy run made progress");
    for (const DriverStep& st : tr.steps)
        REQUIRE(st.branch == "edge_interval" || st.branch == "arc_increment" ||
                    st.branch == "arc_no_increment",
                "greedy run step branch " << st.branch);
    REQUIRE(tr.terminal == "floor_reached" || tr.terminal == "no_progress" ||
                tr.terminal == "saturated" || tr.terminal == "step_cap",
            "greedy run terminal " << tr.terminal);
    double last = 0.0;
    for (const DriverStep& st : tr.steps) {
        REQUIRE(st.density + 1e-9 >= last, "densities nondecreasing along the trace");
        last = st.density;
    }
    pass("driver full run on the greedy avoider",
         "steps " + std::to_string(tr.steps.size()) + ", terminal " + tr.terminal);
}

// ---------------------------------------------------------------------------

static void test_cr_count() {
    // One s with three t's at distinct reduced fractions: |R| = |P_s|.
    std::map<long, std::vector<long>> ps{{100, {64, 128, 192}}};
    CrReport c1 = cr_count(ps, 1024, 1.0, 16.0, 1.0, 1.0 / 12);
    REQUIRE(c1.lhs == 3, "distinct fractions give |R| = 3, got " << c1.lhs);
    REQUIRE(c1.ok, "count bound holds");
    require_close("min |P_s|", c1.min_ps, 3.0, 1e-12, 1e-12);

    // A designed collision: 0/1 + 1/2 = 1/2 + 0/1, so |R| = 1 < 2.
    std::map<long, std::vector<long>> pc{{8, {512}}, {520, {8}}};
    CrReport c2 = cr_count(pc, 1024, 2.0, 2.0, 1.0, 1.0 / 12);
    REQUIRE(c2.lhs == 1, "colliding sums merge, got " << c2.lhs);

    CrReport c3 = cr_count({}, 1024, 2.0, 2.0, 1.0, 1.0 / 12);
    REQUIRE(c3.lhs == 0 && c3.rhs == 0.0 && c3.ok, "empty family counts zero");
    pass("cr_count pins sum-set cardinalities");
}

static void test_blowup_hand_example() {
    // B = evens in [1, 4096], B1 = evens in [1, 2048], P = {0}, U = 3, V = 1,
    // K = 1. Every quantity below is hand-computed: the only alive arc is
    // q = 2 with |B^(2048)| = 1/2, |B1^(2048)| = 1/4, classes (i,j,k) =
    // (1,0,1), P' = {2048}, U' = 2, V' = 2, K' = 13, growth = 9/4.
    auto fam = AuxiliaryFamily(square_system());
    SystemProfile prof = compute_profile({parse_poly("x^2")}, 1, 0, 0);
    std::vector<long> ev, ev1;
    for (long x = 2; x <= 4096; x += 2) ev.push_back(x);
    for (long x = 2; x <= 2048; x += 2) ev1.push_back(x);
    SetInWindow B = make_window_set(4096, ev), B1 = make_window_set(4096, ev1);
    BlowupResult r = blowup_step(B, B1, {0}, 3.0, 1.0, 1.0, prof, fam);

    REQUIRE(!r.empty, "structured input yields a nonempty selection");
    require_close("sigma", r.sigma, 0.5, 1e-12, 1e-12);
    REQUIRE(r.m == 7, "moment exponent 2*2^2 - 1");
    require_close("eta", r.eta, 1.0 / 12, 1e-12, 1e-12);
    REQUIRE(r.v_class == 2 && r.w_class == 1 && r.u_class == 2,
            "selected triple (2,1,2), got (" << r.v_class << "," << r.w_class << ","
                                             << r.u_class << ")");
    REQUIRE(r.p_tilde == std::vector<long>{0}, "common-triple subset is {0}");
    REQUIRE(r.p_s.at(0) == std::vector<long>{2048}, "P_0 = {2048}");
    REQUIRE(r.p_new == std::vector<long>{2048}, "P' = {2048}");
    require_close("U'", r.u_new, 2.0, 1e-12, 1e-12);
    require_close("V'", r.v_new, 2.0, 1e-12, 1e-12);
    require_close("K'", r.k_new, 13.0, 1e-12, 1e-12);
    require_close("growth", r.growth, 2.25, 1e-12, 1e-12);
    REQUIRE(r.cr.lhs == 1 && r.cr.E == 1 && r.cr.tau == 2, "count report (1, E=1, tau=2)");
    require_close("count bound rhs", r.cr.rhs, 1.0 / 512, 1e-12, 1e-12);
    require_close("weighted triple mass", r.massw_min, 9.0 / 8192, 1e-9, 1e-9);
    require_close("weighted mass target", r.massw_bound, 0.25 / 15, 1e-12, 1e-12);
    REQUIRE(!r.minor_ok || r.minor_sup <= r.minor_bound, "minor flag consistent");
    pass("blow-up matches the hand-worked evens example", "growth 9/4");
}

static void test_blowup_random_and_precondition() {
    auto fam = AuxiliaryFamily(square_system());
    SystemProfile prof = compute_profile({parse_poly("x^2")}, 1, 0, 0);

    std::mt19937 rng(424242);
    for (int round = 0; round < 5; ++round) {
        std::vector<long> el, el1;
        for (long x = 1; x <= 1024; ++x)
            if (rng() & 1) {
                el.push_back(x);
                if (x <= 512) el1.push_back(x);
            }
        if (el.empty() || el1.empty()) continue;
        SetInWindow B = make_window_set(1024, el), B1 = make_window_set(1024, el1);
        BlowupResult r = blowup_step(B, B1, {0}, 3.0, 1.0, 1.0, prof, fam);
        if (!r.empty) {
            REQUIRE(r.cr.ok, "count bound holds on random round " << round);
            REQUIRE(!r.p_new.empty(), "nonempty selection provides frequencies");
        }
    }

    bool pre = false;
    try {
        std::vector<long> ev, ev1;
        for (long x = 2; x <= 4096; x += 2) ev.push_back(x);
        for (long x = 2; x <= 2048; x += 2) ev1.push_back(x);
        blowup_step(make_window_set(4096, ev), make_window_set(4096, ev1), {0, 1}, 3.0, 1.0,
                    2.0, prof, fam);
    } catch (const PreconditionViolated&) {
        pre = true;
    }
    REQUIRE(pre, "two input frequencies in one arc rejected");
    pass("blow-up random rounds and the arc-disjointness precondition");
}

static void test_serialization() {
    SpectrumReport S = balanced_dft(make_window_set(4, {1}));
    std::string csv = spectrum_csv(S);
    REQUIRE(csv.rfind("t,re,im,abs2\n", 0) == 0, "csv header first");
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5, "header plus one row per sample");
    pass("spectrum csv shape");
}

int main() {
    test_balanced_dft_hand_values();
    test_difference_count();
    test_arc_mass();
    test_density_increment();
    test_rstrick();
    test_driver_precondition();
    test_driver_arc_step();
    test_driver_two_branches();
    test_driver_greedy_run();
    test_cr_count();
    test_blowup_hand_example();
    test_blowup_random_and_precondition();
    test_serialization();
    pass("spectrum module");
    return 0;
}
