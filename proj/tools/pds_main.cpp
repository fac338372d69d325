// ============================================================================
// Command-line front end: configuration, subcommand dispatch, and artifact
// persistence. Every artifact embeds the tool version, a hash of the active
// configuration, and the seed; floats serialize at 17 significant digits
// with sorted keys so identical inputs reproduce byte-identical JSON.
// ============================================================================

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pds/arcs.hpp"
#include "pds/aux_family.hpp"
#include "pds/certify.hpp"
#include "pds/errors.hpp"
#include "pds/expsum.hpp"
#include "pds/extremal.hpp"
#include "pds/int_poly.hpp"
#include "pds/sieve.hpp"
#include "pds/spectrum.hpp"

using nlohmann::json;
using namespace pds;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// ----------------------------------------------------------------------------
// Canonical JSON: sorted keys (json objects are ordered maps already) and
// %.17g floats, so byte-identical output is reproducible across runs.
// ----------------------------------------------------------------------------

std::string fmt17(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void dump_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::null: out += "null"; break;
        case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case json::value_t::number_integer:
            out += std::to_string(j.get<long long>());
            break;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            break;
        case json::value_t::number_float: out += fmt17(j.get<double>()); break;
        case json::value_t::string: out += json(j.get<std::string>()).dump(); break;
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                dump_canonical(v, out);
            }
            out += ']';
            break;
        }
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        default: out += "null"; break;
    }
}

std::string dump_canonical(const json& j) {
    std::string out;
    dump_canonical(j, out);
    out += '\n';
    return out;
}

// ----------------------------------------------------------------------------
// Configuration
// ----------------------------------------------------------------------------

struct RunConfig {
    long max_n = 1L << 20;      // cap on window sizes
    long max_q = 100000;        // cap on moduli
    double sieve_bound = 30.0;  // cap on the sieve prime bound
    double c0 = 0.5;            // eta = c0 * delta (driver), c0 sigma / U (blow-up)
    double c1 = 0.01;           // blow-up split constant
    double eps = 0.05;          // exponent padding
    long q_cap = 64;            // cap on the arc denominator bound Q
    std::string out_dir = ".";
    unsigned long long seed = 1;
    int threads = 0;
};

std::string config_hash(const RunConfig& c) {
    std::ostringstream os;
    os << "c0=" << fmt17(c.c0) << ";c1=" << fmt17(c.c1) << ";eps=" << fmt17(c.eps)
       << ";max_n=" << c.max_n << ";max_q=" << c.max_q << ";q_cap=" << c.q_cap
       << ";sieve_bound=" << fmt17(c.sieve_bound) << ";threads=" << c.threads;
    const std::string s = os.str();
    unsigned long long h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, static_cast<uint64_t>(h));
    return buf;
}

json artifact_base(const RunConfig& c, const std::string& sub) {
    json j;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(c);
    j["seed"] = c.seed;
    j["subcommand"] = sub;
    return j;
}

std::string write_file(const RunConfig& c, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(c.out_dir);
    std::filesystem::path p = std::filesystem::path(c.out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ResourceError("cli: cannot write " + p.string());
    f << text;
    return p.string();
}

void emit(const RunConfig& c, const std::string& name, const json& j) {
    std::cout << "wrote " << write_file(c, name, dump_canonical(j)) << "\n";
}

// ----------------------------------------------------------------------------
// Serialization helpers
// ----------------------------------------------------------------------------

json to_json(const cplx& z) { return json{{"im", z.imag()}, {"re", z.real()}}; }

json to_json(const Rational& r) { return json{{"a", r.a}, {"q", r.q}}; }

json to_json(const SumValue& s) {
    return json{{"abs", std::abs(s.value)},
                {"absolute_error_budget", s.absolute_error_budget},
                {"terms", s.terms},
                {"value", to_json(s.value)},
                {"weight_l1", s.weight_l1}};
}

json to_json(const IntPoly& h) {
    json coeffs = json::array();
    for (int i = 0; i <= h.degree(); ++i) coeffs.push_back(h.coeff(i).get_str());
    return json{{"coeffs", coeffs}, {"text", h.format()}};
}

json to_json(const Certificate& c) {
    json w = json::array();
    for (const PrimeWitness& pw : c.witnesses)
        w.push_back(json{{"multiplicity", pw.multiplicity},
                         {"p", pw.p},
                         {"precision", pw.precision},
                         {"residue", pw.residue.get_str()}});
    json roots = json::array();
    for (const mpq_class& r : c.rational_roots_used) roots.push_back(r.get_str());
    return json{{"detail", c.detail},
                {"mode", to_string(c.mode)},
                {"p_max", c.p_max},
                {"positive", c.positive()},
                {"rational_roots_used", roots},
                {"status", to_string(c.status)},
                {"witness_modulus", c.witness_modulus.get_str()},
                {"witness_prime", c.witness_prime},
                {"witnesses", w}};
}

json to_json(const SystemProfile& p) {
    json cls = json::array();
    for (SlotClass c : p.classes) cls.push_back(to_string(c));
    return json{{"D", p.D.get_str()},
                {"Dprime", p.Dprime.get_str()},
                {"K", p.K.get_str()},
                {"classes", cls},
                {"degrees", p.degrees},
                {"k_product", p.k_product.get_str()},
                {"l1", p.l1},
                {"l2", p.l2},
                {"l3", p.l3},
                {"rho", p.rho.get_str()},
                {"sparse_counts", p.sparse_counts}};
}

json to_json(const AsymptoticReport& r) {
    return json{{"direct", to_json(r.direct)},
                {"error", r.error},
                {"main_term", to_json(r.main_term)},
                {"measured_constant", r.measured_constant},
                {"paper_bound", r.paper_bound}};
}

// elapsed_ms stays on stdout: artifacts must be byte-identical across runs.
json to_json(const ExtremalResult& r) {
    return json{{"lower_bound", r.lower_bound},
                {"nodes", r.nodes},
                {"optimal", r.optimal},
                {"size", r.size},
                {"window", r.window},
                {"witness", r.witness}};
}

json to_json(const CrReport& c) {
    return json{{"E", c.E},      {"lhs", c.lhs},       {"min_ps", c.min_ps},
                {"ok", c.ok},    {"rhs", c.rhs},       {"tau", c.tau}};
}

// ----------------------------------------------------------------------------
// Input parsing helpers
// ----------------------------------------------------------------------------

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        if (cur.empty()) continue;
        out.push_back(std::stol(cur));
    }
    return out;
}

std::vector<long> read_long_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ResourceError("cli: cannot read " + path);
    std::vector<long> out;
    long x;
    while (f >> x) out.push_back(x);
    return out;
}

std::vector<long> gather_elements(const std::string& list, const std::string& file) {
    if (!file.empty()) return read_long_file(file);
    return parse_long_list(list);
}

InputMode parse_mode(const std::string& m) {
    if (m == "integer") return InputMode::Integer;
    if (m == "prime") return InputMode::Prime;
    throw DomainError("cli: mode must be 'integer' or 'prime'");
}

std::vector<IntPoly> parse_polys(const std::vector<std::string>& texts) {
    std::vector<IntPoly> out;
    for (const std::string& t : texts) out.push_back(parse_poly(t));
    if (out.empty()) throw DomainError("cli: at least one polynomial required");
    return out;
}

SystemProfile profile_for(const std::vector<IntPoly>& polys, long l1, long l2, long l3) {
    size_t n = polys.size();
    if (l1 < 0) {  // default split: all slots General
        l1 = static_cast<long>(n);
        l2 = l3 = 0;
    }
    return compute_profile(polys, static_cast<size_t>(l1), static_cast<size_t>(l2),
                           static_cast<size_t>(l3));
}

struct VariantFlags {
    std::string kind = "plain";
    std::string W = "1";
    long L = 1;
    long long d = 1;
    std::string r = "0";
};

WeylVariant build_variant(const VariantFlags& f) {
    if (f.kind == "plain") return WeylVariant::plain();
    if (f.kind == "sieved") return WeylVariant::sieved(mpz_class(f.W));
    if (f.kind == "weighted") return WeylVariant::weighted(f.L);
    if (f.kind == "weighted-sieved") return WeylVariant::weighted_sieved(f.L, mpz_class(f.W));
    if (f.kind == "prime") return WeylVariant::prime(f.d, mpz_class(f.r));
    throw DomainError("cli: unknown variant '" + f.kind + "'");
}

void add_variant_flags(CLI::App* sub, std::shared_ptr<VariantFlags> vf) {
    sub->add_option("--variant", vf->kind,
                    "plain | sieved | weighted | weighted-sieved | prime");
    sub->add_option("--W", vf->W, "sieve modulus for the sieved variants");
    sub->add_option("--L", vf->L, "normalization length for the weighted variants");
    sub->add_option("--d", vf->d, "fiber scale for the prime variant");
    sub->add_option("--r", vf->r, "fiber shift for the prime variant");
}

}  // namespace

// ----------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"desk-scale toolkit for polynomial difference sets"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");

    auto cfg = std::make_shared<RunConfig>();
    app.add_option("--max-n", cfg->max_n, "cap on window sizes")->check(CLI::PositiveNumber);
    app.add_option("--max-q", cfg->max_q, "cap on moduli")->check(CLI::PositiveNumber);
    app.add_option("--sieve-bound", cfg->sieve_bound, "cap on the sieve prime bound")
        ->check(CLI::PositiveNumber);
    app.add_option("--c0", cfg->c0, "radius constant");
    app.add_option("--c1", cfg->c1, "blow-up split constant");
    app.add_option("--eps", cfg->eps, "exponent padding");
    app.add_option("--q-cap", cfg->q_cap, "cap on the arc denominator bound")
        ->check(CLI::PositiveNumber);
    app.add_option("--out-dir", cfg->out_dir, "artifact output directory");
    app.add_option("--seed", cfg->seed, "seed recorded in artifacts");
    app.add_option("--threads", cfg->threads, "worker thread cap (0 = hardware)");

    // ---- certify -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("certify", "root certificates modulo every q");
        auto poly = std::make_shared<std::string>();
        auto mode = std::make_shared<std::string>("integer");
        auto pmax = std::make_shared<unsigned long long>(10000);
        sub->add_option("poly", *poly, "polynomial, e.g. \"(x^3-19)*(x^2+x+1)\"")->required();
        sub->add_option("--mode", *mode, "integer | prime");
        sub->add_option("--pmax", *pmax, "prime scan bound");
        sub->callback([=]() {
            if (static_cast<long>(*pmax) > cfg->max_q)
                throw ResourceError("cli: pmax exceeds the configured modulus cap");
            IntPoly h = parse_poly(*poly);
            Certificate c = certify_intersective(h, *pmax, parse_mode(*mode));
            json a = artifact_base(*cfg, "certify");
            a["poly"] = to_json(h);
            a["result"] = to_json(c);
            std::cout << "certify: " << to_string(c.status) << " (scan bound " << c.p_max
                      << ")\n";
            emit(*cfg, "certify.json", a);
        });
    }

    // ---- profile ---------------------------------------------------------
    {
        auto* sub = app.add_subcommand("profile", "slot classes and derived exponents");
        auto polys = std::make_shared<std::vector<std::string>>();
        auto l1 = std::make_shared<long>(-1), l2 = std::make_shared<long>(0),
             l3 = std::make_shared<long>(0);
        sub->add_option("--poly", *polys, "slot polynomial (repeatable)")->required();
        sub->add_option("--l1", *l1, "general slots");
        sub->add_option("--l2", *l2, "monomial slots");
        sub->add_option("--l3", *l3, "vanishing slots");
        sub->callback([=]() {
            std::vector<IntPoly> ps = parse_polys(*polys);
            SystemProfile pr = profile_for(ps, *l1, *l2, *l3);
            json a = artifact_base(*cfg, "profile");
            a["result"] = to_json(pr);
            std::cout << "profile: D = " << pr.D.get_str() << ", D' = " << pr.Dprime.get_str()
                      << "\n";
            emit(*cfg, "profile.json", a);
        });
    }

    // ---- aux -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("aux", "auxiliary polynomial at a shift");
        auto poly = std::make_shared<std::string>();
        auto d = std::make_shared<std::string>("1");
        auto mode = std::make_shared<std::string>("integer");
        sub->add_option("--poly", *poly)->required();
        sub->add_option("--d", *d, "shift parameter (decimal integer)");
        sub->add_option("--mode", *mode, "integer | prime");
        sub->callback([=]() {
            auto sys = std::make_shared<RootSystem>(std::vector<IntPoly>{parse_poly(*poly)},
                                                    parse_mode(*mode));
            AuxiliaryFamily fam(sys);
            mpz_class dz(*d);
            AuxEntry e = fam.entry(0, dz);
            auto cb = fam.check_content_bound(0, dz);
            json a = artifact_base(*cfg, "aux");
            a["result"] = json{{"aux", to_json(e.aux)},
                               {"content_bound", json{{"lhs", cb.lhs.get_str()},
                                                      {"ok", cb.ok},
                                                      {"rhs", cb.rhs.get_str()}}},
                               {"d", e.d.get_str()},
                               {"lambda", e.lambda.get_str()},
                               {"lead", e.lead.get_str()},
                               {"r", e.r.get_str()}};
            std::cout << "aux: r = " << e.r.get_str() << ", lambda = " << e.lambda.get_str()
                      << "\n";
            emit(*cfg, "aux.json", a);
        });
    }

    // ---- gauss -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("gauss", "complete exponential sums mod q");
        auto poly = std::make_shared<std::string>();
        auto aq = std::make_shared<std::string>();
        auto kind = std::make_shared<std::string>("complete");
        auto d = std::make_shared<long long>(1);
        auto r = std::make_shared<std::string>("0");
        auto W = std::make_shared<std::string>("1");
        sub->add_option("--poly", *poly)->required();
        sub->add_option("--aq", *aq, "exact rational a/q")->required();
        sub->add_option("--variant", *kind, "complete | unit | shifted | coprime");
        sub->add_option("--d", *d, "shifted variant scale");
        sub->add_option("--r", *r, "shifted variant shift");
        sub->add_option("--W", *W, "coprime variant modulus");
        sub->callback([=]() {
            IntPoly g = parse_poly(*poly);
            Rational rat = parse_rational(*aq);
            if (rat.q > cfg->max_q) throw ResourceError("cli: q exceeds the configured cap");
            cplx v;
            if (*kind == "complete") v = gauss_complete(g, rat);
            else if (*kind == "unit") v = gauss_unit(g, rat);
            else if (*kind == "shifted") v = gauss_shifted_prime(g, rat, *d, mpz_class(*r));
            else if (*kind == "coprime") v = gauss_coprime_part(g, rat, mpz_class(*W));
            else throw DomainError("cli: unknown gauss variant '" + *kind + "'");
            json a = artifact_base(*cfg, "gauss");
            a["result"] = json{{"abs", std::abs(v)},
                               {"aq", to_json(rat)},
                               {"value", to_json(v)},
                               {"variant", *kind}};
            std::cout << "gauss: |sum| = " << fmt17(std::abs(v)) << "\n";
            emit(*cfg, "gauss.json", a);
        });
    }

    // ---- weyl -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("weyl", "finite exponential sums over n <= M");
        auto poly = std::make_shared<std::string>();
        auto alpha = std::make_shared<std::string>();
        auto alpha_real = std::make_shared<double>(std::nan(""));
        auto beta = std::make_shared<double>(0.0);
        auto M = std::make_shared<long>(0);
        auto vf = std::make_shared<VariantFlags>();
        sub->add_option("--alpha", *alpha, "exact rational a/q (center)");
        sub->add_option("--alpha-real", *alpha_real,
                        "real alpha (inexact; prefer --alpha a/q)");
        sub->add_option("--beta", *beta, "offset from the rational center");
        sub->add_option("--poly", *poly)->required();
        sub->add_option("--M", *M, "summation length")->required()->check(CLI::PositiveNumber);
        add_variant_flags(sub, vf);
        sub->callback([=]() {
            IntPoly g = parse_poly(*poly);
            WeylVariant v = build_variant(*vf);
            SumValue s;
            json center;
            if (!std::isnan(*alpha_real)) {
                s = weyl_sum(g, *alpha_real, *M, v);
                center = *alpha_real;
            } else {
                if (alpha->empty()) throw DomainError("cli: --alpha or --alpha-real required");
                Rational rat = parse_rational(*alpha);
                s = weyl_sum(g, rat, *beta, *M, v);
                center = to_json(rat);
            }
            json a = artifact_base(*cfg, "weyl");
            a["result"] = json{{"M", *M},
                               {"alpha", center},
                               {"beta", *beta},
                               {"sum", to_json(s)},
                               {"variant", vf->kind}};
            std::cout << "weyl: sum = " << fmt17(s.value.real()) << " + "
                      << fmt17(s.value.imag()) << "i over " << s.terms << " terms\n";
            emit(*cfg, "weyl.json", a);
        });
    }

    // ---- asym -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("asym", "main-term asymptotic verification");
        auto poly = std::make_shared<std::string>();
        auto aq = std::make_shared<std::string>();
        auto beta = std::make_shared<double>(0.0);
        auto M = std::make_shared<long>(0);
        auto scale = std::make_shared<double>(1.0);
        auto vf = std::make_shared<VariantFlags>();
        sub->add_option("--poly", *poly)->required();
        sub->add_option("--aq", *aq, "exact rational a/q")->required();
        sub->add_option("--beta", *beta);
        sub->add_option("--M", *M)->required()->check(CLI::PositiveNumber);
        sub->add_option("--bound-scale", *scale, "error envelope scale");
        add_variant_flags(sub, vf);
        sub->callback([=]() {
            AsymptoticReport rep = verify_asymptotic(parse_poly(*poly), parse_rational(*aq),
                                                     *beta, *M, build_variant(*vf),
                                                     std::nullopt, *scale);
            json a = artifact_base(*cfg, "asym");
            a["result"] = to_json(rep);
            std::cout << "asym: measured constant " << fmt17(rep.measured_constant) << "\n";
            emit(*cfg, "asym.json", a);
        });
    }

    // ---- arcs -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("arcs", "arc decomposition of Z_N");
        auto N = std::make_shared<long>(0);
        auto K = std::make_shared<double>(1.0);
        auto Q = std::make_shared<long>(2);
        sub->add_option("--N", *N)->required()->check(CLI::PositiveNumber);
        sub->add_option("--K", *K, "arc radius K (circle radius K/N)");
        sub->add_option("--Q", *Q, "denominator bound");
        sub->callback([=]() {
            if (*N > cfg->max_n) throw ResourceError("cli: N exceeds the configured cap");
            ArcDecomposition d = decompose(*N, *K, *Q);
            long majors = 0, minors = 0;
            for (const ArcLabel& l : d.labels) {
                if (l.kind == ArcKind::Major) ++majors;
                if (l.kind == ArcKind::Minor) ++minors;
            }
            json a = artifact_base(*cfg, "arcs");
            a["result"] = json{{"K", d.K},
                               {"N", d.N},
                               {"Q", d.Q},
                               {"disjoint", d.disjointness.disjoint},
                               {"hypothesis", d.disjointness.hypothesis},
                               {"major", majors},
                               {"minor", minors},
                               {"mprime_identity", d.mprime_identity}};
            std::cout << "arcs: " << majors << " major, " << minors << " minor, disjoint = "
                      << (d.disjointness.disjoint ? "yes" : "no") << "\n";
            std::cout << "wrote " << write_file(*cfg, "arcs.csv", decomposition_csv(d)) << "\n";
            emit(*cfg, "arcs.json", a);
        });
    }

    // ---- spectrum -----------------------------------------------------------
    {
        auto* sub = app.add_subcommand("spectrum", "balanced transform of a set");
        auto N = std::make_shared<long>(0);
        auto elements = std::make_shared<std::string>();
        auto file = std::make_shared<std::string>();
        auto grid = std::make_shared<std::string>("window");
        sub->add_option("--N", *N)->required()->check(CLI::PositiveNumber);
        sub->add_option("--elements", *elements, "comma-separated elements");
        sub->add_option("--elements-file", *file, "whitespace-separated elements file");
        sub->add_option("--grid", *grid, "window | refined");
        sub->callback([=]() {
            if (*N > cfg->max_n) throw ResourceError("cli: N exceeds the configured cap");
            SetInWindow A = make_window_set(*N, gather_elements(*elements, *file));
            SpectrumGrid g = *grid == "refined" ? SpectrumGrid::Refined : SpectrumGrid::Window;
            SpectrumReport S = balanced_dft(A, g);
            json a = artifact_base(*cfg, "spectrum");
            a["result"] = json{{"N", S.N},
                               {"delta", S.delta},
                               {"grid", S.grid},
                               {"kind", *grid},
                               {"parseval_expected", S.parseval_expected},
                               {"parseval_total", S.parseval_total}};
            std::cout << "spectrum: " << S.grid << " samples, parseval "
                      << fmt17(S.parseval_total) << "\n";
            std::cout << "wrote " << write_file(*cfg, "spectrum.csv", spectrum_csv(S)) << "\n";
            emit(*cfg, "spectrum.json", a);
        });
    }

    // ---- increment ----------------------------------------------------------
    {
        auto* sub = app.add_subcommand("increment", "exhaustive density increment");
        auto N = std::make_shared<long>(0);
        auto elements = std::make_shared<std::string>();
        auto file = std::make_shared<std::string>();
        auto q = std::make_shared<long>(1);
        auto gamma = std::make_shared<double>(0.01);
        auto theta = std::make_shared<double>(0.1);
        auto c = std::make_shared<double>(1.0);
        sub->add_option("--N", *N)->required()->check(CLI::PositiveNumber);
        sub->add_option("--elements", *elements);
        sub->add_option("--elements-file", *file);
        sub->add_option("--q", *q)->required();
        sub->add_option("--gamma", *gamma);
        sub->add_option("--theta", *theta);
        sub->add_option("--c", *c, "length constant");
        sub->callback([=]() {
            if (*N > cfg->max_n) throw ResourceError("cli: N exceeds the configured cap");
            SetInWindow A = make_window_set(*N, gather_elements(*elements, *file));
            IncrementResult r = density_increment(A, *q, *gamma, *theta, *c);
            json a = artifact_base(*cfg, "increment");
            a["result"] = json{{"base_density", r.base_density},
                               {"fiber", r.fiber.elements},
                               {"found", r.found},
                               {"length", r.P.length},
                               {"new_density", r.new_density},
                               {"start", r.P.start},
                               {"step", r.P.step},
                               {"target", r.target},
                               {"theta", r.theta}};
            std::cout << "increment: " << (r.found ? "found" : "not found") << ", density "
                      << fmt17(r.base_density) << " -> " << fmt17(r.new_density) << "\n";
            emit(*cfg, "increment.json", a);
        });
    }

    // ---- driver -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("driver", "density-increment iteration");
        auto N = std::make_shared<long>(0);
        auto elements = std::make_shared<std::string>();
        auto file = std::make_shared<std::string>();
        auto polys = std::make_shared<std::vector<std::string>>();
        auto mode = std::make_shared<std::string>("integer");
        auto l1 = std::make_shared<long>(-1), l2 = std::make_shared<long>(0),
             l3 = std::make_shared<long>(0);
        auto c_len = std::make_shared<double>(1.0);
        auto floor_window = std::make_shared<long>(32);
        auto max_steps = std::make_shared<int>(32);
        auto zn = std::make_shared<bool>(false);
        sub->add_option("--N", *N)->required()->check(CLI::PositiveNumber);
        sub->add_option("--elements", *elements);
        sub->add_option("--elements-file", *file);
        sub->add_option("--poly", *polys, "system polynomial (repeatable)")->required();
        sub->add_option("--mode", *mode, "integer | prime");
        sub->add_option("--l1", *l1);
        sub->add_option("--l2", *l2);
        sub->add_option("--l3", *l3);
        sub->add_option("--c-len", *c_len, "progression length constant");
        sub->add_option("--floor-window", *floor_window);
        sub->add_option("--max-steps", *max_steps);
        sub->add_flag("--zn-arcs", *zn, "use the window grid for arcs");
        sub->callback([=]() {
            if (*N > cfg->max_n) throw ResourceError("cli: N exceeds the configured cap");
            std::vector<IntPoly> ps = parse_polys(*polys);
            SystemProfile prof = profile_for(ps, *l1, *l2, *l3);
            auto sys = std::make_shared<RootSystem>(ps, parse_mode(*mode));
            AuxiliaryFamily fam(sys);
            DriverConfig dc;
            dc.c0 = cfg->c0;
            dc.eps = cfg->eps;
            dc.c_len = *c_len;
            dc.q_cap = cfg->q_cap;
            dc.sieve_bound_cap = cfg->sieve_bound;
            dc.floor_window = *floor_window;
            dc.max_steps = *max_steps;
            dc.use_zn_arcs = *zn;
            dc.threads = cfg->threads;
            SetInWindow A = make_window_set(*N, gather_elements(*elements, *file));
            IterationTrace tr = sarkozy_driver(A, prof, fam, dc);
            json a = artifact_base(*cfg, "driver");
            a["result"] = json{{"steps", tr.steps.size()},
                               {"terminal", tr.terminal},
                               {"valid", tr.valid}};
            std::cout << "driver: " << tr.steps.size() << " steps, terminal " << tr.terminal
                      << "\n";
            std::cout << "wrote " << write_file(*cfg, "trace.jsonl", trace_jsonl(tr)) << "\n";
            emit(*cfg, "driver.json", a);
        });
    }

    // ---- blowup -------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("blowup", "one spectral blow-up step");
        auto N = std::make_shared<long>(0);
        auto b = std::make_shared<std::string>(), b_file = std::make_shared<std::string>();
        auto b1 = std::make_shared<std::string>(), b1_file = std::make_shared<std::string>();
        auto P = std::make_shared<std::string>("0");
        auto U = std::make_shared<double>(1.0);
        auto V = std::make_shared<double>(1.0);
        auto K = std::make_shared<double>(1.0);
        auto polys = std::make_shared<std::vector<std::string>>();
        auto mode = std::make_shared<std::string>("integer");
        auto l1 = std::make_shared<long>(-1), l2 = std::make_shared<long>(0),
             l3 = std::make_shared<long>(0);
        sub->add_option("--N", *N)->required()->check(CLI::PositiveNumber);
        sub->add_option("--b", *b, "elements of B (comma list)");
        sub->add_option("--b-file", *b_file);
        sub->add_option("--b1", *b1, "elements of B1 (comma list)");
        sub->add_option("--b1-file", *b1_file);
        sub->add_option("--p", *P, "input frequencies (comma list)");
        sub->add_option("--U", *U)->required();
        sub->add_option("--V", *V)->required();
        sub->add_option("--K", *K)->required();
        sub->add_option("--poly", *polys, "system polynomial (repeatable)")->required();
        sub->add_option("--mode", *mode);
        sub->add_option("--l1", *l1);
        sub->add_option("--l2", *l2);
        sub->add_option("--l3", *l3);
        sub->callback([=]() {
            if (*N > cfg->max_n) throw ResourceError("cli: N exceeds the configured cap");
            std::vector<IntPoly> ps = parse_polys(*polys);
            SystemProfile prof = profile_for(ps, *l1, *l2, *l3);
            auto sys = std::make_shared<RootSystem>(ps, parse_mode(*mode));
            AuxiliaryFamily fam(sys);
            BlowupConfig bc;
            bc.c0 = cfg->c0;
            bc.c1 = cfg->c1;
            bc.eps = cfg->eps;
            bc.q_cap = cfg->q_cap;
            bc.sieve_bound_cap = cfg->sieve_bound;
            bc.threads = cfg->threads;
            BlowupResult r = blowup_step(make_window_set(*N, gather_elements(*b, *b_file)),
                                         make_window_set(*N, gather_elements(*b1, *b1_file)),
                                         parse_long_list(*P), *U, *V, *K, prof, fam, bc);
            json a = artifact_base(*cfg, "blowup");
            a["result"] = json{{"cr", to_json(r.cr)},
                               {"empty", r.empty},
                               {"eta", r.eta},
                               {"growth", r.growth},
                               {"k_new", r.k_new},
                               {"m", r.m},
                               {"massw_bound", r.massw_bound},
                               {"massw_min", r.massw_min},
                               {"minor_bound", r.minor_bound},
                               {"minor_ok", r.minor_ok},
                               {"minor_sup", r.minor_sup},
                               {"p_new", r.p_new},
                               {"p_tilde", r.p_tilde},
                               {"sigma", r.sigma},
                               {"threshold", r.threshold},
                               {"u_class", r.u_class},
                               {"u_new", r.u_new},
                               {"v_class", r.v_class},
                               {"v_new", r.v_new},
                               {"w_class", r.w_class}};
            std::cout << "blowup: " << (r.empty ? "empty selection" : "selected " +
                                        std::to_string(r.p_new.size()) + " frequencies")
                      << "\n";
            emit(*cfg, "blowup.json", a);
        });
    }

    // ---- extremal -----------------------------------------------------------
    {
        auto* sub = app.add_subcommand("extremal", "maximum avoiding sets in [1, N]");
        auto polys = std::make_shared<std::vector<std::string>>();
        auto N = std::make_shared<long>(0);
        auto exact = std::make_shared<bool>(false);
        auto budget = std::make_shared<long long>(50'000'000);
        auto mode = std::make_shared<std::string>("integer");
        sub->add_option("--poly", *polys, "difference polynomial (repeatable)")->required();
        sub->add_option("--N", *N)->required()->check(CLI::PositiveNumber);
        sub->add_flag("--exact", *exact, "branch-and-bound optimum (default greedy)");
        sub->add_option("--budget", *budget, "node budget for the exact search");
        sub->add_option("--mode", *mode, "integer | prime");
        sub->callback([=]() {
            if (*N > cfg->max_n) throw ResourceError("cli: N exceeds the configured cap");
            ForbiddenSet F = forbidden_differences(parse_polys(*polys), *N, parse_mode(*mode));
            ExtremalResult r = *exact ? max_avoiding_exact(F, *budget) : greedy_avoiding(F);
            json a = artifact_base(*cfg, "extremal");
            a["result"] = to_json(r);
            std::ostringstream csv;
            csv << "d\n";
            for (long d : F.D) csv << d << "\n";
            std::cout << "extremal: size " << r.size << (r.optimal ? " (optimal)" : "")
                      << ", " << r.nodes << " nodes, " << fmt17(r.elapsed_ms) << " ms\n";
            std::cout << "wrote " << write_file(*cfg, "differences.csv", csv.str()) << "\n";
            emit(*cfg, "extremal.json", a);
        });
    }

    // ---- residue ------------------------------------------------------------
    {
        auto* sub = app.add_subcommand("residue", "maximum avoiding sets in Z_q");
        auto polys = std::make_shared<std::vector<std::string>>();
        auto q = std::make_shared<long>(0);
        sub->add_option("--poly", *polys, "difference polynomial (repeatable)")->required();
        sub->add_option("--q", *q)->required()->check(CLI::PositiveNumber);
        sub->callback([=]() {
            if (*q > cfg->max_q) throw ResourceError("cli: q exceeds the configured cap");
            ExtremalResult r = residue_avoiding_search(parse_polys(*polys), *q);
            json a = artifact_base(*cfg, "residue");
            a["result"] = to_json(r);
            std::cout << "residue: size " << r.size << " in Z_" << *q << "\n";
            emit(*cfg, "residue.json", a);
        });
    }

    // ---- digitlift ----------------------------------------------------------
    {
        auto* sub = app.add_subcommand("digitlift", "base-q digit lifting construction");
        auto polys = std::make_shared<std::vector<std::string>>();
        auto q = std::make_shared<long>(0);
        auto B = std::make_shared<std::string>();
        auto k = std::make_shared<int>(1);
        sub->add_option("--poly", *polys, "difference polynomial (repeatable)")->required();
        sub->add_option("--q", *q)->required()->check(CLI::PositiveNumber);
        sub->add_option("--B", *B, "residue block (comma list)")->required();
        sub->add_option("--k", *k, "number of lifted blocks");
        sub->callback([=]() {
            if (*q > cfg->max_q) throw ResourceError("cli: q exceeds the configured cap");
            ExtremalResult r = digit_construction(*q, parse_long_list(*B), *k,
                                                  parse_polys(*polys));
            double expo = r.size > 0 && r.window > 1
                              ? std::log(static_cast<double>(r.size)) /
                                    std::log(static_cast<double>(r.window))
                              : 0.0;
            json a = artifact_base(*cfg, "digitlift");
            a["result"] = to_json(r);
            a["result"]["exponent"] = expo;
            std::cout << "digitlift: size " << r.size << " in [1, " << r.window
                      << "], exponent " << fmt17(expo) << "\n";
            emit(*cfg, "digitlift.json", a);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
    } catch (const ParseError& e) {
        std::cerr << "error [input parse]: " << e.what() << "\n";
        return 1;
    } catch (const ValidationFailure& e) {
        std::cerr << "error [validation]: " << e.what() << "\n";
        return 1;
    } catch (const WeightContractViolated& e) {
        std::cerr << "error [weight contract]: q=" << e.q << " r=" << e.r << ": " << e.what()
                  << "\n";
        return 1;
    } catch (const PreconditionViolated& e) {
        std::cerr << "error [precondition]: " << e.what() << "\n";
        return 1;
    } catch (const ResourceError& e) {
        std::cerr << "error [resource]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
