// ============================================================================
// IntPoly implementation: dense GMP coefficients, recursive-descent parser,
// canonical formatter.
// ============================================================================

#include "pds/int_poly.hpp"

#include <cctype>
#include <sstream>

namespace pds {

// ---------------------------------------------------------------------------
// construction / normalization
// ---------------------------------------------------------------------------

IntPoly::IntPoly(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { normalize(); }

void IntPoly::normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPoly IntPoly::zero() { return IntPoly(); }

IntPoly IntPoly::constant(const mpz_class& c) {
    std::vector<mpz_class> v;
    if (c != 0) v.push_back(c);
    return IntPoly(std::move(v));
}

IntPoly IntPoly::monomial(const mpz_class& c, int power) {
    if (power < 0) throw DomainError("monomial power must be >= 0");
    std::vector<mpz_class> v(power + 1, mpz_class(0));
    v[power] = c;
    return IntPoly(std::move(v));
}

IntPoly IntPoly::x() { return monomial(1, 1); }

const mpz_class& IntPoly::coeff(int i) const {
    static const mpz_class kZero = 0;
    if (i < 0 || i >= static_cast<int>(c_.size())) return kZero;
    return c_[i];
}

const mpz_class& IntPoly::leading() const {
    if (c_.empty()) throw DomainError("zero polynomial has no leading coefficient");
    return c_.back();
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

mpz_class IntPoly::eval(const mpz_class& x) const {
    mpz_class acc = 0;
    for (size_t i = c_.size(); i-- > 0;) {
        acc = acc * x + c_[i];
    }
    return acc;
}

mpz_class IntPoly::eval_mod(const mpz_class& x, const mpz_class& m) const {
    if (m < 1) throw DomainError("eval_mod requires modulus >= 1");
    mpz_class xr = x % m;
    if (xr < 0) xr += m;
    mpz_class acc = 0;
    for (size_t i = c_.size(); i-- > 0;) {
        acc = (acc * xr + c_[i]) % m;
    }
    if (acc < 0) acc += m;
    return acc;
}

double IntPoly::eval_double(double x) const {
    double acc = 0.0;
    for (size_t i = c_.size(); i-- > 0;) {
        acc = acc * x + c_[i].get_d();
    }
    return acc;
}

// ---------------------------------------------------------------------------
// basic queries
// ---------------------------------------------------------------------------

IntPoly IntPoly::derivative() const {
    if (c_.size() <= 1) return IntPoly();
    std::vector<mpz_class> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
    return IntPoly(std::move(d));
}

mpz_class IntPoly::content() const {
    if (degree() < 1) throw DomainError("content requires degree >= 1");
    mpz_class g = 0;
    for (size_t i = 1; i < c_.size(); ++i) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c_[i].get_mpz_t());
    }
    return g;
}

mpz_class IntPoly::coefficient_l1() const {
    mpz_class s = 0;
    for (const auto& c : c_) s += abs(c);
    return s;
}

int IntPoly::nonzero_coeff_count() const {
    int n = 0;
    for (const auto& c : c_)
        if (c != 0) ++n;
    return n;
}

bool IntPoly::is_nonconstant_monomial() const {
    return degree() >= 1 && nonzero_coeff_count() == 1;
}

bool IntPoly::has_zero_constant_term() const { return c_.empty() || c_[0] == 0; }

// ---------------------------------------------------------------------------
// ring operations
// ---------------------------------------------------------------------------

IntPoly IntPoly::operator+(const IntPoly& o) const {
    std::vector<mpz_class> v(std::max(c_.size(), o.c_.size()), mpz_class(0));
    for (size_t i = 0; i < c_.size(); ++i) v[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) v[i] += o.c_[i];
    return IntPoly(std::move(v));
}

IntPoly IntPoly::operator-(const IntPoly& o) const {
    std::vector<mpz_class> v(std::max(c_.size(), o.c_.size()), mpz_class(0));
    for (size_t i = 0; i < c_.size(); ++i) v[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) v[i] -= o.c_[i];
    return IntPoly(std::move(v));
}

IntPoly IntPoly::operator*(const IntPoly& o) const {
    if (c_.empty() || o.c_.empty()) return IntPoly();
    std::vector<mpz_class> v(c_.size() + o.c_.size() - 1, mpz_class(0));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            if (o.c_[j] == 0) continue;
            v[i + j] += c_[i] * o.c_[j];
        }
    }
    return IntPoly(std::move(v));
}

IntPoly IntPoly::operator-() const {
    std::vector<mpz_class> v(c_);
    for (auto& c : v) c = -c;
    return IntPoly(std::move(v));
}

IntPoly IntPoly::mul_scalar(const mpz_class& s) const {
    std::vector<mpz_class> v(c_);
    for (auto& c : v) c *= s;
    return IntPoly(std::move(v));
}

// ---------------------------------------------------------------------------
// formatting
// ---------------------------------------------------------------------------

std::string IntPoly::format() const {
    if (c_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        mpz_class a = c_[i];
        bool neg = a < 0;
        mpz_class mag = abs(a);
        if (first) {
            if (neg) out << "-";
            first = false;
        } else {
            out << (neg ? " - " : " + ");
        }
        if (i == 0) {
            out << mag.get_str();
        } else {
            if (mag != 1) out << mag.get_str() << "*";
            out << "x";
            if (i >= 2) out << "^" << i;
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    const std::string& s;
    size_t i = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }

    mpz_class parse_int() {
        skip_ws();
        size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == start) throw ParseError("expected integer", start);
        return mpz_class(s.substr(start, i - start));
    }

    // factor := INT | 'x' ['^' INT] | '(' expr ')'
    IntPoly parse_factor() {
        skip_ws();
        if (i >= s.size()) throw ParseError("unexpected end of input", i);
        char ch = s[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            return IntPoly::constant(parse_int());
        }
        if (ch == 'x') {
            ++i;
            skip_ws();
            if (i < s.size() && s[i] == '^') {
                ++i;
                mpz_class e = parse_int();
                if (e < 0 || e > 4096) throw ParseError("exponent out of range", i);
                return IntPoly::monomial(1, static_cast<int>(e.get_si()));
            }
            return IntPoly::x();
        }
        if (ch == '(') {
            ++i;
            IntPoly inner = parse_expr();
            skip_ws();
            if (i >= s.size() || s[i] != ')') throw ParseError("expected ')'", i);
            ++i;
            return inner;
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", i);
    }

    static bool starts_factor(char ch) {
        return std::isdigit(static_cast<unsigned char>(ch)) || ch == 'x' || ch == '(';
    }

    // term := factor ('*'? factor)*
    IntPoly parse_term() {
        IntPoly acc = parse_factor();
        for (;;) {
            skip_ws();
            if (i < s.size() && s[i] == '*') {
                ++i;
                acc = acc * parse_factor();
            } else if (i < s.size() && starts_factor(s[i])) {
                acc = acc * parse_factor();
            } else {
                return acc;
            }
        }
    }

    // expr := ['+'|'-'] term (('+'|'-') term)*
    IntPoly parse_expr() {
        skip_ws();
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            neg = (s[i] == '-');
            ++i;
        }
        IntPoly acc = parse_term();
        if (neg) acc = -acc;
        for (;;) {
            skip_ws();
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
                bool minus = (s[i] == '-');
                ++i;
                IntPoly t = parse_term();
                acc = minus ? acc - t : acc + t;
            } else {
                return acc;
            }
        }
    }
};

}  // namespace

IntPoly parse_poly(const std::string& text) {
    Parser p(text);
    IntPoly r = p.parse_expr();
    if (!p.done()) throw ParseError("trailing input", p.i);
    return r;
}

// ---------------------------------------------------------------------------
// composition / exact division
// ---------------------------------------------------------------------------

IntPoly compose_affine(const IntPoly& h, const mpz_class& r, const mpz_class& d) {
    // Horner in the polynomial ring: acc = acc*(r + d*x) + c_i.
    IntPoly lin({r, d});
    IntPoly acc;
    for (int i = h.degree(); i >= 0; --i) {
        acc = acc * lin + IntPoly::constant(h.coeff(i));
    }
    return acc;
}

IntPoly compose_power(const IntPoly& h, int k) {
    if (k < 1) throw DomainError("compose_power requires k >= 1");
    if (h.is_zero()) return IntPoly();
    std::vector<mpz_class> v(static_cast<size_t>(h.degree()) * k + 1, mpz_class(0));
    for (int i = 0; i <= h.degree(); ++i) v[static_cast<size_t>(i) * k] = h.coeff(i);
    return IntPoly(std::move(v));
}

IntPoly exact_div_scalar(const IntPoly& h, const mpz_class& s) {
    if (s == 0) throw DomainError("division by zero scalar");
    std::vector<mpz_class> v(h.coeffs());
    for (size_t i = 0; i < v.size(); ++i) {
        mpz_class q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v[i].get_mpz_t(), s.get_mpz_t());
        if (r != 0)
            throw NonIntegralDivision("coefficient not divisible by scalar",
                                      static_cast<int>(i));
        v[i] = q;
    }
    return IntPoly(std::move(v));
}

}  // namespace pds
