// ============================================================================
// FFT implementation.
// ============================================================================

#include "pds/fft.hpp"

#include <cmath>
#include <cstdint>

#include "pds/errors.hpp"

namespace pds {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(size_t n) { return n && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
}  // namespace

void fft_pow2(std::vector<cplx>& a, bool inverse) {
    size_t n = a.size();
    if (!is_pow2(n)) throw DomainError("fft_pow2 requires power-of-two size");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

std::vector<cplx> dft_any(const std::vector<cplx>& a, bool inverse) {
    size_t n = a.size();
    if (n == 0) return {};
    if (is_pow2(n)) {
        std::vector<cplx> out = a;
        fft_pow2(out, inverse);
        return out;
    }
    // Bluestein: x[k] e(-k^2/2n) convolved with chirp e(+k^2/2n).
    // Phase k^2/(2n) is reduced mod 1 via k^2 mod 2n in exact integers.
    double sgn = inverse ? 1.0 : -1.0;
    size_t m = next_pow2(2 * n - 1);
    std::vector<cplx> fa(m, cplx(0, 0)), fb(m, cplx(0, 0));
    uint64_t two_n = 2 * static_cast<uint64_t>(n);
    auto chirp = [&](uint64_t k) {
        uint64_t k2 = (static_cast<__uint128_t>(k) * k) % two_n;
        double ang = kTwoPi * static_cast<double>(k2) / static_cast<double>(two_n);
        return cplx(std::cos(ang), std::sin(ang));
    };
    for (size_t k = 0; k < n; ++k) {
        cplx c = chirp(k);
        fa[k] = a[k] * cplx(c.real(), sgn * c.imag());
    }
    for (size_t k = 0; k < n; ++k) {
        cplx c = chirp(k);
        cplx b(c.real(), -sgn * c.imag());
        fb[k] = b;
        if (k) fb[m - k] = b;
    }
    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    fft_pow2(fa, true);
    std::vector<cplx> out(n);
    for (size_t k = 0; k < n; ++k) {
        cplx c = chirp(k);
        out[k] = fa[k] * cplx(c.real(), sgn * c.imag());
        if (inverse) out[k] /= static_cast<double>(n);
    }
    return out;
}

}  // namespace pds
