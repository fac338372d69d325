#pragma once
// ============================================================================
// Hand-rolled FFT: iterative radix-2 for power-of-two sizes, Bluestein chirp
// transform for arbitrary sizes. Double precision throughout; chirp phases
// are reduced exactly in integers before the trig call.
// ============================================================================

#include <complex>
#include <vector>

namespace pds {

using cplx = std::complex<double>;

// In-place radix-2 FFT; a.size() must be a power of two.
// inverse=true applies the conjugate transform and divides by n.
void fft_pow2(std::vector<cplx>& a, bool inverse);

// DFT of arbitrary size n:  out[k] = sum_j a[j] e(-jk/n), inverse flips the
// sign and divides by n. Uses radix-2 directly when possible, else Bluestein.
std::vector<cplx> dft_any(const std::vector<cplx>& a, bool inverse);

}  // namespace pds
