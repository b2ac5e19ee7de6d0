#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace klsum {

using cplx = std::complex<double>;

// In-place radix-2 FFT. n must be a power of two. sign=-1 forward, +1 inverse;
// the inverse divides by n, so ifft(fft(a)) == a up to rounding.
void fft_pow2(std::vector<cplx>& a, int sign);

// DFT of arbitrary length via Bluestein's chirp embedding in a power-of-two FFT.
// sign=-1: X[k] = sum_j a[j] exp(-2*pi*i*jk/L); sign=+1 includes the 1/L factor.
std::vector<cplx> dft(const std::vector<cplx>& a, int sign);

// Cyclic convolution c[k] = sum_j a[j] b[(k-j) mod L] for equal lengths L >= 1.
// Arbitrary L (not just powers of two). Throws usage_error on length mismatch.
std::vector<cplx> cyclic_convolve(const std::vector<cplx>& a, const std::vector<cplx>& b);

} // namespace klsum
