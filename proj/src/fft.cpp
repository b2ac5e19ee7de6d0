#include "klsum/fft.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "klsum/errors.hpp"

namespace klsum {

namespace {

// Twiddle tables per size, built once; guarded for concurrent test runners.
const std::vector<cplx>& twiddles(std::size_t n) {
    static std::unordered_map<std::size_t, std::vector<cplx>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
        w[k] = std::polar(1.0, -2.0 * std::numbers::pi * double(k) / double(n));
    return cache.emplace(n, std::move(w)).first->second;
}

} // namespace

void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw usage_error("fft_pow2: length must be a power of two");
    if (n == 1) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx tw = w[k * step];
                if (sign > 0) tw = std::conj(tw);
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * tw;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
    if (sign > 0)
        for (auto& x : a) x /= double(n);
}

std::vector<cplx> dft(const std::vector<cplx>& a, int sign) {
    const std::size_t L = a.size();
    if (L == 0) throw usage_error("dft: empty input");
    if ((L & (L - 1)) == 0) {
        std::vector<cplx> out = a;
        fft_pow2(out, sign);
        return out;
    }
    // Bluestein: jk = (j^2 + k^2 - (k-j)^2)/2, so X[k] = conj-chirp linear convolution.
    // Chirp exponents j^2 mod 2L stay exact in 64-bit integers before the float cast.
    std::size_t n = 1;
    while (n < 2 * L + 1) n <<= 1;
    std::vector<cplx> chirp(L);
    for (std::size_t j = 0; j < L; ++j) {
        const std::uint64_t e = (std::uint64_t(j) * j) % (2 * L);
        const double ang = std::numbers::pi * double(e) / double(L);
        chirp[j] = std::polar(1.0, sign < 0 ? -ang : ang);
    }
    std::vector<cplx> x(n, cplx(0.0)), y(n, cplx(0.0));
    for (std::size_t j = 0; j < L; ++j) x[j] = a[j] * chirp[j];
    y[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < L; ++j) y[j] = y[n - j] = std::conj(chirp[j]);
    fft_pow2(x, -1);
    fft_pow2(y, -1);
    for (std::size_t j = 0; j < n; ++j) x[j] *= y[j];
    fft_pow2(x, +1);
    std::vector<cplx> out(L);
    for (std::size_t k = 0; k < L; ++k) out[k] = x[k] * chirp[k];
    if (sign > 0)
        for (auto& v : out) v /= double(L);
    return out;
}

std::vector<cplx> cyclic_convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size())
        throw usage_error("cyclic_convolve: length mismatch");
    if (a.empty()) throw usage_error("cyclic_convolve: empty input");
    auto fa = dft(a, -1);
    auto fb = dft(b, -1);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    return dft(fa, +1);
}

} // namespace klsum
