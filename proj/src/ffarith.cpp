#include "klsum/ffarith.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "klsum/errors.hpp"

namespace klsum {

u64 mul_mod(u64 a, u64 b, u64 q) {
    return u64((__uint128_t(a) * b) % q);
}

u64 pow_mod(u64 a, u64 e, u64 q) {
    u64 r = 1 % q;
    a %= q;
    while (e) {
        if (e & 1) r = mul_mod(r, a, q);
        a = mul_mod(a, a, q);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // This witness set is deterministic for all n < 3.3e24, which covers 64 bits.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

u64 inv(u64 x, u64 q) {
    x %= q;
    if (x == 0) throw domain_error("inv: argument divisible by the modulus");
    // Extended Euclid on (x, q); q prime guarantees gcd 1.
    std::int64_t t = 0, newt = 1;
    std::int64_t r = std::int64_t(q), newr = std::int64_t(x);
    while (newr != 0) {
        std::int64_t k = r / newr;
        t -= k * newt; std::swap(t, newt);
        r -= k * newr; std::swap(r, newr);
    }
    if (t < 0) t += std::int64_t(q);
    return u64(t);
}

std::vector<u64> batch_inv(const std::vector<u64>& xs, u64 q) {
    const std::size_t n = xs.size();
    std::vector<u64> pre(n), out(n);
    u64 acc = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (xs[i] % q == 0)
            throw domain_error("batch_inv: entry at index " + std::to_string(i) +
                               " divisible by the modulus");
        pre[i] = acc;
        acc = mul_mod(acc, xs[i] % q, q);
    }
    u64 ainv = inv(acc, q);
    for (std::size_t i = n; i-- > 0;) {
        out[i] = mul_mod(ainv, pre[i], q);
        ainv = mul_mod(ainv, xs[i] % q, q);
    }
    return out;
}

std::complex<double> additive_char(std::int64_t x, u64 q) {
    if (q == 0) throw usage_error("additive_char: zero modulus");
    std::int64_t r = x % std::int64_t(q);
    if (r < 0) r += std::int64_t(q);
    return std::polar(1.0, 2.0 * std::numbers::pi * double(r) / double(q));
}

u64 primitive_root(u64 q) {
    if (!is_prime(q)) throw usage_error("primitive_root: modulus must be prime");
    if (q == 2) return 1;
    const u64 phi = q - 1;
    std::vector<u64> primes;
    u64 m = phi;
    for (u64 p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            primes.push_back(p);
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) primes.push_back(m);
    for (u64 g = 2; g < q; ++g) {
        bool ok = true;
        for (u64 p : primes) {
            if (pow_mod(g, phi / p, q) == 1) { ok = false; break; }
        }
        if (ok) return g;
    }
    throw numerics_error("primitive_root: none found (non-prime modulus?)");
}

FieldCtx::FieldCtx(u64 q_) : q(q_) {
    if (!is_prime(q)) throw usage_error("FieldCtx: modulus must be prime");
    if (q >= (u64(1) << 32))
        throw resource_error("FieldCtx: discrete-log table capped at q < 2^32");
    g = primitive_root(q);
    dlog.assign(q - 1, 0);
    u64 x = 1;
    for (u64 k = 0; k < q - 1; ++k) {
        dlog[x - 1] = std::uint32_t(k);
        x = mul_mod(x, g, q);
    }
}

std::uint32_t FieldCtx::log(u64 x) const {
    x %= q;
    if (x == 0) throw domain_error("FieldCtx::log: argument divisible by the modulus");
    return dlog[x - 1];
}

} // namespace klsum
