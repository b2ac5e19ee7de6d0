#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace klsum {

using u64 = std::uint64_t;

// Deterministic Miller-Rabin, valid for all 64-bit n.
bool is_prime(u64 n);

u64 mul_mod(u64 a, u64 b, u64 q);
u64 pow_mod(u64 a, u64 e, u64 q);

// Inverse of x modulo prime q. Throws domain_error when q | x.
u64 inv(u64 x, u64 q);

// Inverses of all entries; product trick uses one modular inversion total.
// Throws domain_error naming the first offending index when some q | xs[i].
std::vector<u64> batch_inv(const std::vector<u64>& xs, u64 q);

// e(x/q) = exp(2*pi*i*x/q); x is reduced mod q first so precision is uniform.
std::complex<double> additive_char(std::int64_t x, u64 q);

// Smallest primitive root mod prime q (q=2 gives 1).
u64 primitive_root(u64 q);

// Multiplicative structure of F_q^*: generator plus a full discrete-log table.
// dlog[x-1] = k where g^k = x, for x in [1, q-1]. Memory is 4(q-1) bytes, so
// construction is capped at q < 2^32 (desk scale).
struct FieldCtx {
    u64 q = 0;
    u64 g = 0;
    std::vector<std::uint32_t> dlog;

    explicit FieldCtx(u64 q_);
    std::uint32_t log(u64 x) const; // throws domain_error when q | x
};

} // namespace klsum
