#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "klsum/bumps.hpp"
#include "klsum/ffarith.hpp"
#include "klsum/kloosterman.hpp"

namespace klsum {

// Sieve-backed arithmetic tables up to a fixed limit: prime indicator,
// von Mangoldt, and Moebius.
struct SieveTables {
    u64 limit = 0;
    std::vector<std::uint8_t> prime_bit; // prime_bit[n] = 1 iff n prime
    std::vector<double> mangoldt;        // log p at prime powers p^k, else 0
    std::vector<std::int8_t> moebius;

    explicit SieveTables(u64 limit);
    bool is_prime_at(u64 n) const { return n <= limit && prime_bit[n]; }
};

// psi(X; v, u) = sum of mangoldt(n) over n <= X, n congruent to u mod v.
double psi_ap(double X, u64 v, u64 u, const SieveTables& tables);

// max over residues u coprime to v of |psi(X;v,u) - X/phi(v)|.
double e_ap(double X, u64 v, const SieveTables& tables);

// Envelopes with constant 1 for the prime sums: q^{11/192+eps} X^{15/16} and
// q^{1/6+eps} X^{7/9}.
double envelope_main(double q, double X, double eps);
double envelope_bfkpm(double q, double X, double eps);

struct PrimeApReport {
    std::complex<double> sum{0, 0};
    long long count = 0;           // primes in the progression (p = q excluded)
    double trivial_bound = 0;      // 2 * count, from the pointwise bound
    double envelope_main = 0;
    double envelope_bfkpm = 0;
    double ratio_trivial = 0;      // |sum| / trivial_bound (0 when count = 0)
    double ratio_main = 0;
    double ratio_bfkpm = 0;
    bool v_in_valid_range = true; // v <= q^{1/100}
    bool x_in_valid_range = true; // 1 <= X <= q
};

// Sum of Kl_2(p; q) over primes p <= X with p = u (mod v), p != q.
PrimeApReport prime_ap_kloosterman_sum(double X, const FieldCtx& ctx, u64 u, u64 v,
                                       const Spectrum& kl, const SieveTables& tables);

// Smoothed variant: sum over n = u (mod v), q not dividing n, of
// mangoldt(n) Kl_2(n; q) W(n/X).
std::complex<double> smoothed_prime_sum(const Bump& W, double X, const FieldCtx& ctx,
                                        u64 u, u64 v, const Spectrum& kl,
                                        const SieveTables& tables);

// J-fold combinatorial decomposition of von Mangoldt: tabulated component
// convolution terms whose alternating binomial combination reconstructs
// mangoldt exactly on [1, cap].
struct HeathBrown {
    double X = 0;
    int J = 0;
    long long cap = 0;
    long long Z = 0;                        // component factors run up to X^{1/J}
    std::vector<std::vector<double>> terms; // terms[j-1][n], j = 1..J, n <= cap

    double reconstruct(u64 n) const; // sum of signed terms; n must be <= cap
};

HeathBrown heath_brown_decompose(double X, int J, const SieveTables& tables,
                                 long long cap = 20000);

// Smooth dyadic partition of unity on [1, X]: pieces supported in windows
// around [2^k, 2^{k+1}], summing to exactly 1 on the interval.
struct DyadicPiece {
    int k = 0;
    double lo = 0, hi = 0;
    std::function<double(double)> f;
};

std::vector<DyadicPiece> dyadic_partition(double X, double sharpness);

} // namespace klsum
