#include "klsum/primes.hpp"

#include <algorithm>
#include <cmath>

#include "klsum/errors.hpp"

namespace klsum {

SieveTables::SieveTables(u64 lim) : limit(lim) {
    if (lim < 1)
        throw usage_error("sieve limit must be at least 1");
    if (lim > 100000000)
        throw resource_error("sieve limit above 10^8 exceeds the desk-scale budget");
    const std::size_t n = std::size_t(lim) + 1;
    prime_bit.assign(n, 0);
    mangoldt.assign(n, 0.0);
    moebius.assign(n, 0);
    moebius[1] = 1;
    if (lim < 2)
        return;
    // Linear sieve: every composite is crossed once by its smallest prime
    // factor, which also drives the multiplicative recurrences for Moebius.
    std::vector<std::uint32_t> spf(n, 0);
    std::vector<std::uint32_t> primes;
    moebius[1] = 1;
    for (u64 i = 2; i <= lim; ++i) {
        if (spf[i] == 0) {
            spf[i] = std::uint32_t(i);
            prime_bit[i] = 1;
            moebius[i] = -1;
            primes.push_back(std::uint32_t(i));
        }
        for (std::uint32_t p : primes) {
            if (p > spf[i] || u64(p) * i > lim)
                break;
            spf[u64(p) * i] = p;
            moebius[u64(p) * i] = (p == spf[i]) ? std::int8_t(0)
                                                : std::int8_t(-moebius[i]);
        }
    }
    // mangoldt(n) = log p exactly at prime powers p^k.
    for (u64 i = 2; i <= lim; ++i) {
        u64 p = spf[i], m = i;
        while (m % p == 0)
            m /= p;
        if (m == 1)
            mangoldt[i] = std::log(double(p));
    }
}

double psi_ap(double X, u64 v, u64 u, const SieveTables& tables) {
    if (!(X >= 0))
        throw usage_error("psi needs a nonnegative cutoff");
    if (X > double(tables.limit))
        throw usage_error("psi cutoff exceeds the sieve limit");
    if (v < 1)
        throw usage_error("psi needs a positive modulus");
    const u64 top = u64(std::floor(X));
    u64 n0 = u % v;
    if (n0 == 0)
        n0 = v;
    double s = 0;
    for (u64 n = n0; n <= top; n += v)
        s += tables.mangoldt[n];
    return s;
}

namespace {

u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u64 euler_phi(u64 v) {
    u64 r = v;
    for (u64 p = 2; p * p <= v; ++p) {
        if (v % p == 0) {
            r -= r / p;
            while (v % p == 0)
                v /= p;
        }
    }
    if (v > 1)
        r -= r / v;
    return r;
}

} // namespace

double e_ap(double X, u64 v, const SieveTables& tables) {
    if (v < 1)
        throw usage_error("discrepancy needs a positive modulus");
    const double expected = X / double(euler_phi(v));
    double worst = 0;
    for (u64 u = 1; u <= v; ++u) {
        if (gcd_u64(u, v) != 1)
            continue;
        worst = std::max(worst, std::abs(psi_ap(X, v, u, tables) - expected));
    }
    return worst;
}

double envelope_main(double q, double X, double eps) {
    return std::pow(q, 11.0 / 192 + eps) * std::pow(X, 15.0 / 16);
}

double envelope_bfkpm(double q, double X, double eps) {
    return std::pow(q, 1.0 / 6 + eps) * std::pow(X, 7.0 / 9);
}

PrimeApReport prime_ap_kloosterman_sum(double X, const FieldCtx& ctx, u64 u, u64 v,
                                       const Spectrum& kl, const SieveTables& tables) {
    if (!(X >= 0))
        throw usage_error("prime sum needs a nonnegative cutoff");
    if (X > double(tables.limit))
        throw usage_error("prime sum cutoff exceeds the sieve limit");
    if (v < 1)
        throw usage_error("prime sum needs a positive modulus");
    const u64 q = ctx.q;
    PrimeApReport rep;
    const u64 top = u64(std::floor(X));
    u64 n0 = u % v;
    if (n0 == 0)
        n0 = v;
    std::complex<double> s{0, 0};
    for (u64 p = n0; p <= top; p += v) {
        if (!tables.prime_bit[p] || p == q)
            continue;
        s += kl.at(p % q);
        ++rep.count;
    }
    rep.sum = s;
    rep.trivial_bound = 2.0 * double(rep.count);
    const double eps = 0.01;
    rep.envelope_main = klsum::envelope_main(double(q), X, eps);
    rep.envelope_bfkpm = klsum::envelope_bfkpm(double(q), X, eps);
    const double a = std::abs(s);
    rep.ratio_trivial = rep.count > 0 ? a / rep.trivial_bound : 0.0;
    rep.ratio_main = a / rep.envelope_main;
    rep.ratio_bfkpm = a / rep.envelope_bfkpm;
    rep.v_in_valid_range = double(v) <= std::pow(double(q), 0.01);
    rep.x_in_valid_range = X >= 1 && X <= double(q);
    return rep;
}

std::complex<double> smoothed_prime_sum(const Bump& W, double X, const FieldCtx& ctx,
                                        u64 u, u64 v, const Spectrum& kl,
                                        const SieveTables& tables) {
    if (!(X > 0))
        throw usage_error("smoothed sum needs a positive scale");
    if (v < 1)
        throw usage_error("smoothed sum needs a positive modulus");
    const double hi = X * W.support_hi();
    if (hi > double(tables.limit))
        throw usage_error("smoothed sum support exceeds the sieve limit");
    const u64 q = ctx.q;
    const u64 lo_n = u64(std::max(1.0, std::ceil(X * W.support_lo())));
    const u64 hi_n = u64(std::floor(hi));
    const u64 ur = u % v;
    std::complex<double> s{0, 0};
    for (u64 n = lo_n; n <= hi_n; ++n) {
        if (tables.mangoldt[n] == 0 || n % v != ur || n % q == 0)
            continue;
        double w = W(double(n) / X);
        if (w == 0)
            continue;
        s += tables.mangoldt[n] * w * kl.at(n % q);
    }
    return s;
}

double HeathBrown::reconstruct(u64 n) const {
    if (n < 1 || (long long)n > cap)
        throw usage_error("reconstruction index outside the tabulated range");
    // The signed terms reach ~1e6 at J = 10 while their sum is O(log n);
    // extended precision keeps the cancellation error near the store rounding.
    long double s = 0;
    for (const auto& t : terms)
        s += (long double)t[n];
    return double(s);
}

HeathBrown heath_brown_decompose(double X, int J, const SieveTables& tables,
                                 long long cap) {
    if (J < 2)
        throw usage_error("decomposition needs J >= 2");
    if (J > 20)
        throw resource_error("decomposition parameter J above 20");
    if (!(X >= 1))
        throw usage_error("decomposition needs X >= 1");
    HeathBrown hb;
    hb.X = X;
    hb.J = J;
    hb.cap = std::min<long long>(cap, (long long)std::floor(X));
    hb.cap = std::max<long long>(hb.cap, 1);
    hb.Z = (long long)std::floor(std::pow(X, 1.0 / J) + 1e-9);
    if (u64(std::min(hb.Z, hb.cap)) > tables.limit)
        throw usage_error("decomposition needs sieve tables up to X^{1/J}");
    const std::size_t L = std::size_t(hb.cap) + 1;

    // Dirichlet convolution helpers on [1, cap].  The iterated convolutions
    // reach ~1e6 at J = 10 while the reconstructed sum is O(log n), so the
    // whole pipeline runs in extended precision; only the final tabulated
    // terms are rounded to double.
    auto conv = [&](const std::vector<long double>& a, const std::vector<long double>& b) {
        std::vector<long double> c(L, 0.0L);
        for (std::size_t d = 1; d < L; ++d) {
            if (a[d] == 0)
                continue;
            for (std::size_t e = 1; d * e < L; ++e) {
                if (b[e] != 0)
                    c[d * e] += a[d] * b[e];
            }
        }
        return c;
    };

    // muz: Moebius restricted to [1, Z]; logs: log n; ones: constant 1.
    std::vector<long double> muz(L, 0.0L), logs(L, 0.0L), ones(L, 1.0L);
    ones[0] = 0;
    for (long long d = 1; d <= std::min<long long>(hb.Z, hb.cap); ++d)
        muz[std::size_t(d)] = (long double)tables.moebius[std::size_t(d)];
    for (std::size_t n = 1; n < L; ++n)
        logs[n] = std::log((long double)n);

    // c_j = j-fold restricted-Moebius convolution, U_k = log * 1^{*k}.
    std::vector<long double> cj = muz, Uk = logs;
    long double binom = 1;
    hb.terms.assign(std::size_t(J), std::vector<double>(L, 0.0));
    for (int j = 1; j <= J; ++j) {
        binom = binom * (long double)(J - j + 1) / (long double)j; // C(J, j)
        std::vector<long double> t = conv(cj, Uk);
        const long double sign = (j % 2 == 1) ? 1.0L : -1.0L;
        for (std::size_t n = 1; n < L; ++n)
            hb.terms[std::size_t(j - 1)][n] = double(sign * binom * t[n]);
        if (j < J) {
            cj = conv(cj, muz);
            Uk = conv(Uk, ones);
        }
    }
    return hb;
}

std::vector<DyadicPiece> dyadic_partition(double X, double sharpness) {
    if (!(X >= 1))
        throw usage_error("partition needs X >= 1");
    if (!(sharpness >= 1))
        throw usage_error("partition sharpness must be at least 1");
    const double hw = 0.05 / sharpness;
    // Ramp of piece k rises across [2^k (1-hw), 2^k (1+hw)]; the left edge of
    // the whole partition rises below 1 so the sum is exactly 1 on [1, X].
    auto ramp = [hw](double x, double scale) {
        return smoothstep((x / scale - (1 - hw)) / (2 * hw));
    };
    auto left = [](double x) { return smoothstep((x - 0.90) / 0.08); };
    int K1 = (int)std::ceil(std::log2(X / (1 - hw))); // first ramp beyond X
    K1 = std::max(K1, 1);
    std::vector<DyadicPiece> out;
    for (int k = 0; k < K1; ++k) {
        DyadicPiece piece;
        piece.k = k;
        double sk = std::ldexp(1.0, k), sk1 = std::ldexp(1.0, k + 1);
        piece.lo = (k == 0) ? 0.90 : sk * (1 - hw);
        piece.hi = sk1 * (1 + hw);
        if (k == 0)
            piece.f = [left, ramp, sk1](double x) { return left(x) - ramp(x, sk1); };
        else
            piece.f = [ramp, sk, sk1](double x) { return ramp(x, sk) - ramp(x, sk1); };
        out.push_back(std::move(piece));
    }
    return out;
}

} // namespace klsum
