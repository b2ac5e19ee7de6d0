#include "klsum/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "klsum/bumps.hpp"
#include "klsum/errors.hpp"
#include "klsum/fft.hpp"
#include "klsum/kloosterman.hpp"

namespace klsum {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// e(turns) with the argument reduced to [-1/2, 1/2] first, so large winding
// numbers do not cost precision in the trig call itself.
cplx cis_turns(double turns) {
    double t = turns - std::nearbyint(turns);
    return {std::cos(kTau * t), std::sin(kTau * t)};
}

// Compensated complex accumulator (Kahan): the dual sum adds millions of
// terms spanning ten orders of magnitude in a fixed deterministic order.
struct Kahan {
    cplx sum{0, 0}, carry{0, 0};
    void add(cplx x) {
        cplx y = x - carry;
        cplx t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Chirp transform out[k] = sum_{p<P} g[p] e(-alpha (m0+k) p), k < kout, for an
// arbitrary real step alpha, via Bluestein's identity
//   (m0+k)p = ((m0+k)^2 + p^2 - (m0+k-p)^2) / 2
// which turns the sum into one linear convolution embedded in a cyclic FFT.
struct Czt {
    int P;
    long long kout;
    std::size_t L;
    std::vector<cplx> w;  // e(-alpha p^2 / 2)
    std::vector<cplx> wk; // e(-alpha (m0+k)^2 / 2)
    std::vector<cplx> Bf; // FFT of the chirp kernel e(+alpha j^2 / 2)

    Czt(int P_, long long kout_, double alpha, long long m0) : P(P_), kout(kout_) {
        L = 1;
        while (L < std::size_t(2 * P + kout)) // no wraparound of the kernel
            L <<= 1;
        w.resize(P);
        wk.resize(kout);
        for (int p = 0; p < P; ++p)
            w[p] = cis_turns(-alpha * double(p) * double(p) / 2);
        for (long long k = 0; k < kout; ++k) {
            double x = double(m0 + k);
            wk[k] = cis_turns(-alpha * x * x / 2);
        }
        std::vector<cplx> beta(L, cplx{0, 0});
        long long jmin = m0 - (P - 1);
        for (long long r = 0; r < P + kout - 1; ++r) {
            double x = double(jmin + r);
            beta[r] = cis_turns(alpha * x * x / 2);
        }
        fft_pow2(beta, -1);
        Bf = std::move(beta);
    }

    void run(const cplx* g, cplx* out, std::vector<cplx>& buf) const {
        buf.assign(L, cplx{0, 0});
        for (int p = 0; p < P; ++p)
            buf[p] = g[p] * w[p];
        fft_pow2(buf, -1);
        for (std::size_t i = 0; i < L; ++i)
            buf[i] *= Bf[i];
        fft_pow2(buf, +1);
        for (long long k = 0; k < kout; ++k)
            out[k] = wk[k] * buf[std::size_t(k + P - 1)];
    }
};

long long ll_ceil(double x) { return (long long)std::ceil(x - 1e-12); }
long long ll_floor(double x) { return (long long)std::floor(x + 1e-12); }

} // namespace

void validate(const PeriodicFn& K) {
    if (K.q < 2)
        throw usage_error("periodic function needs modulus q >= 2");
    if (K.values.size() != K.q)
        throw usage_error("periodic function needs exactly q values");
}

PeriodicFn fourier_hat_direct(const PeriodicFn& K) {
    validate(K);
    u64 q = K.q;
    double root = std::sqrt(double(q));
    // One character table plus stride-h index walking keeps the quadratic
    // reference path fast enough to sweep every shift at small q.
    std::vector<cplx> e(q);
    for (u64 j = 0; j < q; ++j)
        e[j] = additive_char(std::int64_t(j), q);
    PeriodicFn out{q, std::vector<cplx>(q)};
    for (u64 h = 0; h < q; ++h) {
        Kahan acc;
        u64 idx = 0;
        for (u64 n = 0; n < q; ++n) {
            acc.add(K.values[n] * e[idx]);
            idx += h;
            if (idx >= q) idx -= q;
        }
        out.values[h] = acc.sum / root;
    }
    return out;
}

PeriodicFn fourier_hat(const PeriodicFn& K) {
    validate(K);
    u64 q = K.q;
    if (q < 2048)
        return fourier_hat_direct(K);
    // Khat(h) = q^{-1/2} sum_n K(n) e(+hn/q) = q^{1/2} * (inverse DFT of K)(h).
    std::vector<cplx> spec = dft(K.values, +1);
    double root = std::sqrt(double(q));
    for (auto& z : spec)
        z *= root;
    return PeriodicFn{q, std::move(spec)};
}

PeriodicFn voronoi_check_kernel(const PeriodicFn& K) {
    validate(K);
    u64 q = K.q;
    if (!is_prime(q))
        throw usage_error("voronoi kernel needs a prime modulus");
    PeriodicFn hat = fourier_hat(K);
    // Kcheck(n) = q^{-1/2} sum_{h!=0} Khat(h) e(hbar n / q): reindex h -> hbar
    // and the twisted sum becomes a plain forward transform again.
    PeriodicFn twisted{q, std::vector<cplx>(q, cplx{0, 0})};
    for (u64 g = 1; g < q; ++g)
        twisted.values[g] = hat.values[inv(g, q)];
    return fourier_hat(twisted);
}

PeriodicFn voronoi_check_kernel_direct(const PeriodicFn& K) {
    validate(K);
    u64 q = K.q;
    if (!is_prime(q))
        throw usage_error("voronoi kernel needs a prime modulus");
    PeriodicFn hat = fourier_hat_direct(K);
    double root = std::sqrt(double(q));
    std::vector<cplx> e(q);
    for (u64 j = 0; j < q; ++j)
        e[j] = additive_char(std::int64_t(j), q);
    std::vector<u64> units(q - 1);
    for (u64 h = 1; h < q; ++h)
        units[h - 1] = h;
    std::vector<u64> ivs = batch_inv(units, q);
    PeriodicFn out{q, std::vector<cplx>(q)};
    for (u64 n = 0; n < q; ++n) {
        Kahan acc;
        for (u64 h = 1; h < q; ++h)
            acc.add(hat.values[h] * e[mul_mod(ivs[h - 1], n, q)]);
        out.values[n] = acc.sum / root;
    }
    return out;
}

PeriodicFn kloosterman_periodic(const FieldCtx& ctx, u64 a, int m) {
    u64 q = ctx.q;
    if (a % q == 0)
        throw domain_error("kloosterman_periodic needs a coprime to q");
    Spectrum s = kl_spectrum(m, ctx);
    PeriodicFn out{q, std::vector<cplx>(q)};
    out.values[0] = cplx{kl_at_zero(m, q), 0};
    for (u64 n = 1; n < q; ++n)
        out.values[n] = s.at(mul_mod(a, n, q));
    return out;
}

std::complex<double> hat_closed_form(u64 q, u64 a, u64 h) {
    if (!is_prime(q))
        throw usage_error("closed form needs a prime modulus");
    a %= q;
    if (a == 0)
        throw domain_error("closed form needs a coprime to q");
    h %= q;
    if (h == 0)
        return {0, 0};
    return additive_char(-std::int64_t(mul_mod(a, inv(h, q), q)), q);
}

double voronoi_closed_form(u64 q, u64 a, u64 n) {
    if (!is_prime(q))
        throw usage_error("closed form needs a prime modulus");
    a %= q;
    if (a == 0)
        throw domain_error("closed form needs a coprime to q");
    double root = std::sqrt(double(q));
    return (n % q == a) ? double(q - 1) / root : -1.0 / root;
}

namespace {

// One-sided + mirrored tail sums of the transform envelope over the integer
// frequency lattice {k/q : |k| > R}, measured against the target interval
// [lo, hi] (the c-shifted support image).  Returns both the plain sum and the
// sum of square roots (the latter splits the corner of a double tail).
// Beyond the tabulated range the integral bound ||W''''||_1 / (2 pi w)^4
// takes over.  All quantities bound the *unit* bump transform; callers scale.
struct StripTail {
    double plain = 0;
    double rooted = 0;
};

StripTail strip_tail(const BumpTransform& tab, double C4, double X, double q, double lo,
                     double hi, long long R) {
    StripTail out;
    const double wvalid = tab.omega_max() - 2 * tab.node_spacing();
    auto analytic = [&](double we) {
        // first lattice point at or past the table edge, then an integral in
        // steps of X/q
        out.plain += C4 / std::pow(kTau * we, 4) +
                     (q / X) * C4 / (std::pow(kTau, 4) * 3 * we * we * we);
        out.rooted += std::sqrt(C4) / std::pow(kTau * we, 2) +
                      (q / X) * std::sqrt(C4) / (kTau * kTau * we);
    };
    // positive side: dist(k/q, [lo,hi]) = k/q - hi
    for (long long k = R + 1;; ++k) {
        double om = X * (double(k) / q - hi);
        if (om < 0)
            om = 0;
        if (om >= wvalid) {
            analytic(std::max(om, wvalid));
            break;
        }
        double e = tab.envelope(om) + 2e-16;
        out.plain += e;
        out.rooted += std::sqrt(e);
    }
    // negative side: dist(-k/q, [lo,hi]) = lo + k/q
    for (long long k = R + 1;; ++k) {
        double om = X * (lo + double(k) / q);
        if (om < 0)
            om = 0;
        if (om >= wvalid) {
            analytic(std::max(om, wvalid));
            break;
        }
        double e = tab.envelope(om) + 2e-16;
        out.plain += e;
        out.rooted += std::sqrt(e);
    }
    return out;
}

} // namespace

VoronoiResult tempered_voronoi_residual(const PeriodicFn& K, const WeightParams& T,
                                        const VoronoiConfig& cfg) {
    validate(K);
    const u64 q = K.q;
    if (!is_prime(q))
        throw usage_error("tempered voronoi check needs a prime modulus");
    if (double(q) != T.q)
        throw usage_error("weight parameters and kernel disagree on q");
    const double M = T.M, N = T.N, c = T.c;

    Weight2D G = g_weight(T); // throws range_error outside the admissible tier

    // Integer support ranges; the identity is applied with the kernel value at
    // the 0 class pinned by continuity, so the check insists the support meets
    // no multiple of q in either factor (automatic for mn then, q prime).
    const long long m_lo = ll_ceil(0.95 * M), m_hi = ll_floor(1.05 * M);
    const long long n_lo = ll_ceil(0.95 * N), n_hi = ll_floor(1.05 * N);
    if (m_hi / (long long)q >= (m_lo + (long long)q - 1) / (long long)q)
        throw usage_error("weight support in the first factor contains a multiple of q");
    if (n_hi / (long long)q >= (n_lo + (long long)q - 1) / (long long)q)
        throw usage_error("weight support in the second factor contains a multiple of q");

    VoronoiResult res;
    VoronoiDiagnostics& dg = res.diag;

    // ---- exact left side --------------------------------------------------
    Kahan lhs, sumG;
    long long points = 0;
    for (long long mm = m_lo; mm <= m_hi; ++mm) {
        for (long long nn = n_lo; nn <= n_hi; ++nn) {
            cplx g = G(double(mm), double(nn));
            u64 r = mul_mod(u64(mm % (long long)q), u64(nn % (long long)q), q);
            lhs.add(K.values[r] * g);
            sumG.add(g);
            ++points;
        }
    }
    res.lhs = lhs.sum;
    dg.lattice_points = points;
    dg.sum_G = sumG.sum;

    // ---- kernels ----------------------------------------------------------
    PeriodicFn hat = fourier_hat(K);
    PeriodicFn check = voronoi_check_kernel(K);
    double maxK = 0;
    for (const auto& z : check.values)
        maxK = std::max(maxK, std::abs(z));
    dg.max_kernel = maxK;
    res.main_term = hat.values[0] / std::sqrt(double(q)) * sumG.sum;

    const double budget = 0.1 * cfg.tol * std::max(1.0, std::abs(res.lhs));

    // ---- decay envelope of the unit bump ----------------------------------
    Bump w = make_bump({BumpKind::fixed_support, 1.0, 0.05, T.sharpness()});
    BumpTransform tab(w, 19, 32768);
    double C4 = 0; // L1 mass of the fourth derivative, with measurement slack
    {
        const int probes = 8192;
        double span = w.support_hi() - w.support_lo();
        double dt = span / probes;
        for (int i = 0; i < probes; ++i)
            C4 += std::abs(w.derivative(4, w.support_lo() + (i + 0.5) * dt)) * dt;
        C4 *= 1.5;
    }

    // ---- truncation radii from the measured envelope ----------------------
    const double kfac = (maxK > 0 ? maxK : 0.0) / double(q);
    long long Rm = 0, Rn = 0;
    double strip_m = 0, strip_n = 0, corner = 0;
    double d = (cfg.env_delta > 0) ? cfg.env_delta : 1e-9;
    const double floor_delta = std::max(2 * tab.envelope(tab.omega_max()), 1e-16);
    const bool pinned =
        cfg.env_delta > 0 || (cfg.trunc_m > 0 && cfg.trunc_n > 0);
    for (int iter = 0;; ++iter) {
        d = std::max(d, floor_delta);
        double wcut = tab.cut(d);
        Rm = cfg.trunc_m > 0 ? cfg.trunc_m : ll_ceil(q * (1.05 * c * N + wcut / M));
        Rn = cfg.trunc_n > 0 ? cfg.trunc_n : ll_ceil(q * (1.05 * c * M + wcut / N));
        StripTail tm = strip_tail(tab, C4, M, double(q), 0.95 * c * N, 1.05 * c * N, Rm);
        StripTail tn = strip_tail(tab, C4, N, double(q), 0.95 * c * M, 1.05 * c * M, Rn);
        strip_m = kfac * double(2 * Rn + 1) * 0.1 * M * N * tm.plain;
        strip_n = kfac * double(2 * Rm + 1) * 0.1 * M * N * tn.plain;
        corner = kfac * 0.1 * M * N * tm.rooted * tn.rooted;
        dg.env_cut_delta = d;
        if (pinned || strip_m + strip_n <= 0.5 * budget || d <= floor_delta * 1.000001 ||
            iter >= 8)
            break;
        d /= 100;
    }
    dg.trunc_m = Rm;
    dg.trunc_n = Rn;
    dg.tail_strip_m = strip_m;
    dg.tail_strip_n = strip_n;
    dg.tail_corner = corner;

    // ---- sampling grid: only aliasing can perturb the chirp evaluation ----
    const double wvalid = tab.omega_max() - 2 * tab.node_spacing();
    auto point_bound = [&](double om) {
        om = std::max(om, 0.0);
        if (om < wvalid)
            return tab.envelope(om) + 2e-16;
        return C4 / std::pow(kTau * om, 4);
    };
    int P = cfg.samples_pow2 > 0 ? (1 << cfg.samples_pow2) : 1024;
    const double npoints = double(2 * Rm + 1) * double(2 * Rn + 1);
    double alias = 0;
    for (;;) {
        double as = 3 * 0.1 * M * N *
                    point_bound(M * (P / (0.1 * M) - double(Rm) / q - 1.05 * c * N));
        double at = 3 * 0.1 * M * N *
                    point_bound(N * (P / (0.1 * N) - double(Rn) / q - 1.05 * c * M));
        alias = npoints * kfac * (as + at + std::min(as, at));
        if (cfg.samples_pow2 > 0 || alias <= 0.3 * budget || P >= 8192)
            break;
        P <<= 1;
    }
    dg.samples_u = dg.samples_v = P;
    dg.alias_bound = alias;

    // ---- dual lattice sum by a double chirp transform ----------------------
    const long long koutM = 2 * Rm + 1, koutN = 2 * Rn + 1;
    const double u0 = 0.95 * M, v0 = 0.95 * N;
    const double du = 0.1 * M / P, dv = 0.1 * N / P;
    Czt czt_v(P, koutN, dv / q, -Rn);
    Czt czt_u(P, koutM, du / q, -Rm);

    std::vector<cplx> prefv(koutN), prefu(koutM);
    for (long long k = 0; k < koutN; ++k)
        prefv[k] = dv * cis_turns(-double(k - Rn) * (v0 + 0.5 * dv) / q);
    for (long long j = 0; j < koutM; ++j)
        prefu[j] = du * cis_turns(-double(j - Rm) * (u0 + 0.5 * du) / q);

    std::vector<cplx> G1(std::size_t(P) * koutN);
    {
        std::vector<cplx> row(P), t(koutN), buf;
        for (int p = 0; p < P; ++p) {
            double u = u0 + (p + 0.5) * du;
            for (int r = 0; r < P; ++r)
                row[r] = G(u, v0 + (r + 0.5) * dv);
            czt_v.run(row.data(), t.data(), buf);
            for (long long k = 0; k < koutN; ++k)
                G1[std::size_t(p) * koutN + k] = prefv[k] * t[k];
        }
    }
    Kahan dual, ghat_total;
    {
        std::vector<cplx> col(P), t(koutM), buf;
        for (long long k = 0; k < koutN; ++k) {
            long long nn = k - Rn;
            for (int p = 0; p < P; ++p)
                col[p] = G1[std::size_t(p) * koutN + k];
            czt_u.run(col.data(), t.data(), buf);
            u64 nr = u64(((nn % (long long)q) + (long long)q) % (long long)q);
            for (long long j = 0; j < koutM; ++j) {
                long long mm = j - Rm;
                cplx gh = prefu[j] * t[j];
                u64 mr = u64(((mm % (long long)q) + (long long)q) % (long long)q);
                dual.add(check.values[mul_mod(mr, nr, q)] * gh);
                ghat_total.add(gh);
            }
        }
    }
    res.dual_term = dual.sum / double(q);
    dg.lattice_sum_ghat = std::abs(ghat_total.sum);

    res.rhs = res.main_term + res.dual_term;
    res.residual = std::abs(res.lhs - res.rhs) / std::max(1.0, std::abs(res.lhs));

    // ---- the polynomial decay table's own tail, for comparison ------------
    {
        StationaryBox box = stationary_box(T);
        double e8m = 8.0 * box.m_hi, e8n = 8.0 * box.n_hi;
        long long cap =
            std::min<long long>(1200, (long long)std::ceil(std::max(e8m, e8n)) + 300);
        double s = 0;
        for (long long mm = -cap; mm <= cap; ++mm) {
            for (long long nn = -cap; nn <= cap; ++nn) {
                if (std::abs(double(mm)) <= e8m && std::abs(double(nn)) <= e8n)
                    continue;
                Region r = classify_region(T, double(mm), double(nn));
                if (r == Region::stationary)
                    continue;
                s += region_bound(T, r, double(mm), double(nn));
            }
        }
        dg.printed_tail_partial = s / double(q); // same q^{-1} prefactor as the dual sum
    }

    return res;
}

} // namespace klsum
