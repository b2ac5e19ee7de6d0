#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "klsum/ffarith.hpp"
#include "klsum/oscint.hpp"

namespace klsum {

// A q-periodic function given by its values on residues 0..q-1.
struct PeriodicFn {
    u64 q = 0;
    std::vector<std::complex<double>> values;
};

void validate(const PeriodicFn& K);

// Normalized Fourier transform: Khat(h) = q^{-1/2} sum_n K(n) e(hn/q).
// Direct O(q^2) sum below q = 2048, fast transform above.
PeriodicFn fourier_hat(const PeriodicFn& K);
PeriodicFn fourier_hat_direct(const PeriodicFn& K); // reference path, any q

// Voronoi transform: Kcheck(n) = q^{-1/2} sum_{h != 0} Khat(h) e(hbar n/q),
// computed by composing fourier_hat with inverse reindexing of Khat.
PeriodicFn voronoi_check_kernel(const PeriodicFn& K);
// Same value straight from the definition by a double sum (test oracle).
PeriodicFn voronoi_check_kernel_direct(const PeriodicFn& K);

// K(n) = Kl_m(a n; q) as a periodic function; index 0 carries the
// m-th moment limit value (-1)^{m+1} q^{-(m-1)/2} so the closed-form
// transforms below hold exactly (see README notes on the 0 index).
PeriodicFn kloosterman_periodic(const FieldCtx& ctx, u64 a, int m = 2);

// Closed forms for K(n) = Kl_2(a n; q), (a,q) = 1:
//   Khat(h) = 0 if q|h, else e(-a hbar/q)
//   Kcheck(n) = (q-1)/sqrt(q) if n == a mod q, else -1/sqrt(q)
std::complex<double> hat_closed_form(u64 q, u64 a, u64 h);
double voronoi_closed_form(u64 q, u64 a, u64 n);

struct VoronoiConfig {
    double tol = 1e-6;        // residual tolerance the truncation aims at
    long long trunc_m = 0;    // dual-sum radius override (0 = auto-size)
    long long trunc_n = 0;
    int samples_pow2 = 0;     // per-axis sample count as a power of two (0 = auto)
    double env_delta = 0;     // envelope cut level override (0 = auto)
};

struct VoronoiDiagnostics {
    long long trunc_m = 0, trunc_n = 0;   // dual sum covers |m|,|n| <= trunc
    int samples_u = 0, samples_v = 0;     // transform sampling grid
    double env_cut_delta = 0;             // envelope level sizing the radii
    double tail_strip_m = 0;              // certified dual-tail bounds
    double tail_strip_n = 0;
    double tail_corner = 0;
    double alias_bound = 0;               // sampling periodization bound
    double printed_tail_partial = 0;      // the polynomial-decay table's own
                                          // tail beyond 8x the stationary box
                                          // (partial sum; see README)
    double lattice_sum_ghat = 0;          // |sum of dual-window Ghat| (~ 0 by Poisson)
    long long lattice_points = 0;         // support lattice points on the LHS
    double max_kernel = 0;                // max |Kcheck|
    std::complex<double> sum_G{0, 0};     // lattice sum of G
};

struct VoronoiResult {
    std::complex<double> lhs{0, 0};
    std::complex<double> rhs{0, 0};
    std::complex<double> main_term{0, 0}; // q^{-1/2} Khat(0) * sum G
    std::complex<double> dual_term{0, 0}; // q^{-1} sum Kcheck(mn) Ghat(m/q,n/q)
    double residual = 0;                  // |lhs-rhs| / max(1, |lhs|)
    VoronoiDiagnostics diag;
};

// Numerical two-sided check of the tempered double Poisson identity
//   sum K(mn) G(m,n) = q^{-1/2} Khat(0) sum G + q^{-1} sum Kcheck(mn) Ghat(m/q, n/q)
// for G built from the oscillatory weight parameters T.  The left side is an
// exact finite sum; the right side is evaluated on a truncated dual lattice
// sized from measured transform decay envelopes.
VoronoiResult tempered_voronoi_residual(const PeriodicFn& K, const WeightParams& T,
                                        const VoronoiConfig& cfg = {});

} // namespace klsum
