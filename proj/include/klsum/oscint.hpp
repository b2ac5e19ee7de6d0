#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "klsum/bumps.hpp"

namespace klsum {

// Parameters of the oscillatory weight family: weights supported on
// [0.95M, 1.05M] x [0.95N, 1.05N] carrying the phase e(c*x*y), with bump
// derivative growth governed by q^eps * Q, and an optional product-localizing
// window at scale U.
struct WeightParams {
    double c = 1.0;
    double q = 1.0;
    double M = 1.0;
    double N = 1.0;
    double Q = 1.0;
    double eps = 0.01;
    std::optional<double> U;

    double sharpness() const; // q^eps * Q
};

// Admissibility tiers: the base family needs c*M*N >= (q^eps*Q)^2 with
// M, N >= 1/2 and Q >= 1; the restricted family additionally needs
// M <= N <= q, MN <= q and c*N >= 6.
bool in_T1(const WeightParams& T);
bool in_T2(const WeightParams& T);
// The U-window is nonvoid only when MN/8 < U < 8MN.
bool h_window_nonzero(const WeightParams& T);

// A compactly supported 2D weight amplitude(u,v) * e(c*u*v).  The phase
// coefficient is carried explicitly so quadrature can count oscillations
// exactly from the phase gradient of c*u*v - s*u - t*v.
struct Weight2D {
    double u_lo = 0, u_hi = 0, v_lo = 0, v_hi = 0;
    double c = 0;
    std::function<double(double, double)> amplitude;
    bool zero = false;

    std::complex<double> operator()(double u, double v) const;
};

Weight2D g_weight(const WeightParams& T);
Weight2D h_weight(const WeightParams& T);

struct QuadConfig {
    double tol_scale = 1e-9;  // absolute tolerance = tol_scale * support area
    long max_panels = 400000; // cumulative 1D panel budget
    double osc_budget = 1e5;  // cap on |c|*u_hi*v_hi + |s|*u_hi + |t|*v_hi
};

struct QuadResult {
    std::complex<double> value;
    double error_estimate = 0;
    long panels = 0;
};

// Fhat(s,t) = integral of F(u,v) e(-s*u - t*v) du dv by nested adaptive
// Gauss-Legendre (order 16, panels at most a quarter of the local oscillation
// period, refined until the two finest answers agree within tolerance).
QuadResult fourier2d_info(const Weight2D& F, double s, double t, const QuadConfig& cfg = {});
std::complex<double> fourier2d(const Weight2D& F, double s, double t,
                               const QuadConfig& cfg = {});

// Decay regions for integer frequency pairs (m,n), classified against the
// stationary box [0.9cqN, 1.1cqN] x [0.9cqM, 1.1cqM]; first match in the
// fixed order below wins.
enum class Region { stationary, far_both, far_n, far_m, band };
std::string region_name(Region r);
Region classify_region(const WeightParams& T, double m, double n);
// Printed decay bound for the region (constant 1); rejects `stationary`.
double region_bound(const WeightParams& T, Region r, double m, double n);

struct NonstatRow {
    long long m = 0, n = 0;
    std::complex<double> value{0, 0};
    double bound = 0, ratio = 0;
    Region region = Region::stationary;
};
// Evaluate |Fhat(m/q, n/q)| against the decay bounds on a grid of integer
// pairs; stationary-box points are kept in the table as excluded notes.
std::vector<NonstatRow> nonstationary_report(const WeightParams& T,
                                             const std::vector<std::pair<long long, long long>>& grid,
                                             bool use_h = false, const QuadConfig& cfg = {});

// Closed-form critical points of the phase in the two integration variables:
// v_tilde = sqrt(m*u*N/n), u_tilde = m*n/(q^2 c^2 N).
std::pair<double, double> critical_points(const WeightParams& T, double u, double m,
                                          double n);

struct StatRow {
    long long m = 0, n = 0;
    std::complex<double> raw{0, 0};       // Fhat(m/q, n/q)
    std::complex<double> corrected{0, 0}; // raw * e(+m*n/(c*q^2))
};
// Phase-corrected transform values inside the stationary box; the correction
// strips the predicted rapidly rotating factor e(-m*n/(c*q^2)).
std::vector<StatRow> stationary_extract(const WeightParams& T,
                                        const std::vector<std::pair<long long, long long>>& grid,
                                        bool use_h = false, const QuadConfig& cfg = {});

struct StationaryBox {
    double m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
    bool contains(double m, double n) const {
        return m >= m_lo && m <= m_hi && n >= n_lo && n <= n_hi;
    }
};
StationaryBox stationary_box(const WeightParams& T);

} // namespace klsum
