#include "klsum/oscint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "klsum/errors.hpp"

namespace klsum {

namespace {

constexpr double TWO_PI = 6.283185307179586476925286766559;

// 16-point Gauss-Legendre nodes/weights on [-1,1] (positive half; mirror).
constexpr int GL_HALF = 8;
constexpr double GL_X[GL_HALF] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double GL_W[GL_HALF] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

inline std::complex<double> unit_phase(double turns) {
    const double th = TWO_PI * turns;
    return {std::cos(th), std::sin(th)};
}

long panels_for(double cycles) {
    const double p = 4.0 * std::abs(cycles);
    return 2 + (p >= 1.0 ? long(p) : 0);
}

} // namespace

double WeightParams::sharpness() const { return std::pow(q, eps) * Q; }

bool in_T1(const WeightParams& T) {
    if (!(T.c > 0) || !(T.M >= 0.5) || !(T.N >= 0.5) || !(T.Q >= 1) || !(T.q >= 1))
        return false;
    const double s = T.sharpness();
    return T.c * T.M * T.N >= s * s;
}

bool in_T2(const WeightParams& T) {
    return in_T1(T) && T.M <= T.N && T.N <= T.q && T.M * T.N <= T.q && T.c * T.N >= 6.0;
}

bool h_window_nonzero(const WeightParams& T) {
    if (!T.U) return false;
    const double mn = T.M * T.N;
    return *T.U > mn / 8.0 && *T.U < 8.0 * mn;
}

std::complex<double> Weight2D::operator()(double u, double v) const {
    if (zero || u <= u_lo || u >= u_hi || v <= v_lo || v >= v_hi) return {0.0, 0.0};
    return amplitude(u, v) * unit_phase(c * u * v);
}

Weight2D g_weight(const WeightParams& T) {
    if (!in_T1(T)) throw range_error("g_weight: parameters outside the admissible family");
    BumpSpec spec;
    spec.kind = BumpKind::fixed_support;
    spec.center = 1.0;
    spec.halfwidth = 0.05;
    spec.sharpness = T.sharpness();
    const Bump w1 = make_bump(spec), w2 = make_bump(spec);
    Weight2D F;
    F.u_lo = 0.95 * T.M;
    F.u_hi = 1.05 * T.M;
    F.v_lo = 0.95 * T.N;
    F.v_hi = 1.05 * T.N;
    F.c = T.c;
    const double M = T.M, N = T.N;
    F.amplitude = [w1, w2, M, N](double u, double v) { return w1(u / M) * w2(v / N); };
    return F;
}

Weight2D h_weight(const WeightParams& T) {
    if (!T.U) throw usage_error("h_weight: U parameter required");
    if (!in_T1(T)) throw range_error("h_weight: parameters outside the admissible family");
    Weight2D F;
    if (!h_window_nonzero(T)) {
        F.zero = true;
        F.amplitude = [](double, double) { return 0.0; };
        return F;
    }
    BumpSpec spec;
    spec.kind = BumpKind::fixed_support;
    spec.center = 1.0;
    spec.halfwidth = 0.05;
    spec.sharpness = T.sharpness();
    const Bump w1 = make_bump(spec), w2 = make_bump(spec), w3 = make_bump(spec);
    F.u_lo = 0.95 * T.M;
    F.u_hi = 1.05 * T.M;
    F.v_lo = 0.95 * T.N;
    F.v_hi = 1.05 * T.N;
    F.c = T.c;
    const double M = T.M, N = T.N, U = *T.U;
    F.amplitude = [w1, w2, w3, M, N, U](double u, double v) {
        return w1(u / M) * w2(v / N) * w3(u * v / U);
    };
    return F;
}

namespace {

// One full nested pass with a given panel refinement factor.
std::complex<double> nested_pass(const Weight2D& F, double s, double t, double factor,
                                 long& panel_count) {
    const double len_u = F.u_hi - F.u_lo, len_v = F.v_hi - F.v_lo;
    const double freq_u =
        std::max(std::abs(F.c * F.v_lo - s), std::abs(F.c * F.v_hi - s));
    const long pu = std::lround(std::ceil(factor * double(panels_for(freq_u * len_u))));
    panel_count += pu;
    const double hu = len_u / double(pu);
    std::complex<double> outer(0.0, 0.0);
    for (long i = 0; i < pu; ++i) {
        const double ua = F.u_lo + double(i) * hu;
        const double um = ua + 0.5 * hu, uh = 0.5 * hu;
        for (int a = 0; a < 2 * GL_HALF; ++a) {
            const int k = a % GL_HALF;
            const double u = um + (a < GL_HALF ? -1.0 : 1.0) * uh * GL_X[k];
            const double wu = uh * GL_W[k];
            // inner integral over v at this u
            const double alpha = F.c * u - t; // cycles per unit v
            const long pv =
                std::lround(std::ceil(factor * double(panels_for(alpha * len_v))));
            panel_count += pv;
            const double hv = len_v / double(pv);
            std::complex<double> inner(0.0, 0.0);
            for (long j = 0; j < pv; ++j) {
                const double va = F.v_lo + double(j) * hv;
                const double vm = va + 0.5 * hv, vh = 0.5 * hv;
                for (int b = 0; b < 2 * GL_HALF; ++b) {
                    const int l = b % GL_HALF;
                    const double v = vm + (b < GL_HALF ? -1.0 : 1.0) * vh * GL_X[l];
                    const double amp = F.amplitude(u, v);
                    if (amp != 0.0) inner += (vh * GL_W[l] * amp) * unit_phase(alpha * v);
                }
            }
            outer += wu * inner * unit_phase(-s * u);
        }
    }
    return outer;
}

} // namespace

QuadResult fourier2d_info(const Weight2D& F, double s, double t, const QuadConfig& cfg) {
    QuadResult res;
    if (F.zero || !(F.u_hi > F.u_lo) || !(F.v_hi > F.v_lo)) return res;
    const double osc = std::abs(F.c) * std::abs(F.u_hi) * std::abs(F.v_hi) +
                       std::abs(s) * std::abs(F.u_hi) + std::abs(t) * std::abs(F.v_hi);
    if (osc > cfg.osc_budget)
        throw resource_error("fourier2d: oscillation count exceeds configured budget");
    const double area = (F.u_hi - F.u_lo) * (F.v_hi - F.v_lo);
    const double tol = cfg.tol_scale * area;
    double factor = 1.0;
    std::complex<double> prev = nested_pass(F, s, t, factor, res.panels);
    for (;;) {
        factor *= 1.6;
        std::complex<double> next = nested_pass(F, s, t, factor, res.panels);
        res.error_estimate = std::abs(next - prev);
        res.value = next;
        if (res.error_estimate <= tol) return res;
        if (res.panels > cfg.max_panels) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "fourier2d: panel budget exhausted (achieved estimate %.3e, "
                          "tolerance %.3e, panels %ld)",
                          res.error_estimate, tol, res.panels);
            throw numerics_error(msg);
        }
        prev = next;
    }
}

std::complex<double> fourier2d(const Weight2D& F, double s, double t,
                               const QuadConfig& cfg) {
    return fourier2d_info(F, s, t, cfg).value;
}

StationaryBox stationary_box(const WeightParams& T) {
    StationaryBox b;
    b.m_lo = 0.9 * T.c * T.q * T.N;
    b.m_hi = 1.1 * T.c * T.q * T.N;
    b.n_lo = 0.9 * T.c * T.q * T.M;
    b.n_hi = 1.1 * T.c * T.q * T.M;
    return b;
}

std::string region_name(Region r) {
    switch (r) {
        case Region::stationary: return "stationary";
        case Region::far_both: return "far_both";
        case Region::far_n: return "far_n";
        case Region::far_m: return "far_m";
        case Region::band: return "band";
    }
    return "?";
}

Region classify_region(const WeightParams& T, double m, double n) {
    const StationaryBox box = stationary_box(T);
    if (box.contains(m, n)) return Region::stationary;
    const double mEdge = box.m_hi, nEdge = box.n_hi; // 1.1cqN and 1.1cqM
    if (std::abs(n) >= nEdge && std::abs(m) >= mEdge) return Region::far_both;
    if (std::abs(n) >= nEdge && std::abs(m) <= mEdge) return Region::far_n;
    if (std::abs(m) >= mEdge && std::abs(n) <= nEdge) return Region::far_m;
    const bool band_n = (-nEdge <= n && n <= box.n_lo && std::abs(m) <= mEdge);
    const bool band_m = (-mEdge <= m && m <= box.m_lo && std::abs(n) <= nEdge);
    if (band_n || band_m) return Region::band;
    throw numerics_error("classify_region: point escaped the region decomposition");
}

double region_bound(const WeightParams& T, Region r, double m, double n) {
    const double qQ = std::pow(T.q, 1.0 + T.eps) * T.Q;
    const double sQ = std::pow(T.q, T.eps) * T.Q;
    switch (r) {
        case Region::far_both:
            return std::pow(qQ, 2.0 + T.eps) / std::pow(std::abs(m * n), 1.0 + T.eps);
        case Region::far_n:
            return T.M * T.N * std::pow(qQ / (std::abs(n) * T.N), 2.0 + T.eps);
        case Region::far_m:
            return T.M * T.N * std::pow(qQ / (std::abs(m) * T.M), 2.0 + T.eps);
        case Region::band:
            return sQ * sQ / (T.c * T.c * T.M * T.N);
        case Region::stationary:
            break;
    }
    throw usage_error("region_bound: no decay bound inside the stationary box");
}

std::vector<NonstatRow> nonstationary_report(const WeightParams& T,
                                             const std::vector<std::pair<long long, long long>>& grid,
                                             bool use_h, const QuadConfig& cfg) {
    if (!in_T2(T))
        throw range_error("nonstationary_report: parameters outside the restricted family");
    const Weight2D F = use_h ? h_weight(T) : g_weight(T);
    std::vector<NonstatRow> rows;
    rows.reserve(grid.size());
    for (auto [m, n] : grid) {
        NonstatRow row;
        row.m = m;
        row.n = n;
        row.region = classify_region(T, double(m), double(n));
        if (row.region != Region::stationary) {
            row.value = fourier2d(F, double(m) / T.q, double(n) / T.q, cfg);
            row.bound = region_bound(T, row.region, double(m), double(n));
            row.ratio = std::abs(row.value) / row.bound;
        }
        rows.push_back(row);
    }
    return rows;
}

std::pair<double, double> critical_points(const WeightParams& T, double u, double m,
                                          double n) {
    if (!(n > 0)) throw domain_error("critical_points: n must be positive");
    if (!(m > 0) || !(u > 0)) throw domain_error("critical_points: m and u must be positive");
    const double v_tilde = std::sqrt(m * u * T.N / n);
    const double u_tilde = m * n / (T.q * T.q * T.c * T.c * T.N);
    return {v_tilde, u_tilde};
}

std::vector<StatRow> stationary_extract(const WeightParams& T,
                                        const std::vector<std::pair<long long, long long>>& grid,
                                        bool use_h, const QuadConfig& cfg) {
    if (!in_T2(T))
        throw range_error("stationary_extract: parameters outside the restricted family");
    const StationaryBox box = stationary_box(T);
    const Weight2D F = use_h ? h_weight(T) : g_weight(T);
    std::vector<StatRow> rows;
    rows.reserve(grid.size());
    for (auto [m, n] : grid) {
        if (!box.contains(double(m), double(n)))
            throw range_error("stationary_extract: grid point outside the stationary box");
        StatRow row;
        row.m = m;
        row.n = n;
        row.raw = fourier2d(F, double(m) / T.q, double(n) / T.q, cfg);
        const double turns = double(m) * double(n) / (T.c * T.q * T.q);
        row.corrected = row.raw * unit_phase(turns);
        rows.push_back(row);
    }
    return rows;
}

} // namespace klsum
