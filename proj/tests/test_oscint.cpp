#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include "klsum/bumps.hpp"
#include "klsum/errors.hpp"
#include "klsum/oscint.hpp"

using cplx = std::complex<double>;

namespace {

const double tau = 6.283185307179586476925287;

klsum::WeightParams small_params() {
    klsum::WeightParams T;
    T.c = 1.2;
    T.q = 101;
    T.M = 10;
    T.N = 10;
    T.Q = 1;
    T.eps = 0.01;
    return T;
}

klsum::WeightParams stationary_params() {
    klsum::WeightParams T;
    T.c = 0.4;
    T.q = 1009;
    T.M = 15;
    T.N = 15;
    T.Q = 1;
    T.eps = 0.01;
    return T;
}

double max_abs_derivative(const klsum::Bump& b, int order) {
    double best = 0;
    const double lo = b.support_lo(), hi = b.plateau_lo();
    for (int i = 1; i < 4000; ++i) {
        const double t = lo + (hi - lo) * double(i) / 4000.0;
        best = std::max(best, std::abs(b.derivative(order, t)));
    }
    return best;
}

// closed form of int_a^b u e(-s u) du for the separable quadrature oracle
cplx moment_integral(double s, double a, double b) {
    if (s == 0.0) return {(b * b - a * a) / 2.0, 0.0};
    const cplx alpha{0.0, -tau * s};
    auto prim = [&](double u) { return std::exp(alpha * u) * (u / alpha - 1.0 / (alpha * alpha)); };
    return prim(b) - prim(a);
}

} // namespace

TEST_CASE("smoothstep is a monotone ramp with exact endpoints and symmetry") {
    CHECK(klsum::smoothstep(-1.0) == 0.0);
    CHECK(klsum::smoothstep(0.0) == 0.0);
    CHECK(klsum::smoothstep(1.0) == 1.0);
    CHECK(klsum::smoothstep(2.0) == 1.0);
    CHECK(klsum::smoothstep(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = klsum::smoothstep(double(i) / 100.0);
        CHECK(v >= prev - 1e-16);
        prev = v;
    }
    CHECK(klsum::smoothstep(0.2) + klsum::smoothstep(0.8) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fixed-support bumps keep their support and plateau exactly") {
    klsum::BumpSpec spec;
    spec.kind = klsum::BumpKind::fixed_support;
    spec.center = 1.0;
    spec.halfwidth = 0.05;
    spec.sharpness = 4.0;
    klsum::Bump b = klsum::make_bump(spec);
    CHECK(b.support_lo() == 0.95);
    CHECK(b.support_hi() == 1.05);
    CHECK(b.plateau_lo() == doctest::Approx(0.9625).epsilon(1e-15));
    CHECK(b.plateau_hi() == doctest::Approx(1.0375).epsilon(1e-15));
    CHECK(b(0.94) == 0.0);
    CHECK(b(0.95) == 0.0);
    CHECK(b(1.05) == 0.0);
    CHECK(b(1.06) == 0.0);
    CHECK(b(1.0) == 1.0);
    CHECK(b(0.97) == 1.0);  // inside the plateau
    CHECK(b(0.955) > 0.0);  // on the rise
    CHECK(b(0.955) < 1.0);
}

TEST_CASE("transition bumps are exactly one on the named interval") {
    klsum::BumpSpec spec;
    spec.kind = klsum::BumpKind::transition_delta;
    spec.center = 1.0;
    spec.halfwidth = 0.05;
    spec.sharpness = 10.0;
    klsum::Bump b = klsum::make_bump(spec);
    CHECK(b.support_lo() == doctest::Approx(0.85).epsilon(1e-15));
    CHECK(b.support_hi() == doctest::Approx(1.15).epsilon(1e-15));
    CHECK(b(0.95) == 1.0);
    CHECK(b(1.0) == 1.0);
    CHECK(b(1.05) == 1.0);
    CHECK(b(0.84) == 0.0);
    CHECK(b(1.16) == 0.0);
    CHECK(b(0.9) > 0.0);
    CHECK(b(0.9) < 1.0);
}

TEST_CASE("bump derivatives scale linearly in sharpness per order") {
    klsum::BumpSpec a, b;
    a.sharpness = 4.0;
    b.sharpness = 8.0;
    klsum::Bump ba = klsum::make_bump(a), bb = klsum::make_bump(b);
    const double r1 = max_abs_derivative(bb, 1) / max_abs_derivative(ba, 1);
    const double r2 = max_abs_derivative(bb, 2) / max_abs_derivative(ba, 2);
    CHECK(r1 > 1.8);
    CHECK(r1 < 2.2);
    CHECK(r2 > 3.5);
    CHECK(r2 < 4.5);
}

TEST_CASE("bump construction rejects malformed specs") {
    klsum::BumpSpec bad;
    bad.halfwidth = 0;
    CHECK_THROWS_AS((void)klsum::make_bump(bad), klsum::usage_error);
    bad.halfwidth = 0.05;
    bad.sharpness = 0.5;
    CHECK_THROWS_AS((void)klsum::make_bump(bad), klsum::usage_error);
    CHECK_THROWS_AS(klsum::Bump(1.0, 0.5, 2.0, 3.0), klsum::usage_error);
    klsum::Bump ok(0.0, 0.25, 0.75, 1.0);
    CHECK_THROWS_AS((void)ok.derivative(5, 0.5), klsum::usage_error);
}

TEST_CASE("tabulated bump transform matches direct quadrature") {
    klsum::BumpSpec spec; // defaults: fixed support [0.95, 1.05]
    klsum::Bump w = klsum::make_bump(spec);
    klsum::BumpTransform tf(w);

    // mass oracle: Simpson's rule on a dense grid
    const int S = 20000;
    const double lo = w.support_lo(), hi = w.support_hi(), h = (hi - lo) / S;
    double mass = w(lo) + w(hi);
    for (int i = 1; i < S; ++i) mass += (i % 2 ? 4.0 : 2.0) * w(lo + i * h);
    mass *= h / 3.0;
    CHECK(tf.mass() == doctest::Approx(mass).epsilon(1e-9));

    // pointwise oracle: midpoint rule (spectrally accurate for smooth
    // compactly supported integrands)
    for (double omega : {3.7, 50.0}) {
        const int R = 200000;
        const double d = (hi - lo) / R;
        cplx direct{0, 0};
        for (int i = 0; i < R; ++i) {
            const double t = lo + (i + 0.5) * d;
            direct += w(t) * std::polar(1.0, -tau * omega * t);
        }
        direct *= d;
        CHECK(std::abs(tf.eval(omega) - direct) < 1e-8);
        CHECK(std::abs(tf.eval(-omega) - std::conj(direct)) < 1e-8);
    }
}

TEST_CASE("bump transform envelope dominates and decreases") {
    klsum::BumpSpec spec;
    klsum::Bump w = klsum::make_bump(spec);
    klsum::BumpTransform tf(w);
    double prev = tf.envelope(0.0);
    CHECK(prev == doctest::Approx(std::abs(tf.mass())).epsilon(1e-9));
    for (double omega : {1.0, 5.3, 20.0, 103.0, 1500.0}) {
        CHECK(tf.envelope(omega) >= std::abs(tf.eval(omega)) - 1e-9);
        CHECK(tf.envelope(omega) <= prev + 1e-15);
        prev = tf.envelope(omega);
    }
    const double wcut = tf.cut(1e-6);
    CHECK(tf.envelope(wcut) <= 1e-6);
    if (wcut > 0) CHECK(tf.envelope(wcut - 1.001 * tf.node_spacing()) > 1e-6);
    CHECK_THROWS_AS((void)tf.cut(-1.0), klsum::usage_error);
}

TEST_CASE("weight family admissibility tiers") {
    klsum::WeightParams T = small_params();
    CHECK(T.sharpness() == std::pow(T.q, T.eps) * T.Q);
    CHECK(klsum::in_T1(T));
    CHECK(klsum::in_T2(T));

    klsum::WeightParams t = T;
    t.c = 1e-4; // c*M*N below sharpness^2
    CHECK_FALSE(klsum::in_T1(t));
    t = T;
    t.M = 0.4;
    CHECK_FALSE(klsum::in_T1(t));
    t = T;
    t.Q = 0.5;
    CHECK_FALSE(klsum::in_T1(t));

    t = T;
    t.M = 11;
    t.N = 11; // M*N exceeds q
    CHECK(klsum::in_T1(t));
    CHECK_FALSE(klsum::in_T2(t));
    t = T;
    t.c = 1.0;
    t.M = 10.5;
    t.N = 9; // M > N
    CHECK(klsum::in_T1(t));
    CHECK_FALSE(klsum::in_T2(t));
    t = T;
    t.c = 0.05; // c*N below 6
    CHECK(klsum::in_T1(t));
    CHECK_FALSE(klsum::in_T2(t));
    t = klsum::WeightParams{};
    t.c = 1.0;
    t.q = 7;
    t.M = 0.5;
    t.N = 8; // N exceeds q
    t.Q = 1;
    t.eps = 0.01;
    CHECK(klsum::in_T1(t));
    CHECK_FALSE(klsum::in_T2(t));

    t = T;
    CHECK_FALSE(klsum::h_window_nonzero(t)); // U unset
    t.U = 100.0;
    CHECK(klsum::h_window_nonzero(t));
    t.U = 12.5; // exactly M*N/8: excluded
    CHECK_FALSE(klsum::h_window_nonzero(t));
    t.U = 12.6;
    CHECK(klsum::h_window_nonzero(t));
    t.U = 800.0; // exactly 8*M*N: excluded
    CHECK_FALSE(klsum::h_window_nonzero(t));
}

TEST_CASE("base weight has the right support, phase and admissibility guard") {
    klsum::WeightParams T = small_params();
    klsum::Weight2D W = klsum::g_weight(T);
    CHECK(W.u_lo == 0.95 * T.M);
    CHECK(W.u_hi == 1.05 * T.M);
    CHECK(W.v_lo == 0.95 * T.N);
    CHECK(W.v_hi == 1.05 * T.N);
    CHECK(W.c == T.c);
    CHECK_FALSE(W.zero);
    // plateau value at the center: amplitude exactly 1, pure phase e(c M N)
    const double th = tau * T.c * T.M * T.N;
    CHECK(std::abs(W(T.M, T.N) - cplx(std::cos(th), std::sin(th))) < 1e-12);
    CHECK(std::abs(W(T.M, T.N)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(W(0.95 * T.M, T.N) == cplx{0, 0});
    CHECK(W(1.06 * T.M, T.N) == cplx{0, 0});
    CHECK(W(T.M, 0.94 * T.N) == cplx{0, 0});
    const double inner = std::abs(W(0.96 * T.M, T.N));
    CHECK(inner > 0.0);
    CHECK(inner <= 1.0);

    klsum::WeightParams bad = T;
    bad.c = 1e-9;
    CHECK_THROWS_AS((void)klsum::g_weight(bad), klsum::range_error);
}

TEST_CASE("windowed weight is dominated by the base weight") {
    klsum::WeightParams T = small_params();
    CHECK_THROWS_AS((void)klsum::h_weight(T), klsum::usage_error); // U required
    T.U = T.M * T.N;
    klsum::Weight2D G = klsum::g_weight(T);
    klsum::Weight2D H = klsum::h_weight(T);
    CHECK_FALSE(H.zero);
    CHECK(std::abs(H(T.M, T.N) - G(T.M, T.N)) < 1e-15); // window plateau at u*v = U
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> du(G.u_lo, G.u_hi), dv(G.v_lo, G.v_hi);
    for (int i = 0; i < 200; ++i) {
        const double u = du(rng), v = dv(rng);
        CHECK(std::abs(H(u, v)) <= std::abs(G(u, v)) + 1e-15);
    }

    klsum::WeightParams voidw = T;
    voidw.U = 900.0; // beyond 8*M*N: the window dies
    klsum::Weight2D Z = klsum::h_weight(voidw);
    CHECK(Z.zero);
    CHECK(Z(T.M, T.N) == cplx{0, 0});
    CHECK(klsum::fourier2d(Z, 1.0, 1.0) == cplx{0, 0});
}

TEST_CASE("oscillatory quadrature matches a separable closed form") {
    klsum::Weight2D F;
    F.u_lo = 1;
    F.u_hi = 2;
    F.v_lo = 0;
    F.v_hi = 1;
    F.c = 0;
    F.amplitude = [](double u, double v) { return u * v; };
    for (auto [s, t] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {0.3, -0.7}, {2.5, 1.25}}) {
        const cplx want = moment_integral(s, 1, 2) * moment_integral(t, 0, 1);
        CHECK(std::abs(klsum::fourier2d(F, s, t) - want) < 1e-8);
    }
}

TEST_CASE("oscillatory quadrature matches a dense midpoint oracle") {
    klsum::WeightParams T;
    T.c = 0.7;
    T.q = 2;
    T.M = 2;
    T.N = 3;
    T.Q = 1;
    T.eps = 0.01;
    REQUIRE(klsum::in_T1(T));
    klsum::Weight2D G = klsum::g_weight(T);
    const double s = 0.4, t = 1.1;
    const int R = 1200;
    const double du = (G.u_hi - G.u_lo) / R, dv = (G.v_hi - G.v_lo) / R;
    cplx direct{0, 0};
    for (int i = 0; i < R; ++i) {
        const double u = G.u_lo + (i + 0.5) * du;
        cplx inner{0, 0};
        for (int j = 0; j < R; ++j) {
            const double v = G.v_lo + (j + 0.5) * dv;
            inner += G(u, v) * std::polar(1.0, -tau * t * v);
        }
        direct += inner * std::polar(1.0, -tau * s * u) * du * dv;
    }
    CHECK(std::abs(klsum::fourier2d(G, s, t) - direct) < 2e-6);
}

TEST_CASE("oscillatory quadrature enforces its budgets") {
    klsum::Weight2D huge;
    huge.u_lo = 0;
    huge.u_hi = 1000;
    huge.v_lo = 0;
    huge.v_hi = 1000;
    huge.c = 1;
    huge.amplitude = [](double, double) { return 1.0; };
    CHECK_THROWS_AS((void)klsum::fourier2d(huge, 0, 0), klsum::resource_error);

    klsum::WeightParams T;
    T.c = 0.7;
    T.q = 2;
    T.M = 2;
    T.N = 3;
    T.Q = 1;
    T.eps = 0.01;
    klsum::Weight2D G = klsum::g_weight(T);
    klsum::QuadConfig starved;
    starved.tol_scale = 1e-18; // below the roundoff floor: cannot converge
    starved.max_panels = 50;
    CHECK_THROWS_AS((void)klsum::fourier2d(G, 12.0, 9.0, starved), klsum::numerics_error);
}

TEST_CASE("stationary box and frequency-region decomposition") {
    klsum::WeightParams T = small_params();
    klsum::StationaryBox box = klsum::stationary_box(T);
    CHECK(box.m_lo == 0.9 * T.c * T.q * T.N);
    CHECK(box.m_hi == 1.1 * T.c * T.q * T.N);
    CHECK(box.n_lo == 0.9 * T.c * T.q * T.M);
    CHECK(box.n_hi == 1.1 * T.c * T.q * T.M);

    using klsum::Region;
    CHECK(klsum::classify_region(T, 1200, 1200) == Region::stationary);
    CHECK(klsum::classify_region(T, box.m_hi, box.n_hi) == Region::stationary);
    CHECK(klsum::classify_region(T, 1400, 1400) == Region::far_both);
    CHECK(klsum::classify_region(T, -1400, 1350) == Region::far_both);
    CHECK(klsum::classify_region(T, 1200, 1400) == Region::far_n);
    CHECK(klsum::classify_region(T, 0, -2000) == Region::far_n);
    CHECK(klsum::classify_region(T, 1400, 1200) == Region::far_m);
    CHECK(klsum::classify_region(T, 500, 500) == Region::band);
    CHECK(klsum::classify_region(T, 0, 0) == Region::band);
    CHECK(klsum::classify_region(T, -1200, 300) == Region::band);
    CHECK(klsum::region_name(Region::far_both) == "far_both");

    // the five regions cover every integer frequency pair
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> d(-3000, 3000);
    for (int i = 0; i < 2000; ++i)
        CHECK_NOTHROW((void)klsum::classify_region(T, double(d(rng)), double(d(rng))));
}

TEST_CASE("decay bounds per region follow the printed shapes") {
    klsum::WeightParams T = small_params();
    const double qQ = std::pow(T.q, 1.0 + T.eps) * T.Q;
    const double sQ = std::pow(T.q, T.eps) * T.Q;
    using klsum::Region;
    CHECK(klsum::region_bound(T, Region::far_both, 1500, 1500) ==
          doctest::Approx(std::pow(qQ, 2.0 + T.eps) / std::pow(1500.0 * 1500.0, 1.0 + T.eps))
              .epsilon(1e-12));
    CHECK(klsum::region_bound(T, Region::far_n, 1200, 1500) ==
          doctest::Approx(T.M * T.N * std::pow(qQ / (1500.0 * T.N), 2.0 + T.eps))
              .epsilon(1e-12));
    CHECK(klsum::region_bound(T, Region::far_m, 1500, 1200) ==
          doctest::Approx(T.M * T.N * std::pow(qQ / (1500.0 * T.M), 2.0 + T.eps))
              .epsilon(1e-12));
    CHECK(klsum::region_bound(T, Region::band, 500, 500) ==
          doctest::Approx(sQ * sQ / (T.c * T.c * T.M * T.N)).epsilon(1e-12));
    CHECK_THROWS_AS((void)klsum::region_bound(T, Region::stationary, 1200, 1200),
                    klsum::usage_error);
}

TEST_CASE("transform decay report stays under the bounds off the box") {
    klsum::WeightParams T = small_params();
    std::vector<std::pair<long long, long long>> grid = {
        {1200, 1200}, {1500, 1500}, {1200, 1500}, {1500, 1200}, {400, 300}};
    auto rows = klsum::nonstationary_report(T, grid);
    REQUIRE(rows.size() == grid.size());
    CHECK(rows[0].region == klsum::Region::stationary);
    CHECK(rows[0].value == cplx{0, 0});
    CHECK(rows[0].bound == 0.0);
    CHECK(rows[0].ratio == 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].region != klsum::Region::stationary);
        CHECK(rows[i].bound > 0.0);
        CHECK(rows[i].ratio == std::abs(rows[i].value) / rows[i].bound);
        CHECK(rows[i].ratio <= 10.0);
    }

    klsum::WeightParams TH = T;
    TH.U = T.M * T.N;
    auto hrows = klsum::nonstationary_report(TH, {{1500, 1500}}, true);
    REQUIRE(hrows.size() == 1);
    CHECK(hrows[0].ratio <= 10.0);

    klsum::WeightParams bad = T;
    bad.c = 0.2; // leaves the restricted family (c*N below 6)
    CHECK_THROWS_AS((void)klsum::nonstationary_report(bad, grid), klsum::range_error);
}

TEST_CASE("phase critical points follow their closed form") {
    klsum::WeightParams T = small_params();
    auto [vt, ut] = klsum::critical_points(T, 10.0, 1200.0, 1100.0);
    CHECK(vt == doctest::Approx(std::sqrt(1200.0 * 10.0 * T.N / 1100.0)).epsilon(1e-15));
    CHECK(ut ==
          doctest::Approx(1200.0 * 1100.0 / (T.q * T.q * T.c * T.c * T.N)).epsilon(1e-15));
    CHECK_THROWS_AS((void)klsum::critical_points(T, 10.0, 1200.0, 0.0), klsum::domain_error);
    CHECK_THROWS_AS((void)klsum::critical_points(T, 10.0, -1.0, 1100.0), klsum::domain_error);
    CHECK_THROWS_AS((void)klsum::critical_points(T, 0.0, 1200.0, 1100.0), klsum::domain_error);
}

TEST_CASE("phase-corrected stationary values vary slowly") {
    klsum::WeightParams T = stationary_params();
    klsum::StationaryBox box = klsum::stationary_box(T);
    std::vector<std::pair<long long, long long>> grid;
    for (long long m = 6000; m < 6005; ++m) grid.push_back({m, 6000});
    for (auto [m, n] : grid) REQUIRE(box.contains(double(m), double(n)));

    auto rows = klsum::stationary_extract(T, grid);
    REQUIRE(rows.size() == grid.size());
    for (const auto& r : rows) {
        CHECK(std::abs(std::abs(r.corrected) - std::abs(r.raw)) < 1e-15);
        const double turns = double(r.m) * double(r.n) / (T.c * T.q * T.q);
        const cplx want = r.raw * cplx(std::cos(tau * turns), std::sin(tau * turns));
        CHECK(std::abs(r.corrected - want) < 1e-12);
        CHECK(std::abs(r.corrected) > 0.0);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double d = std::arg(rows[i].corrected) - std::arg(rows[i - 1].corrected);
        while (d > 3.14159265358979324) d -= tau;
        while (d < -3.14159265358979324) d += tau;
        CHECK(std::abs(d) <= 0.5);
    }

    CHECK_THROWS_AS((void)klsum::stationary_extract(T, {{100, 6000}}), klsum::range_error);
    klsum::WeightParams bad = T;
    bad.c = 0.2;
    CHECK_THROWS_AS((void)klsum::stationary_extract(bad, grid), klsum::range_error);
}
