#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "klsum/errors.hpp"
#include "klsum/ffarith.hpp"
#include "klsum/fft.hpp"
#include "klsum/transforms.hpp"

using klsum::u64;
using cplx = std::complex<double>;

namespace {

const double tau = 6.283185307179586476925287;

std::vector<cplx> naive_dft(const std::vector<cplx>& a, int sign) {
    const std::size_t L = a.size();
    std::vector<cplx> out(L, cplx{0, 0});
    for (std::size_t k = 0; k < L; ++k)
        for (std::size_t j = 0; j < L; ++j)
            out[k] += a[j] * std::polar(1.0, sign * tau * double(j * k % L) / double(L));
    if (sign == +1)
        for (auto& z : out) z /= double(L);
    return out;
}

std::vector<cplx> random_vec(std::size_t n, u64 seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<cplx> a(n);
    for (auto& z : a) z = cplx(d(rng), d(rng));
    return a;
}

klsum::PeriodicFn random_periodic(u64 q, u64 seed) {
    return {q, random_vec(q, seed)};
}

} // namespace

TEST_CASE("power-of-two transform round-trips") {
    auto a = random_vec(64, 101);
    auto b = a;
    klsum::fft_pow2(b, -1);
    klsum::fft_pow2(b, +1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("arbitrary-length transform matches the quadratic definition") {
    for (std::size_t L : {1u, 2u, 3u, 5u, 8u, 12u, 17u, 31u, 40u}) {
        auto a = random_vec(L, 1000 + L);
        auto fast = klsum::dft(a, -1);
        auto slow = naive_dft(a, -1);
        REQUIRE(fast.size() == L);
        for (std::size_t k = 0; k < L; ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-10 * (1 + double(L)));
        auto back = klsum::dft(fast, +1);
        for (std::size_t k = 0; k < L; ++k) CHECK(std::abs(back[k] - a[k]) < 1e-10 * (1 + double(L)));
    }
}

TEST_CASE("cyclic convolution matches the quadratic definition") {
    for (std::size_t L : {1u, 3u, 8u, 13u}) {
        auto a = random_vec(L, 7 * L + 1), b = random_vec(L, 9 * L + 2);
        auto fast = klsum::cyclic_convolve(a, b);
        REQUIRE(fast.size() == L);
        for (std::size_t k = 0; k < L; ++k) {
            cplx want{0, 0};
            for (std::size_t j = 0; j < L; ++j) want += a[j] * b[(k + L - j) % L];
            CHECK(std::abs(fast[k] - want) < 1e-11 * (1 + double(L)));
        }
    }
    std::vector<cplx> a(3), b(4);
    CHECK_THROWS_AS((void)klsum::cyclic_convolve(a, b), klsum::usage_error);
}

TEST_CASE("normalized transform of a point mass is flat") {
    const u64 q = 19;
    klsum::PeriodicFn K{q, std::vector<cplx>(q, cplx{0, 0})};
    K.values[0] = 1.0;
    klsum::PeriodicFn hat = klsum::fourier_hat(K);
    for (u64 h = 0; h < q; ++h)
        CHECK(std::abs(hat.values[h] - cplx(1.0 / std::sqrt(double(q)), 0)) < 1e-13);
}

TEST_CASE("fast and direct transform paths agree across the size switch") {
    for (u64 q : {17ULL, 101ULL, 2053ULL}) {
        auto K = random_periodic(q, q);
        auto fast = klsum::fourier_hat(K);
        auto slow = klsum::fourier_hat_direct(K);
        double worst = 0;
        for (u64 i = 0; i < q; ++i) worst = std::max(worst, std::abs(fast.values[i] - slow.values[i]));
        CHECK(worst < 1e-9);
    }
    const u64 q = 101;
    auto K = random_periodic(q, 5);
    auto a = klsum::voronoi_check_kernel(K);
    auto b = klsum::voronoi_check_kernel_direct(K);
    for (u64 i = 0; i < q; ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-10);
}

TEST_CASE("transform preserves energy and double transform reflects") {
    const u64 q = 101;
    auto K = random_periodic(q, 31);
    auto hat = klsum::fourier_hat(K);
    double ein = 0, eout = 0;
    for (auto& z : K.values) ein += std::norm(z);
    for (auto& z : hat.values) eout += std::norm(z);
    CHECK(std::abs(ein - eout) < 1e-10 * ein);

    auto hathat = klsum::fourier_hat(hat);
    for (u64 n = 0; n < q; ++n)
        CHECK(std::abs(hathat.values[n] - K.values[(q - n) % q]) < 1e-11);
}

TEST_CASE("closed forms at small moduli are the expected roots of unity") {
    // q=7, a=1, h=3: inverse of 3 is 5, so the transform value is e(-5/7)
    cplx want = std::polar(1.0, -tau * 5.0 / 7.0);
    CHECK(std::abs(klsum::hat_closed_form(7, 1, 3) - want) < 1e-14);
    CHECK(std::abs(klsum::hat_closed_form(7, 1, 0)) == 0.0);
    // dual kernel: (q-1)/sqrt(q) on the shift class, -1/sqrt(q) elsewhere
    CHECK(klsum::voronoi_closed_form(7, 2, 2) == doctest::Approx(6.0 / std::sqrt(7.0)));
    CHECK(klsum::voronoi_closed_form(7, 2, 3) == doctest::Approx(-1.0 / std::sqrt(7.0)));
    CHECK(klsum::voronoi_closed_form(7, 2, 9) == doctest::Approx(6.0 / std::sqrt(7.0)));
    CHECK_THROWS_AS((void)klsum::hat_closed_form(10, 1, 1), klsum::usage_error);
    CHECK_THROWS_AS((void)klsum::hat_closed_form(7, 14, 1), klsum::domain_error);
}

TEST_CASE("kernel transforms reproduce their closed forms") {
    for (u64 q : {5ULL, 7ULL, 101ULL}) {
        klsum::FieldCtx ctx(q);
        for (u64 a : {u64(1), u64(2), q - 1}) {
            klsum::PeriodicFn K = klsum::kloosterman_periodic(ctx, a, 2);
            CHECK(std::abs(K.values[0] - cplx(-1.0 / std::sqrt(double(q)), 0)) < 1e-15);
            klsum::PeriodicFn hat = klsum::fourier_hat(K);
            klsum::PeriodicFn chk = klsum::voronoi_check_kernel(K);
            for (u64 h = 0; h < q; ++h)
                CHECK(std::abs(hat.values[h] - klsum::hat_closed_form(q, a, h)) < 1e-10);
            for (u64 n = 0; n < q; ++n)
                CHECK(std::abs(chk.values[n] - cplx(klsum::voronoi_closed_form(q, a, n), 0)) <
                      1e-10);
        }
    }
}

TEST_CASE("hyper-Kloosterman kernel carries its moment limit at the singular index") {
    klsum::FieldCtx ctx(13);
    klsum::PeriodicFn K3 = klsum::kloosterman_periodic(ctx, 1, 3);
    CHECK(std::abs(K3.values[0] - cplx(1.0 / 13.0, 0)) < 1e-15);
}

TEST_CASE("shifted kernels are re-indexings of the unshifted transform") {
    const u64 q = 101;
    klsum::FieldCtx ctx(q);
    klsum::PeriodicFn K1 = klsum::kloosterman_periodic(ctx, 1, 2);
    klsum::PeriodicFn hat1 = klsum::fourier_hat(K1);
    klsum::PeriodicFn chk1 = klsum::voronoi_check_kernel(K1);
    for (u64 a : {3ULL, 57ULL, 100ULL}) {
        u64 abar = klsum::inv(a, q);
        klsum::PeriodicFn Ka = klsum::kloosterman_periodic(ctx, a, 2);
        klsum::PeriodicFn hata = klsum::fourier_hat(Ka);
        klsum::PeriodicFn chka = klsum::voronoi_check_kernel(Ka);
        for (u64 h = 1; h < q; ++h)
            CHECK(std::abs(hata.values[h] - hat1.values[klsum::mul_mod(abar, h, q)]) < 1e-10);
        for (u64 n = 0; n < q; ++n)
            CHECK(std::abs(chka.values[n] - chk1.values[klsum::mul_mod(abar, n, q)]) < 1e-10);
    }
}

TEST_CASE("periodic function validation rejects malformed input") {
    klsum::PeriodicFn bad{7, std::vector<cplx>(6)};
    CHECK_THROWS_AS(klsum::validate(bad), klsum::usage_error);
    klsum::PeriodicFn ok{10, std::vector<cplx>(10)};
    CHECK_THROWS_AS((void)klsum::voronoi_check_kernel(ok), klsum::usage_error);
}

TEST_CASE("dual-sum identity holds on a light window") {
    const u64 q = 11;
    klsum::FieldCtx ctx(q);
    klsum::PeriodicFn K = klsum::kloosterman_periodic(ctx, 3, 2);
    klsum::WeightParams T;
    T.c = 70.0 / 3600.0;
    T.q = double(q);
    T.M = 60;
    T.N = 60;
    T.Q = 1;
    T.eps = 0.01;
    klsum::VoronoiResult r = klsum::tempered_voronoi_residual(K, T, {});
    CHECK(r.residual <= 1e-6);
    CHECK(r.diag.trunc_m > 0);
    CHECK(r.diag.trunc_n > 0);
    CHECK(r.diag.lattice_points > 0);
    CHECK(std::abs(r.lhs - (r.main_term + r.dual_term)) ==
          doctest::Approx(std::abs(r.lhs - r.rhs)).epsilon(1e-12));
    // the dual window's raw transform sum telescopes to nearly zero
    CHECK(r.diag.lattice_sum_ghat < 1e-3);
}

TEST_CASE("dual-sum identity degenerates correctly for a constant kernel") {
    const u64 q = 11;
    klsum::PeriodicFn K{q, std::vector<cplx>(q, cplx{1, 0})};
    klsum::WeightParams T;
    T.c = 70.0 / 3600.0;
    T.q = double(q);
    T.M = 60;
    T.N = 60;
    T.Q = 1;
    T.eps = 0.01;
    klsum::VoronoiResult r = klsum::tempered_voronoi_residual(K, T, {});
    // flat kernel: the dual kernel vanishes and the main term is the whole sum
    CHECK(std::abs(r.main_term - r.lhs) < 1e-8 * std::max(1.0, std::abs(r.lhs)));
    CHECK(std::abs(r.dual_term) < 1e-6);
    CHECK(r.residual <= 1e-6);
}

TEST_CASE("dual-sum evaluator rejects bad configurations") {
    klsum::FieldCtx ctx(11);
    klsum::PeriodicFn K = klsum::kloosterman_periodic(ctx, 1, 2);
    klsum::WeightParams T;
    T.c = 70.0 / 3600.0;
    T.q = 11;
    T.M = 60;
    T.N = 60;

    klsum::WeightParams wrongq = T;
    wrongq.q = 13;
    CHECK_THROWS_AS((void)klsum::tempered_voronoi_residual(K, wrongq, {}), klsum::usage_error);

    klsum::WeightParams straddle = T;
    straddle.M = 10.5; // support [9.975, 11.025] contains the modulus
    straddle.N = 10.5;
    CHECK_THROWS_AS((void)klsum::tempered_voronoi_residual(K, straddle, {}), klsum::usage_error);

    klsum::PeriodicFn comp{10, std::vector<cplx>(10, cplx{1, 0})};
    klsum::WeightParams tenq = T;
    tenq.q = 10;
    CHECK_THROWS_AS((void)klsum::tempered_voronoi_residual(comp, tenq, {}), klsum::usage_error);
}
