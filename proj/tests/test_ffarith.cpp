#include "doctest.h"

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "klsum/errors.hpp"
#include "klsum/ffarith.hpp"

using klsum::u64;

namespace {

// Independent primality oracle by trial division.
bool trial_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

u64 mul_oracle(u64 a, u64 b, u64 q) {
    return u64((unsigned __int128)(a % q) * (b % q) % q);
}

} // namespace

TEST_CASE("primality test agrees with trial division below 5000") {
    for (u64 n = 0; n < 5000; ++n) CHECK(klsum::is_prime(n) == trial_prime(n));
}

TEST_CASE("primality test handles adversarial 64-bit inputs") {
    CHECK(klsum::is_prime(2));
    CHECK_FALSE(klsum::is_prime(1));
    CHECK_FALSE(klsum::is_prime(0));
    CHECK_FALSE(klsum::is_prime(561));        // Carmichael
    CHECK_FALSE(klsum::is_prime(3215031751ULL)); // strong pseudoprime to bases 2,3,5,7
    CHECK_FALSE(klsum::is_prime(25326001ULL));
    CHECK(klsum::is_prime(1000000007ULL));
    CHECK(klsum::is_prime(1000000009ULL));
    CHECK(klsum::is_prime((1ULL << 61) - 1)); // Mersenne prime
    CHECK_FALSE(klsum::is_prime((1ULL << 61) + 1));
}

TEST_CASE("modular product and power match wide-integer arithmetic") {
    std::mt19937_64 rng(12345);
    const u64 qs[] = {5, 101, 1009, 1000000007ULL, 0xFFFFFFFFFFFFFFC5ULL};
    for (u64 q : qs) {
        for (int i = 0; i < 200; ++i) {
            u64 a = rng(), b = rng();
            CHECK(klsum::mul_mod(a % q, b % q, q) == mul_oracle(a, b, q));
        }
        // pow vs repeated multiplication
        u64 a = rng() % q;
        u64 acc = 1 % q;
        for (u64 e = 0; e < 40; ++e) {
            CHECK(klsum::pow_mod(a, e, q) == acc);
            acc = mul_oracle(acc, a, q);
        }
    }
    // Fermat: a^(q-1) = 1 mod prime q
    for (u64 a : {2ULL, 3ULL, 977ULL}) CHECK(klsum::pow_mod(a, 1008, 1009) == 1);
}

TEST_CASE("modular inverse multiplies back to one") {
    const u64 q = 101;
    for (u64 x = 1; x < q; ++x) CHECK(klsum::mul_mod(x, klsum::inv(x, q), q) == 1);
    std::mt19937_64 rng(7);
    const u64 big = 1000000007ULL;
    for (int i = 0; i < 50; ++i) {
        u64 x = rng() % big;
        if (x == 0) continue;
        CHECK(klsum::mul_mod(x, klsum::inv(x, big), big) == 1);
    }
    CHECK_THROWS_AS((void)klsum::inv(0, q), klsum::domain_error);
    CHECK_THROWS_AS((void)klsum::inv(q, q), klsum::domain_error);
}

TEST_CASE("batch inverse equals elementwise inverse") {
    const u64 q = 1009;
    std::mt19937_64 rng(99);
    std::vector<u64> xs;
    for (int i = 0; i < 60; ++i) xs.push_back(1 + rng() % (3 * q)); // exercises reduction
    for (auto& x : xs)
        if (x % q == 0) x += 1;
    std::vector<u64> ys = klsum::batch_inv(xs, q);
    REQUIRE(ys.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(klsum::mul_mod(xs[i] % q, ys[i], q) == 1);

    std::vector<u64> bad = {1, 2, 2 * q, 3};
    CHECK_THROWS_AS((void)klsum::batch_inv(bad, q), klsum::domain_error);
}

TEST_CASE("additive character is the expected root of unity") {
    const u64 q = 5;
    const double tau = 6.283185307179586476925;
    for (std::int64_t x = -12; x <= 12; ++x) {
        std::complex<double> want = std::polar(1.0, tau * double(((x % 5) + 5) % 5) / 5.0);
        CHECK(std::abs(klsum::additive_char(x, q) - want) < 1e-14);
    }
    // q-periodicity and conjugate symmetry
    CHECK(std::abs(klsum::additive_char(1009 + 3, 1009) - klsum::additive_char(3, 1009)) < 1e-15);
    CHECK(std::abs(klsum::additive_char(-3, 1009) - std::conj(klsum::additive_char(3, 1009))) <
          1e-15);
    CHECK(std::abs(klsum::additive_char(0, 1009) - std::complex<double>(1, 0)) == 0.0);
}

TEST_CASE("primitive root generates the full multiplicative group") {
    for (u64 q = 3; q <= 300; ++q) {
        if (!trial_prime(q)) continue;
        u64 g = klsum::primitive_root(q);
        CHECK(klsum::pow_mod(g, q - 1, q) == 1);
        u64 m = q - 1;
        for (u64 p = 2; p * p <= m; ++p) {
            if (m % p) continue;
            CHECK(klsum::pow_mod(g, (q - 1) / p, q) != 1);
            while (m % p == 0) m /= p;
        }
        if (m > 1) CHECK(klsum::pow_mod(g, (q - 1) / m, q) != 1);
    }
}

TEST_CASE("discrete log table inverts exponentiation") {
    klsum::FieldCtx ctx(1009);
    CHECK(ctx.q == 1009);
    for (u64 x = 1; x < ctx.q; ++x) CHECK(klsum::pow_mod(ctx.g, ctx.log(x), ctx.q) == x);
    CHECK(ctx.log(1) == 0);
    CHECK_THROWS_AS((void)ctx.log(0), klsum::domain_error);
    CHECK_THROWS_AS((void)ctx.log(2018), klsum::domain_error); // 2*1009
    CHECK(ctx.log(1010) == ctx.log(1));                        // reduces mod q

    CHECK_THROWS_AS(klsum::FieldCtx(1000), klsum::usage_error);
    klsum::FieldCtx tiny(2);
    CHECK(tiny.log(1) == 0);
}
