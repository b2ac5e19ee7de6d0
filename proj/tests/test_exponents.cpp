#include "doctest.h"

#include <gmpxx.h>

#include <random>
#include <vector>

#include "klsum/errors.hpp"
#include "klsum/exponents.hpp"
#include "klsum/rat.hpp"

using klsum::Rat;

namespace {

klsum::ExponentPoint point_from_units(const std::vector<long>& mu_u,
                                      const std::vector<long>& nu_u, long x_u, long den,
                                      const Rat& kappa, const Rat& eps) {
    klsum::ExponentPoint p;
    p.x = Rat(x_u, den);
    p.kappa = kappa;
    p.theta = Rat(0);
    p.eps = eps;
    for (long m : mu_u) p.mu.push_back(Rat(m, den));
    for (long n : nu_u) p.nu.push_back(Rat(n, den));
    return p;
}

// exhaustive reference for the tent maximum over all component subset sums
Rat eta_exhaustive(const klsum::ExponentPoint& p) {
    std::vector<Rat> vals;
    for (const auto& r : p.mu) vals.push_back(r);
    for (const auto& r : p.nu) vals.push_back(r);
    const std::size_t n = vals.size();
    bool first = true;
    Rat best(0);
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        Rat sigma(0);
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t(1) << i)) sigma = sigma + vals[i];
        const Rat f = klsum::min(sigma / Rat(2), (p.x - sigma) / Rat(2) - Rat(1, 4));
        if (first || f > best) {
            best = f;
            first = false;
        }
    }
    return best - p.kappa / Rat(2);
}

} // namespace

TEST_CASE("exact rational arithmetic and canonical formatting") {
    CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
    CHECK(Rat(2, 3) * Rat(3, 4) == Rat(1, 2));
    CHECK(Rat(1, 2) - Rat(2, 3) == Rat(-1, 6));
    CHECK(Rat(7, 2) / Rat(7, 6) == Rat(3));
    CHECK(-Rat(1, 3) == Rat(-1, 3));
    CHECK(Rat(10, 2).str() == "5");
    CHECK(Rat(-4, 6).str() == "-2/3");
    CHECK(Rat(-4, 6).num() == -2);
    CHECK(Rat(-4, 6).den() == 3);
    CHECK(Rat(3, -6).str() == "-1/2"); // denominator made positive
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK(Rat(1, 3) >= Rat(2, 6));
    CHECK(klsum::min(Rat(1, 3), Rat(1, 2)) == Rat(1, 3));
    CHECK(klsum::max(Rat(1, 3), Rat(1, 2)) == Rat(1, 2));
    CHECK(Rat(-5, 7).sign() == -1);
    CHECK(Rat(0).sign() == 0);
    CHECK_THROWS_AS(Rat(1, 0), klsum::domain_error);
    CHECK_THROWS_AS((void)(Rat(1) / Rat(0)), klsum::domain_error);
}

TEST_CASE("rational parsing round-trips and rejects junk") {
    CHECK(Rat::parse("2/3") == Rat(2, 3));
    CHECK(Rat::parse("-14/49").str() == "-2/7");
    CHECK(Rat::parse("5").str() == "5");
    CHECK(Rat::parse(" 7 / 8 ") == Rat(7, 8));
    CHECK(Rat::parse("-11/192") == Rat(-11, 192));
    CHECK(Rat::parse(Rat(23, 144).str()) == Rat(23, 144));
    CHECK_THROWS_AS((void)Rat::parse(""), klsum::usage_error);
    CHECK_THROWS_AS((void)Rat::parse("abc"), klsum::usage_error);
    CHECK_THROWS_AS((void)Rat::parse("1/0"), klsum::usage_error);
}

TEST_CASE("admissible interval for the split parameter") {
    auto r = klsum::beta_range(Rat(1), Rat(0), Rat(0), Rat(1, 100));
    CHECK(r.lo == Rat(32, 75)); // max(1/25, 5/12 + 1/100)
    CHECK(r.hi == Rat(5, 6));
    CHECK(r.feasible);

    auto bad = klsum::beta_range(Rat(1), Rat(1, 4), Rat(0), Rat(1, 100));
    CHECK(bad.lo == Rat(26, 25));
    CHECK_FALSE(bad.feasible);

    // sufficiency: x >= 6 theta/5 + 24(kappa+eps)/5 forces a nonempty interval
    const std::vector<Rat> small = {Rat(0), Rat(1, 100), Rat(1, 20), Rat(1, 10)};
    const std::vector<Rat> xs = {Rat(1, 2), Rat(3, 4), Rat(9, 10), Rat(1)};
    for (const Rat& x : xs)
        for (const Rat& k : small)
            for (const Rat& t : small)
                for (const Rat& e : small) {
                    if (x >= Rat(6) * t / Rat(5) + Rat(24) * (k + e) / Rat(5))
                        CHECK(klsum::beta_range(x, k, t, e).feasible);
                }
}

TEST_CASE("exponent point validation") {
    klsum::ExponentPoint p =
        point_from_units({100, 50, 0}, {500, 400, 150}, 1200, 1200, Rat(0), Rat(1, 100));
    CHECK_NOTHROW(p.validate());

    klsum::ExponentPoint bad = p;
    bad.nu.pop_back();
    CHECK_THROWS_AS(bad.validate(), klsum::usage_error);
    bad = p;
    bad.mu[0] = -Rat(1, 1200);
    CHECK_THROWS_AS(bad.validate(), klsum::usage_error);
    bad = p;
    bad.mu[0] = Rat(500, 1200); // exceeds x/J
    CHECK_THROWS_AS(bad.validate(), klsum::usage_error);
    bad = p;
    std::swap(bad.nu[0], bad.nu[2]); // breaks the nonincreasing order
    CHECK_THROWS_AS(bad.validate(), klsum::usage_error);
    bad = p;
    bad.nu[2] = Rat(100, 1200); // components no longer sum to x
    CHECK_THROWS_AS(bad.validate(), klsum::usage_error);
    bad = point_from_units({0, 0}, {700, 500}, 1300, 1200, Rat(0), Rat(1, 100));
    CHECK_THROWS_AS(bad.validate(), klsum::usage_error); // x > 1
}

TEST_CASE("tent maximum: single-block value and exhaustive agreement") {
    auto single = point_from_units({0}, {2520}, 2520, 2520, Rat(1, 10), Rat(1, 100));
    CHECK(klsum::eta(single) == Rat(-1, 20)); // achievable peak at 0: -kappa/2

    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const long den = 2520, cap = 504; // x = 1, J = 5
        std::vector<long> mu(5), nu(5);
        long total = 0;
        std::uniform_int_distribution<long> dm(0, cap);
        for (auto& m : mu) {
            m = dm(rng);
            total += m;
        }
        long V = den - total;
        std::uniform_int_distribution<long> dc(0, V);
        std::vector<long> cuts = {0, dc(rng), dc(rng), dc(rng), dc(rng), V};
        std::sort(cuts.begin(), cuts.end());
        for (int i = 0; i < 5; ++i) nu[std::size_t(i)] = cuts[i + 1] - cuts[i];
        std::sort(nu.begin(), nu.end(), std::greater<long>());
        auto p = point_from_units(mu, nu, den, den, Rat(trial, 100), Rat(1, 100));
        const Rat got = klsum::eta(p);
        CHECK(got == eta_exhaustive(p));
        // the tent never exceeds its peak value x/4 - 1/8
        CHECK(got + p.kappa / Rat(2) <= p.x / Rat(4) - Rat(1, 8));
    }

    // peak below every achievable sum: the smallest sum wins
    auto low = point_from_units({0, 0, 0}, {560, 140, 140}, 840, 2520, Rat(0), Rat(1, 100));
    CHECK(klsum::eta(low) == eta_exhaustive(low));

    klsum::ExponentPoint wide;
    wide.x = Rat(1);
    wide.kappa = Rat(0);
    wide.theta = Rat(0);
    wide.eps = Rat(1, 100);
    wide.mu.assign(13, Rat(0));
    wide.nu.assign(13, Rat(0));
    wide.nu[0] = Rat(1);
    CHECK_THROWS_AS((void)klsum::eta(wide), klsum::resource_error);
}

TEST_CASE("per-method exponents switch on the advertised windows") {
    const Rat beta = Rat(1, 3) + Rat(5, 18); // 11/18 at x = 1
    auto mid = point_from_units({0, 0, 0}, {6, 6, 6}, 18, 18, Rat(0), Rat(1, 100));
    auto me = klsum::method_exponents(mid, beta);
    CHECK_FALSE(me.m1.has_value()); // nu1 = 1/3 below beta
    REQUIRE(me.m3.has_value());     // window 5x/6 - beta + eps <= nu2 <= nu1 <= beta
    CHECK(*me.m3 == Rat(63, 64));   // max(7/12 + beta/2, 11/64 + 13/16)
    CHECK(me.m2 == Rat(11, 12));    // x - (1/12): nearest sums to the peak are 0, 1/3

    auto high = point_from_units({0, 0, 0}, {12, 6, 0}, 18, 18, Rat(0), Rat(1, 100));
    auto mh = klsum::method_exponents(high, beta);
    REQUIRE(mh.m1.has_value()); // nu1 = 2/3 at least beta
    CHECK(*mh.m1 == Rat(8, 9)); // 2*0 + 1 + 1/2 - 11/18
    CHECK_FALSE(mh.m3.has_value());
    CHECK(mh.m2 == klsum::Rat(1) - klsum::eta(high));

    // at beta = 1/3 + 5x/18 the first method equals the first branch of the third
    for (const Rat& x : {Rat(3, 4), Rat(5, 6), Rat(11, 12), Rat(1)}) {
        const Rat b = Rat(1, 3) + Rat(5) * x / Rat(18);
        const Rat kappa(1, 192);
        CHECK(Rat(2) * kappa + x + Rat(1, 2) - b ==
              Rat(2) * kappa + Rat(7) * x / Rat(12) + b / Rat(2));
    }
}

TEST_CASE("target exponent is the worst of the three printed shapes") {
    CHECK(klsum::target_exponent(Rat(1), Rat(1, 192)) == Rat(191, 192));
    for (const auto& [x, k] : std::vector<std::pair<Rat, Rat>>{
             {Rat(1), Rat(0)}, {Rat(11, 12), Rat(1, 192)}, {Rat(4, 5), Rat(1, 50)}}) {
        const Rat t1 = Rat(2) * k + Rat(13) * x / Rat(18) + Rat(1, 6);
        const Rat t2 = k / Rat(2) + Rat(2) * x / Rat(3) + Rat(1, 4);
        const Rat t3 = Rat(2) * k + Rat(11, 64) + Rat(13) * x / Rat(16);
        CHECK(klsum::target_exponent(x, k) == klsum::max(klsum::max(t1, t2), t3));
    }
}

TEST_CASE("full case-split certification passes at the balanced endpoint") {
    klsum::CertifyConfig cfg;
    cfg.resolution = 360;
    cfg.random_points = 500;
    cfg.seed = 1;
    auto rep = klsum::certify_total(Rat(1), Rat(1, 192), Rat(0), Rat(1, 100), 10, cfg);
    CHECK(rep.beta == Rat(11, 18));
    CHECK(rep.target == Rat(191, 192));
    CHECK(rep.violations == 0);
    CHECK(rep.violation_samples.empty());
    CHECK(rep.points > 30000);
    CHECK(rep.case_a > 0);
    CHECK(rep.case_b > 0);
    CHECK(rep.case_c > 0);
    CHECK(rep.case_a + rep.case_b + rep.case_c == rep.points);
    CHECK(rep.worst_margin_set);
    CHECK(rep.worst_margin.sign() >= 0);
}

TEST_CASE("certification rejects out-of-scope inputs") {
    klsum::CertifyConfig cfg;
    cfg.resolution = 360;
    cfg.random_points = 10;
    CHECK_THROWS_AS(
        (void)klsum::certify_total(Rat(3, 4), Rat(0), Rat(0), Rat(1, 100), 10, cfg),
        klsum::range_error);
    CHECK_THROWS_AS(
        (void)klsum::certify_total(Rat(1), Rat(1, 4), Rat(0), Rat(1, 100), 10, cfg),
        klsum::range_error); // fixed beta falls outside the feasible interval
    CHECK_THROWS_AS(
        (void)klsum::certify_total(Rat(1), Rat(1, 192), Rat(0), Rat(1, 10), 10, cfg),
        klsum::range_error); // eps too large for the case chain
    CHECK_THROWS_AS(
        (void)klsum::certify_total(Rat(1699, 2048), Rat(0), Rat(0), Rat(1, 100), 10, cfg),
        klsum::usage_error); // not representable on the sampling grid
    CHECK_THROWS_AS(
        (void)klsum::certify_total(Rat(1), Rat(1, 192), Rat(0), Rat(1, 100), 1, cfg),
        klsum::usage_error);
    CHECK_THROWS_AS(
        (void)klsum::certify_total(Rat(1), Rat(1, 192), Rat(0), Rat(1, 100), 13, cfg),
        klsum::usage_error);
}

TEST_CASE("final balance of the two competing envelopes") {
    auto b1 = klsum::balance_final(Rat(1));
    CHECK(b1.kappa_star == Rat(1, 192));
    CHECK(b1.exponent == Rat(191, 192));
    CHECK(b1.dominated);
    REQUIRE(b1.q_threshold.has_value());
    mpz_class want;
    mpz_pow_ui(want.get_mpz_t(), mpz_class(40).get_mpz_t(), 192);
    CHECK(*b1.q_threshold == want.get_str());

    auto b2 = klsum::balance_final(Rat(11, 12));
    CHECK(b2.kappa_star == Rat(0));
    CHECK(b2.exponent == Rat(11, 12));
    CHECK(b2.dominated);
    CHECK_FALSE(b2.q_threshold.has_value()); // threshold unreachable at zero gain

    auto b3 = klsum::balance_final(Rat(23, 24));
    CHECK(b3.kappa_star == Rat(1, 384));
    CHECK(b3.exponent == Rat(367, 384));
    CHECK(b3.dominated);
    CHECK(b3.q_threshold.has_value());

    CHECK_THROWS_AS((void)klsum::balance_final(Rat(9, 10)), klsum::range_error);
    CHECK_THROWS_AS((void)klsum::balance_final(Rat(25, 24)), klsum::range_error);
}

TEST_CASE("crossing point of the two envelope exponents") {
    auto c = klsum::envelope_crossing();
    CHECK(c.x_coeff == Rat(23, 144));
    CHECK(c.q_coeff == Rat(7, 64)); // 21/192 in lowest terms
    CHECK(c.q_coeff.str() == "7/64");
    CHECK(c.boundary == Rat(63, 92));
    // the two exponent lines meet exactly there
    CHECK(Rat(11, 192) + Rat(15) * c.boundary / Rat(16) ==
          Rat(1, 6) + Rat(7) * c.boundary / Rat(9));
}
