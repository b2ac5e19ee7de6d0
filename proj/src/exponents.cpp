#include "klsum/exponents.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

#include "klsum/errors.hpp"

namespace klsum {

namespace {

Rat rat_from_mpz(const mpz_class& n, const mpz_class& d) {
    mpq_class q(n);
    q /= mpq_class(d);
    q.canonicalize();
    return Rat(q);
}

// r*scale, which must land on an integer (scale a common denominator multiple).
long long to_units(const Rat& r, const mpz_class& scale) {
    mpz_class t = r.num() * (scale / r.den());
    if (scale % r.den() != 0)
        throw usage_error("exponents: scale does not clear a denominator");
    if (!t.fits_slong_p()) throw resource_error("exponents: unit overflow");
    return t.get_si();
}

mpz_class lcm_all(const std::vector<mpz_class>& xs) {
    mpz_class l = 1;
    for (const auto& x : xs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_mpz_t());
    return l;
}

// Sorted distinct subset sums of a small multiset given as (value, count).
void multiset_sums(const std::vector<std::pair<long long, int>>& parts,
                   std::vector<long long>& out, std::vector<long long>& scratch) {
    out.assign(1, 0);
    for (auto [v, c] : parts) {
        if (v == 0 || c == 0) continue;
        scratch.clear();
        for (int k = 0; k <= c; ++k)
            for (long long s : out) scratch.push_back(s + k * v);
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        std::swap(out, scratch);
    }
}

// All 2^n subset sums of values[0..n), unsorted.
void dense_sums(const long long* values, int n, std::vector<long long>& out) {
    out.assign(std::size_t(1) << n, 0);
    for (std::size_t i = 1; i < out.size(); ++i)
        out[i] = out[i & (i - 1)] + values[std::countr_zero(i)];
}

struct SigmaNearest {
    long long below = -1; // max achievable sum <= peak, -1 if none
    long long above = -1; // min achievable sum >= peak, -1 if none
    bool in_band = false; // some achievable sum in [band_lo, band_hi]
};

// Scan achievable sums a+b (a from A, b from sorted-unique B) for the nearest
// values around `peak` and membership in [band_lo, band_hi].
SigmaNearest scan_sums(const std::vector<long long>& A, const std::vector<long long>& B,
                       long long peak, long long band_lo, long long band_hi) {
    SigmaNearest r;
    for (long long a : A) {
        auto it = std::lower_bound(B.begin(), B.end(), peak - a);
        if (it != B.end()) {
            long long s = a + *it;
            if (r.above < 0 || s < r.above) r.above = s;
        }
        if (it != B.begin()) {
            long long s = a + *(it - 1);
            if (s > r.below) r.below = s;
        }
        if (!r.in_band) {
            auto jt = std::lower_bound(B.begin(), B.end(), band_lo - a);
            if (jt != B.end() && a + *jt <= band_hi) r.in_band = true;
        }
    }
    // peak itself achievable counts on both sides via lower_bound semantics:
    // *it == peak-a lands in `above`; recover it for `below` too.
    if (r.above == peak) r.below = peak;
    return r;
}

// f(sigma) = min(sigma/2, (x-sigma)/2 - 1/4) evaluated in units of 1/(2*scale)
// given sigma, x in units of 1/scale; scale must be divisible by 2.
long long tent_2u(long long sigma_u, long long x_u, long long scale_half) {
    return std::min(sigma_u, x_u - sigma_u - scale_half);
}

} // namespace

void ExponentPoint::validate() const {
    if (mu.size() != nu.size() || mu.empty())
        throw usage_error("ExponentPoint: mu and nu must have equal positive length");
    const Rat cap = x / Rat(long(mu.size()));
    Rat total(0);
    for (const auto& m : mu) {
        if (m.sign() < 0) throw usage_error("ExponentPoint: negative mu component");
        if (m > cap) throw usage_error("ExponentPoint: mu component exceeds x/J");
        total = total + m;
    }
    for (std::size_t j = 0; j < nu.size(); ++j) {
        if (nu[j].sign() < 0) throw usage_error("ExponentPoint: negative nu component");
        if (j > 0 && nu[j] > nu[j - 1])
            throw usage_error("ExponentPoint: nu not nonincreasing");
        total = total + nu[j];
    }
    if (total != x) throw usage_error("ExponentPoint: components do not sum to x");
    if (x > Rat(1)) throw usage_error("ExponentPoint: x > 1");
}

BetaRange beta_range(const Rat& x, const Rat& kappa, const Rat& theta, const Rat& eps) {
    BetaRange r;
    r.lo = max(Rat(4) * kappa + theta + Rat(4) * eps, Rat(5) * x / Rat(12) + eps);
    r.hi = Rat(5) * x / Rat(6);
    r.feasible = r.lo <= r.hi;
    return r;
}

Rat eta(const ExponentPoint& p) {
    p.validate();
    const int J = p.J();
    if (J > 12) throw resource_error("eta: subset enumeration capped at J <= 12");
    std::vector<mpz_class> dens{4, p.x.den() * 2};
    for (const auto& r : p.mu) dens.push_back(r.den());
    for (const auto& r : p.nu) dens.push_back(r.den());
    const mpz_class D = lcm_all(dens);
    std::vector<long long> muv(J), nuv(J);
    for (int i = 0; i < J; ++i) muv[i] = to_units(p.mu[i], D);
    for (int i = 0; i < J; ++i) nuv[i] = to_units(p.nu[i], D);
    const long long x_u = to_units(p.x, D);
    const long long quarter = to_units(Rat(1, 4), D);
    const long long peak = to_units(p.x / Rat(2) - Rat(1, 4), D);
    std::vector<long long> A, B;
    dense_sums(muv.data(), J, A);
    dense_sums(nuv.data(), J, B);
    std::sort(B.begin(), B.end());
    B.erase(std::unique(B.begin(), B.end()), B.end());
    auto near = scan_sums(A, B, peak, 0, -1);
    long long best = std::numeric_limits<long long>::min();
    if (near.below >= 0) best = std::max(best, tent_2u(near.below, x_u, 2 * quarter));
    if (near.above >= 0) best = std::max(best, tent_2u(near.above, x_u, 2 * quarter));
    // sums always include 0 and x, so both sides exist whenever peak is inside [0,x];
    // outside that the extreme sum is still the maximizer and was captured above.
    return rat_from_mpz(mpz_class(long(best)), mpz_class(2) * D) - p.kappa / Rat(2);
}

MethodExponents method_exponents(const ExponentPoint& p, const Rat& beta) {
    p.validate();
    MethodExponents out;
    if (p.nu[0] >= beta)
        out.m1 = Rat(2) * p.kappa + p.x + Rat(1, 2) - beta;
    out.m2 = p.x - eta(p);
    const Rat nu2 = p.nu.size() > 1 ? p.nu[1] : Rat(0);
    const Rat lo = Rat(5) * p.x / Rat(6) - beta + p.eps;
    if (lo <= nu2 && nu2 <= p.nu[0] && p.nu[0] <= beta)
        out.m3 = Rat(2) * p.kappa +
                 max(Rat(7) * p.x / Rat(12) + beta / Rat(2),
                     Rat(11, 64) + Rat(13) * p.x / Rat(16));
    return out;
}

Rat target_exponent(const Rat& x, const Rat& kappa) {
    const Rat t1 = Rat(2) * kappa + Rat(13) * x / Rat(18) + Rat(1, 6);
    const Rat t2 = kappa / Rat(2) + Rat(2) * x / Rat(3) + Rat(1, 4);
    const Rat t3 = Rat(2) * kappa + Rat(11, 64) + Rat(13) * x / Rat(16);
    return max(max(t1, t2), t3);
}

namespace {

struct CertifyEngine {
    // fixed data, all in units of 1/D (int64)
    long long x_u, beta_u, cap_u, band_lo, band_hi, peak, quarter2, fivesix_u, c_lo;
    long long step; // D/resolution
    int J;
    mpz_class D;
    Rat x, kappa, eps, beta, target, margin_a, margin_c, slack_target;
    bool m1_const_ok, m3_const_ok;
    CertifyReport rep;
    std::unordered_map<long long, Rat> eta_margin_cache;
    std::vector<long long> sums, scratch, A, B;
    std::vector<std::pair<long long, int>> parts;

    Rat margin_b(long long s_below, long long s_above) {
        const long long key = (s_below + 1) * (x_u + 2) + (s_above + 1);
        auto it = eta_margin_cache.find(key);
        if (it != eta_margin_cache.end()) return it->second;
        long long best = std::numeric_limits<long long>::min();
        if (s_below >= 0) best = std::max(best, tent_2u(s_below, x_u, quarter2));
        if (s_above >= 0) best = std::max(best, tent_2u(s_above, x_u, quarter2));
        const Rat eta_v = rat_from_mpz(mpz_class(long(best)), mpz_class(2) * D) - kappa / Rat(2);
        const Rat m2 = x - eta_v;
        Rat m = slack_target - m2;
        eta_margin_cache.emplace(key, m);
        return m;
    }

    void note_violation(const std::string& what) {
        ++rep.violations;
        if (rep.violation_samples.size() < 10) rep.violation_samples.push_back(what);
    }

    // One sampled point. nu1/nu2 in units; parts = full component multiset.
    void check_point(long long n1, long long n2, const SigmaNearest& near,
                     long long max_mu_u, long long nu3_u, const char* tag) {
        ++rep.points;
        char the_case;
        Rat margin;
        bool margin_set = false;
        auto consider = [&](const Rat& m) {
            if (!margin_set || m > margin) { margin = m; margin_set = true; }
        };
        if (n1 >= beta_u) {
            the_case = 'A';
            ++rep.case_a;
            if (m1_const_ok) consider(margin_a);
            consider(margin_b(near.below, near.above));
        } else if (near.in_band) {
            the_case = 'B';
            ++rep.case_b;
            consider(margin_b(near.below, near.above));
        } else {
            the_case = 'C';
            ++rep.case_c;
            // derivation chain: mu small, exactly two large nu, nu1+nu2 >= 5x/6+eps,
            // and the method-3 window 5x/6 - beta + eps <= nu2 <= nu1 <= beta.
            if (!(max_mu_u < band_lo)) note_violation(std::string(tag) + ": large mu in case C");
            if (!(n2 > band_hi && nu3_u <= band_hi))
                note_violation(std::string(tag) + ": case C without exactly two large nu");
            if (!(n1 + n2 >= fivesix_u)) note_violation(std::string(tag) + ": nu1+nu2 < 5x/6+eps");
            if (c_lo <= n2 && n1 <= beta_u) {
                if (m3_const_ok) consider(margin_c);
            } else {
                note_violation(std::string(tag) + ": case C window (9.12-style) fails");
            }
            consider(margin_b(near.below, near.above));
        }
        if (!margin_set) {
            note_violation(std::string(tag) + ": no applicable method");
            return;
        }
        if (margin.sign() < 0) {
            std::ostringstream os;
            os << tag << ": case " << the_case << " margin " << margin.str()
               << " at nu1=" << n1 << "/D nu2=" << n2 << "/D";
            note_violation(os.str());
        }
        if (!rep.worst_margin_set || margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_margin_set = true;
        }
    }
};

} // namespace

CertifyReport certify_total(const Rat& x, const Rat& kappa, const Rat& theta,
                            const Rat& eps, int J, const CertifyConfig& cfg) {
    if (!(x > Rat(3, 4))) throw range_error("certify_total: requires x > 3/4");
    if (J < 2 || J > 12) throw usage_error("certify_total: J in [2,12]");
    if (!(eps < x / Rat(15)))
        throw range_error("certify_total: requires eps < x/15 for the case-C chain");
    CertifyEngine eng;
    eng.J = J;
    eng.x = x;
    eng.kappa = kappa;
    eng.eps = eps;
    eng.beta = Rat(1, 3) + Rat(5) * x / Rat(18);
    const BetaRange br = beta_range(x, kappa, theta, eps);
    if (!br.feasible || eng.beta < br.lo || eng.beta > br.hi)
        throw range_error("certify_total: beta = 1/3 + 5x/18 outside feasible range");
    eng.target = target_exponent(x, kappa);
    eng.slack_target = eng.target + eps;

    const Rat cap = x / Rat(long(J));
    const Rat band_lo_r = x / Rat(6) - eps, band_hi_r = x / Rat(3) + eps;
    const Rat fivesix_r = Rat(5) * x / Rat(6) + eps;
    const Rat c_lo_r = Rat(5) * x / Rat(6) - eng.beta + eps;
    const Rat peak_r = x / Rat(2) - Rat(1, 4);
    std::vector<mpz_class> dens{mpz_class(cfg.resolution), 4,        x.den(),
                                cap.den(),                 eng.beta.den(), band_lo_r.den(),
                                band_hi_r.den(),           fivesix_r.den(), c_lo_r.den(),
                                peak_r.den()};
    eng.D = lcm_all(dens);
    eng.x_u = to_units(x, eng.D);
    eng.beta_u = to_units(eng.beta, eng.D);
    eng.cap_u = to_units(cap, eng.D);
    eng.band_lo = to_units(band_lo_r, eng.D);
    eng.band_hi = to_units(band_hi_r, eng.D);
    eng.fivesix_u = to_units(fivesix_r, eng.D);
    eng.c_lo = to_units(c_lo_r, eng.D);
    eng.peak = to_units(peak_r, eng.D);
    eng.quarter2 = to_units(Rat(1, 2), eng.D);
    mpz_class step_z = eng.D / mpz_class(cfg.resolution);
    eng.step = step_z.get_si();
    // x must sit on the sampling grid so random compositions are exact.
    if (to_units(x, eng.D) % eng.step != 0)
        throw usage_error("certify_total: x not representable at this resolution");

    eng.margin_a = eng.slack_target - (Rat(2) * kappa + x + Rat(1, 2) - eng.beta);
    eng.margin_c = eng.slack_target -
                   (Rat(2) * kappa + max(Rat(7) * x / Rat(12) + eng.beta / Rat(2),
                                         Rat(11, 64) + Rat(13) * x / Rat(16)));
    eng.m1_const_ok = true;
    eng.m3_const_ok = true;
    eng.rep.beta = eng.beta;
    eng.rep.target = eng.target;

    // ---- structured grid over (nu1, nu2) with three remainder fills ----
    auto run_fill = [&](long long n1, long long n2, long long rest, int fill_id) {
        eng.parts.clear();
        long long max_mu = 0, nu3 = 0;
        const long long mu_capacity = (long long)(J)*eng.cap_u;
        if (fill_id == 0) { // mu-heavy
            long long k = eng.cap_u ? rest / eng.cap_u : 0;
            long long partial = rest - k * eng.cap_u;
            if (k > J) return; // cannot happen while rest <= x, kept as a guard
            if (k) { eng.parts.push_back({eng.cap_u, int(k)}); max_mu = eng.cap_u; }
            if (partial) { eng.parts.push_back({partial, 1}); max_mu = std::max(max_mu, partial); }
        } else {
            long long chunk_cap = (long long)(J - 2) * n2;
            long long nu_take, mu_take;
            if (fill_id == 1) { // nu-heavy
                nu_take = std::min(rest, chunk_cap);
            } else { // split
                nu_take = std::min(rest - rest / 2, chunk_cap);
            }
            mu_take = rest - nu_take;
            if (mu_take > mu_capacity) return;
            if (nu_take) {
                long long kf = nu_take / n2, pf = nu_take - kf * n2;
                if (kf) { eng.parts.push_back({n2, int(kf)}); nu3 = n2; }
                if (pf) { eng.parts.push_back({pf, 1}); nu3 = std::max(nu3, kf ? n2 : pf); }
            }
            if (mu_take) {
                long long km = eng.cap_u ? mu_take / eng.cap_u : 0;
                long long pm = mu_take - km * eng.cap_u;
                if (km) { eng.parts.push_back({eng.cap_u, int(km)}); max_mu = eng.cap_u; }
                if (pm) { eng.parts.push_back({pm, 1}); max_mu = std::max(max_mu, pm); }
            }
            if (fill_id == 1 && nu_take == 0 && rest != 0) return; // degenerate duplicate
        }
        eng.parts.push_back({n1, 1});
        if (n2) eng.parts.push_back({n2, 1});
        multiset_sums(eng.parts, eng.sums, eng.scratch);
        static const std::vector<long long> zero{0};
        SigmaNearest near = scan_sums(zero, eng.sums, eng.peak, eng.band_lo, eng.band_hi);
        const char* tags[3] = {"grid/mu-fill", "grid/nu-fill", "grid/split-fill"};
        eng.check_point(n1, n2, near, max_mu, nu3, tags[fill_id]);
    };

    for (long long n1 = 0; n1 <= eng.x_u; n1 += eng.step) {
        const long long n2_max = std::min(n1, eng.x_u - n1);
        for (long long n2 = 0; n2 <= n2_max; n2 += eng.step) {
            const long long rest = eng.x_u - n1 - n2;
            run_fill(n1, n2, rest, 0);
            if (n2 > 0 && rest > 0) {
                run_fill(n1, n2, rest, 1);
                run_fill(n1, n2, rest, 2);
            }
        }
    }

    // ---- seeded random simplex points (grid-resolution compositions) ----
    std::mt19937_64 rng(cfg.seed);
    const long long G = eng.x_u / eng.step; // x in grid units
    const long long capg = eng.cap_u / eng.step;
    std::vector<long long> mu_g(J), nu_g(J), comp(2 * J);
    for (long long trial = 0; trial < cfg.random_points; ++trial) {
        const long long mu_total_max = std::min(G, (long long)(J)*capg);
        std::uniform_int_distribution<long long> dist_mu(0, mu_total_max);
        long long mu_total = dist_mu(rng);
        long long rem = mu_total;
        for (int i = 0; i < J; ++i) {
            const long long left = (long long)(J - 1 - i) * capg;
            const long long lo = std::max(0LL, rem - left);
            const long long hi = std::min(capg, rem);
            std::uniform_int_distribution<long long> d(lo, hi);
            mu_g[i] = d(rng);
            rem -= mu_g[i];
        }
        const long long V = G - mu_total;
        std::vector<long long> cuts(J - 1);
        std::uniform_int_distribution<long long> dc(0, V);
        for (auto& c : cuts) c = dc(rng);
        std::sort(cuts.begin(), cuts.end());
        long long prev = 0;
        for (int i = 0; i < J - 1; ++i) { nu_g[i] = cuts[i] - prev; prev = cuts[i]; }
        nu_g[J - 1] = V - prev;
        std::sort(nu_g.begin(), nu_g.end(), std::greater<long long>());

        long long max_mu = 0;
        for (int i = 0; i < J; ++i) {
            comp[i] = mu_g[i] * eng.step;
            max_mu = std::max(max_mu, comp[i]);
        }
        for (int i = 0; i < J; ++i) comp[J + i] = nu_g[i] * eng.step;
        dense_sums(comp.data(), J, eng.A);
        dense_sums(comp.data() + J, J, eng.B);
        std::sort(eng.B.begin(), eng.B.end());
        eng.B.erase(std::unique(eng.B.begin(), eng.B.end()), eng.B.end());
        SigmaNearest near = scan_sums(eng.A, eng.B, eng.peak, eng.band_lo, eng.band_hi);
        eng.check_point(comp[J], comp[J + 1], near, max_mu, J > 2 ? comp[J + 2] : 0,
                        "random");
    }

    return eng.rep;
}

BalanceResult balance_final(const Rat& x) {
    if (x < Rat(11, 12) || x > Rat(1))
        throw range_error("balance_final: x outside [11/12, 1]");
    BalanceResult r;
    r.kappa_star = Rat(-11, 192) + x / Rat(16);
    r.exponent = Rat(11, 192) + Rat(15) * x / Rat(16);
    const Rat second = Rat(5, 96) + Rat(61) * x / Rat(72);
    const Rat third = Rat(85, 384) + Rat(67) * x / Rat(96);
    r.dominated = second <= r.exponent && third <= r.exponent;
    if (r.kappa_star.sign() > 0) {
        // smallest integer q with q^{p/r} >= 40, i.e. q^p >= 40^r
        const mpz_class p = r.kappa_star.num(), rr = r.kappa_star.den();
        mpz_class target;
        mpz_pow_ui(target.get_mpz_t(), mpz_class(40).get_mpz_t(), rr.get_ui());
        mpz_class root;
        const int exact = mpz_root(root.get_mpz_t(), target.get_mpz_t(), p.get_ui());
        if (!exact) root += 1;
        r.q_threshold = root.get_str();
    }
    return r;
}

CrossingInfo envelope_crossing() {
    CrossingInfo c;
    c.x_coeff = Rat(15, 16) - Rat(7, 9);
    c.q_coeff = Rat(1, 6) - Rat(11, 192);
    c.boundary = c.q_coeff / c.x_coeff;
    return c;
}

} // namespace klsum
