#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "klsum/rat.hpp"

namespace klsum {

// Exponent vector (x, kappa, theta, eps; mu_1..mu_J, nu_1..nu_J) with
// sum(mu) + sum(nu) = x <= 1, mu_i <= x/J, nu nonincreasing, all >= 0.
struct ExponentPoint {
    Rat x, kappa, theta, eps;
    std::vector<Rat> mu, nu;

    int J() const { return int(mu.size()); }
    void validate() const; // throws usage_error on a broken invariant
};

struct BetaRange {
    Rat lo, hi;
    bool feasible = false;
};

// lo = max(4k+t+4e, 5x/12+e), hi = 5x/6; feasible iff lo <= hi.
BetaRange beta_range(const Rat& x, const Rat& kappa, const Rat& theta, const Rat& eps);

// eta = max over all 2^{2J} subset sums sigma of min(sigma/2, (x-sigma)/2 - 1/4),
// minus kappa/2. Subset sums are enumerated meet-in-the-middle; the tent shape
// of the inner min means only the achievable sigma nearest the peak x/2 - 1/4
// from each side can attain the max.
Rat eta(const ExponentPoint& p);

struct MethodExponents {
    std::optional<Rat> m1; // 2k + x + 1/2 - beta, when nu_1 >= beta
    Rat m2;                // x - eta
    std::optional<Rat> m3; // 2k + max(7x/12 + beta/2, 11/64 + 13x/16), when
                           // 5x/6 - beta + eps <= nu_2 <= nu_1 <= beta
};
MethodExponents method_exponents(const ExponentPoint& p, const Rat& beta);

// max of the three target exponents {2k+13x/18+1/6, k/2+2x/3+1/4, 2k+11/64+13x/16}.
Rat target_exponent(const Rat& x, const Rat& kappa);

struct CertifyConfig {
    long resolution = 2520;
    long random_points = 100000;
    std::uint64_t seed = 1;
};

struct CertifyReport {
    long long points = 0;
    long long case_a = 0, case_b = 0, case_c = 0;
    long long violations = 0;
    std::vector<std::string> violation_samples; // up to 10, rendered
    Rat beta, target, worst_margin;             // margin = target + eps - chosen
    bool worst_margin_set = false;
};

// Certifies the exponent case split on a structured grid over (nu_1, nu_2)
// with three canonical remainder fills (varying the achievable best-sigma)
// plus seeded random simplex points. beta is fixed at 1/3 + 5x/18.
// Preconditions: x > 3/4 and the fixed beta inside beta_range (RangeError),
// x representable at the grid resolution (UsageError).
CertifyReport certify_total(const Rat& x, const Rat& kappa, const Rat& theta,
                            const Rat& eps, int J, const CertifyConfig& cfg);

struct BalanceResult {
    Rat kappa_star;  // -11/192 + x/16
    Rat exponent;    // 11/192 + 15x/16
    bool dominated;  // both companion exponent pairs below `exponent`
    // Smallest integer q with q^{kappa_star} >= 40, as a decimal string;
    // absent when kappa_star <= 0 (threshold unreachable).
    std::optional<std::string> q_threshold;
};
// Valid for 11/12 <= x <= 1 (RangeError otherwise).
BalanceResult balance_final(const Rat& x);

struct CrossingInfo {
    Rat x_coeff;   // 15/16 - 7/9 = 23/144
    Rat q_coeff;   // 1/6 - 11/192 = 21/192
    Rat boundary;  // q-exponent where the envelopes cross: 63/92
};
CrossingInfo envelope_crossing();

} // namespace klsum
