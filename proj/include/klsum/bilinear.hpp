#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "klsum/bumps.hpp"
#include "klsum/ffarith.hpp"
#include "klsum/kloosterman.hpp"
#include "klsum/oscint.hpp"

namespace klsum {

// Optional smoothing factor W(mn/X) applied inside the bilinear form.
struct Smoothing {
    BumpSpec spec;
    double X = 1;
};

// A bilinear form sum_{m,n} alpha_m beta_n Kl_2(a m n; q), coefficients given
// on integer windows starting at m_lo / n_lo.
struct BilinearSpec {
    u64 q = 0;
    u64 a = 1;
    long long m_lo = 1;
    std::vector<std::complex<double>> alpha;
    long long n_lo = 1;
    std::vector<std::complex<double>> beta;
    std::optional<Smoothing> smoothing;
};

double norm2(const std::vector<std::complex<double>>& v);
double norm1(const std::vector<std::complex<double>>& v);

// Exact double sum via one precomputed spectrum (O(q log q) + O(MN)); terms
// with q | mn are skipped, matching the coprimality convention of the bounds.
std::complex<double> eval_form(const BilinearSpec& spec);
// Same sum with every kernel value recomputed from scratch (O(q) per term);
// the agreement oracle for eval_form at small sizes.
std::complex<double> eval_form_naive(const BilinearSpec& spec);

// Envelope ||a||_2 ||b||_2 (MN)^{1/2} (1/M + Q q^{1/2+eps}/N)^{1/2}, constant 1.
double bound_fkm(double M, double N, double Q, double q, double eps, double norm_a,
                 double norm_b);
// The same template with the roles of the two windows exchanged.  The printed
// form is asymmetric and no symmetry is assumed; callers pick the orientation.
double bound_fkm_transposed(double M, double N, double Q, double q, double eps,
                            double norm_a, double norm_b);

// Envelope q^eps ||a||_2 ||b||_2 (MN)^{1/2} (M^{-1/2} + (MN)^{-3/16} q^{11/64});
// requires 1 <= M <= q^{1/4} N and q^{1/4} < MN < q^{5/4}, and reports which
// inequality failed otherwise.  With smooth_Q set the Abel-summation variant
// multiplies by (q^eps Q)^2.
double bound_kms(double M, double N, double q, double eps, double norm_a, double norm_b,
                 std::optional<double> smooth_Q = std::nullopt);

enum class WeightSide { G, H };

// Envelope (q^eps Q)^2 M q^{1/2} (1 + Q^4/(c M^2 N)) for the oscillatory-weight
// forms; both weight sides carry the same printed shape.
double bound_oscillatory(const WeightParams& T, WeightSide which);

// Exact lattice sum sum_{m,n} G_T(m,n) Kl_2(a m n; q) over the weight support.
std::complex<double> oscillatory_form(const WeightParams& T, u64 a, WeightSide which);

enum class CoeffFamily { random_sign, random_unit, all_ones, moebius, character };

// Deterministic coefficient window [lo, lo+len) for the given family; the RNG
// is consumed only by the random families.
std::vector<std::complex<double>> make_coefficients(CoeffFamily fam, long long lo,
                                                    long long len, u64 q,
                                                    std::mt19937_64& rng);

struct ScatterRow {
    int trial = 0;
    double norm_product = 0; // ||alpha||_2 ||beta||_2 sqrt(MN)
    double abs_form = 0;
    double bound_fkm = 0;
    double bound_kms = 0; // NaN when the template preconditions fail
};

// Repeated seeded draws of coefficient pairs on [M,2M] x [N,2N], the exact
// form value, and the two envelope templates.
std::vector<ScatterRow> cancellation_scatter(u64 q, u64 a, long long M, long long N,
                                             CoeffFamily fam, int trials, u64 seed,
                                             double eps = 0.01);

} // namespace klsum
