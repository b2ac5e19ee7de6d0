#include "klsum/bilinear.hpp"

#include <cmath>
#include <memory>

#include "klsum/errors.hpp"

namespace klsum {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

double mu_trial_division(long long n) {
    if (n < 1)
        return 0;
    int factors = 0;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0)
                return 0; // squarefull
            ++factors;
        }
    }
    if (n > 1)
        ++factors;
    return (factors % 2 == 0) ? 1.0 : -1.0;
}

void check_spec(const BilinearSpec& s) {
    if (!is_prime(s.q))
        throw usage_error("bilinear form needs a prime modulus");
    if (s.a % s.q == 0)
        throw domain_error("bilinear form needs a coprime to q");
    if (s.alpha.empty() || s.beta.empty())
        throw usage_error("bilinear form needs nonempty coefficient windows");
    if (s.m_lo < 1 || s.n_lo < 1)
        throw usage_error("coefficient windows must start at a positive index");
}

std::complex<double> eval_with(const BilinearSpec& s, const Spectrum& kl) {
    const u64 q = s.q;
    std::unique_ptr<Bump> W;
    double X = 1;
    if (s.smoothing) {
        W = std::make_unique<Bump>(make_bump(s.smoothing->spec));
        X = s.smoothing->X;
        if (!(X > 0))
            throw usage_error("smoothing scale must be positive");
    }
    std::complex<double> acc{0, 0};
    for (std::size_t i = 0; i < s.alpha.size(); ++i) {
        if (s.alpha[i] == std::complex<double>{0, 0})
            continue;
        const long long m = s.m_lo + (long long)i;
        const u64 am = mul_mod(s.a % q, u64(m % (long long)q), q);
        std::complex<double> row{0, 0};
        for (std::size_t j = 0; j < s.beta.size(); ++j) {
            if (s.beta[j] == std::complex<double>{0, 0})
                continue;
            const long long n = s.n_lo + (long long)j;
            const u64 r = mul_mod(am, u64(n % (long long)q), q);
            if (r == 0)
                continue; // q | mn: outside the coprime convention
            double w = 1;
            if (W) {
                w = (*W)(double(m) * double(n) / X);
                if (w == 0)
                    continue;
            }
            row += s.beta[j] * (kl.at(r) * w);
        }
        acc += s.alpha[i] * row;
    }
    return acc;
}

} // namespace

double norm2(const std::vector<std::complex<double>>& v) {
    double s = 0;
    for (const auto& z : v)
        s += std::norm(z);
    return std::sqrt(s);
}

double norm1(const std::vector<std::complex<double>>& v) {
    double s = 0;
    for (const auto& z : v)
        s += std::abs(z);
    return s;
}

std::complex<double> eval_form(const BilinearSpec& spec) {
    check_spec(spec);
    FieldCtx ctx(spec.q);
    Spectrum kl = kl_spectrum(2, ctx);
    return eval_with(spec, kl);
}

std::complex<double> eval_form_naive(const BilinearSpec& spec) {
    check_spec(spec);
    const u64 q = spec.q;
    std::unique_ptr<Bump> W;
    double X = 1;
    if (spec.smoothing) {
        W = std::make_unique<Bump>(make_bump(spec.smoothing->spec));
        X = spec.smoothing->X;
    }
    std::complex<double> acc{0, 0};
    for (std::size_t i = 0; i < spec.alpha.size(); ++i) {
        const long long m = spec.m_lo + (long long)i;
        for (std::size_t j = 0; j < spec.beta.size(); ++j) {
            const long long n = spec.n_lo + (long long)j;
            const u64 r = mul_mod(mul_mod(spec.a % q, u64(m % (long long)q), q),
                                  u64(n % (long long)q), q);
            if (r == 0)
                continue;
            double w = W ? (*W)(double(m) * double(n) / X) : 1.0;
            if (w == 0)
                continue;
            acc += spec.alpha[i] * spec.beta[j] * kl_point(2, std::int64_t(r), q) * w;
        }
    }
    return acc;
}

double bound_fkm(double M, double N, double Q, double q, double eps, double norm_a,
                 double norm_b) {
    if (!(M >= 1) || !(N >= 1) || !(M <= q) || !(N <= q))
        throw usage_error("bound template needs 1 <= M, N <= q");
    if (!(Q >= 1))
        throw usage_error("bound template needs Q >= 1");
    (void)eps;
    return norm_a * norm_b * std::sqrt(M * N) *
           std::sqrt(1.0 / M + Q * std::pow(q, 0.5 + eps) / N);
}

double bound_fkm_transposed(double M, double N, double Q, double q, double eps,
                            double norm_a, double norm_b) {
    return bound_fkm(N, M, Q, q, eps, norm_b, norm_a);
}

double bound_kms(double M, double N, double q, double eps, double norm_a, double norm_b,
                 std::optional<double> smooth_Q) {
    if (!(M >= 1))
        throw range_error("bound precondition failed: 1 <= M");
    if (!(M <= std::pow(q, 0.25) * N))
        throw range_error("bound precondition failed: M <= q^{1/4} N");
    if (!(M * N > std::pow(q, 0.25)))
        throw range_error("bound precondition failed: q^{1/4} < MN");
    if (!(M * N < std::pow(q, 1.25)))
        throw range_error("bound precondition failed: MN < q^{5/4}");
    double v = std::pow(q, eps) * norm_a * norm_b * std::sqrt(M * N) *
               (1.0 / std::sqrt(M) + std::pow(M * N, -3.0 / 16) * std::pow(q, 11.0 / 64));
    if (smooth_Q) {
        double s = std::pow(q, eps) * *smooth_Q;
        v *= s * s;
    }
    return v;
}

double bound_oscillatory(const WeightParams& T, WeightSide which) {
    (void)which; // both weight sides share the printed shape
    if (!in_T2(T))
        throw range_error("oscillatory bound needs parameters in the restricted tier");
    double s = T.sharpness();
    return s * s * T.M * std::sqrt(T.q) *
           (1.0 + std::pow(T.Q, 4) / (T.c * T.M * T.M * T.N));
}

std::complex<double> oscillatory_form(const WeightParams& T, u64 a, WeightSide which) {
    if (!in_T2(T))
        throw range_error("oscillatory form needs parameters in the restricted tier");
    Weight2D G = (which == WeightSide::G) ? g_weight(T) : h_weight(T);
    const u64 q = u64(T.q);
    if (!is_prime(q))
        throw usage_error("oscillatory form needs a prime modulus");
    if (a % q == 0)
        throw domain_error("oscillatory form needs a coprime to q");
    if (G.zero)
        return {0, 0};
    const long long m_lo = (long long)std::ceil(G.u_lo - 1e-12);
    const long long m_hi = (long long)std::floor(G.u_hi + 1e-12);
    const long long n_lo = (long long)std::ceil(G.v_lo - 1e-12);
    const long long n_hi = (long long)std::floor(G.v_hi + 1e-12);
    if (m_hi < m_lo || n_hi < n_lo)
        return {0, 0};
    const long long points = (m_hi - m_lo + 1) * (n_hi - n_lo + 1);
    if (points > 1000000)
        throw resource_error("oscillatory form lattice exceeds 10^6 points");
    FieldCtx ctx(q);
    Spectrum kl = kl_spectrum(2, ctx);
    std::complex<double> acc{0, 0};
    for (long long m = m_lo; m <= m_hi; ++m) {
        const u64 am = mul_mod(a % q, u64(m % (long long)q), q);
        std::complex<double> row{0, 0};
        for (long long n = n_lo; n <= n_hi; ++n) {
            const u64 r = mul_mod(am, u64(n % (long long)q), q);
            if (r == 0)
                continue;
            row += G(double(m), double(n)) * kl.at(r);
        }
        acc += row;
    }
    return acc;
}

std::vector<std::complex<double>> make_coefficients(CoeffFamily fam, long long lo,
                                                    long long len, u64 q,
                                                    std::mt19937_64& rng) {
    if (len < 1)
        throw usage_error("coefficient window must be nonempty");
    std::vector<std::complex<double>> out(static_cast<std::size_t>(len));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (fam) {
    case CoeffFamily::random_sign:
        for (auto& z : out)
            z = (rng() & 1) ? 1.0 : -1.0;
        break;
    case CoeffFamily::random_unit:
        for (auto& z : out) {
            double t = kTau * unit(rng);
            z = {std::cos(t), std::sin(t)};
        }
        break;
    case CoeffFamily::all_ones:
        for (auto& z : out)
            z = 1.0;
        break;
    case CoeffFamily::moebius:
        for (long long i = 0; i < len; ++i)
            out[std::size_t(i)] = mu_trial_division(lo + i);
        break;
    case CoeffFamily::character: {
        if (!is_prime(q))
            throw usage_error("character family needs a prime modulus");
        Bump w = make_bump({BumpKind::fixed_support, 1.5, 0.5, 1.0});
        double span = double(2 * lo); // window [lo, 2 lo] mapped into [1, 2]
        for (long long i = 0; i < len; ++i) {
            long long n = lo + i;
            u64 r = u64(n % (long long)q);
            double chi = 0;
            if (r != 0) {
                u64 p = pow_mod(r, (q - 1) / 2, q);
                chi = (p == 1) ? 1.0 : -1.0;
            }
            out[std::size_t(i)] = chi * w(2.0 * double(n) / span);
        }
        break;
    }
    }
    return out;
}

std::vector<ScatterRow> cancellation_scatter(u64 q, u64 a, long long M, long long N,
                                             CoeffFamily fam, int trials, u64 seed,
                                             double eps) {
    if (trials < 1)
        throw usage_error("scatter needs at least one trial");
    if (M < 1 || N < 1)
        throw usage_error("scatter windows must be positive");
    if (!is_prime(q))
        throw usage_error("scatter needs a prime modulus");
    FieldCtx ctx(q);
    Spectrum kl = kl_spectrum(2, ctx);
    std::mt19937_64 rng(seed);
    std::vector<ScatterRow> rows;
    rows.reserve(std::size_t(trials));
    for (int t = 0; t < trials; ++t) {
        BilinearSpec spec;
        spec.q = q;
        spec.a = a;
        spec.m_lo = M;
        spec.alpha = make_coefficients(fam, M, M + 1, q, rng);
        spec.n_lo = N;
        spec.beta = make_coefficients(fam, N, N + 1, q, rng);
        check_spec(spec);
        std::complex<double> v = eval_with(spec, kl);
        ScatterRow row;
        row.trial = t;
        double na = norm2(spec.alpha), nb = norm2(spec.beta);
        row.norm_product = na * nb * std::sqrt(double(M) * double(N));
        row.abs_form = std::abs(v);
        row.bound_fkm = bound_fkm(double(M), double(N), 1.0, double(q), eps, na, nb);
        try {
            row.bound_kms = bound_kms(double(M), double(N), double(q), eps, na, nb);
        } catch (const range_error&) {
            row.bound_kms = std::nan("");
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace klsum
