// Python bindings for the core operations: spectrum construction, the two
// finite-field transforms with their closed forms, the tempered dual-sum
// residual, bilinear forms, prime sums, the von Mangoldt decomposition, and
// the exact-rational exponent certification.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "klsum/bilinear.hpp"
#include "klsum/errors.hpp"
#include "klsum/exponents.hpp"
#include "klsum/ffarith.hpp"
#include "klsum/io.hpp"
#include "klsum/kloosterman.hpp"
#include "klsum/primes.hpp"
#include "klsum/rat.hpp"
#include "klsum/transforms.hpp"

namespace py = pybind11;
using klsum::u64;
using cvec = std::vector<std::complex<double>>;

namespace {

klsum::PeriodicFn to_fn(u64 q, const cvec& values) {
    if (values.size() != q)
        throw klsum::usage_error("values must have length q");
    klsum::PeriodicFn K;
    K.q = q;
    K.values = values;
    return K;
}

} // namespace

PYBIND11_MODULE(_klsum, mod) {
    mod.doc() = "Kloosterman-sum spectra, transforms, prime sums, and exponent "
                "certification";

    mod.def("version", [] { return std::string(klsum::version_string()); });

    // --- finite-field arithmetic -------------------------------------------
    mod.def("is_prime", [](u64 n) { return klsum::is_prime(n); }, py::arg("n"));
    mod.def("primitive_root", [](u64 q) { return klsum::primitive_root(q); },
            py::arg("q"));

    // --- Kloosterman sums ---------------------------------------------------
    mod.def(
        "kl_point",
        [](int m, std::int64_t n, u64 q) { return klsum::kl_point(m, n, q); },
        py::arg("m"), py::arg("n"), py::arg("q"),
        "Single normalized hyper-Kloosterman value by direct enumeration");
    mod.def("kl_at_zero", &klsum::kl_at_zero, py::arg("m"), py::arg("q"));
    mod.def(
        "kl_spectrum",
        [](int m, u64 q) {
            klsum::FieldCtx ctx(q);
            return klsum::kl_spectrum(m, ctx).values; // index i holds n = i+1
        },
        py::arg("m"), py::arg("q"),
        "All values Kl_m(n;q), n = 1..q-1, as a list (index n-1)");

    // --- transforms ---------------------------------------------------------
    mod.def(
        "fourier_hat",
        [](u64 q, const cvec& values) { return klsum::fourier_hat(to_fn(q, values)).values; },
        py::arg("q"), py::arg("values"));
    mod.def(
        "voronoi_check",
        [](u64 q, const cvec& values) {
            return klsum::voronoi_check_kernel(to_fn(q, values)).values;
        },
        py::arg("q"), py::arg("values"));
    mod.def("hat_closed_form", &klsum::hat_closed_form, py::arg("q"), py::arg("a"),
            py::arg("h"));
    mod.def("voronoi_closed_form", &klsum::voronoi_closed_form, py::arg("q"),
            py::arg("a"), py::arg("n"));
    mod.def(
        "kloosterman_periodic",
        [](u64 q, u64 a, int m) {
            klsum::FieldCtx ctx(q);
            return klsum::kloosterman_periodic(ctx, a, m).values;
        },
        py::arg("q"), py::arg("a"), py::arg("m") = 2,
        "K(n) = Kl_m(an;q) on residues 0..q-1 (index 0 carries the moment value)");
    mod.def(
        "voronoi_residual",
        [](u64 q, u64 a, double c, double M, double N, const std::string& kernel) {
            klsum::FieldCtx ctx(q);
            klsum::PeriodicFn K;
            if (kernel == "kl2") {
                K = klsum::kloosterman_periodic(ctx, a, 2);
            } else if (kernel == "ones") {
                K.q = q;
                K.values.assign(q, std::complex<double>(1, 0));
            } else {
                throw klsum::usage_error("kernel must be 'kl2' or 'ones'");
            }
            klsum::WeightParams T;
            T.c = c;
            T.q = double(q);
            T.M = M;
            T.N = N;
            klsum::VoronoiResult r = klsum::tempered_voronoi_residual(K, T);
            py::dict d;
            d["lhs"] = r.lhs;
            d["rhs"] = r.rhs;
            d["main_term"] = r.main_term;
            d["dual_term"] = r.dual_term;
            d["residual"] = r.residual;
            d["lattice_points"] = r.diag.lattice_points;
            return d;
        },
        py::arg("q"), py::arg("a"), py::arg("c"), py::arg("M"), py::arg("N"),
        py::arg("kernel") = "kl2",
        "Two-sided residual of the tempered dual-sum identity");

    // --- bilinear forms -----------------------------------------------------
    mod.def(
        "eval_bilinear",
        [](u64 q, u64 a, long long m_lo, const cvec& alpha, long long n_lo,
           const cvec& beta, bool naive) {
            klsum::BilinearSpec spec;
            spec.q = q;
            spec.a = a;
            spec.m_lo = m_lo;
            spec.alpha = alpha;
            spec.n_lo = n_lo;
            spec.beta = beta;
            return naive ? klsum::eval_form_naive(spec) : klsum::eval_form(spec);
        },
        py::arg("q"), py::arg("a"), py::arg("m_lo"), py::arg("alpha"), py::arg("n_lo"),
        py::arg("beta"), py::arg("naive") = false,
        "sum_{m,n} alpha_m beta_n Kl_2(a m n; q)");

    // --- prime sums ---------------------------------------------------------
    mod.def(
        "prime_sum",
        [](u64 q, double X, u64 u, u64 v) {
            klsum::FieldCtx ctx(q);
            klsum::Spectrum kl = klsum::kl_spectrum(2, ctx);
            u64 limit = u64(X) + 2;
            if (limit < 1000) limit = 1000;
            klsum::SieveTables tables(limit);
            klsum::PrimeApReport r =
                klsum::prime_ap_kloosterman_sum(X, ctx, u, v, kl, tables);
            py::dict d;
            d["sum"] = r.sum;
            d["count"] = r.count;
            d["trivial_bound"] = r.trivial_bound;
            d["envelope_main"] = r.envelope_main;
            d["envelope_bfkpm"] = r.envelope_bfkpm;
            d["ratio_trivial"] = r.ratio_trivial;
            d["ratio_main"] = r.ratio_main;
            d["ratio_bfkpm"] = r.ratio_bfkpm;
            return d;
        },
        py::arg("q"), py::arg("X"), py::arg("u") = 1, py::arg("v") = 1,
        "sum over primes p <= X, p = u (mod v), of log(p) Kl_2(p;q)");
    mod.def(
        "heath_brown_error",
        [](double X, int J, long long cap) {
            klsum::SieveTables tables(u64(cap) + 2);
            klsum::HeathBrown hb = klsum::heath_brown_decompose(X, J, tables, cap);
            double worst = 0;
            for (u64 n = 1; n <= u64(cap); ++n)
                worst = std::max(worst, std::abs(hb.reconstruct(n) - tables.mangoldt[n]));
            return worst;
        },
        py::arg("X"), py::arg("J"), py::arg("cap") = 2000,
        "max |reconstructed - mangoldt| over n <= cap");

    // --- exact-rational exponents (all rationals as strings 'p/q') ----------
    mod.def(
        "beta_range",
        [](const std::string& x, const std::string& kappa, const std::string& theta,
           const std::string& eps) {
            klsum::BetaRange r =
                klsum::beta_range(klsum::Rat::parse(x), klsum::Rat::parse(kappa),
                                  klsum::Rat::parse(theta), klsum::Rat::parse(eps));
            py::dict d;
            d["lo"] = r.lo.str();
            d["hi"] = r.hi.str();
            d["feasible"] = r.feasible;
            return d;
        },
        py::arg("x"), py::arg("kappa"), py::arg("theta"), py::arg("eps"));
    mod.def(
        "certify",
        [](const std::string& x, const std::string& kappa, const std::string& theta,
           const std::string& eps, int J, long resolution, long random_points,
           std::uint64_t seed) {
            klsum::CertifyConfig cfg;
            cfg.resolution = resolution;
            cfg.random_points = random_points;
            cfg.seed = seed;
            klsum::CertifyReport r =
                klsum::certify_total(klsum::Rat::parse(x), klsum::Rat::parse(kappa),
                                     klsum::Rat::parse(theta), klsum::Rat::parse(eps), J,
                                     cfg);
            py::dict d;
            d["points"] = r.points;
            d["case_a"] = r.case_a;
            d["case_b"] = r.case_b;
            d["case_c"] = r.case_c;
            d["violations"] = r.violations;
            d["violation_samples"] = r.violation_samples;
            d["beta"] = r.beta.str();
            d["target"] = r.target.str();
            d["worst_margin"] = r.worst_margin_set ? py::object(py::str(r.worst_margin.str()))
                                                   : py::object(py::none());
            return d;
        },
        py::arg("x"), py::arg("kappa"), py::arg("theta") = "0", py::arg("eps") = "1/100",
        py::arg("J") = 10, py::arg("resolution") = 2520, py::arg("random_points") = 100000,
        py::arg("seed") = 1,
        "Exact case-split certification; returns counts and rationals as strings");
    mod.def(
        "balance",
        [](const std::string& x) {
            klsum::BalanceResult b = klsum::balance_final(klsum::Rat::parse(x));
            py::dict d;
            d["kappa_star"] = b.kappa_star.str();
            d["exponent"] = b.exponent.str();
            d["dominated"] = b.dominated;
            d["q_threshold"] = b.q_threshold ? py::object(py::str(*b.q_threshold))
                                             : py::object(py::none());
            return d;
        },
        py::arg("x"), "Balanced final exponent at sum length q^x, 11/12 <= x <= 1");
    mod.def("envelope_crossing", [] {
        klsum::CrossingInfo c = klsum::envelope_crossing();
        py::dict d;
        d["x_coeff"] = c.x_coeff.str();
        d["q_coeff"] = c.q_coeff.str();
        d["boundary"] = c.boundary.str();
        return d;
    });
}
