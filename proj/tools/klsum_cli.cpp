// klsum: command-line front end for the Kloosterman-sum experiment library.
//
// Subcommands: spectrum, transform-check, voronoi-check, oscint-report,
// stationary-report, bilinear-sweep, prime-sum, hb-check, exponent-certify.
//
// Conventions shared by every subcommand:
//  - outputs are written atomically (temp file + rename);
//  - relative --out paths are joined with $KLSUM_OUT_DIR when it is set;
//  - every report embeds a config echo (including the seed) and the library
//    version; the timestamp field is suppressed by --no-timestamp so that
//    identical configs produce byte-identical files;
//  - CSV files are UTF-8 with LF line endings, a mandatory header row,
//    17-significant-digit doubles, and "#" comment lines for the config echo;
//  - errors print a single machine-parseable line to stderr:
//        error kind=<usage|domain|range|numerics|resource|internal> message="..."
//    exit codes: 0 ok, 1 numeric/contract failure, 2 usage.

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "klsum/bilinear.hpp"
#include "klsum/bumps.hpp"
#include "klsum/errors.hpp"
#include "klsum/exponents.hpp"
#include "klsum/ffarith.hpp"
#include "klsum/io.hpp"
#include "klsum/kloosterman.hpp"
#include "klsum/oscint.hpp"
#include "klsum/primes.hpp"
#include "klsum/rat.hpp"
#include "klsum/transforms.hpp"

using ordered_json = nlohmann::ordered_json;
using klsum::u64;
using cplx = std::complex<double>;

namespace {

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &t);
#else
    gmtime_r(&t, &tm);
#endif
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Relative paths are joined with $KLSUM_OUT_DIR; parent directories are created.
std::string resolve_out(const std::string& out) {
    namespace fs = std::filesystem;
    fs::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("KLSUM_OUT_DIR")) {
            if (*dir) p = fs::path(dir) / p;
        }
    }
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    return p.string();
}

void print_error(const char* kind, const std::string& msg) {
    std::string esc;
    for (char ch : msg) {
        if (ch == '"' || ch == '\\') esc += '\\';
        if (ch == '\n') {
            esc += "\\n";
            continue;
        }
        esc += ch;
    }
    std::cerr << "error kind=" << kind << " message=\"" << esc << "\"\n";
}

// Options shared by every subcommand.
struct Common {
    std::string out;
    bool no_timestamp = false;
    int threads = 1;
    u64 seed = 1;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
    c.out = default_out;
    sub->add_option("--out", c.out, "output path (relative paths join $KLSUM_OUT_DIR)")
        ->capture_default_str();
    sub->add_flag("--no-timestamp", c.no_timestamp, "omit the timestamp field");
    sub->add_option("--threads", c.threads,
                    "worker thread budget (recorded; results are deterministic)")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "PRNG seed; always recorded in the config echo")
        ->capture_default_str();
}

void append_common_config(ordered_json& config, const Common& c) {
    config["seed"] = c.seed;
    config["threads"] = c.threads;
    config["out"] = c.out;
}

std::string comment_block(const std::string& sub, const ordered_json& config,
                          const Common& c) {
    std::ostringstream os;
    os << "# subcommand = " << sub << "\n";
    for (auto it = config.begin(); it != config.end(); ++it) {
        os << "# " << it.key() << " = "
           << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
    }
    os << "# version = " << klsum::version_string() << "\n";
    if (!c.no_timestamp) os << "# timestamp = " << iso_now() << "\n";
    return os.str();
}

int write_json_report(const std::string& sub, const ordered_json& config,
                      const Common& c, ordered_json results,
                      const std::string& out_override = "") {
    ordered_json j;
    j["subcommand"] = sub;
    j["config"] = config;
    j["version"] = klsum::version_string();
    if (!c.no_timestamp) j["timestamp"] = iso_now();
    j["results"] = std::move(results);
    std::string path = resolve_out(out_override.empty() ? c.out : out_override);
    klsum::atomic_write_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
    return 0;
}

int write_csv_report(const std::string& sub, const ordered_json& config,
                     const Common& c, const std::string& header,
                     const std::vector<std::string>& rows,
                     const std::string& out_override = "") {
    std::ostringstream os;
    os << comment_block(sub, config, c);
    os << header << "\n";
    for (const auto& r : rows) os << r << "\n";
    std::string path = resolve_out(out_override.empty() ? c.out : out_override);
    klsum::atomic_write_file(path, os.str());
    std::cout << "wrote " << path << "\n";
    return 0;
}

ordered_json jcplx(cplx z) { return ordered_json{{"re", z.real()}, {"im", z.imag()}}; }

double wrap_angle(double x) {
    const double pi = 3.14159265358979323846;
    while (x > pi) x -= 2 * pi;
    while (x < -pi) x += 2 * pi;
    return x;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumCmd {
    Common c;
    u64 q = 0;
    int m = 2;
    std::string format; // "", "csv", "binary"

    int run() const {
        if (m < 1 || m > 16) throw klsum::usage_error("spectrum order m must be in [1, 16]");
        klsum::FieldCtx ctx(q);
        klsum::Spectrum s = klsum::kl_spectrum(m, ctx);

        ordered_json config{{"q", q}, {"m", m}};
        config["format"] = format.empty() ? std::string("auto") : format;
        append_common_config(config, c);

        bool binary = format == "binary";
        if (format.empty()) {
            std::string o = c.out;
            binary = o.size() >= 4 && (o.ends_with(".bin") || o.ends_with(".dat"));
        }

        std::ostringstream body;
        if (binary) {
            klsum::write_spectrum_binary(s, body);
        } else {
            body << comment_block("spectrum", config, c);
            klsum::write_spectrum_csv(s, body);
        }
        std::string path = resolve_out(c.out);
        klsum::atomic_write_file(path, body.str());
        std::cout << "wrote " << path << "\n";

        // Moment-check summary (CSV): name,value,expected,abs_error,pass
        cplx fm = klsum::kl_first_moment(s);
        double fm_expected = ((m % 2) ? -1.0 : 1.0) * std::pow(double(q), -(m - 1) / 2.0);
        double weil = 0;
        for (const auto& z : s.values) weil = std::max(weil, std::abs(z));

        std::vector<std::string> rows;
        auto row = [&rows](const std::string& name, double value, double expected,
                           double abs_error, bool pass) {
            rows.push_back(name + "," + klsum::fmt17(value) + "," + klsum::fmt17(expected) +
                           "," + klsum::fmt17(abs_error) + "," + (pass ? "1" : "0"));
        };
        double fm_err = std::abs(fm - cplx(fm_expected, 0.0));
        row("first_moment_re", fm.real(), fm_expected, fm_err, fm_err <= 1e-6 * (1 + std::abs(fm_expected)));
        row("first_moment_im", fm.imag(), 0.0, std::abs(fm.imag()), std::abs(fm.imag()) <= 1e-6);
        if (m == 2) {
            double sm = klsum::kl_second_moment(s);
            double sm_expected = double(q) - 1.0 - 1.0 / double(q);
            double sm_err = std::abs(sm - sm_expected);
            row("second_moment", sm, sm_expected, sm_err, sm_err <= 1e-6 * sm_expected);
        }
        row("max_abs", weil, double(m), std::max(0.0, weil - double(m)),
            weil <= double(m) + 1e-9);

        return write_csv_report("spectrum", config, c, "check,value,expected,abs_error,pass",
                                rows, c.out + ".summary.csv");
    }
};

// ---------------------------------------------------------------------------
// transform-check
// ---------------------------------------------------------------------------

struct TransformCheckCmd {
    Common c;
    u64 q = 0;
    u64 a = 1;
    bool force_oracle = false;

    int run() const {
        klsum::FieldCtx ctx(q);
        klsum::PeriodicFn K = klsum::kloosterman_periodic(ctx, a, 2);
        klsum::PeriodicFn hat = klsum::fourier_hat(K);
        klsum::PeriodicFn check = klsum::voronoi_check_kernel(K);

        double max_hat = 0, max_check = 0;
        for (u64 h = 0; h < q; ++h)
            max_hat = std::max(max_hat, std::abs(hat.values[h] - klsum::hat_closed_form(q, a, h)));
        for (u64 n = 0; n < q; ++n)
            max_check = std::max(max_check,
                                 std::abs(check.values[n] - cplx(klsum::voronoi_closed_form(q, a, n), 0)));

        double parseval_in = 0, parseval_out = 0;
        for (const auto& z : K.values) parseval_in += std::norm(z);
        for (const auto& z : hat.values) parseval_out += std::norm(z);

        bool oracle = force_oracle || q <= 5000;
        double max_hat_direct = -1, max_check_direct = -1;
        if (oracle) {
            klsum::PeriodicFn hat_d = klsum::fourier_hat_direct(K);
            klsum::PeriodicFn check_d = klsum::voronoi_check_kernel_direct(K);
            max_hat_direct = max_check_direct = 0;
            for (u64 i = 0; i < q; ++i) {
                max_hat_direct = std::max(max_hat_direct, std::abs(hat.values[i] - hat_d.values[i]));
                max_check_direct =
                    std::max(max_check_direct, std::abs(check.values[i] - check_d.values[i]));
            }
        }

        ordered_json config{{"q", q}, {"a", a}, {"oracle", force_oracle}};
        append_common_config(config, c);
        ordered_json results;
        results["max_hat_error"] = max_hat;
        results["max_check_error"] = max_check;
        results["parseval_error"] = std::abs(parseval_in - parseval_out);
        results["hat_at_zero"] = jcplx(hat.values[0]);
        results["oracle"] = ordered_json{{"enabled", oracle},
                                         {"max_hat_direct_error", max_hat_direct},
                                         {"max_check_direct_error", max_check_direct}};
        results["pass"] = max_hat <= 1e-9 && max_check <= 1e-9;
        return write_json_report("transform-check", config, c, std::move(results));
    }
};

// ---------------------------------------------------------------------------
// voronoi-check
// ---------------------------------------------------------------------------

struct VoronoiCheckCmd {
    Common c;
    u64 q = 0;
    u64 a = 1;
    std::string kernel = "kl2";
    double M = 0, N = 0, cc = 0, Q = 1, eps = 0.01, tol = 1e-6;
    long long trunc_m = 0, trunc_n = 0;
    int samples_pow2 = 0;
    double env_delta = 0;

    int run() const {
        klsum::FieldCtx ctx(q);
        klsum::PeriodicFn K;
        if (kernel == "kl2") {
            K = klsum::kloosterman_periodic(ctx, a, 2);
        } else if (kernel == "ones") {
            K.q = q;
            K.values.assign(q, cplx(1, 0));
        } else {
            throw klsum::usage_error("kernel must be one of: kl2, ones");
        }
        klsum::WeightParams T;
        T.c = cc;
        T.q = double(q);
        T.M = M;
        T.N = N;
        T.Q = Q;
        T.eps = eps;
        klsum::VoronoiConfig cfg;
        cfg.tol = tol;
        cfg.trunc_m = trunc_m;
        cfg.trunc_n = trunc_n;
        cfg.samples_pow2 = samples_pow2;
        cfg.env_delta = env_delta;
        klsum::VoronoiResult r = klsum::tempered_voronoi_residual(K, T, cfg);

        ordered_json config{{"q", q},     {"a", a},     {"kernel", kernel}, {"M", M},
                            {"N", N},     {"c", cc},    {"Q", Q},           {"eps", eps},
                            {"tol", tol}, {"trunc_m", trunc_m}, {"trunc_n", trunc_n},
                            {"samples_pow2", samples_pow2}, {"env_delta", env_delta}};
        append_common_config(config, c);

        ordered_json diag;
        diag["trunc_m"] = r.diag.trunc_m;
        diag["trunc_n"] = r.diag.trunc_n;
        diag["samples_u"] = r.diag.samples_u;
        diag["samples_v"] = r.diag.samples_v;
        diag["env_cut_delta"] = r.diag.env_cut_delta;
        diag["tail_strip_m"] = r.diag.tail_strip_m;
        diag["tail_strip_n"] = r.diag.tail_strip_n;
        diag["tail_corner"] = r.diag.tail_corner;
        diag["alias_bound"] = r.diag.alias_bound;
        diag["printed_tail_partial"] = r.diag.printed_tail_partial;
        diag["lattice_sum_ghat"] = r.diag.lattice_sum_ghat;
        diag["lattice_points"] = r.diag.lattice_points;
        diag["max_kernel"] = r.diag.max_kernel;
        diag["sum_G"] = jcplx(r.diag.sum_G);

        ordered_json results;
        results["lhs"] = jcplx(r.lhs);
        results["rhs"] = jcplx(r.rhs);
        results["main_term"] = jcplx(r.main_term);
        results["dual_term"] = jcplx(r.dual_term);
        results["residual"] = r.residual;
        results["pass"] = r.residual <= tol;
        results["diagnostics"] = std::move(diag);
        return write_json_report("voronoi-check", config, c, std::move(results));
    }
};

// ---------------------------------------------------------------------------
// oscint-report
// ---------------------------------------------------------------------------

std::vector<std::pair<long long, long long>> sample_region_grid(const klsum::WeightParams& T,
                                                                int count, u64 seed) {
    klsum::StationaryBox box = klsum::stationary_box(T);
    double em = std::max(box.m_hi, 10.0);
    double en = std::max(box.n_hi, 10.0);
    long long wm = static_cast<long long>(1.6 * em) + 40;
    long long wn = static_cast<long long>(1.6 * en) + 40;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> dm(-wm, wm), dn(-wn, wn);

    using klsum::Region;
    std::map<Region, int> want;
    want[Region::band] = count / 4;
    want[Region::far_m] = count / 4;
    want[Region::far_n] = count / 4;
    want[Region::far_both] = count - 3 * (count / 4);
    int stationary_notes = 3;

    std::vector<std::pair<long long, long long>> grid;
    std::set<std::pair<long long, long long>> seen;
    long long attempts = 0, max_attempts = 500LL * std::max(count, 1);
    while (attempts++ < max_attempts) {
        bool done = stationary_notes <= 0;
        for (const auto& [r, k] : want)
            if (k > 0) done = false;
        if (done) break;
        std::pair<long long, long long> p{dm(rng), dn(rng)};
        if (!seen.insert(p).second) continue;
        Region r = klsum::classify_region(T, double(p.first), double(p.second));
        if (r == Region::stationary) {
            if (stationary_notes > 0) {
                grid.push_back(p);
                --stationary_notes;
            }
            continue;
        }
        auto it = want.find(r);
        if (it != want.end() && it->second > 0) {
            grid.push_back(p);
            --it->second;
        }
    }
    return grid;
}

struct OscintReportCmd {
    Common c;
    u64 q = 0;
    double cc = 0, M = 0, N = 0, Q = 1, eps = 0.01, U = 0;
    bool use_h = false;
    int count = 80;

    int run() const {
        klsum::WeightParams T;
        T.c = cc;
        T.q = double(q);
        T.M = M;
        T.N = N;
        T.Q = Q;
        T.eps = eps;
        if (use_h) T.U = (U > 0) ? U : M * N;
        if (!klsum::in_T2(T))
            throw klsum::range_error(
                "weight parameters outside the restricted admissible family "
                "(need c*M*N >= sharpness^2, 1/2 <= M <= N <= q, M*N <= q, c*N >= 6)");
        if (use_h && !klsum::h_window_nonzero(T))
            throw klsum::range_error("product window U outside (M*N/8, 8*M*N)");

        auto grid = sample_region_grid(T, count, c.seed);
        auto rows = klsum::nonstationary_report(T, grid, use_h);

        ordered_json config{{"q", q}, {"c", cc}, {"M", M}, {"N", N},
                            {"Q", Q}, {"eps", eps}, {"use_h", use_h},
                            {"U", use_h ? (U > 0 ? U : M * N) : 0.0}, {"count", count}};
        append_common_config(config, c);

        std::vector<std::string> lines;
        double max_ratio = 0;
        for (const auto& r : rows) {
            max_ratio = std::max(max_ratio, r.ratio);
            lines.push_back(std::to_string(r.m) + "," + std::to_string(r.n) + "," +
                            klsum::fmt17(r.value.real()) + "," + klsum::fmt17(r.value.imag()) +
                            "," + klsum::fmt17(r.bound) + "," + klsum::fmt17(r.ratio) + "," +
                            klsum::region_name(r.region));
        }
        int rc = write_csv_report("oscint-report", config, c, "m,n,re,im,bound,ratio,region",
                                  lines);
        ordered_json results;
        results["points"] = static_cast<long long>(rows.size());
        results["max_ratio"] = max_ratio;
        results["pass"] = max_ratio <= 10.0;
        rc |= write_json_report("oscint-report", config, c, std::move(results),
                                c.out + ".summary.json");
        return rc;
    }
};

// ---------------------------------------------------------------------------
// stationary-report
// ---------------------------------------------------------------------------

struct StationaryReportCmd {
    Common c;
    u64 q = 0;
    double cc = 0, M = 0, N = 0, Q = 1, eps = 0.01, U = 0;
    bool use_h = false;
    int n_rows = 5;
    int per_row = 40;

    int run() const {
        klsum::WeightParams T;
        T.c = cc;
        T.q = double(q);
        T.M = M;
        T.N = N;
        T.Q = Q;
        T.eps = eps;
        if (use_h) T.U = (U > 0) ? U : M * N;
        if (!klsum::in_T2(T))
            throw klsum::range_error(
                "weight parameters outside the restricted admissible family "
                "(need c*M*N >= sharpness^2, 1/2 <= M <= N <= q, M*N <= q, c*N >= 6)");

        klsum::StationaryBox box = klsum::stationary_box(T);
        long long m_lo = static_cast<long long>(std::ceil(box.m_lo));
        long long m_hi = static_cast<long long>(std::floor(box.m_hi));
        long long n_lo = static_cast<long long>(std::ceil(box.n_lo));
        long long n_hi = static_cast<long long>(std::floor(box.n_hi));
        if (m_lo > m_hi || n_lo > n_hi)
            throw klsum::range_error("stationary box contains no integer frequency pairs");

        long long width = m_hi - m_lo + 1;
        long long run = std::min<long long>(per_row, width);
        long long m_start = m_lo + (width - run) / 2;
        int nrows = static_cast<int>(std::min<long long>(n_rows, n_hi - n_lo + 1));

        std::vector<std::pair<long long, long long>> grid;
        std::vector<long long> nvals;
        for (int i = 0; i < nrows; ++i) {
            long long n = (nrows == 1) ? (n_lo + n_hi) / 2
                                       : n_lo + (n_hi - n_lo) * i / (nrows - 1);
            nvals.push_back(n);
            for (long long k = 0; k < run; ++k) grid.emplace_back(m_start + k, n);
        }
        auto rows = klsum::stationary_extract(T, grid, use_h);

        ordered_json config{{"q", q}, {"c", cc}, {"M", M}, {"N", N},
                            {"Q", Q}, {"eps", eps}, {"use_h", use_h},
                            {"U", use_h ? (U > 0 ? U : M * N) : 0.0},
                            {"rows", nrows}, {"per_row", run}};
        append_common_config(config, c);

        std::vector<std::string> lines;
        for (const auto& r : rows)
            lines.push_back(std::to_string(r.m) + "," + std::to_string(r.n) + "," +
                            klsum::fmt17(r.raw.real()) + "," + klsum::fmt17(r.raw.imag()) + "," +
                            klsum::fmt17(r.corrected.real()) + "," +
                            klsum::fmt17(r.corrected.imag()));
        int rc = write_csv_report("stationary-report", config, c,
                                  "m,n,raw_re,raw_im,corr_re,corr_im", lines);

        // Per-row summary: neighbor drift of the corrected phase, total raw rotation.
        double scale = 0;
        for (const auto& r : rows) scale = std::max(scale, std::abs(r.corrected));
        double max_drift = 0, min_rotation = -1;
        ordered_json row_stats = ordered_json::array();
        for (int i = 0; i < nrows; ++i) {
            double drift = 0, rotation = 0;
            for (long long k = 1; k < run; ++k) {
                const auto& prev = rows[size_t(i) * run + k - 1];
                const auto& cur = rows[size_t(i) * run + k];
                if (std::abs(prev.corrected) > 1e-9 * scale &&
                    std::abs(cur.corrected) > 1e-9 * scale)
                    drift = std::max(drift, std::abs(wrap_angle(std::arg(cur.corrected) -
                                                                std::arg(prev.corrected))));
                rotation += std::abs(wrap_angle(std::arg(cur.raw) - std::arg(prev.raw)));
            }
            max_drift = std::max(max_drift, drift);
            if (min_rotation < 0 || rotation < min_rotation) min_rotation = rotation;
            row_stats.push_back(ordered_json{{"n", nvals[i]},
                                             {"max_neighbor_drift_rad", drift},
                                             {"raw_rotation_rad", rotation}});
        }
        ordered_json results;
        results["box"] = ordered_json{{"m_lo", box.m_lo}, {"m_hi", box.m_hi},
                                      {"n_lo", box.n_lo}, {"n_hi", box.n_hi}};
        results["max_neighbor_drift_rad"] = max_drift;
        results["min_row_raw_rotation_rad"] = min_rotation < 0 ? 0.0 : min_rotation;
        results["rows"] = std::move(row_stats);
        rc |= write_json_report("stationary-report", config, c, std::move(results),
                                c.out + ".summary.json");
        return rc;
    }
};

// ---------------------------------------------------------------------------
// bilinear-sweep
// ---------------------------------------------------------------------------

struct BilinearSweepCmd {
    Common c;
    u64 q = 0;
    u64 a = 1;
    long long M = 0, N = 0;
    std::string family = "random_sign";
    int trials = 16;
    double eps = 0.01;

    int run() const {
        klsum::CoeffFamily fam;
        if (family == "random_sign") fam = klsum::CoeffFamily::random_sign;
        else if (family == "random_unit") fam = klsum::CoeffFamily::random_unit;
        else if (family == "all_ones") fam = klsum::CoeffFamily::all_ones;
        else if (family == "moebius") fam = klsum::CoeffFamily::moebius;
        else if (family == "character") fam = klsum::CoeffFamily::character;
        else
            throw klsum::usage_error(
                "family must be one of: random_sign, random_unit, all_ones, moebius, character");

        auto rows = klsum::cancellation_scatter(q, a, M, N, fam, trials, c.seed, eps);

        ordered_json config{{"q", q}, {"a", a}, {"M", M}, {"N", N},
                            {"family", family}, {"trials", trials}, {"eps", eps}};
        append_common_config(config, c);

        std::vector<std::string> lines;
        double max_fkm = 0, max_kms = 0;
        for (const auto& r : rows) {
            if (r.bound_fkm > 0) max_fkm = std::max(max_fkm, r.abs_form / r.bound_fkm);
            if (std::isfinite(r.bound_kms) && r.bound_kms > 0)
                max_kms = std::max(max_kms, r.abs_form / r.bound_kms);
            lines.push_back(std::to_string(r.trial) + "," + klsum::fmt17(r.norm_product) + "," +
                            klsum::fmt17(r.abs_form) + "," + klsum::fmt17(r.bound_fkm) + "," +
                            klsum::fmt17(r.bound_kms));
        }
        int rc = write_csv_report("bilinear-sweep", config, c,
                                  "trial,norm_product,abs_form,bound_fkm,bound_kms", lines);
        ordered_json results;
        results["trials"] = static_cast<long long>(rows.size());
        results["max_ratio_fkm"] = max_fkm;
        results["max_ratio_kms"] = max_kms;
        results["pass"] = max_fkm <= 10.0;
        rc |= write_json_report("bilinear-sweep", config, c, std::move(results),
                                c.out + ".summary.json");
        return rc;
    }
};

// ---------------------------------------------------------------------------
// prime-sum
// ---------------------------------------------------------------------------

struct PrimeSumCmd {
    Common c;
    u64 q = 0;
    double X = 0;
    u64 u = 1, v = 1;
    double smooth_Q = 0;
    u64 sieve_limit = 0;

    int run() const {
        if (X < 1) throw klsum::usage_error("X must be at least 1");
        klsum::FieldCtx ctx(q);

        std::optional<klsum::Bump> W;
        if (smooth_Q > 0) {
            if (smooth_Q < 1) throw klsum::usage_error("smoothing sharpness must be >= 1");
            klsum::BumpSpec spec;
            spec.kind = klsum::BumpKind::transition_delta;
            spec.center = 1.0;
            spec.halfwidth = 0.05;
            spec.sharpness = smooth_Q;
            W = klsum::make_bump(spec);
        }

        u64 limit = sieve_limit;
        if (limit == 0) {
            double need = X + 2;
            if (W) need = X * W->support_hi() + 2;
            limit = static_cast<u64>(need);
        }
        limit = std::max<u64>(limit, 1000);
        klsum::SieveTables tables(limit);
        klsum::Spectrum kl = klsum::kl_spectrum(2, ctx);

        klsum::PrimeApReport rep = klsum::prime_ap_kloosterman_sum(X, ctx, u, v, kl, tables);

        ordered_json config{{"q", q}, {"X", X}, {"u", u}, {"v", v},
                            {"smooth_Q", smooth_Q}, {"sieve_limit", limit}};
        append_common_config(config, c);

        ordered_json results;
        results["sum_re"] = rep.sum.real();
        results["sum_im"] = rep.sum.imag();
        results["abs"] = std::abs(rep.sum);
        results["count"] = rep.count;
        results["trivial_bound"] = rep.trivial_bound;
        results["envelope_main"] = rep.envelope_main;
        results["envelope_bfkpm"] = rep.envelope_bfkpm;
        results["ratios"] = ordered_json{{"trivial", rep.ratio_trivial},
                                         {"main", rep.ratio_main},
                                         {"bfkpm", rep.ratio_bfkpm}};
        results["v_in_valid_range"] = rep.v_in_valid_range;
        results["x_in_valid_range"] = rep.x_in_valid_range;
        if (W) {
            cplx s = klsum::smoothed_prime_sum(*W, X, ctx, u, v, kl, tables);
            results["smoothed"] = ordered_json{{"sum_re", s.real()},
                                               {"sum_im", s.imag()},
                                               {"abs", std::abs(s)},
                                               {"support_lo", W->support_lo()},
                                               {"support_hi", W->support_hi()}};
        }
        return write_json_report("prime-sum", config, c, std::move(results));
    }
};

// ---------------------------------------------------------------------------
// hb-check
// ---------------------------------------------------------------------------

struct HbCheckCmd {
    Common c;
    double X = 10000;
    int J = 2;
    long long cap = 0;
    long long samples = 0;

    int run() const {
        long long cap_eff = cap > 0 ? cap : static_cast<long long>(std::min(X, 2e4));
        cap_eff = std::max<long long>(1, std::min<long long>(cap_eff, (long long)X));
        klsum::SieveTables tables(static_cast<u64>(cap_eff) + 2);
        klsum::HeathBrown hb = klsum::heath_brown_decompose(X, J, tables, cap_eff);

        double valid = std::min<double>(double(hb.cap), 2.0 * std::pow(double(hb.Z), J));
        long long vl = std::max<long long>(1, static_cast<long long>(valid));

        long long n_samples = samples;
        if (n_samples == 0) n_samples = (J <= 3) ? -1 : 100; // -1 = exhaustive

        double max_err = 0;
        long long worst_n = 0, checked = 0;
        auto check_n = [&](long long n) {
            double err = std::abs(hb.reconstruct(u64(n)) - tables.mangoldt[size_t(n)]);
            if (err > max_err) {
                max_err = err;
                worst_n = n;
            }
            ++checked;
        };
        if (n_samples < 0) {
            for (long long n = 1; n <= vl; ++n) check_n(n);
        } else {
            std::mt19937_64 rng(c.seed);
            std::uniform_int_distribution<long long> dist(1, vl);
            for (long long i = 0; i < n_samples; ++i) check_n(dist(rng));
        }

        ordered_json config{{"X", X}, {"J", J}, {"cap", cap_eff}, {"samples", samples}};
        append_common_config(config, c);
        ordered_json results;
        results["X"] = hb.X;
        results["J"] = hb.J;
        results["Z"] = hb.Z;
        results["cap"] = hb.cap;
        results["valid_limit"] = vl;
        results["checked"] = checked;
        results["max_abs_error"] = max_err;
        results["worst_n"] = worst_n;
        results["pass"] = max_err <= 1e-8;
        return write_json_report("hb-check", config, c, std::move(results));
    }
};

// ---------------------------------------------------------------------------
// exponent-certify
// ---------------------------------------------------------------------------

struct ExponentCertifyCmd {
    Common c;
    std::string x_str;
    std::string kappa_str, theta_str = "0", eps_str = "1/100";
    int J = 10;
    long resolution = 2520;
    long random_points = 100000;

    int run() const {
        using klsum::Rat;
        Rat x = Rat::parse(x_str);
        Rat kappa = kappa_str.empty() ? Rat(-11, 192) + x / Rat(16) : Rat::parse(kappa_str);
        Rat theta = Rat::parse(theta_str);
        Rat eps = Rat::parse(eps_str);

        klsum::BetaRange br = klsum::beta_range(x, kappa, theta, eps);
        klsum::CertifyConfig cc;
        cc.resolution = resolution;
        cc.random_points = random_points;
        cc.seed = c.seed;
        klsum::CertifyReport rep = klsum::certify_total(x, kappa, theta, eps, J, cc);

        ordered_json config{{"x", x.str()},     {"kappa", kappa.str()},
                            {"theta", theta.str()}, {"eps", eps.str()},
                            {"J", J},           {"resolution", resolution},
                            {"random", random_points}};
        append_common_config(config, c);

        ordered_json results;
        results["beta"] = rep.beta.str();
        results["beta_range"] =
            ordered_json{{"lo", br.lo.str()}, {"hi", br.hi.str()}, {"feasible", br.feasible}};
        results["target_exponent"] = rep.target.str();
        results["points"] = rep.points;
        results["cases"] = ordered_json{{"a", rep.case_a}, {"b", rep.case_b}, {"c", rep.case_c}};
        results["violations"] = rep.violations;
        results["violation_samples"] = rep.violation_samples;
        results["worst_margin"] = rep.worst_margin_set ? rep.worst_margin.str() : std::string("");
        if (x >= Rat(11, 12) && x <= Rat(1)) {
            klsum::BalanceResult b = klsum::balance_final(x);
            ordered_json jb{{"kappa_star", b.kappa_star.str()},
                            {"exponent", b.exponent.str()},
                            {"dominated", b.dominated}};
            if (b.q_threshold) jb["q_threshold"] = *b.q_threshold;
            results["balance"] = std::move(jb);
        }
        klsum::CrossingInfo ci = klsum::envelope_crossing();
        results["crossing"] = ordered_json{{"x_coeff", ci.x_coeff.str()},
                                           {"q_coeff", ci.q_coeff.str()},
                                           {"boundary_q_exponent", ci.boundary.str()}};
        results["pass"] = rep.violations == 0;
        return write_json_report("exponent-certify", config, c, std::move(results));
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kloosterman sum experiments: spectra, dual-sum identities, oscillatory "
                 "integrals, bilinear cancellation, prime sums, exponent certification"};
    app.require_subcommand(1);
    std::function<int()> runner;

    auto spectrum = std::make_shared<SpectrumCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "spectrum", "full normalized hyper-Kloosterman spectrum with moment checks");
        sub->add_option("--q", spectrum->q, "prime modulus")->required();
        sub->add_option("--m", spectrum->m, "number of factors (2 = classical)")
            ->capture_default_str();
        sub->add_option("--format", spectrum->format, "output format: csv or binary")
            ->check(CLI::IsMember({"csv", "binary"}));
        add_common(sub, spectrum->c, "spectrum.csv");
        sub->callback([spectrum, &runner] { runner = [spectrum] { return spectrum->run(); }; });
    }

    auto tcheck = std::make_shared<TransformCheckCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "transform-check", "Fourier and dual transforms of a Kloosterman kernel "
                               "against their closed forms");
        sub->add_option("--q", tcheck->q, "prime modulus")->required();
        sub->add_option("--a", tcheck->a, "kernel shift (coprime to q)")->capture_default_str();
        sub->add_flag("--oracle", tcheck->force_oracle,
                      "force the quadratic-time reference path at large q");
        add_common(sub, tcheck->c, "transform-check.json");
        sub->callback([tcheck, &runner] { runner = [tcheck] { return tcheck->run(); }; });
    }

    auto vcheck = std::make_shared<VoronoiCheckCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "voronoi-check", "two-sided residual of the dual-sum identity on an "
                             "oscillatory weight");
        sub->add_option("--q", vcheck->q, "prime modulus")->required();
        sub->add_option("--a", vcheck->a, "kernel shift (coprime to q)")->capture_default_str();
        sub->add_option("--kernel", vcheck->kernel, "kernel: kl2 or ones")
            ->capture_default_str();
        sub->add_option("--M", vcheck->M, "first support scale")->required();
        sub->add_option("--N", vcheck->N, "second support scale")->required();
        sub->add_option("--c", vcheck->cc, "phase coefficient of e(c*u*v)")->required();
        sub->add_option("--Q", vcheck->Q, "weight sharpness factor")->capture_default_str();
        sub->add_option("--eps", vcheck->eps, "sharpness exponent")->capture_default_str();
        sub->add_option("--tol", vcheck->tol, "residual tolerance")->capture_default_str();
        sub->add_option("--trunc-m", vcheck->trunc_m, "dual radius override (0 = auto)")
            ->capture_default_str();
        sub->add_option("--trunc-n", vcheck->trunc_n, "dual radius override (0 = auto)")
            ->capture_default_str();
        sub->add_option("--samples-pow2", vcheck->samples_pow2,
                        "log2 of the sampling grid (0 = auto)")
            ->capture_default_str();
        sub->add_option("--env-delta", vcheck->env_delta, "envelope cut override (0 = auto)")
            ->capture_default_str();
        add_common(sub, vcheck->c, "voronoi-check.json");
        sub->callback([vcheck, &runner] { runner = [vcheck] { return vcheck->run(); }; });
    }

    auto oscint = std::make_shared<OscintReportCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "oscint-report", "oscillatory-integral decay table over sampled frequency pairs");
        sub->add_option("--q", oscint->q, "prime modulus scale")->required();
        sub->add_option("--c", oscint->cc, "phase coefficient")->required();
        sub->add_option("--M", oscint->M, "first support scale")->required();
        sub->add_option("--N", oscint->N, "second support scale")->required();
        sub->add_option("--Q", oscint->Q, "weight sharpness factor")->capture_default_str();
        sub->add_option("--eps", oscint->eps, "sharpness exponent")->capture_default_str();
        sub->add_flag("--use-h", oscint->use_h, "use the product-localized weight");
        sub->add_option("--U", oscint->U, "product window scale (default M*N)")
            ->capture_default_str();
        sub->add_option("--count", oscint->count, "number of sampled frequency pairs")
            ->capture_default_str();
        add_common(sub, oscint->c, "oscint-report.csv");
        sub->callback([oscint, &runner] { runner = [oscint] { return oscint->run(); }; });
    }

    auto stat = std::make_shared<StationaryReportCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "stationary-report", "phase-corrected transform values on the stationary box");
        sub->add_option("--q", stat->q, "prime modulus scale")->required();
        sub->add_option("--c", stat->cc, "phase coefficient")->required();
        sub->add_option("--M", stat->M, "first support scale")->required();
        sub->add_option("--N", stat->N, "second support scale")->required();
        sub->add_option("--Q", stat->Q, "weight sharpness factor")->capture_default_str();
        sub->add_option("--eps", stat->eps, "sharpness exponent")->capture_default_str();
        sub->add_flag("--use-h", stat->use_h, "use the product-localized weight");
        sub->add_option("--U", stat->U, "product window scale (default M*N)")
            ->capture_default_str();
        sub->add_option("--rows", stat->n_rows, "number of n-rows sampled")
            ->capture_default_str();
        sub->add_option("--per-row", stat->per_row, "consecutive m per row")
            ->capture_default_str();
        add_common(sub, stat->c, "stationary-report.csv");
        sub->callback([stat, &runner] { runner = [stat] { return stat->run(); }; });
    }

    auto bilinear = std::make_shared<BilinearSweepCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "bilinear-sweep", "bilinear form values against the printed envelopes over "
                              "random coefficient trials");
        sub->add_option("--q", bilinear->q, "prime modulus")->required();
        sub->add_option("--a", bilinear->a, "kernel shift")->capture_default_str();
        sub->add_option("--M", bilinear->M, "first window length scale")->required();
        sub->add_option("--N", bilinear->N, "second window length scale")->required();
        sub->add_option("--family", bilinear->family,
                        "coefficients: random_sign, random_unit, all_ones, moebius, character")
            ->capture_default_str();
        sub->add_option("--trials", bilinear->trials, "number of coefficient draws")
            ->capture_default_str();
        sub->add_option("--eps", bilinear->eps, "envelope slack exponent")
            ->capture_default_str();
        add_common(sub, bilinear->c, "bilinear-sweep.csv");
        sub->callback([bilinear, &runner] { runner = [bilinear] { return bilinear->run(); }; });
    }

    auto prime = std::make_shared<PrimeSumCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "prime-sum", "Kloosterman sum over primes in a progression, with envelopes");
        sub->add_option("--q", prime->q, "prime modulus")->required();
        sub->add_option("--X", prime->X, "upper limit of the prime range")->required();
        sub->add_option("--u", prime->u, "progression residue")->capture_default_str();
        sub->add_option("--v", prime->v, "progression modulus")->capture_default_str();
        sub->add_option("--smooth", prime->smooth_Q,
                        "also compute the smoothed sum with this window sharpness")
            ->capture_default_str();
        sub->add_option("--sieve-limit", prime->sieve_limit, "sieve table size (0 = auto)")
            ->capture_default_str();
        add_common(sub, prime->c, "prime-sum.json");
        sub->callback([prime, &runner] { runner = [prime] { return prime->run(); }; });
    }

    auto hb = std::make_shared<HbCheckCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "hb-check", "combinatorial decomposition of the von Mangoldt function "
                        "against the sieve oracle");
        sub->add_option("--X", hb->X, "decomposition scale")->capture_default_str();
        sub->add_option("--J", hb->J, "number of factors")->capture_default_str();
        sub->add_option("--cap", hb->cap, "largest n tabulated (0 = auto)")
            ->capture_default_str();
        sub->add_option("--samples", hb->samples,
                        "random n to check (0 = auto: exhaustive for J <= 3)")
            ->capture_default_str();
        add_common(sub, hb->c, "hb-check.json");
        sub->callback([hb, &runner] { runner = [hb] { return hb->run(); }; });
    }

    auto expc = std::make_shared<ExponentCertifyCmd>();
    {
        CLI::App* sub = app.add_subcommand(
            "exponent-certify", "exact-rational certification of the exponent case split");
        sub->add_option("--x", expc->x_str, "length exponent, a rational like 1 or 23/24")
            ->required();
        sub->add_option("--kappa", expc->kappa_str,
                        "sharpness exponent (default -11/192 + x/16)");
        sub->add_option("--theta", expc->theta_str, "progression exponent")
            ->capture_default_str();
        sub->add_option("--eps", expc->eps_str, "slack exponent")->capture_default_str();
        sub->add_option("--J", expc->J, "number of decomposition factors")
            ->capture_default_str();
        sub->add_option("--resolution", expc->resolution, "grid denominator")
            ->capture_default_str();
        sub->add_option("--random", expc->random_points, "random simplex points")
            ->capture_default_str();
        add_common(sub, expc->c, "exponent-certify.json");
        sub->callback([expc, &runner] { runner = [expc] { return expc->run(); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        print_error("usage", e.what());
        return 2;
    }

    try {
        return runner ? runner() : 2;
    } catch (const klsum::usage_error& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const klsum::domain_error& e) {
        print_error("domain", e.what());
        return 1;
    } catch (const klsum::range_error& e) {
        print_error("range", e.what());
        return 1;
    } catch (const klsum::numerics_error& e) {
        print_error("numerics", e.what());
        return 1;
    } catch (const klsum::resource_error& e) {
        print_error("resource", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
}
