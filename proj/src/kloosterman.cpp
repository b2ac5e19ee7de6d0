#include "klsum/kloosterman.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "klsum/errors.hpp"
#include "klsum/fft.hpp"
#include "klsum/io.hpp"

namespace klsum {

static_assert(std::endian::native == std::endian::little,
              "binary spectrum format is little-endian");

const std::complex<double>& Spectrum::at(u64 n) const {
    u64 r = n % q;
    if (r == 0) throw domain_error("Spectrum::at: index divisible by the modulus");
    return values[r - 1];
}

namespace {

std::vector<std::complex<double>> char_table(u64 q) {
    std::vector<std::complex<double>> e(q);
    for (u64 j = 0; j < q; ++j) e[j] = additive_char(std::int64_t(j), q);
    return e;
}

// inv[i] = i^{-1} mod q for i = 1..q-1, by the standard division recurrence.
std::vector<u64> inverse_table(u64 q) {
    std::vector<u64> iv(q);
    iv[1] = 1;
    for (u64 i = 2; i < q; ++i) iv[i] = mul_mod(q - q / i, iv[q % i], q);
    return iv;
}

} // namespace

double kl_at_zero(int m, u64 q) {
    if (m < 1) throw usage_error("kl_at_zero: m must be >= 1");
    if (!is_prime(q)) throw usage_error("kl_at_zero: modulus must be prime");
    const double norm = std::pow(double(q), -0.5 * (m - 1));
    return (m % 2 == 0 ? -1.0 : 1.0) * norm;
}

std::complex<double> kl_point(int m, std::int64_t n, u64 q) {
    if (m < 1) throw usage_error("kl_point: m must be >= 1");
    if (!is_prime(q)) throw usage_error("kl_point: modulus must be prime");
    std::int64_t r = n % std::int64_t(q);
    if (r < 0) r += std::int64_t(q);
    if (r == 0) throw domain_error("kl_point: n divisible by the modulus");
    const u64 nr = u64(r);
    const auto e = char_table(q);
    const double norm = std::pow(double(q), -0.5 * (m - 1));
    if (m == 1) return e[nr];
    const auto iv = inverse_table(q);
    std::complex<double> total(0.0);
    if (m == 2) {
        for (u64 x = 1; x < q; ++x)
            total += e[(x + mul_mod(nr, iv[x], q)) % q];
        return norm * total;
    }
    // Odometer over x_1..x_{m-2}; innermost free variable x_{m-1} runs in a loop
    // with the partial sum and product updated incrementally.
    std::vector<u64> x(std::size_t(m) - 2, 1);
    while (true) {
        u64 s = 0, p = 1;
        for (u64 xi : x) { s = (s + xi) % q; p = mul_mod(p, xi, q); }
        const u64 np = mul_mod(nr, iv[p], q); // x_{m-1} * x_m = np
        for (u64 y = 1; y < q; ++y)
            total += e[(s + y + mul_mod(np, iv[y], q)) % q];
        std::size_t d = 0;
        for (; d < x.size(); ++d) {
            if (++x[d] < q) break;
            x[d] = 1;
        }
        if (d == x.size()) break;
    }
    return norm * total;
}

Spectrum kl_spectrum(int m, const FieldCtx& ctx) {
    if (m < 1) throw usage_error("kl_spectrum: m must be >= 1");
    const u64 q = ctx.q;
    const u64 L = q - 1;
    std::vector<cplx> a(L);
    u64 x = 1;
    const auto e = char_table(q);
    for (u64 k = 0; k < L; ++k) {
        a[k] = e[x];
        x = mul_mod(x, ctx.g, q);
    }
    auto A = dft(a, -1);
    for (auto& v : A) {
        cplx p(1.0);
        for (int j = 0; j < m; ++j) p *= v; // m <= desk scale; pow avoids branch noise
        v = p;
    }
    auto conv = dft(A, +1);
    Spectrum s;
    s.q = q;
    s.m = m;
    s.values.resize(L);
    const double norm = std::pow(double(q), -0.5 * (m - 1));
    for (u64 n = 1; n <= L; ++n)
        s.values[n - 1] = norm * conv[ctx.dlog[n - 1]];
    return s;
}

std::complex<double> kl_first_moment(const Spectrum& s) {
    std::complex<double> t(0.0);
    for (const auto& v : s.values) t += v;
    return t;
}

double kl_second_moment(const Spectrum& s) {
    if (s.m != 2) throw usage_error("kl_second_moment: defined for m = 2 only");
    double t = 0.0;
    for (const auto& v : s.values) t += std::norm(v);
    return t;
}

void write_spectrum_csv(const Spectrum& s, std::ostream& os) {
    os << "n,re,im\n";
    for (u64 n = 1; n < s.q; ++n)
        os << n << ',' << fmt17(s.values[n - 1].real()) << ','
           << fmt17(s.values[n - 1].imag()) << '\n';
}

void write_spectrum_binary(const Spectrum& s, std::ostream& os) {
    const u64 q = s.q, m = u64(s.m);
    os.write(reinterpret_cast<const char*>(&q), sizeof q);
    os.write(reinterpret_cast<const char*>(&m), sizeof m);
    os.write(reinterpret_cast<const char*>(s.values.data()),
             std::streamsize(s.values.size() * sizeof(std::complex<double>)));
}

Spectrum read_spectrum_binary(std::istream& is) {
    Spectrum s;
    u64 m = 0;
    is.read(reinterpret_cast<char*>(&s.q), sizeof s.q);
    is.read(reinterpret_cast<char*>(&m), sizeof m);
    if (!is || s.q < 2) throw usage_error("read_spectrum_binary: malformed header");
    s.m = int(m);
    s.values.resize(s.q - 1);
    is.read(reinterpret_cast<char*>(s.values.data()),
            std::streamsize(s.values.size() * sizeof(std::complex<double>)));
    if (!is) throw usage_error("read_spectrum_binary: truncated payload");
    return s;
}

} // namespace klsum
