#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "klsum/ffarith.hpp"

namespace klsum {

// Normalized hyper-Kloosterman values Kl_m(n;q) for n = 1..q-1.
// values[n-1] = q^{-(m-1)/2} * sum over x_1*...*x_m = n (mod q) of e((x_1+...+x_m)/q).
struct Spectrum {
    u64 q = 0;
    int m = 0;
    std::vector<std::complex<double>> values;

    const std::complex<double>& at(u64 n) const; // throws domain_error when q | n
};

// Single value by direct enumeration of m-1 free variables, the last solved by
// division. Cost O(q^{m-1}); meant for oracles and small q.
// Throws domain_error when q | n (see kl_at_zero for that case).
std::complex<double> kl_point(int m, std::int64_t n, u64 q);

// Trace-convention value at the singular point: Kl_m(0;q) = (-1)^{m+1} q^{-(m-1)/2}.
double kl_at_zero(int m, u64 q);

// Full spectrum via one length-(q-1) cyclic convolution power: with x = g^k,
// the map k -> e(g^k/q) has m-fold self-convolution equal to the unnormalized
// sums indexed by discrete log. Cost O(q log q).
Spectrum kl_spectrum(int m, const FieldCtx& ctx);

std::complex<double> kl_first_moment(const Spectrum& s);

// Sum over n of |Kl_2(n;q)|^2; exact value is (q^2 - q - 1)/q. m=2 only.
double kl_second_moment(const Spectrum& s);

// CSV with mandatory header "n,re,im", 17 significant digits, LF line ends.
void write_spectrum_csv(const Spectrum& s, std::ostream& os);

// Little-endian binary dump: u64 q, u64 m, then (q-1) interleaved re,im doubles.
void write_spectrum_binary(const Spectrum& s, std::ostream& os);
Spectrum read_spectrum_binary(std::istream& is);

} // namespace klsum
