#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace klsum {

// Exact rational, canonical form (gcd 1, positive denominator). Thin wrapper
// over GMP's mpq_class so this module never touches floating point.
class Rat {
  public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}
    Rat(long n, long d);
    explicit Rat(const mpq_class& v) : v_(v) { v_.canonicalize(); }

    // Parses "p", "-p/q", with optional whitespace. Throws usage_error.
    static Rat parse(const std::string& s);

    Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
    Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
    Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
    Rat operator/(const Rat& o) const;
    Rat operator-() const { return Rat(mpq_class(-v_)); }

    bool operator==(const Rat& o) const { return v_ == o.v_; }
    bool operator!=(const Rat& o) const { return v_ != o.v_; }
    bool operator<(const Rat& o) const { return v_ < o.v_; }
    bool operator<=(const Rat& o) const { return v_ <= o.v_; }
    bool operator>(const Rat& o) const { return v_ > o.v_; }
    bool operator>=(const Rat& o) const { return v_ >= o.v_; }

    std::string str() const; // "p/q", or "p" when the denominator is 1
    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }
    int sign() const { return sgn(v_); }

  private:
    mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);

} // namespace klsum
