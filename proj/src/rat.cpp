#include "klsum/rat.hpp"

#include <ostream>

#include "klsum/errors.hpp"

namespace klsum {

Rat::Rat(long n, long d) {
    if (d == 0) throw domain_error("Rat: zero denominator");
    v_ = mpq_class(n, d);
    v_.canonicalize();
}

Rat Rat::operator/(const Rat& o) const {
    if (o.v_ == 0) throw domain_error("Rat: division by zero");
    return Rat(mpq_class(v_ / o.v_));
}

Rat Rat::parse(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw usage_error("Rat::parse: empty string");
    try {
        mpq_class v(t, 10);
        if (v.get_den() == 0) throw usage_error("Rat::parse: zero denominator");
        v.canonicalize();
        return Rat(v);
    } catch (const std::invalid_argument&) {
        throw usage_error("Rat::parse: malformed rational '" + s + "'");
    }
}

std::string Rat::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }

} // namespace klsum
