#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <stdexcept>

namespace mf {

// Exact rational scalar. Canonical form (reduced, positive denominator) is
// maintained by GMP; every constructor below canonicalizes.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Parses "n", "-n", "n/d". Throws std::invalid_argument on malformed input.
inline Rat parse_rat(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    mpq_class q;
    if (q.set_str(std::string(s), 10) != 0)
        throw std::invalid_argument("bad rational literal: " + std::string(s));
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + std::string(s));
    q.canonicalize();
    return q;
}

inline std::string rat_str(const Rat& q) {
    return q.get_str();
}

inline bool is_zero(const Rat& q) { return sgn(q) == 0; }

} // namespace mf
