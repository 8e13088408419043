#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace mf {

// (weight, cohomological degree). Total parity is (w+d) mod 2 and is always
// derived, never stored.
struct Bidegree {
    int w = 0;
    int d = 0;

    int parity() const { return ((w + d) % 2 + 2) % 2; }
    Bidegree operator+(const Bidegree& o) const { return {w + o.w, d + o.d}; }
    Bidegree operator-(const Bidegree& o) const { return {w - o.w, d - o.d}; }
    auto operator<=>(const Bidegree&) const = default;

    std::string str() const { return "(" + std::to_string(w) + "," + std::to_string(d) + ")"; }
};

struct BidegreeHash {
    size_t operator()(const Bidegree& b) const {
        return std::hash<int64_t>()((int64_t(b.w) << 32) ^ uint32_t(b.d));
    }
};

// Inclusive weight/degree box used to bound every blockwise computation.
struct Window {
    int w_min = 0, w_max = 0;
    int d_min = 0, d_max = 0;

    bool contains(Bidegree b) const {
        return b.w >= w_min && b.w <= w_max && b.d >= d_min && b.d <= d_max;
    }
};

} // namespace mf
