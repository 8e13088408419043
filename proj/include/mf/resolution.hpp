#pragma once

#include "mf/module_io.hpp"

#include <map>
#include <string>
#include <vector>

namespace mf {

struct BettiTable {
    int cutoff = 0;
    std::map<std::pair<int, int>, int> beta; // (homological index, weight) -> count
    // per-column verification bound; generators beyond it may exist
    std::vector<int> verified_to;

    int at(int i, int w) const {
        auto it = beta.find({i, w});
        return it == beta.end() ? 0 : it->second;
    }
    int columns() const;
    bool same_numbers(const BettiTable& o) const { return beta == o.beta; }
    std::string tsv() const;
};

// Minimal free resolution computed degreewise (kernel per weight; new
// generators = kernel modulo lambda * kernel).
struct FreeResolution {
    int cutoff = 0;
    // gens[i]: weights of the generators of L_i, in canonical order
    std::vector<std::vector<int>> gens;
    // diff[i]: matrix L_i -> L_{i-1} (i >= 1): entries are lambda-polynomials
    struct Entry {
        int src;
        int tgt;
        std::vector<std::pair<std::vector<uint16_t>, Rat>> poly;
    };
    std::vector<std::vector<Entry>> diff;
    // augmentation: L_0 generator -> element of the module (core coords kept
    // implicitly; only used internally)

    BettiTable betti() const;
};

FreeResolution minimal_resolution(const PresentedRModule& M, int W);

// Independent oracle: beta_{i,w} = dim H_i(M (x) Koszul(lambda_1..lambda_n1))_w,
// computed purely blockwise from the module's weight pieces.
BettiTable tor_oracle(const PresentedRModule& M, int W);

} // namespace mf
