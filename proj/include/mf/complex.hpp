#pragma once

#include "mf/bidegree.hpp"
#include "mf/linalg.hpp"

#include <map>
#include <string>
#include <vector>

namespace mf {

// Generic finitely-enumerated graded objects. The heavy pipelines run on
// Arena/Contraction; this surface covers standalone blockwise cohomology and
// the debug dump format.
struct GradedSpace {
    struct Elt {
        std::string label;
        std::string note;
    };
    std::map<Bidegree, std::vector<Elt>> blocks;

    int dim(Bidegree b) const {
        auto it = blocks.find(b);
        return it == blocks.end() ? 0 : int(it->second.size());
    }
    int add(Bidegree b, Elt e) {
        auto& v = blocks[b];
        v.push_back(std::move(e));
        return int(v.size()) - 1;
    }
};

// Homogeneous block map: block at source b maps into b + shift.
struct GradedMap {
    Bidegree shift{0, 1};
    std::map<Bidegree, Mat> blocks;

    const Mat* at(Bidegree b) const {
        auto it = blocks.find(b);
        return it == blocks.end() ? nullptr : &it->second;
    }
};

// space + differential summands, each raising d by exactly 1
struct GradedComplex {
    GradedSpace space;
    std::vector<GradedMap> diff;

    // blockwise composite-is-zero check over a window; hard assertion
    void check_d2(const Window& win) const;
};

struct CohomologyBlocks {
    std::map<Bidegree, int> dims;
    // canonical representatives (pivot-based complement of image inside the
    // kernel), per block
    std::map<Bidegree, std::vector<SparseVec>> reps;
};

// dims and representatives per block. Needs blocks one step on each side of
// the window; throws WindowTooSmall when data for a requested block would
// depend on blocks outside `avail`.
CohomologyBlocks cohomology(const GradedComplex& c, const Window& win, const Window& avail);

} // namespace mf
