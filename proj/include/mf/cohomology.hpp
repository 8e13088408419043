#pragma once

#include "mf/algebra.hpp"
#include "mf/module_io.hpp"
#include "mf/transfer.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mf {

// Blockwise cohomology of a (lambda[,vee] | gens) complex with a designated
// (0,1) differential, graded for reporting by the totalized level.
struct LeveledCohomology {
    std::shared_ptr<const Arena> arena;
    std::shared_ptr<Contraction> ctr;
    int cutoff = 0;
    // level -> per-weight dimensions (index = weight)
    std::map<int, std::vector<int>> hilbert;
    // all (block, class) pairs per level, weight-ascending
    std::map<int, std::vector<std::pair<Bidegree, int>>> classes;

    std::vector<int> levels_present() const;
};

LeveledCohomology leveled_cohomology(std::shared_ptr<const Arena> A, std::vector<OpSummand> d,
                                     int cutoff, int d_lo, int d_hi);

// Presentation of one level of a leveled cohomology as an R-module, found
// weight-by-weight: generators are classes outside lambda * H, relations the
// kernel of the evaluation map, both minimal modulo the maximal ideal.
// Verified up to the cutoff (a banner, not a proof).
PresentedRModule extract_presentation(const LeveledCohomology& H, int level, const AlgebraSpec& alg,
                                      const std::string& name, bool rmod_i);

// Lie algebra cohomology of the supertranslation algebra.
struct CohomologyTable {
    AlgebraSpec spec;
    int cutoff = 0;
    std::map<int, std::vector<int>> hilbert; // totalized degree k (<= 0) -> dims per weight
    // chosen closed representatives per (k, w)
    std::map<std::pair<int, int>, std::vector<std::string>> reps;

    int dim(int k, int w) const;
};

CohomologyTable lie_cohomology(const CEAlgebra& ce, int W);

// H^k vanishing for all k < 0 within the window; a certificate up to W
struct CompleteIntersectionReport {
    bool complete_intersection = true;
    int cutoff = 0;
    std::vector<std::pair<int, int>> nonzero; // offending (k, w)
};

CompleteIntersectionReport is_complete_intersection_window(const CEAlgebra& ce, int W);

// H^k(n) extracted as a presented R-module (RmodI for k = 0)
PresentedRModule lie_cohomology_module(const CEAlgebra& ce, int k, int W);

} // namespace mf
