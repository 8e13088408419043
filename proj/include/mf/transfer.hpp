#pragma once

#include "mf/arena.hpp"
#include "mf/bidegree.hpp"
#include "mf/error.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mf {

// Canonical deformation retract of the inner blocks of an arena onto the
// cohomology of a designated differential d0 (shift (0,1), outer-linear).
// Built from reduced echelon data; satisfies p i = id,
// i p - id = d h + h d, h i = 0, p h = 0, h h = 0 exactly (hard-asserted).
class Contraction {
public:
    Contraction(std::shared_ptr<const Arena> arena, std::vector<OpSummand> d0, Window win,
                bool verify = true);

    const Arena& arena() const { return *arena_; }
    const Window& window() const { return win_; }

    struct Classes {
        std::vector<SparseVec> reps;   // H representatives in inner-block coords
        std::vector<int> levels;       // per class; INT_MIN when mixed
    };
    const Classes& classes(Bidegree b) const;
    int h_dim(Bidegree b) const { return int(classes(b).reps.size()); }

    // inner-only structure maps
    FullElem i_inner(Bidegree b, int k) const;
    // p: inner element -> class coordinates per block
    std::map<Bidegree, SparseVec> p_inner(const FullElem& inner_elem) const;
    FullElem h_inner(const FullElem& inner_elem) const;

    // outer-linear extensions (act on arbitrary arena elements)
    FullElem h_full(const FullElem& e) const;
    // p over the full arena: class coordinates paired with the outer monomial
    std::map<std::pair<Bidegree, Mono>, SparseVec> p_full(const FullElem& e) const;

    // the designated differential as an operator (for verification)
    FullElem d0(const FullElem& e) const;

private:
    struct BlockData {
        int rank_out = 0;                // rank of d0 on this block
        Echelon ker;                     // kernel RREF of d_out
        Echelon img;                     // image echelon (from the block below)
        std::vector<SparseVec> pre;      // kernel-reduced preimages, in block below
        Classes cls;                     // H data
        std::vector<int> hleads;
    };

    std::shared_ptr<const Arena> arena_;
    std::vector<OpSummand> d0_;
    Window win_;
    bool verify_;

    mutable std::recursive_mutex mu_;
    mutable std::map<Bidegree, std::unique_ptr<BlockData>> blocks_;
    mutable std::map<Bidegree, Mat> d0_cache_;

    const BlockData& block(Bidegree b) const;
    const Mat& materialize_d0(Bidegree b) const;
    void verify_block(Bidegree b, const BlockData& bd) const;
};

// A contraction-plus-perturbation layer: transfers the remaining summands of
// the differential onto the cohomology of the designated part and exposes the
// perturbed structure maps. The small side materializes as a fresh arena
// whose ring is the outer part of the big arena and whose generators are the
// inner classes.
class Stage {
public:
    // `win` bounds homotopy/projection availability; classes (small-arena
    // generators) are enumerated only up to weight class_w_max. Projections
    // hitting classes beyond that are window-truncated.
    Stage(std::shared_ptr<const Arena> big, std::vector<OpSummand> designated,
          std::vector<OpSummand> perturbation, Window win, int class_w_max,
          const std::string& class_prefix, bool small_thetas_inner);

    const std::shared_ptr<const Arena>& big_arena() const { return big_; }
    const std::shared_ptr<Arena>& small_arena() const { return small_; }
    const Contraction& contraction() const { return ctr_; }
    const Window& window() const { return win_; }

    // class identity: small-arena generator index -> (block, class index)
    struct ClassId {
        Bidegree deg;
        int idx;
    };
    const std::vector<ClassId>& class_ids() const { return ids_; }

    // structure maps (perturbed); elements of the small arena <-> big arena
    FullElem lift0(const FullTerm& small_term) const;             // i
    FullElem lift(const FullTerm& small_term) const;              // i'
    FullElem lift(const FullElem& small_elem) const;
    FullElem project0(const FullElem& big_elem) const;            // p
    FullElem project(const FullElem& big_elem) const;             // p' = p + p X h'
    FullElem homotopy(const FullElem& big_elem) const;            // h' = sum (hX)^n h
    FullElem perturb_sum(const FullElem& big_elem) const;         // X applied once

    // transferred differential on the small arena: d'(t) = p X i'(t)
    FullElem d_small(const FullTerm& t, const Rat& c) const;
    TermOp d_small_op() const;

    // single-factor transfer p . op . i (used for designated Koszul pieces)
    FullElem single_transfer(const OpSummand& op, const FullTerm& t, const Rat& c) const;

private:
    std::shared_ptr<const Arena> big_;
    std::vector<OpSummand> designated_;
    std::vector<OpSummand> pert_;
    Window win_;
    int class_w_max_;
    Contraction ctr_;
    std::shared_ptr<Arena> small_;
    std::vector<ClassId> ids_;
    std::map<std::pair<Bidegree, int>, int> gen_of_class_;
    int max_iter_;
    mutable std::mutex cache_mu_;
    mutable std::map<FullTerm, FullElem> lift_cache_;
    mutable std::map<FullTerm, FullElem> dsmall_cache_;

    FullElem prune(FullElem e) const;
    Mono outer_to_big(const Mono& small_mono) const;
    Mono outer_to_small(const Mono& big_outer) const;
    FullElem small_from_pfull(const std::map<std::pair<Bidegree, Mono>, SparseVec>& pf) const;
};

// Verifies d^2 = 0 for a sum of summands on all inner+outer blocks of a
// window interior; hard assertion used by every pipeline.
void check_d_squared(const Arena& A, const std::vector<OpSummand>& d, const Window& win, int w_margin);

// Same check on the structured spanning set of terms with at most
// `max_letters` ring letters. The pairwise anticommutators of the operator
// summands used by the engine (ring derivations, ring multiplications,
// generator matrices with polynomial entries) are all determined by their
// values there, so this certifies d^2 = 0 at a fraction of the cost.
void check_d_squared_span(const Arena& A, const std::vector<OpSummand>& d, int max_letters = 2);

} // namespace mf
