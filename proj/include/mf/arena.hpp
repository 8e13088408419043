#pragma once

#include "mf/bidegree.hpp"
#include "mf/linalg.hpp"
#include "mf/super_poly.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mf {

// Module/fiber generator sitting as the middle tensor factor of an arena
// term. `level` is the reporting grade (totalized CE degree of provenance);
// it never enters a sign rule.
struct ArenaGen {
    std::string name;
    Bidegree deg;
    int level = 0;
    std::string note;
};

// A basis term: ring monomial times generator. The tensor order for signs is
//   [lambda-block][vee-block] . gen . [theta-block][delta-block],
// the ring monomial being stored over the full table in that order.
struct FullTerm {
    Mono m;
    int gen = 0;
    auto operator<=>(const FullTerm&) const = default;
};

struct FullElem {
    std::map<FullTerm, Rat> t;

    bool zero() const { return t.empty(); }
    FullElem& add(const FullTerm& k, Rat c);
    FullElem& axpy(const Rat& c, const FullElem& o);
    FullElem& scale(const Rat& c);
};

// Relation for presented-module arenas (vee-free): a lambda-polynomial
// combination of generators. Exponent vectors run over the lambda block.
struct InnerRelation {
    std::vector<std::tuple<std::vector<uint16_t>, int, Rat>> terms;
};

// Block families:
//   core  - lambda/vee letters and the generator only (relation echelons live here)
//   inner - core plus thetas when thetas_inner is set (contractions act here)
//   full  - everything
enum class BlockKind { core, inner, full };

class Arena {
public:
    Arena(int n_lambda, int n_vee, int n_theta, int n_delta, std::vector<ArenaGen> gens,
          std::vector<InnerRelation> relations = {}, bool thetas_inner = false);

    const GeneratorTable& ring() const { return ring_; }
    int n_lambda() const { return nl_; }
    int n_vee() const { return nv_; }
    int n_theta() const { return nt_; }
    int n_delta() const { return nd_; }
    int lambda_at(int a) const { return a; }
    int vee_at(int v) const { return nl_ + v; }
    int theta_at(int t) const { return nl_ + nv_ + t; }
    int delta_at(int d) const { return nl_ + nv_ + nt_ + d; }
    int core_end() const { return nl_ + nv_; }
    int outer_start() const { return outer_start_; }
    const std::vector<ArenaGen>& gens() const { return gens_; }
    bool has_relations() const { return !relations_.empty(); }

    Bidegree deg(const FullTerm& t) const;
    int parity(const FullTerm& t) const;
    int level(const FullTerm& t) const; // gen level minus number of vee letters
    int theta_degree(const FullTerm& t) const;
    int delta_degree(const FullTerm& t) const;
    bool outer_trivial(const FullTerm& t) const;
    // splits t into (inner part, outer monomial); coefficient-free by the
    // slot convention (outer letters sit rightmost).
    std::pair<FullTerm, Mono> split_outer(const FullTerm& t) const;
    FullTerm attach_outer(const FullTerm& inner, const Mono& outer) const;

    std::string term_str(const FullTerm& t) const;

    // Canonical block bases, sorted by (outer part, level, inner mono, gen).
    // With relations, a basis omits the relation-span pivot terms and
    // reduce() rewrites onto it.
    const std::vector<FullTerm>& basis(Bidegree b, BlockKind kind) const;
    int index_in_block(const FullTerm& t, BlockKind kind) const; // -1 if absent

    FullElem reduce(FullElem e) const;

    // --- primitive signed operations (all reduce-normalized) --------------
    FullElem mul_ring(int ri, const FullTerm& t, const Rat& c) const;
    // Left derivative at ring slot ri followed by in-place multiplication by
    // `image` (supported generally for image == scalar, or for core slots
    // with core-letter images). op_parity is the whole operator's parity.
    FullElem derive_at(int ri, const SuperPoly& image, int op_parity, const FullTerm& t, const Rat& c) const;
    // Generator map g -> sum (core mono, gen'); picks up
    // (-1)^{op_parity * parity(lambda/vee prefix)}. Entry monomials may also
    // carry delta letters (even: no extra signs).
    FullElem map_gen(const std::vector<std::vector<std::tuple<Mono, int, Rat>>>& images, int op_parity,
                     const FullTerm& t, const Rat& c) const;

    FullElem from_coords(Bidegree b, const SparseVec& v, BlockKind kind) const;
    std::map<Bidegree, SparseVec> to_coords(const FullElem& e, BlockKind kind) const;

private:
    struct BlockCache {
        std::vector<FullTerm> terms;
        std::map<FullTerm, int> index;
        Echelon rel_ech;                  // core blocks only
        std::vector<FullTerm> rel_terms;  // full enumeration incl. pivots
        std::map<FullTerm, int> rel_index;
    };

    GeneratorTable ring_;
    int nl_, nv_, nt_, nd_;
    int outer_start_;
    std::vector<ArenaGen> gens_;
    std::vector<InnerRelation> relations_;

    mutable std::recursive_mutex mu_;
    mutable std::map<std::pair<Bidegree, int>, std::unique_ptr<BlockCache>> cache_;

    const BlockCache& block(Bidegree b, BlockKind kind) const;
    void enumerate(Bidegree b, int slot_limit, std::vector<FullTerm>& out) const;
    bool core_reduced(const FullTerm& core_term) const; // not a relation pivot
    int parity_before_slot(const FullTerm& t, int ri) const;
};

using TermOp = std::function<FullElem(const FullTerm&, const Rat&)>;

FullElem apply_op(const TermOp& op, const FullElem& e);

// Named differential/perturbation summand; every pipeline summand raises d by 1.
struct OpSummand {
    std::string name;
    Bidegree shift;
    TermOp op;
};

FullElem apply_sum(const std::vector<OpSummand>& ops, const FullElem& e);

} // namespace mf
