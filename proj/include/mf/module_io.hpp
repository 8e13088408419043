#pragma once

#include "mf/algebra.hpp"
#include "mf/arena.hpp"
#include "mf/bidegree.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mf {

struct ModGen {
    std::string name;
    Bidegree deg;
    std::optional<int> level;            // totalized reporting degree; default deg.d
    std::optional<int> intrinsic_parity; // optional declaration; must equal w mod 2
    std::string note;

    int effective_level() const { return level.value_or(deg.d); }
};

// entry of a polynomial matrix: src gen -> coeff * mono(exps) * tgt gen
struct PolyEntry {
    int src = 0;
    int tgt = 0;
    std::vector<uint16_t> exps; // exponent vector; interpretation fixed per class
    Rat c;
};

// Weight-graded module over R = Q[lambda] given by generators and homogeneous
// relations; rmod_i asserts that the quadratic ideal annihilates.
struct PresentedRModule {
    AlgebraSpec algebra;
    std::string name;
    std::vector<ModGen> gens;
    // relation terms grouped per relation; exps over the n1 lambdas
    std::vector<std::vector<PolyEntry>> relations; // src unused; tgt = gen hit
    bool rmod_i = false;

    void validate(int cutoff) const;
    // per-weight dimensions up to cutoff (Hilbert function)
    std::vector<int> hilbert(int cutoff) const;
    // arena over (lambda | gens) with the relation reducer; thetas/deltas as requested
    std::shared_ptr<Arena> make_arena(int n_theta, int n_delta, bool thetas_inner) const;
};

PresentedRModule direct_sum(const PresentedRModule& a, const PresentedRModule& b);

// Finitely generated semifree dg-module over the Chevalley-Eilenberg algebra:
// free over Q[lambda, vee] on the generators, d_Gamma given by a matrix with
// entries in the CE algebra. exps run over (lambda | vee).
struct SemifreeDGModule {
    AlgebraSpec algebra;
    std::string name;
    std::vector<ModGen> gens;
    std::vector<PolyEntry> differential;

    void validate(int cutoff) const; // homogeneity + symbolic dg condition
    std::shared_ptr<Arena> make_arena(int n_theta, int n_delta) const;
    // (d_CE + d_Gamma) as operator summands on that arena
    std::vector<OpSummand> internal_differential(const std::shared_ptr<Arena>& A) const;
};

// Finite-dimensional multiplet fiber: fields, differential and L-infinity
// action with constant-coefficient operator entries (delta symbols, exps over
// the n2 deltas).
struct MultipletFiber {
    AlgebraSpec algebra;
    std::string name;
    std::vector<ModGen> fields;
    std::vector<PolyEntry> d0;                           // Delta d = +1
    std::vector<std::vector<PolyEntry>> rho1;            // per odd direction alpha
    std::vector<std::vector<PolyEntry>> rho2;            // per pair alpha<=beta (coefficient of l^a l^b)

    int pair_index(int a, int b) const; // a <= b among n1
    void validate() const;              // bidegree/order rules + L-infinity relations
    std::vector<int> field_dims(Bidegree b) const;
};

using LoadedInput = std::variant<PresentedRModule, SemifreeDGModule, MultipletFiber>;

LoadedInput load_input(const std::string& path);
LoadedInput input_from_json(const std::string& text);
std::string input_to_json(const LoadedInput& in);
void save_input(const LoadedInput& in, const std::string& path);

// default verification cutoff: max generator weight + n1 + 4
int default_validation_cutoff(const PresentedRModule& m);

// The full square-zero differential of the invariants complex on a
// (lambda, vee, delta | fields) arena: d_CE - v.delta + D + lambda.rho.
// The closure convention for module data is exactly "this squares to zero".
std::vector<OpSummand> fiber_ce_ops(const MultipletFiber& f, const std::shared_ptr<Arena>& A);
// Its zero-derivative part on a (lambda | fields) arena:
// D|_0 + lambda.rho1|_0 + lambda lambda.rho2|_0.
std::vector<OpSummand> fiber_invariants_ops(const MultipletFiber& f, const std::shared_ptr<Arena>& A);

// catalog of bundled example inputs (golden data for the worked examples)
std::vector<std::string> bundled_names();
MultipletFiber bundled_fiber(const std::string& name);
PresentedRModule bundled_module(const std::string& name);
SemifreeDGModule bundled_semifree(const std::string& name);
LoadedInput bundled_example(const std::string& name);

} // namespace mf
