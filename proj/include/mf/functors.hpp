#pragma once

#include "mf/cohomology.hpp"
#include "mf/module_io.hpp"
#include "mf/resolution.hpp"
#include "mf/transfer.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mf {

// Finite-rank component multiplet: fields with (w,d) positions and levels,
// differential and action matrices with delta-polynomial entries split by
// derivative order. Field provenance (source cohomology level, resolution
// column) is kept in the generator notes.
struct ComponentMultiplet {
    AlgebraSpec algebra;
    std::string name;
    std::vector<ModGen> fields;
    std::vector<PolyEntry> dprime;
    std::vector<std::vector<PolyEntry>> rho1; // n1 rows
    std::vector<std::vector<PolyEntry>> rho2; // n1(n1+1)/2 rows, pair-indexed
    int cutoff = 0;
    std::vector<std::string> banners;

    MultipletFiber as_fiber() const; // revalidates all structure
    std::map<Bidegree, int> dims() const;
    // differential summand orders present, with per-order entry counts
    std::map<int, int> dprime_orders() const;
    bool rho2_nonzero() const;
};

struct MuResult {
    // direct sum of the per-level minimal multiplets, with the transferred
    // cross differentials
    ComponentMultiplet assembled;
    // after contracting the weight-preserving acyclic part of the differential
    ComponentMultiplet minimal;
};

struct MuOptions {
    int arena_margin = 8; // extra weight room for homotopies above the cutoff
    int class_margin = 2; // extra class-enumeration room above the cutoff
    bool check_higher_homotopy = true;
};

MuResult mu_A_underived(const PresentedRModule& M, int W, const MuOptions& opt = {});
MuResult mu_A_derived(const SemifreeDGModule& G, int W, const MuOptions& opt = {});

// Contracts the acyclic part of the order-zero differential of a fiber and
// transfers the rest of the structure (the on-shell reduction).
ComponentMultiplet minimalize_fiber(const MultipletFiber& F, const MuOptions& opt = {});

struct InvariantsResult {
    AlgebraSpec algebra;
    std::string name;
    int cutoff = 0;
    std::map<int, std::vector<int>> hilbert; // totalized degree -> dims per weight
    bool concentrated = false;
    std::vector<int> degrees; // degrees with nonzero coefficients
    std::map<int, PresentedRModule> modules;
    SemifreeDGModule as_semifree; // gens = fields, d = zero-order invariants differential
};

InvariantsResult derived_invariants(const MultipletFiber& F, int W);

struct RecognizeResult {
    bool underived = false;
    std::vector<int> degrees;
    InvariantsResult inv;
};

RecognizeResult recognize_underived(const MultipletFiber& F, int W);

struct RoundtripReport {
    bool pass = true;
    struct Check {
        std::string what;
        bool ok;
        std::string detail;
    };
    std::vector<Check> checks;

    void add(const std::string& what, bool ok, const std::string& detail = "");
    std::string first_mismatch() const;
};

RoundtripReport roundtrip(const LoadedInput& in, int W);

// dimension array keyed by (w-d, d) in the sheared layout used for display
std::map<std::pair<int, int>, int> sheared_dims(const std::vector<ModGen>& fields);

} // namespace mf
