#pragma once

#include "mf/bidegree.hpp"
#include "mf/rat.hpp"
#include "mf/super_poly.hpp"

#include <string>
#include <vector>

namespace mf {

// Supertranslation algebra: odd part of dimension n1 (weight 1), even center
// of dimension n2 (weight 2), bracket [d_a, d_b] = f^m_{ab} e_m with f
// symmetric in (a, b). n1 = 0 is allowed (pure translations).
struct AlgebraSpec {
    std::string name;
    int n1 = 0;
    int n2 = 0;
    // f[mu][alpha][beta], symmetric in the last two indices
    std::vector<std::vector<std::vector<Rat>>> f;
    std::vector<std::string> labels_odd;  // optional annotations
    std::vector<std::string> labels_even;

    void validate() const;
    Rat f_at(int mu, int a, int b) const { return f[size_t(mu)][size_t(a)][size_t(b)]; }
};

// catalog of worked examples; lookup by name
const std::vector<AlgebraSpec>& presets();
AlgebraSpec preset(const std::string& name);

// Chevalley-Eilenberg algebra of the supertranslation algebra: free
// supercommutative algebra on lambdas (even, (1,1)) and vees (odd, (2,1)),
// with d_CE v^m = lambda f^m lambda.
struct CEAlgebra {
    AlgebraSpec spec;
    GeneratorTable table; // lambdas then vees
    Derivation d_ce;
    std::vector<SuperPoly> ideal; // quadratic ideal generators = d_ce images of the vees

    int lambda_index(int a) const { return a; }
    int vee_index(int m) const { return spec.n1 + m; }
};

CEAlgebra build_ce(const AlgebraSpec& spec);

// JSON (de)serialization of AlgebraSpec; the symmetric closure of f is
// completed automatically and conflicting duplicate entries are rejected.
std::string algebra_to_json(const AlgebraSpec& spec);
AlgebraSpec algebra_from_json(const std::string& text);

} // namespace mf
