#pragma once

#include "mf/bidegree.hpp"
#include "mf/error.hpp"
#include "mf/rat.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mf {

enum class GenKind { lambda, theta, vee, delta, custom };

// Standard kinds carry fixed bidegrees: lambda (1,1), theta (1,0), vee (2,1),
// delta (2,0). Total parity (w+d) mod 2 makes lambda/delta even and
// theta/vee odd.
Bidegree standard_bidegree(GenKind k);

struct Generator {
    std::string name;
    GenKind kind = GenKind::custom;
    Bidegree deg;

    int parity() const { return deg.parity(); }
    bool odd() const { return parity() == 1; }
};

struct GeneratorTable {
    std::vector<Generator> gens;

    int size() const { return int(gens.size()); }
    int index_of(const std::string& name) const; // -1 if absent
    void validate() const;                       // unique names, standard bidegrees
    bool operator==(const GeneratorTable&) const = default;
};

// Monomial in normal order (table order); odd exponents are 0/1.
struct Mono {
    std::vector<uint16_t> e;

    static Mono one(const GeneratorTable& t) { return Mono{std::vector<uint16_t>(t.gens.size(), 0)}; }
    static Mono gen(const GeneratorTable& t, int i);
    Bidegree degree(const GeneratorTable& t) const;
    int parity(const GeneratorTable& t) const;
    int total_exp(int i) const { return e[i]; }
    bool is_one() const;
    auto operator<=>(const Mono&) const = default;
};

// (m1 * m2, sign); nullopt when an odd generator squares.
std::optional<std::pair<Mono, int>> mono_mul(const GeneratorTable& t, const Mono& a, const Mono& b);

// Free supercommutative polynomial: monomial -> coefficient, no zeros stored.
struct SuperPoly {
    std::map<Mono, Rat> terms;

    bool zero() const { return terms.empty(); }
    static SuperPoly unit(const GeneratorTable& t) { return monomial(Mono::one(t), Rat(1)); }
    static SuperPoly monomial(Mono m, Rat c);
    static SuperPoly generator(const GeneratorTable& t, int i) { return monomial(Mono::gen(t, i), Rat(1)); }

    SuperPoly& add(const Mono& m, Rat c);
    SuperPoly& axpy(const Rat& c, const SuperPoly& o);
    SuperPoly operator+(const SuperPoly& o) const;
    SuperPoly operator-() const;

    // Homogeneity helpers; fail(Errc::internal) when inhomogeneous.
    std::optional<Bidegree> homogeneous_degree(const GeneratorTable& t) const;
    int parity(const GeneratorTable& t) const;
};

SuperPoly multiply(const GeneratorTable& t, const SuperPoly& a, const SuperPoly& b);

// Graded derivation: determined by generator images, extended by the Koszul
// signed Leibniz rule. `parity` is the derivation's own parity.
struct Derivation {
    const GeneratorTable* table = nullptr;
    int parity = 1;
    Bidegree shift{0, 1};
    std::vector<SuperPoly> images; // per generator

    void validate() const; // images homogeneous of deg(gen) + shift
};

SuperPoly apply_derivation(const Derivation& d, const SuperPoly& p);

// All monomials with weight within [0, w_max] and degree within
// [d_min, d_max], in canonical (Mono) order. Requires every generator to have
// positive weight.
std::vector<Mono> enumerate_monomials(const GeneratorTable& t, int w_max, int d_min, int d_max);

std::string mono_str(const GeneratorTable& t, const Mono& m);
std::string poly_str(const GeneratorTable& t, const SuperPoly& p);

} // namespace mf
