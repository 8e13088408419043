#include "mf/super_poly.hpp"

#include <doctest.h>

#include <cstdint>

using namespace mf;

namespace {

GeneratorTable table_3d_full() {
    // lambda^1,2 (1,1) even; v^1..3 (2,1) odd; theta^1,2 (1,0) odd
    GeneratorTable t;
    t.gens.push_back({"l1", GenKind::lambda, {1, 1}});
    t.gens.push_back({"l2", GenKind::lambda, {1, 1}});
    t.gens.push_back({"v1", GenKind::vee, {2, 1}});
    t.gens.push_back({"v2", GenKind::vee, {2, 1}});
    t.gens.push_back({"v3", GenKind::vee, {2, 1}});
    t.gens.push_back({"t1", GenKind::theta, {1, 0}});
    t.gens.push_back({"t2", GenKind::theta, {1, 0}});
    return t;
}

struct Lcg {
    uint64_t s;
    explicit Lcg(uint64_t seed) : s(seed) {}
    uint64_t next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return s >> 33;
    }
    int range(int lo, int hi) { return lo + int(next() % uint64_t(hi - lo + 1)); }
};

Mono random_mono(Lcg& rng, const GeneratorTable& t) {
    Mono m = Mono::one(t);
    for (size_t i = 0; i < t.gens.size(); ++i)
        m.e[i] = uint16_t(t.gens[i].odd() ? rng.range(0, 1) : rng.range(0, 2));
    return m;
}

} // namespace

TEST_CASE("odd squares vanish, odd-odd anticommute, evens central") {
    GeneratorTable t = table_3d_full();
    SuperPoly th1 = SuperPoly::generator(t, 5);
    SuperPoly th2 = SuperPoly::generator(t, 6);
    SuperPoly l1 = SuperPoly::generator(t, 0);
    SuperPoly v1 = SuperPoly::generator(t, 2);

    CHECK(multiply(t, th1, th1).zero());
    SuperPoly a = multiply(t, th1, th2);
    SuperPoly b = multiply(t, th2, th1);
    b.axpy(Rat(1), a);
    CHECK(b.zero()); // th1*th2 = -(th2*th1)

    SuperPoly lv = multiply(t, l1, v1);
    SuperPoly vl = multiply(t, v1, l1);
    vl.axpy(Rat(-1), lv);
    CHECK(vl.zero()); // lambda even: commutes
}

TEST_CASE("associativity and sign-correct supercommutativity on random monomials") {
    GeneratorTable t = table_3d_full();
    Lcg rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        SuperPoly x = SuperPoly::monomial(random_mono(rng, t), rat(rng.range(1, 3)));
        SuperPoly y = SuperPoly::monomial(random_mono(rng, t), rat(rng.range(1, 3)));
        SuperPoly z = SuperPoly::monomial(random_mono(rng, t), rat(rng.range(1, 3)));
        SuperPoly xy_z = multiply(t, multiply(t, x, y), z);
        SuperPoly x_yz = multiply(t, x, multiply(t, y, z));
        x_yz.axpy(Rat(-1), xy_z);
        CHECK(x_yz.zero());

        // supercommutativity x y = (-1)^{|x||y|} y x
        SuperPoly xy = multiply(t, x, y);
        SuperPoly yx = multiply(t, y, x);
        int sgn = (x.parity(t) * y.parity(t)) & 1 ? -1 : 1;
        yx.axpy(Rat(-sgn), xy);
        CHECK(yx.zero());

        // bidegree additivity on homogeneous inputs
        if (!xy.zero()) {
            auto dx = x.homogeneous_degree(t);
            auto dy = y.homogeneous_degree(t);
            auto dxy = xy.homogeneous_degree(t);
            CHECK(*dxy == *dx + *dy);
        }
    }
}

TEST_CASE("d_CE on the 3d preset sends v1 to l1^2 and kills lambdas") {
    GeneratorTable t = table_3d_full();
    Derivation d;
    d.table = &t;
    d.parity = 1;
    d.shift = {0, 1};
    d.images.assign(t.gens.size(), SuperPoly{});
    // d v1 = l1^2, d v2 = l1 l2, d v3 = l2^2
    Mono l1l1 = Mono::one(t);
    l1l1.e[0] = 2;
    Mono l1l2 = Mono::one(t);
    l1l2.e[0] = 1;
    l1l2.e[1] = 1;
    Mono l2l2 = Mono::one(t);
    l2l2.e[1] = 2;
    d.images[2] = SuperPoly::monomial(l1l1, Rat(1));
    d.images[3] = SuperPoly::monomial(l1l2, Rat(1));
    d.images[4] = SuperPoly::monomial(l2l2, Rat(1));
    d.validate();

    SuperPoly v1 = SuperPoly::generator(t, 2);
    CHECK(poly_str(t, apply_derivation(d, v1)) == "l1^2");
    SuperPoly l1 = SuperPoly::generator(t, 0);
    CHECK(apply_derivation(d, l1).zero());

    // d^2 = 0 on a sample of monomials
    Lcg rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        SuperPoly x = SuperPoly::monomial(random_mono(rng, t), Rat(1));
        CHECK(apply_derivation(d, apply_derivation(d, x)).zero());
    }

    // graded Leibniz on random pairs
    for (int trial = 0; trial < 40; ++trial) {
        SuperPoly x = SuperPoly::monomial(random_mono(rng, t), Rat(1));
        SuperPoly y = SuperPoly::monomial(random_mono(rng, t), Rat(1));
        SuperPoly lhs = apply_derivation(d, multiply(t, x, y));
        SuperPoly rhs = multiply(t, apply_derivation(d, x), y);
        int sgn = (x.parity(t) & 1) ? -1 : 1;
        rhs.axpy(Rat(sgn), multiply(t, x, apply_derivation(d, y)));
        rhs.axpy(Rat(-1), lhs);
        CHECK(rhs.zero());
    }
}

TEST_CASE("SUSY QM N=2 differential") {
    GeneratorTable t;
    t.gens.push_back({"l1", GenKind::lambda, {1, 1}});
    t.gens.push_back({"l2", GenKind::lambda, {1, 1}});
    t.gens.push_back({"v1", GenKind::vee, {2, 1}});
    Derivation d;
    d.table = &t;
    d.parity = 1;
    d.shift = {0, 1};
    d.images.assign(3, SuperPoly{});
    Mono sq1 = Mono::one(t);
    sq1.e[0] = 2;
    Mono sq2 = Mono::one(t);
    sq2.e[1] = 2;
    SuperPoly im = SuperPoly::monomial(sq1, Rat(1));
    im.add(sq2, Rat(1));
    d.images[2] = im;
    d.validate();
    CHECK(poly_str(t, apply_derivation(d, SuperPoly::generator(t, 2))) == "l2^2 + l1^2");
}

TEST_CASE("monomial enumeration dims") {
    // C[l1,l2]: dims 1,2,3 at w=0,1,2
    GeneratorTable t2;
    t2.gens.push_back({"l1", GenKind::lambda, {1, 1}});
    t2.gens.push_back({"l2", GenKind::lambda, {1, 1}});
    auto monos = enumerate_monomials(t2, 2, 0, 10);
    int d0 = 0, d1 = 0, d2 = 0;
    for (const auto& m : monos) {
        int w = m.degree(t2).w;
        d0 += w == 0;
        d1 += w == 1;
        d2 += w == 2;
    }
    CHECK(d0 == 1);
    CHECK(d1 == 2);
    CHECK(d2 == 3);

    // Lambda[v1] (x) C[l1]: dims 1,1,2,2 at w=0..3
    GeneratorTable tv;
    tv.gens.push_back({"l1", GenKind::lambda, {1, 1}});
    tv.gens.push_back({"v1", GenKind::vee, {2, 1}});
    auto mv = enumerate_monomials(tv, 3, 0, 10);
    int c[4] = {0, 0, 0, 0};
    for (const auto& m : mv) c[m.degree(tv).w]++;
    CHECK(c[0] == 1);
    CHECK(c[1] == 1);
    CHECK(c[2] == 2);
    CHECK(c[3] == 2);

    // empty table: the unit monomial only
    GeneratorTable te;
    CHECK(enumerate_monomials(te, 5, 0, 5).size() == 1);

    // non-positive weight rejected
    GeneratorTable tb;
    tb.gens.push_back({"x", GenKind::custom, {0, 1}});
    CHECK_THROWS_AS((void)enumerate_monomials(tb, 2, 0, 2), Error);
}
