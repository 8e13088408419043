#include "mf/linalg.hpp"

#include <doctest.h>

#include <cstdint>
#include <sstream>

using namespace mf;

namespace {

// deterministic test rng (no external seeding anywhere)
struct Lcg {
    uint64_t s;
    explicit Lcg(uint64_t seed) : s(seed) {}
    uint64_t next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return s >> 33;
    }
    int range(int lo, int hi) { return lo + int(next() % uint64_t(hi - lo + 1)); }
};

Mat random_mat(Lcg& rng, int rows, int cols, int density_pct) {
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            if (rng.range(0, 99) < density_pct) {
                int num = rng.range(-4, 4);
                int den = rng.range(1, 3);
                if (num != 0) m.col[j].set(i, rat(num, den));
            }
    return m;
}

} // namespace

TEST_CASE("rref: identity 2x2") {
    Mat m = Mat::identity(2);
    auto r = rref(m);
    CHECK(r.rank == 2);
    CHECK(r.kernel.empty());
    CHECK(r.pivots == std::set<int>{0, 1});
}

TEST_CASE("rref: zero 3x2") {
    Mat m(3, 2);
    auto r = rref(m);
    CHECK(r.rank == 0);
    CHECK(r.kernel.size() == 2); // full source
}

TEST_CASE("rref: rank-1 with kernel (-2,1)") {
    // columns of [[1,2],[2,4]]: col0=(1,2), col1=(2,4)
    Mat m(2, 2);
    m.col[0].set(0, rat(1));
    m.col[0].set(1, rat(2));
    m.col[1].set(0, rat(2));
    m.col[1].set(1, rat(4));
    auto r = rref(m);
    CHECK(r.rank == 1);
    REQUIRE(r.kernel.size() == 1);
    // canonical reduced form of span{(-2,1)} has lead coefficient 1
    SparseVec k = r.kernel[0];
    REQUIRE(k.e.size() == 2);
    CHECK(k.e[0].first == 0);
    CHECK(k.e[0].second == rat(1));
    CHECK(k.e[1].second == rat(-1, 2));
}

TEST_CASE("rank-nullity on random matrices") {
    Lcg rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
        int rows = rng.range(1, 8), cols = rng.range(1, 8);
        Mat m = random_mat(rng, rows, cols, 40);
        ColSpace cs = column_space(m);
        CHECK(cs.rank() + int(cs.kernel.size()) == cols);
        // kernel vectors actually in the kernel
        for (const auto& k : cs.kernel) CHECK(apply(m, k).zero());
        // preimages map onto the echelon image basis
        for (size_t i = 0; i < cs.preimage.size(); ++i) {
            SparseVec got = apply(m, cs.preimage[i]);
            CHECK(got == cs.image.vecs[i]);
        }
    }
}

TEST_CASE("echelon reduce is a projection") {
    Lcg rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        Echelon e;
        for (int v = 0; v < 4; ++v) {
            SparseVec x;
            for (int i = 0; i < 6; ++i)
                if (rng.range(0, 2) == 0) x.set(i, rat(rng.range(-3, 3)));
            e.insert(std::move(x));
        }
        SparseVec y;
        for (int i = 0; i < 6; ++i) y.set(i, rat(rng.range(-3, 3)));
        SparseVec r1 = e.reduce(y);
        SparseVec r2 = e.reduce(r1);
        CHECK(r1 == r2);
        for (int lead : e.leads) CHECK(r1.at(lead) == nullptr);
    }
}

TEST_CASE("dump format") {
    Mat m(2, 2);
    m.col[0].set(1, rat(1, 2));
    std::ostringstream os;
    dump_block(os, 3, -1, m);
    CHECK(os.str() == "3 -1 2 2\n1 0 1/2\n");
}
