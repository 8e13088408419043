#include "mf/cohomology.hpp"
#include "mf/error.hpp"
#include "mf/functors.hpp"
#include "mf/log.hpp"
#include "mf/module_io.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace mf {

namespace {

PresentedRModule simple_module(const char* name, const AlgebraSpec& alg, Bidegree gen_deg,
                               std::vector<std::vector<std::pair<std::vector<uint16_t>, Rat>>> rels,
                               bool rmod_i) {
    PresentedRModule m;
    m.algebra = alg;
    m.name = name;
    ModGen g;
    g.name = "e";
    g.deg = gen_deg;
    m.gens.push_back(g);
    for (auto& rel : rels) {
        std::vector<PolyEntry> r;
        for (auto& [exps, c] : rel) {
            PolyEntry t;
            t.tgt = 0;
            t.exps = exps;
            t.c = c;
            r.push_back(std::move(t));
        }
        m.relations.push_back(std::move(r));
    }
    m.rmod_i = rmod_i;
    return m;
}

std::vector<uint16_t> exps1(int n, int a, int pow = 1) {
    std::vector<uint16_t> e(size_t(n), 0);
    e[size_t(a)] = uint16_t(pow);
    return e;
}

// The dual (antifield) fiber: fields reflected by (w,d) -> (w_top - w, d_top - d),
// operators super-transposed with delta -> -delta. The transpose sign rule is
// fixed by requiring the closure convention to hold; it is found once,
// deterministically, among the Koszul-sign candidates.
MultipletFiber dual_fiber_with_signs(const MultipletFiber& F, int w_top, int d_top, int s_par,
                                     int s_pair) {
    MultipletFiber D;
    D.algebra = F.algebra;
    D.name = F.name + "_dual";
    int n = int(F.fields.size());
    for (int i = 0; i < n; ++i) {
        const ModGen& g = F.fields[size_t(i)];
        ModGen d;
        d.name = g.name + "^";
        d.deg = {w_top - g.deg.w, d_top - g.deg.d};
        d.level = d_top - g.effective_level();
        D.fields.push_back(std::move(d));
    }
    auto flip = [&](const std::vector<PolyEntry>& in) {
        std::vector<PolyEntry> out;
        for (const auto& t : in) {
            PolyEntry e;
            e.src = t.tgt;
            e.tgt = t.src;
            e.exps = t.exps;
            int k = 0;
            for (auto x : t.exps) k += x;
            int ps = F.fields[size_t(t.src)].deg.parity();
            int pt = F.fields[size_t(t.tgt)].deg.parity();
            int sign = 1;
            if (k & 1) sign = -sign;                 // delta -> -delta
            if (s_par && (ps & 1)) sign = -sign;     // super-transpose candidate
            if (s_pair && (ps & pt & 1)) sign = -sign;
            e.c = t.c * sign;
            out.push_back(std::move(e));
        }
        return out;
    };
    D.d0 = flip(F.d0);
    D.rho1.resize(F.rho1.size());
    for (size_t a = 0; a < F.rho1.size(); ++a) D.rho1[a] = flip(F.rho1[a]);
    D.rho2.resize(F.rho2.size());
    for (size_t p = 0; p < F.rho2.size(); ++p) D.rho2[p] = flip(F.rho2[p]);
    return D;
}

std::vector<MultipletFiber> dual_fiber_candidates(const MultipletFiber& F, int w_top, int d_top) {
    std::vector<MultipletFiber> out;
    for (int s_par : {0, 1})
        for (int s_pair : {0, 1}) {
            MultipletFiber D = dual_fiber_with_signs(F, w_top, d_top, s_par, s_pair);
            try {
                D.validate();
                out.push_back(std::move(D));
            } catch (const Error&) {
            }
        }
    return out;
}

MultipletFiber dual_fiber(const MultipletFiber& F, int w_top, int d_top) {
    auto cands = dual_fiber_candidates(F, w_top, d_top);
    if (cands.empty())
        fail(Errc::internal,
             "dual_fiber: no transpose sign rule satisfies the closure convention for " + F.name);
    return cands.front();
}

// union of two fibers plus an undetermined pairing differential from the
// first to the second, solved so the closure convention holds; the solution
// chosen is the canonical one with a nonzero order-zero entry between the
// requested bidegrees.
MultipletFiber glue_with_pairing(const MultipletFiber& B, const MultipletFiber& Bv,
                                 const std::string& name, Bidegree need_src, Bidegree need_tgt) {
    hard_assert(B.algebra.n1 == Bv.algebra.n1 && B.algebra.n2 == Bv.algebra.n2,
                "glue: algebra mismatch");
    MultipletFiber G;
    G.algebra = B.algebra;
    G.name = name;
    for (const auto& g : B.fields) G.fields.push_back(g);
    int off = int(B.fields.size());
    for (auto g : Bv.fields) G.fields.push_back(g);
    auto shift = [&](std::vector<PolyEntry> v) {
        for (auto& t : v) {
            t.src += off;
            t.tgt += off;
        }
        return v;
    };
    G.d0 = B.d0;
    for (auto& t : shift(Bv.d0)) G.d0.push_back(t);
    G.rho1.resize(size_t(G.algebra.n1));
    for (int a = 0; a < G.algebra.n1; ++a) {
        G.rho1[size_t(a)] = B.rho1[size_t(a)];
        for (auto& t : shift(Bv.rho1[size_t(a)])) G.rho1[size_t(a)].push_back(t);
    }
    int npairs = G.algebra.n1 * (G.algebra.n1 + 1) / 2;
    G.rho2.resize(size_t(npairs));
    for (int p = 0; p < npairs; ++p) {
        G.rho2[size_t(p)] = B.rho2[size_t(p)];
        for (auto& t : shift(Bv.rho2[size_t(p)])) G.rho2[size_t(p)].push_back(t);
    }

    // candidate pairing entries: B-field -> Bv-field obeying the bidegree rule
    struct Slot {
        int src, tgt;
        std::vector<uint16_t> exps;
    };
    std::vector<Slot> slots;
    const int n2 = G.algebra.n2;
    auto delta_monos = [&](int k) {
        std::vector<std::vector<uint16_t>> out;
        std::vector<uint16_t> cur(size_t(n2), 0);
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == n2) {
                if (left == 0) out.push_back(cur);
                return;
            }
            for (int x = 0; x <= left; ++x) {
                cur[size_t(pos)] = uint16_t(x);
                rec(pos + 1, left - x);
            }
            cur[size_t(pos)] = 0;
        };
        rec(0, k);
        return out;
    };
    for (int s = 0; s < off; ++s)
        for (int t = off; t < int(G.fields.size()); ++t) {
            Bidegree ds = G.fields[size_t(s)].deg, dt = G.fields[size_t(t)].deg;
            if (dt.d != ds.d + 1) continue;
            int dw = dt.w - ds.w;
            if (dw < 0 || dw % 2) continue;
            for (auto& m : delta_monos(dw / 2)) slots.push_back({s, t, m});
        }
    hard_assert(!slots.empty(), "glue: no admissible pairing slots");

    // residual of the closure check, linear in the slot coefficients
    auto A = std::make_shared<Arena>(G.algebra.n1, G.algebra.n2, 0, G.algebra.n2, [&] {
        std::vector<ArenaGen> gens;
        for (const auto& g : G.fields) gens.push_back({g.name, g.deg, g.effective_level(), ""});
        return gens;
    }());

    // d^2 signature on the spanning set of terms with at most two ring
    // letters (which determines the anticommutators of all summands)
    auto span_terms = [&] {
        std::vector<FullTerm> ts;
        int n = A->ring().size();
        Mono one = Mono::one(A->ring());
        std::vector<Mono> monos{one};
        for (int i = 0; i < n; ++i) {
            Mono m = one;
            m.e[size_t(i)] = 1;
            monos.push_back(m);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                if (i == j && A->ring().gens[size_t(i)].odd()) continue;
                Mono m = one;
                m.e[size_t(i)] = uint16_t(m.e[size_t(i)] + 1);
                m.e[size_t(j)] = uint16_t(m.e[size_t(j)] + 1);
                monos.push_back(m);
            }
        for (int g = 0; g < int(A->gens().size()); ++g)
            for (const auto& m : monos) ts.push_back({m, g});
        return ts;
    }();

    auto residual = [&](const MultipletFiber& f) {
        std::map<std::pair<FullTerm, FullTerm>, Rat> sig;
        auto ops = fiber_ce_ops(f, A);
        for (const auto& t : span_terms) {
            FullElem e;
            e.add(t, Rat(1));
            FullElem twice = apply_sum(ops, apply_sum(ops, e));
            for (const auto& [tt, cc] : twice.t) sig[{t, tt}] = cc;
        }
        return sig;
    };

    // base residual must vanish (both halves are valid fibers, no cross terms)
    {
        auto base = residual(G);
        hard_assert(base.empty(), "glue: base residual nonzero");
    }
    // columns: residual with one slot switched on
    std::map<std::pair<FullTerm, FullTerm>, int> rows;
    std::vector<SparseVec> cols;
    for (const auto& sl : slots) {
        MultipletFiber f = G;
        PolyEntry t;
        t.src = sl.src;
        t.tgt = sl.tgt;
        t.exps = sl.exps;
        t.c = Rat(1);
        f.d0.push_back(t);
        auto sig = residual(f);
        SparseVec col;
        for (auto& [key, c] : sig) {
            auto [it, ok] = rows.try_emplace(key, int(rows.size()));
            col.set(it->second, c);
        }
        cols.push_back(std::move(col));
    }
    Mat m(int(rows.size()), int(slots.size()));
    for (size_t j = 0; j < cols.size(); ++j) m.col[j] = cols[j];
    ColSpace cs = column_space(m);
    hard_assert(!cs.kernel.empty(), "glue: no invariant pairing exists");

    // canonical choice: greedily accumulate kernel vectors until the
    // order-zero block between the requested bidegrees has full rank (every
    // source field is paired)
    std::vector<int> src_ids, tgt_ids;
    for (int i = 0; i < int(G.fields.size()); ++i) {
        if (G.fields[size_t(i)].deg == need_src) src_ids.push_back(i);
        if (G.fields[size_t(i)].deg == need_tgt) tgt_ids.push_back(i);
    }
    auto pair_block = [&](const SparseVec& k) {
        Mat m(int(tgt_ids.size()), int(src_ids.size()));
        for (const auto& [j, c] : k.e) {
            const Slot& sl = slots[size_t(j)];
            int kdeg = 0;
            for (auto x : sl.exps) kdeg += x;
            if (kdeg) continue;
            auto si = std::find(src_ids.begin(), src_ids.end(), sl.src);
            auto ti = std::find(tgt_ids.begin(), tgt_ids.end(), sl.tgt);
            if (si == src_ids.end() || ti == tgt_ids.end()) continue;
            m.col[size_t(si - src_ids.begin())].set(int(ti - tgt_ids.begin()), c);
        }
        return m;
    };
    SparseVec chosen;
    int rank = 0;
    for (const auto& k : cs.kernel) {
        SparseVec trial = chosen;
        trial.axpy(Rat(1), k);
        int r = column_space(pair_block(trial)).rank();
        if (r > rank) {
            chosen = std::move(trial);
            rank = r;
        }
        if (rank == int(src_ids.size())) break;
    }
    if (rank != int(src_ids.size()))
        fail(Errc::mismatch, "glue: no pairing of full rank on the requested slot");
    MultipletFiber f = G;
    for (const auto& [j, c] : chosen.e) {
        PolyEntry t;
        t.src = slots[size_t(j)].src;
        t.tgt = slots[size_t(j)].tgt;
        t.exps = slots[size_t(j)].exps;
        t.c = c;
        f.d0.push_back(std::move(t));
    }
    f.validate();
    return f;
}

// Builders are lazy and memoized: a CLI run pays only for the examples it
// touches (the 4d constructions run whole pipelines).
struct BundledData {
    std::map<std::string, std::function<LoadedInput()>> builders;
    std::vector<std::string> names;
    std::map<std::string, LoadedInput> cache;
    std::mutex mu;

    void reg(const std::string& n, std::function<LoadedInput()> b) {
        builders.emplace(n, std::move(b));
        names.push_back(n);
    }
};

LoadedInput bundled_get(const std::string& name);

BundledData& bundled() {
    static BundledData d;
    static std::once_flag once;
    std::call_once(once, [] {
        BundledData& b = d;
        b.reg("3d-H0", [] { return lie_cohomology_module(build_ce(preset("3dN1")), 0, 8); });
        b.reg("3d-Hm1", [] { return lie_cohomology_module(build_ce(preset("3dN1")), -1, 8); });
        b.reg("free-3d", [] {
            PresentedRModule f = simple_module("free-3d", preset("3dN1"), {0, 0}, {}, false);
            f.validate(8);
            return f;
        });
        b.reg("4d-symS+", [] {
            PresentedRModule sp = simple_module("4d-symS+", preset("4dN1"), {0, 0},
                                                {{{exps1(4, 2), Rat(1)}}, {{exps1(4, 3), Rat(1)}}},
                                                true);
            sp.validate(8);
            return sp;
        });
        b.reg("4d-symS-", [] {
            PresentedRModule sm = simple_module("4d-symS-", preset("4dN1"), {0, 0},
                                                {{{exps1(4, 0), Rat(1)}}, {{exps1(4, 1), Rat(1)}}},
                                                true);
            sm.validate(8);
            return sm;
        });
        b.reg("qm1-hyp", [] {
            PresentedRModule h =
                simple_module("qm1-hyp", preset("qm1"), {0, 0}, {{{exps1(1, 0, 2), Rat(1)}}}, true);
            h.validate(8);
            return h;
        });
        b.reg("qm2-hyp", [] {
            PresentedRModule h = simple_module(
                "qm2-hyp", preset("qm2"), {0, 0},
                {{{exps1(2, 0, 2), Rat(1)}, {exps1(2, 1, 2), Rat(1)}}}, true);
            h.validate(8);
            return h;
        });
        b.reg("4d-RI", [] {
            PresentedRModule m = lie_cohomology_module(build_ce(preset("4dN1")), 0, 8);
            m.name = "4d-RI";
            return m;
        });
        b.reg("3d-CE", [] {
            SemifreeDGModule ce_self;
            ce_self.algebra = preset("3dN1");
            ce_self.name = "3d-CE";
            ModGen g;
            g.name = "1";
            g.deg = {0, 0};
            g.level = 0;
            ce_self.gens.push_back(g);
            ce_self.validate(8);
            return ce_self;
        });
        b.reg("3d-gauge", [] {
            PresentedRModule h0 = std::get<PresentedRModule>(bundled_get("3d-H0"));
            MultipletFiber f = mu_A_underived(h0, 8).minimal.as_fiber();
            f.name = "3d-gauge";
            return f;
        });
        b.reg("trivial-scalar", [] {
            MultipletFiber f;
            f.algebra = preset("translations3");
            f.name = "trivial-scalar";
            ModGen g;
            g.name = "phi";
            g.deg = {0, 0};
            f.fields.push_back(g);
            f.validate();
            return f;
        });
        b.reg("4d-vector", [] {
            PresentedRModule ri4 = std::get<PresentedRModule>(bundled_get("4d-RI"));
            MultipletFiber vec = mu_A_underived(ri4, 6).minimal.as_fiber();
            vec.name = "4d-vector";
            return vec;
        });
        b.reg("4d-vector-antifield", [] {
            MultipletFiber vec = std::get<MultipletFiber>(bundled_get("4d-vector"));
            int wtop = 0;
            for (const auto& g : vec.fields) wtop = std::max(wtop, g.deg.w);
            MultipletFiber av = dual_fiber(vec, wtop, 1);
            av.name = "4d-vector-antifield";
            return av;
        });
        b.reg("4d-chiral-brst", [] {
            PresentedRModule both =
                direct_sum(std::get<PresentedRModule>(bundled_get("4d-symS+")),
                           std::get<PresentedRModule>(bundled_get("4d-symS-")));
            both.name = "4d-chiral-brst-module";
            MultipletFiber brst = mu_A_underived(both, 6).minimal.as_fiber();
            brst.name = "4d-chiral-brst";
            return brst;
        });
        b.reg("4d-chiral-offshell", [] {
            MultipletFiber brst = std::get<MultipletFiber>(bundled_get("4d-chiral-brst"));
            int wtop = 0;
            for (const auto& g : brst.fields) wtop = std::max(wtop, g.deg.w);
            // the pairing slot: the auxiliary scalar at (2,0) must map to its
            // dual at (2,1) by an order-0 full-rank block; the dual
            // transpose-sign variant is the one admitting such a pairing
            for (const auto& anti : dual_fiber_candidates(brst, wtop + 2, 1)) {
                try {
                    return LoadedInput{
                        glue_with_pairing(brst, anti, "4d-chiral-offshell", {2, 0}, {2, 1})};
                } catch (const Error& e) {
                    if (e.code != Errc::mismatch) throw;
                }
            }
            fail(Errc::internal, "no dual variant admits the BV pairing");
        });
        b.reg("4d-chiral-onshell", [] {
            MultipletFiber off = std::get<MultipletFiber>(bundled_get("4d-chiral-offshell"));
            MultipletFiber onf = minimalize_fiber(off).as_fiber();
            onf.name = "4d-chiral-onshell";
            return onf;
        });
    });
    return d;
}

LoadedInput bundled_get(const std::string& name) {
    BundledData& d = bundled();
    {
        std::lock_guard<std::mutex> lk(d.mu);
        auto it = d.cache.find(name);
        if (it != d.cache.end()) return it->second;
    }
    auto bit = d.builders.find(name);
    if (bit == d.builders.end()) fail(Errc::schema_error, "unknown bundled example '" + name + "'");
    LoadedInput in = bit->second();
    std::lock_guard<std::mutex> lk(d.mu);
    d.cache.emplace(name, in);
    return in;
}

} // namespace

std::vector<std::string> bundled_names() { return bundled().names; }

LoadedInput bundled_example(const std::string& name) { return bundled_get(name); }

MultipletFiber bundled_fiber(const std::string& name) {
    LoadedInput in = bundled_example(name);
    if (auto* f = std::get_if<MultipletFiber>(&in)) return *f;
    fail(Errc::schema_error, "bundled example '" + name + "' is not a fiber");
}

PresentedRModule bundled_module(const std::string& name) {
    LoadedInput in = bundled_example(name);
    if (auto* m = std::get_if<PresentedRModule>(&in)) return *m;
    fail(Errc::schema_error, "bundled example '" + name + "' is not a presented module");
}

SemifreeDGModule bundled_semifree(const std::string& name) {
    LoadedInput in = bundled_example(name);
    if (auto* m = std::get_if<SemifreeDGModule>(&in)) return *m;
    fail(Errc::schema_error, "bundled example '" + name + "' is not a semifree module");
}

} // namespace mf
