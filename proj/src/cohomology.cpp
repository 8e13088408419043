#include "mf/cohomology.hpp"

#include "mf/error.hpp"

#include <algorithm>
#include <climits>

namespace mf {

std::vector<int> LeveledCohomology::levels_present() const {
    std::vector<int> out;
    for (const auto& [k, v] : hilbert)
        for (int x : v)
            if (x) {
                out.push_back(k);
                break;
            }
    return out;
}

LeveledCohomology leveled_cohomology(std::shared_ptr<const Arena> A, std::vector<OpSummand> d,
                                     int cutoff, int d_lo, int d_hi) {
    LeveledCohomology H;
    H.arena = A;
    H.cutoff = cutoff;
    Window win{0, cutoff, d_lo - 1, d_hi + 1};
    H.ctr = std::make_shared<Contraction>(A, std::move(d), win);
    for (int w = 0; w <= cutoff; ++w) {
        for (int dd = d_lo; dd <= d_hi; ++dd) {
            Bidegree b{w, dd};
            if (A->basis(b, BlockKind::inner).empty()) continue;
            const auto& cls = H.ctr->classes(b);
            for (int k = 0; k < int(cls.reps.size()); ++k) {
                int lvl = cls.levels[size_t(k)];
                auto& hw = H.hilbert[lvl];
                if (int(hw.size()) <= w) hw.resize(size_t(cutoff) + 1, 0);
                hw[size_t(w)]++;
                H.classes[lvl].push_back({b, k});
            }
        }
    }
    for (auto& [k, v] : H.classes)
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return a.first.w != b.first.w ? a.first.w < b.first.w : a.first < b.first;
        });
    return H;
}

PresentedRModule extract_presentation(const LeveledCohomology& H, int level, const AlgebraSpec& alg,
                                      const std::string& name, bool rmod_i) {
    PresentedRModule M;
    M.algebra = alg;
    M.name = name;
    M.rmod_i = rmod_i;

    auto it = H.classes.find(level);
    std::vector<std::pair<Bidegree, int>> cls =
        it == H.classes.end() ? std::vector<std::pair<Bidegree, int>>{} : it->second;
    if (cls.empty()) return M; // zero module: no generators, no relations

    // dense ordering of the level's classes per weight
    std::map<int, std::vector<std::pair<Bidegree, int>>> per_w;
    for (const auto& c : cls) per_w[c.first.w].push_back(c);
    std::map<std::pair<Bidegree, int>, int> pos_in_w;
    for (auto& [w, v] : per_w)
        for (size_t i = 0; i < v.size(); ++i) pos_in_w[v[size_t(i)]] = int(i);

    const Arena& A = *H.arena;
    // lambda action on classes of this level (memoized)
    std::map<std::tuple<int, int, int>, SparseVec> act_cache;
    auto act = [&](int w, int idx, int alpha) -> SparseVec {
        auto key = std::make_tuple(w, idx, alpha);
        auto itc = act_cache.find(key);
        if (itc != act_cache.end()) return itc->second;
        const auto& [b, k] = per_w.at(w)[size_t(idx)];
        FullElem lifted = H.ctr->i_inner(b, k);
        FullElem moved;
        for (const auto& [t, c] : lifted.t) moved.axpy(Rat(1), A.mul_ring(A.lambda_at(alpha), t, c));
        auto coords = H.ctr->p_inner(moved);
        SparseVec out;
        for (const auto& [bb, v] : coords) {
            for (const auto& [kk, cc] : v.e) {
                auto itp = pos_in_w.find({bb, kk});
                hard_assert(itp != pos_in_w.end(),
                            "lambda action leaves the level (mixed-level class)");
                out.set(itp->second, cc);
            }
        }
        act_cache.emplace(key, out);
        return out;
    };

    int W = H.cutoff;
    const int n1 = alg.n1;

    // generators: classes not in lambda * H, weight-ascending
    std::vector<std::pair<int, int>> gen_ids; // (w, idx)
    for (auto& [w, v] : per_w) {
        Echelon span;
        auto prev = per_w.find(w - 1);
        if (prev != per_w.end()) {
            for (size_t i = 0; i < prev->second.size(); ++i)
                for (int a = 0; a < n1; ++a) span.insert(act(w - 1, int(i), a));
        }
        for (size_t i = 0; i < v.size(); ++i) {
            SparseVec r = span.reduce(SparseVec::unit(int(i)));
            if (!r.zero()) {
                span.insert(std::move(r));
                gen_ids.push_back({w, int(i)});
            }
        }
    }
    for (size_t g = 0; g < gen_ids.size(); ++g) {
        const auto& [w, idx] = gen_ids[size_t(g)];
        const auto& [b, k] = per_w.at(w)[size_t(idx)];
        ModGen mg;
        mg.name = "g" + std::to_string(g + 1);
        mg.deg = b;
        mg.level = level;
        M.gens.push_back(std::move(mg));
    }

    // free cover basis per weight: (gen, lambda monomial); evaluation into H
    struct CoverElt {
        int g;
        std::vector<uint16_t> exps;
        bool operator<(const CoverElt& o) const { return std::tie(g, exps) < std::tie(o.g, o.exps); }
    };
    std::map<int, std::vector<CoverElt>> cover;
    for (int w = 0; w <= W; ++w) {
        std::vector<CoverElt> v;
        for (size_t g = 0; g < gen_ids.size(); ++g) {
            int need = w - gen_ids[size_t(g)].first;
            if (need < 0) continue;
            std::vector<uint16_t> cur(size_t(n1), 0);
            std::function<void(int, int)> rec = [&](int pos, int left) {
                if (pos == n1) {
                    if (left == 0) v.push_back({int(g), cur});
                    return;
                }
                for (int kk = 0; kk <= left; ++kk) {
                    cur[size_t(pos)] = uint16_t(kk);
                    rec(pos + 1, left - kk);
                }
                cur[size_t(pos)] = 0;
            };
            rec(0, need);
        }
        std::sort(v.begin(), v.end());
        cover[w] = std::move(v);
    }
    auto cover_index = [&](int w, const CoverElt& e) {
        const auto& v = cover.at(w);
        auto itc = std::lower_bound(v.begin(), v.end(), e);
        hard_assert(itc != v.end() && !(e < *itc), "cover index missing");
        return int(itc - v.begin());
    };
    // evaluate cover elements into the level's classes
    std::map<std::pair<int, int>, SparseVec> eval_cache;
    std::function<SparseVec(int, int)> eval = [&](int w, int idx) -> SparseVec {
        auto key = std::make_pair(w, idx);
        auto itc = eval_cache.find(key);
        if (itc != eval_cache.end()) return itc->second;
        const CoverElt& e = cover.at(w)[size_t(idx)];
        SparseVec out;
        int a = -1;
        for (int i = 0; i < n1; ++i)
            if (e.exps[size_t(i)]) {
                a = i;
                break;
            }
        if (a < 0) {
            const auto& [gw, gidx] = gen_ids[size_t(e.g)];
            out.set(pos_in_w.at(per_w.at(gw)[size_t(gidx)]), Rat(1));
        } else {
            CoverElt e2 = e;
            e2.exps[size_t(a)]--;
            SparseVec prev = eval(w - 1, cover_index(w - 1, e2));
            for (const auto& [i, c] : prev.e) out.axpy(c, act(w - 1, i, a));
        }
        eval_cache.emplace(key, out);
        return out;
    };

    // relations: kernel of eval per weight, new ones modulo lambda * kernel
    std::map<int, std::vector<SparseVec>> kernels;
    for (int w = 0; w <= W; ++w) {
        int n = int(cover.at(w).size());
        if (n == 0) continue;
        int hd = per_w.count(w) ? int(per_w.at(w).size()) : 0;
        Mat m(hd, n);
        for (int j = 0; j < n; ++j) m.col[size_t(j)] = eval(w, j);
        ColSpace cs = column_space(m);
        // presentation must reproduce the Hilbert coefficients up to cutoff
        hard_assert(cs.rank() == hd, "extracted presentation misses classes at weight " + std::to_string(w));
        kernels[w] = cs.kernel;
    }
    for (int w = 0; w <= W; ++w) {
        auto itk = kernels.find(w);
        if (itk == kernels.end()) continue;
        Echelon span;
        auto itp = kernels.find(w - 1);
        if (itp != kernels.end()) {
            for (const auto& kv : itp->second)
                for (int a = 0; a < n1; ++a) {
                    SparseVec moved;
                    for (const auto& [i, c] : kv.e) {
                        CoverElt e = cover.at(w - 1)[size_t(i)];
                        e.exps[size_t(a)]++;
                        moved.set(cover_index(w, e), c);
                    }
                    span.insert(std::move(moved));
                }
        }
        for (const auto& kv : itk->second) {
            SparseVec r = span.reduce(kv);
            if (r.zero()) continue;
            span.insert(SparseVec(r));
            std::vector<PolyEntry> rel;
            for (const auto& [i, c] : r.e) {
                const CoverElt& e = cover.at(w)[size_t(i)];
                PolyEntry t;
                t.tgt = e.g;
                t.exps = e.exps;
                t.c = c;
                rel.push_back(std::move(t));
            }
            M.relations.push_back(std::move(rel));
        }
    }
    return M;
}

// --- Lie algebra cohomology --------------------------------------------------

namespace {

std::shared_ptr<Arena> ce_arena(const CEAlgebra& ce) {
    std::vector<ArenaGen> gens;
    gens.push_back({"1", {0, 0}, 0, ""});
    return std::make_shared<Arena>(ce.spec.n1, ce.spec.n2, 0, 0, std::move(gens));
}

std::vector<OpSummand> ce_ops(const CEAlgebra& ce, const std::shared_ptr<Arena>& A) {
    std::vector<OpSummand> ops;
    if (ce.spec.n2 == 0 || ce.spec.n1 == 0) return ops;
    auto images = std::make_shared<std::vector<SuperPoly>>();
    for (int m = 0; m < ce.spec.n2; ++m) {
        SuperPoly q;
        for (int a = 0; a < ce.spec.n1; ++a)
            for (int b = 0; b < ce.spec.n1; ++b) {
                Rat c = ce.spec.f_at(m, a, b);
                if (is_zero(c)) continue;
                Mono mono = Mono::one(A->ring());
                mono.e[size_t(A->lambda_at(a))] = uint16_t(mono.e[size_t(A->lambda_at(a))] + 1);
                mono.e[size_t(A->lambda_at(b))] = uint16_t(mono.e[size_t(A->lambda_at(b))] + 1);
                q.add(mono, c);
            }
        images->push_back(std::move(q));
    }
    int n2 = ce.spec.n2;
    ops.push_back({"d_CE", {0, 1}, [A, images, n2](const FullTerm& t, const Rat& c) {
                       FullElem r;
                       for (int m = 0; m < n2; ++m)
                           r.axpy(Rat(1), A->derive_at(A->vee_at(m), (*images)[size_t(m)], 1, t, c));
                       return r;
                   }});
    return ops;
}

} // namespace

int CohomologyTable::dim(int k, int w) const {
    auto it = hilbert.find(k);
    if (it == hilbert.end() || w < 0 || w >= int(it->second.size())) return 0;
    return it->second[size_t(w)];
}

CohomologyTable lie_cohomology(const CEAlgebra& ce, int W) {
    hard_assert(W >= 0, "lie_cohomology: W must be nonnegative");
    auto A = ce_arena(ce);
    LeveledCohomology H = leveled_cohomology(A, ce_ops(ce, A), W, 0, W + ce.spec.n2 + 1);
    CohomologyTable t;
    t.spec = ce.spec;
    t.cutoff = W;
    for (int k = -ce.spec.n2; k <= 0; ++k) {
        auto it = H.hilbert.find(k);
        if (it == H.hilbert.end()) {
            t.hilbert[k] = std::vector<int>(size_t(W) + 1, 0);
        } else {
            t.hilbert[k] = it->second;
            t.hilbert[k].resize(size_t(W) + 1, 0);
        }
    }
    for (const auto& [k, v] : H.classes)
        for (const auto& [b, idx] : v) {
            FullElem rep = H.ctr->i_inner(b, idx);
            std::string s;
            for (const auto& [tt, cc] : rep.t) {
                if (!s.empty()) s += " + ";
                std::string cs = rat_str(cc);
                s += (cs == "1" ? "" : cs + "*") + A->term_str(tt);
            }
            t.reps[{k, b.w}].push_back(s);
        }
    return t;
}

CompleteIntersectionReport is_complete_intersection_window(const CEAlgebra& ce, int W) {
    hard_assert(W >= 2, "is_complete_intersection_window: W must be >= 2");
    CohomologyTable t = lie_cohomology(ce, W);
    CompleteIntersectionReport r;
    r.cutoff = W;
    for (const auto& [k, v] : t.hilbert) {
        if (k == 0) continue;
        for (int w = 0; w <= W; ++w)
            if (t.dim(k, w)) {
                r.complete_intersection = false;
                r.nonzero.push_back({k, w});
            }
    }
    return r;
}

PresentedRModule lie_cohomology_module(const CEAlgebra& ce, int k, int W) {
    auto A = ce_arena(ce);
    LeveledCohomology H = leveled_cohomology(A, ce_ops(ce, A), W, 0, W + ce.spec.n2 + 1);
    std::string nm = "H" + std::to_string(k) + "(" + ce.spec.name + ")";
    // every H^k(n) is annihilated by the quadratic ideal
    PresentedRModule M = extract_presentation(H, k, ce.spec, nm, /*rmod_i=*/true);
    M.validate(W);
    return M;
}

} // namespace mf
