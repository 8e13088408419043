#include "mf/resolution.hpp"

#include "mf/error.hpp"
#include "mf/parallel.hpp"

#include <algorithm>
#include <sstream>

namespace mf {

int BettiTable::columns() const {
    int c = 0;
    for (const auto& [iw, n] : beta) c = std::max(c, iw.first + 1);
    return c;
}

std::string BettiTable::tsv() const {
    int wmax = 0;
    for (const auto& [iw, n] : beta) wmax = std::max(wmax, iw.second);
    std::ostringstream os;
    os << "i\\w";
    for (int w = 0; w <= wmax; ++w) os << "\t" << w;
    os << "\n";
    for (int i = 0; i < columns(); ++i) {
        os << i;
        for (int w = 0; w <= wmax; ++w) {
            int v = at(i, w);
            os << "\t" << (v ? std::to_string(v) : std::string("-"));
        }
        os << "\n";
    }
    return os.str();
}

BettiTable FreeResolution::betti() const {
    BettiTable t;
    t.cutoff = cutoff;
    for (size_t i = 0; i < gens.size(); ++i) {
        for (int w : gens[i])
            if (w <= cutoff) t.beta[{int(i), w}]++;
        t.verified_to.push_back(cutoff);
    }
    return t;
}

namespace {

// The module side of the syzygy iteration: a weight-graded vector space with
// a lambda-action, fed either by the module arena (column 0) or by the free
// module on the previous column's generators.
struct GradedTarget {
    // basis identifiers are dense per weight
    std::function<int(int)> dim;                        // weight -> dim
    std::function<SparseVec(int, int, int)> act;        // (weight, idx, alpha) -> coords at weight+1
};

struct FreeCover {
    // generators with weights; basis at weight w: (gen g, lambda-monomial of
    // weight w - w_g) in canonical order
    const AlgebraSpec* alg;
    std::vector<int> gen_weights;
    mutable std::map<int, std::vector<std::pair<int, std::vector<uint16_t>>>> basis_cache;

    const std::vector<std::pair<int, std::vector<uint16_t>>>& basis(int w) const {
        auto it = basis_cache.find(w);
        if (it != basis_cache.end()) return it->second;
        std::vector<std::pair<int, std::vector<uint16_t>>> out;
        int n1 = alg->n1;
        for (int g = 0; g < int(gen_weights.size()); ++g) {
            int need = w - gen_weights[size_t(g)];
            if (need < 0) continue;
            std::vector<uint16_t> cur(size_t(n1), 0);
            auto rec = [&](auto&& self, int pos, int left) -> void {
                if (pos == n1 - 1) {
                    if (n1 > 0) cur[size_t(pos)] = uint16_t(left);
                    if (n1 > 0 || left == 0) out.push_back({g, cur});
                    return;
                }
                for (int k = 0; k <= left; ++k) {
                    cur[size_t(pos)] = uint16_t(k);
                    self(self, pos + 1, left - k);
                }
                cur[size_t(pos)] = 0;
            };
            if (n1 == 0) {
                if (need == 0) out.push_back({g, cur});
            } else {
                rec(rec, 0, need);
            }
        }
        std::sort(out.begin(), out.end());
        return basis_cache.emplace(w, std::move(out)).first->second;
    }

    int index_of(int w, int g, const std::vector<uint16_t>& exps) const {
        const auto& b = basis(w);
        auto it = std::lower_bound(b.begin(), b.end(), std::make_pair(g, exps));
        hard_assert(it != b.end() && it->first == g && it->second == exps, "FreeCover: missing basis");
        return int(it - b.begin());
    }

    SparseVec mul_lambda(int w, int idx, int alpha) const {
        auto [g, exps] = basis(w)[size_t(idx)];
        exps[size_t(alpha)]++;
        SparseVec v;
        v.set(index_of(w + 1, g, exps), Rat(1));
        return v;
    }
};

} // namespace

FreeResolution minimal_resolution(const PresentedRModule& M, int W) {
    M.algebra.validate();
    int maxgen = 0;
    for (const auto& g : M.gens) maxgen = std::max(maxgen, g.deg.w);
    if (W < maxgen) fail(Errc::cutoff_too_small, "cutoff below the largest generator weight", M.name);

    auto A = M.make_arena(0, 0, false);
    const int n1 = M.algebra.n1;

    // block lookup for the module: weight -> list of blocks (one per gen line)
    auto module_blocks = [&](int w) {
        std::vector<Bidegree> bs;
        for (const auto& g : M.gens) {
            if (w < g.deg.w) continue;
            Bidegree b{w, g.deg.d + (w - g.deg.w)};
            if (std::find(bs.begin(), bs.end(), b) == bs.end()) bs.push_back(b);
        }
        std::sort(bs.begin(), bs.end());
        return bs;
    };
    // dense index across the blocks of one weight
    struct WInfo {
        std::vector<Bidegree> blocks;
        std::vector<int> offsets;
        int dim = 0;
    };
    std::map<int, WInfo> winfo;
    auto info = [&](int w) -> const WInfo& {
        auto it = winfo.find(w);
        if (it != winfo.end()) return it->second;
        WInfo wi;
        wi.blocks = module_blocks(w);
        for (const auto& b : wi.blocks) {
            wi.offsets.push_back(wi.dim);
            wi.dim += int(A->basis(b, BlockKind::core).size());
        }
        return winfo.emplace(w, std::move(wi)).first->second;
    };
    auto term_index = [&](const FullTerm& t) {
        Bidegree b = A->deg(t);
        const WInfo& wi = info(b.w);
        for (size_t k = 0; k < wi.blocks.size(); ++k)
            if (wi.blocks[k] == b) return wi.offsets[k] + A->index_in_block(t, BlockKind::core);
        hard_assert(false, "module term outside expected blocks");
        return -1;
    };
    auto module_act = [&](int w, int idx, int alpha) {
        const WInfo& wi = info(w);
        // locate the block and term
        for (size_t k = 0; k < wi.blocks.size(); ++k) {
            int off = wi.offsets[k];
            int n = int(A->basis(wi.blocks[k], BlockKind::core).size());
            if (idx < off || idx >= off + n) continue;
            const FullTerm& t = A->basis(wi.blocks[k], BlockKind::core)[size_t(idx - off)];
            FullElem e = A->mul_ring(A->lambda_at(alpha), t, Rat(1));
            SparseVec out;
            for (const auto& [tt, cc] : e.t) out.set(term_index(tt), cc);
            return out;
        }
        hard_assert(false, "module_act: bad index");
        return SparseVec{};
    };

    FreeResolution res;
    res.cutoff = W;

    // L_0: minimal generators of M (per weight, module basis modulo lambda *
    // previous weight)
    std::vector<std::pair<int, SparseVec>> l0; // (weight, module coords)
    for (int w = 0; w <= W; ++w) {
        int dw = info(w).dim;
        if (dw == 0) continue;
        Echelon span; // lambda * M_{w-1}
        if (w > 0) {
            int dprev = info(w - 1).dim;
            for (int i = 0; i < dprev; ++i)
                for (int a = 0; a < n1; ++a) span.insert(module_act(w - 1, i, a));
        }
        for (int i = 0; i < dw; ++i) {
            SparseVec r = span.reduce(SparseVec::unit(i));
            if (!r.zero()) {
                span.insert(r);
                l0.push_back({w, SparseVec::unit(i)});
            }
        }
    }
    res.gens.push_back({});
    for (auto& [w, v] : l0) res.gens[0].push_back(w);

    // maps: current column's generator images inside the previous target
    // (target = M for column 0)
    FreeCover cover{&M.algebra, res.gens[0], {}};
    // image vectors of the cover basis, per weight (memoized)
    // eval(w): matrix Free_w -> Target_w
    struct Level {
        FreeCover cover;
        // generator images in the PREVIOUS level's free cover (or module)
        std::vector<SparseVec> gen_images;
    };

    std::vector<Level> levels;
    levels.push_back({cover, {}});
    for (auto& [w, v] : l0) levels[0].gen_images.push_back(v);

    auto target_dim = [&](int col, int w) -> int {
        if (col == 0) return info(w).dim;
        return int(levels[size_t(col - 1)].cover.basis(w).size());
    };
    auto target_act = [&](int col, int w, int idx, int a) -> SparseVec {
        if (col == 0) return module_act(w, idx, a);
        return levels[size_t(col - 1)].cover.mul_lambda(w, idx, a);
    };

    // evaluate a cover basis element of column `col` into its target
    std::map<std::pair<int, std::pair<int, int>>, SparseVec> eval_cache;
    std::function<SparseVec(int, int, int)> eval = [&](int col, int w, int idx) -> SparseVec {
        auto key = std::make_pair(col, std::make_pair(w, idx));
        auto it = eval_cache.find(key);
        if (it != eval_cache.end()) return it->second;
        const Level& L = levels[size_t(col)];
        auto [g, exps] = L.cover.basis(w)[size_t(idx)];
        SparseVec out;
        int a = -1;
        for (int i = 0; i < n1; ++i)
            if (exps[size_t(i)]) {
                a = i;
                break;
            }
        if (a < 0) {
            out = L.gen_images[size_t(g)];
        } else {
            auto e2 = exps;
            e2[size_t(a)]--;
            int idx2 = L.cover.index_of(w - 1, g, e2);
            SparseVec prev = eval(col, w - 1, idx2);
            int tw = w - 1 - 0;
            // previous target weight equals w-1 shifted by nothing: target
            // grading matches cover grading
            for (const auto& [i, c] : prev.e) out.axpy(c, target_act(col, tw, i, a));
        }
        eval_cache.emplace(key, out);
        return out;
    };

    // columns
    for (int col = 0;; ++col) {
        // kernel of eval at this column, per weight; new generators are the
        // kernel modulo lambda * kernel
        std::vector<std::pair<int, SparseVec>> newgens; // (weight, kernel vector in cover coords)
        std::map<int, Echelon> ker_ech;                 // kernel span per weight
        std::map<int, std::vector<SparseVec>> ker_basis;
        for (int w = 0; w <= W; ++w) {
            int n = int(levels[size_t(col)].cover.basis(w).size());
            if (n == 0) continue;
            Mat m(target_dim(col, w), n);
            for (int j = 0; j < n; ++j) m.col[size_t(j)] = eval(col, w, j);
            ColSpace cs = column_space(m);
            ker_basis[w] = cs.kernel;
            Echelon e;
            for (auto& v : cs.kernel) e.insert(SparseVec(v));
            ker_ech.emplace(w, std::move(e));
        }
        for (int w = 0; w <= W; ++w) {
            auto itk = ker_basis.find(w);
            if (itk == ker_basis.end()) continue;
            Echelon span; // lambda * kernel_{w-1}
            auto itp = ker_basis.find(w - 1);
            if (itp != ker_basis.end()) {
                for (const auto& kv : itp->second) {
                    for (int a = 0; a < n1; ++a) {
                        SparseVec moved;
                        for (const auto& [i, c] : kv.e)
                            moved.axpy(c, levels[size_t(col)].cover.mul_lambda(w - 1, i, a));
                        span.insert(std::move(moved));
                    }
                }
            }
            for (const auto& kv : itk->second) {
                SparseVec r = span.reduce(kv);
                if (!r.zero()) {
                    span.insert(SparseVec(r));
                    newgens.push_back({w, r});
                }
            }
        }
        if (newgens.empty()) break;
        hard_assert(M.algebra.n1 == 0 || col + 1 <= M.algebra.n1,
                    "syzygy bound exceeded: resolution longer than n1");

        // record the differential entries and push the next level
        std::vector<int> ws;
        for (auto& [w, v] : newgens) ws.push_back(w);
        res.gens.push_back(ws);
        std::vector<FreeResolution::Entry> dcol;
        for (size_t g = 0; g < newgens.size(); ++g) {
            const auto& [w, vec] = newgens[g];
            std::map<int, FreeResolution::Entry> per_tgt;
            for (const auto& [i, c] : vec.e) {
                auto [tg, exps] = levels[size_t(col)].cover.basis(w)[size_t(i)];
                auto [it, ok] = per_tgt.try_emplace(tg, FreeResolution::Entry{int(g), tg, {}});
                it->second.poly.push_back({exps, c});
            }
            for (auto& [tg, entry] : per_tgt) {
                // minimality: no scalar (weight-zero) entries
                for (const auto& [exps, c] : entry.poly) {
                    int e = 0;
                    for (auto x : exps) e += x;
                    hard_assert(e > 0, "minimality violated: weight-0 entry in resolution differential");
                }
                dcol.push_back(std::move(entry));
            }
        }
        res.diff.push_back(std::move(dcol));

        Level next;
        next.cover = FreeCover{&M.algebra, ws, {}};
        for (auto& [w, v] : newgens) next.gen_images.push_back(v);
        levels.push_back(std::move(next));
        if (col > 2 * (M.algebra.n1 + 2)) fail(Errc::internal, "resolution failed to terminate");
    }

    // exactness up to the cutoff: rank conditions per weight
    for (size_t col = 0; col + 1 < levels.size(); ++col) {
        for (int w = 0; w <= W; ++w) {
            int n = int(levels[col].cover.basis(w).size());
            if (n == 0) continue;
            Mat m(target_dim(int(col), w), n);
            for (int j = 0; j < n; ++j) m.col[size_t(j)] = eval(int(col), w, j);
            ColSpace cs = column_space(m);
            // image of the next differential must equal this kernel
            int nn = int(levels[col + 1].cover.basis(w).size());
            Mat m2(n, nn);
            for (int j = 0; j < nn; ++j) m2.col[size_t(j)] = eval(int(col + 1), w, j);
            ColSpace cs2 = column_space(m2);
            hard_assert(int(cs.kernel.size()) == cs2.rank(),
                        "resolution not exact at column " + std::to_string(col) + ", weight " +
                            std::to_string(w));
        }
    }
    return res;
}

BettiTable tor_oracle(const PresentedRModule& M, int W) {
    M.algebra.validate();
    auto A = M.make_arena(0, 0, false);
    const int n1 = M.algebra.n1;

    // dense per-weight basis of M
    std::map<int, std::vector<FullTerm>> mw;
    for (const auto& g : M.gens) {
        for (int w = g.deg.w; w <= W; ++w) {
            Bidegree b{w, g.deg.d + (w - g.deg.w)};
            const auto& terms = A->basis(b, BlockKind::core);
            auto& dst = mw[w];
            for (const auto& t : terms)
                if (std::find(dst.begin(), dst.end(), t) == dst.end()) dst.push_back(t);
        }
    }
    for (auto& [w, v] : mw) std::sort(v.begin(), v.end());
    auto mdim = [&](int w) -> int {
        auto it = mw.find(w);
        return it == mw.end() ? 0 : int(it->second.size());
    };
    auto midx = [&](const FullTerm& t) -> int {
        Bidegree b = A->deg(t);
        const auto& v = mw.at(b.w);
        auto it = std::lower_bound(v.begin(), v.end(), t);
        hard_assert(it != v.end() && *it == t, "tor_oracle: missing term");
        return int(it - v.begin());
    };

    // Koszul basis at (w, j): (subset S of size j, module term of weight w-j)
    auto subsets = [&](int j) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        std::function<void(int)> rec = [&](int start) {
            if (int(cur.size()) == j) {
                out.push_back(cur);
                return;
            }
            for (int a = start; a < n1; ++a) {
                cur.push_back(a);
                rec(a + 1);
                cur.pop_back();
            }
        };
        rec(0);
        return out;
    };

    BettiTable table;
    table.cutoff = W;
    for (int j = 0; j <= n1; ++j) table.verified_to.push_back(W);

    for (int w = 0; w <= W; ++w) {
        // blocks (w, j) for j = 0..n1; differential lowers j by 1 and keeps w
        std::vector<std::vector<std::vector<int>>> subs(size_t(n1) + 1);
        for (int j = 0; j <= n1; ++j) subs[size_t(j)] = subsets(j);
        auto dim_at = [&](int j) {
            return int(subs[size_t(j)].size()) * mdim(w - j);
        };
        auto index_at = [&](int j, int s, int m) { return s * mdim(w - j) + m; };
        // boundary: (w,j) -> (w,j-1)
        auto boundary = [&](int j) {
            Mat d(dim_at(j - 1), dim_at(j));
            const auto& Sj = subs[size_t(j)];
            const auto& Sj1 = subs[size_t(j - 1)];
            auto sub_index = [&](const std::vector<int>& s) {
                auto it = std::lower_bound(Sj1.begin(), Sj1.end(), s);
                return int(it - Sj1.begin());
            };
            for (int s = 0; s < int(Sj.size()); ++s) {
                for (int m = 0; m < mdim(w - j); ++m) {
                    const FullTerm& t = mw.at(w - j)[size_t(m)];
                    int sign = 1;
                    for (size_t pos = 0; pos < Sj[size_t(s)].size(); ++pos) {
                        int a = Sj[size_t(s)][pos];
                        std::vector<int> rest = Sj[size_t(s)];
                        rest.erase(rest.begin() + long(pos));
                        FullElem e = A->mul_ring(A->lambda_at(a), t, Rat(sign));
                        int si = sub_index(rest);
                        for (const auto& [tt, cc] : e.t)
                            d.col[size_t(index_at(j, s, m))].set(index_at(j - 1, si, midx(tt)), cc);
                        sign = -sign;
                    }
                }
            }
            return d;
        };
        for (int j = 0; j <= n1; ++j) {
            if (dim_at(j) == 0) continue;
            int zdim;
            if (j == 0) {
                zdim = dim_at(0);
            } else {
                Mat dj = boundary(j);
                zdim = int(column_space(dj).kernel.size());
            }
            int bdim = 0;
            if (j + 1 <= n1 && dim_at(j + 1) > 0) {
                Mat dj1 = boundary(j + 1);
                bdim = column_space(dj1).rank();
            }
            int h = zdim - bdim;
            if (h) table.beta[{j, w}] = h;
        }
    }
    return table;
}

} // namespace mf
