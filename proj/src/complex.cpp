#include "mf/complex.hpp"

#include "mf/error.hpp"

#include <set>

namespace mf {

void GradedComplex::check_d2(const Window& win) const {
    for (const auto& [b, elts] : space.blocks) {
        if (!win.contains(b)) continue;
        std::set<Bidegree> totals;
        for (const auto& d1 : diff)
            for (const auto& d2 : diff) totals.insert(b + d1.shift + d2.shift);
        for (const auto& total : totals) {
            Mat acc(space.dim(total), space.dim(b));
            bool any = false;
            for (const auto& e1 : diff) {
                const Mat* a = e1.at(b);
                if (!a) continue;
                for (const auto& e2 : diff) {
                    if (!(b + e1.shift + e2.shift == total)) continue;
                    const Mat* m2 = e2.at(b + e1.shift);
                    if (!m2) continue;
                    Mat prod = compose(*m2, *a);
                    for (int j = 0; j < prod.cols; ++j) acc.col[size_t(j)].axpy(Rat(1), prod.col[size_t(j)]);
                    any = true;
                }
            }
            if (any) hard_assert(acc.zero(), "d^2 != 0 at block " + b.str());
        }
    }
}

CohomologyBlocks cohomology(const GradedComplex& c, const Window& win, const Window& avail) {
    CohomologyBlocks out;
    for (int w = win.w_min; w <= win.w_max; ++w) {
        for (int d = win.d_min; d <= win.d_max; ++d) {
            Bidegree b{w, d};
            int n = c.space.dim(b);
            if (n == 0) {
                if (c.space.blocks.count(b)) out.dims[b] = 0;
                continue;
            }
            // kernel of the stacked outgoing blocks
            Mat stacked(0, n);
            stacked.col.resize(size_t(n));
            int row_off = 0;
            for (const auto& s : c.diff) {
                const Mat* m = s.at(b);
                if (!m) continue;
                Bidegree tb = b + s.shift;
                if (!avail.contains(tb)) fail(Errc::window_too_small, "need block " + tb.str());
                for (int j = 0; j < n; ++j)
                    for (const auto& [i, v] : m->col[size_t(j)].e) stacked.col[size_t(j)].set(row_off + i, v);
                row_off += m->rows;
            }
            stacked.rows = row_off;
            Echelon ker;
            {
                ColSpace cs = column_space(stacked);
                for (auto& v : cs.kernel) ker.insert(std::move(v));
            }
            // image from below, union over summands
            Echelon img;
            for (const auto& s : c.diff) {
                Bidegree sb = b - s.shift;
                const Mat* m = s.at(sb);
                if (!m) continue;
                if (!avail.contains(sb)) fail(Errc::window_too_small, "need block " + sb.str());
                for (const auto& col : m->col) {
                    SparseVec v = col;
                    img.insert(std::move(v));
                }
            }
            Echelon hech;
            for (const auto& kvec : ker.vecs) {
                SparseVec r = img.reduce(kvec);
                if (!r.zero()) hech.insert(std::move(r));
            }
            out.dims[b] = int(hech.size());
            out.reps[b] = std::move(hech.vecs);
        }
    }
    return out;
}

} // namespace mf
