#include "mf/linalg.hpp"

#include "mf/error.hpp"

#include <algorithm>
#include <ostream>

namespace mf {

const Rat* SparseVec::at(int i) const {
    auto it = std::lower_bound(e.begin(), e.end(), i,
                               [](const auto& p, int k) { return p.first < k; });
    if (it != e.end() && it->first == i) return &it->second;
    return nullptr;
}

void SparseVec::set(int i, Rat v) {
    auto it = std::lower_bound(e.begin(), e.end(), i,
                               [](const auto& p, int k) { return p.first < k; });
    if (it != e.end() && it->first == i) {
        if (is_zero(v)) e.erase(it);
        else it->second = std::move(v);
    } else if (!is_zero(v)) {
        e.insert(it, {i, std::move(v)});
    }
}

SparseVec& SparseVec::axpy(const Rat& c, const SparseVec& o) {
    if (is_zero(c) || o.e.empty()) return *this;
    std::vector<std::pair<int, Rat>> out;
    out.reserve(e.size() + o.e.size());
    size_t i = 0, j = 0;
    while (i < e.size() || j < o.e.size()) {
        if (j == o.e.size() || (i < e.size() && e[i].first < o.e[j].first)) {
            out.push_back(e[i++]);
        } else if (i == e.size() || o.e[j].first < e[i].first) {
            out.emplace_back(o.e[j].first, c * o.e[j].second);
            ++j;
        } else {
            Rat v = e[i].second + c * o.e[j].second;
            if (!is_zero(v)) out.emplace_back(e[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    e = std::move(out);
    return *this;
}

SparseVec& SparseVec::scale(const Rat& c) {
    if (is_zero(c)) {
        e.clear();
        return *this;
    }
    for (auto& p : e) p.second *= c;
    return *this;
}

SparseVec SparseVec::scaled(const Rat& c) const {
    SparseVec v = *this;
    v.scale(c);
    return v;
}

bool Mat::zero() const {
    for (const auto& c : col)
        if (!c.zero()) return false;
    return true;
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.col[i] = SparseVec::unit(i);
    return m;
}

SparseVec apply(const Mat& m, const SparseVec& x) {
    SparseVec y;
    for (const auto& [j, c] : x.e) {
        hard_assert(j >= 0 && j < m.cols, "apply: index out of range");
        y.axpy(c, m.col[j]);
    }
    return y;
}

Mat compose(const Mat& a, const Mat& b) {
    hard_assert(a.cols == b.rows, "compose: shape mismatch");
    Mat r(a.rows, b.cols);
    for (int j = 0; j < b.cols; ++j) r.col[j] = apply(a, b.col[j]);
    return r;
}

Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (int j = 0; j < m.cols; ++j)
        for (const auto& [i, c] : m.col[j].e) t.col[i].e.emplace_back(j, c);
    return t;
}

bool Echelon::contains_lead(int i) const {
    return std::binary_search(leads.begin(), leads.end(), i);
}

SparseVec Echelon::reduce(SparseVec v, std::vector<Rat>* coeffs) const {
    if (coeffs) coeffs->assign(vecs.size(), Rat(0));
    // Leads are sorted and each basis vector starts at its lead, so one
    // ascending sweep clears everything.
    for (size_t k = 0; k < vecs.size(); ++k) {
        const Rat* c = v.at(leads[k]);
        if (!c) continue;
        Rat t = *c;
        v.axpy(-t, vecs[k]);
        if (coeffs) (*coeffs)[k] = std::move(t);
    }
    return v;
}

int Echelon::insert(SparseVec v) {
    v = reduce(std::move(v));
    if (v.zero()) return -1;
    v.scale(Rat(1) / v.e.front().second);
    int lead = v.lead();
    // back-eliminate the new lead from existing vectors
    for (auto& u : vecs) {
        const Rat* c = u.at(lead);
        if (c) {
            Rat t = *c;
            u.axpy(-t, v);
        }
    }
    auto pos = std::lower_bound(leads.begin(), leads.end(), lead);
    size_t idx = size_t(pos - leads.begin());
    leads.insert(pos, lead);
    vecs.insert(vecs.begin() + idx, std::move(v));
    return int(idx);
}

ColSpace column_space(const Mat& m) {
    ColSpace r;
    // Tags follow the same column operations; a column that dies yields a
    // kernel vector, one that survives a preimage for its echelon vector.
    struct Pending {
        SparseVec vec;
        SparseVec tag;
    };
    std::vector<Pending> work;
    Echelon ker_ech;
    for (int j = 0; j < m.cols; ++j) {
        SparseVec v = m.col[j];
        SparseVec tag = SparseVec::unit(j);
        // reduce against current echelon columns (tracking tags)
        for (size_t k = 0; k < work.size(); ++k) {
            const Rat* c = v.at(work[k].vec.lead());
            if (!c) continue;
            Rat t = *c;
            v.axpy(-t, work[k].vec);
            tag.axpy(-t, work[k].tag);
        }
        if (v.zero()) {
            r.kernel.push_back(tag);
            continue;
        }
        Rat inv = Rat(1) / v.e.front().second;
        v.scale(inv);
        tag.scale(inv);
        // back-eliminate so columns stay mutually reduced
        int lead = v.lead();
        for (auto& w : work) {
            const Rat* c = w.vec.at(lead);
            if (!c) continue;
            Rat t = *c;
            w.vec.axpy(-t, v);
            w.tag.axpy(-t, tag);
        }
        // insert sorted by lead
        size_t pos = 0;
        while (pos < work.size() && work[pos].vec.lead() < lead) ++pos;
        work.insert(work.begin() + pos, Pending{std::move(v), std::move(tag)});
    }
    for (auto& w : work) {
        r.image.leads.push_back(w.vec.lead());
        r.image.vecs.push_back(std::move(w.vec));
        r.preimage.push_back(std::move(w.tag));
    }
    // canonical kernel basis: re-echelonize (unique reduced form of the span)
    Echelon k;
    for (auto& v : r.kernel) k.insert(std::move(v));
    r.kernel = std::move(k.vecs);
    return r;
}

RrefResult rref(const Mat& m) {
    RrefResult res;
    ColSpace cs = column_space(m);
    res.rank = cs.rank();
    res.kernel = cs.kernel;
    // Row-reduce: echelonize rows of m.
    Echelon rowech;
    Mat t = transpose(m);
    for (int i = 0; i < t.cols; ++i) rowech.insert(t.col[i]);
    Mat red(m.rows, m.cols);
    res.reduced = Mat(m.rows, m.cols);
    for (size_t k = 0; k < rowech.size(); ++k) {
        res.pivots.insert(rowech.leads[k]);
        for (const auto& [j, c] : rowech.vecs[k].e)
            res.reduced.col[j].e.emplace_back(int(k), c);
    }
    return res;
}

void dump_block(std::ostream& os, int w, int d, const Mat& m) {
    os << w << " " << d << " " << m.rows << " " << m.cols << "\n";
    for (int j = 0; j < m.cols; ++j)
        for (const auto& [i, c] : m.col[j].e)
            os << i << " " << j << " " << rat_str(c) << "\n";
}

} // namespace mf
