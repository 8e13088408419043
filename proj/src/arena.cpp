#include "mf/arena.hpp"

#include "mf/error.hpp"

#include <algorithm>

namespace mf {

FullElem& FullElem::add(const FullTerm& k, Rat c) {
    if (is_zero(c)) return *this;
    auto [it, inserted] = t.try_emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (is_zero(it->second)) t.erase(it);
    }
    return *this;
}

FullElem& FullElem::axpy(const Rat& c, const FullElem& o) {
    if (is_zero(c)) return *this;
    for (const auto& [k, v] : o.t) add(k, c * v);
    return *this;
}

FullElem& FullElem::scale(const Rat& c) {
    if (is_zero(c)) {
        t.clear();
        return *this;
    }
    for (auto& [k, v] : t) v *= c;
    return *this;
}

static std::string idx_name(const char* base, int i) {
    return std::string(base) + std::to_string(i + 1);
}

Arena::Arena(int n_lambda, int n_vee, int n_theta, int n_delta, std::vector<ArenaGen> gens,
             std::vector<InnerRelation> relations, bool thetas_inner)
    : nl_(n_lambda), nv_(n_vee), nt_(n_theta), nd_(n_delta),
      outer_start_(n_lambda + n_vee + (thetas_inner ? n_theta : 0)),
      gens_(std::move(gens)), relations_(std::move(relations)) {
    for (int i = 0; i < nl_; ++i)
        ring_.gens.push_back({idx_name("l", i), GenKind::lambda, standard_bidegree(GenKind::lambda)});
    for (int i = 0; i < nv_; ++i)
        ring_.gens.push_back({idx_name("v", i), GenKind::vee, standard_bidegree(GenKind::vee)});
    for (int i = 0; i < nt_; ++i)
        ring_.gens.push_back({idx_name("t", i), GenKind::theta, standard_bidegree(GenKind::theta)});
    for (int i = 0; i < nd_; ++i)
        ring_.gens.push_back({idx_name("dx", i), GenKind::delta, standard_bidegree(GenKind::delta)});
    ring_.validate();
    hard_assert(relations_.empty() || nv_ == 0, "relations require a vee-free arena");
}

Bidegree Arena::deg(const FullTerm& t) const {
    return t.m.degree(ring_) + gens_[size_t(t.gen)].deg;
}

int Arena::parity(const FullTerm& t) const {
    return (t.m.parity(ring_) + gens_[size_t(t.gen)].deg.parity()) & 1;
}

int Arena::level(const FullTerm& t) const {
    int nv = 0;
    for (int i = 0; i < nv_; ++i) nv += t.m.e[size_t(vee_at(i))];
    return gens_[size_t(t.gen)].level - nv;
}

int Arena::theta_degree(const FullTerm& t) const {
    int n = 0;
    for (int i = 0; i < nt_; ++i) n += t.m.e[size_t(theta_at(i))];
    return n;
}

int Arena::delta_degree(const FullTerm& t) const {
    int n = 0;
    for (int i = 0; i < nd_; ++i) n += t.m.e[size_t(delta_at(i))];
    return n;
}

bool Arena::outer_trivial(const FullTerm& t) const {
    for (int i = outer_start_; i < ring_.size(); ++i)
        if (t.m.e[size_t(i)]) return false;
    return true;
}

std::pair<FullTerm, Mono> Arena::split_outer(const FullTerm& t) const {
    FullTerm inner = t;
    Mono outer = Mono::one(ring_);
    for (int i = outer_start_; i < ring_.size(); ++i) {
        outer.e[size_t(i)] = t.m.e[size_t(i)];
        inner.m.e[size_t(i)] = 0;
    }
    return {std::move(inner), std::move(outer)};
}

FullTerm Arena::attach_outer(const FullTerm& inner, const Mono& outer) const {
    FullTerm t = inner;
    for (int i = outer_start_; i < ring_.size(); ++i) {
        hard_assert(t.m.e[size_t(i)] == 0, "attach_outer: inner part has outer letters");
        t.m.e[size_t(i)] = outer.e[size_t(i)];
    }
    return t;
}

std::string Arena::term_str(const FullTerm& t) const {
    std::string s = mono_str(ring_, t.m);
    const std::string& g = gens_[size_t(t.gen)].name;
    if (s == "1") return g;
    return s + "*" + g;
}

// basis order: outer part, then level, then mono, then gen index
static bool term_less(const Arena& A, const FullTerm& a, const FullTerm& b) {
    int n = A.ring().size();
    for (int i = A.outer_start(); i < n; ++i)
        if (a.m.e[size_t(i)] != b.m.e[size_t(i)]) return a.m.e[size_t(i)] < b.m.e[size_t(i)];
    int la = A.level(a), lb = A.level(b);
    if (la != lb) return la < lb;
    for (int i = 0; i < A.outer_start(); ++i)
        if (a.m.e[size_t(i)] != b.m.e[size_t(i)]) return a.m.e[size_t(i)] < b.m.e[size_t(i)];
    return a.gen < b.gen;
}

void Arena::enumerate(Bidegree b, int slot_limit, std::vector<FullTerm>& out) const {
    for (int g = 0; g < int(gens_.size()); ++g) {
        Bidegree need = b - gens_[size_t(g)].deg;
        if (need.w < 0) continue;
        Mono cur = Mono::one(ring_);
        auto rec = [&](auto&& self, int pos, int w, int d) -> void {
            if (w > need.w) return;
            if (pos == slot_limit) {
                if (w == need.w && d == need.d) out.push_back({cur, g});
                return;
            }
            const Generator& gen = ring_.gens[size_t(pos)];
            int max_e = gen.odd() ? 1 : (need.w - w) / gen.deg.w;
            for (int k = 0; k <= max_e; ++k) {
                cur.e[size_t(pos)] = uint16_t(k);
                self(self, pos + 1, w + k * gen.deg.w, d + k * gen.deg.d);
            }
            cur.e[size_t(pos)] = 0;
        };
        rec(rec, 0, 0, 0);
    }
    std::sort(out.begin(), out.end(),
              [this](const FullTerm& x, const FullTerm& y) { return term_less(*this, x, y); });
}

bool Arena::core_reduced(const FullTerm& core_term) const {
    if (relations_.empty()) return true;
    const BlockCache& c = block(deg(core_term), BlockKind::core);
    auto it = c.rel_index.find(core_term);
    hard_assert(it != c.rel_index.end(), "core_reduced: term outside enumeration");
    return !c.rel_ech.contains_lead(it->second);
}

const Arena::BlockCache& Arena::block(Bidegree b, BlockKind kind) const {
    std::lock_guard<std::recursive_mutex> lk(mu_);
    auto key = std::make_pair(b, int(kind));
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;

    auto built = std::make_unique<BlockCache>();
    BlockCache& c = *built;
    int slot_limit = kind == BlockKind::core ? core_end()
                     : kind == BlockKind::inner ? outer_start_
                                                : ring_.size();
    std::vector<FullTerm> all;
    enumerate(b, slot_limit, all);

    if (relations_.empty()) {
        c.terms = std::move(all);
    } else if (kind == BlockKind::core) {
        // Relation span: (lambda monomial) * relation. Lambdas are even, so
        // coefficients carry over untouched.
        c.rel_terms = std::move(all);
        for (size_t i = 0; i < c.rel_terms.size(); ++i) c.rel_index[c.rel_terms[i]] = int(i);
        for (const auto& rel : relations_) {
            hard_assert(!rel.terms.empty(), "empty relation");
            const auto& [e0, g0, c0] = rel.terms.front();
            Bidegree rel_deg = gens_[size_t(g0)].deg;
            for (int a = 0; a < nl_; ++a) {
                rel_deg.w += int(e0[size_t(a)]);
                rel_deg.d += int(e0[size_t(a)]);
            }
            Bidegree mul_deg = b - rel_deg;
            if (mul_deg.w < 0 || mul_deg.w != mul_deg.d) continue;
            std::vector<Mono> muls;
            Mono cur = Mono::one(ring_);
            auto rec = [&](auto&& self, int pos, int w) -> void {
                if (pos == nl_) {
                    if (w == mul_deg.w) muls.push_back(cur);
                    return;
                }
                for (int k = 0; w + k <= mul_deg.w; ++k) {
                    cur.e[size_t(pos)] = uint16_t(k);
                    self(self, pos + 1, w + k);
                }
                cur.e[size_t(pos)] = 0;
            };
            rec(rec, 0, 0);
            for (const auto& mu : muls) {
                std::map<int, Rat> entries;
                for (const auto& [e, g, co] : rel.terms) {
                    Mono m = mu;
                    for (int a = 0; a < nl_; ++a) m.e[size_t(a)] = uint16_t(m.e[size_t(a)] + e[size_t(a)]);
                    FullTerm ft{std::move(m), g};
                    auto iidx = c.rel_index.find(ft);
                    hard_assert(iidx != c.rel_index.end(), "relation term outside block enumeration");
                    entries[iidx->second] += co;
                }
                SparseVec vec;
                for (auto& [i, co] : entries)
                    if (!is_zero(co)) vec.e.emplace_back(i, co);
                c.rel_ech.insert(std::move(vec));
            }
        }
        for (size_t i = 0; i < c.rel_terms.size(); ++i)
            if (!c.rel_ech.contains_lead(int(i))) c.terms.push_back(c.rel_terms[i]);
    } else {
        // keep only terms whose core part is relation-reduced
        for (auto& t : all) {
            FullTerm core = t;
            for (int i = core_end(); i < ring_.size(); ++i) core.m.e[size_t(i)] = 0;
            if (core_reduced(core)) c.terms.push_back(t);
        }
    }
    for (size_t i = 0; i < c.terms.size(); ++i) c.index[c.terms[i]] = int(i);
    auto& slot = cache_[key];
    slot = std::move(built);
    return *slot;
}

const std::vector<FullTerm>& Arena::basis(Bidegree b, BlockKind kind) const {
    return block(b, kind).terms;
}

int Arena::index_in_block(const FullTerm& t, BlockKind kind) const {
    const BlockCache& c = block(deg(t), kind);
    auto it = c.index.find(t);
    return it == c.index.end() ? -1 : it->second;
}

FullElem Arena::reduce(FullElem e) const {
    if (relations_.empty()) return e;
    FullElem out;
    // Group by the theta/delta pattern and the core bidegree; the group sign
    // ambiguity is global per group (all gens in a homogeneous core block
    // share parity since lambdas are even) and cancels inside the span.
    std::map<std::pair<Mono, Bidegree>, std::map<int, Rat>> groups;
    for (const auto& [t, co] : e.t) {
        Mono suffix = Mono::one(ring_);
        FullTerm core = t;
        for (int i = core_end(); i < ring_.size(); ++i) {
            suffix.e[size_t(i)] = t.m.e[size_t(i)];
            core.m.e[size_t(i)] = 0;
        }
        Bidegree cb = deg(core);
        const BlockCache& c = block(cb, BlockKind::core);
        auto idx = c.rel_index.find(core);
        hard_assert(idx != c.rel_index.end(), "reduce: term outside enumeration");
        groups[{suffix, cb}][idx->second] += co;
    }
    for (auto& [key, entries] : groups) {
        const auto& [suffix, cb] = key;
        const BlockCache& c = block(cb, BlockKind::core);
        SparseVec v;
        for (auto& [i, co] : entries)
            if (!is_zero(co)) v.e.emplace_back(i, co);
        SparseVec red = c.rel_ech.reduce(std::move(v));
        for (const auto& [i, co] : red.e) {
            FullTerm t = c.rel_terms[size_t(i)];
            for (int k = core_end(); k < ring_.size(); ++k) t.m.e[size_t(k)] = suffix.e[size_t(k)];
            out.add(t, co);
        }
    }
    return out;
}

int Arena::parity_before_slot(const FullTerm& t, int ri) const {
    // slot order: lambda, vee, GEN, theta, delta
    int p = 0;
    int upto = std::min(ri, core_end());
    for (int i = 0; i < upto; ++i)
        if (ring_.gens[size_t(i)].odd()) p += t.m.e[size_t(i)];
    if (ri >= core_end()) {
        p += gens_[size_t(t.gen)].deg.parity();
        for (int i = core_end(); i < ri; ++i)
            if (ring_.gens[size_t(i)].odd()) p += t.m.e[size_t(i)];
    }
    return p & 1;
}

FullElem Arena::mul_ring(int ri, const FullTerm& t, const Rat& c) const {
    FullElem r;
    const Generator& g = ring_.gens[size_t(ri)];
    if (g.odd() && t.m.e[size_t(ri)]) return r;
    int sgn = g.odd() ? (parity_before_slot(t, ri) ? -1 : 1) : 1;
    FullTerm nt = t;
    nt.m.e[size_t(ri)] = uint16_t(nt.m.e[size_t(ri)] + 1);
    r.add(nt, c * sgn);
    return reduce(std::move(r));
}

FullElem Arena::derive_at(int ri, const SuperPoly& image, int op_parity, const FullTerm& t, const Rat& c) const {
    FullElem r;
    if (!t.m.e[size_t(ri)]) return r;
    int before = parity_before_slot(t, ri);
    int sgn_op = ((op_parity * before) & 1) ? -1 : 1;
    int mult = int(t.m.e[size_t(ri)]);
    Mono rest = t.m;
    rest.e[size_t(ri)] = uint16_t(rest.e[size_t(ri)] - 1);

    bool unit_image = image.terms.size() == 1 && image.terms.begin()->first.is_one();
    if (unit_image) {
        r.add(FullTerm{std::move(rest), t.gen}, c * image.terms.begin()->second * Rat(mult * sgn_op));
        return reduce(std::move(r));
    }
    hard_assert(ri < core_end(), "derive_at: non-unit image at non-core slot");
    Mono prefix = Mono::one(ring_);
    Mono tail = Mono::one(ring_);
    Mono suffix = Mono::one(ring_);
    for (int i = 0; i < ri; ++i) prefix.e[size_t(i)] = rest.e[size_t(i)];
    for (int i = ri; i < core_end(); ++i) tail.e[size_t(i)] = rest.e[size_t(i)];
    for (int i = core_end(); i < ring_.size(); ++i) suffix.e[size_t(i)] = rest.e[size_t(i)];
    for (const auto& [im, ic] : image.terms) {
        auto a = mono_mul(ring_, prefix, im);
        if (!a) continue;
        auto bprod = mono_mul(ring_, a->first, tail);
        if (!bprod) continue;
        Mono full = bprod->first;
        for (int i = core_end(); i < ring_.size(); ++i) full.e[size_t(i)] = suffix.e[size_t(i)];
        r.add(FullTerm{std::move(full), t.gen}, c * ic * Rat(mult * sgn_op * a->second * bprod->second));
    }
    return reduce(std::move(r));
}

FullElem Arena::map_gen(const std::vector<std::vector<std::tuple<Mono, int, Rat>>>& images, int op_parity,
                        const FullTerm& t, const Rat& c) const {
    FullElem r;
    const auto& img = images[size_t(t.gen)];
    if (img.empty()) return r;
    int p = 0;
    for (int i = 0; i < core_end(); ++i)
        if (ring_.gens[size_t(i)].odd()) p += t.m.e[size_t(i)];
    int sgn = ((op_parity * p) & 1) ? -1 : 1;
    int theta_par = 0;
    for (int i = core_end(); i < ring_.size(); ++i)
        if (ring_.gens[size_t(i)].odd()) theta_par += t.m.e[size_t(i)];
    for (const auto& [em, g2, co] : img) {
        // The entry replaces the generator in place. mono_mul normal-orders
        // the entry against the whole stored monomial including the
        // theta/delta suffix; entry letters belong left of that suffix, so
        // the spurious odd crossings are compensated.
        auto prod = mono_mul(ring_, t.m, em);
        if (!prod) continue;
        int fix = (((em.parity(ring_) * theta_par) & 1) != 0) ? -1 : 1;
        r.add(FullTerm{prod->first, g2}, c * co * Rat(sgn * prod->second * fix));
    }
    return reduce(std::move(r));
}

FullElem Arena::from_coords(Bidegree b, const SparseVec& v, BlockKind kind) const {
    const BlockCache& c = block(b, kind);
    FullElem e;
    for (const auto& [i, co] : v.e) {
        hard_assert(i >= 0 && i < int(c.terms.size()), "from_coords: bad index");
        e.add(c.terms[size_t(i)], co);
    }
    return e;
}

std::map<Bidegree, SparseVec> Arena::to_coords(const FullElem& e, BlockKind kind) const {
    std::map<Bidegree, std::map<int, Rat>> acc;
    for (const auto& [t, co] : e.t) {
        Bidegree b = deg(t);
        const BlockCache& c = block(b, kind);
        auto it = c.index.find(t);
        hard_assert(it != c.index.end(), "to_coords: term not in canonical basis: " + term_str(t));
        acc[b][it->second] += co;
    }
    std::map<Bidegree, SparseVec> out;
    for (auto& [b, m] : acc) {
        SparseVec v;
        for (auto& [i, co] : m)
            if (!is_zero(co)) v.e.emplace_back(i, co);
        if (!v.zero()) out[b] = std::move(v);
    }
    return out;
}

FullElem apply_op(const TermOp& op, const FullElem& e) {
    FullElem r;
    for (const auto& [t, c] : e.t) r.axpy(Rat(1), op(t, c));
    return r;
}

FullElem apply_sum(const std::vector<OpSummand>& ops, const FullElem& e) {
    FullElem r;
    for (const auto& s : ops) r.axpy(Rat(1), apply_op(s.op, e));
    return r;
}

} // namespace mf
