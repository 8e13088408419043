#include "mf/transfer.hpp"

#include "mf/log.hpp"

#include <algorithm>
#include <climits>

namespace mf {

Contraction::Contraction(std::shared_ptr<const Arena> arena, std::vector<OpSummand> d0, Window win,
                         bool verify)
    : arena_(std::move(arena)), d0_(std::move(d0)), win_(win), verify_(verify) {
    for (const auto& s : d0_)
        hard_assert(s.shift == Bidegree{0, 1}, "contraction: designated summand must have shift (0,1)");
}

const Mat& Contraction::materialize_d0(Bidegree b) const {
    std::lock_guard<std::recursive_mutex> lk(mu_);
    auto it = d0_cache_.find(b);
    if (it != d0_cache_.end()) return it->second;
    const auto& basis = arena_->basis(b, BlockKind::inner);
    Bidegree tb{b.w, b.d + 1};
    const auto& tbasis = arena_->basis(tb, BlockKind::inner);
    Mat m(int(tbasis.size()), int(basis.size()));
    for (size_t j = 0; j < basis.size(); ++j) {
        FullElem img;
        for (const auto& s : d0_) img.axpy(Rat(1), s.op(basis[j], Rat(1)));
        for (const auto& [t, c] : img.t) {
            Bidegree td = arena_->deg(t);
            hard_assert(td == tb, "designated differential not homogeneous of shift (0,1)");
            int i = arena_->index_in_block(t, BlockKind::inner);
            hard_assert(i >= 0, "designated image outside canonical basis");
            m.col[j].set(i, c);
        }
    }
    return d0_cache_.emplace(b, std::move(m)).first->second;
}

const Contraction::BlockData& Contraction::block(Bidegree b) const {
    std::lock_guard<std::recursive_mutex> lk(mu_);
    auto it = blocks_.find(b);
    if (it != blocks_.end()) return *it->second;
    if (!win_.contains(b))
        fail(Errc::window_too_small,
             "contraction block " + b.str() + " outside window [w<=" + std::to_string(win_.w_max) + "]");

    auto bd = std::make_unique<BlockData>();
    ColSpace out_cs = column_space(materialize_d0(b));
    bd->rank_out = out_cs.rank();
    bd->ker.vecs = out_cs.kernel;
    for (auto& v : bd->ker.vecs) bd->ker.leads.push_back(v.lead());

    // incoming image and preimages, from the block below
    Bidegree below{b.w, b.d - 1};
    if (!arena_->basis(below, BlockKind::inner).empty()) {
        ColSpace in_cs = column_space(materialize_d0(below));
        bd->img = std::move(in_cs.image);
        bd->pre.reserve(in_cs.preimage.size());
        // kernel-reduce the preimages so h-images sit in the canonical
        // complement of the kernel
        Echelon below_ker;
        for (auto& v : in_cs.kernel) below_ker.insert(SparseVec(v));
        for (auto& pvec : in_cs.preimage) bd->pre.push_back(below_ker.reduce(pvec));
    }

    // H representatives: kernel vectors reduced mod image, re-echelonized
    Echelon hech;
    for (const auto& kvec : bd->ker.vecs) {
        SparseVec r = bd->img.reduce(kvec);
        if (!r.zero()) hech.insert(std::move(r));
    }
    bd->cls.reps = hech.vecs;
    bd->hleads = hech.leads;
    // levels for reporting
    const auto& basis = arena_->basis(b, BlockKind::inner);
    for (const auto& rep : bd->cls.reps) {
        int lvl = INT_MIN;
        bool mixed = false;
        for (const auto& [i, c] : rep.e) {
            int l = arena_->level(basis[size_t(i)]);
            if (lvl == INT_MIN) lvl = l;
            else if (lvl != l) mixed = true;
        }
        bd->cls.levels.push_back(mixed ? INT_MIN : lvl);
    }

    const BlockData& ref = *bd;
    auto& slot = blocks_[b];
    slot = std::move(bd);
    if (verify_) verify_block(b, *slot);
    return *slot;
}

void Contraction::verify_block(Bidegree b, const BlockData& bd) const {
    // rank-nullity
    hard_assert(int(bd.ker.size()) + bd.rank_out == int(arena_->basis(b, BlockKind::inner).size()),
                "rank-nullity failed at " + b.str());
    // d o d = 0 out of this block
    if (win_.contains({b.w, b.d + 1})) {
        Bidegree up{b.w, b.d + 1};
        Mat z = compose(materialize_d0(up), materialize_d0(b));
        hard_assert(z.zero(), "d0^2 != 0 at " + b.str());
    }
    // representatives are cocycles
    const Mat& d = materialize_d0(b);
    for (const auto& rep : bd.cls.reps)
        hard_assert(apply(d, rep).zero(), "representative not closed at " + b.str());
}

const Contraction::Classes& Contraction::classes(Bidegree b) const { return block(b).cls; }

FullElem Contraction::i_inner(Bidegree b, int k) const {
    const BlockData& bd = block(b);
    hard_assert(k >= 0 && k < int(bd.cls.reps.size()), "i_inner: class index out of range");
    return arena_->from_coords(b, bd.cls.reps[size_t(k)], BlockKind::inner);
}

std::map<Bidegree, SparseVec> Contraction::p_inner(const FullElem& e) const {
    std::map<Bidegree, SparseVec> out;
    auto comps = arena_->to_coords(e, BlockKind::inner);
    for (auto& [b, v] : comps) {
        const BlockData& bd = block(b);
        SparseVec residue = bd.img.reduce(std::move(v));
        SparseVec coords;
        for (size_t k = 0; k < bd.hleads.size(); ++k) {
            const Rat* c = residue.at(bd.hleads[k]);
            if (c) coords.e.emplace_back(int(k), *c);
        }
        if (!coords.zero()) out[b] = std::move(coords);
    }
    return out;
}

FullElem Contraction::h_inner(const FullElem& e) const {
    FullElem out;
    auto comps = arena_->to_coords(e, BlockKind::inner);
    for (auto& [b, v] : comps) {
        const BlockData& bd = block(b);
        if (bd.img.size() == 0) continue;
        std::vector<Rat> coeffs;
        bd.img.reduce(std::move(v), &coeffs);
        Bidegree below{b.w, b.d - 1};
        for (size_t k = 0; k < coeffs.size(); ++k) {
            if (is_zero(coeffs[k])) continue;
            FullElem part = arena_->from_coords(below, bd.pre[k], BlockKind::inner);
            out.axpy(-coeffs[k], part);
        }
    }
    return out;
}

FullElem Contraction::h_full(const FullElem& e) const {
    // group by outer monomial; outer letters sit to the right of everything h
    // touches, so no signs appear.
    std::map<Mono, FullElem> groups;
    for (const auto& [t, c] : e.t) {
        auto [inner, outer] = arena_->split_outer(t);
        groups[outer].add(inner, c);
    }
    FullElem out;
    for (auto& [outer, inner_elem] : groups) {
        FullElem hi = h_inner(inner_elem);
        for (const auto& [t, c] : hi.t) out.add(arena_->attach_outer(t, outer), c);
    }
    return out;
}

std::map<std::pair<Bidegree, Mono>, SparseVec> Contraction::p_full(const FullElem& e) const {
    std::map<Mono, FullElem> groups;
    for (const auto& [t, c] : e.t) {
        auto [inner, outer] = arena_->split_outer(t);
        groups[outer].add(inner, c);
    }
    std::map<std::pair<Bidegree, Mono>, SparseVec> out;
    for (auto& [outer, inner_elem] : groups) {
        auto pc = p_inner(inner_elem);
        for (auto& [b, v] : pc) out[{b, outer}] = std::move(v);
    }
    return out;
}

FullElem Contraction::d0(const FullElem& e) const { return apply_sum(d0_, e); }

// ---------------------------------------------------------------------------

Stage::Stage(std::shared_ptr<const Arena> big, std::vector<OpSummand> designated,
             std::vector<OpSummand> perturbation, Window win, int class_w_max,
             const std::string& class_prefix, bool small_thetas_inner)
    : big_(big), designated_(std::move(designated)), pert_(std::move(perturbation)), win_(win),
      class_w_max_(std::min(class_w_max, win.w_max)), ctr_(big, designated_, win) {
    // Enumerate classes up to class_w_max and build the small arena: its ring
    // is the outer part of the big arena, its generators are the classes.
    std::vector<ArenaGen> gens;
    for (int w = win.w_min; w <= class_w_max_; ++w) {
        for (int d = win.d_min; d <= win.d_max; ++d) {
            Bidegree b{w, d};
            if (big_->basis(b, BlockKind::inner).empty()) continue;
            const auto& cls = ctr_.classes(b);
            for (int k = 0; k < int(cls.reps.size()); ++k) {
                ArenaGen g;
                g.name = class_prefix + "[" + std::to_string(w) + "," + std::to_string(d) + "]#" +
                         std::to_string(k);
                g.deg = b;
                g.level = cls.levels[size_t(k)];
                ids_.push_back({b, k});
                gen_of_class_[{b, k}] = int(gens.size());
                gens.push_back(std::move(g));
            }
        }
    }
    // thetas were inner iff the big arena consumed them in the contraction
    int nt = big_->outer_start() > big_->core_end() ? 0 : big_->n_theta();
    small_ = std::make_shared<Arena>(0, 0, nt, big_->n_delta(), std::move(gens),
                                     std::vector<InnerRelation>{}, small_thetas_inner);
    max_iter_ = 4 * (win.w_max - win.w_min + 1) + 8 * (big_->n_theta() + 1) + 32;
}

Mono Stage::outer_to_big(const Mono& small_mono) const {
    Mono m = Mono::one(big_->ring());
    for (int i = 0; i < small_->n_theta(); ++i)
        m.e[size_t(big_->theta_at(i))] = small_mono.e[size_t(small_->theta_at(i))];
    for (int i = 0; i < small_->n_delta(); ++i)
        m.e[size_t(big_->delta_at(i))] = small_mono.e[size_t(small_->delta_at(i))];
    return m;
}

Mono Stage::outer_to_small(const Mono& big_outer) const {
    Mono m = Mono::one(small_->ring());
    if (small_->n_theta() > 0)
        for (int i = 0; i < big_->n_theta(); ++i)
            m.e[size_t(small_->theta_at(i))] = big_outer.e[size_t(big_->theta_at(i))];
    for (int i = 0; i < big_->n_delta(); ++i)
        m.e[size_t(small_->delta_at(i))] = big_outer.e[size_t(big_->delta_at(i))];
    return m;
}

FullElem Stage::prune(FullElem e) const {
    for (auto it = e.t.begin(); it != e.t.end();) {
        if (big_->deg(it->first).w > win_.w_max) it = e.t.erase(it);
        else ++it;
    }
    return e;
}

FullElem Stage::lift0(const FullTerm& small_term) const {
    const ClassId& id = ids_[size_t(small_term.gen)];
    FullElem inner = ctr_.i_inner(id.deg, id.idx);
    // dress with the small ring monomial translated to big outer letters
    // (no signs: those letters are rightmost in both arenas)
    Mono big_outer = outer_to_big(small_term.m);
    FullElem out;
    for (const auto& [t, c] : inner.t) out.add(big_->attach_outer(t, big_outer), c);
    return out;
}

FullElem Stage::perturb_sum(const FullElem& e) const { return apply_sum(pert_, e); }

FullElem Stage::lift(const FullTerm& small_term) const {
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        auto it = lift_cache_.find(small_term);
        if (it != lift_cache_.end()) return it->second;
    }
    FullElem acc = lift0(small_term);
    FullElem u = acc;
    for (int n = 0; n < max_iter_; ++n) {
        u = prune(ctr_.h_full(perturb_sum(u)));
        if (u.zero()) {
            std::lock_guard<std::mutex> lk(cache_mu_);
            lift_cache_.emplace(small_term, acc);
            return acc;
        }
        acc.axpy(Rat(1), u);
    }
    fail(Errc::non_nilpotent_perturbation, "lift: perturbation series did not terminate");
}

FullElem Stage::lift(const FullElem& small_elem) const {
    FullElem out;
    for (const auto& [t, c] : small_elem.t) out.axpy(c, lift(t));
    return out;
}

FullElem Stage::small_from_pfull(const std::map<std::pair<Bidegree, Mono>, SparseVec>& pf) const {
    FullElem out;
    for (const auto& [key, coords] : pf) {
        const auto& [b, big_outer] = key;
        Mono sm = outer_to_small(big_outer);
        for (const auto& [k, c] : coords.e) {
            auto it = gen_of_class_.find({b, k});
            if (it == gen_of_class_.end()) {
                // classes beyond the class window are truncated; inside it
                // they must exist
                hard_assert(b.w > class_w_max_, "project: class missing inside window at " + b.str());
                continue;
            }
            FullTerm t{sm, it->second};
            out.add(t, c);
        }
    }
    return out;
}

FullElem Stage::project0(const FullElem& big_elem) const {
    return small_from_pfull(ctr_.p_full(big_elem));
}

FullElem Stage::homotopy(const FullElem& big_elem) const {
    FullElem u = prune(ctr_.h_full(big_elem));
    FullElem acc = u;
    for (int n = 0; n < max_iter_; ++n) {
        if (u.zero()) return acc;
        u = prune(ctr_.h_full(perturb_sum(u)));
        acc.axpy(Rat(1), u);
    }
    fail(Errc::non_nilpotent_perturbation, "homotopy: perturbation series did not terminate");
}

FullElem Stage::project(const FullElem& big_elem) const {
    FullElem out = project0(big_elem);
    out.axpy(Rat(1), project0(perturb_sum(homotopy(big_elem))));
    return out;
}

FullElem Stage::d_small(const FullTerm& t, const Rat& c) const {
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        auto it = dsmall_cache_.find(t);
        if (it != dsmall_cache_.end()) {
            FullElem r = it->second;
            r.scale(c);
            return r;
        }
    }
    FullElem r = project0(prune(perturb_sum(lift(t))));
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        dsmall_cache_.emplace(t, r);
    }
    r.scale(c);
    return r;
}

TermOp Stage::d_small_op() const {
    return [this](const FullTerm& t, const Rat& c) { return d_small(t, c); };
}

FullElem Stage::single_transfer(const OpSummand& op, const FullTerm& t, const Rat& c) const {
    FullElem r = project0(prune(apply_op(op.op, lift0(t))));
    r.scale(c);
    return r;
}

// ---------------------------------------------------------------------------

void check_d_squared_span(const Arena& A, const std::vector<OpSummand>& d, int max_letters) {
    // terms: every generator dressed with ring monomials of at most
    // max_letters letters
    std::vector<Mono> monos;
    int n = A.ring().size();
    Mono one = Mono::one(A.ring());
    monos.push_back(one);
    if (max_letters >= 1)
        for (int i = 0; i < n; ++i) {
            Mono m = one;
            m.e[size_t(i)] = 1;
            monos.push_back(m);
        }
    if (max_letters >= 2)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                if (i == j && A.ring().gens[size_t(i)].odd()) continue;
                Mono m = one;
                m.e[size_t(i)] = uint16_t(m.e[size_t(i)] + 1);
                m.e[size_t(j)] = uint16_t(m.e[size_t(j)] + 1);
                monos.push_back(m);
            }
    for (int g = 0; g < int(A.gens().size()); ++g) {
        for (const auto& m : monos) {
            FullTerm t{m, g};
            FullElem e;
            e.add(t, Rat(1));
            e = A.reduce(std::move(e));
            FullElem twice = apply_sum(d, apply_sum(d, e));
            if (!twice.zero()) {
                std::string res;
                for (const auto& [tt, cc] : twice.t) {
                    res += rat_str(cc) + "*" + A.term_str(tt) + " ";
                    if (res.size() > 160) break;
                }
                fail(Errc::internal, "invariant violated: d^2 != 0 on " + A.term_str(t) + " -> " + res);
            }
        }
    }
}

void check_d_squared(const Arena& A, const std::vector<OpSummand>& d, const Window& win, int w_margin) {
    for (int w = win.w_min; w <= win.w_max - w_margin; ++w) {
        for (int dd = win.d_min; dd <= win.d_max - 2; ++dd) {
            const auto& basis = A.basis({w, dd}, BlockKind::full);
            for (const auto& t : basis) {
                FullElem once;
                for (const auto& s : d) once.axpy(Rat(1), s.op(t, Rat(1)));
                FullElem twice;
                for (const auto& s : d) twice.axpy(Rat(1), apply_op(s.op, once));
                // terms beyond the margin can lack cancelling partners
                for (auto it = twice.t.begin(); it != twice.t.end();) {
                    if (A.deg(it->first).w > win.w_max - w_margin) it = twice.t.erase(it);
                    else ++it;
                }
                hard_assert(twice.zero(), "d^2 != 0 on " + A.term_str(t));
            }
        }
    }
}

} // namespace mf
