#include "mf/module_io.hpp"

#include "mf/error.hpp"
#include "mf/transfer.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace mf {

using nlohmann::ordered_json;

// defined in algebra.cpp
AlgebraSpec algebra_from_json_obj(const nlohmann::json& j);

int default_validation_cutoff(const PresentedRModule& m) {
    int w = 0;
    for (const auto& g : m.gens) w = std::max(w, g.deg.w);
    return w + m.algebra.n1 + 4;
}

namespace {

void check_lifted(const std::vector<ModGen>& gens, const std::string& who) {
    for (size_t i = 0; i < gens.size(); ++i) {
        const auto& g = gens[i];
        if (g.intrinsic_parity && *g.intrinsic_parity != ((g.deg.w % 2) + 2) % 2)
            fail(Errc::not_lifted,
                 "generator '" + g.name + "' declares intrinsic parity " +
                     std::to_string(*g.intrinsic_parity) + " but weight is " + std::to_string(g.deg.w),
                 who + "/gen " + std::to_string(i));
    }
}

std::vector<ArenaGen> to_arena_gens(const std::vector<ModGen>& gens) {
    std::vector<ArenaGen> out;
    for (const auto& g : gens) out.push_back({g.name, g.deg, g.effective_level(), g.note});
    return out;
}

// per-relation homogeneity: every term must share one bidegree
Bidegree relation_degree(const PresentedRModule& m, const std::vector<PolyEntry>& rel, size_t ridx) {
    hard_assert(!rel.empty(), "empty relation");
    std::optional<Bidegree> deg;
    for (const auto& t : rel) {
        if (t.tgt < 0 || t.tgt >= int(m.gens.size()))
            fail(Errc::schema_error, "relation hits unknown generator", m.name + "/rel " + std::to_string(ridx));
        if (int(t.exps.size()) != m.algebra.n1)
            fail(Errc::schema_error, "relation exponent vector has wrong length",
                 m.name + "/rel " + std::to_string(ridx));
        int e = 0;
        for (auto x : t.exps) e += x;
        Bidegree d = m.gens[size_t(t.tgt)].deg + Bidegree{e, e};
        if (!deg) deg = d;
        else if (*deg != d)
            fail(Errc::schema_error, "relation not homogeneous", m.name + "/rel " + std::to_string(ridx));
    }
    return *deg;
}

std::vector<InnerRelation> to_inner_relations(const PresentedRModule& m) {
    std::vector<InnerRelation> rels;
    for (size_t r = 0; r < m.relations.size(); ++r) {
        relation_degree(m, m.relations[r], r);
        InnerRelation ir;
        for (const auto& t : m.relations[r]) ir.terms.push_back({t.exps, t.tgt, t.c});
        rels.push_back(std::move(ir));
    }
    return rels;
}

} // namespace

void PresentedRModule::validate(int cutoff) const {
    algebra.validate();
    check_lifted(gens, name);
    auto A = make_arena(0, 0, false);
    if (rmod_i) {
        // every ideal generator must annihilate every basis element, checked
        // degreewise up to the cutoff
        CEAlgebra ce = build_ce(algebra);
        for (const auto& g : gens) {
            for (int w = g.deg.w; w + 2 <= cutoff; ++w) {
                Bidegree b{w, g.deg.d + (w - g.deg.w)};
                for (const auto& t : A->basis(b, BlockKind::core)) {
                    for (int mu = 0; mu < algebra.n2; ++mu) {
                        FullElem acc;
                        for (int a = 0; a < algebra.n1; ++a)
                            for (int bb = 0; bb < algebra.n1; ++bb) {
                                Rat c = algebra.f_at(mu, a, bb);
                                if (is_zero(c)) continue;
                                FullElem one = A->mul_ring(A->lambda_at(a), t, c);
                                for (const auto& [tt, cc] : one.t)
                                    acc.axpy(Rat(1), A->mul_ring(A->lambda_at(bb), tt, cc));
                            }
                        if (!acc.zero())
                            fail(Errc::dg_condition_violated,
                                 "ideal generator " + std::to_string(mu) + " does not annihilate " +
                                     A->term_str(t),
                                 name + "/weight " + std::to_string(w));
                    }
                }
            }
        }
    }
}

std::vector<int> PresentedRModule::hilbert(int cutoff) const {
    auto A = make_arena(0, 0, false);
    std::vector<int> h(size_t(cutoff) + 1, 0);
    std::set<Bidegree> blocks;
    for (const auto& g : gens)
        for (int w = g.deg.w; w <= cutoff; ++w) blocks.insert({w, g.deg.d + (w - g.deg.w)});
    for (const auto& b : blocks) h[size_t(b.w)] += int(A->basis(b, BlockKind::core).size());
    return h;
}

std::shared_ptr<Arena> PresentedRModule::make_arena(int n_theta, int n_delta, bool thetas_inner) const {
    return std::make_shared<Arena>(algebra.n1, 0, n_theta, n_delta, to_arena_gens(gens),
                                   to_inner_relations(*this), thetas_inner);
}

PresentedRModule direct_sum(const PresentedRModule& a, const PresentedRModule& b) {
    hard_assert(a.algebra.n1 == b.algebra.n1 && a.algebra.n2 == b.algebra.n2,
                "direct_sum: algebra mismatch");
    PresentedRModule s = a;
    s.name = a.name + "+" + b.name;
    int off = int(a.gens.size());
    for (auto g : b.gens) {
        g.name += "'";
        s.gens.push_back(g);
    }
    for (auto rel : b.relations) {
        for (auto& t : rel) t.tgt += off;
        s.relations.push_back(std::move(rel));
    }
    s.rmod_i = a.rmod_i && b.rmod_i;
    return s;
}

// --- semifree ---------------------------------------------------------------

void SemifreeDGModule::validate(int cutoff) const {
    algebra.validate();
    if (gens.empty()) fail(Errc::schema_error, "module has no generators", name);
    check_lifted(gens, name);
    int nring = algebra.n1 + algebra.n2;
    for (const auto& t : differential) {
        if (t.src < 0 || t.src >= int(gens.size()) || t.tgt < 0 || t.tgt >= int(gens.size()))
            fail(Errc::schema_error, "differential entry out of range", name);
        if (int(t.exps.size()) != nring)
            fail(Errc::schema_error, "differential exponent vector has wrong length", name);
        Bidegree shift{0, 0};
        for (int a = 0; a < algebra.n1; ++a) shift = shift + Bidegree{t.exps[size_t(a)], t.exps[size_t(a)]};
        for (int m = 0; m < algebra.n2; ++m) {
            int e = t.exps[size_t(algebra.n1 + m)];
            shift = shift + Bidegree{2 * e, e};
        }
        Bidegree total = gens[size_t(t.tgt)].deg + shift - gens[size_t(t.src)].deg;
        if (!(total == Bidegree{0, 1}))
            fail(Errc::dg_condition_violated,
                 "differential entry from '" + gens[size_t(t.src)].name + "' to '" +
                     gens[size_t(t.tgt)].name + "' is not of bidegree (0,1)",
                 name);
    }
    // symbolic dg condition on every generator
    auto A = make_arena(0, 0);
    auto d = internal_differential(A);
    for (int g = 0; g < int(gens.size()); ++g) {
        FullTerm t{Mono::one(A->ring()), g};
        FullElem e;
        e.add(t, Rat(1));
        FullElem once = apply_sum(d, e);
        FullElem twice = apply_sum(d, once);
        if (!twice.zero()) {
            std::string res;
            for (const auto& [tt, cc] : twice.t) res += rat_str(cc) + "*" + A->term_str(tt) + " ";
            fail(Errc::dg_condition_violated,
                 "d^2 nonzero on generator '" + gens[size_t(g)].name + "': " + res, name);
        }
    }
    (void)cutoff;
}

std::shared_ptr<Arena> SemifreeDGModule::make_arena(int n_theta, int n_delta) const {
    return std::make_shared<Arena>(algebra.n1, algebra.n2, n_theta, n_delta, to_arena_gens(gens));
}

std::vector<OpSummand> SemifreeDGModule::internal_differential(const std::shared_ptr<Arena>& A) const {
    std::vector<OpSummand> ops;
    // d_CE as a derivation on the vee letters
    if (algebra.n2 > 0 && algebra.n1 > 0) {
        auto images = std::make_shared<std::vector<SuperPoly>>();
        for (int m = 0; m < algebra.n2; ++m) {
            SuperPoly q;
            for (int a = 0; a < algebra.n1; ++a)
                for (int b = 0; b < algebra.n1; ++b) {
                    Rat c = algebra.f_at(m, a, b);
                    if (is_zero(c)) continue;
                    Mono mono = Mono::one(A->ring());
                    mono.e[size_t(A->lambda_at(a))] = uint16_t(mono.e[size_t(A->lambda_at(a))] + 1);
                    mono.e[size_t(A->lambda_at(b))] = uint16_t(mono.e[size_t(A->lambda_at(b))] + 1);
                    q.add(mono, c);
                }
            images->push_back(std::move(q));
        }
        auto An2 = algebra.n2;
        ops.push_back({"d_CE", {0, 1}, [A, images, An2](const FullTerm& t, const Rat& c) {
                           FullElem r;
                           for (int m = 0; m < An2; ++m)
                               r.axpy(Rat(1), A->derive_at(A->vee_at(m), (*images)[size_t(m)], 1, t, c));
                           return r;
                       }});
    }
    // matrix part
    if (!differential.empty()) {
        auto images = std::make_shared<std::vector<std::vector<std::tuple<Mono, int, Rat>>>>();
        images->assign(gens.size(), {});
        for (const auto& t : differential) {
            Mono m = Mono::one(A->ring());
            for (int a = 0; a < algebra.n1; ++a) m.e[size_t(A->lambda_at(a))] = t.exps[size_t(a)];
            for (int mm = 0; mm < algebra.n2; ++mm)
                m.e[size_t(A->vee_at(mm))] = t.exps[size_t(algebra.n1 + mm)];
            (*images)[size_t(t.src)].push_back({std::move(m), t.tgt, t.c});
        }
        ops.push_back({"d_Gamma", {0, 1}, [A, images](const FullTerm& t, const Rat& c) {
                           return A->map_gen(*images, 1, t, c);
                       }});
    }
    return ops;
}

// --- fiber ------------------------------------------------------------------

int MultipletFiber::pair_index(int a, int b) const {
    hard_assert(a <= b && b < algebra.n1, "pair_index out of range");
    int n = algebra.n1;
    return a * n - a * (a - 1) / 2 + (b - a);
}

std::vector<int> MultipletFiber::field_dims(Bidegree b) const {
    std::vector<int> out;
    for (int i = 0; i < int(fields.size()); ++i)
        if (fields[size_t(i)].deg == b) out.push_back(i);
    return out;
}

namespace {

void check_fiber_entry(const MultipletFiber& f, const PolyEntry& t, Bidegree true_shift,
                       const char* what) {
    if (t.src < 0 || t.src >= int(f.fields.size()) || t.tgt < 0 || t.tgt >= int(f.fields.size()))
        fail(Errc::schema_error, std::string(what) + " entry out of range", f.name);
    if (int(t.exps.size()) != f.algebra.n2)
        fail(Errc::schema_error, std::string(what) + " exponent vector length != n2", f.name);
    int k = 0;
    for (auto x : t.exps) k += x;
    Bidegree got = f.fields[size_t(t.tgt)].deg - f.fields[size_t(t.src)].deg;
    Bidegree want{true_shift.w + 2 * k, true_shift.d};
    if (!(got == want))
        fail(Errc::dg_condition_violated,
             std::string(what) + " entry from '" + f.fields[size_t(t.src)].name + "' to '" +
                 f.fields[size_t(t.tgt)].name + "' violates the order-" + std::to_string(k) +
                 " bidegree rule",
             f.name);
}

} // namespace

static Mono fiber_entry_mono(const Arena& A, const MultipletFiber& f, const PolyEntry& t,
                             int lam_a = -1, int lam_b = -1, bool keep_delta = true) {
    Mono m = Mono::one(A.ring());
    if (lam_a >= 0) m.e[size_t(A.lambda_at(lam_a))] = uint16_t(m.e[size_t(A.lambda_at(lam_a))] + 1);
    if (lam_b >= 0) m.e[size_t(A.lambda_at(lam_b))] = uint16_t(m.e[size_t(A.lambda_at(lam_b))] + 1);
    if (keep_delta)
        for (int mu = 0; mu < f.algebra.n2; ++mu) m.e[size_t(A.delta_at(mu))] = t.exps[size_t(mu)];
    return m;
}

static void add_matrix_op(std::vector<OpSummand>& ops, const std::shared_ptr<Arena>& A,
                          std::shared_ptr<std::vector<std::vector<std::tuple<Mono, int, Rat>>>> images,
                          const std::string& name) {
    bool any = false;
    for (const auto& row : *images)
        if (!row.empty()) any = true;
    if (!any) return;
    ops.push_back({name, {0, 1}, [A, images](const FullTerm& t, const Rat& c) {
                       return A->map_gen(*images, 1, t, c);
                   }});
}

std::vector<OpSummand> fiber_ce_ops(const MultipletFiber& f, const std::shared_ptr<Arena>& A) {
    std::vector<OpSummand> ops;
    const int n1 = f.algebra.n1, n2 = f.algebra.n2;
    // d_CE on the vee letters
    if (n2 > 0 && n1 > 0) {
        auto images = std::make_shared<std::vector<SuperPoly>>();
        for (int m = 0; m < n2; ++m) {
            SuperPoly q;
            for (int a = 0; a < n1; ++a)
                for (int b = 0; b < n1; ++b) {
                    Rat c = f.algebra.f_at(m, a, b);
                    if (is_zero(c)) continue;
                    Mono mono = Mono::one(A->ring());
                    mono.e[size_t(A->lambda_at(a))] = uint16_t(mono.e[size_t(A->lambda_at(a))] + 1);
                    mono.e[size_t(A->lambda_at(b))] = uint16_t(mono.e[size_t(A->lambda_at(b))] + 1);
                    q.add(mono, c);
                }
            images->push_back(std::move(q));
        }
        ops.push_back({"d_CE", {0, 1}, [A, images, n2](const FullTerm& t, const Rat& c) {
                           FullElem r;
                           for (int m = 0; m < n2; ++m)
                               r.axpy(Rat(1), A->derive_at(A->vee_at(m), (*images)[size_t(m)], 1, t, c));
                           return r;
                       }});
    }
    // minus v^mu delta_mu. Together with the lambda-dressed action matrices
    // this encodes the closure convention for fiber data: the lambda^a
    // lambda^b coefficient of the square must cancel the d_CE(v) source.
    if (n2 > 0) {
        ops.push_back({"-v.delta", {4, 1}, [A, n2](const FullTerm& t, const Rat& c) {
                           FullElem r;
                           for (int m = 0; m < n2; ++m) {
                               FullElem one = A->mul_ring(A->delta_at(m), t, c);
                               for (const auto& [tt, cc] : one.t)
                                   r.axpy(Rat(-1), A->mul_ring(A->vee_at(m), tt, cc));
                           }
                           return r;
                       }});
    }
    // D with full delta entries
    {
        auto images = std::make_shared<std::vector<std::vector<std::tuple<Mono, int, Rat>>>>();
        images->assign(f.fields.size(), {});
        for (const auto& t : f.d0)
            (*images)[size_t(t.src)].push_back({fiber_entry_mono(*A, f, t), t.tgt, t.c});
        add_matrix_op(ops, A, images, "D");
    }
    // lambda^a rho1_a and lambda^a lambda^b rho2_{ab}
    {
        auto images = std::make_shared<std::vector<std::vector<std::tuple<Mono, int, Rat>>>>();
        images->assign(f.fields.size(), {});
        for (int a = 0; a < n1; ++a)
            for (const auto& t : f.rho1[size_t(a)])
                (*images)[size_t(t.src)].push_back({fiber_entry_mono(*A, f, t, a), t.tgt, t.c});
        for (int a = 0; a < n1; ++a)
            for (int b = a; b < n1; ++b)
                for (const auto& t : f.rho2[size_t(f.pair_index(a, b))])
                    (*images)[size_t(t.src)].push_back({fiber_entry_mono(*A, f, t, a, b), t.tgt, t.c});
        add_matrix_op(ops, A, images, "lambda.rho");
    }
    return ops;
}

std::vector<OpSummand> fiber_invariants_ops(const MultipletFiber& f, const std::shared_ptr<Arena>& A) {
    std::vector<OpSummand> ops;
    const int n1 = f.algebra.n1;
    auto zero_order = [](const PolyEntry& t) {
        for (auto x : t.exps)
            if (x) return false;
        return true;
    };
    auto images = std::make_shared<std::vector<std::vector<std::tuple<Mono, int, Rat>>>>();
    images->assign(f.fields.size(), {});
    for (const auto& t : f.d0)
        if (zero_order(t))
            (*images)[size_t(t.src)].push_back({fiber_entry_mono(*A, f, t, -1, -1, false), t.tgt, t.c});
    for (int a = 0; a < n1; ++a)
        for (const auto& t : f.rho1[size_t(a)])
            if (zero_order(t))
                (*images)[size_t(t.src)].push_back({fiber_entry_mono(*A, f, t, a, -1, false), t.tgt, t.c});
    for (int a = 0; a < n1; ++a)
        for (int b = a; b < n1; ++b)
            for (const auto& t : f.rho2[size_t(f.pair_index(a, b))])
                if (zero_order(t))
                    (*images)[size_t(t.src)].push_back({fiber_entry_mono(*A, f, t, a, b, false), t.tgt, t.c});
    add_matrix_op(ops, A, images, "M0");
    return ops;
}

void MultipletFiber::validate() const {
    algebra.validate();
    if (fields.empty()) fail(Errc::schema_error, "fiber has no fields", name);
    check_lifted(fields, name);
    if (int(rho1.size()) != algebra.n1) fail(Errc::schema_error, "rho1 must have n1 rows", name);
    int npairs = algebra.n1 * (algebra.n1 + 1) / 2;
    if (int(rho2.size()) != npairs) fail(Errc::schema_error, "rho2 must have n1(n1+1)/2 rows", name);
    for (const auto& t : d0) check_fiber_entry(*this, t, {0, 1}, "differential");
    for (const auto& row : rho1)
        for (const auto& t : row) check_fiber_entry(*this, t, {-1, 0}, "rho1");
    for (const auto& row : rho2)
        for (const auto& t : row) check_fiber_entry(*this, t, {-2, -1}, "rho2");

    // L-infinity module relations, checked as square-zero of the full
    // invariants-style differential d_CE - v delta + D + lambda.rho on the
    // (lambda, vee, delta | fields) arena.
    auto A = std::make_shared<Arena>(algebra.n1, algebra.n2, 0, algebra.n2, to_arena_gens(fields));
    auto ops = fiber_ce_ops(*this, A);
    try {
        check_d_squared_span(*A, ops, 2);
    } catch (const Error& e) {
        if (e.code == Errc::internal)
            fail(Errc::dg_condition_violated, std::string("L-infinity relations fail: ") + e.what(), name);
        throw;
    }
}

// --- io ---------------------------------------------------------------------

namespace {

ordered_json gens_to_json(const std::vector<ModGen>& gens) {
    ordered_json arr = ordered_json::array();
    for (const auto& g : gens) {
        ordered_json e;
        e["name"] = g.name;
        e["w"] = g.deg.w;
        e["d"] = g.deg.d;
        if (g.level) e["level"] = *g.level;
        if (g.intrinsic_parity) e["parity"] = *g.intrinsic_parity;
        if (!g.note.empty()) e["note"] = g.note;
        arr.push_back(std::move(e));
    }
    return arr;
}

std::vector<ModGen> gens_from_json(const nlohmann::json& arr) {
    std::vector<ModGen> out;
    for (const auto& e : arr) {
        ModGen g;
        g.name = e.at("name").get<std::string>();
        g.deg = {e.at("w").get<int>(), e.at("d").get<int>()};
        if (e.contains("level")) g.level = e.at("level").get<int>();
        if (e.contains("parity")) g.intrinsic_parity = e.at("parity").get<int>();
        if (e.contains("note")) g.note = e.at("note").get<std::string>();
        out.push_back(std::move(g));
    }
    return out;
}

ordered_json poly_rows_to_json(const std::vector<PolyEntry>& entries) {
    // grouped per (src, tgt): "poly" as [[exps, coeff], ...]
    ordered_json arr = ordered_json::array();
    std::map<std::pair<int, int>, std::vector<const PolyEntry*>> grouped;
    for (const auto& t : entries) grouped[{t.src, t.tgt}].push_back(&t);
    for (const auto& [key, list] : grouped) {
        ordered_json e;
        e["src"] = key.first;
        e["tgt"] = key.second;
        ordered_json poly = ordered_json::array();
        for (const auto* t : list) {
            ordered_json exps = ordered_json::array();
            for (auto x : t->exps) exps.push_back(int(x));
            poly.push_back({exps, rat_str(t->c)});
        }
        e["poly"] = poly;
        arr.push_back(std::move(e));
    }
    return arr;
}

std::vector<PolyEntry> poly_rows_from_json(const nlohmann::json& arr) {
    std::vector<PolyEntry> out;
    for (const auto& e : arr) {
        int src = e.at("src").get<int>();
        int tgt = e.at("tgt").get<int>();
        for (const auto& term : e.at("poly")) {
            PolyEntry t;
            t.src = src;
            t.tgt = tgt;
            for (const auto& x : term.at(0)) t.exps.push_back(uint16_t(x.get<int>()));
            t.c = parse_rat(term.at(1).get<std::string>());
            out.push_back(std::move(t));
        }
    }
    return out;
}

ordered_json algebra_field(const AlgebraSpec& s) {
    return nlohmann::ordered_json::parse(algebra_to_json(s));
}

AlgebraSpec algebra_from_field(const nlohmann::json& j) {
    if (j.contains("preset")) return preset(j.at("preset").get<std::string>());
    return algebra_from_json_obj(j);
}

} // namespace

LoadedInput input_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("json parse: ") + e.what());
    }
    std::string cls;
    try {
        cls = j.at("class").get<std::string>();
        if (cls == "presented_r_module") {
            PresentedRModule m;
            m.algebra = algebra_from_field(j.at("algebra"));
            m.name = j.value("name", "");
            m.gens = gens_from_json(j.at("generators"));
            if (j.contains("relations"))
                for (const auto& rel : j.at("relations")) {
                    std::vector<PolyEntry> r;
                    for (const auto& term : rel) {
                        PolyEntry t;
                        t.tgt = term.at("gen").get<int>();
                        for (const auto& x : term.at("exps")) t.exps.push_back(uint16_t(x.get<int>()));
                        t.c = parse_rat(term.at("c").get<std::string>());
                        r.push_back(std::move(t));
                    }
                    m.relations.push_back(std::move(r));
                }
            m.rmod_i = j.value("rmod_i", false);
            m.validate(default_validation_cutoff(m));
            return m;
        }
        if (cls == "semifree_dg_module") {
            SemifreeDGModule m;
            m.algebra = algebra_from_field(j.at("algebra"));
            m.name = j.value("name", "");
            m.gens = gens_from_json(j.at("generators"));
            if (j.contains("differential")) m.differential = poly_rows_from_json(j.at("differential"));
            m.validate(0);
            return m;
        }
        if (cls == "multiplet_fiber") {
            MultipletFiber f;
            f.algebra = algebra_from_field(j.at("algebra"));
            f.name = j.value("name", "");
            f.fields = gens_from_json(j.at("fields"));
            if (j.contains("d")) f.d0 = poly_rows_from_json(j.at("d"));
            f.rho1.assign(size_t(f.algebra.n1), {});
            if (j.contains("rho1")) {
                const auto& r1 = j.at("rho1");
                if (int(r1.size()) != f.algebra.n1) fail(Errc::schema_error, "rho1 length != n1");
                for (int a = 0; a < f.algebra.n1; ++a) f.rho1[size_t(a)] = poly_rows_from_json(r1.at(size_t(a)));
            }
            int npairs = f.algebra.n1 * (f.algebra.n1 + 1) / 2;
            f.rho2.assign(size_t(npairs), {});
            if (j.contains("rho2")) {
                for (const auto& e : j.at("rho2")) {
                    int a = e.at("a").get<int>();
                    int b = e.at("b").get<int>();
                    f.rho2[size_t(f.pair_index(a, b))] = poly_rows_from_json(e.at("entries"));
                }
            }
            f.validate();
            return f;
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("input json: ") + e.what());
    }
    fail(Errc::schema_error, "unknown class '" + cls + "'");
}

std::string input_to_json(const LoadedInput& in) {
    ordered_json j;
    if (const auto* m = std::get_if<PresentedRModule>(&in)) {
        j["class"] = "presented_r_module";
        j["name"] = m->name;
        j["algebra"] = algebra_field(m->algebra);
        j["generators"] = gens_to_json(m->gens);
        ordered_json rels = ordered_json::array();
        for (const auto& rel : m->relations) {
            ordered_json r = ordered_json::array();
            for (const auto& t : rel) {
                ordered_json e;
                e["gen"] = t.tgt;
                ordered_json exps = ordered_json::array();
                for (auto x : t.exps) exps.push_back(int(x));
                e["exps"] = exps;
                e["c"] = rat_str(t.c);
                r.push_back(std::move(e));
            }
            rels.push_back(std::move(r));
        }
        j["relations"] = rels;
        j["rmod_i"] = m->rmod_i;
    } else if (const auto* m = std::get_if<SemifreeDGModule>(&in)) {
        j["class"] = "semifree_dg_module";
        j["name"] = m->name;
        j["algebra"] = algebra_field(m->algebra);
        j["generators"] = gens_to_json(m->gens);
        j["differential"] = poly_rows_to_json(m->differential);
    } else if (const auto* f = std::get_if<MultipletFiber>(&in)) {
        j["class"] = "multiplet_fiber";
        j["name"] = f->name;
        j["algebra"] = algebra_field(f->algebra);
        j["fields"] = gens_to_json(f->fields);
        j["d"] = poly_rows_to_json(f->d0);
        ordered_json r1 = ordered_json::array();
        for (const auto& row : f->rho1) r1.push_back(poly_rows_to_json(row));
        j["rho1"] = r1;
        ordered_json r2 = ordered_json::array();
        for (int a = 0; a < f->algebra.n1; ++a)
            for (int b = a; b < f->algebra.n1; ++b) {
                const auto& row = f->rho2[size_t(f->pair_index(a, b))];
                if (row.empty()) continue;
                ordered_json e;
                e["a"] = a;
                e["b"] = b;
                e["entries"] = poly_rows_to_json(row);
                r2.push_back(std::move(e));
            }
        j["rho2"] = r2;
    }
    return j.dump(2) + "\n";
}

LoadedInput load_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::schema_error, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return input_from_json(ss.str());
}

void save_input(const LoadedInput& in, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::schema_error, "cannot open '" + path + "' for writing");
    out << input_to_json(in);
}

} // namespace mf
