#include "mf/super_poly.hpp"

#include <algorithm>
#include <set>

namespace mf {

Bidegree standard_bidegree(GenKind k) {
    switch (k) {
        case GenKind::lambda: return {1, 1};
        case GenKind::theta: return {1, 0};
        case GenKind::vee: return {2, 1};
        case GenKind::delta: return {2, 0};
        case GenKind::custom: return {0, 0};
    }
    return {0, 0};
}

int GeneratorTable::index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (gens[i].name == name) return i;
    return -1;
}

void GeneratorTable::validate() const {
    std::set<std::string> seen;
    for (const auto& g : gens) {
        if (!seen.insert(g.name).second)
            fail(Errc::schema_error, "duplicate generator name '" + g.name + "'");
        if (g.kind != GenKind::custom && g.deg != standard_bidegree(g.kind))
            fail(Errc::schema_error, "generator '" + g.name + "' has nonstandard bidegree for its kind");
    }
}

Mono Mono::gen(const GeneratorTable& t, int i) {
    Mono m = one(t);
    m.e[size_t(i)] = 1;
    return m;
}

Bidegree Mono::degree(const GeneratorTable& t) const {
    Bidegree b{0, 0};
    for (size_t i = 0; i < e.size(); ++i) {
        b.w += int(e[i]) * t.gens[i].deg.w;
        b.d += int(e[i]) * t.gens[i].deg.d;
    }
    return b;
}

int Mono::parity(const GeneratorTable& t) const {
    int p = 0;
    for (size_t i = 0; i < e.size(); ++i)
        p += int(e[i]) * t.gens[i].parity();
    return p & 1;
}

bool Mono::is_one() const {
    return std::all_of(e.begin(), e.end(), [](uint16_t x) { return x == 0; });
}

std::optional<std::pair<Mono, int>> mono_mul(const GeneratorTable& t, const Mono& a, const Mono& b) {
    const size_t n = a.e.size();
    hard_assert(b.e.size() == n, "mono_mul: size mismatch");
    Mono r = a;
    int sign = 0; // exponent of -1
    // Move each odd factor of b leftward past the odd tail of a.
    // Count, for every odd i present in b, the odd generators of a at
    // positions > i.
    int odd_tail = 0;
    for (size_t i = n; i-- > 0;) {
        if (b.e[i]) {
            if (t.gens[i].odd()) {
                if (a.e[i]) return std::nullopt; // odd square
                sign += odd_tail;
            }
            r.e[i] = uint16_t(r.e[i] + b.e[i]);
        }
        if (t.gens[i].odd() && a.e[i]) odd_tail += 1;
    }
    return std::make_pair(std::move(r), (sign & 1) ? -1 : 1);
}

SuperPoly SuperPoly::monomial(Mono m, Rat c) {
    SuperPoly p;
    if (!is_zero(c)) p.terms.emplace(std::move(m), std::move(c));
    return p;
}

SuperPoly& SuperPoly::add(const Mono& m, Rat c) {
    if (is_zero(c)) return *this;
    auto [it, inserted] = terms.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (is_zero(it->second)) terms.erase(it);
    }
    return *this;
}

SuperPoly& SuperPoly::axpy(const Rat& c, const SuperPoly& o) {
    if (is_zero(c)) return *this;
    for (const auto& [m, v] : o.terms) add(m, c * v);
    return *this;
}

SuperPoly SuperPoly::operator+(const SuperPoly& o) const {
    SuperPoly r = *this;
    r.axpy(Rat(1), o);
    return r;
}

SuperPoly SuperPoly::operator-() const {
    SuperPoly r;
    for (const auto& [m, v] : terms) r.terms.emplace(m, -v);
    return r;
}

std::optional<Bidegree> SuperPoly::homogeneous_degree(const GeneratorTable& t) const {
    std::optional<Bidegree> deg;
    for (const auto& [m, v] : terms) {
        Bidegree b = m.degree(t);
        if (!deg) deg = b;
        else if (*deg != b) return std::nullopt;
    }
    return deg;
}

int SuperPoly::parity(const GeneratorTable& t) const {
    int p = -1;
    for (const auto& [m, v] : terms) {
        int q = m.parity(t);
        if (p < 0) p = q;
        else hard_assert(p == q, "SuperPoly::parity: mixed parity");
    }
    return p < 0 ? 0 : p;
}

SuperPoly multiply(const GeneratorTable& t, const SuperPoly& a, const SuperPoly& b) {
    SuperPoly r;
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            auto prod = mono_mul(t, ma, mb);
            if (!prod) continue;
            r.add(prod->first, ca * cb * prod->second);
        }
    return r;
}

void Derivation::validate() const {
    hard_assert(table != nullptr, "Derivation: null table");
    hard_assert(int(images.size()) == table->size(), "Derivation: image count mismatch");
    for (int i = 0; i < table->size(); ++i) {
        if (images[size_t(i)].zero()) continue;
        auto deg = images[size_t(i)].homogeneous_degree(*table);
        if (!deg || *deg != table->gens[size_t(i)].deg + shift)
            fail(Errc::schema_error,
                 "derivation image of '" + table->gens[size_t(i)].name + "' not homogeneous of expected bidegree");
        int want = (table->gens[size_t(i)].parity() + parity) & 1;
        if (images[size_t(i)].parity(*table) != want)
            fail(Errc::schema_error, "derivation image of '" + table->gens[size_t(i)].name + "' has wrong parity");
    }
}

SuperPoly apply_derivation(const Derivation& d, const SuperPoly& p) {
    const GeneratorTable& t = *d.table;
    SuperPoly out;
    for (const auto& [m, c] : p.terms) {
        // Leibniz sweep left to right; sign accumulates as the derivation
        // passes the odd prefix.
        int prefix_parity = 0;
        for (size_t i = 0; i < m.e.size(); ++i) {
            if (m.e[i] == 0) {
                continue;
            }
            if (!d.images[i].zero()) {
                // term: prefix * D(g_i) * g_i^{e_i-1} * suffix, times e_i
                Mono prefix = Mono::one(t);
                for (size_t j = 0; j < i; ++j) prefix.e[j] = m.e[j];
                Mono rest = Mono::one(t);
                rest.e[i] = uint16_t(m.e[i] - 1);
                for (size_t j = i + 1; j < m.e.size(); ++j) rest.e[j] = m.e[j];
                int sgn = ((d.parity * prefix_parity) & 1) ? -1 : 1;
                SuperPoly piece = multiply(t, SuperPoly::monomial(std::move(prefix), Rat(1)), d.images[i]);
                piece = multiply(t, piece, SuperPoly::monomial(std::move(rest), Rat(1)));
                out.axpy(c * Rat(int(m.e[i]) * sgn), piece);
            }
            prefix_parity = (prefix_parity + int(m.e[i]) * t.gens[i].parity()) & 1;
        }
    }
    return out;
}

std::vector<Mono> enumerate_monomials(const GeneratorTable& t, int w_max, int d_min, int d_max) {
    for (const auto& g : t.gens)
        if (g.deg.w <= 0)
            fail(Errc::non_positive_weight_generator, "generator '" + g.name + "' has weight <= 0");
    std::vector<Mono> out;
    Mono cur = Mono::one(t);
    // depth-first over positions; weight-bounded so this terminates
    auto rec = [&](auto&& self, int pos, int w, int dd) -> void {
        if (pos == t.size()) {
            if (w <= w_max && dd >= d_min && dd <= d_max) out.push_back(cur);
            return;
        }
        const Generator& g = t.gens[size_t(pos)];
        int max_e = g.odd() ? 1 : (g.deg.w > 0 ? (w_max - w) / g.deg.w : 0);
        for (int k = 0; k <= max_e; ++k) {
            if (w + k * g.deg.w > w_max) break;
            cur.e[size_t(pos)] = uint16_t(k);
            self(self, pos + 1, w + k * g.deg.w, dd + k * g.deg.d);
        }
        cur.e[size_t(pos)] = 0;
    };
    rec(rec, 0, 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

std::string mono_str(const GeneratorTable& t, const Mono& m) {
    if (m.is_one()) return "1";
    std::string s;
    for (size_t i = 0; i < m.e.size(); ++i) {
        if (!m.e[i]) continue;
        if (!s.empty()) s += "*";
        s += t.gens[i].name;
        if (m.e[i] > 1) s += "^" + std::to_string(int(m.e[i]));
    }
    return s;
}

std::string poly_str(const GeneratorTable& t, const SuperPoly& p) {
    if (p.zero()) return "0";
    std::string s;
    for (const auto& [m, c] : p.terms) {
        std::string cs = rat_str(c);
        if (!s.empty()) {
            if (!cs.empty() && cs[0] == '-') {
                s += " - ";
                cs = cs.substr(1);
            } else {
                s += " + ";
            }
        }
        if (m.is_one()) {
            s += cs;
        } else if (cs == "1") {
            s += mono_str(t, m);
        } else if (cs == "-1" && s.empty()) {
            s += "-" + mono_str(t, m);
        } else {
            s += cs + "*" + mono_str(t, m);
        }
    }
    return s;
}

} // namespace mf
