#include "mf/algebra.hpp"

#include "mf/error.hpp"

#include <nlohmann/json.hpp>

namespace mf {

using nlohmann::ordered_json;

void AlgebraSpec::validate() const {
    if (n1 < 0 || n2 <= 0) fail(Errc::schema_error, "algebra dimensions out of range", name);
    if (int(f.size()) != n2) fail(Errc::schema_error, "f has wrong outer dimension", name);
    for (int m = 0; m < n2; ++m) {
        if (int(f[size_t(m)].size()) != n1) fail(Errc::schema_error, "f row count mismatch", name);
        for (int a = 0; a < n1; ++a) {
            if (int(f[size_t(m)][size_t(a)].size()) != n1)
                fail(Errc::schema_error, "f column count mismatch", name);
            for (int b = 0; b < n1; ++b)
                if (f_at(m, a, b) != f_at(m, b, a))
                    fail(Errc::asymmetric_structure_constants,
                         "f^" + std::to_string(m) + " not symmetric at (" + std::to_string(a) + "," +
                             std::to_string(b) + ")",
                         name);
        }
    }
}

static AlgebraSpec make_spec(std::string name, int n1, int n2,
                             std::vector<std::tuple<int, int, int, Rat>> entries,
                             std::vector<std::string> lo = {}, std::vector<std::string> le = {}) {
    AlgebraSpec s;
    s.name = std::move(name);
    s.n1 = n1;
    s.n2 = n2;
    s.f.assign(size_t(n2), std::vector<std::vector<Rat>>(size_t(n1), std::vector<Rat>(size_t(n1), Rat(0))));
    for (auto& [m, a, b, c] : entries) {
        s.f[size_t(m)][size_t(a)][size_t(b)] = c;
        s.f[size_t(m)][size_t(b)][size_t(a)] = c;
    }
    s.labels_odd = std::move(lo);
    s.labels_even = std::move(le);
    s.validate();
    return s;
}

const std::vector<AlgebraSpec>& presets() {
    static const std::vector<AlgebraSpec> cat = [] {
        std::vector<AlgebraSpec> v;
        // 3d N=1: S two-dimensional, bracket Sym^2 S = V; d_CE v1 = l1^2,
        // v2 = l1 l2, v3 = l2^2.
        v.push_back(make_spec("3dN1", 2, 3,
                              {{0, 0, 0, Rat(1)}, {1, 0, 1, rat(1, 2)}, {2, 1, 1, Rat(1)}},
                              {"S+", "S-"}, {"V11", "V12", "V22"}));
        // SUSY quantum mechanics: one even direction, d_CE v = sum (l^a)^2
        for (int n = 1; n <= 4; ++n) {
            std::vector<std::tuple<int, int, int, Rat>> e;
            for (int a = 0; a < n; ++a) e.push_back({0, a, a, Rat(1)});
            v.push_back(make_spec("qm" + std::to_string(n), n, 1, std::move(e)));
        }
        // 4d N=1: lambdas l1,l2 (S+), l3,l4 (S-bar); v indexed by pairs
        // (alpha, alphadot) in order 11,12,21,22; d_CE v^{a,ad} = l^a lbar^ad.
        {
            std::vector<std::tuple<int, int, int, Rat>> e;
            int mu = 0;
            for (int a = 0; a < 2; ++a)
                for (int ad = 0; ad < 2; ++ad) {
                    e.push_back({mu, a, 2 + ad, Rat(1)});
                    ++mu;
                }
            v.push_back(make_spec("4dN1", 4, 4, std::move(e), {"S+1", "S+2", "S-1", "S-2"},
                                  {"V11", "V12", "V21", "V22"}));
        }
        // pure translations in three dimensions (no supersymmetry at all)
        v.push_back(make_spec("translations3", 0, 3, {}));
        return v;
    }();
    return cat;
}

AlgebraSpec preset(const std::string& name) {
    for (const auto& s : presets())
        if (s.name == name) return s;
    fail(Errc::schema_error, "unknown preset '" + name + "'");
}

CEAlgebra build_ce(const AlgebraSpec& spec) {
    spec.validate();
    CEAlgebra ce;
    ce.spec = spec;
    for (int a = 0; a < spec.n1; ++a)
        ce.table.gens.push_back({"l" + std::to_string(a + 1), GenKind::lambda, {1, 1}});
    for (int m = 0; m < spec.n2; ++m)
        ce.table.gens.push_back({"v" + std::to_string(m + 1), GenKind::vee, {2, 1}});
    ce.table.validate();
    ce.d_ce.table = &ce.table;
    ce.d_ce.parity = 1;
    ce.d_ce.shift = {0, 1};
    ce.d_ce.images.assign(ce.table.gens.size(), SuperPoly{});
    for (int m = 0; m < spec.n2; ++m) {
        SuperPoly q;
        for (int a = 0; a < spec.n1; ++a)
            for (int b = 0; b < spec.n1; ++b) {
                if (is_zero(spec.f_at(m, a, b))) continue;
                Mono mono = Mono::one(ce.table);
                mono.e[size_t(a)] = uint16_t(mono.e[size_t(a)] + 1);
                mono.e[size_t(b)] = uint16_t(mono.e[size_t(b)] + 1);
                q.add(mono, spec.f_at(m, a, b));
            }
        ce.d_ce.images[size_t(ce.vee_index(m))] = q;
        ce.ideal.push_back(std::move(q));
    }
    ce.d_ce.validate();
    // d_CE^2 = 0 on generators (images are lambda-only, hence closed)
    for (const auto& im : ce.d_ce.images)
        hard_assert(apply_derivation(ce.d_ce, im).zero(), "d_CE^2 != 0 on a generator");
    return ce;
}

std::string algebra_to_json(const AlgebraSpec& spec) {
    ordered_json j;
    j["name"] = spec.name;
    j["n1"] = spec.n1;
    j["n2"] = spec.n2;
    ordered_json fentries = ordered_json::array();
    for (int m = 0; m < spec.n2; ++m)
        for (int a = 0; a < spec.n1; ++a)
            for (int b = a; b < spec.n1; ++b)
                if (!is_zero(spec.f_at(m, a, b)))
                    fentries.push_back({m, a, b, rat_str(spec.f_at(m, a, b))});
    j["f"] = fentries;
    if (!spec.labels_odd.empty()) j["labels"]["odd"] = spec.labels_odd;
    if (!spec.labels_even.empty()) j["labels"]["even"] = spec.labels_even;
    return j.dump(2) + "\n";
}

AlgebraSpec algebra_from_json_obj(const nlohmann::json& j) {
    AlgebraSpec s;
    try {
        s.name = j.value("name", "");
        s.n1 = j.at("n1").get<int>();
        s.n2 = j.at("n2").get<int>();
        if (s.n1 < 0 || s.n2 <= 0) fail(Errc::schema_error, "bad dimensions");
        s.f.assign(size_t(s.n2),
                   std::vector<std::vector<Rat>>(size_t(s.n1), std::vector<Rat>(size_t(s.n1), Rat(0))));
        std::vector<std::vector<std::vector<bool>>> seen(
            size_t(s.n2), std::vector<std::vector<bool>>(size_t(s.n1), std::vector<bool>(size_t(s.n1), false)));
        for (const auto& ent : j.at("f")) {
            int m = ent.at(0).get<int>();
            int a = ent.at(1).get<int>();
            int b = ent.at(2).get<int>();
            Rat c = parse_rat(ent.at(3).get<std::string>());
            if (m < 0 || m >= s.n2 || a < 0 || a >= s.n1 || b < 0 || b >= s.n1)
                fail(Errc::schema_error, "f entry index out of range");
            // symmetric completion with conflict detection
            if (seen[size_t(m)][size_t(a)][size_t(b)] && s.f[size_t(m)][size_t(a)][size_t(b)] != c)
                fail(Errc::schema_error, "conflicting f entries at (" + std::to_string(m) + "," +
                                             std::to_string(a) + "," + std::to_string(b) + ")");
            s.f[size_t(m)][size_t(a)][size_t(b)] = c;
            s.f[size_t(m)][size_t(b)][size_t(a)] = c;
            seen[size_t(m)][size_t(a)][size_t(b)] = true;
            seen[size_t(m)][size_t(b)][size_t(a)] = true;
        }
        if (j.contains("labels")) {
            const auto& l = j.at("labels");
            if (l.contains("odd")) s.labels_odd = l.at("odd").get<std::vector<std::string>>();
            if (l.contains("even")) s.labels_even = l.at("even").get<std::vector<std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("algebra json: ") + e.what());
    }
    s.validate();
    return s;
}

AlgebraSpec algebra_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("algebra json parse: ") + e.what());
    }
    return algebra_from_json_obj(j);
}

} // namespace mf
