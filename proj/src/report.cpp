#include "mf/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <climits>
#include <sstream>

namespace mf {

using nlohmann::ordered_json;

std::string array_line(const std::vector<ModGen>& fields) {
    if (fields.empty()) return "[]";
    auto sd = sheared_dims(fields);
    int cmin = INT_MAX, cmax = INT_MIN, rmin = INT_MAX, rmax = INT_MIN;
    for (const auto& [cd, n] : sd) {
        cmin = std::min(cmin, cd.first);
        cmax = std::max(cmax, cd.first);
        rmin = std::min(rmin, cd.second);
        rmax = std::max(rmax, cd.second);
    }
    std::string s = "[";
    for (int r = rmin; r <= rmax; ++r) {
        if (r > rmin) s += "; ";
        for (int c = cmin; c <= cmax; ++c) {
            if (c > cmin) s += " ";
            auto it = sd.find({c, r});
            s += it == sd.end() ? std::string("-") : std::to_string(it->second);
        }
    }
    return s + "]";
}

std::string array_block(const std::vector<ModGen>& fields) {
    std::ostringstream os;
    os << array_line(fields) << "\n";
    os << "absolute (w,d) dims:";
    std::map<Bidegree, int> dims;
    for (const auto& g : fields) dims[g.deg]++;
    for (const auto& [b, n] : dims) os << " " << b.str() << ":" << n;
    os << "\n";
    return os.str();
}

std::string hilbert_line(const std::vector<int>& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

std::string render_cohomology_text(const CohomologyTable& t) {
    std::ostringstream os;
    os << "Lie algebra cohomology of " << t.spec.name << " up to weight " << t.cutoff << "\n";
    for (const auto& [k, v] : t.hilbert) {
        bool nz = std::any_of(v.begin(), v.end(), [](int x) { return x != 0; });
        os << "H^" << k << " dims " << hilbert_line(v) << (nz ? "" : "  (zero)") << "\n";
    }
    return os.str();
}

std::string render_multiplet_text(const MuResult& r) {
    std::ostringstream os;
    os << "component fields (cutoff " << r.assembled.cutoff << "):\n";
    os << array_block(r.assembled.fields);
    auto orders = r.assembled.dprime_orders();
    os << "differential orders present:";
    for (const auto& [k, n] : orders) os << " " << k << "(x" << n << ")";
    os << "\nminimal model:\n" << array_block(r.minimal.fields);
    auto morders = r.minimal.dprime_orders();
    os << "minimal differential orders:";
    for (const auto& [k, n] : morders) os << " " << k << "(x" << n << ")";
    os << "\nrho2 nonzero: " << (r.minimal.rho2_nonzero() ? "yes" : "no") << "\n";
    for (const auto& b : r.assembled.banners) os << "# " << b << "\n";
    return os.str();
}

std::string render_fiber_min_text(const ComponentMultiplet& m) {
    std::ostringstream os;
    os << "minimal model of the fiber (cutoff " << m.cutoff << "):\n" << array_block(m.fields);
    os << "rho2 nonzero: " << (m.rho2_nonzero() ? "yes" : "no") << "\n";
    return os.str();
}

std::string render_invariants_text(const InvariantsResult& r) {
    std::ostringstream os;
    os << "derived invariants of " << r.name << " up to weight " << r.cutoff << "\n";
    for (const auto& [k, v] : r.hilbert) os << "H^" << k << " dims " << hilbert_line(v) << "\n";
    os << "concentrated in a single degree: " << (r.concentrated ? "yes" : "no") << "\n";
    if (!r.concentrated) {
        os << "degrees present:";
        for (int k : r.degrees) os << " " << k;
        os << "\n";
    }
    return os.str();
}

std::string render_roundtrip_text(const RoundtripReport& r) {
    std::ostringstream os;
    for (const auto& c : r.checks)
        os << (c.ok ? "PASS " : "FAIL ") << c.what << (c.detail.empty() ? "" : " [" + c.detail + "]")
           << "\n";
    os << (r.pass ? "roundtrip: PASS" : "roundtrip: FAIL") << "\n";
    return os.str();
}

namespace {

ordered_json fields_json(const std::vector<ModGen>& fields) {
    ordered_json arr = ordered_json::array();
    for (const auto& g : fields) {
        ordered_json e;
        e["name"] = g.name;
        e["w"] = g.deg.w;
        e["d"] = g.deg.d;
        if (g.level) e["level"] = *g.level;
        if (!g.note.empty()) e["note"] = g.note;
        arr.push_back(std::move(e));
    }
    return arr;
}

ordered_json entries_json(const std::vector<PolyEntry>& v) {
    ordered_json arr = ordered_json::array();
    for (const auto& t : v) {
        ordered_json exps = ordered_json::array();
        for (auto x : t.exps) exps.push_back(int(x));
        arr.push_back({t.src, t.tgt, exps, rat_str(t.c)});
    }
    return arr;
}

ordered_json multiplet_json_obj(const ComponentMultiplet& m) {
    ordered_json j;
    j["name"] = m.name;
    j["cutoff"] = m.cutoff;
    j["array"] = array_line(m.fields);
    j["fields"] = fields_json(m.fields);
    j["differential"] = entries_json(m.dprime);
    ordered_json r1 = ordered_json::array();
    for (const auto& row : m.rho1) r1.push_back(entries_json(row));
    j["rho1"] = r1;
    ordered_json r2 = ordered_json::array();
    for (const auto& row : m.rho2) r2.push_back(entries_json(row));
    j["rho2"] = r2;
    j["banners"] = m.banners;
    return j;
}

} // namespace

std::string render_cohomology_json(const CohomologyTable& t) {
    ordered_json j;
    j["algebra"] = t.spec.name;
    j["cutoff"] = t.cutoff;
    for (const auto& [k, v] : t.hilbert) j["hilbert"][std::to_string(k)] = v;
    for (const auto& [kw, reps] : t.reps)
        j["representatives"][std::to_string(kw.first)][std::to_string(kw.second)] = reps;
    return j.dump(2) + "\n";
}

std::string render_multiplet_json(const MuResult& r) {
    ordered_json j;
    j["assembled"] = multiplet_json_obj(r.assembled);
    j["minimal"] = multiplet_json_obj(r.minimal);
    return j.dump(2) + "\n";
}

std::string render_invariants_json(const InvariantsResult& r) {
    ordered_json j;
    j["name"] = r.name;
    j["cutoff"] = r.cutoff;
    for (const auto& [k, v] : r.hilbert) j["hilbert"][std::to_string(k)] = v;
    j["concentrated"] = r.concentrated;
    j["degrees"] = r.degrees;
    return j.dump(2) + "\n";
}

std::string render_roundtrip_json(const RoundtripReport& r) {
    ordered_json j;
    j["pass"] = r.pass;
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
        ordered_json e;
        e["what"] = c.what;
        e["ok"] = c.ok;
        if (!c.detail.empty()) e["detail"] = c.detail;
        checks.push_back(std::move(e));
    }
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

std::string render_betti_tsv(const BettiTable& t) { return t.tsv(); }

} // namespace mf
