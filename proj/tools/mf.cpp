// mf: exact calculator for supermultiplets and modules over supertranslation
// Chevalley-Eilenberg algebras.
#include "mf/cohomology.hpp"
#include "mf/functors.hpp"
#include "mf/parallel.hpp"
#include "mf/report.hpp"
#include "mf/resolution.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace mf;

namespace {

struct CommonOpts {
    std::string preset;
    std::string input;
    int cutoff = -1;
    std::string format = "text-array";
    int threads = 0;
    std::string out;
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--preset", o.preset, "algebra preset name");
    app->add_option("--input", o.input, "input file path, or bundled:<name>");
    app->add_option("--cutoff", o.cutoff, "weight cutoff")->check(CLI::PositiveNumber);
    app->add_option("--format", o.format, "text-array | tsv | json-report")
        ->check(CLI::IsMember({"text-array", "tsv", "json-report"}));
    app->add_option("--threads", o.threads, "worker threads for blockwise steps (0 = auto)");
    app->add_option("--out", o.out, "write the report to this path instead of stdout");
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out);
        if (!f) fail(Errc::schema_error, "cannot open '" + o.out + "' for writing");
        f << text;
    }
}

LoadedInput resolve_input(const CommonOpts& o) {
    if (o.input.empty()) fail(Errc::schema_error, "--input required");
    if (o.input.rfind("bundled:", 0) == 0) return bundled_example(o.input.substr(8));
    return load_input(o.input);
}

AlgebraSpec resolve_algebra(const CommonOpts& o) {
    if (!o.preset.empty()) return preset(o.preset);
    fail(Errc::schema_error, "--preset required");
}

int default_cutoff_for(const LoadedInput& in) {
    int w = 0, n1 = 0;
    if (const auto* m = std::get_if<PresentedRModule>(&in)) {
        for (const auto& g : m->gens) w = std::max(w, g.deg.w);
        n1 = m->algebra.n1;
    } else if (const auto* g = std::get_if<SemifreeDGModule>(&in)) {
        for (const auto& gg : g->gens) w = std::max(w, gg.deg.w);
        n1 = g->algebra.n1;
    } else if (const auto* f = std::get_if<MultipletFiber>(&in)) {
        for (const auto& gg : f->fields) w = std::max(w, gg.deg.w);
        n1 = f->algebra.n1;
    }
    return w + n1 + 4;
}

int run(int argc, char** argv) {
    CLI::App app{"exact multiplet/module calculator over supertranslation algebras"};
    app.require_subcommand(1);

    CommonOpts o;
    auto* c_coh = app.add_subcommand("cohomology", "Lie algebra cohomology of a preset algebra");
    add_common(c_coh, o);
    auto* c_res = app.add_subcommand("resolve", "minimal free resolution / Betti table of a module");
    add_common(c_res, o);
    auto* c_mult = app.add_subcommand("multiplet", "component multiplet of a module input");
    add_common(c_mult, o);
    auto* c_inv = app.add_subcommand("invariants", "derived invariants of a multiplet fiber");
    add_common(c_inv, o);
    auto* c_rec = app.add_subcommand("recognize", "underived representability of a fiber");
    add_common(c_rec, o);
    auto* c_rt = app.add_subcommand("roundtrip", "roundtrip verification for any input");
    add_common(c_rt, o);
    auto* c_cat = app.add_subcommand("catalog", "list presets and bundled examples");
    add_common(c_cat, o);

    CLI11_PARSE(app, argc, argv);
    thread_count() = o.threads;

    if (c_cat->parsed()) {
        std::ostringstream os;
        os << "presets:\n";
        for (const auto& s : presets()) os << "  " << s.name << "  (n1=" << s.n1 << ", n2=" << s.n2 << ")\n";
        os << "bundled examples:\n";
        for (const auto& n : bundled_names()) os << "  bundled:" << n << "\n";
        emit(o, os.str());
        return 0;
    }

    if (c_coh->parsed()) {
        AlgebraSpec alg = resolve_algebra(o);
        int W = o.cutoff > 0 ? o.cutoff : alg.n1 + 6;
        CohomologyTable t = lie_cohomology(build_ce(alg), W);
        emit(o, o.format == "json-report" ? render_cohomology_json(t) : render_cohomology_text(t));
        return 0;
    }

    LoadedInput in = resolve_input(o);
    int W = o.cutoff > 0 ? o.cutoff : default_cutoff_for(in);

    if (c_res->parsed()) {
        const auto* m = std::get_if<PresentedRModule>(&in);
        if (!m) fail(Errc::schema_error, "resolve needs a presented module input");
        BettiTable b = minimal_resolution(*m, W).betti();
        BettiTable orc = tor_oracle(*m, W);
        hard_assert(b.same_numbers(orc), "resolution and Koszul oracle disagree");
        if (o.format == "json-report") {
            std::ostringstream os;
            os << "{\n  \"betti\": [";
            bool first = true;
            for (const auto& [iw, n] : b.beta) {
                os << (first ? "" : ", ") << "[" << iw.first << "," << iw.second << "," << n << "]";
                first = false;
            }
            os << "],\n  \"cutoff\": " << W << "\n}\n";
            emit(o, os.str());
        } else {
            emit(o, render_betti_tsv(b));
        }
        return 0;
    }

    if (c_mult->parsed()) {
        if (const auto* m = std::get_if<PresentedRModule>(&in)) {
            MuResult r = mu_A_underived(*m, W);
            emit(o, o.format == "json-report" ? render_multiplet_json(r) : render_multiplet_text(r));
        } else if (const auto* g = std::get_if<SemifreeDGModule>(&in)) {
            MuResult r = mu_A_derived(*g, W);
            emit(o, o.format == "json-report" ? render_multiplet_json(r) : render_multiplet_text(r));
        } else if (const auto* f = std::get_if<MultipletFiber>(&in)) {
            ComponentMultiplet m2 = minimalize_fiber(*f);
            std::ostringstream os;
            os << render_fiber_min_text(m2);
            emit(o, os.str());
        }
        return 0;
    }

    if (c_inv->parsed()) {
        const auto* f = std::get_if<MultipletFiber>(&in);
        if (!f) fail(Errc::schema_error, "invariants needs a multiplet fiber input");
        InvariantsResult r = derived_invariants(*f, W);
        emit(o, o.format == "json-report" ? render_invariants_json(r) : render_invariants_text(r));
        return 0;
    }

    if (c_rec->parsed()) {
        const auto* f = std::get_if<MultipletFiber>(&in);
        if (!f) fail(Errc::schema_error, "recognize needs a multiplet fiber input");
        RecognizeResult r = recognize_underived(*f, W);
        std::ostringstream os;
        if (r.underived) {
            os << "underived-representable: single degree " << r.degrees.front() << "\n";
        } else {
            os << "NOT underived-representable: degrees {";
            for (size_t i = 0; i < r.degrees.size(); ++i) os << (i ? "," : "") << r.degrees[i];
            os << "}\n";
        }
        emit(o, os.str());
        return 0;
    }

    if (c_rt->parsed()) {
        RoundtripReport r = roundtrip(in, W);
        emit(o, o.format == "json-report" ? render_roundtrip_json(r) : render_roundtrip_text(r));
        return r.pass ? 0 : 3;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code == Errc::mismatch ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
