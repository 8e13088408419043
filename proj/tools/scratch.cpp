// dev scratch harness (not installed)
#include "mf/cohomology.hpp"
#include "mf/functors.hpp"
#include "mf/report.hpp"
#include "mf/resolution.hpp"

#include <iostream>

using namespace mf;

static void show_entries(const char* tag, const std::vector<ModGen>& fields,
                         const std::vector<PolyEntry>& v) {
    std::cout << tag << ":\n";
    for (const auto& t : v) {
        std::cout << "  " << fields[size_t(t.src)].name << " -> " << fields[size_t(t.tgt)].name
                  << "  exps=[";
        for (auto x : t.exps) std::cout << int(x) << " ";
        std::cout << "] c=" << rat_str(t.c) << "\n";
    }
}

int main(int argc, char** argv) {
    std::string which = argc > 1 ? argv[1] : "qm1";
    try {
        if (which == "qm1") {
            AlgebraSpec q1 = preset("qm1");
            PresentedRModule m;
            m.algebra = q1;
            m.name = "qm1-hyp";
            ModGen g;
            g.name = "e";
            g.deg = {0, 0};
            m.gens.push_back(g);
            PolyEntry r;
            r.tgt = 0;
            r.exps = {2};
            r.c = Rat(1);
            m.relations.push_back({r});
            m.rmod_i = true;
            m.validate(8);
            std::cout << "betti (oracle):\n" << tor_oracle(m, 8).tsv();
            std::cout << "betti (resolution):\n" << minimal_resolution(m, 8).betti().tsv();
            MuOptions opt;
            opt.check_higher_homotopy = false;
            MuResult mu = mu_A_underived(m, 6, opt);
            std::cout << "assembled: " << array_line(mu.assembled.fields) << "\n";
            for (const auto& f : mu.minimal.fields)
                std::cout << "field " << f.name << " at " << f.deg.str() << "\n";
            show_entries("D'", mu.minimal.fields, mu.minimal.dprime);
            for (size_t a = 0; a < mu.minimal.rho1.size(); ++a)
                show_entries(("rho1[" + std::to_string(a) + "]").c_str(), mu.minimal.fields,
                             mu.minimal.rho1[a]);
            for (size_t p = 0; p < mu.minimal.rho2.size(); ++p)
                show_entries(("rho2[" + std::to_string(p) + "]").c_str(), mu.minimal.fields,
                             mu.minimal.rho2[p]);
            std::cout << "validating as fiber...\n";
            mu.minimal.as_fiber();
            std::cout << "fiber OK\n";
        } else if (which == "3d") {
            CEAlgebra ce3 = build_ce(preset("3dN1"));
            PresentedRModule h0 = lie_cohomology_module(ce3, 0, 8);
            std::cout << "H0 gens: " << h0.gens.size() << " rels: " << h0.relations.size() << "\n";
            MuOptions opt;
            opt.check_higher_homotopy = false;
            MuResult mu = mu_A_underived(h0, 8, opt);
            std::cout << "assembled: " << array_line(mu.assembled.fields) << "\n";
            for (const auto& f : mu.minimal.fields)
                std::cout << "field " << f.name << " at " << f.deg.str() << " note=" << f.note << "\n";
            show_entries("D'", mu.minimal.fields, mu.minimal.dprime);
            for (size_t a = 0; a < mu.minimal.rho1.size(); ++a)
                show_entries(("rho1[" + std::to_string(a) + "]").c_str(), mu.minimal.fields,
                             mu.minimal.rho1[a]);
            for (size_t p = 0; p < mu.minimal.rho2.size(); ++p)
                show_entries(("rho2[" + std::to_string(p) + "]").c_str(), mu.minimal.fields,
                             mu.minimal.rho2[p]);
            std::cout << "validating as fiber...\n";
            mu.minimal.as_fiber();
            std::cout << "fiber OK\n";
        }
    } catch (const Error& e) {
        std::cerr << "ERROR: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
