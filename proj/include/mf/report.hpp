#pragma once

#include "mf/cohomology.hpp"
#include "mf/functors.hpp"

#include <string>

namespace mf {

// One-line sheared array in the paper's layout: rows are d (minimum shifted
// to row zero), columns are w-d, empty cells printed as '-'.
std::string array_line(const std::vector<ModGen>& fields);
// multi-line form plus the absolute-(w,d) sidecar
std::string array_block(const std::vector<ModGen>& fields);

std::string hilbert_line(const std::vector<int>& v);

std::string render_cohomology_text(const CohomologyTable& t);
std::string render_multiplet_text(const MuResult& r);
std::string render_fiber_min_text(const ComponentMultiplet& m);
std::string render_invariants_text(const InvariantsResult& r);
std::string render_roundtrip_text(const RoundtripReport& r);

std::string render_cohomology_json(const CohomologyTable& t);
std::string render_multiplet_json(const MuResult& r);
std::string render_invariants_json(const InvariantsResult& r);
std::string render_roundtrip_json(const RoundtripReport& r);

std::string render_betti_tsv(const BettiTable& t);

} // namespace mf
