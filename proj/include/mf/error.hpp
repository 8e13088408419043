#pragma once

#include <stdexcept>
#include <string>

namespace mf {

enum class Errc {
    schema_error,
    not_lifted,
    dg_condition_violated,
    table_mismatch,
    non_positive_weight_generator,
    asymmetric_structure_constants,
    window_too_small,
    cutoff_too_small,
    non_nilpotent_perturbation,
    higher_homotopy_present,
    mismatch,
    internal,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::schema_error: return "SchemaError";
        case Errc::not_lifted: return "NotLifted";
        case Errc::dg_condition_violated: return "DGConditionViolated";
        case Errc::table_mismatch: return "TableMismatch";
        case Errc::non_positive_weight_generator: return "NonPositiveWeightGenerator";
        case Errc::asymmetric_structure_constants: return "AsymmetricStructureConstants";
        case Errc::window_too_small: return "WindowTooSmall";
        case Errc::cutoff_too_small: return "CutoffTooSmall";
        case Errc::non_nilpotent_perturbation: return "NonNilpotentPerturbation";
        case Errc::higher_homotopy_present: return "HigherHomotopyPresent";
        case Errc::mismatch: return "MismatchReport";
        case Errc::internal: return "InternalError";
    }
    return "UnknownError";
}

// `where` carries a machine-readable location: generator index, weight block,
// file path, etc.
struct Error : std::runtime_error {
    Errc code;
    std::string where;

    Error(Errc c, const std::string& msg, std::string loc = "")
        : std::runtime_error(std::string(errc_name(c)) + ": " + msg +
                             (loc.empty() ? "" : " [at " + loc + "]")),
          code(c), where(std::move(loc)) {}
};

[[noreturn]] inline void fail(Errc c, const std::string& msg, std::string loc = "") {
    throw Error(c, msg, std::move(loc));
}

// Structural invariants (d^2 = 0, side conditions, Euler counts). These are
// hard assertions on every run, not test-only checks.
inline void hard_assert(bool cond, const std::string& msg, std::string loc = "") {
    if (!cond) fail(Errc::internal, "invariant violated: " + msg, std::move(loc));
}

} // namespace mf
