#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lamina/torus.hpp"

namespace lamina {

struct ParseError : InputError {
    ParseError(int line, int column, const std::string& what)
        : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line(line),
          column(column) {}
    int line;
    int column;
};

// rank=, names=, one "phi: g -> image" line per generator, optional "filtration:" listing
// strata top first as bracketed groups. '#' starts a comment.
struct InputSpec {
    Alphabet names;
    Automorphism phi;
    std::optional<Filtration> filtration;  // bottom-up
};
InputSpec parse_input(std::string_view text);

// "sheets=n" then "g: s0 s1 ..." giving the sheet reached from each sheet along g.
Cover parse_cover(std::string_view text, const Alphabet& names);

struct AnalysisConfig {
    int n_max = 24;
    int window = 4;
    int nielsen_bound = 0;  // 0: four times the longest edge image
    int twins_bound = 8;
    int powers = 4;         // depth and spectrum are compared for phi^1 .. phi^powers
    std::size_t match_window = 1u << 19;
    std::size_t leaf_cap = 1'000'000;
    std::size_t iterate_cap = 8'000'000;

    void validate() const;  // throws InputError
    AttractionConfig attraction() const;
    AnalysisOptions options() const;
    nlohmann::json to_json() const;
    // Keys missing from the object keep their current values.
    void update(const nlohmann::json& j);
};

struct Outcome {
    nlohmann::json report;
    std::string dot;    // poset in DOT, empty unless the poset was determined
    int exit_code = 0;  // 0 success, 2 undetermined
};

Outcome run_analyze(const InputSpec& in, const AnalysisConfig& cfg);
Outcome run_poset(const InputSpec& in, const AnalysisConfig& cfg);
Outcome run_torus(const InputSpec& in, const AnalysisConfig& cfg);
// Uses the least power m <= max_power with phi^m preserving the cover.
Outcome run_restrict(const InputSpec& in, const Cover& cover, const AnalysisConfig& cfg, int max_power = 12);
Outcome run_pair(const InputSpec& in, const AnalysisConfig& cfg);

bool verify_conjugation(const Automorphism& phi, const TorusPresentation& t);

// Named invariant checks over a finished analysis.
nlohmann::json property_checks(const Analysis& a, const CanonicalFiltration& cf, const HCollection& h);

}  // namespace lamina
