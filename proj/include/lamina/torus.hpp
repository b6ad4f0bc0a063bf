#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamina/subsystems.hpp"

namespace lamina {

struct NotInvariant : Error {
    using Error::Error;
};
struct NotPreserved : Error {
    using Error::Error;
};
struct NotFiniteIndex : Error {
    using Error::Error;
};

// < fiber generators, t | t g t^-1 = psi(g) >. For a subsystem torus the stable letter stands
// for x t^k and the fiber is A, written over its basis.
struct TorusPresentation {
    Alphabet fiber;
    std::string stable = "t";
    int k = 1;
    Word x;                  // in the ambient free group
    std::vector<Word> basis; // fiber generators as ambient words
    Automorphism psi;        // over the fiber alphabet
    std::string text() const;
};

TorusPresentation mapping_torus(const Automorphism& phi, const Alphabet& names);

struct FbcSystem {
    SubgroupSystem system;
    std::vector<std::vector<int>> orbits;  // class indices of each orbit, first one presented
    std::vector<TorusPresentation> tori;
};
// Throws NotInvariant unless every class is sent to a class of the system.
FbcSystem subsystem_torus(const Automorphism& phi, const SubgroupSystem& s, const Alphabet& names);

struct TwinsVerdict {
    bool found = false;
    int power = 0;
    int first = -1, second = -1;  // class indices
    Word witness;
    int bound = 0;
};
// Looks for distinct classes whose based representatives are preserved by one automorphism
// representing phi^n, n <= bound.
TwinsVerdict phi_twins(const Automorphism& phi, const SubgroupSystem& s, int bound);

struct CanonicalFiltration {
    std::vector<std::vector<int>> levels;
    std::vector<SubgroupSystem> systems;  // F_0 ... F_length
    std::vector<SubgroupSystem> supports; // F'_0 ... F'_length
    std::vector<FbcSystem> tori;          // over systems
    std::vector<FbcSystem> support_tori;  // over supports
    int length = 0;
};
CanonicalFiltration canonical_filtration(const Analysis& a);

struct HEntry {
    int orbit = 0;
    FbcSystem torus;
};
struct HCollection {
    std::vector<HEntry> entries;
    std::vector<std::pair<int, int>> nesting;  // (smaller, larger) by system containment
};
HCollection h_collection(const Analysis& a);

// Finite-sheeted cover of the rose: perm[g][i] is the sheet reached from sheet i along
// generator g. The subgroup is the loops at sheet 0.
struct Cover {
    int sheets = 0;
    std::vector<std::vector<int>> perm;
};
CoreGraph cover_graph(const Cover& c);

struct Restriction {
    std::vector<Word> basis;  // of the subgroup, in the ambient alphabet
    Automorphism psi;         // over x1..xr
};
// phi must preserve the subgroup; psi is phi read in the subgroup's spanning-tree basis.
Restriction restrict_finite_index(const Automorphism& phi, const Cover& cover);

// Index-two subgroups as kernels of mod-2 characters, preserved by phi^m; smallest m first.
struct PreservedCover {
    int power = 0;
    std::vector<int> character;  // 0/1 per generator
    Cover cover;
};
std::vector<PreservedCover> index_two_covers(const Automorphism& phi, int max_power);
Cover cyclic_cover(const std::vector<int>& steps, int sheets);
// Covers whose first sheet-changing generator lies in the lowest stratum come first, then by
// power. That generator becomes the spanning-tree edge, so conjugation by it keeps the lifted
// strata in filtration order.
std::vector<PreservedCover> order_covers(std::vector<PreservedCover> covers, const Filtration& filt);
// Orbit poset of the restricted automorphism.
LamOrbitPoset restricted_poset(const Restriction& r, const AttractionConfig& cfg);

bool is_polynomial(const LaminationSystem& ls);

nlohmann::json fbc_json(const FbcSystem& f, const Alphabet& names);
std::string format_relator_word(const Word& w, const Alphabet& names);

}  // namespace lamina
