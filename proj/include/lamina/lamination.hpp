#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "lamina/graphmap.hpp"

namespace lamina {

struct HorizonExceeded : Error {
    using Error::Error;
};
struct UndeterminedNesting : Error {
    using Error::Error;
};

struct AttractionConfig {
    int n_max = 24;
    int window = 4;
    std::size_t leaf_cap = 1'000'000;      // longest memoized leaf iterate
    std::size_t match_window = 1u << 19;   // leaf text indexed for subword matching
    std::size_t iterate_cap = 8'000'000;   // abandon iteration once a word or block exceeds this
};

// Longest factor of a query word that is also a factor of a fixed text (suffix automaton).
class SubwordMatcher {
public:
    SubwordMatcher() = default;
    explicit SubwordMatcher(const Word& text);
    std::size_t longest_common(const Word& query, bool cyclic = false) const;
    std::size_t text_length() const { return text_length_; }

private:
    struct State {
        int len = 0, link = -1, first = -1;
    };
    struct Edge {
        Letter letter;
        int to, next;
    };
    int find(int s, Letter c) const;
    void set(int s, Letter c, int to);
    void extend(Letter c);
    std::vector<State> states_;
    std::vector<Edge> edges_;
    int last_ = 0;
    std::size_t text_length_ = 0;
};

// Reduced iterates f_#^n(e) of the first edge of an EG stratum.
struct LeafLanguage {
    int stratum = 0;
    int edge = 0;
    std::vector<Word> iterates;
    std::size_t window_index = 0;  // iterate indexed by the matcher
    std::size_t window_length = 0;
    std::shared_ptr<SubwordMatcher> matcher;
    // Matched text is the cyclically reduced window iterate followed by its inverse.
    std::size_t saturation() const { return window_length; }
};

LeafLanguage build_leaf_language(const GraphMap& f, const Filtration& filt, int stratum, const AttractionConfig& cfg);

struct ApproxElement {
    int orbit = 0;
    Word g;         // cyclically reduced
    int exponent = 0;
    Word sigma;
};
ApproxElement build_approx_element(const LeafLanguage& leaf);

struct LamOrbit {
    int id = 0;
    int stratum = 0;
    int edge = 0;
    double lambda = 0;
    std::string name;
    ApproxElement approx;
};

enum class Attraction { Attracted, NotAttracted, Undetermined };
std::string to_string(Attraction a);

struct AttractionVerdict {
    Attraction status = Attraction::Undetermined;
    std::string certificate;          // support, growth, stabilization, or empty
    std::vector<std::size_t> trace;   // m(n): longest common subpath with the leaf language
    int horizon = 0;                  // last iterate examined
    bool fallback = false;            // explicit words were iterated
};

// Everything the lamination-level analysis of one automorphism needs: refined filtration,
// strata data, one orbit per EG stratum with its leaf language and approximating element.
class LaminationSystem {
public:
    LaminationSystem(const Automorphism& phi, const AttractionConfig& cfg, const Filtration* filt = nullptr);

    const GraphMap& map() const { return f_; }
    const Automorphism& automorphism() const { return f_.automorphism(); }
    int rank() const { return f_.num_edges(); }
    const Filtration& filtration() const { return filt_; }
    const std::vector<Stratum>& strata() const { return strata_; }
    const std::vector<LamOrbit>& orbits() const { return orbits_; }
    const LeafLanguage& leaves(int orbit) const { return leaves_[static_cast<std::size_t>(orbit)]; }
    const AttractionConfig& config() const { return cfg_; }
    int cancellation() const { return c1_; }
    // Cancellation bound valid for any reduced concatenation, used when following a piece of an iterate.
    int piece_cancellation() const { return bcc_; }
    int orbit_of_stratum(int r) const;
    // Orbit names are built from edge names: the orbit of stratum {a,b} is "Λ_ab".
    void name_orbits(const Alphabet& names);

    // Weak attraction of the conjugacy class (cyclic) or the iterated path of w to an orbit.
    AttractionVerdict attraction(const Word& w, int orbit, bool cyclic = true) const;

private:
    GraphMap f_;
    Filtration filt_;
    std::vector<Stratum> strata_;
    AttractionConfig cfg_;
    int c1_ = 0;
    int bcc_ = 0;
    std::vector<LamOrbit> orbits_;
    std::vector<LeafLanguage> leaves_;
    mutable std::map<std::tuple<Word, int, bool>, AttractionVerdict> cache_;
};

struct LamOrbitPoset {
    std::vector<LamOrbit> orbits;
    std::vector<std::pair<int, int>> nesting;  // (smaller, larger)
    int depth = 0;
    std::set<int> spectrum;
    bool contains(int larger, int smaller) const;  // [smaller] strictly inside [larger]
    bool below_or_equal(int smaller, int larger) const { return smaller == larger || contains(larger, smaller); }
};

LamOrbitPoset build_poset(const LaminationSystem& ls);
// levels[0] = maximal orbits, levels[i] = maximal among what remains.
std::vector<std::vector<int>> strata_levels(const LamOrbitPoset& p);
// Maximal chain sizes; depth is the maximum.
std::set<int> chain_spectrum(int n, const std::vector<std::pair<int, int>>& nesting);

std::string poset_dot(const LamOrbitPoset& p);
nlohmann::json poset_json(const LamOrbitPoset& p);

}  // namespace lamina
