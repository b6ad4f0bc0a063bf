#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamina/lamination.hpp"
#include "lamina/stallings.hpp"

namespace lamina {

struct InvarianceRequired : Error {
    using Error::Error;
};
struct StageInconsistency : Error {
    using Error::Error;
};
struct UnmatchedOrbit : Error {
    using Error::Error;
};

struct NonattractingProvenance {
    std::vector<int> z_edges;            // edges of strata with no edge attracted
    std::vector<Word> nielsen_paths;     // circuits adjoined to the Z class
    std::vector<Word> separate_circuits; // circuits that form classes of their own
    int nielsen_bound = 0;               // circuits of at most this length were all examined
    bool nielsen_complete = true;        // search reached the requested bound
};

struct NonattractingSystem {
    int orbit = 0;
    SubgroupSystem system;
    NonattractingProvenance provenance;
};

struct SupportingSystem {
    int orbit = 0;
    std::vector<SubgroupSystem> stages;    // S_{-1}, S_0, ..., S_depth
    std::vector<SubgroupSystem> supports;  // F'_0, ..., F'_depth
    SubgroupSystem system;                 // last stage
};

struct AnalysisOptions {
    AttractionConfig attraction;
    int nielsen_bound = 0;  // 0: four times the longest edge image
};

// Orbit poset plus the nonattracting and supporting subgroup systems built on it.
class Analysis {
public:
    Analysis(const Automorphism& phi, const Alphabet& names, const AnalysisOptions& opt = {},
             const Filtration* filt = nullptr);

    const Automorphism& automorphism() const { return ls_->automorphism(); }
    const Alphabet& names() const { return names_; }
    const LaminationSystem& laminations() const { return *ls_; }
    const LamOrbitPoset& poset() const { return poset_; }
    const std::vector<std::vector<int>>& levels() const { return levels_; }
    int rank() const { return ls_->rank(); }
    int orbit_count() const { return static_cast<int>(poset_.orbits.size()); }
    SubgroupSystem whole() const { return SubgroupSystem::whole(rank()); }

    // Orbits contained in the given one, itself included.
    std::vector<int> down_set(int orbit) const;
    // Orbits whose approximating element is peripheral in the system.
    std::vector<int> carried_orbits(const SubgroupSystem& s) const;

    const NonattractingSystem& nonattracting(int orbit) const;
    SubgroupSystem nonattracting(int orbit, const SubgroupSystem& ambient) const;
    SubgroupSystem nonattracting_subset(const std::vector<int>& orbits, const SubgroupSystem& ambient) const;
    SubgroupSystem polynomial_system() const;
    bool is_polynomially_growing(const Word& g) const;
    // Throws InvarianceRequired unless the system is invariant.
    bool carries(const SubgroupSystem& s, int orbit) const;
    SubgroupSystem free_factor_support(const std::vector<int>& orbits) const;
    SubgroupSystem free_factor_support(const std::vector<int>& orbits, const SubgroupSystem& ambient) const;
    const SupportingSystem& supporting(int orbit) const;

    const NielsenSearch& nielsen(int stratum) const;
    int nielsen_bound() const { return nielsen_bound_; }

private:
    Attraction edge_verdict(int edge, int orbit) const;

    Alphabet names_;
    std::unique_ptr<LaminationSystem> ls_;
    LamOrbitPoset poset_;
    std::vector<std::vector<int>> levels_;
    int nielsen_bound_ = 0;
    mutable std::map<int, NielsenSearch> nielsen_;
    mutable std::map<int, NonattractingSystem> nonattracting_;
    mutable std::map<int, SupportingSystem> supporting_;
};

struct PairingReport {
    int plus_count = 0;
    int minus_count = 0;
    std::vector<std::pair<int, int>> pairs;  // (orbit of phi, orbit of phi^-1)
    bool nonattracting_equal = true;
    bool supporting_equal = true;
    bool order_isomorphic = true;
};
// Orbits of phi and phi^-1 are matched by their free factor supports.
PairingReport pairing_check(const Analysis& plus, const Analysis& minus);

nlohmann::json system_json(const SubgroupSystem& s, const Alphabet& names);
nlohmann::json provenance_json(const Analysis& a, const NonattractingSystem& n);

}  // namespace lamina
