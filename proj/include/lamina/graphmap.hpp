#pragma once

#include <string>
#include <vector>

#include "lamina/stallings.hpp"
#include "lamina/word.hpp"

namespace lamina {

struct NonInvariantFiltration : Error {
    using Error::Error;
};

// Self-map of the rose: one petal per generator, petal i sent to the image word of i.
// Edge paths of the rose are exactly reduced words.
class GraphMap {
public:
    GraphMap() = default;
    explicit GraphMap(Automorphism phi) : phi_(std::move(phi)) {}

    const Automorphism& automorphism() const { return phi_; }
    int num_edges() const { return phi_.rank(); }
    const Word& edge_image(int e) const { return phi_.image(e); }

private:
    Automorphism phi_;
};

GraphMap rose_representative(const Automorphism& phi);
// f_#^n(sigma).
Word map_path(const GraphMap& f, const Word& sigma, int n = 1);
// Cyclically reduced f_#^n of a circuit.
Word map_circuit(const GraphMap& f, const Word& sigma, int n = 1);

// Strata listed bottom-up: strata[0] is the lowest.
struct Filtration {
    std::vector<std::vector<int>> strata;
    int stratum_of(int edge) const;
};

Filtration single_stratum(const GraphMap& f);
// Throws NonInvariantFiltration naming the first edge whose image leaves its filtration level.
void check_invariant(const GraphMap& f, const Filtration& filt);

enum class StratumKind { Zero, NEG, EG };
std::string to_string(StratumKind k);

struct Stratum {
    std::vector<int> edges;
    std::vector<std::vector<long>> matrix;  // matrix[i][j]: crossings of edges[i] by f(edges[j])
    StratumKind kind = StratumKind::Zero;
    bool irreducible = false;
    double lambda = 0.0;
};

std::vector<Stratum> transition_data(const GraphMap& f, const Filtration& filt);
// Perron-Frobenius radius of a nonnegative matrix by power iteration on M + I.
double pf_radius(const std::vector<std::vector<long>>& m);
bool is_irreducible(const std::vector<std::vector<long>>& m);

// Maximal refinement: strata are the strongly connected pieces of the crossing digraph.
Filtration refine_filtration(const GraphMap& f, const Filtration& filt);

struct RttStratumReport {
    int stratum = 0;
    bool direction_preserving = true;
    std::vector<int> direction_failures;  // edges whose image starts or ends below
    bool lower_paths_nontrivial = true;
    bool images_legal = true;
    std::vector<int> illegal_images;
    bool splitting_checked = false;
    bool splitting_holds = true;
    int splitting_samples = 0;
};
struct RttReport {
    std::vector<RttStratumReport> strata;  // EG strata only
    bool all_pass() const;
};
RttReport check_rtt(const GraphMap& f, const Filtration& filt);
// Derivative on directions: first letter of the image.
Letter direction_image(const GraphMap& f, Letter d);
bool is_legal_turn(const GraphMap& f, Letter d1, Letter d2);

// Largest cancellation between f(x) and f(y) over reduced turns xy.
int cancellation_bound(const GraphMap& f);
// Bound valid for every reduced concatenation: max image length times max inverse image length.
int bounded_cancellation_constant(const GraphMap& f);

struct NielsenSearch {
    std::vector<Word> circuits;  // canonical cyclic words, primitive
    std::vector<int> periods;    // least p with phi^p [<c>] = [<c>]
    int bound_requested = 0;
    int bound_reached = 0;       // all circuits of length <= bound_reached were examined
    bool degenerate = false;     // stratum is not EG; every fixed circuit reported
    bool complete() const { return bound_reached >= bound_requested; }
};
// Periodic circuits of height r (inside the filtration level of r, crossing stratum r):
// phi^p fixes the conjugacy class of <c> for some p <= max_period. Exhaustive up to the
// length bound or the candidate budget, whichever comes first.
NielsenSearch nielsen_path_search(const GraphMap& f, const Filtration& filt, int r, int length_bound,
                                  int max_period = 4, long budget = 4'000'000);
int default_nielsen_bound(const GraphMap& f);

std::vector<int> invariant_subgraph_closure(const GraphMap& f, const std::vector<int>& seed);
// Conjugacy classes of fundamental groups of the noncontractible components of the
// subgraph spanned by the given petals (a single component on the rose).
SubgroupSystem subgraph_system(int rank, const std::vector<int>& edges);

}  // namespace lamina
