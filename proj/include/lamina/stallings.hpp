#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lamina/word.hpp"

namespace lamina {

struct EmptySubgroup : Error {
    using Error::Error;
};

struct Arc {
    int from = 0;
    int to = 0;
    int gen = 0;
    auto operator<=>(const Arc&) const = default;
};

// Folded labelled graph. `base` is -1 for the basepoint-free (conjugacy class) form.
class CoreGraph {
public:
    CoreGraph() = default;
    CoreGraph(int alphabet_rank, int nv, std::vector<Arc> arcs, int base);

    int alphabet_rank() const { return rank_; }
    int num_vertices() const { return nv_; }
    int num_edges() const { return static_cast<int>(arcs_.size()); }
    const std::vector<Arc>& arcs() const { return arcs_; }
    int base() const { return base_; }
    int rank() const { return nv_ == 0 ? 0 : num_edges() - nv_ + 1; }

    // Target of reading letter l at v, or -1.
    int step(int v, Letter l) const;
    int arc_at(int v, Letter l) const;
    int degree(int v) const;
    // Endpoint of reading w from v, or -1 when it falls off.
    int read(int v, const Word& w) const;
    // Length of the longest prefix of w readable from v and where it ends.
    std::pair<std::size_t, int> read_prefix(int v, const Word& w) const;

    // Shortest, then letter-order least, paths from `root` (tree of a letter-ordered BFS).
    std::vector<Word> tree_paths(int root) const;
    // Arcs not in the BFS tree, in arc order, with the tree paths.
    std::vector<Word> basis(int root) const;
    // Expresses a loop at root through the tree basis; nullopt when w is not such a loop.
    std::optional<Word> witness(int root, const Word& w) const;

    bool operator==(const CoreGraph&) const = default;

private:
    int rank_ = 0;
    int nv_ = 0;
    std::vector<Arc> arcs_;
    int base_ = -1;
    std::vector<int> adj_;
};

// Based Stallings graph (basepoint hair kept).
CoreGraph core_from_generators(int alphabet_rank, const std::vector<Word>& gens);
// Based graph of the coset-reading automaton: loops of H plus a tail reading `tail`.
// Returns the graph and the vertex where the tail ends.
std::pair<CoreGraph, int> core_with_tail(const CoreGraph& based, const Word& tail);
// Word over the generator indices (letter j+1 for gens[j]) equal to w, if w lies in <gens>.
std::optional<Word> express_in_generators(const std::vector<Word>& gens, const Word& w);

struct Membership {
    bool member = false;
    Word witness;  // over the tree basis of the graph, letter j+1 = j-th basis element
};
Membership membership(const CoreGraph& based, const Word& w);

struct Canonical {
    std::vector<int> code;
    std::vector<int> relabel;  // old vertex -> new vertex
};
Canonical canonical_numbering(const CoreGraph& g);
CoreGraph relabelled(const CoreGraph& g, const std::vector<int>& relabel, int new_base);
// Drops the basepoint and its hair and returns the canonical basepoint-free graph.
CoreGraph conjugacy_core(const CoreGraph& based);

class SubgroupClass {
public:
    SubgroupClass() = default;
    static SubgroupClass from_generators(int alphabet_rank, const std::vector<Word>& gens);
    // Accepts a based or basepoint-free folded graph, possibly with hairs.
    static SubgroupClass from_graph(const CoreGraph& g);

    const CoreGraph& graph() const { return graph_; }
    int rank() const { return graph_.rank(); }
    int alphabet_rank() const { return graph_.alphabet_rank(); }
    // Basis of the representative based at the canonical root (vertex 0).
    std::vector<Word> generators() const { return graph_.basis(0); }
    CoreGraph based() const;

    bool operator==(const SubgroupClass& o) const { return code_ == o.code_; }
    bool operator<(const SubgroupClass& o) const { return code_ < o.code_; }
    const std::vector<int>& code() const { return code_; }

private:
    CoreGraph graph_;
    std::vector<int> code_;
};

// Vertex images of vertex 0 of B under label-preserving maps core(B) -> core(A).
std::vector<int> morphisms(const SubgroupClass& b, const SubgroupClass& a);
// B is contained in a conjugate of A.
bool conj_contained(const SubgroupClass& b, const SubgroupClass& a);

struct ProductComponent {
    CoreGraph graph;                            // trimmed, basepoint-free; empty when a tree
    std::vector<std::pair<int, int>> proj;      // vertex -> (vertex in first, vertex in second)
    bool contains_diagonal = false;
};
std::vector<ProductComponent> fiber_components(const CoreGraph& a, const CoreGraph& b);

std::vector<SubgroupClass> meet_pair(const SubgroupClass& a, const SubgroupClass& b);

class SubgroupSystem {
public:
    SubgroupSystem() = default;
    SubgroupSystem(int alphabet_rank, std::vector<SubgroupClass> classes);
    static SubgroupSystem whole(int alphabet_rank);
    static SubgroupSystem from_generators(int alphabet_rank, const std::vector<std::vector<Word>>& gens);

    int alphabet_rank() const { return rank_; }
    const std::vector<SubgroupClass>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    bool empty() const { return classes_.empty(); }
    // -1 when absent.
    int find(const SubgroupClass& c) const;
    int complexity() const;

    bool operator==(const SubgroupSystem&) const = default;

private:
    int rank_ = 0;
    std::vector<SubgroupClass> classes_;
};

SubgroupSystem system_meet(const SubgroupSystem& a, const SubgroupSystem& b);
bool is_below(const SubgroupSystem& b, const SubgroupSystem& a);
bool is_malnormal(const SubgroupClass& a);
bool is_malnormal_system(const SubgroupSystem& s);
// Some conjugate of w lies in a member of s.
bool is_peripheral(const SubgroupSystem& s, const Word& w);

SubgroupClass apply_to_class(const Automorphism& phi, const SubgroupClass& a);
SubgroupSystem apply_to_system(const Automorphism& phi, const SubgroupSystem& s);

// x with x * Phi^k(A) * x^-1 = A where A is the representative based at vertex 0;
// shortest, then least, in its coset A x. nullopt when Phi^k[A] != [A].
std::optional<Word> invariance_conjugator(const Automorphism& phi_k, const SubgroupClass& a);
// Shortlex-least element of the coset A x.
Word coset_representative(const SubgroupClass& a, const Word& x);

struct OrbitData {
    std::vector<int> members;  // indices into the system, orbit order
    int k = 1;
    Word x;                    // conjugator for members[0]
};
struct Invariance {
    bool invariant = false;
    std::vector<OrbitData> orbits;
};
Invariance is_invariant(const Automorphism& phi, const SubgroupSystem& s);

// Restriction of (b meet {[a]}) to a, written over a's basis alphabet.
SubgroupSystem restriction(const SubgroupSystem& b, const SubgroupClass& a);

struct CosetMeet {
    bool nonempty = false;
    Word witness;
};
// Decides A u ∩ B v != ∅ for based graphs of A and B; the witness lies in both cosets.
CosetMeet coset_intersection(const CoreGraph& a, const Word& u, const CoreGraph& b, const Word& v);

}  // namespace lamina
