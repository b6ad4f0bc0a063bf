#include "lamina/stallings.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace lamina {

CoreGraph::CoreGraph(int alphabet_rank, int nv, std::vector<Arc> arcs, int base)
    : rank_(alphabet_rank), nv_(nv), arcs_(std::move(arcs)), base_(base) {
    adj_.assign(static_cast<std::size_t>(nv_) * 2 * rank_, -1);
    for (int i = 0; i < num_edges(); ++i) {
        const Arc& a = arcs_[i];
        int& fwd = adj_[static_cast<std::size_t>(a.from) * 2 * rank_ + 2 * a.gen];
        int& bwd = adj_[static_cast<std::size_t>(a.to) * 2 * rank_ + 2 * a.gen + 1];
        if (fwd != -1 || bwd != -1) throw Error("graph is not folded");
        fwd = i;
        bwd = i;
    }
}

int CoreGraph::arc_at(int v, Letter l) const {
    if (gen_of(l) >= rank_) return -1;
    return adj_[static_cast<std::size_t>(v) * 2 * rank_ + letter_key(l)];
}

int CoreGraph::step(int v, Letter l) const {
    int a = arc_at(v, l);
    if (a < 0) return -1;
    return l > 0 ? arcs_[a].to : arcs_[a].from;
}

int CoreGraph::degree(int v) const {
    int d = 0;
    for (int k = 0; k < 2 * rank_; ++k)
        if (adj_[static_cast<std::size_t>(v) * 2 * rank_ + k] >= 0) ++d;
    return d;
}

int CoreGraph::read(int v, const Word& w) const {
    for (Letter l : w) {
        if (v < 0) return -1;
        v = step(v, l);
    }
    return v;
}

std::pair<std::size_t, int> CoreGraph::read_prefix(int v, const Word& w) const {
    std::size_t i = 0;
    for (; i < w.size(); ++i) {
        int nx = step(v, w[i]);
        if (nx < 0) break;
        v = nx;
    }
    return {i, v};
}

namespace {

struct BfsTree {
    std::vector<Word> path;
    std::vector<int> parent_arc;  // arc used to discover the vertex, -1 for the root
};

BfsTree bfs_tree(const CoreGraph& g, int root) {
    BfsTree t;
    const int n = g.num_vertices();
    t.path.assign(n, Word{});
    t.parent_arc.assign(n, -1);
    std::vector<char> seen(n, 0);
    std::deque<int> q{root};
    seen[root] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int key = 0; key < 2 * g.alphabet_rank(); ++key) {
            Letter l = key_letter(key);
            int nx = g.step(v, l);
            if (nx < 0 || seen[nx]) continue;
            seen[nx] = 1;
            t.path[nx] = t.path[v];
            t.path[nx].push_back(l);
            t.parent_arc[nx] = g.arc_at(v, l);
            q.push_back(nx);
        }
    }
    return t;
}

}  // namespace

std::vector<Word> CoreGraph::tree_paths(int root) const { return bfs_tree(*this, root).path; }

std::vector<Word> CoreGraph::basis(int root) const {
    if (nv_ == 0) return {};
    BfsTree t = bfs_tree(*this, root);
    std::vector<char> tree(arcs_.size(), 0);
    for (int a : t.parent_arc)
        if (a >= 0) tree[a] = 1;
    std::vector<Word> out;
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        if (tree[i]) continue;
        const Arc& a = arcs_[i];
        out.push_back(mul({t.path[a.from], Word{a.gen + 1}, inverse(t.path[a.to])}));
    }
    return out;
}

std::optional<Word> CoreGraph::witness(int root, const Word& w) const {
    if (nv_ == 0) return w.empty() ? std::optional<Word>(Word{}) : std::nullopt;
    BfsTree t = bfs_tree(*this, root);
    std::vector<int> index(arcs_.size(), -1);
    std::vector<char> tree(arcs_.size(), 0);
    for (int a : t.parent_arc)
        if (a >= 0) tree[a] = 1;
    int next = 0;
    for (std::size_t i = 0; i < arcs_.size(); ++i)
        if (!tree[i]) index[i] = next++;
    Word out;
    int v = root;
    for (Letter l : w) {
        int a = arc_at(v, l);
        if (a < 0) return std::nullopt;
        if (index[a] >= 0) out.push_back(l > 0 ? index[a] + 1 : -(index[a] + 1));
        v = l > 0 ? arcs_[a].to : arcs_[a].from;
    }
    if (v != root) return std::nullopt;
    return reduce(out);
}

namespace {

// Folding engine. Optionally tracks, per edge, a word over the input generators so that
// every loop at the basepoint reads off an expression in those generators.
class Folder {
public:
    Folder(int rank, bool tracking) : rank_(rank), tracking_(tracking) { base_ = add_vertex(); }

    int add_vertex() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int v) {
        while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
        return v;
    }
    int base() { return find(base_); }

    // Adds a path reading w from `from`; ends at `to` when given, else at a fresh vertex.
    int add_path(int from, const Word& w, int to, int track_gen) {
        int cur = from;
        for (std::size_t i = 0; i < w.size(); ++i) {
            int nx = (i + 1 == w.size() && to >= 0) ? to : add_vertex();
            Word tr;
            if (tracking_ && i == 0 && track_gen >= 0) tr = Word{track_gen + 1};
            Letter l = w[i];
            if (l > 0)
                edges_.push_back({cur, nx, gen_of(l), true, tr});
            else
                edges_.push_back({nx, cur, gen_of(l), true, inverse(tr)});
            cur = nx;
        }
        if (w.empty() && to >= 0 && to != from) throw Error("empty path between distinct vertices");
        return cur;
    }

    void fold() {
        for (;;) {
            bool changed = false;
            std::map<long, int> seen;
            for (int i = 0; i < static_cast<int>(edges_.size()) && !changed; ++i) {
                E& e = edges_[i];
                if (!e.alive) continue;
                long kf = (static_cast<long>(find(e.from)) * 2 * rank_ + 2 * e.gen);
                long kt = (static_cast<long>(find(e.to)) * 2 * rank_ + 2 * e.gen + 1);
                for (int side = 0; side < 2 && !changed; ++side) {
                    long key = side == 0 ? kf : kt;
                    auto [it, fresh] = seen.emplace(key, i);
                    if (!fresh && it->second != i) {
                        fold_pair(it->second, i, side == 0);
                        changed = true;
                    }
                }
            }
            if (!changed) return;
        }
    }

    // Trims valence-one vertices (and the basepoint too when drop_base); returns the
    // compacted graph and old->new vertex map (-1 for removed).
    CoreGraph extract(bool drop_base, std::vector<int>* vmap_out = nullptr, std::vector<Word>* tracks = nullptr,
                      int pinned = -1) {
        const int n = static_cast<int>(parent_.size());
        std::vector<int> deg(n, 0);
        std::vector<int> alive_edges;
        for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
            if (!edges_[i].alive) continue;
            edges_[i].from = find(edges_[i].from);
            edges_[i].to = find(edges_[i].to);
            alive_edges.push_back(i);
            deg[edges_[i].from]++;
            deg[edges_[i].to]++;
        }
        const int b = find(base_);
        const int pin = pinned >= 0 ? find(pinned) : -1;
        std::vector<char> keep(n, 0);
        for (int v = 0; v < n; ++v) keep[v] = find(v) == v;
        std::vector<char> edge_keep(edges_.size(), 0);
        for (int i : alive_edges) edge_keep[i] = 1;
        bool again = true;
        while (again) {
            again = false;
            for (int i : alive_edges) {
                if (!edge_keep[i]) continue;
                const E& e = edges_[i];
                if (e.from == e.to) continue;
                for (int v : {e.from, e.to}) {
                    if (deg[v] == 1 && (v != b || drop_base) && v != pin) {
                        edge_keep[i] = 0;
                        deg[e.from]--;
                        deg[e.to]--;
                        again = true;
                        break;
                    }
                }
            }
        }
        std::vector<int> vmap(n, -1);
        int nv = 0;
        for (int v = 0; v < n; ++v) {
            if (!keep[v]) continue;
            if (deg[v] == 0 && !(v == b && !drop_base) && v != pin) continue;
            vmap[v] = nv++;
        }
        std::vector<Arc> arcs;
        for (int i : alive_edges) {
            if (!edge_keep[i]) continue;
            arcs.push_back({vmap[edges_[i].from], vmap[edges_[i].to], edges_[i].gen});
            if (tracks) tracks->push_back(edges_[i].track);
        }
        if (vmap_out) {
            vmap_out->assign(n, -1);
            for (int v = 0; v < n; ++v) (*vmap_out)[v] = vmap[find(v)];
        }
        int nb = drop_base ? -1 : vmap[b];
        return CoreGraph(rank_, nv, std::move(arcs), nb);
    }

private:
    struct E {
        int from, to, gen;
        bool alive;
        Word track;
    };

    // Merges vertex x into y: paths at x are rewritten as paths at y, with tracks
    // corrected by delta on the way out and delta^-1 on the way in.
    void merge_into(int x, int y, const Word& delta) {
        if (tracking_) {
            for (auto& e : edges_) {
                if (!e.alive) continue;
                if (find(e.from) == x) e.track = mul(delta, e.track);
                if (find(e.to) == x) e.track = mul(e.track, inverse(delta));
            }
        }
        parent_[x] = y;
    }

    void fold_pair(int keep, int drop, bool same_source) {
        E& e1 = edges_[keep];
        E& e2 = edges_[drop];
        int x1, x2;
        Word delta;
        if (same_source) {
            x1 = find(e1.to);
            x2 = find(e2.to);
            if (tracking_) delta = mul(inverse(e1.track), e2.track);
        } else {
            x1 = find(e1.from);
            x2 = find(e2.from);
            if (tracking_) delta = mul(e1.track, inverse(e2.track));
        }
        e2.alive = false;
        if (x1 == x2) return;
        if (x2 == find(base_))
            merge_into(x1, x2, inverse(delta));
        else
            merge_into(x2, x1, delta);
    }

    int rank_;
    bool tracking_;
    int base_ = 0;
    std::vector<int> parent_;
    std::vector<E> edges_;
};

}  // namespace

CoreGraph core_from_generators(int alphabet_rank, const std::vector<Word>& gens) {
    Folder f(alphabet_rank, false);
    bool any = false;
    for (const auto& g : gens) {
        Word r = reduce(g, alphabet_rank);
        if (r.empty()) continue;
        any = true;
        f.add_path(f.base(), r, f.base(), -1);
    }
    if (!any) throw EmptySubgroup("all generators are trivial");
    f.fold();
    return f.extract(false);
}

std::pair<CoreGraph, int> core_with_tail(const CoreGraph& based, const Word& tail) {
    Folder f(based.alphabet_rank(), false);
    std::vector<int> vs(based.num_vertices());
    for (int v = 0; v < based.num_vertices(); ++v) vs[v] = v == based.base() ? f.base() : f.add_vertex();
    for (const Arc& a : based.arcs()) f.add_path(vs[a.from], Word{a.gen + 1}, vs[a.to], -1);
    int end = tail.empty() ? f.base() : f.add_path(f.base(), tail, -1, -1);
    f.fold();
    std::vector<int> vmap;
    CoreGraph g = f.extract(false, &vmap, nullptr, end);
    return {g, vmap[end]};
}

std::optional<Word> express_in_generators(const std::vector<Word>& gens, const Word& w) {
    int rank = 0;
    for (const auto& g : gens)
        for (Letter l : g) rank = std::max(rank, gen_of(l) + 1);
    for (Letter l : w) rank = std::max(rank, gen_of(l) + 1);
    if (w.empty()) return Word{};
    Folder f(rank, true);
    for (std::size_t j = 0; j < gens.size(); ++j) {
        Word r = reduce(gens[j]);
        if (!r.empty()) f.add_path(f.base(), r, f.base(), static_cast<int>(j));
    }
    f.fold();
    std::vector<Word> tracks;
    CoreGraph g = f.extract(false, nullptr, &tracks);
    Word out;
    int v = g.base();
    for (Letter l : w) {
        int a = g.arc_at(v, l);
        if (a < 0) return std::nullopt;
        out = mul(out, l > 0 ? tracks[a] : inverse(tracks[a]));
        v = g.step(v, l);
    }
    if (v != g.base()) return std::nullopt;
    return out;
}

Membership membership(const CoreGraph& based, const Word& w) {
    auto wit = based.witness(based.base(), reduce(w));
    if (!wit) return {false, {}};
    return {true, *wit};
}

namespace {

// Removes valence-one vertices repeatedly (never `keep`); vmap gets old -> new or -1.
CoreGraph trim(const CoreGraph& g, int keep, std::vector<int>* vmap_out) {
    const int n = g.num_vertices();
    std::vector<int> deg(n, 0);
    for (const Arc& a : g.arcs()) {
        deg[a.from]++;
        deg[a.to]++;
    }
    std::vector<char> arc_alive(g.arcs().size(), 1);
    std::vector<char> v_alive(n, 1);
    std::deque<int> q;
    for (int v = 0; v < n; ++v)
        if (deg[v] <= 1 && v != keep) q.push_back(v);
    std::vector<std::vector<int>> inc(n);
    for (int i = 0; i < g.num_edges(); ++i) {
        inc[g.arcs()[i].from].push_back(i);
        if (g.arcs()[i].to != g.arcs()[i].from) inc[g.arcs()[i].to].push_back(i);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        if (!v_alive[v] || deg[v] > 1 || v == keep) continue;
        v_alive[v] = 0;
        for (int i : inc[v]) {
            if (!arc_alive[i]) continue;
            arc_alive[i] = 0;
            const Arc& a = g.arcs()[i];
            int o = a.from == v ? a.to : a.from;
            deg[o]--;
            deg[v]--;
            if (deg[o] <= 1 && o != keep) q.push_back(o);
        }
    }
    std::vector<int> vmap(n, -1);
    int nv = 0;
    for (int v = 0; v < n; ++v)
        if (v_alive[v]) vmap[v] = nv++;
    std::vector<Arc> arcs;
    for (int i = 0; i < g.num_edges(); ++i)
        if (arc_alive[i]) arcs.push_back({vmap[g.arcs()[i].from], vmap[g.arcs()[i].to], g.arcs()[i].gen});
    if (vmap_out) *vmap_out = vmap;
    int nb = (keep >= 0 && g.base() == keep) ? vmap[keep] : -1;
    return CoreGraph(g.alphabet_rank(), nv, std::move(arcs), nb);
}

std::vector<int> bfs_order(const CoreGraph& g, int root) {
    std::vector<int> label(g.num_vertices(), -1);
    std::deque<int> q{root};
    label[root] = 0;
    int next = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int key = 0; key < 2 * g.alphabet_rank(); ++key) {
            int nx = g.step(v, key_letter(key));
            if (nx < 0 || label[nx] >= 0) continue;
            label[nx] = next++;
            q.push_back(nx);
        }
    }
    return label;
}

std::vector<int> code_for(const CoreGraph& g, const std::vector<int>& label) {
    std::vector<std::array<int, 3>> triples;
    for (const Arc& a : g.arcs()) triples.push_back({label[a.from], a.gen, label[a.to]});
    std::sort(triples.begin(), triples.end());
    std::vector<int> code{g.num_vertices(), g.num_edges()};
    for (auto& t : triples) code.insert(code.end(), t.begin(), t.end());
    return code;
}

}  // namespace

Canonical canonical_numbering(const CoreGraph& g) {
    Canonical best;
    if (g.num_vertices() == 0) return {{0, 0}, {}};
    std::vector<int> roots;
    if (g.base() >= 0)
        roots.push_back(g.base());
    else
        for (int v = 0; v < g.num_vertices(); ++v) roots.push_back(v);
    bool have = false;
    for (int r : roots) {
        auto label = bfs_order(g, r);
        if (std::find(label.begin(), label.end(), -1) != label.end()) throw Error("graph is not connected");
        auto code = code_for(g, label);
        if (!have || code < best.code) {
            best.code = std::move(code);
            best.relabel = std::move(label);
            have = true;
        }
    }
    return best;
}

CoreGraph relabelled(const CoreGraph& g, const std::vector<int>& relabel, int new_base) {
    std::vector<Arc> arcs;
    for (const Arc& a : g.arcs()) arcs.push_back({relabel[a.from], relabel[a.to], a.gen});
    std::sort(arcs.begin(), arcs.end());
    return CoreGraph(g.alphabet_rank(), g.num_vertices(), std::move(arcs), new_base);
}

CoreGraph conjugacy_core(const CoreGraph& based) {
    CoreGraph free = based.base() >= 0 ? trim(CoreGraph(based.alphabet_rank(), based.num_vertices(),
                                                        based.arcs(), -1),
                                              -1, nullptr)
                                        : trim(based, -1, nullptr);
    if (free.num_vertices() == 0) return free;
    auto c = canonical_numbering(free);
    return relabelled(free, c.relabel, -1);
}

SubgroupClass SubgroupClass::from_graph(const CoreGraph& g) {
    SubgroupClass out;
    out.graph_ = conjugacy_core(g);
    if (out.graph_.num_vertices() == 0) throw EmptySubgroup("trivial subgroup has no class");
    out.code_ = canonical_numbering(out.graph_).code;
    return out;
}

SubgroupClass SubgroupClass::from_generators(int alphabet_rank, const std::vector<Word>& gens) {
    return from_graph(core_from_generators(alphabet_rank, gens));
}

CoreGraph SubgroupClass::based() const {
    return CoreGraph(graph_.alphabet_rank(), graph_.num_vertices(), graph_.arcs(), 0);
}

std::vector<int> morphisms(const SubgroupClass& b, const SubgroupClass& a) {
    std::vector<int> out;
    const CoreGraph& gb = b.graph();
    const CoreGraph& ga = a.graph();
    if (gb.alphabet_rank() != ga.alphabet_rank()) throw Error("alphabet mismatch");
    for (int t = 0; t < ga.num_vertices(); ++t) {
        std::vector<int> m(gb.num_vertices(), -1);
        m[0] = t;
        std::deque<int> q{0};
        bool ok = true;
        while (!q.empty() && ok) {
            int v = q.front();
            q.pop_front();
            for (int key = 0; key < 2 * gb.alphabet_rank() && ok; ++key) {
                Letter l = key_letter(key);
                int nb = gb.step(v, l);
                if (nb < 0) continue;
                int ta = ga.step(m[v], l);
                if (ta < 0) {
                    ok = false;
                } else if (m[nb] < 0) {
                    m[nb] = ta;
                    q.push_back(nb);
                } else if (m[nb] != ta) {
                    ok = false;
                }
            }
        }
        if (ok) out.push_back(t);
    }
    return out;
}

bool conj_contained(const SubgroupClass& b, const SubgroupClass& a) {
    return !morphisms(b, a).empty();
}

std::vector<ProductComponent> fiber_components(const CoreGraph& a, const CoreGraph& b) {
    const int na = a.num_vertices(), nb = b.num_vertices();
    const int n = na * nb;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<Arc> arcs;
    for (const Arc& x : a.arcs())
        for (const Arc& y : b.arcs()) {
            if (x.gen != y.gen) continue;
            int u = x.from * nb + y.from, v = x.to * nb + y.to;
            arcs.push_back({u, v, x.gen});
            parent[find(u)] = find(v);
        }
    std::map<int, std::vector<int>> comps;
    for (int v = 0; v < n; ++v) comps[find(v)].push_back(v);
    std::vector<ProductComponent> out;
    std::vector<int> local(n, -1);
    for (auto& [root, verts] : comps) {
        for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
        std::vector<Arc> carcs;
        for (const Arc& e : arcs)
            if (find(e.from) == root) carcs.push_back({local[e.from], local[e.to], e.gen});
        if (carcs.empty()) continue;
        CoreGraph g(a.alphabet_rank(), static_cast<int>(verts.size()), std::move(carcs), -1);
        std::vector<int> vmap;
        CoreGraph t = trim(g, -1, &vmap);
        ProductComponent pc;
        pc.proj.assign(t.num_vertices(), {-1, -1});
        for (std::size_t i = 0; i < verts.size(); ++i) {
            if (vmap[i] < 0) continue;
            int p = verts[i] / nb, q = verts[i] % nb;
            pc.proj[vmap[i]] = {p, q};
            if (p == q) pc.contains_diagonal = true;
        }
        pc.graph = std::move(t);
        out.push_back(std::move(pc));
    }
    return out;
}

std::vector<SubgroupClass> meet_pair(const SubgroupClass& a, const SubgroupClass& b) {
    std::vector<SubgroupClass> out;
    for (auto& pc : fiber_components(a.graph(), b.graph())) {
        if (pc.graph.num_vertices() == 0 || pc.graph.rank() < 1) continue;
        out.push_back(SubgroupClass::from_graph(pc.graph));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SubgroupSystem::SubgroupSystem(int alphabet_rank, std::vector<SubgroupClass> classes) : rank_(alphabet_rank) {
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].alphabet_rank() != rank_) throw Error("alphabet mismatch in subgroup system");
        bool dominated = false;
        for (std::size_t j = 0; j < classes.size() && !dominated; ++j)
            if (i != j && conj_contained(classes[i], classes[j])) dominated = true;
        if (!dominated) classes_.push_back(classes[i]);
    }
}

SubgroupSystem SubgroupSystem::whole(int alphabet_rank) {
    std::vector<Word> gens;
    for (int i = 0; i < alphabet_rank; ++i) gens.push_back({i + 1});
    return SubgroupSystem(alphabet_rank, {SubgroupClass::from_generators(alphabet_rank, gens)});
}

SubgroupSystem SubgroupSystem::from_generators(int alphabet_rank, const std::vector<std::vector<Word>>& gens) {
    std::vector<SubgroupClass> cs;
    for (const auto& g : gens) cs.push_back(SubgroupClass::from_generators(alphabet_rank, g));
    return SubgroupSystem(alphabet_rank, std::move(cs));
}

int SubgroupSystem::find(const SubgroupClass& c) const {
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (classes_[i] == c) return static_cast<int>(i);
    return -1;
}

int SubgroupSystem::complexity() const {
    int c = -static_cast<int>(classes_.size());
    for (const auto& a : classes_) c += 2 * a.rank();
    return c;
}

SubgroupSystem system_meet(const SubgroupSystem& a, const SubgroupSystem& b) {
    std::vector<SubgroupClass> all;
    for (const auto& x : a.classes())
        for (const auto& y : b.classes())
            for (auto& c : meet_pair(x, y)) all.push_back(std::move(c));
    return SubgroupSystem(a.alphabet_rank(), std::move(all));
}

bool is_below(const SubgroupSystem& b, const SubgroupSystem& a) {
    for (const auto& x : b.classes()) {
        bool found = false;
        for (const auto& y : a.classes())
            if (conj_contained(x, y)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

bool is_malnormal(const SubgroupClass& a) {
    for (auto& pc : fiber_components(a.graph(), a.graph())) {
        if (pc.graph.num_vertices() == 0 || pc.graph.rank() < 1) continue;
        if (!pc.contains_diagonal || pc.graph.rank() != a.rank()) return false;
    }
    return true;
}

bool is_malnormal_system(const SubgroupSystem& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_malnormal(s.classes()[i])) return false;
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (!meet_pair(s.classes()[i], s.classes()[j]).empty()) return false;
    }
    return true;
}

bool is_peripheral(const SubgroupSystem& s, const Word& w) {
    Word r = reduce(w);
    if (r.empty()) return !s.empty();
    auto c = SubgroupClass::from_generators(s.alphabet_rank(), {r});
    for (const auto& a : s.classes())
        if (conj_contained(c, a)) return true;
    return false;
}

SubgroupClass apply_to_class(const Automorphism& phi, const SubgroupClass& a) {
    std::vector<Word> ims;
    for (const auto& g : a.generators()) ims.push_back(phi.apply(g));
    return SubgroupClass::from_generators(a.alphabet_rank(), ims);
}

SubgroupSystem apply_to_system(const Automorphism& phi, const SubgroupSystem& s) {
    std::vector<SubgroupClass> cs;
    for (const auto& a : s.classes()) cs.push_back(apply_to_class(phi, a));
    return SubgroupSystem(s.alphabet_rank(), std::move(cs));
}

Word coset_representative(const SubgroupClass& a, const Word& x) {
    auto [len, u] = a.graph().read_prefix(0, x);
    Word rest(x.begin() + static_cast<std::ptrdiff_t>(len), x.end());
    return mul(a.graph().tree_paths(0)[u], rest);
}

std::optional<Word> invariance_conjugator(const Automorphism& phi_k, const SubgroupClass& a) {
    std::vector<Word> ims;
    for (const auto& g : a.generators()) ims.push_back(phi_k.apply(g));
    CoreGraph img = core_from_generators(a.alphabet_rank(), ims);
    std::vector<int> vmap;
    CoreGraph core = trim(CoreGraph(img.alphabet_rank(), img.num_vertices(), img.arcs(), -1), -1, &vmap);
    auto canon = canonical_numbering(core);
    if (canon.code != a.code()) return std::nullopt;
    // The basepoint hair meets the core at the nearest surviving vertex.
    auto paths = img.tree_paths(img.base());
    int c = -1;
    for (int v = 0; v < img.num_vertices(); ++v)
        if (vmap[v] >= 0 && (c < 0 || paths[v].size() < paths[c].size())) c = v;
    const Word& hair = paths[c];
    const Word y = a.graph().tree_paths(0)[canon.relabel[vmap[c]]];
    return coset_representative(a, mul(y, inverse(hair)));
}

Invariance is_invariant(const Automorphism& phi, const SubgroupSystem& s) {
    Invariance out;
    const int n = static_cast<int>(s.size());
    std::vector<int> next(n, -1);
    out.invariant = true;
    for (int i = 0; i < n; ++i) {
        next[i] = s.find(apply_to_class(phi, s.classes()[i]));
        if (next[i] < 0) out.invariant = false;
    }
    if (!out.invariant) return out;
    std::vector<char> done(n, 0);
    for (int i = 0; i < n; ++i) {
        if (done[i]) continue;
        OrbitData od;
        for (int j = i; !done[j]; j = next[j]) {
            done[j] = 1;
            od.members.push_back(j);
        }
        od.k = static_cast<int>(od.members.size());
        auto x = invariance_conjugator(power(phi, od.k), s.classes()[i]);
        if (!x) throw Error("orbit conjugator not found");
        od.x = *x;
        out.orbits.push_back(std::move(od));
    }
    return out;
}

SubgroupSystem restriction(const SubgroupSystem& b, const SubgroupClass& a) {
    SubgroupSystem m = system_meet(b, SubgroupSystem(b.alphabet_rank(), {a}));
    const auto paths = a.graph().tree_paths(0);
    const int arank = a.rank();
    std::vector<SubgroupClass> out;
    for (const auto& c : m.classes()) {
        for (int t : morphisms(c, a)) {
            std::vector<Word> gens;
            for (const auto& g : c.generators()) {
                auto w = a.graph().witness(0, mul({paths[t], g, inverse(paths[t])}));
                if (!w) throw Error("restriction: loop does not lift");
                gens.push_back(*w);
            }
            out.push_back(SubgroupClass::from_generators(arank, gens));
        }
    }
    return SubgroupSystem(arank, std::move(out));
}

CosetMeet coset_intersection(const CoreGraph& a, const Word& u, const CoreGraph& b, const Word& v) {
    const Word w = mul(v, inverse(u));
    auto [bw, end] = core_with_tail(b, w);
    const int nb = bw.num_vertices();
    const int start = a.base() * nb + bw.base();
    const int goal = a.base() * nb + end;
    std::map<int, std::pair<int, Letter>> parent{{start, {-1, 0}}};
    std::deque<int> q{start};
    while (!q.empty()) {
        int cur = q.front();
        q.pop_front();
        if (cur == goal) break;
        for (int key = 0; key < 2 * a.alphabet_rank(); ++key) {
            Letter l = key_letter(key);
            int x = a.step(cur / nb, l), y = bw.step(cur % nb, l);
            if (x < 0 || y < 0) continue;
            int nx = x * nb + y;
            if (parent.count(nx)) continue;
            parent[nx] = {cur, l};
            q.push_back(nx);
        }
    }
    if (!parent.count(goal)) return {false, {}};
    Word z;
    for (int cur = goal; cur != start; cur = parent[cur].first) z.push_back(parent[cur].second);
    std::reverse(z.begin(), z.end());
    return {true, mul(z, u)};
}

}  // namespace lamina
