#include "lamina/graphmap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

namespace lamina {

GraphMap rose_representative(const Automorphism& phi) { return GraphMap(phi); }

Word map_path(const GraphMap& f, const Word& sigma, int n) {
    Word cur = reduce(sigma);
    for (int i = 0; i < n; ++i) cur = f.automorphism().apply(cur);
    return cur;
}

Word map_circuit(const GraphMap& f, const Word& sigma, int n) {
    Word cur = cyclic_reduce(reduce(sigma)).cyclic;
    for (int i = 0; i < n; ++i) cur = cyclic_reduce(f.automorphism().apply(cur)).cyclic;
    return cur;
}

int Filtration::stratum_of(int edge) const {
    for (std::size_t r = 0; r < strata.size(); ++r)
        if (std::find(strata[r].begin(), strata[r].end(), edge) != strata[r].end()) return static_cast<int>(r);
    return -1;
}

Filtration single_stratum(const GraphMap& f) {
    Filtration out;
    out.strata.emplace_back();
    for (int e = 0; e < f.num_edges(); ++e) out.strata[0].push_back(e);
    return out;
}

void check_invariant(const GraphMap& f, const Filtration& filt) {
    std::vector<int> seen(f.num_edges(), 0);
    for (const auto& s : filt.strata)
        for (int e : s) {
            if (e < 0 || e >= f.num_edges()) throw NonInvariantFiltration("filtration names an unknown edge");
            if (seen[e]++) throw NonInvariantFiltration("edge " + std::to_string(e) + " listed twice");
        }
    for (int e = 0; e < f.num_edges(); ++e)
        if (!seen[e]) throw NonInvariantFiltration("edge " + std::to_string(e) + " missing from filtration");
    for (int e = 0; e < f.num_edges(); ++e) {
        int r = filt.stratum_of(e);
        for (Letter l : f.edge_image(e))
            if (filt.stratum_of(gen_of(l)) > r)
                throw NonInvariantFiltration("image of edge " + std::to_string(e) + " leaves its filtration level");
    }
}

std::string to_string(StratumKind k) {
    switch (k) {
        case StratumKind::Zero: return "Zero";
        case StratumKind::NEG: return "NEG";
        case StratumKind::EG: return "EG";
    }
    return "?";
}

namespace {

// Tarjan on a dense adjacency given as lists; returns component id per vertex.
std::vector<int> scc(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<char> on(n, 0);
    int next = 0, ncomp = 0;
    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        on[v] = 1;
        for (int w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            for (;;) {
                int w = stack.back();
                stack.pop_back();
                on[w] = 0;
                comp[w] = ncomp;
                if (w == v) break;
            }
            ++ncomp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comp;
}

std::vector<long double> char_poly(const std::vector<std::vector<long>>& m) {
    // Coefficients of det(xI - M), highest first, for n <= 3.
    const std::size_t n = m.size();
    if (n == 1) return {1, static_cast<long double>(-m[0][0])};
    if (n == 2) {
        long double tr = m[0][0] + m[1][1];
        long double det = static_cast<long double>(m[0][0]) * m[1][1] - static_cast<long double>(m[0][1]) * m[1][0];
        return {1, -tr, det};
    }
    long double tr = m[0][0] + m[1][1] + m[2][2];
    long double minors = 0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            minors += static_cast<long double>(m[i][i]) * m[j][j] - static_cast<long double>(m[i][j]) * m[j][i];
    long double det = 0;
    det += static_cast<long double>(m[0][0]) * (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
    det -= static_cast<long double>(m[0][1]) * (m[1][0] * m[2][2] - m[1][2] * m[2][0]);
    det += static_cast<long double>(m[0][2]) * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return {1, -tr, minors, -det};
}

}  // namespace

bool is_irreducible(const std::vector<std::vector<long>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return false;
    if (n == 1) return m[0][0] > 0;
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m[i][j] > 0) adj[i].push_back(static_cast<int>(j));
    auto comp = scc(adj);
    return std::all_of(comp.begin(), comp.end(), [&](int c) { return c == comp[0]; });
}

double pf_radius(const std::vector<std::vector<long>>& m) {
    const std::size_t n = m.size();
    bool zero = true;
    for (auto& row : m)
        for (long x : row) zero &= x == 0;
    if (n == 0 || zero) return 0.0;
    std::vector<long double> v(n, 1.0L), w(n);
    long double mu = 0;
    for (int it = 0; it < 20000; ++it) {
        long double norm = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = v[i];
            for (std::size_t j = 0; j < n; ++j) w[i] += static_cast<long double>(m[i][j]) * v[j];
            norm = std::max(norm, w[i]);
        }
        for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
        long double prev = mu;
        mu = norm;
        v.swap(w);
        if (it >= 200 && std::fabs(mu - prev) < 1e-17L * mu) break;
    }
    long double lambda = mu - 1;
    if (n <= 3) {
        // Newton polish on the characteristic polynomial.
        auto c = char_poly(m);
        for (int it = 0; it < 50; ++it) {
            long double p = 0, dp = 0;
            for (long double coef : c) {
                dp = dp * lambda + p;
                p = p * lambda + coef;
            }
            if (dp == 0) break;
            long double step = p / dp;
            lambda -= step;
            if (std::fabs(step) < 1e-18L) break;
        }
    }
    return static_cast<double>(lambda);
}

std::vector<Stratum> transition_data(const GraphMap& f, const Filtration& filt) {
    check_invariant(f, filt);
    std::vector<Stratum> out;
    for (const auto& edges : filt.strata) {
        Stratum s;
        s.edges = edges;
        const std::size_t n = edges.size();
        s.matrix.assign(n, std::vector<long>(n, 0));
        for (std::size_t j = 0; j < n; ++j)
            for (Letter l : f.edge_image(edges[j])) {
                auto it = std::find(edges.begin(), edges.end(), gen_of(l));
                if (it != edges.end()) s.matrix[static_cast<std::size_t>(it - edges.begin())][j]++;
            }
        s.irreducible = is_irreducible(s.matrix);
        s.lambda = pf_radius(s.matrix);
        bool zero = true;
        for (auto& row : s.matrix)
            for (long x : row) zero &= x == 0;
        if (zero)
            s.kind = StratumKind::Zero;
        else if (s.irreducible && s.lambda > 1.0 + 1e-9)
            s.kind = StratumKind::EG;
        else
            s.kind = StratumKind::NEG;
        out.push_back(std::move(s));
    }
    return out;
}

Filtration refine_filtration(const GraphMap& f, const Filtration& filt) {
    check_invariant(f, filt);
    const int n = f.num_edges();
    std::vector<std::vector<int>> adj(n);
    for (int j = 0; j < n; ++j) {
        std::set<int> deps;
        for (Letter l : f.edge_image(j)) deps.insert(gen_of(l));
        adj[j].assign(deps.begin(), deps.end());
    }
    auto comp = scc(adj);
    int nc = *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<std::vector<int>> members(nc);
    for (int e = 0; e < n; ++e) members[comp[e]].push_back(e);
    // c below d when an edge of d crosses an edge of c.
    std::vector<std::set<int>> below(nc);
    for (int j = 0; j < n; ++j)
        for (int i : adj[j])
            if (comp[i] != comp[j]) below[comp[j]].insert(comp[i]);
    std::vector<char> placed(nc, 0);
    Filtration out;
    for (int round = 0; round < nc; ++round) {
        int best = -1;
        for (int c = 0; c < nc; ++c) {
            if (placed[c]) continue;
            bool ready = std::all_of(below[c].begin(), below[c].end(), [&](int d) { return placed[d] != 0; });
            if (!ready) continue;
            auto key = [&](int x) { return std::make_pair(filt.stratum_of(members[x][0]), members[x][0]); };
            if (best < 0 || key(c) < key(best)) best = c;
        }
        placed[best] = 1;
        out.strata.push_back(members[best]);
    }
    return out;
}

Letter direction_image(const GraphMap& f, Letter d) {
    const Word& im = f.edge_image(gen_of(d));
    return d > 0 ? im.front() : -im.back();
}

bool is_legal_turn(const GraphMap& f, Letter d1, Letter d2) {
    const int limit = 4 * f.num_edges() * f.num_edges() + 4;
    for (int i = 0; i <= limit; ++i) {
        if (d1 == d2) return false;
        d1 = direction_image(f, d1);
        d2 = direction_image(f, d2);
    }
    return true;
}

bool RttReport::all_pass() const {
    for (auto& s : strata)
        if (!s.direction_preserving || !s.lower_paths_nontrivial || !s.images_legal ||
            (s.splitting_checked && !s.splitting_holds))
            return false;
    return true;
}

RttReport check_rtt(const GraphMap& f, const Filtration& filt) {
    RttReport rep;
    auto strata = transition_data(f, filt);
    for (std::size_t r = 0; r < strata.size(); ++r) {
        if (strata[r].kind != StratumKind::EG) continue;
        RttStratumReport s;
        s.stratum = static_cast<int>(r);
        auto in_r = [&](Letter l) { return filt.stratum_of(gen_of(l)) == static_cast<int>(r); };
        for (int e : strata[r].edges) {
            const Word& im = f.edge_image(e);
            if (!in_r(im.front()) || !in_r(im.back())) {
                s.direction_preserving = false;
                s.direction_failures.push_back(e);
            }
            // Maximal lower subpaths between stratum letters must not collapse.
            std::size_t i = 0;
            while (i < im.size()) {
                if (in_r(im[i])) {
                    ++i;
                    continue;
                }
                std::size_t j = i;
                while (j < im.size() && !in_r(im[j])) ++j;
                if (i > 0 && j < im.size()) {
                    Word lower(im.begin() + static_cast<long>(i), im.begin() + static_cast<long>(j));
                    if (map_path(f, lower).empty()) s.lower_paths_nontrivial = false;
                }
                i = j;
            }
            bool legal = true;
            for (std::size_t k = 0; k + 1 < im.size(); ++k)
                if (in_r(im[k]) && in_r(im[k + 1]) && !is_legal_turn(f, -im[k], im[k + 1])) legal = false;
            if (!legal) {
                s.images_legal = false;
                s.illegal_images.push_back(e);
            }
        }
        if (s.direction_preserving && s.lower_paths_nontrivial && s.images_legal) {
            // Splitting law on sampled r-legal paths.
            s.splitting_checked = true;
            std::mt19937 rng(1000 + static_cast<unsigned>(r));
            std::vector<Letter> letters;
            for (std::size_t q = 0; q <= r; ++q)
                for (int e : filt.strata[q]) {
                    letters.push_back(e + 1);
                    letters.push_back(-(e + 1));
                }
            std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
            std::uniform_int_distribution<int> len(2, 12);
            int attempts = 0;
            while (s.splitting_samples < 100 && attempts < 100000) {
                ++attempts;
                Word sigma;
                int n = len(rng);
                while (static_cast<int>(sigma.size()) < n) {
                    Letter l = letters[pick(rng)];
                    if (!sigma.empty() && sigma.back() == -l) continue;
                    sigma.push_back(l);
                }
                bool has_r = false, legal = true;
                for (std::size_t k = 0; k < sigma.size(); ++k) {
                    has_r |= in_r(sigma[k]);
                    if (k + 1 < sigma.size() && in_r(sigma[k]) && in_r(sigma[k + 1]) &&
                        !is_legal_turn(f, -sigma[k], sigma[k + 1]))
                        legal = false;
                }
                if (!has_r || !legal) continue;
                Word pieces;
                std::size_t k = 0;
                while (k < sigma.size()) {
                    if (in_r(sigma[k])) {
                        Word im = map_path(f, Word{sigma[k]});
                        pieces.insert(pieces.end(), im.begin(), im.end());
                        ++k;
                    } else {
                        std::size_t j = k;
                        while (j < sigma.size() && !in_r(sigma[j])) ++j;
                        Word im = map_path(f, Word(sigma.begin() + static_cast<long>(k),
                                                   sigma.begin() + static_cast<long>(j)));
                        pieces.insert(pieces.end(), im.begin(), im.end());
                        k = j;
                    }
                }
                if (!is_reduced(pieces) || pieces != map_path(f, sigma)) s.splitting_holds = false;
                ++s.splitting_samples;
            }
        }
        rep.strata.push_back(std::move(s));
    }
    return rep;
}

int cancellation_bound(const GraphMap& f) {
    const int n = f.num_edges();
    int best = 0;
    for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y) {
            if (x == 0 || y == 0 || y == -x) continue;
            Word fx = map_path(f, Word{x}), fy = map_path(f, Word{y});
            int k = 0;
            while (k < static_cast<int>(fx.size()) && k < static_cast<int>(fy.size()) &&
                   fx[fx.size() - 1 - static_cast<std::size_t>(k)] == -fy[static_cast<std::size_t>(k)])
                ++k;
            best = std::max(best, k);
        }
    return best;
}

int bounded_cancellation_constant(const GraphMap& f) {
    const Automorphism& phi = f.automorphism();
    if (phi.max_image_length() == 1) return 0;
    auto inv = invert(phi);
    return static_cast<int>(phi.max_image_length() * inv.max_image_length());
}

int default_nielsen_bound(const GraphMap& f) { return 4 * static_cast<int>(f.automorphism().max_image_length()); }

NielsenSearch nielsen_path_search(const GraphMap& f, const Filtration& filt, int r, int length_bound, int max_period,
                                  long budget) {
    NielsenSearch out;
    out.bound_requested = length_bound;
    auto strata = transition_data(f, filt);
    out.degenerate = strata.at(static_cast<std::size_t>(r)).kind != StratumKind::EG;
    std::vector<Letter> letters;
    for (int q = 0; q <= r; ++q)
        for (int e : filt.strata[static_cast<std::size_t>(q)]) {
            letters.push_back(e + 1);
            letters.push_back(-(e + 1));
        }
    std::sort(letters.begin(), letters.end(), [](Letter a, Letter b) { return letter_key(a) < letter_key(b); });
    std::vector<char> in_r(static_cast<std::size_t>(f.num_edges()), 0);
    for (int e : filt.strata[static_cast<std::size_t>(r)]) in_r[static_cast<std::size_t>(e)] = 1;

    // Abelianized action: a fixed class of <c> must have a homology vector fixed up to sign.
    const int n = f.num_edges();
    std::vector<std::vector<long>> ab(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(n), 0));
    for (int j = 0; j < n; ++j)
        for (Letter l : f.edge_image(j)) ab[static_cast<std::size_t>(gen_of(l))][static_cast<std::size_t>(j)] += l > 0 ? 1 : -1;
    auto homology_allows = [&](const Word& c) {
        std::vector<long> v(static_cast<std::size_t>(n), 0), cur;
        for (Letter l : c) v[static_cast<std::size_t>(gen_of(l))] += l > 0 ? 1 : -1;
        cur = v;
        for (int p = 1; p <= max_period; ++p) {
            std::vector<long> next(static_cast<std::size_t>(n), 0);
            for (std::size_t i = 0; i < next.size(); ++i)
                for (std::size_t j = 0; j < next.size(); ++j) next[i] += ab[i][j] * cur[j];
            cur.swap(next);
            bool plus = true, minus = true;
            for (std::size_t i = 0; i < v.size(); ++i) {
                plus &= cur[i] == v[i];
                minus &= cur[i] == -v[i];
            }
            if (plus || minus) return true;
        }
        return false;
    };

    // Longest inverse image: the most one application of the inverse can stretch a word.
    const double shrink = static_cast<double>(invert(f.automorphism()).max_image_length());
    long work = 0;
    bool exhausted = false;
    Word w;
    // Only prefixes of least rotations are extended: track the period of the prefix and reject a
    // letter smaller than the one a period back.
    std::function<void(std::size_t, std::size_t, std::size_t)> dfs = [&](std::size_t len, std::size_t first,
                                                                           std::size_t period) {
        if (exhausted) return;
        if (++work > budget) {
            exhausted = true;
            return;
        }
        if (w.size() == len) {
            if (w.back() == -w.front()) return;
            bool crosses = false;
            for (Letter l : w) crosses |= in_r[static_cast<std::size_t>(gen_of(l))] != 0;
            // A prefix-necklace whose period is its full length is a primitive least rotation.
            if (!crosses || period != len || !homology_allows(w)) return;
            Word inv = canonical_cyclic(inverse(w));
            if (lex_less(inv, w)) return;  // one representative per class of <c>
            Word cur = w;
            for (int p = 1; p <= max_period; ++p) {
                cur = canonical_cyclic(f.automorphism().apply(cur));
                work += static_cast<long>(cur.size() / 8);
                if (cur == w || cur == inv) {
                    out.circuits.push_back(w);
                    out.periods.push_back(p);
                    return;
                }
                // Coming back to length |w| within the remaining steps needs |cur| <= |w| * shrink^left.
                if (static_cast<double>(cur.size()) > static_cast<double>(w.size()) * std::pow(shrink, max_period - p)) return;
            }
            return;
        }
        for (std::size_t i = first; i < letters.size(); ++i) {
            Letter l = letters[i];
            if (!w.empty() && l == -w.back()) continue;
            const int back = letter_key(w[w.size() - period]);
            if (letter_key(l) < back) continue;
            std::size_t next = letter_key(l) == back ? period : w.size() + 1;
            w.push_back(l);
            dfs(len, first, next);
            w.pop_back();
            if (exhausted) return;
        }
    };
    for (int len = 1; len <= length_bound && !exhausted; ++len) {
        std::size_t found_before = out.circuits.size();
        for (std::size_t i = 0; i < letters.size() && !exhausted; ++i) {
            w.assign(1, letters[i]);
            dfs(static_cast<std::size_t>(len), i, 1);
        }
        if (exhausted) {
            out.circuits.resize(found_before);
            out.periods.resize(found_before);
            break;
        }
        out.bound_reached = len;
    }
    return out;
}

std::vector<int> invariant_subgraph_closure(const GraphMap& f, const std::vector<int>& seed) {
    std::vector<char> in(static_cast<std::size_t>(f.num_edges()), 0);
    std::vector<int> todo(seed.begin(), seed.end());
    for (int e : seed) in[static_cast<std::size_t>(e)] = 1;
    while (!todo.empty()) {
        int e = todo.back();
        todo.pop_back();
        for (Letter l : f.edge_image(e)) {
            int g = gen_of(l);
            if (!in[static_cast<std::size_t>(g)]) {
                in[static_cast<std::size_t>(g)] = 1;
                todo.push_back(g);
            }
        }
    }
    std::vector<int> out;
    for (int e = 0; e < f.num_edges(); ++e)
        if (in[static_cast<std::size_t>(e)]) out.push_back(e);
    return out;
}

SubgroupSystem subgraph_system(int rank, const std::vector<int>& edges) {
    if (edges.empty()) return SubgroupSystem(rank, {});
    std::vector<Word> gens;
    for (int e : edges) gens.push_back({e + 1});
    return SubgroupSystem(rank, {SubgroupClass::from_generators(rank, gens)});
}

}  // namespace lamina
