#include "lamina/lamination.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

namespace lamina {

SubwordMatcher::SubwordMatcher(const Word& text) {
    states_.reserve(2 * text.size() + 2);
    edges_.reserve(3 * text.size() + 4);
    states_.push_back({0, -1, -1});
    for (Letter c : text) extend(c);
    text_length_ = text.size();
}

int SubwordMatcher::find(int s, Letter c) const {
    for (int e = states_[static_cast<std::size_t>(s)].first; e >= 0; e = edges_[static_cast<std::size_t>(e)].next)
        if (edges_[static_cast<std::size_t>(e)].letter == c) return edges_[static_cast<std::size_t>(e)].to;
    return -1;
}

void SubwordMatcher::set(int s, Letter c, int to) {
    for (int e = states_[static_cast<std::size_t>(s)].first; e >= 0; e = edges_[static_cast<std::size_t>(e)].next)
        if (edges_[static_cast<std::size_t>(e)].letter == c) {
            edges_[static_cast<std::size_t>(e)].to = to;
            return;
        }
    edges_.push_back({c, to, states_[static_cast<std::size_t>(s)].first});
    states_[static_cast<std::size_t>(s)].first = static_cast<int>(edges_.size()) - 1;
}

void SubwordMatcher::extend(Letter c) {
    const int cur = static_cast<int>(states_.size());
    states_.push_back({states_[static_cast<std::size_t>(last_)].len + 1, -1, -1});
    int p = last_;
    while (p != -1 && find(p, c) < 0) {
        set(p, c, cur);
        p = states_[static_cast<std::size_t>(p)].link;
    }
    if (p == -1) {
        states_[static_cast<std::size_t>(cur)].link = 0;
    } else {
        const int q = find(p, c);
        if (states_[static_cast<std::size_t>(p)].len + 1 == states_[static_cast<std::size_t>(q)].len) {
            states_[static_cast<std::size_t>(cur)].link = q;
        } else {
            const int clone = static_cast<int>(states_.size());
            states_.push_back({states_[static_cast<std::size_t>(p)].len + 1, states_[static_cast<std::size_t>(q)].link, -1});
            std::vector<std::pair<Letter, int>> copy;
            for (int e = states_[static_cast<std::size_t>(q)].first; e >= 0; e = edges_[static_cast<std::size_t>(e)].next)
                copy.emplace_back(edges_[static_cast<std::size_t>(e)].letter, edges_[static_cast<std::size_t>(e)].to);
            for (auto [l, t] : copy) set(clone, l, t);
            while (p != -1 && find(p, c) == q) {
                set(p, c, clone);
                p = states_[static_cast<std::size_t>(p)].link;
            }
            states_[static_cast<std::size_t>(q)].link = clone;
            states_[static_cast<std::size_t>(cur)].link = clone;
        }
    }
    last_ = cur;
}

std::size_t SubwordMatcher::longest_common(const Word& query, bool cyclic) const {
    if (states_.empty() || query.empty()) return 0;
    const std::size_t n = query.size();
    const std::size_t total = cyclic ? 2 * n - 1 : n;
    int v = 0;
    std::size_t len = 0, best = 0;
    for (std::size_t i = 0; i < total; ++i) {
        Letter c = query[i % n];
        while (v != 0 && find(v, c) < 0) {
            v = states_[static_cast<std::size_t>(v)].link;
            len = static_cast<std::size_t>(states_[static_cast<std::size_t>(v)].len);
        }
        int t = find(v, c);
        if (t >= 0) {
            v = t;
            ++len;
        } else {
            v = 0;
            len = 0;
        }
        best = std::max(best, len);
    }
    return std::min(best, n);
}

LeafLanguage build_leaf_language(const GraphMap& f, const Filtration& filt, int stratum, const AttractionConfig& cfg) {
    LeafLanguage out;
    out.stratum = stratum;
    const auto& edges = filt.strata.at(static_cast<std::size_t>(stratum));
    out.edge = *std::min_element(edges.begin(), edges.end());
    out.iterates.push_back(Word{out.edge + 1});
    while (out.iterates.size() < 64) {
        Word next = map_path(f, out.iterates.back());
        if (next.size() > cfg.leaf_cap || next == out.iterates.back()) break;
        out.iterates.push_back(std::move(next));
    }
    for (std::size_t i = 0; i < out.iterates.size(); ++i)
        if (out.iterates[i].size() <= cfg.match_window) out.window_index = i;
    // A conjugating prefix and its inverse at the ends of an iterate are leaf segments too, but
    // cyclic iterates of attracted classes need not contain them.
    Word text = cyclic_reduce(out.iterates[out.window_index]).cyclic;
    out.window_length = text.size();
    Word inv = inverse(text);
    text.push_back(0);
    text.insert(text.end(), inv.begin(), inv.end());
    out.matcher = std::make_shared<SubwordMatcher>(text);
    return out;
}

ApproxElement build_approx_element(const LeafLanguage& leaf) {
    const Letter e = leaf.edge + 1;
    for (std::size_t m = 1; m < leaf.iterates.size(); ++m) {
        const Word& it = leaf.iterates[m];
        for (Letter target : {e, -e}) {
            std::vector<std::size_t> at;
            for (std::size_t i = 0; i < it.size() && at.size() < 2; ++i)
                if (it[i] == target) at.push_back(i);
            if (at.size() < 2) continue;
            // Origins of the copies: the start of e, or the end of a reversed copy.
            std::size_t shift = target == e ? 0 : 1;
            ApproxElement out;
            out.exponent = static_cast<int>(m);
            out.sigma.assign(it.begin() + static_cast<long>(at[0] + shift), it.begin() + static_cast<long>(at[1] + shift));
            out.g = cyclic_reduce(out.sigma).cyclic;
            if (out.g.empty()) continue;
            return out;
        }
    }
    throw HorizonExceeded("no iterate of the stratum edge contains two copies of it");
}

std::string to_string(Attraction a) {
    switch (a) {
        case Attraction::Attracted: return "Attracted";
        case Attraction::NotAttracted: return "NotAttracted";
        case Attraction::Undetermined: return "Undetermined";
    }
    return "?";
}

LaminationSystem::LaminationSystem(const Automorphism& phi, const AttractionConfig& cfg, const Filtration* filt)
    : f_(rose_representative(phi)), cfg_(cfg) {
    filt_ = refine_filtration(f_, filt ? *filt : single_stratum(f_));
    strata_ = transition_data(f_, filt_);
    c1_ = cancellation_bound(f_);
    bcc_ = bounded_cancellation_constant(f_);
    for (std::size_t r = 0; r < strata_.size(); ++r) {
        if (strata_[r].kind != StratumKind::EG) continue;
        LamOrbit o;
        o.id = static_cast<int>(orbits_.size());
        o.stratum = static_cast<int>(r);
        leaves_.push_back(build_leaf_language(f_, filt_, o.stratum, cfg_));
        o.edge = leaves_.back().edge;
        o.lambda = strata_[r].lambda;
        o.approx = build_approx_element(leaves_.back());
        o.approx.orbit = o.id;
        orbits_.push_back(std::move(o));
    }
    name_orbits(Alphabet::standard(rank()));
}

void LaminationSystem::name_orbits(const Alphabet& names) {
    for (auto& o : orbits_) {
        auto edges = filt_.strata[static_cast<std::size_t>(o.stratum)];
        std::sort(edges.begin(), edges.end());
        bool short_names = true;
        for (int e : edges) short_names &= names.name(e).size() == 1;
        std::string s = "Λ_";
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (i && !short_names) s += ",";
            s += names.name(edges[i]);
        }
        o.name = s;
    }
}

int LaminationSystem::orbit_of_stratum(int r) const {
    for (const auto& o : orbits_)
        if (o.stratum == r) return o.id;
    return -1;
}

namespace {

struct Triple {
    Letter left;
    int block;
    Letter right;
    auto operator<=>(const Triple&) const = default;
};

// Iterates a cyclic word or a path and watches the maximal subwords lying in the filtration
// level of the orbit's stratum. While no cancellation reaches across higher letters, the set
// of (higher letter, block, higher letter) triples evolves on its own and the words themselves
// never need to be written out.
class AttractionRun {
public:
    AttractionRun(const LaminationSystem& ls, int orbit, bool cyclic)
        : ls_(ls), leaf_(ls.leaves(orbit)), cfg_(ls.config()), cyclic_(cyclic) {
        r_ = ls.orbits()[static_cast<std::size_t>(orbit)].stratum;
        low_.assign(static_cast<std::size_t>(ls.rank()), 0);
        for (int q = 0; q <= r_; ++q)
            for (int e : ls.filtration().strata[static_cast<std::size_t>(q)]) low_[static_cast<std::size_t>(e)] = 1;
        const int threshold = 2 * ls.cancellation() * cfg_.window;
        const int m = ls.orbits()[static_cast<std::size_t>(orbit)].approx.exponent;
        // The ends of an iterate can cancel around a circuit: a conjugating prefix against its
        // inverse, or lower letters. Only the cyclically reduced middle, trimmed to the stratum's
        // own letters, is looked for.
        std::vector<char> top(static_cast<std::size_t>(ls.rank()), 0);
        for (int e : ls.filtration().strata[static_cast<std::size_t>(r_)]) top[static_cast<std::size_t>(e)] = 1;
        auto core = [&](const Word& iterate) {
            const Word w = cyclic_reduce(iterate).cyclic;
            auto in_top = [&](Letter l) { return top[static_cast<std::size_t>(gen_of(l))] != 0; };
            auto first = std::find_if(w.begin(), w.end(), in_top);
            auto last = std::find_if(w.rbegin(), w.rend(), in_top).base();
            // Neighbouring images in an iterate may still cancel into the ends.
            const long trim = ls.cancellation();
            if (last - first <= 2 * trim) return Word{};
            return Word(first + trim, last - trim);
        };
        std::size_t k0 = leaf_.iterates.size();
        for (std::size_t k = static_cast<std::size_t>(m); k < leaf_.iterates.size(); ++k)
            if (static_cast<int>(core(leaf_.iterates[k]).size()) > threshold) {
                k0 = k;
                break;
            }
        for (std::size_t k = k0; k < std::min(k0 + 3, leaf_.iterates.size()); ++k) {
            Word t = core(leaf_.iterates[k]);
            targets_.push_back(t);
            targets_.push_back(inverse(t));
        }
    }

    AttractionVerdict run(const Word& input) {
        AttractionVerdict out;
        Word g = cyclic_ ? cyclic_reduce(reduce(input)).cyclic : reduce(input);
        if (g.empty()) {
            out.status = Attraction::NotAttracted;
            out.certificate = "trivial";
            return out;
        }
        // Iterates stay inside the invariant closure of the support.
        std::vector<int> support;
        for (Letter l : g) support.push_back(gen_of(l));
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        bool meets = false;
        for (int e : invariant_subgraph_closure(ls_.map(), support))
            meets |= ls_.filtration().stratum_of(e) == r_;
        if (!meets) {
            out.status = Attraction::NotAttracted;
            out.certificate = "support";
            return out;
        }
        auto triples = skeleton(g);
        if (!triples) return iterate_words(g, out);
        return iterate_triples(g, *triples, out);
    }

private:
    struct LetterImage {
        Word prefix, suffix, mid;
        std::vector<Triple> interior;
        bool collapses = false;
    };

    bool low(Letter l) const { return l != 0 && low_[static_cast<std::size_t>(gen_of(l))] != 0; }

    int intern(const Word& w) {
        auto [it, fresh] = ids_.emplace(w, static_cast<int>(blocks_.size()));
        if (fresh) {
            blocks_.push_back(w);
            match_.push_back(leaf_.matcher->longest_common(w));
            grows_.push_back(contains_target(w));
            shape_.push_back(intern_shape(compress(w)));
        }
        return it->second;
    }

    int intern_shape(const Word& w) { return shapes_.emplace(w, static_cast<int>(shapes_.size())).first->second; }

    // A run of a repeated factor collapses to one period plus the leftover.
    static Word compress(const Word& w) {
        const std::size_t n = w.size();
        if (n < 2) return w;
        std::vector<std::size_t> pi(n, 0);
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t k = pi[i - 1];
            while (k && w[i] != w[k]) k = pi[k - 1];
            if (w[i] == w[k]) ++k;
            pi[i] = k;
        }
        const std::size_t p = n - pi[n - 1];
        if (n < 2 * p) return w;
        return Word(w.begin(), w.begin() + static_cast<long>(p + n % p));
    }

    bool contains_target(const Word& w) const {
        for (const auto& t : targets_) {
            if (t.size() > w.size()) continue;
            if (std::search(w.begin(), w.end(), std::boyer_moore_horspool_searcher(t.begin(), t.end())) != w.end())
                return true;
        }
        return false;
    }

    const LetterImage& image(Letter x) {
        auto it = images_.find(x);
        if (it != images_.end()) return it->second;
        LetterImage li;
        if (x == 0) {
            li.mid = {0};
        } else {
            const Word& raw = ls_.map().edge_image(gen_of(x));
            Word im = x > 0 ? raw : inverse(raw);
            std::size_t i = 0, j = im.size();
            while (i < im.size() && low(im[i])) ++i;
            while (j > i && low(im[j - 1])) --j;
            if (i == j) {
                li.collapses = true;
            } else {
                li.prefix.assign(im.begin(), im.begin() + static_cast<long>(i));
                li.suffix.assign(im.begin() + static_cast<long>(j), im.end());
                li.mid.assign(im.begin() + static_cast<long>(i), im.begin() + static_cast<long>(j));
                std::size_t prev = 0;
                for (std::size_t k = 1; k < li.mid.size(); ++k) {
                    if (low(li.mid[k])) continue;
                    Word b(li.mid.begin() + static_cast<long>(prev) + 1, li.mid.begin() + static_cast<long>(k));
                    li.interior.push_back({li.mid[prev], intern(b), li.mid[k]});
                    prev = k;
                }
            }
        }
        return images_.emplace(x, std::move(li)).first->second;
    }

    // Triples of a word; nullopt for a cyclic word with no letters above the level.
    std::optional<std::set<Triple>> skeleton(const Word& w) {
        std::vector<std::size_t> high;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (!low(w[i])) high.push_back(i);
        std::set<Triple> out;
        if (cyclic_) {
            if (high.empty()) return std::nullopt;
            for (std::size_t k = 0; k < high.size(); ++k) {
                std::size_t a = high[k], b = high[(k + 1) % high.size()];
                Word blk;
                for (std::size_t i = (a + 1) % w.size(); i != b; i = (i + 1) % w.size()) blk.push_back(w[i]);
                out.insert({w[a], intern(blk), w[b]});
            }
        } else {
            std::vector<std::size_t> cuts;
            cuts.push_back(static_cast<std::size_t>(-1));
            cuts.insert(cuts.end(), high.begin(), high.end());
            cuts.push_back(w.size());
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                std::size_t a = cuts[k], b = cuts[k + 1];
                Letter left = k == 0 ? 0 : w[a];
                Letter right = k + 2 == cuts.size() ? 0 : w[b];
                Word blk(w.begin() + static_cast<long>(a + 1), w.begin() + static_cast<long>(b));
                out.insert({left, intern(blk), right});
            }
        }
        return out;
    }

    enum class StepResult { Ok, Cancelled, Capped };

    StepResult step(std::set<Triple>& t) {
        std::set<Triple> next;
        for (const auto& x : t) {
            const LetterImage& l = image(x.left);
            const LetterImage& r = image(x.right);
            if (l.collapses || r.collapses) return StepResult::Cancelled;
            Word mid = ls_.automorphism().apply(blocks_[static_cast<std::size_t>(x.block)]);
            Word g = mul({l.suffix, mid, r.prefix});
            Letter a = l.mid.back(), b = r.mid.front();
            if (g.empty() && a != 0 && a == -b) return StepResult::Cancelled;
            if (g.size() > cfg_.iterate_cap) return StepResult::Capped;
            next.insert({a, intern(g), b});
            next.insert(l.interior.begin(), l.interior.end());
        }
        t.swap(next);
        return StepResult::Ok;
    }

    struct Observation {
        std::size_t m = 0;
        bool grows = false;
        std::set<Triple> pattern;
    };

    Observation observe(const std::set<Triple>& t) {
        Observation o;
        for (const auto& x : t) {
            o.m = std::max(o.m, static_cast<std::size_t>(match_[static_cast<std::size_t>(x.block)]));
            o.grows |= grows_[static_cast<std::size_t>(x.block)] != 0;
            o.pattern.insert({x.left, shape_[static_cast<std::size_t>(x.block)], x.right});
        }
        return o;
    }

    // Shared certificate bookkeeping; returns true once a verdict is reached.
    bool judge(int n, const Observation& o, AttractionVerdict& out) {
        out.trace.push_back(o.m);
        out.horizon = n;
        patterns_.push_back(o.pattern);
        if (growth_at_ >= 0 && n > growth_at_) {
            if (o.m >= 2 * growth_m_ || o.m >= leaf_.saturation()) {
                out.status = Attraction::Attracted;
                out.certificate = "growth";
                return true;
            }
            if (n - growth_at_ >= cfg_.window) growth_at_ = -1;
        }
        if (growth_at_ < 0 && o.grows) {
            growth_at_ = n;
            growth_m_ = o.m;
        }
        const int w = cfg_.window;
        if (n >= w - 1) {
            bool flat = true;
            for (int i = n - w + 1; i <= n; ++i) flat &= out.trace[static_cast<std::size_t>(i)] == o.m;
            bool periodic = false;
            for (int p = 1; p < w && !periodic; ++p) periodic = patterns_[static_cast<std::size_t>(n - p)] == o.pattern;
            if (flat && periodic && growth_at_ < 0) {
                out.status = Attraction::NotAttracted;
                out.certificate = "stabilization";
                return true;
            }
        }
        return false;
    }

    void reset(AttractionVerdict& out) {
        out.trace.clear();
        patterns_.clear();
        growth_at_ = -1;
        growth_m_ = 0;
    }

    AttractionVerdict iterate_triples(const Word& g, std::set<Triple> t, AttractionVerdict& out) {
        for (int n = 0;; ++n) {
            if (judge(n, observe(t), out)) return out;
            if (n == cfg_.n_max) return out;
            if (growth_at_ >= 0) {
                const Word* best = nullptr;
                for (const auto& x : t) {
                    const Word& b = blocks_[static_cast<std::size_t>(x.block)];
                    if (grows_[static_cast<std::size_t>(x.block)] && (!best || b.size() > best->size())) best = &b;
                }
                if (best && too_big(best->size())) return follow_piece(*best, n, out);
            }
            auto res = step(t);
            if (res == StepResult::Capped) return out;
            if (res == StepResult::Cancelled) {
                reset(out);
                return iterate_words(g, out);
            }
        }
    }

    AttractionVerdict iterate_words(const Word& g, AttractionVerdict& out) {
        out.fallback = true;
        Word w = g;
        for (int n = 0;; ++n) {
            Observation o;
            if (auto t = skeleton(w)) {
                o = observe(*t);
            } else {
                Word c = canonical_cyclic(w);
                o.m = leaf_.matcher->longest_common(w, true);
                o.grows = contains_target(w) || contains_target(mul(w, w));
                o.pattern.insert({0, intern_shape(compress(c)), 0});
            }
            if (judge(n, o, out)) return out;
            if (n == cfg_.n_max) return out;
            if (growth_at_ >= 0 && too_big(w.size())) return follow_piece(cyclic_ ? mul(w, w) : w, n, out);
            w = ls_.automorphism().apply(w);
            if (cyclic_) w = cyclic_reduce(w).cyclic;
            if (w.size() > cfg_.iterate_cap) return out;
        }
    }

    bool too_big(std::size_t len) const { return len * ls_.automorphism().max_image_length() > cfg_.iterate_cap; }

    // Once a leaf block has appeared but the whole iterate is too long to carry forward, follow
    // a piece of it around the block. Bounded cancellation keeps the image of the piece, less
    // the cancellation bound at each end, inside the next iterate.
    AttractionVerdict follow_piece(const Word& source, int n, AttractionVerdict& out) {
        const std::size_t keep = std::max<std::size_t>(1, cfg_.iterate_cap / ls_.automorphism().max_image_length());
        std::size_t centre = source.size() / 2;
        for (const auto& t : targets_) {
            if (t.size() > source.size()) continue;
            auto it = std::search(source.begin(), source.end(), std::boyer_moore_horspool_searcher(t.begin(), t.end()));
            if (it != source.end()) {
                centre = static_cast<std::size_t>(it - source.begin()) + t.size() / 2;
                break;
            }
        }
        auto cut = [&](const Word& w, std::size_t mid) {
            if (w.size() <= keep) return w;
            std::size_t from = mid > keep / 2 ? std::min(mid - keep / 2, w.size() - keep) : 0;
            return Word(w.begin() + static_cast<long>(from), w.begin() + static_cast<long>(from + keep));
        };
        Word piece = cut(source, centre);
        const std::size_t trim = static_cast<std::size_t>(ls_.piece_cancellation());
        while (n < cfg_.n_max) {
            ++n;
            piece = ls_.automorphism().apply(piece);
            if (piece.size() <= 2 * trim) return out;
            piece = Word(piece.begin() + static_cast<long>(trim), piece.end() - static_cast<long>(trim));
            Observation o;
            o.m = leaf_.matcher->longest_common(piece);
            if (judge(n, o, out)) return out;
            if (growth_at_ < 0) return out;
            piece = cut(piece, piece.size() / 2);
        }
        return out;
    }

    const LaminationSystem& ls_;
    const LeafLanguage& leaf_;
    const AttractionConfig& cfg_;
    bool cyclic_;
    int r_ = 0;
    std::vector<char> low_;
    std::vector<Word> targets_;
    std::map<Word, int> ids_;
    std::vector<Word> blocks_;
    std::vector<std::size_t> match_;
    std::vector<char> grows_;
    std::vector<int> shape_;
    std::map<Word, int> shapes_;
    std::map<Letter, LetterImage> images_;
    std::vector<std::set<Triple>> patterns_;
    int growth_at_ = -1;
    std::size_t growth_m_ = 0;
};

}  // namespace

AttractionVerdict LaminationSystem::attraction(const Word& w, int orbit, bool cyclic) const {
    auto key = std::make_tuple(w, orbit, cyclic);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    AttractionRun run(*this, orbit, cyclic);
    AttractionVerdict v = run.run(w);
    cache_.emplace(std::move(key), v);
    return v;
}

bool LamOrbitPoset::contains(int larger, int smaller) const {
    return std::find(nesting.begin(), nesting.end(), std::make_pair(smaller, larger)) != nesting.end();
}

std::set<int> chain_spectrum(int n, const std::vector<std::pair<int, int>>& nesting) {
    std::set<int> out;
    if (n == 0) return out;
    auto less = [&](int a, int b) { return std::find(nesting.begin(), nesting.end(), std::make_pair(a, b)) != nesting.end(); };
    // Hasse diagram: covers a < b with nothing strictly between.
    std::vector<std::vector<int>> up(static_cast<std::size_t>(n));
    std::vector<char> has_down(static_cast<std::size_t>(n), 0);
    for (auto [a, b] : nesting) {
        bool cover = true;
        for (int z = 0; z < n && cover; ++z) cover = !(less(a, z) && less(z, b));
        if (cover) {
            up[static_cast<std::size_t>(a)].push_back(b);
            has_down[static_cast<std::size_t>(b)] = 1;
        }
    }
    std::function<void(int, int)> walk = [&](int v, int size) {
        if (up[static_cast<std::size_t>(v)].empty()) {
            out.insert(size);
            return;
        }
        for (int w : up[static_cast<std::size_t>(v)]) walk(w, size + 1);
    };
    for (int v = 0; v < n; ++v)
        if (!has_down[static_cast<std::size_t>(v)]) walk(v, 1);
    return out;
}

LamOrbitPoset build_poset(const LaminationSystem& ls) {
    LamOrbitPoset p;
    p.orbits = ls.orbits();
    const int n = static_cast<int>(p.orbits.size());
    std::ostringstream undetermined;
    for (int i = 0; i < n; ++i) {
        const Word& g = p.orbits[static_cast<std::size_t>(i)].approx.g;
        auto own = ls.attraction(g, i);
        if (own.status != Attraction::Attracted)
            undetermined << p.orbits[static_cast<std::size_t>(i)].name << " approximating element vs itself: "
                         << to_string(own.status) << "\n";
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            auto v = ls.attraction(g, j);
            if (v.status == Attraction::Attracted) {
                p.nesting.emplace_back(j, i);
            } else if (v.status == Attraction::Undetermined) {
                undetermined << p.orbits[static_cast<std::size_t>(j)].name << " inside "
                             << p.orbits[static_cast<std::size_t>(i)].name << "? horizon " << v.horizon << ", trace";
                for (auto m : v.trace) undetermined << " " << m;
                undetermined << "\n";
            }
        }
    }
    if (!undetermined.str().empty()) throw UndeterminedNesting(undetermined.str());
    for (auto [a, b] : p.nesting) {
        if (p.contains(a, b)) throw UndeterminedNesting("nesting verdicts are not antisymmetric");
        for (auto [c, d] : p.nesting)
            if (b == c && !p.contains(d, a)) throw UndeterminedNesting("nesting verdicts are not transitive");
    }
    std::sort(p.nesting.begin(), p.nesting.end());
    p.spectrum = chain_spectrum(n, p.nesting);
    p.depth = p.spectrum.empty() ? 0 : *p.spectrum.rbegin();
    return p;
}

std::vector<std::vector<int>> strata_levels(const LamOrbitPoset& p) {
    const int n = static_cast<int>(p.orbits.size());
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> levels;
    for (int done = 0; done < n;) {
        std::vector<int> level;
        for (int v = 0; v < n; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            bool maximal = true;
            for (int w = 0; w < n && maximal; ++w)
                if (!used[static_cast<std::size_t>(w)] && p.contains(w, v)) maximal = false;
            if (maximal) level.push_back(v);
        }
        for (int v : level) used[static_cast<std::size_t>(v)] = 1;
        done += static_cast<int>(level.size());
        levels.push_back(std::move(level));
    }
    return levels;
}

std::string poset_dot(const LamOrbitPoset& p) {
    std::ostringstream os;
    os << "digraph laminations {\n";
    for (const auto& o : p.orbits) os << "  \"" << o.name << "\";\n";
    for (auto [a, b] : p.nesting)
        os << "  \"" << p.orbits[static_cast<std::size_t>(a)].name << "\" -> \"" << p.orbits[static_cast<std::size_t>(b)].name
           << "\";\n";
    os << "}\n";
    return os.str();
}

nlohmann::json poset_json(const LamOrbitPoset& p) {
    nlohmann::json j;
    j["orbits"] = nlohmann::json::array();
    for (const auto& o : p.orbits) j["orbits"].push_back(o.name);
    j["nesting"] = nlohmann::json::array();
    for (auto [a, b] : p.nesting) j["nesting"].push_back({a, b});
    j["depth"] = p.depth;
    j["spectrum"] = p.spectrum;
    return j;
}

}  // namespace lamina
