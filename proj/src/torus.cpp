#include "lamina/torus.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace lamina {

std::string format_relator_word(const Word& w, const Alphabet& names) {
    std::string out;
    for (Letter l : w) {
        if (!out.empty()) out += ' ';
        out += names.name(gen_of(l));
        if (l < 0) out += "^-1";
    }
    return out;
}

std::string TorusPresentation::text() const {
    std::ostringstream os;
    os << "< ";
    for (const auto& n : fiber.names()) os << n << ", ";
    os << stable << " | ";
    for (int g = 0; g < fiber.rank(); ++g) {
        if (g) os << ", ";
        os << stable << ' ' << fiber.name(g) << ' ' << stable << "^-1 = " << format_relator_word(psi.image(g), fiber);
    }
    os << " >";
    return os.str();
}

namespace {

std::string stable_letter(const Alphabet& names) {
    std::string t = "t";
    while (names.index(t) >= 0) t += "'";
    return t;
}

// Basis elements that are single generators keep their names; otherwise g1, g2, ...
Alphabet fiber_names(const std::vector<Word>& basis, const Alphabet& ambient) {
    bool letters = true;
    for (const auto& b : basis) letters &= b.size() == 1 && b[0] > 0;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < basis.size(); ++i)
        out.push_back(letters ? ambient.name(gen_of(basis[i][0])) : "g" + std::to_string(i + 1));
    return Alphabet(out);
}

}  // namespace

TorusPresentation mapping_torus(const Automorphism& phi, const Alphabet& names) {
    if (phi.rank() < 2) throw InputError("mapping tori need a free group of rank at least 2");
    TorusPresentation p;
    p.fiber = names;
    p.stable = stable_letter(names);
    for (int g = 0; g < phi.rank(); ++g) p.basis.push_back({g + 1});
    p.psi = phi;
    return p;
}

FbcSystem subsystem_torus(const Automorphism& phi, const SubgroupSystem& s, const Alphabet& ambient) {
    auto inv = is_invariant(phi, s);
    if (!inv.invariant) throw NotInvariant("subgroup system is not invariant");
    FbcSystem out;
    out.system = s;
    for (const auto& od : inv.orbits) {
        const auto& cls = s.classes()[static_cast<std::size_t>(od.members[0])];
        TorusPresentation p;
        p.k = od.k;
        const Automorphism phik = power(phi, od.k);
        auto x = invariance_conjugator(phik, cls);
        if (!x) throw NotInvariant("class is not fixed by its orbit power");
        p.x = *x;
        p.basis = cls.generators();
        const CoreGraph based = cls.based();
        std::vector<Word> images;
        for (const auto& g : p.basis) {
            Word img = mul({p.x, phik.apply(g), inverse(p.x)});
            auto m = membership(based, img);
            if (!m.member) throw NotInvariant("conjugated image leaves the subgroup");
            images.push_back(m.witness);
        }
        p.fiber = fiber_names(p.basis, ambient);
        p.stable = stable_letter(p.fiber);
        p.psi = Automorphism(static_cast<int>(images.size()), images);
        out.orbits.push_back(od.members);
        out.tori.push_back(std::move(p));
    }
    return out;
}

TwinsVerdict phi_twins(const Automorphism& phi, const SubgroupSystem& s, int bound) {
    TwinsVerdict v;
    v.bound = bound;
    if (s.size() < 2) return v;
    Automorphism phin = Automorphism::identity(phi.rank());
    const auto& cs = s.classes();
    for (int n = 1; n <= bound; ++n) {
        phin = compose(phi, phin);
        std::vector<std::optional<Word>> x;
        for (const auto& c : cs) x.push_back(invariance_conjugator(phin, c));
        for (std::size_t i = 0; i < cs.size(); ++i)
            for (std::size_t j = i + 1; j < cs.size(); ++j) {
                if (!x[i] || !x[j]) continue;
                auto meet = coset_intersection(cs[i].based(), *x[i], cs[j].based(), *x[j]);
                if (meet.nonempty) {
                    v.found = true;
                    v.power = n;
                    v.first = static_cast<int>(i);
                    v.second = static_cast<int>(j);
                    v.witness = meet.witness;
                    return v;
                }
            }
    }
    return v;
}

CanonicalFiltration canonical_filtration(const Analysis& a) {
    CanonicalFiltration cf;
    cf.levels = a.levels();
    cf.length = a.poset().depth;
    std::vector<int> remaining;
    for (int o = 0; o < a.orbit_count(); ++o) remaining.push_back(o);
    SubgroupSystem f = a.whole();
    for (int i = 0;; ++i) {
        if (a.carried_orbits(f) != remaining)
            throw StageInconsistency("filtration level " + std::to_string(i) + " carries the wrong orbits");
        auto support = remaining.empty() ? SubgroupSystem(a.rank(), {}) : a.free_factor_support(remaining, f);
        cf.systems.push_back(f);
        cf.supports.push_back(support);
        cf.tori.push_back(subsystem_torus(a.automorphism(), f, a.names()));
        cf.support_tori.push_back(subsystem_torus(a.automorphism(), support, a.names()));
        if (i == cf.length) break;
        const auto& level = cf.levels[static_cast<std::size_t>(i)];
        f = a.nonattracting_subset(level, support);
        std::erase_if(remaining, [&](int o) { return std::find(level.begin(), level.end(), o) != level.end(); });
    }
    return cf;
}

HCollection h_collection(const Analysis& a) {
    HCollection h;
    for (int o = 0; o < a.orbit_count(); ++o) h.entries.push_back({o, subsystem_torus(a.automorphism(), a.supporting(o).system, a.names())});
    for (const auto& x : h.entries)
        for (const auto& y : h.entries)
            if (x.orbit != y.orbit && x.torus.system != y.torus.system && is_below(x.torus.system, y.torus.system))
                h.nesting.push_back({x.orbit, y.orbit});
    return h;
}

CoreGraph cover_graph(const Cover& c) {
    if (c.sheets < 1) throw NotFiniteIndex("cover has no sheets");
    std::vector<Arc> arcs;
    for (std::size_t g = 0; g < c.perm.size(); ++g) {
        const auto& p = c.perm[g];
        if (static_cast<int>(p.size()) != c.sheets) throw NotFiniteIndex("generator " + std::to_string(g) + " is not defined on every sheet");
        std::vector<char> hit(static_cast<std::size_t>(c.sheets), 0);
        for (int i = 0; i < c.sheets; ++i) {
            int j = p[static_cast<std::size_t>(i)];
            if (j < 0 || j >= c.sheets || hit[static_cast<std::size_t>(j)])
                throw NotFiniteIndex("generator " + std::to_string(g) + " does not permute the sheets");
            hit[static_cast<std::size_t>(j)] = 1;
            arcs.push_back({i, j, static_cast<int>(g)});
        }
    }
    CoreGraph graph(static_cast<int>(c.perm.size()), c.sheets, arcs, 0);
    std::vector<char> seen(static_cast<std::size_t>(c.sheets), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (const Arc& a : arcs)
            for (int w : {a.from == v ? a.to : -1, a.to == v ? a.from : -1})
                if (w >= 0 && !seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    q.push_back(w);
                }
    }
    if (std::count(seen.begin(), seen.end(), 0)) throw InputError("cover is not connected");
    return graph;
}

Restriction restrict_finite_index(const Automorphism& phi, const Cover& cover) {
    if (static_cast<int>(cover.perm.size()) != phi.rank()) throw InputError("cover and automorphism ranks differ");
    const CoreGraph g = cover_graph(cover);
    Restriction r;
    r.basis = g.basis(0);
    std::vector<Word> images;
    for (const auto& b : r.basis) {
        auto w = g.witness(0, phi.apply(b));
        if (!w) throw NotPreserved("automorphism does not preserve the subgroup");
        images.push_back(*w);
    }
    r.psi = Automorphism(static_cast<int>(images.size()), images);
    return r;
}

Cover cyclic_cover(const std::vector<int>& steps, int sheets) {
    Cover c;
    c.sheets = sheets;
    for (int s : steps) {
        std::vector<int> p(static_cast<std::size_t>(sheets));
        for (int i = 0; i < sheets; ++i) p[static_cast<std::size_t>(i)] = ((i + s) % sheets + sheets) % sheets;
        c.perm.push_back(std::move(p));
    }
    return c;
}

std::vector<PreservedCover> index_two_covers(const Automorphism& phi, int max_power) {
    const int n = phi.rank();
    if (n > 20) throw InputError("rank too large for character enumeration");
    // parity[j][i]: exponent sum of generator i in phi(generator j), mod 2.
    std::vector<std::vector<int>> parity(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    for (int j = 0; j < n; ++j)
        for (Letter l : phi.image(j)) parity[static_cast<std::size_t>(j)][static_cast<std::size_t>(gen_of(l))] ^= 1;
    std::vector<PreservedCover> out;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> chi(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) chi[static_cast<std::size_t>(i)] = (mask >> i) & 1;
        std::vector<int> cur = chi;
        for (int m = 1; m <= max_power; ++m) {
            std::vector<int> next(static_cast<std::size_t>(n), 0);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) next[static_cast<std::size_t>(j)] ^= parity[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] & cur[static_cast<std::size_t>(i)];
            cur.swap(next);
            if (cur == chi) {
                out.push_back({m, chi, cyclic_cover(chi, 2)});
                break;
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.power < b.power; });
    return out;
}

std::vector<PreservedCover> order_covers(std::vector<PreservedCover> covers, const Filtration& filt) {
    auto key = [&](const PreservedCover& c) {
        auto it = std::find(c.character.begin(), c.character.end(), 1);
        const int g = static_cast<int>(it - c.character.begin());
        return std::pair{filt.stratum_of(g), c.power};
    };
    std::stable_sort(covers.begin(), covers.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    return covers;
}

LamOrbitPoset restricted_poset(const Restriction& r, const AttractionConfig& cfg) {
    LaminationSystem ls(r.psi, cfg);
    return build_poset(ls);
}

bool is_polynomial(const LaminationSystem& ls) { return ls.orbits().empty(); }

nlohmann::json fbc_json(const FbcSystem& f, const Alphabet& names) {
    nlohmann::json j;
    j["classes"] = nlohmann::json::array();
    for (const auto& t : f.tori) {
        nlohmann::json c;
        c["generators"] = nlohmann::json::array();
        for (const auto& b : t.basis) c["generators"].push_back(names.format(b));
        c["k"] = t.k;
        c["x"] = names.format(t.x);
        nlohmann::json psi = nlohmann::json::object();
        for (int g = 0; g < t.fiber.rank(); ++g) psi[t.fiber.name(g)] = t.fiber.format(t.psi.image(g));
        c["psi"] = psi;
        c["presentation"] = t.text();
        j["classes"].push_back(c);
    }
    return j;
}

}  // namespace lamina
