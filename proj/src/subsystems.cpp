#include "lamina/subsystems.hpp"

#include <algorithm>
#include <set>

namespace lamina {

Analysis::Analysis(const Automorphism& phi, const Alphabet& names, const AnalysisOptions& opt, const Filtration* filt)
    : names_(names), ls_(std::make_unique<LaminationSystem>(phi, opt.attraction, filt)) {
    if (names_.rank() != phi.rank()) throw InputError("alphabet and automorphism ranks differ");
    ls_->name_orbits(names_);
    poset_ = build_poset(*ls_);
    levels_ = strata_levels(poset_);
    nielsen_bound_ = opt.nielsen_bound > 0 ? opt.nielsen_bound : default_nielsen_bound(ls_->map());
}

std::vector<int> Analysis::down_set(int orbit) const {
    std::vector<int> out;
    for (int o = 0; o < orbit_count(); ++o)
        if (poset_.below_or_equal(o, orbit)) out.push_back(o);
    return out;
}

std::vector<int> Analysis::carried_orbits(const SubgroupSystem& s) const {
    std::vector<int> out;
    for (const auto& o : poset_.orbits)
        if (is_peripheral(s, o.approx.g)) out.push_back(o.id);
    return out;
}

const NielsenSearch& Analysis::nielsen(int stratum) const {
    auto it = nielsen_.find(stratum);
    if (it == nielsen_.end())
        it = nielsen_.emplace(stratum, nielsen_path_search(ls_->map(), ls_->filtration(), stratum, nielsen_bound_)).first;
    return it->second;
}

Attraction Analysis::edge_verdict(int edge, int orbit) const {
    const auto& filt = ls_->filtration();
    const int r = filt.stratum_of(edge);
    const auto& st = ls_->strata()[static_cast<std::size_t>(r)];
    const Word& image = ls_->map().edge_image(edge);
    long hits = std::count_if(image.begin(), image.end(), [&](Letter l) { return gen_of(l) == edge; });
    if (st.kind == StratumKind::NEG && st.edges.size() == 1 && hits == 1) {
        // Image u e v: the loop grows only through the iterates of u and v.
        auto at = std::find_if(image.begin(), image.end(), [&](Letter l) { return gen_of(l) == edge; });
        Word u(image.begin(), at), v(at + 1, image.end());
        Attraction out = Attraction::NotAttracted;
        for (const Word* side : {&u, &v}) {
            if (side->empty()) continue;
            auto s = ls_->attraction(*side, orbit, false).status;
            if (s == Attraction::Attracted) return s;
            if (s == Attraction::Undetermined) out = s;
        }
        return out;
    }
    return ls_->attraction(Word{edge + 1}, orbit, true).status;
}

const NonattractingSystem& Analysis::nonattracting(int orbit) const {
    if (auto it = nonattracting_.find(orbit); it != nonattracting_.end()) return it->second;
    const auto& lam = poset_.orbits.at(static_cast<std::size_t>(orbit));
    const auto& filt = ls_->filtration();
    const int n = rank();

    NonattractingSystem out;
    out.orbit = orbit;
    auto& prov = out.provenance;
    for (std::size_t r = 0; r < filt.strata.size(); ++r) {
        bool all_clear = true;
        for (int e : filt.strata[r]) {
            auto v = edge_verdict(e, orbit);
            if (v == Attraction::Undetermined)
                throw UndeterminedNesting("attraction of edge " + names_.name(e) + " to " + lam.name + " is undetermined");
            if (v == Attraction::Attracted) all_clear = false;
        }
        if (all_clear) prov.z_edges.insert(prov.z_edges.end(), filt.strata[r].begin(), filt.strata[r].end());
    }
    std::sort(prov.z_edges.begin(), prov.z_edges.end());

    const auto& ns = nielsen(lam.stratum);
    prov.nielsen_bound = ns.bound_reached;
    prov.nielsen_complete = ns.complete();

    // Every point of a rose circuit sits at the single vertex, which the map fixes. A rotation
    // that some power of the map sends exactly to itself or its inverse is a Nielsen loop there,
    // so it joins the class carried at that vertex together with Z.
    std::vector<Word> gens;
    for (int e : prov.z_edges) gens.push_back({e + 1});
    auto based_periodic = [&](const Word& loop) {
        Word cur = loop, inv = inverse(loop);
        for (int p = 1; p <= 4; ++p) {
            cur = automorphism().apply(cur);
            if (cur == loop || cur == inv) return true;
            if (cur.size() > loop.size() * automorphism().max_image_length() * 4) return false;
        }
        return false;
    };
    for (const Word& c : ns.circuits) {
        bool attached = false;
        for (std::size_t k = 0; k < c.size() && !attached; ++k) {
            Word rot(c.begin() + static_cast<long>(k), c.end());
            rot.insert(rot.end(), c.begin(), c.begin() + static_cast<long>(k));
            if (based_periodic(rot)) {
                gens.push_back(rot);
                prov.nielsen_paths.push_back(rot);
                attached = true;
            }
        }
        if (!attached) prov.separate_circuits.push_back(c);
    }

    std::vector<SubgroupClass> classes;
    if (!gens.empty()) classes.push_back(SubgroupClass::from_generators(n, gens));
    for (const Word& c : prov.separate_circuits) classes.push_back(SubgroupClass::from_generators(n, {c}));
    out.system = SubgroupSystem(n, std::move(classes));
    if (!is_invariant(automorphism(), out.system).invariant)
        throw Error("nonattracting system of " + lam.name + " is not invariant");
    return nonattracting_.emplace(orbit, std::move(out)).first->second;
}

SubgroupSystem Analysis::nonattracting(int orbit, const SubgroupSystem& ambient) const {
    return system_meet(nonattracting(orbit).system, ambient);
}

SubgroupSystem Analysis::nonattracting_subset(const std::vector<int>& orbits, const SubgroupSystem& ambient) const {
    SubgroupSystem out = ambient;
    for (int o : orbits) out = system_meet(out, nonattracting(o).system);
    return out;
}

SubgroupSystem Analysis::polynomial_system() const {
    std::vector<int> all;
    for (int o = 0; o < orbit_count(); ++o) all.push_back(o);
    return nonattracting_subset(all, whole());
}

bool Analysis::is_polynomially_growing(const Word& g) const {
    if (reduce(g).empty()) return true;
    return is_peripheral(polynomial_system(), g);
}

bool Analysis::carries(const SubgroupSystem& s, int orbit) const {
    if (!is_invariant(automorphism(), s).invariant) throw InvarianceRequired("carrying test needs an invariant system");
    return is_peripheral(s, poset_.orbits.at(static_cast<std::size_t>(orbit)).approx.g);
}

SubgroupSystem Analysis::free_factor_support(const std::vector<int>& orbits) const {
    std::vector<int> seed;
    for (int o : orbits) {
        const auto& edges = ls_->filtration().strata[static_cast<std::size_t>(poset_.orbits.at(static_cast<std::size_t>(o)).stratum)];
        seed.insert(seed.end(), edges.begin(), edges.end());
    }
    return subgraph_system(rank(), invariant_subgraph_closure(ls_->map(), seed));
}

SubgroupSystem Analysis::free_factor_support(const std::vector<int>& orbits, const SubgroupSystem& ambient) const {
    return system_meet(free_factor_support(orbits), ambient);
}

const SupportingSystem& Analysis::supporting(int orbit) const {
    if (auto it = supporting_.find(orbit); it != supporting_.end()) return it->second;
    const auto down = down_set(orbit);
    std::set<int> exterior;
    for (int o = 0; o < orbit_count(); ++o)
        if (!std::binary_search(down.begin(), down.end(), o)) exterior.insert(o);

    SupportingSystem out;
    out.orbit = orbit;
    SubgroupSystem s = whole();
    out.stages.push_back(s);
    for (int j = 0; j <= poset_.depth; ++j) {
        auto support = free_factor_support(carried_orbits(s), s);
        std::vector<int> level_exterior;
        if (j < static_cast<int>(levels_.size()))
            for (int o : levels_[static_cast<std::size_t>(j)])
                if (exterior.count(o)) level_exterior.push_back(o);
        s = system_meet(nonattracting_subset(level_exterior, whole()), support);
        out.supports.push_back(std::move(support));
        out.stages.push_back(s);
    }
    if (carried_orbits(s) != down)
        throw StageInconsistency("supporting system of " + poset_.orbits[static_cast<std::size_t>(orbit)].name +
                                 " does not carry exactly the orbits below it");
    out.system = s;
    return supporting_.emplace(orbit, std::move(out)).first->second;
}

PairingReport pairing_check(const Analysis& plus, const Analysis& minus) {
    PairingReport rep;
    rep.plus_count = plus.orbit_count();
    rep.minus_count = minus.orbit_count();
    if (rep.plus_count != rep.minus_count) throw UnmatchedOrbit("attracting and repelling orbit counts differ");
    std::vector<int> partner(static_cast<std::size_t>(rep.plus_count), -1);
    std::vector<char> used(static_cast<std::size_t>(rep.minus_count), 0);
    for (int i = 0; i < rep.plus_count; ++i) {
        auto support = plus.free_factor_support({i});
        for (int j = 0; j < rep.minus_count; ++j)
            if (!used[static_cast<std::size_t>(j)] && minus.free_factor_support({j}) == support) {
                partner[static_cast<std::size_t>(i)] = j;
                used[static_cast<std::size_t>(j)] = 1;
                break;
            }
        if (partner[static_cast<std::size_t>(i)] < 0)
            throw UnmatchedOrbit("no repelling orbit shares the support of " + plus.poset().orbits[static_cast<std::size_t>(i)].name);
        rep.pairs.push_back({i, partner[static_cast<std::size_t>(i)]});
    }
    for (auto [i, j] : rep.pairs) {
        rep.nonattracting_equal &= plus.nonattracting(i).system == minus.nonattracting(j).system;
        rep.supporting_equal &= plus.supporting(i).system == minus.supporting(j).system;
    }
    for (auto [a, pa] : rep.pairs)
        for (auto [b, pb] : rep.pairs) rep.order_isomorphic &= plus.poset().contains(a, b) == minus.poset().contains(pa, pb);
    return rep;
}

nlohmann::json system_json(const SubgroupSystem& s, const Alphabet& names) {
    nlohmann::json j;
    j["classes"] = nlohmann::json::array();
    for (const auto& c : s.classes()) {
        nlohmann::json gens = nlohmann::json::array();
        for (const auto& g : c.generators()) gens.push_back(names.format(g));
        j["classes"].push_back({{"generators", gens}});
    }
    return j;
}

nlohmann::json provenance_json(const Analysis& a, const NonattractingSystem& n) {
    nlohmann::json j;
    j["construction"] = "nonattracting";
    j["orbit"] = a.poset().orbits.at(static_cast<std::size_t>(n.orbit)).name;
    j["Z"] = nlohmann::json::array();
    for (int e : n.provenance.z_edges) j["Z"].push_back(a.names().name(e));
    j["nielsen_paths"] = nlohmann::json::array();
    for (const auto& w : n.provenance.nielsen_paths) j["nielsen_paths"].push_back(a.names().format(w));
    j["separate_circuits"] = nlohmann::json::array();
    for (const auto& w : n.provenance.separate_circuits) j["separate_circuits"].push_back(a.names().format(w));
    j["nielsen_bound"] = n.provenance.nielsen_bound;
    j["nielsen_complete"] = n.provenance.nielsen_complete;
    return j;
}

}  // namespace lamina
