#include <algorithm>

#include "doctest.h"
#include "lamina/torus.hpp"
#include "support.hpp"

using namespace lamina;
using fixtures::f2;
using fixtures::f4;
using fixtures::f6;

namespace {

const Analysis& golden() {
    static const Analysis a(fixtures::golden(), f6());
    return a;
}

SubgroupSystem sys(const Alphabet& al, const std::vector<std::vector<std::string>>& classes) {
    std::vector<std::vector<Word>> gens;
    for (const auto& c : classes) {
        gens.emplace_back();
        for (const auto& g : c) gens.back().push_back(al.parse(g));
    }
    return SubgroupSystem::from_generators(al.rank(), gens);
}

// Recomputes x Phi^k(A) x^-1 = A from scratch, as based subgroups.
void check_conjugation(const Automorphism& phi, const TorusPresentation& t) {
    const int n = phi.rank();
    const Automorphism phik = power(phi, t.k);
    std::vector<Word> images;
    for (const auto& b : t.basis) images.push_back(mul({t.x, phik.apply(b), inverse(t.x)}));
    const CoreGraph a = core_from_generators(n, t.basis), image = core_from_generators(n, images);
    for (const auto& w : images) CHECK(membership(a, w).member);
    for (const auto& w : t.basis) CHECK(membership(image, w).member);
    // The stored fiber automorphism agrees with the conjugated images.
    for (int g = 0; g < t.fiber.rank(); ++g) {
        Word expanded;
        for (Letter l : t.psi.image(g)) {
            const Word& b = t.basis[static_cast<std::size_t>(gen_of(l))];
            expanded = mul(expanded, l > 0 ? b : inverse(b));
        }
        CHECK(expanded == images[static_cast<std::size_t>(g)]);
    }
}

const std::string C = "a b a' b'";

}  // namespace

TEST_CASE("mapping torus presentation") {
    auto t = mapping_torus(fixtures::fibonacci(), f2());
    CHECK(t.text() == "< a, b, t | t a t^-1 = a b, t b t^-1 = a >");
    CHECK(t.k == 1);
    CHECK(t.x.empty());
    Alphabet with_t({"s", "t"});
    CHECK(mapping_torus(fixtures::fibonacci(), with_t).stable == "t'");
    CHECK_THROWS_AS(mapping_torus(Automorphism::identity(1), Alphabet({"a"})), InputError);
}

TEST_CASE("subsystem tori") {
    const auto phi = fixtures::golden();
    auto ab = subsystem_torus(phi, sys(f6(), {{"a", "b"}}), f6());
    REQUIRE(ab.tori.size() == 1);
    const auto& t = ab.tori[0];
    CHECK(t.k == 1);
    CHECK(t.x.empty());
    CHECK(t.text() == "< a, b, t | t a t^-1 = a b, t b t^-1 = b a b >");
    check_conjugation(phi, t);

    auto p = subsystem_torus(phi, golden().polynomial_system(), f6());
    REQUIRE(p.tori.size() == 1);
    CHECK(p.tori[0].text() == "< g1, t | t g1 t^-1 = g1 >");
    check_conjugation(phi, p.tori[0]);

    CHECK(subsystem_torus(phi, SubgroupSystem(6, {}), f6()).tori.empty());
    CHECK_THROWS_AS(subsystem_torus(phi, sys(f6(), {{"a"}}), f6()), NotInvariant);

    // Two classes swapped by the map form one orbit presented with the square.
    const auto swap = fixtures::stratum_permuting();
    auto halves = subsystem_torus(swap, sys(f4(), {{"a", "b"}, {"c", "d"}}), f4());
    REQUIRE(halves.tori.size() == 1);
    CHECK(halves.orbits[0].size() == 2);
    CHECK(halves.tori[0].k == 2);
    check_conjugation(swap, halves.tori[0]);

    auto j = fbc_json(ab, f6());
    CHECK(j["classes"][0]["k"] == 1);
    CHECK(j["classes"][0]["psi"]["b"] == "b a b");
}

TEST_CASE("torus of a meet") {
    const auto& a = golden();
    const auto meet = system_meet(a.nonattracting(1).system, a.nonattracting(2).system);
    CHECK(meet == sys(f6(), {{"a", "b"}}));
    auto t = subsystem_torus(a.automorphism(), meet, f6());
    CHECK(t.tori[0].text() == subsystem_torus(a.automorphism(), sys(f6(), {{"a", "b"}}), f6()).tori[0].text());
}

TEST_CASE("twins") {
    auto v = phi_twins(Automorphism::identity(2), sys(f2(), {{"a"}, {"b"}}), 8);
    CHECK(v.found);
    CHECK(v.power == 1);
    CHECK(v.witness.empty());

    // Conjugate classes under a map that moves them apart.
    auto none = phi_twins(golden().automorphism(), golden().nonattracting(0).system, 8);
    CHECK(!none.found);
    CHECK(none.bound == 8);
}

TEST_CASE("canonical filtration of the golden map") {
    const auto& a = golden();
    auto cf = canonical_filtration(a);
    CHECK(cf.length == a.poset().depth);
    CHECK(cf.length == 2);
    REQUIRE(cf.systems.size() == 3);
    CHECK(cf.systems[0] == a.whole());
    CHECK(cf.systems[1] == sys(f6(), {{"a", "b"}}));
    CHECK(cf.systems[2] == sys(f6(), {{C}}));
    CHECK(cf.supports[2].empty());
    for (std::size_t i = 1; i < cf.systems.size(); ++i) {
        CHECK(is_below(cf.systems[i], cf.systems[i - 1]));
        CHECK(cf.systems[i] != cf.systems[i - 1]);
    }
    CHECK(a.carried_orbits(cf.systems.back()).empty());
    CHECK(cf.tori[1].tori[0].text() == "< a, b, t | t a t^-1 = a b, t b t^-1 = b a b >");
    for (const auto& f : cf.tori)
        for (const auto& t : f.tori) check_conjugation(a.automorphism(), t);
}

TEST_CASE("canonical filtration lengths") {
    Analysis uni(fixtures::unipotent(), f2());
    auto cu = canonical_filtration(uni);
    CHECK(cu.length == 0);
    CHECK(cu.systems.size() == 1);

    Analysis fib(fixtures::fibonacci(), f2());
    auto cf = canonical_filtration(fib);
    CHECK(cf.length == 1);
    CHECK(cf.systems[1] == sys(f2(), {{C}}));
}

TEST_CASE("H collection matches the orbit poset") {
    auto check = [](const Analysis& a) {
        auto h = h_collection(a);
        CHECK(static_cast<int>(h.entries.size()) == a.orbit_count());
        for (int x = 0; x < a.orbit_count(); ++x)
            for (int y = 0; y < a.orbit_count(); ++y) {
                if (x == y) continue;
                bool nested = std::find(h.nesting.begin(), h.nesting.end(), std::pair{x, y}) != h.nesting.end();
                CHECK(nested == a.poset().contains(y, x));
            }
        for (const auto& e : h.entries)
            for (const auto& t : e.torus.tori) check_conjugation(a.automorphism(), t);
    };
    check(golden());
    for (auto& c : fixtures::curated()) {
        if (c.name == "golden") continue;
        CAPTURE(c.name);
        check(Analysis(c.phi, c.names));
    }
    auto h = h_collection(golden());
    CHECK(h.nesting == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("finite-index restriction") {
    SUBCASE("trivial cover") {
        Cover one{1, {{0}, {0}}};
        auto r = restrict_finite_index(fixtures::fibonacci(), one);
        CHECK(r.psi == fixtures::fibonacci());
    }
    SUBCASE("cyclic cover under the identity") {
        auto r = restrict_finite_index(Automorphism::identity(2), cyclic_cover({1, 0}, 3));
        CHECK(r.psi.rank() == 4);
        CHECK(r.psi == Automorphism::identity(4));
        CHECK(restricted_poset(r, {}).orbits.empty());
    }
    SUBCASE("fibonacci on the kernel of a, b -> 1 mod 2") {
        const Cover cover = cyclic_cover({1, 1}, 2);
        CHECK_THROWS_AS(restrict_finite_index(power(fixtures::fibonacci(), 2), cover), NotPreserved);
        auto r = restrict_finite_index(power(fixtures::fibonacci(), 3), cover);
        CHECK(r.psi.rank() == 3);
        auto p = restricted_poset(r, {});
        CHECK(p.depth == 1);
        CHECK(p.spectrum == std::set<int>{1});
    }
    SUBCASE("bad covers") {
        CHECK_THROWS_AS(cover_graph(Cover{2, {{0, 0}, {0, 1}}}), NotFiniteIndex);
        CHECK_THROWS_AS(cover_graph(Cover{2, {{0}, {0, 1}}}), NotFiniteIndex);
        CHECK_THROWS_AS(cover_graph(Cover{0, {}}), NotFiniteIndex);
        CHECK_THROWS_AS(restrict_finite_index(fixtures::fibonacci(), Cover{1, {{0}}}), InputError);
    }
}

TEST_CASE("index-two covers") {
    auto covers = index_two_covers(fixtures::fibonacci(), 12);
    REQUIRE(covers.size() == 3);
    for (const auto& c : covers) {
        CHECK(c.power == 3);
        CHECK_NOTHROW(restrict_finite_index(power(fixtures::fibonacci(), c.power), c.cover));
    }
    for (const auto& c : index_two_covers(Automorphism::identity(2), 4)) CHECK(c.power == 1);

    // Golden: the preferred cover changes sheets along a letter of the lowest stratum.
    const auto& a = golden();
    auto ordered = order_covers(index_two_covers(a.automorphism(), 12), a.laminations().filtration());
    REQUIRE(!ordered.empty());
    const auto& first = ordered.front();
    const int g = static_cast<int>(std::find(first.character.begin(), first.character.end(), 1) - first.character.begin());
    CHECK(a.laminations().filtration().stratum_of(g) == 0);
    auto r = restrict_finite_index(power(a.automorphism(), first.power), first.cover);
    CHECK(r.psi.rank() == 11);
    CHECK(r.basis[0].size() == 2);
}
