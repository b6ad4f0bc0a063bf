#include <algorithm>
#include <map>

#include "doctest.h"
#include "lamina/subsystems.hpp"
#include "support.hpp"

using namespace lamina;
using fixtures::f2;
using fixtures::f6;

namespace {

const Analysis& golden() {
    static const Analysis a(fixtures::golden(), f6());
    return a;
}

int orbit(const Analysis& a, const std::string& name) {
    for (const auto& o : a.poset().orbits)
        if (o.name == name) return o.id;
    FAIL("no orbit " << name);
    return -1;
}

SubgroupSystem sys(const Alphabet& al, const std::vector<std::vector<std::string>>& classes) {
    std::vector<std::vector<Word>> gens;
    for (const auto& c : classes) {
        gens.emplace_back();
        for (const auto& g : c) gens.back().push_back(al.parse(g));
    }
    return SubgroupSystem::from_generators(al.rank(), gens);
}

const std::string C = "a b a' b'";

// Analyses of the curated maps, built once.
const std::vector<std::pair<std::string, std::unique_ptr<Analysis>>>& curated() {
    static const auto all = [] {
        std::vector<std::pair<std::string, std::unique_ptr<Analysis>>> v;
        for (auto& c : fixtures::curated()) v.emplace_back(c.name, std::make_unique<Analysis>(c.phi, c.names));
        return v;
    }();
    return all;
}

}  // namespace

TEST_CASE("nonattracting table of the golden map") {
    const auto& a = golden();
    const int ab = orbit(a, "Λ_ab"), cd = orbit(a, "Λ_cd"), ef = orbit(a, "Λ_ef");
    CHECK(a.nonattracting(cd).system == sys(f6(), {{"a", "b", "e", "f"}}));
    CHECK(a.nonattracting(ef).system == sys(f6(), {{"a", "b", "c", "d"}}));
    CHECK(a.nonattracting(ab).system == sys(f6(), {{C, "e", "f"}}));
    CHECK(a.nonattracting_subset({cd, ef}, a.whole()) == sys(f6(), {{"a", "b"}}));
    CHECK(a.polynomial_system() == sys(f6(), {{C}}));
    CHECK(a.nonattracting(ab, sys(f6(), {{"a", "b"}})) == sys(f6(), {{C}}));
    CHECK(a.nonattracting_subset({}, sys(f6(), {{"a", "b"}})) == sys(f6(), {{"a", "b"}}));
    CHECK(a.nonattracting_subset({}, a.whole()) == a.whole());
}

TEST_CASE("nonattracting provenance") {
    const auto& a = golden();
    const auto& n = a.nonattracting(orbit(a, "Λ_ab"));
    CHECK(n.provenance.z_edges == std::vector<int>{4, 5});
    REQUIRE(n.provenance.nielsen_paths.size() == 1);
    CHECK(f6().format(n.provenance.nielsen_paths[0]) == C);
    CHECK(n.provenance.separate_circuits.empty());
    CHECK(n.provenance.nielsen_bound >= 4);

    auto j = provenance_json(a, n);
    CHECK(j["construction"] == "nonattracting");
    CHECK(j["orbit"] == "Λ_ab");
    CHECK(j["Z"] == nlohmann::json::array({"e", "f"}));
    CHECK(j["nielsen_paths"] == nlohmann::json::array({C}));

    auto sj = system_json(n.system, f6());
    REQUIRE(sj["classes"].size() == 1);
    CHECK(sj["classes"][0]["generators"].size() == 3);
}

TEST_CASE("polynomial systems") {
    Analysis id(Automorphism::identity(2), f2());
    CHECK(id.polynomial_system() == id.whole());
    CHECK(id.is_polynomially_growing(f2().parse("a b")));

    Analysis fib(fixtures::fibonacci(), f2());
    auto p = fib.polynomial_system();
    CHECK(p == sys(f2(), {{C}}));
    // Oracle: growth of cyclic lengths under iteration.
    auto phi = fixtures::fibonacci();
    auto commutator = conjugacy_length(phi, f2().parse(C), 20);
    CHECK(*std::max_element(commutator.begin(), commutator.end()) == 4);
    for (const char* g : {"a", "b", "a b"}) {
        auto lens = conjugacy_length(phi, f2().parse(g), 20);
        CHECK(lens.back() > 1000);
        CHECK(!fib.is_polynomially_growing(f2().parse(g)));
    }
    CHECK(fib.is_polynomially_growing(f2().parse("b a b' a'")));
    CHECK(fib.is_polynomially_growing(Word{}));

    CHECK(golden().is_polynomially_growing(f6().parse("b a b' a'")));
    CHECK(!golden().is_polynomially_growing(f6().parse("e")));
}

TEST_CASE("carrying") {
    const auto& a = golden();
    const int ab = orbit(a, "Λ_ab"), ef = orbit(a, "Λ_ef");
    const auto& nab = a.nonattracting(ab).system;
    CHECK(a.carries(nab, ef));
    CHECK(!a.carries(nab, ab));
    for (int o = 0; o < a.orbit_count(); ++o) CHECK(a.carries(a.whole(), o));
    CHECK_THROWS_AS(a.carries(sys(f6(), {{"a"}}), ab), InvarianceRequired);
}

TEST_CASE("free factor supports") {
    const auto& a = golden();
    const int ab = orbit(a, "Λ_ab"), cd = orbit(a, "Λ_cd"), ef = orbit(a, "Λ_ef");
    CHECK(a.free_factor_support({ab, cd, ef}) == a.whole());
    CHECK(a.free_factor_support({ab}) == sys(f6(), {{"a", "b"}}));
    CHECK(a.free_factor_support({ab}, sys(f6(), {{"a", "b"}})) == sys(f6(), {{"a", "b"}}));
    CHECK(a.free_factor_support({cd}) == sys(f6(), {{"a", "b", "c", "d"}}));
    CHECK(a.free_factor_support({ef}) == sys(f6(), {{"a", "b", "e", "f"}}));
    CHECK(a.free_factor_support({}).empty());
}

TEST_CASE("supporting systems of the golden map") {
    const auto& a = golden();
    const int ab = orbit(a, "Λ_ab"), cd = orbit(a, "Λ_cd"), ef = orbit(a, "Λ_ef");

    const auto& sab = a.supporting(ab);
    REQUIRE(sab.stages.size() == 4);
    CHECK(sab.stages[0] == a.whole());
    CHECK(sab.stages[1] == sys(f6(), {{"a", "b"}}));
    CHECK(sab.stages[2] == sys(f6(), {{"a", "b"}}));
    CHECK(sab.system == sys(f6(), {{"a", "b"}}));

    const auto& scd = a.supporting(cd);
    CHECK(scd.stages[1] == sys(f6(), {{"a", "b", "c", "d"}}));
    CHECK(scd.system == sys(f6(), {{"a", "b", "c", "d"}}));

    const auto& sef = a.supporting(ef);
    CHECK(sef.stages[1] == sys(f6(), {{"a", "b", "e", "f"}}));
    CHECK(sef.system == sys(f6(), {{C, "e", "f"}}));

    // Stages only shrink, and the last one carries exactly the orbits below.
    for (int o : {ab, cd, ef}) {
        const auto& s = a.supporting(o);
        for (std::size_t j = 1; j < s.stages.size(); ++j) CHECK(is_below(s.stages[j], s.stages[j - 1]));
        CHECK(a.carried_orbits(s.system) == a.down_set(o));
    }
}

TEST_CASE("order isomorphisms and nonattracting invariants on curated maps") {
    for (const auto& [name, ap] : curated()) {
        CAPTURE(name);
        const Analysis& a = *ap;
        const int n = a.orbit_count();
        const auto p = a.polynomial_system();
        for (int x = 0; x < n; ++x) {
            const auto& nx = a.nonattracting(x).system;
            CHECK(is_invariant(a.automorphism(), nx).invariant);
            CHECK(is_malnormal_system(nx));
            CHECK(is_below(p, nx));
            CHECK(nx != a.whole());
            for (int y = 0; y < n; ++y) {
                CAPTURE(x);
                CAPTURE(y);
                const bool nested = a.poset().below_or_equal(x, y);
                // Containment of orbits matches containment of nonattracting systems.
                CHECK(nested == is_below(nx, a.nonattracting(y).system));
                // A nonattracting system carries exactly the orbits not containing its own.
                CHECK(a.carries(nx, y) == !nested);
                CHECK(nested == is_below(a.supporting(x).system, a.supporting(y).system));
            }
            bool maximal = true;
            for (int y = 0; y < n; ++y) maximal &= !a.poset().contains(y, x);
            if (maximal) {
                std::vector<int> others;
                for (int y = 0; y < n; ++y)
                    if (y != x) others.push_back(y);
                CHECK(a.carried_orbits(nx) == others);
            }
        }
        if (n == 0) CHECK(p == a.whole());
    }
}

TEST_CASE("restricted nonattracting systems keep the order") {
    const auto& a = golden();
    const auto ambient = sys(f6(), {{"a", "b", "c", "d"}});
    REQUIRE(is_invariant(a.automorphism(), ambient).invariant);
    const auto inside = a.carried_orbits(ambient);
    CHECK(inside.size() == 2);
    for (int x : inside) {
        CHECK(a.nonattracting(x, ambient) != ambient);
        for (int y : inside)
            CHECK(a.poset().below_or_equal(x, y) == is_below(a.nonattracting(x, ambient), a.nonattracting(y, ambient)));
    }
    CHECK(a.nonattracting(orbit(a, "Λ_ab"), ambient) == sys(f6(), {{C}}));
    CHECK(a.nonattracting(orbit(a, "Λ_cd"), ambient) == sys(f6(), {{"a", "b"}}));
}

TEST_CASE("pairing with the inverse automorphism") {
    {
        Analysis minus(invert(fixtures::golden()), f6());
        auto rep = pairing_check(golden(), minus);
        CHECK(rep.plus_count == 3);
        CHECK(rep.minus_count == 3);
        CHECK(rep.pairs.size() == 3);
        for (auto [i, j] : rep.pairs) CHECK(golden().poset().orbits[i].name == minus.poset().orbits[j].name);
        CHECK(rep.nonattracting_equal);
        CHECK(rep.supporting_equal);
        CHECK(rep.order_isomorphic);
    }
    {
        Analysis plus(fixtures::fibonacci(), f2()), minus(invert(fixtures::fibonacci()), f2());
        auto rep = pairing_check(plus, minus);
        CHECK(rep.pairs.size() == 1);
        CHECK(rep.nonattracting_equal);
        CHECK(plus.nonattracting(0).system == minus.nonattracting(0).system);
    }
    {
        Analysis plus(Automorphism::identity(2), f2()), minus(Automorphism::identity(2), f2());
        auto rep = pairing_check(plus, minus);
        CHECK(rep.pairs.empty());
        CHECK(rep.plus_count == 0);
    }
}

TEST_CASE("powers give the same nonattracting systems") {
    for (int m = 2; m <= 3; ++m) {
        Analysis a(power(fixtures::golden(), m), f6());
        for (const std::string name : {"Λ_ab", "Λ_cd", "Λ_ef"})
            CHECK(a.nonattracting(orbit(a, name)).system == golden().nonattracting(orbit(golden(), name)).system);
        CHECK(a.polynomial_system() == golden().polynomial_system());
    }
}
