#include <random>
#include <set>

#include "doctest.h"
#include "lamina/stallings.hpp"
#include "support.hpp"

using namespace lamina;
using fixtures::f2;
using fixtures::f6;

namespace {

SubgroupClass cls(const Alphabet& al, std::vector<std::string> gens) {
    std::vector<Word> ws;
    for (auto& g : gens) ws.push_back(al.parse(g));
    return SubgroupClass::from_generators(al.rank(), ws);
}

SubgroupSystem sys(const Alphabet& al, std::vector<std::vector<std::string>> classes) {
    std::vector<SubgroupClass> cs;
    for (auto& c : classes) cs.push_back(cls(al, c));
    return SubgroupSystem(al.rank(), cs);
}

}  // namespace

TEST_CASE("core_from_generators examples") {
    auto rose = core_from_generators(6, {f6().parse("a"), f6().parse("b")});
    CHECK(rose.num_vertices() == 1);
    CHECK(rose.num_edges() == 2);
    auto g = core_from_generators(6, {f6().parse("a b a' b'"), f6().parse("e"), f6().parse("f")});
    CHECK(g.num_vertices() == 4);
    CHECK(g.num_edges() == 6);
    CHECK(g.rank() == 3);
    auto petal = core_from_generators(6, {f6().parse("a"), f6().parse("a'")});
    CHECK(petal.num_vertices() == 1);
    CHECK(petal.num_edges() == 1);
    CHECK_THROWS_AS(core_from_generators(6, {Word{}}), EmptySubgroup);
}

TEST_CASE("folding is independent of generator order") {
    std::mt19937 rng(3);
    for (int t = 0; t < 100; ++t) {
        std::vector<Word> gens;
        for (int i = 0; i < 3; ++i) gens.push_back(reduce(fixtures::random_word(rng, 3, 6)));
        bool nontrivial = false;
        for (auto& g : gens) nontrivial |= !g.empty();
        if (!nontrivial) continue;
        auto shuffled = gens;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        shuffled[0] = inverse(shuffled[0]);
        CHECK(canonical_numbering(core_from_generators(3, gens)).code ==
              canonical_numbering(core_from_generators(3, shuffled)).code);
    }
}

TEST_CASE("membership examples") {
    auto ab = core_from_generators(6, {f6().parse("a"), f6().parse("b")});
    CHECK(membership(ab, f6().parse("a b a b")).member);
    CHECK_FALSE(membership(ab, f6().parse("c")).member);
    auto n = core_from_generators(6, {f6().parse("a b a' b'"), f6().parse("e"), f6().parse("f")});
    // e and the commutator are both generators, so their conjugate is a basepoint loop.
    CHECK(membership(n, f6().parse("e a b a' b' e'")).member);
    CHECK_FALSE(membership(n, f6().parse("c a b a' b' c'")).member);
    CHECK_FALSE(membership(n, f6().parse("a")).member);
    CHECK(membership(n, f6().parse("e f a b a' b' f'")).member);
}

TEST_CASE("membership witness rebuilds the word from the tree basis") {
    std::mt19937 rng(5);
    for (int t = 0; t < 100; ++t) {
        std::vector<Word> gens;
        for (int i = 0; i < 3; ++i) gens.push_back(reduce(fixtures::random_word(rng, 3, 5)));
        if (gens[0].empty()) gens[0] = {1};
        auto g = core_from_generators(3, gens);
        auto basis = g.basis(g.base());
        // Products of the generators are members; evaluate the witness back.
        Word w;
        std::uniform_int_distribution<int> pick(0, 2), sign(0, 1);
        for (int k = 0; k < 4; ++k) {
            Word x = gens[pick(rng)];
            w = mul(w, sign(rng) ? x : inverse(x));
        }
        auto m = membership(g, w);
        REQUIRE(m.member);
        Word back;
        for (Letter l : m.witness) back = mul(back, l > 0 ? basis[l - 1] : inverse(basis[-l - 1]));
        CHECK(back == w);
        // Tracked expression over the original generators.
        auto e = express_in_generators(gens, w);
        REQUIRE(e.has_value());
        Word again;
        for (Letter l : *e) again = mul(again, l > 0 ? gens[l - 1] : inverse(gens[-l - 1]));
        CHECK(again == w);
    }
}

TEST_CASE("meet_pair examples") {
    auto m = meet_pair(cls(f6(), {"a", "b", "e", "f"}), cls(f6(), {"a", "b", "c", "d"}));
    REQUIRE(m.size() == 1);
    CHECK(m[0] == cls(f6(), {"a", "b"}));
    CHECK(meet_pair(cls(f6(), {"a"}), cls(f6(), {"b"})).empty());
    auto a = cls(f2(), {"a b", "b a a"});
    auto self = meet_pair(a, a);
    CHECK(std::find(self.begin(), self.end(), a) != self.end());
}

TEST_CASE("system_meet and is_below examples") {
    auto n_ab = sys(f6(), {{"a b a' b'", "e", "f"}});
    auto ab = sys(f6(), {{"a", "b"}});
    CHECK(system_meet(n_ab, ab) == sys(f6(), {{"a b a' b'"}}));
    CHECK(system_meet(ab, ab) == ab);
    CHECK(system_meet(n_ab, SubgroupSystem::whole(6)) == n_ab);
    CHECK(is_below(sys(f6(), {{"a b a' b'"}}), ab));
    CHECK_FALSE(is_below(sys(f6(), {{"c"}}), ab));
    CHECK(is_below(n_ab, n_ab));
}

TEST_CASE("malnormality examples") {
    // Oracle: no off-diagonal noncontractible fiber-product component, checked by hand
    // for the rank-one cases and by conjugate enumeration for the free factor.
    CHECK(is_malnormal_system(sys(f6(), {{"a", "b", "e", "f"}})));
    CHECK_FALSE(is_malnormal_system(sys(f6(), {{"a a"}})));
    CHECK(is_malnormal_system(sys(f6(), {{"a"}, {"b"}})));
    CHECK_FALSE(is_malnormal_system(sys(f2(), {{"a", "b a b'"}})));
}

TEST_CASE("invariance examples") {
    auto phi = fixtures::golden();
    auto inv = is_invariant(phi, sys(f6(), {{"a", "b"}}));
    REQUIRE(inv.invariant);
    REQUIRE(inv.orbits.size() == 1);
    CHECK(inv.orbits[0].k == 1);
    CHECK(inv.orbits[0].x.empty());
    inv = is_invariant(phi, sys(f6(), {{"a b a' b'"}}));
    REQUIRE(inv.invariant);
    CHECK(inv.orbits[0].k == 1);
    CHECK(inv.orbits[0].x.empty());
    inv = is_invariant(Automorphism::identity(6), sys(f6(), {{"c e"}, {"a b"}}));
    CHECK(inv.invariant);
    for (auto& o : inv.orbits) CHECK(o.k == 1);
    CHECK_FALSE(is_invariant(phi, sys(f6(), {{"c"}})).invariant);
}

TEST_CASE("conjugator satisfies the defining equation") {
    std::mt19937 rng(17);
    int checked = 0;
    for (int t = 0; t < 80; ++t) {
        std::vector<Word> gens;
        for (int i = 0; i < 2; ++i) gens.push_back(reduce(fixtures::random_word(rng, 3, 5)));
        if (gens[0].empty() && gens[1].empty()) continue;
        auto a = SubgroupClass::from_generators(3, gens);
        // Psi = (conjugation by c) o theta where theta fixes the based representative
        // pointwise only when theta is the identity; use the identity so the expected
        // coset is A c^-1.
        Word c = reduce(fixtures::random_word(rng, 3, 6));
        auto psi = conjugate_after(Automorphism::identity(3), c);
        auto x = invariance_conjugator(psi, a);
        REQUIRE(x.has_value());
        std::vector<Word> ims;
        for (auto& g : a.generators()) ims.push_back(mul({*x, psi.apply(g), inverse(*x)}));
        CHECK(canonical_numbering(core_from_generators(3, ims)).code == canonical_numbering(a.based()).code);
        CHECK(coset_representative(a, *x) == *x);
        ++checked;
    }
    CHECK(checked > 40);
}

TEST_CASE("restriction examples") {
    auto ab = cls(f6(), {"a", "b"});
    auto r = restriction(sys(f6(), {{"a b a' b'", "e", "f"}}), ab);
    REQUIRE(r.size() == 1);
    CHECK(r.alphabet_rank() == 2);
    // Oracle: rewrite aba'b' through the membership witness in <a,b>; basis is a, b.
    auto expect = SubgroupClass::from_generators(2, {f2().parse("a b a' b'")});
    CHECK(r.classes()[0] == expect);
    auto whole = restriction(SubgroupSystem::whole(6), ab);
    CHECK(whole == SubgroupSystem::whole(2));
    CHECK(restriction(sys(f6(), {{"c"}}), ab).empty());
}

TEST_CASE("coset_intersection examples") {
    auto a = core_from_generators(6, {f6().parse("a")});
    auto b = core_from_generators(6, {f6().parse("b")});
    auto r = coset_intersection(a, f6().parse("b"), b, f6().parse("b"));
    CHECK(r.nonempty);
    CHECK(f6().format(r.witness) == "b");
    CHECK_FALSE(coset_intersection(a, Word{}, b, f6().parse("c")).nonempty);
    auto ab = core_from_generators(6, {f6().parse("a"), f6().parse("b")});
    auto comm = core_from_generators(6, {f6().parse("a b a' b'")});
    auto r2 = coset_intersection(ab, f6().parse("c"), comm, f6().parse("a b a' b' c"));
    CHECK(r2.nonempty);
    CHECK(membership(ab, mul(r2.witness, inverse(f6().parse("c")))).member);
    CHECK(membership(comm, mul(r2.witness, inverse(f6().parse("a b a' b' c")))).member);
}

TEST_CASE("meet is the greatest lower bound on random rank <= 3 systems") {
    std::mt19937 rng(23);
    for (int t = 0; t < 20; ++t) {
        auto rand_class = [&] {
            std::uniform_int_distribution<int> k(1, 3);
            std::vector<Word> gens;
            int n = k(rng);
            while (static_cast<int>(gens.size()) < n) {
                Word w = reduce(fixtures::random_word(rng, 2, 5));
                if (!w.empty()) gens.push_back(w);
            }
            return SubgroupClass::from_generators(2, gens);
        };
        SubgroupSystem a(2, {rand_class()}), b(2, {rand_class()});
        auto m = system_meet(a, b);
        CHECK(is_below(m, a));
        CHECK(is_below(m, b));
        CHECK(system_meet(b, a) == m);
        CHECK(system_meet(a, a) == a);
    }
}
