#include <random>

#include "doctest.h"
#include "lamina/word.hpp"
#include "support.hpp"

using namespace lamina;
using fixtures::f2;
using fixtures::f6;

namespace {

// Repeated single-pass cancellation until nothing changes.
Word slow_reduce(Word w) {
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
            if (w[i] == -w[i + 1]) {
                w.erase(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i) + 2);
                changed = true;
                break;
            }
    }
    return w;
}

// Least rotation by trying all of them.
Word slow_least_rotation(const Word& c) {
    Word best = c;
    for (std::size_t r = 1; r < c.size(); ++r) {
        Word rot(c.begin() + static_cast<long>(r), c.end());
        rot.insert(rot.end(), c.begin(), c.begin() + static_cast<long>(r));
        if (lex_less(rot, best)) best = rot;
    }
    return best;
}

}  // namespace

TEST_CASE("reduce examples") {
    CHECK(f6().format(reduce(f6().parse("a b b' c"))) == "a c");
    CHECK(reduce(Word{}).empty());
    Word raw{1, 2, -1, 1, -2};
    CHECK(reduce(raw) == slow_reduce(raw));
    CHECK(f6().format(reduce(raw)) == "a");
    CHECK_THROWS_AS(reduce(Word{1, 9}, 6), InputError);
}

TEST_CASE("parse accepts both inverse markers") {
    CHECK(f6().parse("a' -b c") == Word{-1, -2, 3});
    CHECK(f6().format(Word{-1, 2}) == "a' b");
    CHECK_THROWS_AS(f6().parse("a z"), InputError);
}

TEST_CASE("cyclic_reduce examples") {
    auto r = cyclic_reduce(f6().parse("b a b'"));
    CHECK(f6().format(r.cyclic) == "a");
    CHECK(f6().format(r.conjugator) == "b");
    r = cyclic_reduce(f6().parse("a b a' b'"));
    CHECK(f6().format(r.cyclic) == "a b a' b'");
    CHECK(r.conjugator.empty());
    r = cyclic_reduce(f6().parse("a' b a"));
    CHECK(f6().format(r.cyclic) == "b");
    CHECK(f6().format(r.conjugator) == "a'");
}

TEST_CASE("apply examples") {
    auto phi = fixtures::golden();
    CHECK(f6().format(phi.apply(f6().parse("a"))) == "a b");
    CHECK(f6().format(phi.apply(f6().parse("a b a' b'"))) == "a b a' b'");
    auto id = Automorphism::identity(6);
    Word w = f6().parse("c a' e f'");
    CHECK(id.apply(w) == w);
}

TEST_CASE("compose and invert examples") {
    auto fib = fixtures::fibonacci();
    auto sq = compose(fib, fib);
    // Oracle: apply twice on each generator.
    for (int g = 0; g < 2; ++g) CHECK(sq.image(g) == fib.apply(fib.apply(Word{g + 1})));
    CHECK(f2().format(sq.image(0)) == "a b a");
    CHECK(f2().format(sq.image(1)) == "a b");
    CHECK(compose(fib, Automorphism::identity(2)) == fib);

    auto inv = invert(fib);
    CHECK(f2().format(inv.image(0)) == "b");
    CHECK(f2().format(inv.image(1)) == "b' a");
    CHECK(compose(fib, inv) == Automorphism::identity(2));
    CHECK(compose(inv, fib) == Automorphism::identity(2));
    CHECK(invert(Automorphism::identity(3)) == Automorphism::identity(3));
    CHECK_THROWS_AS(invert(fixtures::make(f2(), {"a a", "b"})), NotAnAutomorphism);
    CHECK_THROWS_AS(invert(fixtures::make(f2(), {"a b a'", "b"})), NotAnAutomorphism);
}

TEST_CASE("conjugacy_length examples") {
    auto phi = fixtures::golden();
    auto seq = conjugacy_length(phi, f6().parse("a b a' b'"), 6);
    CHECK(seq == std::vector<std::size_t>(7, 4));
    auto id = Automorphism::identity(6);
    CHECK(conjugacy_length(id, f6().parse("b a b'"), 3) == std::vector<std::size_t>{1, 1, 1, 1});
    // Oracle: direct iteration and cyclic reduction.
    Word cur = f6().parse("a");
    std::vector<std::size_t> expect;
    for (int k = 0; k <= 4; ++k) {
        expect.push_back(cyclic_reduce(cur).cyclic.size());
        cur = phi.apply(cur);
    }
    CHECK(conjugacy_length(phi, f6().parse("a"), 4) == expect);
    CHECK(expect[0] == 1);
    CHECK(expect[1] == 2);
    CHECK(expect[2] == 5);
    CHECK(expect[3] == 13);
}

TEST_CASE("canonical cyclic word is the least rotation") {
    std::mt19937 rng(7);
    for (int t = 0; t < 300; ++t) {
        Word w = reduce(fixtures::random_word(rng, 3, 12));
        Word c = cyclic_reduce(w).cyclic;
        CHECK(canonical_cyclic(w) == slow_least_rotation(c));
    }
}

TEST_CASE("word laws on random inputs") {
    std::mt19937 rng(11);
    for (int t = 0; t < 300; ++t) {
        Word w = fixtures::random_word(rng, 4, 20);
        Word r = reduce(w);
        CHECK(r == slow_reduce(w));
        CHECK(reduce(r) == r);
        CHECK(reduce([&] {
                  Word x = r;
                  Word y = inverse(r);
                  x.insert(x.end(), y.begin(), y.end());
                  return x;
              }())
                  .empty());
        auto cr = cyclic_reduce(r);
        CHECK(cr.cyclic.size() <= r.size());
        CHECK(mul({cr.conjugator, cr.cyclic, inverse(cr.conjugator)}) == r);
    }
}

TEST_CASE("automorphism laws on random inputs") {
    std::mt19937 rng(13);
    for (int t = 0; t < 60; ++t) {
        auto phi = fixtures::random_automorphism(rng, 3, 6);
        auto psi = fixtures::random_automorphism(rng, 3, 6);
        auto inv = invert(phi);
        CHECK(compose(phi, inv) == Automorphism::identity(3));
        for (int s = 0; s < 5; ++s) {
            Word u = reduce(fixtures::random_word(rng, 3, 8));
            Word v = reduce(fixtures::random_word(rng, 3, 8));
            CHECK(phi.apply(mul(u, v)) == mul(phi.apply(u), phi.apply(v)));
            CHECK(compose(phi, psi).apply(u) == phi.apply(psi.apply(u)));
            CHECK(inv.apply(phi.apply(u)) == u);
        }
    }
}
