#pragma once

#include <random>
#include <string>
#include <vector>

#include "lamina/word.hpp"

namespace fixtures {

inline const lamina::Alphabet& f6() {
    static const lamina::Alphabet a({"a", "b", "c", "d", "e", "f"});
    return a;
}
inline const lamina::Alphabet& f2() {
    static const lamina::Alphabet a({"a", "b"});
    return a;
}

inline lamina::Automorphism make(const lamina::Alphabet& al, const std::vector<std::string>& images) {
    std::vector<lamina::Word> ims;
    for (const auto& s : images) ims.push_back(al.parse(s));
    return lamina::Automorphism(al.rank(), ims);
}

// The three-stratum map with nesting between the {a,b} and {c,d} strata.
inline lamina::Automorphism golden() {
    return make(f6(), {"a b", "b a b", "b c d", "d c d", "a b a' b' e f", "f e f"});
}
inline lamina::Automorphism fibonacci() { return make(f2(), {"a b", "a"}); }
inline lamina::Automorphism unipotent() { return make(f2(), {"a", "b a"}); }

inline const lamina::Alphabet& f4() {
    static const lamina::Alphabet a({"a", "b", "c", "d"});
    return a;
}
// Fibonacci on <a,b> next to a unipotent map on <c,d>.
inline lamina::Automorphism fibonacci_plus_unipotent() { return make(f4(), {"a b", "a", "c", "d c"}); }
// Swaps the two halves; its square is Fibonacci on each half.
inline lamina::Automorphism stratum_permuting() { return make(f4(), {"c", "d", "a b", "a"}); }

struct Curated {
    std::string name;
    lamina::Automorphism phi;
    lamina::Alphabet names;
};
inline std::vector<Curated> curated() {
    return {
        {"golden", golden(), f6()},
        {"identity", lamina::Automorphism::identity(2), f2()},
        {"unipotent", unipotent(), f2()},
        {"fibonacci", fibonacci(), f2()},
        {"fibonacci+unipotent", fibonacci_plus_unipotent(), f4()},
        {"stratum-permuting", stratum_permuting(), f4()},
    };
}

inline lamina::Word random_word(std::mt19937& rng, int rank, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len), gen(1, rank), sign(0, 1);
    lamina::Word w;
    int n = len(rng);
    for (int i = 0; i < n; ++i) w.push_back(sign(rng) ? gen(rng) : -gen(rng));
    return w;
}

// Random automorphism as a product of elementary Nielsen moves.
inline lamina::Automorphism random_automorphism(std::mt19937& rng, int rank, int moves) {
    std::vector<lamina::Word> ims;
    for (int i = 0; i < rank; ++i) ims.push_back({i + 1});
    std::uniform_int_distribution<int> pick(0, rank - 1), kind(0, 2);
    for (int m = 0; m < moves; ++m) {
        int i = pick(rng), j = pick(rng);
        switch (kind(rng)) {
            case 0: ims[i] = lamina::inverse(ims[i]); break;
            case 1:
                if (i != j) ims[i] = lamina::mul(ims[i], ims[j]);
                break;
            default:
                if (i != j) ims[i] = lamina::mul(ims[j], ims[i]);
                break;
        }
    }
    return lamina::Automorphism(rank, ims);
}

}  // namespace fixtures
