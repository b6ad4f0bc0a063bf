#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lamina {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct NotAnAutomorphism : Error {
    using Error::Error;
};

// Generator i is the letter i+1, its inverse -(i+1).
using Letter = int;
using Word = std::vector<Letter>;

inline int gen_of(Letter l) { return (l > 0 ? l : -l) - 1; }
// Fixed letter order: a < a' < b < b' < ...
inline int letter_key(Letter l) { return 2 * gen_of(l) + (l < 0 ? 1 : 0); }
inline Letter key_letter(int key) { return (key % 2 == 0) ? key / 2 + 1 : -(key / 2 + 1); }

class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> names);
    static Alphabet standard(int rank);

    int rank() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int gen) const { return names_.at(gen); }
    int index(std::string_view name) const;  // -1 when unknown

    Word parse(std::string_view text) const;
    std::string format(const Word& w) const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<std::string> names_;
};

Word reduce(const Word& raw, int rank = -1);
Word inverse(const Word& w);
Word mul(const Word& u, const Word& v);
Word mul(std::initializer_list<Word> parts);
Word power(const Word& w, int n);
bool is_reduced(const Word& w);

struct CyclicReduction {
    Word cyclic;
    Word conjugator;  // input = conjugator * cyclic * conjugator^-1
};
CyclicReduction cyclic_reduce(const Word& w);
// Least rotation of the cyclic reduction under the letter order.
Word canonical_cyclic(const Word& w);
std::size_t cyclic_length(const Word& w);
bool lex_less(const Word& u, const Word& v);
// Shortlex: shorter first, then letter order.
bool shortlex_less(const Word& u, const Word& v);

class Automorphism {
public:
    Automorphism() = default;
    Automorphism(int rank, std::vector<Word> images);
    static Automorphism identity(int rank);

    int rank() const { return rank_; }
    const std::vector<Word>& images() const { return images_; }
    const Word& image(int gen) const { return images_.at(gen); }

    Word apply(const Word& w) const;
    std::size_t max_image_length() const;

    bool operator==(const Automorphism&) const = default;

private:
    int rank_ = 0;
    std::vector<Word> images_;
};

// (phi o psi)(g) = phi(psi(g))
Automorphism compose(const Automorphism& phi, const Automorphism& psi);
Automorphism invert(const Automorphism& phi);
Automorphism power(const Automorphism& phi, int n);
// Conjugation by w composed after phi: g -> w phi(g) w^-1.
Automorphism conjugate_after(const Automorphism& phi, const Word& w);

std::vector<std::size_t> conjugacy_length(const Automorphism& phi, const Word& g, int n);

}  // namespace lamina
