#include "lamina/word.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "lamina/stallings.hpp"

namespace lamina {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw InputError("alphabet must have at least one generator");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty() || n.find_first_of(" \t'-") != std::string::npos)
            throw InputError("bad generator name '" + n + "'");
        if (!seen.insert(n).second) throw InputError("duplicate generator name '" + n + "'");
    }
}

Alphabet Alphabet::standard(int rank) {
    std::vector<std::string> names;
    for (int i = 0; i < rank; ++i) {
        if (rank <= 26)
            names.emplace_back(1, static_cast<char>('a' + i));
        else
            names.push_back("x" + std::to_string(i));
    }
    return Alphabet(std::move(names));
}

int Alphabet::index(std::string_view name) const {
    for (int i = 0; i < rank(); ++i)
        if (names_[i] == name) return i;
    return -1;
}

Word Alphabet::parse(std::string_view text) const {
    Word raw;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        bool inv = false;
        if (tok[0] == '-') {
            inv = true;
            tok.erase(0, 1);
        }
        if (!tok.empty() && tok.back() == '\'') {
            inv = !inv;
            tok.pop_back();
        }
        if (tok == "1") continue;
        int g = index(tok);
        if (g < 0) throw InputError("unknown generator '" + tok + "'");
        raw.push_back(inv ? -(g + 1) : g + 1);
    }
    return reduce(raw);
}

std::string Alphabet::format(const Word& w) const {
    std::string out;
    for (Letter l : w) {
        if (!out.empty()) out += ' ';
        out += name(gen_of(l));
        if (l < 0) out += '\'';
    }
    return out;
}

Word reduce(const Word& raw, int rank) {
    Word out;
    out.reserve(raw.size());
    for (Letter l : raw) {
        if (l == 0 || (rank >= 0 && gen_of(l) >= rank))
            throw InputError("letter out of alphabet range: " + std::to_string(l));
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

bool is_reduced(const Word& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] == -w[i - 1]) return false;
    return true;
}

Word inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (auto& l : out) l = -l;
    return out;
}

Word mul(const Word& u, const Word& v) {
    std::size_t k = 0;
    while (k < u.size() && k < v.size() && u[u.size() - 1 - k] == -v[k]) ++k;
    Word out(u.begin(), u.end() - static_cast<std::ptrdiff_t>(k));
    out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return out;
}

Word mul(std::initializer_list<Word> parts) {
    Word out;
    for (const auto& p : parts) out = mul(out, p);
    return out;
}

Word power(const Word& w, int n) {
    Word base = n < 0 ? inverse(w) : w;
    Word out;
    for (int i = 0; i < std::abs(n); ++i) out = mul(out, base);
    return out;
}

CyclicReduction cyclic_reduce(const Word& w) {
    std::size_t i = 0, j = w.size();
    while (j - i >= 2 && w[i] == -w[j - 1]) {
        ++i;
        --j;
    }
    return {Word(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(j)),
            Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i))};
}

std::size_t cyclic_length(const Word& w) { return cyclic_reduce(w).cyclic.size(); }

bool lex_less(const Word& u, const Word& v) {
    return std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end(),
                                        [](Letter x, Letter y) { return letter_key(x) < letter_key(y); });
}

bool shortlex_less(const Word& u, const Word& v) {
    if (u.size() != v.size()) return u.size() < v.size();
    return lex_less(u, v);
}

Word canonical_cyclic(const Word& w) {
    Word c = cyclic_reduce(w).cyclic;
    const std::size_t n = c.size();
    if (n < 2) return c;
    // Two-pointer minimum rotation.
    std::size_t i = 0, j = 1, k = 0;
    while (i < n && j < n && k < n) {
        int x = letter_key(c[(i + k) % n]), y = letter_key(c[(j + k) % n]);
        if (x == y) {
            ++k;
            continue;
        }
        if (x > y)
            i += k + 1;
        else
            j += k + 1;
        if (i == j) ++j;
        k = 0;
    }
    k = std::min(i, j);
    Word out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c[(k + i) % n];
    return out;
}

Automorphism::Automorphism(int rank, std::vector<Word> images) : rank_(rank), images_(std::move(images)) {
    if (rank_ < 1) throw InputError("rank must be positive");
    if (static_cast<int>(images_.size()) != rank_) throw InputError("need one image per generator");
    for (auto& im : images_) {
        im = reduce(im, rank_);
        if (im.empty()) throw NotAnAutomorphism("a generator maps to the trivial word");
    }
}

Automorphism Automorphism::identity(int rank) {
    std::vector<Word> ims;
    for (int i = 0; i < rank; ++i) ims.push_back({i + 1});
    return Automorphism(rank, std::move(ims));
}

Word Automorphism::apply(const Word& w) const {
    Word out;
    for (Letter l : w) {
        int g = gen_of(l);
        if (g >= rank_) throw InputError("alphabet mismatch in apply");
        const Word& im = images_[g];
        auto push = [&out](Letter x) {
            if (!out.empty() && out.back() == -x)
                out.pop_back();
            else
                out.push_back(x);
        };
        if (l > 0)
            for (Letter x : im) push(x);
        else
            for (auto it = im.rbegin(); it != im.rend(); ++it) push(-*it);
    }
    return out;
}

std::size_t Automorphism::max_image_length() const {
    std::size_t m = 0;
    for (const auto& im : images_) m = std::max(m, im.size());
    return m;
}

Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
    if (phi.rank() != psi.rank()) throw InputError("alphabet mismatch in compose");
    std::vector<Word> ims;
    for (const auto& im : psi.images()) ims.push_back(phi.apply(im));
    return Automorphism(phi.rank(), std::move(ims));
}

Automorphism invert(const Automorphism& phi) {
    std::vector<Word> ims;
    for (int g = 0; g < phi.rank(); ++g) {
        auto expr = express_in_generators(phi.images(), Word{g + 1});
        if (!expr) throw NotAnAutomorphism("generator " + std::to_string(g) + " is not in the image");
        ims.push_back(*expr);
    }
    Automorphism inv(phi.rank(), std::move(ims));
    // Surjective endomorphisms of finitely generated free groups are injective, so
    // a failure here means the images did not generate.
    if (!(compose(phi, inv) == Automorphism::identity(phi.rank())))
        throw NotAnAutomorphism("inverse check failed");
    return inv;
}

Automorphism power(const Automorphism& phi, int n) {
    Automorphism base = n < 0 ? invert(phi) : phi;
    Automorphism out = Automorphism::identity(phi.rank());
    for (int i = 0; i < std::abs(n); ++i) out = compose(base, out);
    return out;
}

Automorphism conjugate_after(const Automorphism& phi, const Word& w) {
    std::vector<Word> ims;
    for (const auto& im : phi.images()) ims.push_back(mul({w, im, inverse(w)}));
    return Automorphism(phi.rank(), std::move(ims));
}

std::vector<std::size_t> conjugacy_length(const Automorphism& phi, const Word& g, int n) {
    std::vector<std::size_t> out;
    Word cur = cyclic_reduce(reduce(g)).cyclic;
    for (int k = 0; k <= n; ++k) {
        out.push_back(cur.size());
        if (k < n) cur = cyclic_reduce(phi.apply(cur)).cyclic;
    }
    return out;
}

}  // namespace lamina
