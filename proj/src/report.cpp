#include "lamina/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace lamina {

namespace {

struct Token {
    int column;  // 1-based
    std::string text;
};

std::vector<Token> split(const std::string& line, std::size_t from) {
    std::vector<Token> out;
    std::size_t i = from;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        out.push_back({static_cast<int>(i) + 1, line.substr(i, j - i)});
        i = j;
    }
    return out;
}

bool valid_name(const std::string& s) {
    if (s.empty() || s == "1") return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (static_cast<unsigned char>(c) & 0x80);
    });
}

// Source lines with comments stripped; blank lines dropped.
std::vector<std::pair<int, std::string>> content_lines(std::string_view text) {
    std::vector<std::pair<int, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        out.emplace_back(n, line);
    }
    return out;
}

// "key=value" or "key = value"; returns the column just past '=' or npos.
std::size_t after_key(const std::string& line, std::size_t start, std::string_view key, char sep) {
    if (line.compare(start, key.size(), key) != 0) return std::string::npos;
    std::size_t i = start + key.size();
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i < line.size() && line[i] == sep) return i + 1;
    return std::string::npos;
}

int parse_int(const Token& t, int line, const char* what) {
    try {
        std::size_t used = 0;
        int v = std::stoi(t.text, &used);
        if (used == t.text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(line, t.column, std::string("expected an integer for ") + what + ", found '" + t.text + "'");
}

Word parse_image(const std::vector<Token>& toks, const Alphabet& names, int line) {
    Word raw;
    for (const auto& t : toks) {
        std::string s = t.text;
        bool inv = false;
        if (s == "1") continue;
        if (s.size() > 3 && s.compare(s.size() - 3, 3, "^-1") == 0) {
            inv = true;
            s.resize(s.size() - 3);
        } else if (s.size() > 1 && s.back() == '\'') {
            inv = true;
            s.pop_back();
        }
        const int g = names.index(s);
        if (g < 0) throw ParseError(line, t.column, "unknown generator in image: '" + t.text + "'");
        raw.push_back(inv ? -(g + 1) : g + 1);
    }
    return reduce(raw);
}

nlohmann::json names_of(const std::vector<int>& edges, const Alphabet& names) {
    nlohmann::json j = nlohmann::json::array();
    for (int e : edges) j.push_back(names.name(e));
    return j;
}

std::string orbit_name(const Analysis& a, int o) { return a.poset().orbits.at(static_cast<std::size_t>(o)).name; }

nlohmann::json input_json(const InputSpec& in) {
    nlohmann::json j;
    j["rank"] = in.phi.rank();
    j["names"] = in.names.names();
    nlohmann::json phi = nlohmann::json::array();
    for (int g = 0; g < in.phi.rank(); ++g) phi.push_back({{"generator", in.names.name(g)}, {"image", in.names.format(in.phi.image(g))}});
    j["phi"] = phi;
    if (in.filtration) {
        nlohmann::json f = nlohmann::json::array();
        for (const auto& s : in.filtration->strata) f.push_back(names_of(s, in.names));
        j["filtration"] = f;
    } else {
        j["filtration"] = nullptr;
    }
    return j;
}

nlohmann::json strata_json(const GraphMap& f, const Filtration& filt, const Alphabet& names) {
    nlohmann::json out = nlohmann::json::array();
    const auto strata = transition_data(f, filt);
    const auto rtt = check_rtt(f, filt);
    for (std::size_t r = 0; r < strata.size(); ++r) {
        const auto& s = strata[r];
        nlohmann::json j;
        j["index"] = r;
        j["edges"] = names_of(s.edges, names);
        j["kind"] = to_string(s.kind);
        j["matrix"] = s.matrix;
        j["lambda"] = s.lambda;
        for (const auto& rep : rtt.strata)
            if (rep.stratum == static_cast<int>(r)) {
                j["rtt"] = {{"direction_preserving", rep.direction_preserving},
                            {"direction_failures", names_of(rep.direction_failures, names)},
                            {"images_legal", rep.images_legal},
                            {"lower_paths_nontrivial", rep.lower_paths_nontrivial}};
            }
        out.push_back(j);
    }
    return out;
}

nlohmann::json named_poset_json(const Analysis& a) {
    auto j = poset_json(a.poset());
    nlohmann::json nest = nlohmann::json::array();
    for (auto [x, y] : a.poset().nesting) nest.push_back({{"inner", orbit_name(a, x)}, {"outer", orbit_name(a, y)}});
    j["nesting"] = nest;
    nlohmann::json lams = nlohmann::json::array();
    for (const auto& o : a.poset().orbits)
        lams.push_back({{"name", o.name},
                        {"stratum", o.stratum},
                        {"lambda", o.lambda},
                        {"approximating_element", a.names().format(o.approx.g)},
                        {"exponent", o.approx.exponent}});
    j["laminations"] = lams;
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : a.levels()) {
        nlohmann::json lv = nlohmann::json::array();
        for (int o : l) lv.push_back(orbit_name(a, o));
        levels.push_back(lv);
    }
    j["levels"] = levels;
    return j;
}

nlohmann::json subsystems_json(const Analysis& a) {
    nlohmann::json j;
    j["polynomial"] = system_json(a.polynomial_system(), a.names());
    nlohmann::json per = nlohmann::json::array();
    for (int o = 0; o < a.orbit_count(); ++o) {
        const auto& n = a.nonattracting(o);
        const auto& s = a.supporting(o);
        nlohmann::json stages = nlohmann::json::array();
        for (const auto& st : s.stages) stages.push_back(system_json(st, a.names()));
        per.push_back({{"orbit", orbit_name(a, o)},
                       {"nonattracting", {{"system", system_json(n.system, a.names())}, {"provenance", provenance_json(a, n)}}},
                       {"supporting", {{"system", system_json(s.system, a.names())}, {"stages", stages}}}});
    }
    j["orbits"] = per;
    return j;
}

nlohmann::json filtration_json(const Analysis& a, const CanonicalFiltration& cf) {
    nlohmann::json j;
    j["length"] = cf.length;
    nlohmann::json levels = nlohmann::json::array(), systems = nlohmann::json::array();
    for (const auto& l : cf.levels) {
        nlohmann::json lv = nlohmann::json::array();
        for (int o : l) lv.push_back(orbit_name(a, o));
        levels.push_back(lv);
    }
    for (std::size_t i = 0; i < cf.systems.size(); ++i)
        systems.push_back({{"level", i},
                           {"system", fbc_json(cf.tori[i], a.names())},
                           {"support", fbc_json(cf.support_tori[i], a.names())}});
    j["levels"] = levels;
    j["systems"] = systems;
    return j;
}

nlohmann::json h_json(const Analysis& a, const HCollection& h) {
    nlohmann::json j;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : h.entries) entries.push_back({{"orbit", orbit_name(a, e.orbit)}, {"system", fbc_json(e.torus, a.names())}});
    j["entries"] = entries;
    nlohmann::json nest = nlohmann::json::array();
    for (auto [x, y] : h.nesting) nest.push_back({{"inner", orbit_name(a, x)}, {"outer", orbit_name(a, y)}});
    j["nesting"] = nest;
    return j;
}

nlohmann::json twins_json(const Analysis& a, int bound) {
    nlohmann::json out = nlohmann::json::array();
    for (int o = 0; o < a.orbit_count(); ++o) {
        auto v = phi_twins(a.automorphism(), a.nonattracting(o).system, bound);
        nlohmann::json j{{"orbit", orbit_name(a, o)}, {"found", v.found}, {"bound", v.bound}};
        if (v.found) {
            j["power"] = v.power;
            j["classes"] = {v.first, v.second};
            j["witness"] = a.names().format(v.witness);
        }
        out.push_back(j);
    }
    return out;
}

// Depth and spectrum of phi^m, m = 1 .. powers.
nlohmann::json powers_json(const InputSpec& in, const AnalysisConfig& cfg, bool& undetermined) {
    nlohmann::json out = nlohmann::json::array();
    for (int m = 1; m <= cfg.powers; ++m) {
        nlohmann::json j{{"power", m}};
        try {
            LaminationSystem ls(power(in.phi, m), cfg.attraction(), in.filtration ? &*in.filtration : nullptr);
            auto p = build_poset(ls);
            j["depth"] = p.depth;
            j["spectrum"] = p.spectrum;
        } catch (const UndeterminedNesting& e) {
            undetermined = true;
            j["undetermined"] = e.what();
        }
        out.push_back(j);
    }
    return out;
}

Outcome undetermined(nlohmann::json report, const std::string& why) {
    report["status"] = "undetermined";
    report["diagnostics"] = why;
    return {std::move(report), "", 2};
}

nlohmann::json base_report(const InputSpec& in, const AnalysisConfig& cfg) {
    nlohmann::json r;
    r["input"] = input_json(in);
    r["config"] = cfg.to_json();
    const GraphMap f = rose_representative(in.phi);
    const Filtration filt = refine_filtration(f, in.filtration ? *in.filtration : single_stratum(f));
    r["strata"] = strata_json(f, filt, in.names);
    return r;
}

Analysis make_analysis(const InputSpec& in, const AnalysisConfig& cfg) {
    return Analysis(in.phi, in.names, cfg.options(), in.filtration ? &*in.filtration : nullptr);
}

}  // namespace

InputSpec parse_input(std::string_view text) {
    std::optional<int> rank;
    std::optional<std::pair<int, std::vector<Token>>> names_line, filt_line;
    struct PhiLine {
        int line;
        Token gen;
        std::vector<Token> image;
    };
    std::vector<PhiLine> phis;
    int rank_line = 0;

    for (const auto& [n, line] : content_lines(text)) {
        const std::size_t start = line.find_first_not_of(" \t");
        std::size_t at;
        if ((at = after_key(line, start, "rank", '=')) != std::string::npos) {
            auto toks = split(line, at);
            if (toks.size() != 1) throw ParseError(n, static_cast<int>(at) + 1, "expected one integer after rank=");
            if (rank) throw ParseError(n, static_cast<int>(start) + 1, "rank given twice");
            rank = parse_int(toks[0], n, "rank");
            rank_line = n;
            if (*rank < 1) throw ParseError(n, toks[0].column, "rank must be positive");
        } else if ((at = after_key(line, start, "names", '=')) != std::string::npos) {
            if (names_line) throw ParseError(n, static_cast<int>(start) + 1, "names given twice");
            names_line = {n, split(line, at)};
        } else if ((at = after_key(line, start, "phi", ':')) != std::string::npos) {
            auto toks = split(line, at);
            if (toks.size() < 2 || toks[1].text != "->")
                throw ParseError(n, toks.empty() ? static_cast<int>(at) + 1 : toks[0].column, "expected 'phi: <generator> -> <image>'");
            phis.push_back({n, toks[0], std::vector<Token>(toks.begin() + 2, toks.end())});
        } else if ((at = after_key(line, start, "filtration", ':')) != std::string::npos) {
            if (filt_line) throw ParseError(n, static_cast<int>(start) + 1, "filtration given twice");
            filt_line = {n, {}};
            // Brackets may touch the names: split them off as tokens of their own.
            for (std::size_t i = at; i < line.size(); ++i) {
                if (line[i] == '[' || line[i] == ']') {
                    filt_line->second.push_back({static_cast<int>(i) + 1, std::string(1, line[i])});
                    continue;
                }
                if (std::isspace(static_cast<unsigned char>(line[i]))) continue;
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '[' && line[j] != ']') ++j;
                filt_line->second.push_back({static_cast<int>(i) + 1, line.substr(i, j - i)});
                i = j - 1;
            }
        } else {
            throw ParseError(n, static_cast<int>(start) + 1, "expected 'rank=', 'names=', 'phi:' or 'filtration:'");
        }
    }
    if (!rank) throw ParseError(1, 1, "missing 'rank='");

    InputSpec spec;
    if (names_line) {
        const auto& [n, toks] = *names_line;
        if (static_cast<int>(toks.size()) != *rank)
            throw ParseError(n, toks.empty() ? 1 : toks.back().column,
                             "names lists " + std::to_string(toks.size()) + " generators but rank is " + std::to_string(*rank));
        std::vector<std::string> names;
        for (const auto& t : toks) {
            if (!valid_name(t.text)) throw ParseError(n, t.column, "invalid generator name '" + t.text + "'");
            if (std::find(names.begin(), names.end(), t.text) != names.end())
                throw ParseError(n, t.column, "generator '" + t.text + "' named twice");
            names.push_back(t.text);
        }
        spec.names = Alphabet(names);
    } else {
        spec.names = Alphabet::standard(*rank);
    }

    std::vector<std::optional<Word>> images(static_cast<std::size_t>(*rank));
    for (const auto& p : phis) {
        const int g = spec.names.index(p.gen.text);
        if (g < 0) throw ParseError(p.line, p.gen.column, "unknown generator '" + p.gen.text + "'");
        if (images[static_cast<std::size_t>(g)]) throw ParseError(p.line, p.gen.column, "image of '" + p.gen.text + "' given twice");
        images[static_cast<std::size_t>(g)] = parse_image(p.image, spec.names, p.line);
    }
    std::vector<Word> ims;
    for (int g = 0; g < *rank; ++g) {
        if (!images[static_cast<std::size_t>(g)]) throw ParseError(rank_line, 1, "no image given for '" + spec.names.name(g) + "'");
        ims.push_back(*images[static_cast<std::size_t>(g)]);
    }
    spec.phi = Automorphism(*rank, ims);
    try {
        (void)invert(spec.phi);
    } catch (const NotAnAutomorphism&) {
        throw InputError("the images do not define an automorphism");
    }

    if (filt_line) {
        const auto& [n, toks] = *filt_line;
        std::vector<std::vector<int>> top_first;
        std::vector<char> seen(static_cast<std::size_t>(*rank), 0);
        bool open = false;
        for (const auto& t : toks) {
            if (t.text == "[") {
                if (open) throw ParseError(n, t.column, "nested '['");
                open = true;
                top_first.emplace_back();
            } else if (t.text == "]") {
                if (!open) throw ParseError(n, t.column, "unmatched ']'");
                if (top_first.back().empty()) throw ParseError(n, t.column, "empty stratum");
                open = false;
            } else {
                if (!open) throw ParseError(n, t.column, "generator outside brackets");
                const int g = spec.names.index(t.text);
                if (g < 0) throw ParseError(n, t.column, "unknown generator '" + t.text + "'");
                if (seen[static_cast<std::size_t>(g)]) throw ParseError(n, t.column, "generator '" + t.text + "' in two strata");
                seen[static_cast<std::size_t>(g)] = 1;
                top_first.back().push_back(g);
            }
        }
        if (open) throw ParseError(n, toks.back().column, "unclosed '['");
        for (int g = 0; g < *rank; ++g)
            if (!seen[static_cast<std::size_t>(g)]) throw ParseError(n, 1, "filtration misses '" + spec.names.name(g) + "'");
        Filtration f;
        f.strata.assign(top_first.rbegin(), top_first.rend());
        try {
            check_invariant(rose_representative(spec.phi), f);
        } catch (const NonInvariantFiltration& e) {
            throw ParseError(n, 1, e.what());
        }
        spec.filtration = f;
    }
    return spec;
}

Cover parse_cover(std::string_view text, const Alphabet& names) {
    Cover c;
    std::vector<std::optional<std::vector<int>>> perms(static_cast<std::size_t>(names.rank()));
    int sheets_line = 1;
    for (const auto& [n, line] : content_lines(text)) {
        const std::size_t start = line.find_first_not_of(" \t");
        std::size_t at;
        if ((at = after_key(line, start, "sheets", '=')) != std::string::npos) {
            auto toks = split(line, at);
            if (toks.size() != 1) throw ParseError(n, static_cast<int>(at) + 1, "expected one integer after sheets=");
            c.sheets = parse_int(toks[0], n, "sheets");
            sheets_line = n;
            if (c.sheets < 1) throw ParseError(n, toks[0].column, "sheet count must be positive");
            continue;
        }
        auto colon = line.find(':', start);
        if (colon == std::string::npos) throw ParseError(n, static_cast<int>(start) + 1, "expected 'sheets=' or '<generator>: <targets>'");
        std::string gen = line.substr(start, colon - start);
        while (!gen.empty() && std::isspace(static_cast<unsigned char>(gen.back()))) gen.pop_back();
        const int g = names.index(gen);
        if (g < 0) throw ParseError(n, static_cast<int>(start) + 1, "unknown generator '" + gen + "'");
        if (perms[static_cast<std::size_t>(g)]) throw ParseError(n, static_cast<int>(start) + 1, "generator '" + gen + "' given twice");
        std::vector<int> p;
        for (const auto& t : split(line, colon + 1)) p.push_back(parse_int(t, n, "a sheet"));
        perms[static_cast<std::size_t>(g)] = p;
    }
    if (c.sheets < 1) throw ParseError(1, 1, "missing 'sheets='");
    for (int g = 0; g < names.rank(); ++g) {
        if (!perms[static_cast<std::size_t>(g)]) throw ParseError(sheets_line, 1, "no permutation for '" + names.name(g) + "'");
        c.perm.push_back(*perms[static_cast<std::size_t>(g)]);
    }
    return c;
}

void AnalysisConfig::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw InputError(std::string(what) + " must be at least 1");
    };
    need(n_max >= 1, "nmax");
    need(window >= 1, "window");
    need(nielsen_bound >= 0, "nielsen-bound");
    need(twins_bound >= 1, "twins-bound");
    need(powers >= 1, "powers");
    need(match_window >= 1 && leaf_cap >= 1 && iterate_cap >= 1, "each size cap");
}

AttractionConfig AnalysisConfig::attraction() const {
    AttractionConfig a;
    a.n_max = n_max;
    a.window = window;
    a.match_window = match_window;
    a.leaf_cap = leaf_cap;
    a.iterate_cap = iterate_cap;
    return a;
}

AnalysisOptions AnalysisConfig::options() const {
    AnalysisOptions o;
    o.attraction = attraction();
    o.nielsen_bound = nielsen_bound;
    return o;
}

nlohmann::json AnalysisConfig::to_json() const {
    return {{"nmax", n_max},           {"window", window},       {"nielsen_bound", nielsen_bound},
            {"twins_bound", twins_bound}, {"powers", powers},     {"match_window", match_window},
            {"leaf_cap", leaf_cap},     {"iterate_cap", iterate_cap}};
}

void AnalysisConfig::update(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("configuration must be a JSON object");
    static const std::set<std::string> known{"nmax", "window", "nielsen_bound", "twins_bound", "powers", "match_window", "leaf_cap", "iterate_cap"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw InputError("unknown configuration key '" + k + "'");
        if (!v.is_number_integer()) throw InputError("configuration key '" + k + "' needs an integer");
    }
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    get("nmax", n_max);
    get("window", window);
    get("nielsen_bound", nielsen_bound);
    get("twins_bound", twins_bound);
    get("powers", powers);
    get("match_window", match_window);
    get("leaf_cap", leaf_cap);
    get("iterate_cap", iterate_cap);
}

bool verify_conjugation(const Automorphism& phi, const TorusPresentation& t) {
    const int n = phi.rank();
    const Automorphism phik = power(phi, t.k);
    std::vector<Word> images;
    for (const auto& b : t.basis) images.push_back(mul({t.x, phik.apply(b), inverse(t.x)}));
    const CoreGraph a = core_from_generators(n, t.basis), image = core_from_generators(n, images);
    for (const auto& w : images)
        if (!membership(a, w).member) return false;
    for (const auto& w : t.basis)
        if (!membership(image, w).member) return false;
    return true;
}

nlohmann::json property_checks(const Analysis& a, const CanonicalFiltration& cf, const HCollection& h) {
    nlohmann::json out = nlohmann::json::array();
    auto add = [&](const std::string& name, bool pass) { out.push_back({{"name", name}, {"pass", pass}}); };
    const int n = a.orbit_count();
    const auto& ls = a.laminations();

    bool strata_ok = true;
    for (const auto& s : ls.strata()) {
        bool zero = true;
        for (const auto& row : s.matrix)
            for (long x : row) zero &= x == 0;
        strata_ok &= zero || is_irreducible(s.matrix);
    }
    add("strata matrices are zero or irreducible", strata_ok);

    bool order = true;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            order &= !(a.poset().contains(x, y) && a.poset().contains(y, x));
            for (int z = 0; z < n; ++z)
                if (a.poset().contains(x, y) && a.poset().contains(y, z)) order &= a.poset().contains(x, z);
        }
    add("orbit nesting is a strict partial order", order);

    bool own = true;
    for (int x = 0; x < n; ++x) own &= ls.attraction(a.poset().orbits[static_cast<std::size_t>(x)].approx.g, x).status == Attraction::Attracted;
    add("approximating elements are attracted to their own orbit", own);

    const auto p = a.polynomial_system();
    bool inv = true, maln = true, below = true, proper = true, nested = true, carries = true, sup_carried = true, sup_order = true;
    for (int x = 0; x < n; ++x) {
        const auto& nx = a.nonattracting(x).system;
        inv &= is_invariant(a.automorphism(), nx).invariant;
        maln &= is_malnormal_system(nx);
        below &= is_below(p, nx);
        proper &= nx != a.whole();
        sup_carried &= a.carried_orbits(a.supporting(x).system) == a.down_set(x);
        for (int y = 0; y < n; ++y) {
            const bool in = a.poset().below_or_equal(x, y);
            nested &= in == is_below(nx, a.nonattracting(y).system);
            carries &= a.carries(nx, y) == !in;
            sup_order &= in == is_below(a.supporting(x).system, a.supporting(y).system);
        }
    }
    add("nonattracting systems are invariant", inv);
    add("nonattracting systems are malnormal", maln);
    add("nonattracting systems are proper", proper);
    add("polynomial system lies below every nonattracting system", below);
    add("nonattracting containment matches orbit nesting", nested);
    add("a nonattracting system carries exactly the orbits not containing its own", carries);
    add("supporting systems carry exactly the orbits below", sup_carried);
    add("supporting containment matches orbit nesting", sup_order);

    add("filtration length equals depth", cf.length == a.poset().depth);
    bool strict = true;
    for (std::size_t i = 1; i < cf.systems.size(); ++i) strict &= is_below(cf.systems[i], cf.systems[i - 1]) && cf.systems[i] != cf.systems[i - 1];
    add("filtration strictly decreases", strict);
    add("last filtration level carries no orbit", a.carried_orbits(cf.systems.back()).empty());

    bool conj = true;
    for (const auto& group : {cf.tori, cf.support_tori})
        for (const auto& f : group)
            for (const auto& t : f.tori) conj &= verify_conjugation(a.automorphism(), t);
    for (const auto& e : h.entries)
        for (const auto& t : e.torus.tori) conj &= verify_conjugation(a.automorphism(), t);
    add("every subsystem torus satisfies x phi^k(A) x^-1 = A", conj);

    bool h_order = true;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y)
                h_order &= (std::find(h.nesting.begin(), h.nesting.end(), std::pair{x, y}) != h.nesting.end()) == a.poset().contains(y, x);
    add("H collection nesting matches orbit nesting", h_order);
    return out;
}

Outcome run_analyze(const InputSpec& in, const AnalysisConfig& cfg) {
    cfg.validate();
    nlohmann::json r = base_report(in, cfg);
    try {
        const Analysis a = make_analysis(in, cfg);
        r["poset"] = named_poset_json(a);
        r["depth"] = a.poset().depth;
        r["spectrum"] = a.poset().spectrum;
        r["subsystems"] = subsystems_json(a);
        const auto cf = canonical_filtration(a);
        const auto h = h_collection(a);
        r["filtration"] = filtration_json(a, cf);
        r["presentations"] = {{"mapping_torus", mapping_torus(a.automorphism(), a.names()).text()}, {"h_collection", h_json(a, h)}};
        r["twins"] = twins_json(a, cfg.twins_bound);
        auto checks = property_checks(a, cf, h);
        bool undetermined_power = false;
        r["powers"] = powers_json(in, cfg, undetermined_power);
        if (!undetermined_power) {
            bool same = true;
            for (const auto& pj : r["powers"]) same &= pj["depth"] == r["depth"] && pj["spectrum"] == r["spectrum"];
            checks.push_back({{"name", "depth and spectrum agree for every tested power"}, {"pass", same}});
        }
        r["checks"] = checks;
        r["status"] = "ok";
        Outcome out{r, poset_dot(a.poset()), 0};
        if (undetermined_power) {
            out.report["status"] = "undetermined";
            out.exit_code = 2;
        }
        return out;
    } catch (const UndeterminedNesting& e) {
        return undetermined(r, e.what());
    }
}

Outcome run_poset(const InputSpec& in, const AnalysisConfig& cfg) {
    cfg.validate();
    nlohmann::json r;
    r["input"] = input_json(in);
    try {
        LaminationSystem ls(in.phi, cfg.attraction(), in.filtration ? &*in.filtration : nullptr);
        ls.name_orbits(in.names);
        auto p = build_poset(ls);
        r["poset"] = poset_json(p);
        nlohmann::json nest = nlohmann::json::array();
        for (auto [x, y] : p.nesting) nest.push_back({{"inner", p.orbits[static_cast<std::size_t>(x)].name}, {"outer", p.orbits[static_cast<std::size_t>(y)].name}});
        r["poset"]["nesting"] = nest;
        r["status"] = "ok";
        return {r, poset_dot(p), 0};
    } catch (const UndeterminedNesting& e) {
        return undetermined(r, e.what());
    }
}

Outcome run_torus(const InputSpec& in, const AnalysisConfig& cfg) {
    cfg.validate();
    nlohmann::json r;
    r["input"] = input_json(in);
    r["mapping_torus"] = mapping_torus(in.phi, in.names).text();
    try {
        const Analysis a = make_analysis(in, cfg);
        const auto cf = canonical_filtration(a);
        r["filtration"] = filtration_json(a, cf);
        r["h_collection"] = h_json(a, h_collection(a));
        r["status"] = "ok";
        return {r, "", 0};
    } catch (const UndeterminedNesting& e) {
        return undetermined(r, e.what());
    }
}

Outcome run_restrict(const InputSpec& in, const Cover& cover, const AnalysisConfig& cfg, int max_power) {
    cfg.validate();
    if (static_cast<int>(cover.perm.size()) != in.phi.rank()) throw InputError("cover lists a different number of generators");
    cover_graph(cover);
    nlohmann::json r;
    r["input"] = input_json(in);
    r["sheets"] = cover.sheets;
    std::optional<Restriction> res;
    int m = 0;
    for (int k = 1; k <= max_power && !res; ++k) {
        try {
            res = restrict_finite_index(power(in.phi, k), cover);
            m = k;
        } catch (const NotPreserved&) {
        }
    }
    if (!res) throw NotPreserved("no power up to " + std::to_string(max_power) + " preserves the cover");
    const Alphabet sub = Alphabet::standard(res->psi.rank());
    r["power"] = m;
    nlohmann::json basis = nlohmann::json::array(), psi = nlohmann::json::object();
    for (const auto& b : res->basis) basis.push_back(in.names.format(b));
    for (int g = 0; g < res->psi.rank(); ++g) psi[sub.name(g)] = sub.format(res->psi.image(g));
    r["basis"] = basis;
    r["psi"] = psi;
    try {
        LaminationSystem base(in.phi, cfg.attraction(), in.filtration ? &*in.filtration : nullptr);
        auto p0 = build_poset(base);
        auto p = restricted_poset(*res, cfg.attraction());
        r["depth"] = {{"phi", p0.depth}, {"restricted", p.depth}};
        r["spectrum"] = {{"phi", p0.spectrum}, {"restricted", p.spectrum}};
        r["invariant"] = p0.depth == p.depth && p0.spectrum == p.spectrum;
        r["status"] = "ok";
        return {r, "", 0};
    } catch (const UndeterminedNesting& e) {
        return undetermined(r, e.what());
    }
}

Outcome run_pair(const InputSpec& in, const AnalysisConfig& cfg) {
    cfg.validate();
    nlohmann::json r;
    r["input"] = input_json(in);
    try {
        const Analysis plus = make_analysis(in, cfg);
        // The filtration of phi need not be invariant under the inverse.
        const Analysis minus(invert(in.phi), in.names, cfg.options());
        auto rep = pairing_check(plus, minus);
        nlohmann::json pairs = nlohmann::json::array();
        for (auto [i, j] : rep.pairs)
            pairs.push_back({{"attracting", orbit_name(plus, i)},
                             {"repelling", orbit_name(minus, j)},
                             {"nonattracting", system_json(plus.nonattracting(i).system, in.names)}});
        r["pairs"] = pairs;
        r["attracting_count"] = rep.plus_count;
        r["repelling_count"] = rep.minus_count;
        r["nonattracting_equal"] = rep.nonattracting_equal;
        r["supporting_equal"] = rep.supporting_equal;
        r["order_isomorphic"] = rep.order_isomorphic;
        r["status"] = "ok";
        return {r, "", 0};
    } catch (const UndeterminedNesting& e) {
        return undetermined(r, e.what());
    }
}

}  // namespace lamina
