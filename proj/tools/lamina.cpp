#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lamina/report.hpp"

using namespace lamina;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

struct Flags {
    std::string input, cover, json_path, dot_path, config;
    int n_max = 0, window = 0, nielsen_bound = -1, twins_bound = 0, powers = 0;
    std::size_t match_window = 0, leaf_cap = 0, iterate_cap = 0;
    int max_power = 12;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("input", f.input, "automorphism file")->required();
    sub->add_option("--nmax", f.n_max, "iteration horizon for attraction tests");
    sub->add_option("--window", f.window, "stabilization window");
    sub->add_option("--nielsen-bound", f.nielsen_bound, "longest circuit examined by the Nielsen search (0: default)");
    sub->add_option("--twins-bound", f.twins_bound, "largest power examined for twins");
    sub->add_option("--powers", f.powers, "compare depth and spectrum for phi^1 .. phi^n");
    sub->add_option("--match-window", f.match_window, "longest leaf iterate indexed for matching");
    sub->add_option("--leaf-cap", f.leaf_cap, "longest leaf iterate kept");
    sub->add_option("--iterate-cap", f.iterate_cap, "longest word iterated");
    sub->add_option("--json", f.json_path, "write the JSON report here instead of stdout");
    sub->add_option("--config", f.config, "JSON file of configuration values; flags take precedence");
}

AnalysisConfig configure(const CLI::App* sub, const Flags& f) {
    AnalysisConfig cfg;
    if (!f.config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(slurp(f.config));
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError("configuration file: " + std::string(e.what()));
        }
        cfg.update(j);
    }
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--nmax")) cfg.n_max = f.n_max;
    if (given("--window")) cfg.window = f.window;
    if (given("--nielsen-bound")) cfg.nielsen_bound = f.nielsen_bound;
    if (given("--twins-bound")) cfg.twins_bound = f.twins_bound;
    if (given("--powers")) cfg.powers = f.powers;
    if (given("--match-window")) cfg.match_window = f.match_window;
    if (given("--leaf-cap")) cfg.leaf_cap = f.leaf_cap;
    if (given("--iterate-cap")) cfg.iterate_cap = f.iterate_cap;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attracting laminations and subgroup systems of free group automorphisms"};
    app.require_subcommand(1);
    Flags f;

    auto* analyze = app.add_subcommand("analyze", "full report");
    auto* poset = app.add_subcommand("poset", "lamination orbit poset");
    auto* torus = app.add_subcommand("torus", "mapping torus and subsystem presentations");
    auto* restrict = app.add_subcommand("restrict", "depth and spectrum on a finite-index subgroup");
    auto* pair = app.add_subcommand("pair", "pairing with the inverse automorphism");
    for (auto* sub : {analyze, poset, torus, restrict, pair}) add_common(sub, f);
    for (auto* sub : {analyze, poset})
        sub->add_option("--dot", f.dot_path, "write the poset as DOT (no path: stdout)")->expected(0, 1);
    restrict->add_option("--cover", f.cover, "cover file: sheets=n, then 'g: targets' per generator")->required();
    restrict->add_option("--max-power", f.max_power, "largest power tried for preserving the cover");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    std::string parsing = f.input;
    try {
        const AnalysisConfig cfg = configure(sub, f);
        const InputSpec in = parse_input(slurp(f.input));
        Outcome out;
        if (sub == analyze) out = run_analyze(in, cfg);
        else if (sub == poset) out = run_poset(in, cfg);
        else if (sub == torus) out = run_torus(in, cfg);
        else if (sub == pair) out = run_pair(in, cfg);
        else {
            parsing = f.cover;
            const Cover cover = parse_cover(slurp(f.cover), in.names);
            parsing = f.input;
            out = run_restrict(in, cover, cfg, f.max_power);
        }

        const auto* dot = sub->get_option_no_throw("--dot");
        const bool dot_requested = dot && dot->count() > 0;
        const bool dot_to_stdout = dot_requested && (f.dot_path.empty() || f.dot_path == "-");
        if (dot_requested && !out.dot.empty()) emit(f.dot_path, out.dot);
        if (!dot_to_stdout || !f.json_path.empty()) emit(f.json_path, out.report.dump(2) + "\n");
        return out.exit_code;
    } catch (const ParseError& e) {
        std::cerr << parsing << ": " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
