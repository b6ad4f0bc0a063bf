#include <functional>

#include <pybind11/pybind11.h>

#include "lamina/report.hpp"

namespace py = pybind11;
using namespace lamina;

namespace {

AnalysisConfig config_from(const std::string& config_json) {
    AnalysisConfig cfg;
    if (!config_json.empty()) {
        try {
            cfg.update(nlohmann::json::parse(config_json));
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(std::string("configuration: ") + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

// (report JSON, DOT, exit code); the heavy lifting runs without the GIL.
py::tuple outcome(const std::function<Outcome()>& run) {
    Outcome out;
    {
        py::gil_scoped_release release;
        out = run();
    }
    return py::make_tuple(out.report.dump(), out.dot, out.exit_code);
}

}  // namespace

PYBIND11_MODULE(_lamina, m) {
    auto error = py::register_exception<Error>(m, "LaminaError", PyExc_RuntimeError);
    auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", input_error.ptr());
    py::register_exception<NotPreserved>(m, "NotPreserved", error.ptr());

    m.def("analyze", [](const std::string& text, const std::string& cfg) {
        const auto in = parse_input(text);
        const auto c = config_from(cfg);
        return outcome([&] { return run_analyze(in, c); });
    }, py::arg("text"), py::arg("config") = "");
    m.def("poset", [](const std::string& text, const std::string& cfg) {
        const auto in = parse_input(text);
        const auto c = config_from(cfg);
        return outcome([&] { return run_poset(in, c); });
    }, py::arg("text"), py::arg("config") = "");
    m.def("torus", [](const std::string& text, const std::string& cfg) {
        const auto in = parse_input(text);
        const auto c = config_from(cfg);
        return outcome([&] { return run_torus(in, c); });
    }, py::arg("text"), py::arg("config") = "");
    m.def("pair", [](const std::string& text, const std::string& cfg) {
        const auto in = parse_input(text);
        const auto c = config_from(cfg);
        return outcome([&] { return run_pair(in, c); });
    }, py::arg("text"), py::arg("config") = "");
    m.def("restrict", [](const std::string& text, const std::string& cover_text, const std::string& cfg, int max_power) {
        const auto in = parse_input(text);
        const auto cover = parse_cover(cover_text, in.names);
        const auto c = config_from(cfg);
        return outcome([&] { return run_restrict(in, cover, c, max_power); });
    }, py::arg("text"), py::arg("cover"), py::arg("config") = "", py::arg("max_power") = 12);
    m.def("default_config", [] { return AnalysisConfig{}.to_json().dump(); });
}
