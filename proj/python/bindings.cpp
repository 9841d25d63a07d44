// SPDX-License-Identifier: Apache-2.0
// Python bindings: the prep and run operations over in-memory text, plus a
// direct simulation hook. File-level workflows stay with the exsim CLI.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

#include "exsim/aiger.hpp"
#include "exsim/elaborate.hpp"
#include "exsim/engine.hpp"
#include "exsim/verilog.hpp"

namespace py = pybind11;
using namespace exsim;

namespace {

struct Loaded {
    Aignet g;
    std::string clock = "clk";
};

Loaded load_from_text(const std::string& design, const std::string& top) {
    Loaded out;
    if (design.rfind("aag ", 0) == 0) {
        out.g = parse_aiger(design);
        return out;
    }
    VDesign d = parse_mini_verilog(design);
    std::string top_name = top;
    if (top_name.empty()) {
        if (d.modules.size() == 1)
            top_name = d.modules[0].name;
        else
            throw ConfigError("design has several modules; pass top=...");
    }
    Elaboration el = elaborate(d, top_name);
    out.g = std::move(el.aignet);
    if (!el.clock_name.empty()) out.clock = el.clock_name;
    return out;
}

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string prep_verilog(const std::string& source, const std::string& top) {
    return write_aiger(load_from_text(source, top).g);
}

// options mirror the CLI config file keys
std::string run_check(const std::string& design, const std::string& wave_vcd,
                      const std::map<std::string, std::string>& options) {
    std::string top, clock;
    RunConfig cfg;
    TagOverrides tags;
    for (const auto& [key, val] : options) {
        if (key == "top") top = val;
        else if (key == "clock") clock = val;
        else if (key == "start_cycle") cfg.start_cycle = std::stoll(val);
        else if (key == "max_cycle") cfg.max_cycle = std::stoll(val);
        else if (key == "clause_hi") cfg.clause_hi = std::stoll(val);
        else if (key == "clause_lo") cfg.clause_lo = std::stoll(val);
        else if (key == "check_period") cfg.check_period = std::stoll(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "stop_on_first_fail") cfg.stop_on_first_fail = (val == "1" || val == "true");
        else if (key == "policy") cfg.policy = val;
        else if (key == "cex_dir") cfg.cex_dir = val;
        else if (key == "dimacs_dir") cfg.dimacs_dir = val;
        else if (key == "free") for (auto& n : split_names(val)) tags.free_names.push_back(n);
        else if (key == "wave") for (auto& n : split_names(val)) tags.wave_names.push_back(n);
        else if (key == "rand") for (auto& n : split_names(val)) tags.rand_names.push_back(n);
        else if (key == "fail") for (auto& n : split_names(val)) tags.fail_names.push_back(n);
        else throw ConfigError("unknown option '" + key + "'");
    }

    Loaded d = load_from_text(design, top);
    WaveDb wave = parse_vcd(wave_vcd, clock.empty() ? d.clock : clock);
    TagMap tm = default_tagging(d.g, wave, tags);
    RunReport report = main_loop(d.g, wave, tm, cfg);
    return report_to_json(report);
}

std::string design_info(const std::string& design, const std::string& top) {
    Loaded d = load_from_text(design, top);
    std::ostringstream out;
    out << "{\"inputs\": " << d.g.input_count() << ", \"registers\": " << d.g.register_count()
        << ", \"ands\": " << d.g.and_count() << ", \"nodes\": " << d.g.node_count()
        << ", \"clock\": \"" << d.clock << "\"}";
    return out.str();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "bounded semi-formal property checking over recorded waveforms";

    m.def("prep_verilog", &prep_verilog, py::arg("source"), py::arg("top") = "",
          "Compile mini-Verilog (or pass through AIGER) to ASCII AIGER text.");
    m.def("run_check", &run_check, py::arg("design"), py::arg("wave_vcd"),
          py::arg("options") = std::map<std::string, std::string>{},
          "Walk a VCD waveform checking the tagged fail signals; returns the JSON report. "
          "Options use the same keys as the CLI config file (start_cycle, max_cycle, seed, "
          "free, fail, wave, rand, policy, ...).");
    m.def("design_info", &design_info, py::arg("design"), py::arg("top") = "",
          "Node, input and register counts of the elaborated design, as JSON.");
    m.def("policies", [] { return policy_names(); },
          "Names of the compiled-in scheduling policies.");

    m.attr("__version__") = "0.1.0";
}
