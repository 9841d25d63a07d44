// SPDX-License-Identifier: Apache-2.0
// exsim command line: `prep` compiles a design to ASCII AIGER, `run` walks a
// waveform and checks the tagged fail signals.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "exsim/aiger.hpp"
#include "exsim/elaborate.hpp"
#include "exsim/engine.hpp"
#include "exsim/verilog.hpp"

namespace fs = std::filesystem;
using namespace exsim;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct LoadedDesign {
    Aignet aignet;
    std::string clock = "clk";
    std::string top;
};

LoadedDesign load_design(const std::string& path, std::string top) {
    LoadedDesign out;
    std::string ext = fs::path(path).extension().string();
    std::string text = read_file(path);
    if (ext == ".aag" || ext == ".aig") {
        if (ext == ".aig") throw Error("binary AIGER is not supported; use ASCII .aag");
        out.aignet = parse_aiger(text);
        out.top = top;
        return out;
    }
    VDesign design = parse_mini_verilog(text);
    if (top.empty()) {
        if (design.modules.size() == 1)
            top = design.modules[0].name;
        else
            throw Error("design has " + std::to_string(design.modules.size()) +
                        " modules; select one with --top");
    }
    Elaboration el = elaborate(design, top);
    out.aignet = std::move(el.aignet);
    if (!el.clock_name.empty()) out.clock = el.clock_name;
    out.top = top;
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

struct RunOptions {
    RunConfig cfg;
    TagOverrides tags;
    std::string top;
    std::string clock;
    std::string report_path = "exsim-report.json";
};

// `key = value` lines; '#' starts a comment; unknown keys are errors
void apply_config_file(RunOptions& o, const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t eq = line.find('=');
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos)
            throw ConfigError("config " + path + ":" + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto to_int = [&](const std::string& s) {
            try {
                return std::stoll(s);
            } catch (...) {
                throw ConfigError("config " + path + ": bad number '" + s + "' for " + key);
            }
        };
        if (key == "start_cycle") o.cfg.start_cycle = to_int(val);
        else if (key == "max_cycle") o.cfg.max_cycle = to_int(val);
        else if (key == "clause_hi") o.cfg.clause_hi = to_int(val);
        else if (key == "clause_lo") o.cfg.clause_lo = to_int(val);
        else if (key == "check_period") o.cfg.check_period = to_int(val);
        else if (key == "seed") o.cfg.seed = static_cast<uint64_t>(to_int(val));
        else if (key == "stop_on_first_fail") o.cfg.stop_on_first_fail = (val == "1" || val == "true");
        else if (key == "policy") o.cfg.policy = val;
        else if (key == "cex_dir") o.cfg.cex_dir = val;
        else if (key == "dimacs_dir") o.cfg.dimacs_dir = val;
        else if (key == "report") o.report_path = val;
        else if (key == "top") o.top = val;
        else if (key == "clock") o.clock = val;
        else if (key == "free") for (auto& n : split_names(val)) o.tags.free_names.push_back(n);
        else if (key == "wave") for (auto& n : split_names(val)) o.tags.wave_names.push_back(n);
        else if (key == "rand") for (auto& n : split_names(val)) o.tags.rand_names.push_back(n);
        else if (key == "fail") for (auto& n : split_names(val)) o.tags.fail_names.push_back(n);
        else
            throw ConfigError("config " + path + ":" + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
    }
}

int cmd_prep(const std::string& design_path, const std::string& top, std::string out_path) {
    LoadedDesign d = load_design(design_path, top);
    if (out_path.empty())
        out_path = fs::path(design_path).stem().string() + ".aag";
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error("cannot write '" + out_path + "'");
    f << write_aiger(d.aignet);
    std::cout << "wrote " << out_path << ": inputs " << d.aignet.input_count() << ", registers "
              << d.aignet.register_count() << ", ands " << d.aignet.and_count() << ", nodes "
              << d.aignet.node_count() << "\n";
    return 0;
}

int cmd_run(const std::string& design_path, const std::string& wave_path, RunOptions& o) {
    LoadedDesign d = load_design(design_path, o.top);
    std::string clock = o.clock.empty() ? d.clock : o.clock;
    WaveDb wave = parse_vcd(read_file(wave_path), clock);

    if (o.cfg.cex_dir.empty()) {
        fs::path dir = fs::path(o.report_path).parent_path();
        o.cfg.cex_dir = dir.empty() ? "." : dir.string();
    }

    TagMap tags = default_tagging(d.aignet, wave, o.tags);

    auto t0 = std::chrono::steady_clock::now();
    RunReport report = main_loop(d.aignet, wave, tags, o.cfg);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cout << report_to_text(report);
    std::cout << "elapsed: " << dt << " s\n";

    nlohmann::json j = nlohmann::json::parse(report_to_json(report));
    j["design"] = design_path;
    j["wave"] = wave_path;
    j["config"] = {
        {"start_cycle", o.cfg.start_cycle}, {"max_cycle", o.cfg.max_cycle},
        {"clause_hi", o.cfg.clause_hi},     {"clause_lo", o.cfg.clause_lo},
        {"check_period", o.cfg.check_period},
        {"seed", o.cfg.seed},               {"stop_on_first_fail", o.cfg.stop_on_first_fail},
        {"policy", o.cfg.policy},
    };
    std::ofstream rf(o.report_path, std::ios::binary);
    if (!rf) throw Error("cannot write report '" + o.report_path + "'");
    rf << j.dump(2) << "\n";

    bool any_sat = false;
    for (const FailReport& c : report.checks)
        if (c.status == SolveStatus::Sat && c.replay_validated) any_sat = true;
    return any_sat ? 10 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exsim: bounded semi-formal property checker"};
    app.require_subcommand(1);

    // prep
    auto* prep = app.add_subcommand("prep", "compile a design to ASCII AIGER");
    std::string prep_design, prep_top, prep_out;
    prep->add_option("design", prep_design, "mini-Verilog (.v) or AIGER (.aag) source")
        ->required();
    prep->add_option("--top", prep_top, "top module name");
    prep->add_option("-o,--out", prep_out, "output .aag path (default: <design>.aag)");

    // run
    auto* run = app.add_subcommand("run", "check fail signals along a recorded waveform");
    std::string run_design, run_wave, config_path;
    RunOptions opt;
    std::vector<std::string> free_names, fail_names, wave_names, rand_names;
    bool stop_on_first = true;
    bool no_stop = false;
    run->add_option("design", run_design, "design source (.v or .aag)")->required();
    run->add_option("wave", run_wave, "VCD waveform")->required();
    run->add_option("--config", config_path, "key=value config file");
    run->add_option("--top", opt.top, "top module name");
    run->add_option("--clock", opt.clock, "clock signal name in the VCD");
    auto* f_start = run->add_option("--start-cycle", opt.cfg.start_cycle, "first checked frame");
    auto* f_max = run->add_option("--max-cycle", opt.cfg.max_cycle, "last checked cycle");
    auto* f_hi = run->add_option("--clause-hi", opt.cfg.clause_hi, "live-clause upper threshold");
    auto* f_lo = run->add_option("--clause-lo", opt.cfg.clause_lo, "live-clause lower threshold");
    auto* f_per = run->add_option("--check-period", opt.cfg.check_period,
                                  "pending frames between checks");
    auto* f_seed = run->add_option("--seed", opt.cfg.seed, "seed for rand/free bindings");
    run->add_option("--free", free_names, "extra Free inputs (name or name[bit])");
    run->add_option("--fail", fail_names, "fail targets (name or name[bit])");
    run->add_option("--wave-input", wave_names, "force Wave tag on inputs");
    run->add_option("--rand-input", rand_names, "force Rand tag on inputs");
    auto* f_pol = run->add_option("--policy", opt.cfg.policy, "scheduling policy name");
    run->add_flag("--stop-on-first-fail", stop_on_first, "stop at the first validated fail");
    run->add_flag("--no-stop-on-first-fail", no_stop, "check every frame to max-cycle");
    run->add_option("--dump-dimacs", opt.cfg.dimacs_dir, "dump each check as DIMACS here");
    run->add_option("--cex-out", opt.cfg.cex_dir, "directory for counterexample VCDs");
    auto* f_rep = run->add_option("--report", opt.report_path, "JSON report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (prep->parsed()) return cmd_prep(prep_design, prep_top, prep_out);

        // config file first, explicit flags on top
        RunOptions from_cli = opt;
        if (!config_path.empty()) {
            RunOptions base;
            apply_config_file(base, config_path);
            RunOptions merged = base;
            if (!f_start->empty()) merged.cfg.start_cycle = from_cli.cfg.start_cycle;
            if (!f_max->empty()) merged.cfg.max_cycle = from_cli.cfg.max_cycle;
            if (!f_hi->empty()) merged.cfg.clause_hi = from_cli.cfg.clause_hi;
            if (!f_lo->empty()) merged.cfg.clause_lo = from_cli.cfg.clause_lo;
            if (!f_per->empty()) merged.cfg.check_period = from_cli.cfg.check_period;
            if (!f_seed->empty()) merged.cfg.seed = from_cli.cfg.seed;
            if (!f_pol->empty()) merged.cfg.policy = from_cli.cfg.policy;
            if (!f_rep->empty()) merged.report_path = from_cli.report_path;
            if (!from_cli.top.empty()) merged.top = from_cli.top;
            if (!from_cli.clock.empty()) merged.clock = from_cli.clock;
            if (!from_cli.cfg.cex_dir.empty()) merged.cfg.cex_dir = from_cli.cfg.cex_dir;
            if (!from_cli.cfg.dimacs_dir.empty()) merged.cfg.dimacs_dir = from_cli.cfg.dimacs_dir;
            opt = merged;
        }
        for (auto& n : free_names) opt.tags.free_names.push_back(n);
        for (auto& n : fail_names) opt.tags.fail_names.push_back(n);
        for (auto& n : wave_names) opt.tags.wave_names.push_back(n);
        for (auto& n : rand_names) opt.tags.rand_names.push_back(n);
        if (no_stop) opt.cfg.stop_on_first_fail = false;
        else if (run->count("--stop-on-first-fail")) opt.cfg.stop_on_first_fail = true;

        return cmd_run(run_design, run_wave, opt);
    } catch (const SoundnessError& e) {
        std::cerr << "================ INTERNAL SOUNDNESS ERROR ================\n"
                  << e.what() << "\n"
                  << "A SAT answer failed concrete replay; this is a checker bug.\n"
                  << "==========================================================\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
