// SPDX-License-Identifier: Apache-2.0

#include "exsim/engine.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "exsim/prng.hpp"

namespace exsim {

namespace {

std::string leaf_name(const std::string& path) {
    size_t dot = path.rfind('.');
    return dot == std::string::npos ? path : path.substr(dot + 1);
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return out;
}

// Override entries are signal names or single bits: "free_in" or "free_in[0]".
struct OverrideRef {
    std::string signal;
    std::optional<uint32_t> bit;
};

OverrideRef parse_override(const std::string& s) {
    size_t open = s.rfind('[');
    if (open != std::string::npos && s.back() == ']') {
        std::string idx = s.substr(open + 1, s.size() - open - 2);
        bool digits = !idx.empty();
        for (char c : idx)
            if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
        if (digits)
            return {s.substr(0, open), static_cast<uint32_t>(std::stoul(idx))};
    }
    return {s, std::nullopt};
}

} // namespace

// ------------------------------------------------------------ tagging ----

TagMap default_tagging(const Aignet& g, const WaveDb& wave, const TagOverrides& overrides) {
    if (!g.sealed()) throw ConfigError("default_tagging: graph not sealed");
    TagMap tm;
    tm.input_tags.assign(g.input_count(), Tag::Rand);

    // explicit overrides, by priority free > wave > rand
    std::vector<std::optional<Tag>> forced(g.input_count());
    auto apply = [&](const std::vector<std::string>& names, Tag tag) {
        for (const std::string& raw : names) {
            OverrideRef ref = parse_override(raw);
            bool hit = false;
            for (uint32_t i = 0; i < g.input_count(); i++) {
                const BitRef& r = g.input_ref(i);
                if (r.signal != ref.signal) continue;
                if (ref.bit && *ref.bit != r.bit) continue;
                hit = true;
                if (!forced[i]) forced[i] = tag;
            }
            if (!hit)
                throw ConfigError("tag override names nonexistent input '" + raw + "'");
        }
    };
    apply(overrides.free_names, Tag::Free);
    apply(overrides.wave_names, Tag::Wave);
    apply(overrides.rand_names, Tag::Rand);

    for (uint32_t i = 0; i < g.input_count(); i++) {
        const BitRef& r = g.input_ref(i);
        if (forced[i]) {
            tm.input_tags[i] = *forced[i];
            continue;
        }
        if (leaf_name(r.signal).rfind("free_", 0) == 0) {
            tm.input_tags[i] = Tag::Free;
            continue;
        }
        const WaveSignal* sig = wave.find(r.signal);
        bool waveable = sig != nullptr && r.bit < sig->width && !sig->cycles.empty();
        if (waveable) {
            for (const auto& cyc : sig->cycles)
                if (cyc[r.bit] == WBit::X) {
                    waveable = false;
                    break;
                }
        }
        tm.input_tags[i] = waveable ? Tag::Wave : Tag::Rand;
    }

    // fail set: overrides, else every signal named fail_*
    auto add_fail = [&](const std::string& name, std::optional<uint32_t> bit) {
        const std::vector<AigLit>* bits = g.lookup(name);
        if (!bits) throw ConfigError("fail override names nonexistent signal '" + name + "'");
        if (bit) {
            if (*bit >= bits->size())
                throw ConfigError("fail bit out of range: '" + name + "[" +
                                  std::to_string(*bit) + "]'");
            tm.fail_set.push_back({name, *bit, (*bits)[*bit]});
        } else {
            for (uint32_t b = 0; b < bits->size(); b++)
                tm.fail_set.push_back({name, b, (*bits)[b]});
        }
    };
    if (!overrides.fail_names.empty()) {
        for (const std::string& raw : overrides.fail_names) {
            OverrideRef ref = parse_override(raw);
            add_fail(ref.signal, ref.bit);
        }
    } else {
        for (const auto& [name, bits] : g.signals())
            if (leaf_name(name).rfind("fail_", 0) == 0) add_fail(name, std::nullopt);
    }
    if (tm.fail_set.empty())
        throw ConfigError("no fail targets: nothing matches fail_* and no override given");
    return tm;
}

// ------------------------------------------------------------- policies ----

const char* action_name(Action a) {
    switch (a) {
    case Action::StepFail: return "step-fail";
    case Action::StepFree: return "step-free";
    case Action::CheckFails: return "check-fails";
    case Action::Done: return "done";
    }
    return "?";
}

Action default_policy(const PolicyObservables& o) {
    if (o.t_max == o.max_cycle && o.pending_count == 0) return Action::Done;
    if (o.pending_count >= o.check_period || o.t_max == o.max_cycle) return Action::CheckFails;
    if (o.live_clauses > o.clause_hi && o.t_min <= o.t_max) return Action::StepFree;
    if (o.live_clauses <= o.clause_hi) return Action::StepFail;
    // above the threshold with nothing left to retire
    return o.pending_count > 0 ? Action::CheckFails : Action::StepFail;
}

namespace {

// checks every frame as soon as something is pending
Action eager_policy(const PolicyObservables& o) {
    if (o.pending_count > 0) return Action::CheckFails;
    if (o.t_max == o.max_cycle) return Action::Done;
    if (o.live_clauses > o.clause_hi && o.t_min <= o.t_max) return Action::StepFree;
    return Action::StepFail;
}

std::map<std::string, PolicyFn>& policy_registry() {
    static std::map<std::string, PolicyFn> reg = {
        {"default", &default_policy},
        {"eager", &eager_policy},
    };
    return reg;
}

} // namespace

void register_policy(const std::string& name, PolicyFn fn) {
    if (!fn) throw ConfigError("register_policy: null policy");
    policy_registry()[name] = fn;
}

PolicyFn lookup_policy(const std::string& name) {
    auto& reg = policy_registry();
    auto it = reg.find(name);
    if (it == reg.end()) {
        std::string known;
        for (const auto& [n, f] : reg) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown policy '" + name + "' (registered: " + known + ")");
    }
    return it->second;
}

std::vector<std::string> policy_names() {
    std::vector<std::string> out;
    for (const auto& [n, f] : policy_registry()) out.push_back(n);
    return out;
}

// ------------------------------------------------------------------ Run ----

Run::Run(const Aignet& g, const WaveDb& wave, TagMap tags, RunConfig cfg)
    : g_(g), wave_(wave), tags_(std::move(tags)), cfg_(std::move(cfg)) {
    if (!g_.sealed()) throw EngineError("init-run: graph not sealed");
    if (cfg_.max_cycle < 0)
        cfg_.max_cycle = wave_.cycle_count() == 0 ? 0
                                                  : static_cast<int64_t>(wave_.cycle_count()) - 1;
    if (cfg_.start_cycle < 0) throw ConfigError("init-run: negative start-cycle");
    if (cfg_.start_cycle > cfg_.max_cycle)
        throw ConfigError("init-run: start-cycle " + std::to_string(cfg_.start_cycle) +
                          " is past max-cycle " + std::to_string(cfg_.max_cycle));
    if (cfg_.check_period < 1) throw ConfigError("init-run: check-period must be >= 1");
    if (cfg_.clause_lo >= cfg_.clause_hi)
        throw ConfigError("init-run: clause-lo must be below clause-hi");
    if (static_cast<uint64_t>(cfg_.start_cycle) >= wave_.cycle_count())
        throw ConfigError("init-run: start-cycle " + std::to_string(cfg_.start_cycle) +
                          " is past the end of the waveform (" +
                          std::to_string(wave_.cycle_count()) + " cycles)");
    if (tags_.input_tags.size() != g_.input_count())
        throw EngineError("init-run: tag map does not cover every input bit");
    for (const FailTarget& f : tags_.fail_set)
        if (f.lit.node() >= g_.node_count())
            throw EngineError("init-run: fail target literal out of range");

    t_min_ = cfg_.start_cycle;
    t_max_ = cfg_.start_cycle - 1;

    // register snapshot from the wave, asserted as unit clauses at the start frame
    initial_regs_.resize(g_.register_count());
    for (uint32_t i = 0; i < g_.register_count(); i++) {
        const BitRef& r = g_.register_ref(i);
        const WaveSignal* sig = wave_.find(r.signal);
        if (!sig || r.bit >= sig->width)
            throw EngineError("init-run: register '" + r.pretty() + "' is not in the waveform");
        WBit b = wave_.sample(r.signal, static_cast<uint64_t>(cfg_.start_cycle))[r.bit];
        if (b == WBit::X)
            throw EngineError("init-run: register '" + r.pretty() + "' is X at start-cycle " +
                              std::to_string(cfg_.start_cycle));
        initial_regs_[i] = b == WBit::One ? 1 : 0;
    }

    leaf_rule_.window_start = cfg_.start_cycle;
    leaf_rule_.initial_state = [this](uint32_t ordinal) {
        return initial_regs_[ordinal] != 0;
    };
    leaf_rule_.input_rule = [this](uint32_t ordinal, int64_t cycle, SatLit lit) {
        return input_leaf(ordinal, cycle, lit);
    };

    for (uint32_t i = 0; i < g_.register_count(); i++)
        encode_cone(solver_, fm_, g_, AigLit::make(g_.register_node(i), false), cfg_.start_cycle,
                    leaf_rule_);
}

std::optional<bool> Run::wave_bit(uint32_t ordinal, int64_t cycle) const {
    const BitRef& r = g_.input_ref(ordinal);
    const WaveSignal* sig = wave_.find(r.signal);
    if (!sig || r.bit >= sig->width || sig->cycles.empty()) return std::nullopt;
    WBit b = wave_.sample(r.signal, static_cast<uint64_t>(cycle))[r.bit];
    if (b == WBit::X) return std::nullopt;
    return b == WBit::One;
}

// binding priority for retired free inputs: wave value when recorded X-free,
// else a seeded pseudorandom bit
bool Run::binding_value(uint32_t ordinal, int64_t cycle, uint32_t stream) const {
    std::optional<bool> w = wave_bit(ordinal, cycle);
    if (w) return *w;
    return seeded_bit(cfg_.seed, stream, ordinal, cycle);
}

std::optional<bool> Run::input_leaf(uint32_t ordinal, int64_t cycle, SatLit lit) {
    switch (tags_.input_tags[ordinal]) {
    case Tag::Wave: {
        std::optional<bool> w = wave_bit(ordinal, cycle);
        if (!w)
            throw EngineError("wave-tagged input '" + g_.input_ref(ordinal).pretty() +
                              "' is X or missing at cycle " + std::to_string(cycle));
        bound_inputs_[{ordinal, cycle}] = *w;
        return w;
    }
    case Tag::Rand: {
        bool b = seeded_bit(cfg_.seed, 0, ordinal, cycle);
        bound_inputs_[{ordinal, cycle}] = b;
        return b;
    }
    case Tag::Free: {
        if (cycle < t_min_) {
            // the window bottom already passed this cycle: bind immediately,
            // exactly as step-free would have
            bool b = binding_value(ordinal, cycle, 1);
            bound_inputs_[{ordinal, cycle}] = b;
            return b;
        }
        free_vars_[cycle].emplace_back(ordinal, lit);
        unbound_free_++;
        stats_.free_vars_created++;
        return std::nullopt;
    }
    }
    throw EngineError("unreachable tag");
}

void Run::step_fail() {
    if (t_max_ >= cfg_.max_cycle)
        throw EngineError("step-fail: window top already at max-cycle " +
                          std::to_string(cfg_.max_cycle));
    t_max_++;
    for (size_t t = 0; t < tags_.fail_set.size(); t++) {
        SatLit lit = encode_cone(solver_, fm_, g_, tags_.fail_set[t].lit, t_max_, leaf_rule_);
        pending_.push_back(Pending{t, t_max_, lit});
    }
    stats_.frames_encoded++;
}

void Run::step_free() {
    if (t_min_ > t_max_) throw EngineError("step-free: window is empty (t-min past t-max)");
    auto it = free_vars_.find(t_min_);
    if (it != free_vars_.end()) {
        for (const auto& [ordinal, lit] : it->second) {
            bool b = binding_value(ordinal, t_min_, 1);
            solver_.add_unit(lit ^ !b);
            bound_inputs_[{ordinal, t_min_}] = b;
            unbound_free_--;
            stats_.free_vars_bound++;
        }
        free_vars_.erase(it);
    }
    t_min_++;
}

const std::vector<std::pair<uint32_t, SatLit>>* Run::free_vars_at(int64_t cycle) const {
    auto it = free_vars_.find(cycle);
    return it == free_vars_.end() ? nullptr : &it->second;
}

FailReport Run::make_report(const Pending& p, SolveStatus st) {
    const FailTarget& tgt = tags_.fail_set[p.target];
    FailReport r;
    r.signal = tgt.signal;
    r.bit = tgt.bit;
    r.cycle = p.cycle;
    r.status = st;
    if (st == SolveStatus::Unsat) return r;

    // decode the model over free variables in scope of this check
    for (const auto& [cycle, vars] : free_vars_) {
        if (cycle > p.cycle) break;
        for (const auto& [ordinal, lit] : vars)
            r.counterexample[{ordinal, cycle}] = solver_.model_value(lit);
    }
    for (const auto& [key, bit] : bound_inputs_) {
        if (key.second > p.cycle) continue;
        if (tags_.input_tags[key.first] == Tag::Free) r.counterexample[key] = bit;
    }
    replay_and_validate(r);
    return r;
}

void Run::replay_and_validate(FailReport& r) {
    const FailTarget* target = nullptr;
    for (const FailTarget& f : tags_.fail_set)
        if (f.signal == r.signal && f.bit == r.bit) target = &f;
    if (!target) throw EngineError("replay: unknown fail target");

    int64_t start = cfg_.start_cycle;
    int64_t frames = r.cycle - start + 1;

    // full stimulus: recorded bindings, then model values, then the same
    // fallback rule the encoder would have used. Inputs outside every encoded
    // cone cannot influence the fail bit; their fallback only shapes the trace.
    auto stimulus = [&](uint32_t ordinal, int64_t cycle) -> bool {
        auto it = bound_inputs_.find({ordinal, cycle});
        if (it != bound_inputs_.end()) return it->second;
        auto cex = r.counterexample.find({ordinal, cycle});
        if (cex != r.counterexample.end()) return cex->second;
        switch (tags_.input_tags[ordinal]) {
        case Tag::Wave: {
            std::optional<bool> w = wave_bit(ordinal, cycle);
            return w ? *w : false;
        }
        case Tag::Rand: return seeded_bit(cfg_.seed, 0, ordinal, cycle);
        case Tag::Free: return binding_value(ordinal, cycle, 1);
        }
        return false;
    };

    std::vector<std::vector<uint8_t>> reg_trace; // [frame][register]
    std::vector<std::vector<uint8_t>> in_trace;  // [frame][input]
    SimState st;
    st.regs = initial_regs_;
    st.time = static_cast<uint64_t>(start);
    for (int64_t k = 0; k < frames; k++) {
        std::vector<uint8_t> ins(g_.input_count());
        for (uint32_t i = 0; i < g_.input_count(); i++)
            ins[i] = stimulus(i, start + k) ? 1 : 0;
        in_trace.push_back(ins);
        reg_trace.push_back(st.regs);
        if (k + 1 < frames) st = g_.sim_step(st, ins).next;
    }

    std::vector<uint8_t> final_vals = g_.eval_comb(in_trace.back(), reg_trace.back());
    bool fail_value = Aignet::eval_lit(final_vals, target->lit);
    if (!fail_value)
        throw SoundnessError("replay mismatch: solver reported " + r.signal + "[" +
                             std::to_string(r.bit) + "] = 1 at cycle " +
                             std::to_string(r.cycle) +
                             " but concrete simulation disagrees");
    r.replay_validated = true;

    // counterexample waveform: stimulus plus the simulated register trajectory;
    // cycle k in this wave is absolute cycle start_cycle + k
    WaveDb& w = r.cex_wave;
    w.clock_name = wave_.clock_name.empty() ? "clk" : wave_.clock_name;
    for (int64_t k = 0; k < frames; k++) w.cycle_times.push_back(static_cast<uint64_t>(k));

    auto put_signal = [&](const std::string& name, uint32_t width) -> WaveSignal& {
        WaveSignal& s = w.signals[name];
        s.width = width;
        s.cycles.assign(static_cast<size_t>(frames), std::vector<WBit>(width, WBit::Zero));
        return s;
    };
    std::map<std::string, uint32_t> in_widths, reg_widths;
    for (uint32_t i = 0; i < g_.input_count(); i++) {
        const BitRef& ref = g_.input_ref(i);
        in_widths[ref.signal] = std::max(in_widths[ref.signal], ref.bit + 1);
    }
    for (uint32_t i = 0; i < g_.register_count(); i++) {
        const BitRef& ref = g_.register_ref(i);
        reg_widths[ref.signal] = std::max(reg_widths[ref.signal], ref.bit + 1);
    }
    for (const auto& [name, width] : in_widths) put_signal(name, width);
    for (const auto& [name, width] : reg_widths) put_signal(name, width);
    for (int64_t k = 0; k < frames; k++) {
        for (uint32_t i = 0; i < g_.input_count(); i++) {
            const BitRef& ref = g_.input_ref(i);
            w.signals[ref.signal].cycles[k][ref.bit] =
                in_trace[k][i] ? WBit::One : WBit::Zero;
        }
        for (uint32_t i = 0; i < g_.register_count(); i++) {
            const BitRef& ref = g_.register_ref(i);
            w.signals[ref.signal].cycles[k][ref.bit] =
                reg_trace[k][i] ? WBit::One : WBit::Zero;
        }
    }
}

std::vector<FailReport> Run::check_fails() {
    if (pending_.empty()) throw EngineError("check-fails: nothing pending");
    std::vector<FailReport> out;
    size_t checked = 0;
    for (const Pending& p : pending_) {
        if (!cfg_.dimacs_dir.empty()) {
            std::filesystem::create_directories(cfg_.dimacs_dir);
            const FailTarget& tgt = tags_.fail_set[p.target];
            std::string path = cfg_.dimacs_dir + "/check_" + sanitize(tgt.signal) + "_b" +
                               std::to_string(tgt.bit) + "_c" + std::to_string(p.cycle) + ".cnf";
            std::ofstream f(path);
            SatLit a = p.lit;
            f << solver_.export_dimacs({&a, 1});
        }
        SatLit a = p.lit;
        SolveStatus st = solver_.solve({&a, 1});
        FailReport r = make_report(p, st);
        if (st == SolveStatus::Sat) {
            stats_.checks_sat++;
            if (!cfg_.cex_dir.empty()) {
                std::filesystem::create_directories(cfg_.cex_dir);
                std::string path = cfg_.cex_dir + "/cex_" + sanitize(r.signal) + "_b" +
                                   std::to_string(r.bit) + "_c" + std::to_string(r.cycle) +
                                   ".vcd";
                std::ofstream f(path);
                f << write_vcd(r.cex_wave);
                r.cex_path = path;
            }
        } else {
            stats_.checks_unsat++;
        }
        checked++;
        bool stop = cfg_.stop_on_first_fail && st == SolveStatus::Sat;
        out.push_back(std::move(r));
        if (stop) break;
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<long>(checked));
    return out;
}

PolicyObservables Run::observables() const {
    PolicyObservables o;
    o.live_clauses = solver_.live_clause_count();
    o.t_min = t_min_;
    o.t_max = t_max_;
    o.pending_count = pending_count();
    o.max_cycle = cfg_.max_cycle;
    o.clause_hi = cfg_.clause_hi;
    o.clause_lo = cfg_.clause_lo;
    o.check_period = cfg_.check_period;
    return o;
}

RunStats Run::final_stats() const {
    RunStats s = stats_;
    const SolverStats& ss = solver_.stats();
    s.solves = ss.solves;
    s.conflicts = ss.conflicts;
    s.decisions = ss.decisions;
    s.propagations = ss.propagations;
    s.clauses_added = ss.clauses_added;
    s.vars_allocated = static_cast<uint64_t>(solver_.num_vars());
    return s;
}

// ------------------------------------------------------------ main loop ----

RunReport main_loop(const Aignet& g, const WaveDb& wave, const TagMap& tags,
                    const RunConfig& cfg, PolicyFn policy,
                    const std::function<void(Action, const Run&)>& observer) {
    RunReport report;
    if (!policy) policy = lookup_policy(cfg.policy);

    RunConfig local = cfg;
    if (local.max_cycle < 0)
        local.max_cycle =
            wave.cycle_count() == 0 ? 0 : static_cast<int64_t>(wave.cycle_count()) - 1;
    if (local.start_cycle == local.max_cycle) return report; // nothing to unroll

    Run run(g, wave, tags, local);

    int64_t span = local.max_cycle - local.start_cycle + 2;
    int64_t guard = 100 * span + 1000;
    for (int64_t iter = 0;; iter++) {
        if (iter > guard)
            throw EngineError("main-loop: policy failed to make progress after " +
                              std::to_string(iter) + " actions");
        PolicyObservables obs = run.observables();
        Action act = policy(obs);
        switch (act) {
        case Action::Done:
            if (obs.t_max != obs.max_cycle || obs.pending_count != 0)
                throw EngineError(
                    "main-loop: policy returned done with work remaining (t-max " +
                    std::to_string(obs.t_max) + ", pending " +
                    std::to_string(obs.pending_count) + ")");
            break;
        case Action::StepFail:
            if (obs.t_max >= obs.max_cycle)
                throw EngineError("main-loop: policy returned step-fail past max-cycle");
            run.step_fail();
            break;
        case Action::StepFree:
            if (obs.t_min > obs.t_max)
                throw EngineError("main-loop: policy returned step-free on an empty window");
            run.step_free();
            break;
        case Action::CheckFails: {
            if (obs.pending_count == 0)
                throw EngineError("main-loop: policy returned check-fails with nothing pending");
            std::vector<FailReport> batch = run.check_fails();
            for (FailReport& r : batch) {
                if (!r.cex_path.empty()) report.cex_paths.push_back(r.cex_path);
                if (r.status == SolveStatus::Sat && cfg.stop_on_first_fail)
                    report.stopped_on_fail = true;
                report.checks.push_back(std::move(r));
            }
            break;
        }
        }
        if (observer) observer(act, run);
        if (act == Action::Done || report.stopped_on_fail) break;
    }

    report.stats = run.final_stats();
    return report;
}

// ------------------------------------------------------------- reports ----

std::string report_to_text(const RunReport& r) {
    std::ostringstream out;
    for (const FailReport& c : r.checks) {
        out << "CHECK " << c.signal << "[" << c.bit << "] @cycle " << c.cycle << " : "
            << (c.status == SolveStatus::Sat ? "SAT" : "UNSAT");
        if (c.status == SolveStatus::Sat)
            out << (c.replay_validated ? " (replay validated)" : " (NOT VALIDATED)");
        if (!c.cex_path.empty()) out << " cex=" << c.cex_path;
        out << "\n";
    }
    out << "checks: " << r.checks.size() << "  sat: " << r.stats.checks_sat
        << "  unsat: " << r.stats.checks_unsat << "\n";
    out << "frames: " << r.stats.frames_encoded << "  clauses: " << r.stats.clauses_added
        << "  vars: " << r.stats.vars_allocated << "  solves: " << r.stats.solves
        << "  conflicts: " << r.stats.conflicts << "\n";
    return out.str();
}

std::string report_to_json(const RunReport& r) {
    nlohmann::json j;
    j["version"] = 1;
    j["checks"] = nlohmann::json::array();
    for (const FailReport& c : r.checks) {
        nlohmann::json jc;
        jc["signal"] = c.signal;
        jc["bit"] = c.bit;
        jc["cycle"] = c.cycle;
        jc["status"] = c.status == SolveStatus::Sat ? "SAT" : "UNSAT";
        if (c.status == SolveStatus::Sat) {
            jc["replay_validated"] = c.replay_validated;
            if (!c.cex_path.empty()) jc["counterexample_file"] = c.cex_path;
            nlohmann::json cex = nlohmann::json::array();
            for (const auto& [key, bit] : c.counterexample) {
                nlohmann::json e;
                e["input"] = key.first;
                e["cycle"] = key.second;
                e["value"] = bit ? 1 : 0;
                cex.push_back(e);
            }
            jc["free_assignment"] = cex;
        }
        j["checks"].push_back(jc);
    }
    j["stats"] = {
        {"frames_encoded", r.stats.frames_encoded},
        {"checks_sat", r.stats.checks_sat},
        {"checks_unsat", r.stats.checks_unsat},
        {"free_vars_created", r.stats.free_vars_created},
        {"free_vars_bound", r.stats.free_vars_bound},
        {"solves", r.stats.solves},
        {"conflicts", r.stats.conflicts},
        {"decisions", r.stats.decisions},
        {"propagations", r.stats.propagations},
        {"clauses_added", r.stats.clauses_added},
        {"vars_allocated", r.stats.vars_allocated},
    };
    j["counterexample_files"] = r.cex_paths;
    j["stopped_on_first_fail"] = r.stopped_on_fail;
    return j.dump(2) + "\n";
}

} // namespace exsim
