// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "exsim/elaborate.hpp"
#include "exsim/engine.hpp"
#include "exsim/verilog.hpp"
#include "seq_oracle.hpp"
#include "test_util.hpp"

using namespace exsim;
using namespace exsim::test;

namespace {

std::string designs_dir() {
    const char* d = std::getenv("EXSIM_DESIGNS");
    return d ? d : "designs";
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    REQUIRE_MESSAGE(f.good(), "cannot open ", path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct ToyFixture {
    Aignet g;
    WaveDb wave;
    ToyFixture() {
        VDesign d = parse_mini_verilog(read_file(designs_dir() + "/toy.v"));
        Elaboration el = elaborate(d, "top");
        g = std::move(el.aignet);
        wave = parse_vcd(read_file(designs_dir() + "/toy.vcd"), "clk");
    }
    RunConfig cfg(int64_t start = 3, int64_t max = 40) const {
        RunConfig c;
        c.start_cycle = start;
        c.max_cycle = max;
        c.stop_on_first_fail = false;
        return c;
    }
};

Tag tag_of(const Aignet& g, const TagMap& tm, const std::string& sig, uint32_t bit) {
    for (uint32_t i = 0; i < g.input_count(); i++)
        if (g.input_ref(i).signal == sig && g.input_ref(i).bit == bit)
            return tm.input_tags[i];
    FAIL("no input ", sig, "[", bit, "]");
    return Tag::Rand;
}

} // namespace

TEST_CASE("default tagging on the toy follows the documented discipline") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});

    CHECK(tag_of(t.g, tm, "free_in", 0) == Tag::Free); // name match beats wave presence
    CHECK(tag_of(t.g, tm, "free_in", 1) == Tag::Free);
    CHECK(tag_of(t.g, tm, "wave_op", 0) == Tag::Wave);
    CHECK(tag_of(t.g, tm, "reset", 0) == Tag::Wave);
    REQUIRE(tm.fail_set.size() == 1);
    CHECK(tm.fail_set[0].signal == "fail_out");
    CHECK(tm.fail_set[0].bit == 0);
}

TEST_CASE("tagging edge cases") {
    // all inputs waved, nothing named free_*/fail_*: empty fail set is an error
    Aignet g;
    (void)g.add_input("a", 1);
    AigLit q = g.add_register("q", 1)[0];
    g.set_next_state(q, (*g.lookup("a"))[0]);
    g.seal();
    Rng rng(1);
    WaveDb wave = wave_for_graph(g, rng, 10, {0}, {"a"});
    CHECK_THROWS_AS(default_tagging(g, wave, {}), ConfigError);

    // with a fail override it tags fine; input 'a' is in the wave
    TagOverrides ov;
    ov.fail_names = {"q"};
    TagMap tm = default_tagging(g, wave, ov);
    CHECK(tag_of(g, tm, "a", 0) == Tag::Wave);
    REQUIRE(tm.fail_set.size() == 1);

    // an input absent from the wave and not overridden becomes Rand
    Aignet g2;
    (void)g2.add_input("a", 1);
    (void)g2.add_input("ghost", 1);
    AigLit q2 = g2.add_register("fail_q", 1)[0];
    g2.set_next_state(q2, (*g2.lookup("ghost"))[0]);
    g2.seal();
    WaveDb wave2 = wave_for_graph(g2, rng, 10, {0}, {"a"});
    TagMap tm2 = default_tagging(g2, wave2, {});
    CHECK(tag_of(g2, tm2, "ghost", 0) == Tag::Rand);
    CHECK(tag_of(g2, tm2, "a", 0) == Tag::Wave);

    // overrides must name real inputs
    TagOverrides bad;
    bad.free_names = {"nonexistent"};
    CHECK_THROWS_AS(default_tagging(g2, wave2, bad), ConfigError);
    TagOverrides badfail;
    badfail.fail_names = {"nonexistent"};
    CHECK_THROWS_AS(default_tagging(g2, wave2, badfail), ConfigError);

    // per-bit override granularity
    Aignet g3;
    (void)g3.add_input("free_v", 2);
    AigLit q3 = g3.add_register("fail_q", 1)[0];
    g3.set_next_state(q3, (*g3.lookup("free_v"))[0]);
    g3.seal();
    WaveDb wave3 = wave_for_graph(g3, rng, 10, {0}, {"free_v"});
    TagOverrides perbit;
    perbit.wave_names = {"free_v[0]"};
    TagMap tm3 = default_tagging(g3, wave3, perbit);
    CHECK(tag_of(g3, tm3, "free_v", 0) == Tag::Wave);
    CHECK(tag_of(g3, tm3, "free_v", 1) == Tag::Free);
}

TEST_CASE("init-run seeds one unit clause per register bit") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    Run run(t.g, t.wave, tm, t.cfg());

    CHECK(run.solver().stats().clauses_added == 8); // in[2] op tmp[2] out[2] fail_out
    CHECK(run.solver().num_vars() == 8);
    CHECK(run.t_min() == 3);
    CHECK(run.t_max() == 2);
    CHECK(run.pending_count() == 0);

    // start-cycle past the end of the wave
    RunConfig past = t.cfg(100, 120);
    CHECK_THROWS_AS(Run(t.g, t.wave, tm, past), ConfigError);
}

TEST_CASE("init-run with an all-zero snapshot asserts all-negative units") {
    Rng rng(7);
    SeqGraph s = random_seq_graph(rng, 2, 1, 3, 10);
    WaveDb wave = wave_for_graph(s.g, rng, 10, {0, 0, 0}, {"in0"});
    TagMap tm = default_tagging(s.g, wave, {});
    RunConfig cfg;
    cfg.start_cycle = 2;
    cfg.max_cycle = 8;
    Run run(s.g, wave, tm, cfg);

    std::string cnf = run.solver().export_dimacs();
    std::istringstream ss(cnf);
    std::string line;
    std::getline(ss, line); // header
    int units = 0;
    while (std::getline(ss, line)) {
        REQUIRE(line.size() > 1);
        CHECK(line[0] == '-'); // every initial-state literal is negative
        units++;
    }
    CHECK(units == 3);
}

TEST_CASE("init-run errors name the offending register") {
    // register missing from the wave entirely
    Rng rng(9);
    SeqGraph s = random_seq_graph(rng, 1, 0, 2, 5);
    WaveDb wave = wave_for_graph(s.g, rng, 10, {0, 0}, {});
    wave.signals.erase("r1");
    TagMap tm = default_tagging(s.g, wave, {});
    RunConfig cfg;
    cfg.start_cycle = 1;
    cfg.max_cycle = 8;
    try {
        Run run(s.g, wave, tm, cfg);
        FAIL("expected init error");
    } catch (const EngineError& e) {
        CHECK(std::string(e.what()).find("r1") != std::string::npos);
    }

    // register X at the start cycle
    WaveDb wx = wave_for_graph(s.g, rng, 10, {0, 0}, {});
    wx.signals["r1"].cycles[1][0] = WBit::X;
    try {
        Run run(s.g, wx, tm, cfg);
        FAIL("expected init error");
    } catch (const EngineError& e) {
        CHECK(std::string(e.what()).find("r1") != std::string::npos);
        CHECK(std::string(e.what()).find("X") != std::string::npos);
    }
}

TEST_CASE("step-fail grows the window and creates free variables with cone depth") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    Run run(t.g, t.wave, tm, t.cfg());

    uint64_t clauses0 = run.solver().stats().clauses_added;
    run.step_fail(); // fail_out@3: the recorded initial value, nothing new
    CHECK(run.t_max() == 3);
    CHECK(run.pending_count() == 1);
    CHECK(run.solver().stats().clauses_added == clauses0);
    CHECK(run.unbound_free_count() == 0);

    run.step_fail(); // @4: cone over initial registers only
    run.step_fail(); // @5: still concrete
    CHECK(run.unbound_free_count() == 0);

    run.step_fail(); // @6 reaches free_in@3
    CHECK(run.unbound_free_count() == 2);
    REQUIRE(run.free_vars_at(3) != nullptr);
    CHECK(run.free_vars_at(3)->size() == 2);
    CHECK(run.free_vars_at(4) == nullptr);

    run.step_fail(); // @7 reaches free_in@4
    CHECK(run.unbound_free_count() == 4);
    CHECK(run.free_vars_at(4) != nullptr);

    CHECK(run.pending_count() == 5);
}

TEST_CASE("fully concrete frames are root-implied with zero decisions") {
    ToyFixture t;
    TagOverrides ov;
    ov.wave_names = {"free_in"}; // everything follows the wave
    TagMap tm = default_tagging(t.g, t.wave, ov);
    Run run(t.g, t.wave, tm, t.cfg());

    run.step_fail();
    run.step_fail();
    run.step_fail();
    CHECK(run.unbound_free_count() == 0);
    uint64_t decisions_before = run.solver().stats().decisions;
    auto reports = run.check_fails();
    CHECK(run.solver().stats().decisions == decisions_before); // all root propagation
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) CHECK(r.status == SolveStatus::Unsat);
}

TEST_CASE("step-free binds from the wave when recorded, else from the seeded source") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    Run run(t.g, t.wave, tm, t.cfg());

    for (int k = 0; k < 4; k++) run.step_fail();
    REQUIRE(run.unbound_free_count() == 2);

    int64_t live_before = run.solver().live_clause_count();
    run.step_free(); // binds free_in@3 to the recorded wave value (0)
    CHECK(run.t_min() == 4);
    CHECK(run.unbound_free_count() == 0);
    CHECK(run.solver().live_clause_count() <= live_before);

    // fail@6 demanded free_in@3 = 2'b11; the wave recorded 0 -> now UNSAT
    auto reports = run.check_fails();
    for (const auto& r : reports) CHECK(r.status == SolveStatus::Unsat);
}

TEST_CASE("step-free on a cycle without free variables just advances t-min") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    Run run(t.g, t.wave, tm, t.cfg());
    run.step_fail();
    run.step_fail();
    CHECK(run.free_vars_at(3) == nullptr);
    run.step_free();
    CHECK(run.t_min() == 4);
    CHECK(run.unbound_free_count() == 0);

    // beyond the window top it is a contract violation
    run.step_free(); // t_min 5 == t_max+1... still allowed at == t_max
    CHECK_THROWS_AS(run.step_free(), EngineError);
}

TEST_CASE("check-fails on the toy finds the two-frame all-ones pattern") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    RunConfig cfg = t.cfg(3, 12);
    Run run(t.g, t.wave, tm, cfg);

    for (int k = 0; k < 9; k++) run.step_fail(); // cycles 3..11
    auto reports = run.check_fails();
    REQUIRE(reports.size() == 9);

    uint32_t free0 = 0, free1 = 0;
    for (uint32_t i = 0; i < t.g.input_count(); i++) {
        if (t.g.input_ref(i).signal == "free_in" && t.g.input_ref(i).bit == 0) free0 = i;
        if (t.g.input_ref(i).signal == "free_in" && t.g.input_ref(i).bit == 1) free1 = i;
    }

    for (const auto& r : reports) {
        if (r.cycle <= 5) {
            CHECK(r.status == SolveStatus::Unsat); // determined by the initial state
        } else {
            REQUIRE(r.status == SolveStatus::Sat);
            CHECK(r.replay_validated);
            if (r.cycle >= 7) {
                // free_in@{c-4} | free_in@{c-3} must be all-ones
                auto at = [&](uint32_t ord, int64_t c) {
                    auto it = r.counterexample.find({ord, c});
                    return it != r.counterexample.end() && it->second;
                };
                CHECK((at(free0, r.cycle - 4) || at(free0, r.cycle - 3)));
                CHECK((at(free1, r.cycle - 4) || at(free1, r.cycle - 3)));
            }
        }
    }
}

TEST_CASE("counterexample waveform replays the failure trace") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    Run run(t.g, t.wave, tm, t.cfg(3, 10));
    for (int k = 0; k < 5; k++) run.step_fail();
    auto reports = run.check_fails();
    bool found = false;
    for (const auto& r : reports) {
        if (r.status != SolveStatus::Sat) continue;
        found = true;
        // cex wave cycle k is absolute cycle start+k; fail_out goes 1 at the end
        const WaveSignal& f = r.cex_wave.signals.at("fail_out");
        CHECK(f.cycles.back()[0] == WBit::One);
        // the stimulus recorded in the wave matches the decoded assignment
        const WaveSignal& fi = r.cex_wave.signals.at("free_in");
        for (const auto& [key, bit] : r.counterexample) {
            const BitRef& ref = t.g.input_ref(key.first);
            if (ref.signal != "free_in") continue;
            int64_t k = key.second - 3;
            if (k >= 0 && k < static_cast<int64_t>(fi.cycles.size()))
                CHECK((fi.cycles[k][ref.bit] == WBit::One) == bit);
        }
    }
    CHECK(found);
}

TEST_CASE("wave-pinning free_in[0] low makes every cycle UNSAT, matching enumeration") {
    ToyFixture t;
    TagOverrides ov;
    ov.wave_names = {"free_in[0]"};
    TagMap tm = default_tagging(t.g, t.wave, ov);
    RunConfig cfg = t.cfg(3, 11); // window of 8 frames, 8 free bits left
    cfg.check_period = 1;

    RunReport report = main_loop(t.g, t.wave, tm, cfg);
    REQUIRE(!report.checks.empty());
    AigLit fail_lit = tm.fail_set[0].lit;
    for (const auto& r : report.checks) {
        CHECK(r.status == SolveStatus::Unsat);
        bool reachable =
            seq_reachable(t.g, t.wave, tm, cfg.seed, cfg.start_cycle, r.cycle, fail_lit);
        CHECK(!reachable);
    }
}

TEST_CASE("default policy decision table") {
    PolicyObservables o;
    o.max_cycle = 40;
    o.clause_hi = 100;
    o.clause_lo = 10;
    o.check_period = 4;

    o.live_clauses = 0;
    o.t_min = 3;
    o.t_max = 2;
    o.pending_count = 0;
    CHECK(default_policy(o) == Action::StepFail); // fresh run

    o.live_clauses = 101;
    o.t_max = 10;
    CHECK(default_policy(o) == Action::StepFree); // above threshold, retireable frames

    o.pending_count = 4;
    CHECK(default_policy(o) == Action::CheckFails); // period reached

    o.pending_count = 2;
    o.t_max = 40;
    CHECK(default_policy(o) == Action::CheckFails); // window topped out

    o.pending_count = 0;
    o.t_max = 40;
    CHECK(default_policy(o) == Action::Done);

    o.t_max = 10;
    o.t_min = 11; // nothing to retire, still above threshold
    o.pending_count = 1;
    CHECK(default_policy(o) == Action::CheckFails);
    o.pending_count = 0;
    CHECK(default_policy(o) == Action::StepFail);
}

TEST_CASE("policy registry") {
    CHECK(lookup_policy("default") == &default_policy);
    CHECK_THROWS_AS(lookup_policy("nope"), ConfigError);
    auto names = policy_names();
    CHECK(std::find(names.begin(), names.end(), "default") != names.end());
    CHECK(std::find(names.begin(), names.end(), "eager") != names.end());
}

TEST_CASE("main loop on the toy reports validated fails and honors stop-on-first") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});

    RunConfig cfg = t.cfg(3, 40);
    cfg.stop_on_first_fail = true;
    RunReport r1 = main_loop(t.g, t.wave, tm, cfg);
    REQUIRE(!r1.checks.empty());
    CHECK(r1.stopped_on_fail);
    const FailReport& last = r1.checks.back();
    CHECK(last.status == SolveStatus::Sat);
    CHECK(last.replay_validated);
    CHECK(last.cycle == 6); // earliest reachable fail from the recorded state

    cfg.stop_on_first_fail = false;
    RunReport r2 = main_loop(t.g, t.wave, tm, cfg);
    CHECK(r2.checks.size() == 38); // cycles 3..40
    int sat = 0;
    for (const auto& c : r2.checks)
        if (c.status == SolveStatus::Sat) {
            sat++;
            CHECK(c.replay_validated);
        }
    CHECK(sat == 35); // cycles 6..40
    CHECK(r2.stats.frames_encoded == 38);
}

TEST_CASE("max-cycle equal to start-cycle is an immediate empty run") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    RunConfig cfg = t.cfg(3, 3);
    RunReport r = main_loop(t.g, t.wave, tm, cfg);
    CHECK(r.checks.empty());
    CHECK(r.stats.frames_encoded == 0);
}

TEST_CASE("check-period 1 vs 4 yields identical (target, cycle, status) sets") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    for (bool stop : {false, true}) {
        std::vector<std::tuple<std::string, int64_t, bool>> sets[2];
        int i = 0;
        for (int64_t period : {1, 4}) {
            RunConfig cfg = t.cfg(3, 20);
            cfg.check_period = period;
            cfg.stop_on_first_fail = stop;
            RunReport r = main_loop(t.g, t.wave, tm, cfg);
            for (const auto& c : r.checks)
                sets[i].emplace_back(c.signal, c.cycle, c.status == SolveStatus::Sat);
            i++;
        }
        REQUIRE(sets[0] == sets[1]);
    }
}

TEST_CASE("fixed seed gives byte-identical reports") {
    ToyFixture t;
    TagOverrides ov;
    ov.rand_names = {"free_in[1]"}; // bring the seeded source into play
    TagMap tm = default_tagging(t.g, t.wave, ov);
    RunConfig cfg = t.cfg(3, 25);
    cfg.seed = 42;
    cfg.stop_on_first_fail = false;

    RunReport a = main_loop(t.g, t.wave, tm, cfg);
    RunReport b = main_loop(t.g, t.wave, tm, cfg);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(report_to_text(a) == report_to_text(b));

    cfg.seed = 43; // a different seed legitimately changes rand bindings
    RunReport c = main_loop(t.g, t.wave, tm, cfg);
    CHECK(report_to_json(a) != report_to_json(c));
}

TEST_CASE("policy contract violations are loud run errors") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    RunConfig cfg = t.cfg(3, 10);

    static PolicyFn bad_done = [](const PolicyObservables&) { return Action::Done; };
    CHECK_THROWS_AS(main_loop(t.g, t.wave, tm, cfg, bad_done), EngineError);

    static PolicyFn bad_check = [](const PolicyObservables&) { return Action::CheckFails; };
    CHECK_THROWS_AS(main_loop(t.g, t.wave, tm, cfg, bad_check), EngineError);

    static PolicyFn bad_free = [](const PolicyObservables&) { return Action::StepFree; };
    CHECK_THROWS_AS(main_loop(t.g, t.wave, tm, cfg, bad_free), EngineError);
}

TEST_CASE("step-free observer invariants on a forced-retirement run") {
    ToyFixture t;
    TagMap tm = default_tagging(t.g, t.wave, {});
    RunConfig cfg = t.cfg(3, 30);
    cfg.clause_hi = 12; // force step-free pressure
    cfg.clause_lo = 2;
    cfg.stop_on_first_fail = false;

    int64_t prev_free = 0;
    int64_t prev_live = 0;
    int frees_seen = 0;
    auto observer = [&](Action a, const Run& run) {
        if (a == Action::StepFree) {
            frees_seen++;
            CHECK(run.unbound_free_count() <= prev_free);
            CHECK(run.solver().live_clause_count() <= prev_live);
        }
        prev_free = run.unbound_free_count();
        prev_live = run.solver().live_clause_count();
    };
    RunReport r = main_loop(t.g, t.wave, tm, cfg, nullptr, observer);
    CHECK(frees_seen > 0);
    CHECK(r.checks.size() > 0);
}

TEST_CASE("SAT can flip to UNSAT after step-free but never the reverse") {
    Rng rng(0x5A5A);
    int flips = 0;
    for (int iter = 0; iter < 40; iter++) {
        SeqGraph s = random_seq_graph(rng, 1 + static_cast<uint32_t>(rng.below(2)),
                                      static_cast<uint32_t>(rng.below(2)),
                                      2 + static_cast<uint32_t>(rng.below(3)),
                                      4 + static_cast<uint32_t>(rng.below(12)));
        std::vector<uint8_t> init(s.g.register_count());
        for (auto& b : init) b = rng.bit();
        WaveDb wave = wave_for_graph(s.g, rng, 14, init, {"in0"});
        TagMap tm = default_tagging(s.g, wave, {});
        RunConfig cfg;
        cfg.start_cycle = 1;
        cfg.max_cycle = 9;
        cfg.seed = rng.next();
        cfg.stop_on_first_fail = false;
        Run run(s.g, wave, tm, cfg);

        for (int k = 0; k < 8; k++) run.step_fail();
        // snapshot verdicts, then retire two frames and compare
        std::vector<SolveStatus> before, after;
        {
            Run probe(s.g, wave, tm, cfg);
            for (int k = 0; k < 8; k++) probe.step_fail();
            auto reports = probe.check_fails();
            for (auto& r : reports) before.push_back(r.status);
        }
        run.step_free();
        run.step_free();
        auto reports = run.check_fails();
        for (auto& r : reports) after.push_back(r.status);
        REQUIRE(before.size() == after.size());
        for (size_t i = 0; i < before.size(); i++) {
            if (before[i] == SolveStatus::Unsat) REQUIRE(after[i] == SolveStatus::Unsat);
            if (after[i] != before[i]) flips++;
        }
    }
    CHECK(flips > 0); // the fuzz actually exercised retirement
}

namespace {

// pure pseudo-random check scheduling: fires CheckFails on a hash of the
// observables, otherwise behaves like the default policy
Action hash_schedule_policy(const PolicyObservables& o) {
    if (o.t_max == o.max_cycle && o.pending_count == 0) return Action::Done;
    if (o.t_max == o.max_cycle) return Action::CheckFails;
    uint64_t h = splitmix64((static_cast<uint64_t>(o.t_max) << 20) ^
                            static_cast<uint64_t>(o.pending_count));
    if (o.pending_count > 0 && (h & 3) == 0) return Action::CheckFails;
    if (o.pending_count >= 6) return Action::CheckFails;
    if (o.live_clauses > o.clause_hi && o.t_min <= o.t_max) return Action::StepFree;
    if (o.live_clauses <= o.clause_hi) return Action::StepFail;
    return o.pending_count > 0 ? Action::CheckFails : Action::StepFail;
}

} // namespace

TEST_CASE("verdicts are window-determined, not schedule-determined, across fuzzed policies") {
    Rng rng(0x5CED);
    for (int iter = 0; iter < 30; iter++) {
        SeqGraph s = random_seq_graph(rng, 1 + static_cast<uint32_t>(rng.below(2)),
                                      static_cast<uint32_t>(rng.below(2)),
                                      2 + static_cast<uint32_t>(rng.below(3)),
                                      4 + static_cast<uint32_t>(rng.below(12)));
        std::vector<uint8_t> init(s.g.register_count());
        for (auto& b : init) b = rng.bit();
        WaveDb wave = wave_for_graph(s.g, rng, 14, init, {"in0"});
        TagMap tm = default_tagging(s.g, wave, {});
        RunConfig cfg;
        cfg.start_cycle = 1;
        cfg.max_cycle = 8;
        cfg.seed = rng.next();
        cfg.stop_on_first_fail = false;

        std::vector<std::tuple<int64_t, bool>> sets[3];
        PolicyFn policies[3] = {lookup_policy("default"), lookup_policy("eager"),
                                &hash_schedule_policy};
        for (int p = 0; p < 3; p++) {
            RunReport r = main_loop(s.g, wave, tm, cfg, policies[p]);
            for (const auto& c : r.checks)
                sets[p].emplace_back(c.cycle, c.status == SolveStatus::Sat);
            std::sort(sets[p].begin(), sets[p].end());
        }
        REQUIRE(sets[0] == sets[1]);
        REQUIRE(sets[0] == sets[2]);
    }
}

TEST_CASE("UNSAT faithfulness holds through step-free retirement") {
    // when frames retire before a check, the oracle fixes the same bindings
    // the engine applied (wave value when recorded, else the stream-1 seeded
    // bit) and enumerates only the still-unbound tail of the window
    Rng rng(0xB1D);
    int retired_checks = 0;
    for (int iter = 0; iter < 40; iter++) {
        SeqGraph s = random_seq_graph(rng, 1 + static_cast<uint32_t>(rng.below(2)),
                                      static_cast<uint32_t>(rng.below(2)),
                                      2 + static_cast<uint32_t>(rng.below(3)),
                                      6 + static_cast<uint32_t>(rng.below(10)));
        std::vector<uint8_t> init(s.g.register_count());
        for (auto& b : init) b = rng.bit();
        WaveDb wave = wave_for_graph(s.g, rng, 14, init, {"in0"});
        TagMap tm = default_tagging(s.g, wave, {});
        RunConfig cfg;
        cfg.start_cycle = 1;
        cfg.max_cycle = 7;
        cfg.seed = rng.next();
        cfg.stop_on_first_fail = false;
        cfg.clause_hi = 4; // forces retirement mid-run
        cfg.clause_lo = 1;

        // capture the window bottom in effect when each cycle was checked
        std::map<int64_t, int64_t> t_min_at_check;
        Run run(s.g, wave, tm, cfg);
        std::vector<FailReport> checks;
        PolicyFn policy = lookup_policy("default");
        for (;;) {
            PolicyObservables obs = run.observables();
            Action a = policy(obs);
            if (a == Action::Done) break;
            if (a == Action::StepFail) run.step_fail();
            else if (a == Action::StepFree) run.step_free();
            else {
                int64_t tmin = run.t_min();
                for (FailReport& r : run.check_fails()) {
                    t_min_at_check[r.cycle] = tmin;
                    checks.push_back(std::move(r));
                }
            }
        }

        AigLit fail_lit = tm.fail_set[0].lit;
        for (const FailReport& r : checks) {
            int64_t tmin = t_min_at_check.at(r.cycle);
            if (tmin > cfg.start_cycle) retired_checks++;

            // oracle: frees below tmin fixed to the engine's binding rule,
            // frees in [tmin, cycle) enumerated exhaustively
            std::vector<std::pair<uint32_t, int64_t>> slots;
            for (uint32_t i = 0; i < s.g.input_count(); i++)
                if (tm.input_tags[i] == Tag::Free)
                    for (int64_t c = tmin; c < r.cycle; c++) slots.emplace_back(i, c);
            REQUIRE(slots.size() <= 16);

            auto input_bit = [&](uint32_t ord, int64_t c, uint64_t m) {
                const BitRef& ref = s.g.input_ref(ord);
                switch (tm.input_tags[ord]) {
                case Tag::Wave: {
                    const WaveSignal* sig = wave.find(ref.signal);
                    WBit b = wave.sample(ref.signal, static_cast<uint64_t>(c))[ref.bit];
                    (void)sig;
                    return b == WBit::One;
                }
                case Tag::Rand: return seeded_bit(cfg.seed, 0, ord, c);
                case Tag::Free: {
                    for (size_t k = 0; k < slots.size(); k++)
                        if (slots[k] == std::make_pair(ord, c)) return ((m >> k) & 1) != 0;
                    // retired: wave value if recorded, else the stream-1 bit
                    const WaveSignal* sig = wave.find(ref.signal);
                    if (sig && ref.bit < sig->width) {
                        WBit b = wave.sample(ref.signal, static_cast<uint64_t>(c))[ref.bit];
                        if (b != WBit::X) return b == WBit::One;
                    }
                    return seeded_bit(cfg.seed, 1, ord, c);
                }
                }
                return false;
            };

            std::vector<uint8_t> start_regs(s.g.register_count());
            for (uint32_t i = 0; i < s.g.register_count(); i++) {
                const BitRef& ref = s.g.register_ref(i);
                start_regs[i] =
                    wave.sample(ref.signal, static_cast<uint64_t>(cfg.start_cycle))[ref.bit] ==
                    WBit::One;
            }
            bool reachable = false;
            for (uint64_t m = 0; m < (1ull << slots.size()) && !reachable; m++) {
                SimState st;
                st.regs = start_regs;
                std::vector<uint8_t> vals;
                for (int64_t c = cfg.start_cycle; c <= r.cycle; c++) {
                    std::vector<uint8_t> ins(s.g.input_count());
                    for (uint32_t i = 0; i < s.g.input_count(); i++)
                        ins[i] = input_bit(i, c, m) ? 1 : 0;
                    if (c == r.cycle)
                        vals = s.g.eval_comb(ins, st.regs);
                    else
                        st = s.g.sim_step(st, ins).next;
                }
                reachable = Aignet::eval_lit(vals, fail_lit);
            }
            REQUIRE(reachable == (r.status == SolveStatus::Sat));
        }
    }
    CHECK(retired_checks > 10); // the fuzz really did check behind retired frames
}

TEST_CASE("combinational fail targets check inputs at the fail cycle itself") {
    // fail = &free_a: no registers anywhere, the cone is all same-cycle inputs
    Aignet g;
    std::vector<AigLit> fr = g.add_input("free_a", 2);
    AigLit both = g.mk_and(fr[0], fr[1]);
    g.add_output("fail_now", {both});
    g.seal();

    Rng rng(0xC0B);
    WaveDb wave = wave_for_graph(g, rng, 10, {}, {});
    TagOverrides ov;
    ov.fail_names = {"fail_now"};
    TagMap tm = default_tagging(g, wave, ov);
    RunConfig cfg;
    cfg.start_cycle = 1;
    cfg.max_cycle = 6;
    cfg.stop_on_first_fail = false;
    RunReport report = main_loop(g, wave, tm, cfg);

    REQUIRE(report.checks.size() == 6); // cycles 1..6
    for (const FailReport& r : report.checks) {
        REQUIRE(r.status == SolveStatus::Sat);
        CHECK(r.replay_validated);
        // the witness must set both bits at the fail cycle itself
        uint32_t on = 0;
        for (const auto& [key, bit] : r.counterexample)
            if (key.second == r.cycle && bit) on++;
        CHECK(on == 2);
    }

    // pinning one bit low through the wave turns every cycle UNSAT
    TagOverrides pin;
    pin.fail_names = {"fail_now"};
    pin.wave_names = {"free_a[0]"};
    WaveDb wave2 = wave_for_graph(g, rng, 10, {}, {"free_a"});
    for (auto& cyc : wave2.signals["free_a"].cycles) cyc[0] = WBit::Zero;
    TagMap tm2 = default_tagging(g, wave2, pin);
    RunReport r2 = main_loop(g, wave2, tm2, cfg);
    for (const FailReport& r : r2.checks) CHECK(r.status == SolveStatus::Unsat);
}

TEST_CASE("several fail targets are checked independently per cycle") {
    // fail_a needs free[0], fail_b needs free[0]&free[1] one cycle deeper
    Aignet g;
    std::vector<AigLit> fr = g.add_input("free_x", 2);
    AigLit ra = g.add_register("ra", 1)[0];
    AigLit rb = g.add_register("rb", 1)[0];
    g.set_next_state(ra, fr[0]);
    g.set_next_state(rb, g.mk_and(ra, fr[1]));
    g.add_output("ra", {ra});
    g.add_output("rb", {rb});
    g.seal();

    Rng rng(0x2F);
    WaveDb wave = wave_for_graph(g, rng, 10, {0, 0}, {});
    TagOverrides ov;
    ov.fail_names = {"ra", "rb"};
    TagMap tm = default_tagging(g, wave, ov);
    REQUIRE(tm.fail_set.size() == 2);

    RunConfig cfg;
    cfg.start_cycle = 1;
    cfg.max_cycle = 5;
    cfg.stop_on_first_fail = false;
    RunReport report = main_loop(g, wave, tm, cfg);

    std::map<std::pair<std::string, int64_t>, SolveStatus> got;
    for (const FailReport& r : report.checks) got[{r.signal, r.cycle}] = r.status;
    REQUIRE(got.size() == 10); // 2 targets x cycles 1..5

    for (int64_t c = 1; c <= 5; c++) {
        // ra@c = free[0]@(c-1): reachable once the window covers c-1
        CHECK(got.at({"ra", c}) == (c >= 2 ? SolveStatus::Sat : SolveStatus::Unsat));
        // rb@c = ra@(c-1) & free[1]@(c-1) = free[0]@(c-2) & free[1]@(c-1)
        CHECK(got.at({"rb", c}) == (c >= 3 ? SolveStatus::Sat : SolveStatus::Unsat));
    }
}

TEST_CASE("duel example: counterexamples must shadow the recorded pattern") {
    VDesign d = parse_mini_verilog(read_file(designs_dir() + "/duel.v"));
    Elaboration el = elaborate(d, "duel");
    const Aignet& g = el.aignet;
    WaveDb wave = parse_vcd(read_file(designs_dir() + "/duel.vcd"), "clk");
    TagMap tm = default_tagging(g, wave, {}); // free_guess matches the free_* pattern
    RunConfig cfg;
    cfg.start_cycle = 3;
    cfg.max_cycle = 20;
    cfg.stop_on_first_fail = false;
    RunReport report = main_loop(g, wave, tm, cfg);

    auto ord = [&](const std::string& sig, uint32_t bit) {
        for (uint32_t i = 0; i < g.input_count(); i++)
            if (g.input_ref(i).signal == sig && g.input_ref(i).bit == bit) return i;
        FAIL("missing input");
        return 0u;
    };
    uint32_t g0 = ord("free_guess", 0), g1 = ord("free_guess", 1);

    int deep_sats = 0;
    for (const FailReport& r : report.checks) {
        if (r.status != SolveStatus::Sat) continue;
        REQUIRE(r.replay_validated);
        if (r.cycle < cfg.start_cycle + 2) continue;
        deep_sats++;
        // fail@c needs matched guesses at c-2 and c-1
        for (int64_t c : {r.cycle - 2, r.cycle - 1}) {
            auto pat = wave.sample("wave_pat", static_cast<uint64_t>(c));
            auto bit = [&](uint32_t o) {
                auto it = r.counterexample.find({o, c});
                REQUIRE(it != r.counterexample.end());
                return it->second;
            };
            CHECK(bit(g0) == (pat[0] == WBit::One));
            CHECK(bit(g1) == (pat[1] == WBit::One));
        }
    }
    CHECK(deep_sats > 5);
}

TEST_CASE("the recorded toy waveform matches a fresh reference simulation") {
    // guards the checked-in fixture against drift: registers in toy.vcd must
    // be exactly the trajectory the design produces under the recorded inputs
    ToyFixture t;
    REQUIRE(t.wave.cycle_count() >= 41);
    SimState st;
    st.regs.assign(t.g.register_count(), 0);
    for (uint64_t k = 0; k + 1 < t.wave.cycle_count(); k++) {
        std::vector<uint8_t> ins(t.g.input_count());
        for (uint32_t i = 0; i < t.g.input_count(); i++) {
            const BitRef& r = t.g.input_ref(i);
            WBit b = t.wave.sample(r.signal, k)[r.bit];
            REQUIRE(b != WBit::X);
            ins[i] = b == WBit::One;
        }
        for (uint32_t i = 0; i < t.g.register_count(); i++) {
            const BitRef& r = t.g.register_ref(i);
            REQUIRE(t.wave.sample(r.signal, k)[r.bit] ==
                    (st.regs[i] ? WBit::One : WBit::Zero));
        }
        st = t.g.sim_step(st, ins).next;
    }
    // the recorded run must itself be fail-free and hold wave_op high
    for (uint64_t k = 0; k < t.wave.cycle_count(); k++) {
        CHECK(t.wave.sample("fail_out", k)[0] == WBit::Zero);
        CHECK(t.wave.sample("wave_op", k)[0] == WBit::One);
    }
    CHECK(t.wave.sample("reset", 2)[0] == WBit::One);
    CHECK(t.wave.sample("reset", 3)[0] == WBit::Zero);
}

TEST_CASE("soundness sentinel: every SAT on fuzzed designs replays; UNSAT matches enumeration") {
    Rng rng(0xCAFE);
    int sats = 0, unsats = 0;
    for (int iter = 0; iter < 200; iter++) {
        uint32_t free_bits = 1 + static_cast<uint32_t>(rng.below(2));
        SeqGraph s = random_seq_graph(rng, free_bits, static_cast<uint32_t>(rng.below(3)),
                                      2 + static_cast<uint32_t>(rng.below(4)),
                                      4 + static_cast<uint32_t>(rng.below(16)));
        std::vector<uint8_t> init(s.g.register_count());
        for (auto& b : init) b = rng.bit();
        WaveDb wave = wave_for_graph(s.g, rng, 12, init, {"in0", "in1"});
        TagMap tm = default_tagging(s.g, wave, {});

        RunConfig cfg;
        cfg.start_cycle = 1;
        int64_t window = 3 + static_cast<int64_t>(rng.below(4)); // <= 12 free bits
        cfg.max_cycle = cfg.start_cycle + window;
        cfg.seed = rng.next();
        cfg.stop_on_first_fail = false;
        cfg.check_period = 1 + static_cast<int64_t>(rng.below(3));

        RunReport report = main_loop(s.g, wave, tm, cfg); // replay throws on mismatch
        AigLit fail_lit = tm.fail_set[0].lit;
        for (const auto& r : report.checks) {
            bool reachable =
                seq_reachable(s.g, wave, tm, cfg.seed, cfg.start_cycle, r.cycle, fail_lit);
            if (r.status == SolveStatus::Sat) {
                REQUIRE(r.replay_validated);
                REQUIRE(reachable);
                sats++;
            } else {
                REQUIRE(!reachable);
                unsats++;
            }
        }
    }
    CHECK(sats > 50);
    CHECK(unsats > 50);
}
